//! Build the Q_Γ program for one x, solve it, and dump it in SDPA format so
//! an external solver can cross-check the value.
//!
//! `cargo run --example sdp_export -- 0.3 > qgamma.dat-s`

use qcl::ls_family::{kraus_for, LsParam};
use qcl::sdp::{build_qgamma, solve};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.5);
    let prob = build_qgamma(&kraus_for(LsParam::new(x)?).choi())?;
    let sol = solve(&prob)?;
    eprintln!(
        "x = {x}: optimum {:.9} (log2 {:.9}), gap {:.1e}, {} iterations",
        sol.optimal_value,
        sol.optimal_value.log2(),
        sol.duality_gap,
        sol.iterations
    );
    prob.write_sdpa(&mut std::io::stdout().lock())?;
    Ok(())
}
