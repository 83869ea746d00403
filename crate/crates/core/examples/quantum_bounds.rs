//! Lower and upper bounds on the quantum capacity of `Λ_x` across `[0, 1]`.
//!
//! Run with `cargo run --release --example quantum_bounds`.

use qcl::capacities::q1_lower;
use qcl::ls_family::{kraus_for, LsParam};
use qcl::sdp::{build_qgamma, q_flag, solve};

fn main() -> qcl::Result<()> {
    println!("{:>5} {:>10} {:>10} {:>10} {:>6} {:>10}", "x", "q1_lower", "q_gamma", "q_flag", "iters", "gap");
    for p in LsParam::grid(11) {
        let sol = solve(&build_qgamma(&kraus_for(p).choi())?)?;
        let q1 = q1_lower(p, 20, 42).best_value;
        println!(
            "{:>5.2} {:>10.6} {:>10.6} {:>10.6} {:>6} {:>10.2e}",
            p.x(),
            q1,
            sol.optimal_value.max(1.0).log2(),
            q_flag(p),
            sol.iterations,
            sol.duality_gap
        );
    }
    Ok(())
}
