//! Coherent information: the multistart optimizer, the diagonal ansatz, and
//! where the value at I/3 drops to zero.

use qcl::capacities::{coherent_info, ic_ansatz, ic_zero_crossing, q1_lower};
use qcl::channels::DensityMatrix;
use qcl::ls_family::LsParam;

fn main() -> qcl::Result<()> {
    let mixed = DensityMatrix::maximally_mixed(3);
    println!("{:>5} {:>10} {:>10} {:>10}", "x", "q1_lower", "I_c(I/3)", "ansatz");
    for p in LsParam::grid(11) {
        let best = q1_lower(p, 20, 7);
        let scan = (0..=100).map(|i| ic_ansatz(p, i as f64 / 200.0)).collect::<qcl::Result<Vec<_>>>()?;
        let ansatz = scan.into_iter().fold(f64::NEG_INFINITY, f64::max);
        println!("{:>5.2} {:>10.6} {:>10.6} {:>10.6}", p.x(), best.best_value, coherent_info(p, &mixed), ansatz);
    }
    println!("I_c(I/3) changes sign at x = {:.6}", ic_zero_crossing());
    Ok(())
}
