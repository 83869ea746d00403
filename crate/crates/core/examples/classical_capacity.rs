//! One-shot classical capacity: closed form against a numerical search for
//! the minimum output entropy.

use qcl::capacities::{chi_star, min_output_entropy_numeric, LOG2_3};
use qcl::ls_family::LsParam;

fn main() -> qcl::Result<()> {
    println!("{:>5} {:>12} {:>12}", "x", "chi_star", "log3 - S_min");
    for p in LsParam::grid(11) {
        let (s_min, _) = min_output_entropy_numeric(p)?;
        println!("{:>5.2} {:>12.9} {:>12.9}", p.x(), chi_star(p), LOG2_3 - s_min);
    }
    Ok(())
}
