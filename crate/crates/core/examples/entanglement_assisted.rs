//! Entanglement-assisted capacity, closed form and from entropies at I/3.

use qcl::capacities::{c_ea, c_ea_numeric};
use qcl::ls_family::LsParam;

fn main() {
    println!("{:>5} {:>12} {:>12}", "x", "closed", "entropic");
    for p in LsParam::grid(11) {
        println!("{:>5.2} {:>12.9} {:>12.9}", p.x(), c_ea(p), c_ea_numeric(p));
    }
}
