//! Symmetry of `Λ_x`: SO(3) for every x, the full SU(3) (with conjugate
//! output) only at x = 1.

use qcl::ls_family::{kraus_for, kraus_representation, spin_rotation, LsParam};
use qcl::matcore::{sample_so3, sample_su3};

fn main() -> qcl::Result<()> {
    let o = sample_so3(0.4, 1.1, 2.5);
    let u = sample_su3(3);
    let (theta, axis) = (0.9, [1.0, 2.0, 2.0]);
    let spin = spin_rotation(theta, axis);
    let omega = kraus_representation(theta, axis);
    println!("{:>5} {:>10} {:>12} {:>10}", "x", "SO(3)", "SU(3), U*", "Kraus rep");
    for p in LsParam::grid(6) {
        let ch = kraus_for(p);
        println!(
            "{:>5.2} {:>10.1e} {:>12.1e} {:>10.1e}",
            p.x(),
            ch.covariance_defect(&o, &o)?,
            ch.covariance_defect(&u, &u.conj())?,
            ch.omega_defect(&spin, &spin, &omega)?
        );
    }
    Ok(())
}
