//! Transfer-matrix spectrum and determinant of `Λ_x`; the determinant turns
//! negative past `x = 2/3`, which rules out a Markovian (semigroup) origin.

use qcl::ls_family::{kraus_for, spectrum, LsParam};
use qcl::matcore::hermitian_eigenvalues;

fn main() -> qcl::Result<()> {
    println!("{:>5} {:>10} {:>10} {:>12} {:>12}  obstruction", "x", "1-3x/2", "1-x/2", "det", "det (numeric)");
    for p in LsParam::grid(11) {
        let s = spectrum(p);
        let t = kraus_for(p).transfer_matrix()?;
        let numeric = t.determinant()?.re;
        let ev = hermitian_eigenvalues(&t)?;
        assert_eq!(ev.len(), 9);
        println!(
            "{:>5.2} {:>10.6} {:>10.6} {:>12.3e} {:>12.3e}  {}",
            p.x(),
            s.lam_sym,
            s.lam_antisym,
            s.determinant,
            numeric,
            s.markovian_obstruction
        );
    }
    Ok(())
}
