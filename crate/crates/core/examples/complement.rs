//! The 4×4 complementary channel: closed form against the generic Kraus
//! construction, plus the two endpoint identities.

use qcl::ls_family::{complement_closed, endpoint_checks, kraus_for, LsParam};
use qcl::matcore::ComplexMatrix;

fn main() -> qcl::Result<()> {
    let rho = ComplexMatrix::from_real_rows(&[[0.5, 0.1, 0.0], [0.1, 0.3, 0.05], [0.0, 0.05, 0.2]]);
    for p in LsParam::grid(5) {
        let closed = complement_closed(p, &rho)?;
        let generic = kraus_for(p).complement().apply_matrix(&rho)?;
        println!("x = {:.2}: max |closed - generic| = {:.1e}", p.x(), closed.max_abs_diff(&generic));
    }
    let r = endpoint_checks(1)?;
    println!(
        "x = 1 self-complementarity defect {:.1e}; x = 0 trace-channel defect {:.1e} ({} random inputs)",
        r.self_complementarity_defect, r.trace_complement_defect, r.samples
    );
    Ok(())
}
