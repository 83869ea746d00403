//! Rotation and special-unitary samplers for qutrit covariance checks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::eigen::expi_hermitian;
use super::matrix::ComplexMatrix;

/// `O₃(γ) O₂(β) O₁(α)` with
/// `O₁` rotating the (1,2) plane, `O₂` the (1,3) plane and `O₃` the (2,3) plane.
pub fn sample_so3(alpha: f64, beta: f64, gamma: f64) -> ComplexMatrix {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let (sg, cg) = gamma.sin_cos();
    let o1 = ComplexMatrix::from_real_rows(&[[ca, sa, 0.0], [-sa, ca, 0.0], [0.0, 0.0, 1.0]]);
    let o2 = ComplexMatrix::from_real_rows(&[[cb, 0.0, sb], [0.0, 1.0, 0.0], [-sb, 0.0, cb]]);
    let o3 = ComplexMatrix::from_real_rows(&[[1.0, 0.0, 0.0], [0.0, cg, sg], [0.0, -sg, cg]]);
    o3.matmul(&o2).matmul(&o1)
}

/// Random traceless Hermitian 3×3 matrix with Gaussian entries.
pub fn random_traceless_hermitian<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(3, 3, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let h = g.hermitian_part();
    let shift = h.trace().re / 3.0;
    &h - &ComplexMatrix::identity(3).scale_real(shift)
}

/// `exp(iH)` for traceless Hermitian `H`; `SU(3)` up to eigensolver accuracy.
pub fn su3_from_generator(h: &ComplexMatrix) -> ComplexMatrix {
    expi_hermitian(h).expect("generator is Hermitian")
}

/// Deterministic `SU(3)` element for a seed.
pub fn sample_su3(seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    su3_from_generator(&random_traceless_hermitian(&mut rng))
}
