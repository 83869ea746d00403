use super::eigen::hermitian_eigenvalues;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::state::DensityMatrix;

/// Eigenvalues in `[−CLIP_THRESHOLD, 0)` are treated as zero; anything more
/// negative is an error.
pub const CLIP_THRESHOLD: f64 = 1e-10;

/// `−x log₂ x` with `0·log 0 = 0`.
pub fn xlog2x_neg(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Shannon entropy in bits of a spectrum, clipping tiny negatives.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigenvalues {
        if l < -CLIP_THRESHOLD {
            return Err(Error::NegativeEigenvalue(l));
        }
        s += xlog2x_neg(l);
    }
    Ok(s)
}

/// Von Neumann entropy in bits of a validated state.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    matrix_entropy(rho.matrix())
}

/// Von Neumann entropy of a Hermitian positive operator that has not been
/// wrapped as a [`DensityMatrix`] (channel outputs in hot loops).
pub fn matrix_entropy(m: &ComplexMatrix) -> Result<f64> {
    spectrum_entropy(&hermitian_eigenvalues(m)?)
}
