//! Tensor-product utilities on bipartite operators.
//!
//! Bipartite index convention: `|i⟩_A ⊗ |j⟩_B` has flat index `i·d_B + j`.

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Which factor of `A ⊗ B` survives a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

fn check_bipartite(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<()> {
    let n = dim_a * dim_b;
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected a {n}x{n} operator on {dim_a}x{dim_b}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Traces out the subsystem that is not `keep`.
pub fn partial_trace(m: &ComplexMatrix, dim_a: usize, dim_b: usize, keep: Subsystem) -> Result<ComplexMatrix> {
    check_bipartite(m, dim_a, dim_b)?;
    let out = match keep {
        Subsystem::A => ComplexMatrix::from_fn(dim_a, dim_a, |i, k| {
            (0..dim_b).fold(ZERO, |acc, j| acc + m[(i * dim_b + j, k * dim_b + j)])
        }),
        Subsystem::B => ComplexMatrix::from_fn(dim_b, dim_b, |j, l| {
            (0..dim_a).fold(ZERO, |acc, i| acc + m[(i * dim_b + j, i * dim_b + l)])
        }),
    };
    Ok(out)
}

/// Transpose on the B factor: `(|ij⟩⟨kl|)^{T_B} = |il⟩⟨kj|`.
pub fn partial_transpose(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    check_bipartite(m, dim_a, dim_b)?;
    Ok(ComplexMatrix::from_fn(m.rows(), m.cols(), |r, c| {
        let (i, l) = (r / dim_b, r % dim_b);
        let (k, j) = (c / dim_b, c % dim_b);
        m[(i * dim_b + j, k * dim_b + l)]
    }))
}
