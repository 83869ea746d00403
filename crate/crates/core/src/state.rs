use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{hermitian_eigenvalues, ComplexMatrix, ONE};

/// Tolerance for the Hermiticity, trace and positivity checks on states.
pub const STATE_TOLERANCE: f64 = 1e-10;

/// A Hermitian, positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NonSquare { rows: matrix.rows(), cols: matrix.cols() });
        }
        let defect = matrix.hermitian_defect();
        if defect > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("Hermiticity defect {defect:.3e}")));
        }
        let trace = matrix.trace();
        if (trace - ONE).norm() > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace {trace}")));
        }
        let min = hermitian_eigenvalues(&matrix)?[0];
        if min < -STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("minimum eigenvalue {min:.3e}")));
        }
        Ok(Self { matrix })
    }

    /// `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64) }
    }

    /// `|i⟩⟨i|` in a `dim`-dimensional space (zero-based `i`).
    pub fn basis(dim: usize, i: usize) -> Self {
        Self { matrix: ComplexMatrix::unit(dim, i, i) }
    }

    /// `|ψ⟩⟨ψ|/⟨ψ|ψ⟩`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if !(norm2 > 0.0 && norm2.is_finite()) {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        Ok(Self { matrix: ComplexMatrix::outer(psi).scale_real(1.0 / norm2) })
    }

    /// `A A† / Tr(A A†)`, positive by construction.
    pub fn from_factor(a: &ComplexMatrix) -> Result<Self> {
        let m = a.matmul(&a.adjoint());
        let tr = m.trace().re;
        if !(tr > 0.0 && tr.is_finite()) {
            return Err(Error::InvalidState("factor has zero norm".into()));
        }
        let mut m = m.hermitian_part().scale_real(1.0 / tr);
        for i in 0..m.rows() {
            m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
        }
        Ok(Self { matrix: m })
    }

    /// Diagonal state; entries must be non-negative and sum to one.
    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::diag(probabilities))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} unitary on a {}-dimensional state",
                u.rows(),
                u.cols(),
                self.dim()
            )));
        }
        Ok(Self { matrix: u.sandwich(&self.matrix).hermitian_part() })
    }
}
