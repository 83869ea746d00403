//! Generic Kraus-channel machinery.
//!
//! Vectorization is column stacking throughout: the matrix unit
//! `E_kl = |k⟩⟨l|` of a `d`-dimensional space maps to basis index `k + d·l`.

use crate::error::{Error, Result};
use crate::matcore::{hermitian_eigenvalues, kron, partial_trace, ComplexMatrix, Subsystem, I, ONE};
pub use crate::state::DensityMatrix;

/// Tolerance on `‖Σ K†K − I‖_max`.
pub const TRACE_PRESERVATION_TOLERANCE: f64 = 1e-10;
/// Tolerance on `‖U†U − I‖_max` for covariance probes.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
    label: String,
}

impl KrausChannel {
    /// Validates shapes and trace preservation.
    pub fn new(label: impl Into<String>, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::new_unchecked(label, kraus)?;
        let defect = ch.trace_preservation_defect();
        if defect > TRACE_PRESERVATION_TOLERANCE {
            return Err(Error::NotTracePreserving { defect });
        }
        Ok(ch)
    }

    /// Validates shapes only. Used for negative controls and for maps that are
    /// known to be trace preserving up to rounding.
    pub fn new_unchecked(label: impl Into<String>, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::DimensionMismatch("channel needs at least one Kraus operator".into()))?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        if let Some(bad) = kraus.iter().find(|k| k.rows() != dim_out || k.cols() != dim_in) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator of shape {}x{} among {dim_out}x{dim_in} operators",
                bad.rows(),
                bad.cols()
            )));
        }
        Ok(Self { dim_in, dim_out, kraus, label: label.into() })
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim_in: dim, dim_out: dim, kraus: vec![ComplexMatrix::identity(dim)], label: format!("identity({dim})") }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `‖Σ K_i†K_i − I‖_max`.
    pub fn trace_preservation_defect(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            sum += &k.adjoint().matmul(k);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.dim_in))
    }

    /// `Σ K_i X K_i†` on an arbitrary (not necessarily positive) input.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.dim_in || x.cols() != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} input to a channel with input dimension {}",
                x.rows(),
                x.cols(),
                self.dim_in
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += &k.sandwich(x);
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.apply_matrix(rho.matrix())?.hermitian_part())
    }

    /// `J = Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`, input factor first.
    pub fn choi(&self) -> ChoiMatrix {
        let d = self.dim_in;
        let mut j = ComplexMatrix::zeros(d * self.dim_out, d * self.dim_out);
        for a in 0..d {
            for b in 0..d {
                let unit = ComplexMatrix::unit(d, a, b);
                let image = self.apply_matrix(&unit).expect("unit has input shape");
                j += &kron(&unit, &image);
            }
        }
        ChoiMatrix { dim_in: d, dim_out: self.dim_out, matrix: j }
    }

    /// Complementary channel with `(R_i)_{α,j} = (K_α)_{i,j}`.
    ///
    /// The environment dimension is the full Kraus count, zero operators
    /// included.
    pub fn complement(&self) -> KrausChannel {
        let n = self.kraus.len();
        let kraus = (0..self.dim_out)
            .map(|i| ComplexMatrix::from_fn(n, self.dim_in, |alpha, j| self.kraus[alpha][(i, j)]))
            .collect();
        KrausChannel { dim_in: self.dim_in, dim_out: n, kraus, label: format!("complement of {}", self.label) }
    }

    /// The `d²×d²` matrix acting on column-stacked operators.
    pub fn transfer_matrix(&self) -> Result<ComplexMatrix> {
        let d = self.dim_in;
        if self.dim_out != d {
            return Err(Error::DimensionMismatch(format!(
                "transfer matrix needs equal dimensions, got {} -> {}",
                self.dim_in, self.dim_out
            )));
        }
        let mut t = ComplexMatrix::zeros(d * d, d * d);
        for l in 0..d {
            for k in 0..d {
                let image = self.apply_matrix(&ComplexMatrix::unit(d, k, l))?;
                for c in 0..d {
                    for r in 0..d {
                        t[(r + d * c, k + d * l)] = image[(r, c)];
                    }
                }
            }
        }
        Ok(t)
    }

    /// `max_B ‖Φ(U B U†) − V Φ(B) V†‖_max` over a Hermitian operator basis.
    pub fn covariance_defect(&self, u_in: &ComplexMatrix, u_out: &ComplexMatrix) -> Result<f64> {
        check_unitary(u_in, self.dim_in)?;
        check_unitary(u_out, self.dim_out)?;
        let mut worst = 0.0f64;
        for b in hermitian_basis(self.dim_in) {
            let lhs = self.apply_matrix(&u_in.sandwich(&b))?;
            let rhs = u_out.sandwich(&self.apply_matrix(&b)?);
            worst = worst.max(lhs.max_abs_diff(&rhs));
        }
        Ok(worst)
    }

    /// `max_i ‖V† K_i U − Σ_j Ω_ij K_j‖_max`.
    pub fn omega_defect(&self, u_in: &ComplexMatrix, u_out: &ComplexMatrix, omega: &ComplexMatrix) -> Result<f64> {
        let n = self.kraus.len();
        if omega.rows() != n || omega.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "Ω must be {n}x{n} for {n} Kraus operators, got {}x{}",
                omega.rows(),
                omega.cols()
            )));
        }
        if u_in.rows() != self.dim_in || u_out.rows() != self.dim_out {
            return Err(Error::DimensionMismatch("representation dimensions do not match the channel".into()));
        }
        let v_dag = u_out.adjoint();
        let mut worst = 0.0f64;
        for (i, k) in self.kraus.iter().enumerate() {
            let lhs = v_dag.matmul(k).matmul(u_in);
            let mut rhs = ComplexMatrix::zeros(self.dim_out, self.dim_in);
            for (j, kj) in self.kraus.iter().enumerate() {
                rhs += &kj.scale(omega[(i, j)]);
            }
            worst = worst.max(lhs.max_abs_diff(&rhs));
        }
        Ok(worst)
    }
}

fn check_unitary(u: &ComplexMatrix, dim: usize) -> Result<()> {
    if u.rows() != dim || u.cols() != dim {
        return Err(Error::DimensionMismatch(format!("expected a {dim}x{dim} unitary, got {}x{}", u.rows(), u.cols())));
    }
    let defect = u.unitarity_defect();
    if defect > UNITARY_TOLERANCE {
        return Err(Error::NotUnitary { defect });
    }
    Ok(())
}

/// Hermitian basis of `M_d`: the `E_kk`, then `E_kl + E_lk` and
/// `−i(E_kl − E_lk)` for `k < l`.
pub fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(d * d);
    for k in 0..d {
        basis.push(ComplexMatrix::unit(d, k, k));
    }
    for k in 0..d {
        for l in k + 1..d {
            let mut sym = ComplexMatrix::zeros(d, d);
            sym[(k, l)] = ONE;
            sym[(l, k)] = ONE;
            basis.push(sym);
            let mut anti = ComplexMatrix::zeros(d, d);
            anti[(k, l)] = -I;
            anti[(l, k)] = I;
            basis.push(anti);
        }
    }
    basis
}

/// Choi matrix of a map `A → B`, stored on `A ⊗ B`.
#[derive(Clone, Debug)]
pub struct ChoiMatrix {
    dim_in: usize,
    dim_out: usize,
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn new(dim_in: usize, dim_out: usize, matrix: ComplexMatrix) -> Result<Self> {
        let n = dim_in * dim_out;
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix of a {dim_in}->{dim_out} map must be {n}x{n}"
            )));
        }
        Ok(Self { dim_in, dim_out, matrix })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Multiplies the matrix by a real constant (the result is no longer the
    /// Choi matrix of a channel unless `c = 1`).
    pub fn scaled(&self, c: f64) -> Self {
        Self { dim_in: self.dim_in, dim_out: self.dim_out, matrix: self.matrix.scale_real(c) }
    }

    /// `Φ(ρ) = Tr_A[J (ρᵀ ⊗ I_B)]`.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.dim_in || x.cols() != self.dim_in {
            return Err(Error::DimensionMismatch("input does not match the Choi input dimension".into()));
        }
        let lifted = kron(&x.transpose(), &ComplexMatrix::identity(self.dim_out));
        partial_trace(&self.matrix.matmul(&lifted), self.dim_in, self.dim_out, Subsystem::B)
    }

    /// `Tr_B J`, equal to `I_A` for trace-preserving maps.
    pub fn input_marginal(&self) -> ComplexMatrix {
        partial_trace(&self.matrix, self.dim_in, self.dim_out, Subsystem::A).expect("shape checked at construction")
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eigenvalues(&self.matrix)?[0])
    }
}
