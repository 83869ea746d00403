//! Dense complex linear algebra for small quantum systems.
//!
//! Everything here is self-contained: Hermitian spectra come from a cyclic
//! Jacobi solver on the real symmetric embedding, which is plenty for the
//! dimensions this crate works with (at most 18 complex rows).

mod eigen;
mod entropy;
mod groups;
mod matrix;
mod ops;
mod real;

pub use eigen::{expi_hermitian, hermitian_eig, hermitian_eigenvalues, HermitianEigen, HERMITIAN_TOLERANCE};
pub use entropy::{matrix_entropy, spectrum_entropy, von_neumann_entropy, xlog2x_neg, CLIP_THRESHOLD};
pub use groups::{random_traceless_hermitian, sample_so3, sample_su3, su3_from_generator};
pub use matrix::{ComplexMatrix, I, ONE, ZERO};
pub use ops::{kron, partial_trace, partial_transpose, Subsystem};
pub use real::{symmetric_eig, symmetric_eigenvalues, RealMatrix, SymmetricEigen};
