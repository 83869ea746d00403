//! Hermitian eigensolver built on the real symmetric embedding
//! `M = A + iB  ↦  [[A, −B], [B, A]]`.
//!
//! Every eigenvalue of `M` appears twice in the embedding, with real
//! eigenvectors `(a, b)` and `(−b, a)` that both map back to the same complex
//! line `a + ib`. Eigenvectors are recovered by clustering the doubled
//! spectrum and running a pivoted Gram-Schmidt over the complex images of
//! each cluster. Eigenvalue-only requests skip the embedding and run a
//! complex Jacobi iteration on the matrix itself.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use super::real::{symmetric_eig, RealMatrix, JACOBI_MAX_SWEEPS, JACOBI_TOLERANCE};
use crate::error::{Error, Result};

/// Largest tolerated `‖M − M†‖_max` before the input is rejected.
pub const HERMITIAN_TOLERANCE: f64 = 1e-8;

/// Eigenvalues that differ by less than this (relative to `max(1, ‖M‖)`) are
/// treated as one degenerate cluster.
const CLUSTER_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let fl: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |r, c| (0..n).map(|k| v[(r, k)] * fl[k] * v[(c, k)].conj()).sum())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| Complex64::new(l, 0.0))
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NonSquare { rows: m.rows(), cols: m.cols() });
    }
    let asymmetry = m.hermitian_defect();
    if asymmetry > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian { asymmetry });
    }
    Ok(())
}

fn realify(m: &ComplexMatrix) -> RealMatrix {
    let n = m.rows();
    let h = m.hermitian_part();
    RealMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = h[(r % n, c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigen> {
    check_hermitian(m)?;
    let n = m.rows();
    let sym = m.hermitian_part();
    let embedded = symmetric_eig(&realify(m));
    let tol = CLUSTER_TOLERANCE * sym.max_abs().max(1.0);

    let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut start = 0;
    while start < 2 * n {
        let mut end = start + 1;
        while end < 2 * n
            && ((end - start) % 2 == 1
                || embedded.eigenvalues[end] - embedded.eigenvalues[end - 1] <= tol)
        {
            end += 1;
        }
        let candidates: Vec<Vec<Complex64>> = (start..end)
            .map(|k| {
                (0..n)
                    .map(|i| Complex64::new(embedded.eigenvectors[(i, k)], embedded.eigenvectors[(i + n, k)]))
                    .collect()
            })
            .collect();
        vectors.extend(pivoted_gram_schmidt(candidates, (end - start) / 2));
        start = end;
    }

    let mut pairs: Vec<(f64, Vec<Complex64>)> = vectors
        .into_iter()
        .map(|v| {
            let mv = sym.apply(&v);
            let rayleigh: f64 = v.iter().zip(&mv).map(|(a, b)| (a.conj() * b).re).sum();
            (rayleigh, v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| pairs[c].1[r]);
    Ok(HermitianEigen { eigenvalues, eigenvectors })
}

/// Eigenvalues only, ascending, by complex cyclic Jacobi directly on `m`.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let n = m.rows();
    let mut a = m.hermitian_part();
    let threshold = JACOBI_TOLERANCE * m.frobenius_norm().max(1.0);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n).flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q))).map(|(p, q)| a[(p, q)].norm_sqr()).sum::<f64>().sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let b = apq.norm();
                if b == 0.0 {
                    continue;
                }
                // Phase e^{iφ} of a_pq, then a real rotation on |a_pq|.
                let phase = apq / b;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * b);
                let t = if theta.abs() > 1e150 { 0.5 / theta } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let pc = phase.conj();
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)] * pc;
                    a[(k, p)] = akp * c - akq * s;
                    a[(k, q)] = akp * s + akq * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)] * phase;
                    a[(p, k)] = apk * c - aqk * s;
                    a[(q, k)] = apk * s + aqk * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
            }
        }
    }
    let mut values: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Picks `count` orthonormal vectors from the complex span of `candidates`,
/// always taking the candidate with the largest residual next.
fn pivoted_gram_schmidt(mut candidates: Vec<Vec<Complex64>>, count: usize) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(count);
    for _ in 0..count {
        let (best, _) = candidates
            .iter()
            .enumerate()
            .map(|(i, v)| (i, norm(v)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("cluster has candidates");
        let mut q = candidates.swap_remove(best);
        let nq = norm(&q);
        q.iter_mut().for_each(|z| *z /= nq);
        for v in candidates.iter_mut() {
            let proj: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(&q).for_each(|(b, a)| *b -= proj * a);
        }
        basis.push(q);
    }
    basis
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `exp(iH)` for Hermitian `H`, through its eigendecomposition.
pub fn expi_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h)?;
    Ok(eig.map(|l| Complex64::from_polar(1.0, l)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::matrix::{I, ZERO};

    #[test]
    fn eigenvalue_paths_agree() {
        let m = ComplexMatrix::from_fn(5, 5, |r, c| Complex64::new((r * 7 + c * 3) as f64 % 5.0 - 2.0, (r as f64 - c as f64) * 0.3)).hermitian_part();
        let full = hermitian_eig(&m).unwrap().eigenvalues;
        let fast = hermitian_eigenvalues(&m).unwrap();
        for (a, b) in full.iter().zip(&fast) {
            assert!((a - b).abs() < 1e-12, "{full:?} vs {fast:?}");
        }
    }

    #[test]
    fn diagonal_input_sorted() {
        let e = hermitian_eig(&ComplexMatrix::diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.eigenvalues.len(), 3);
        for (got, want) in e.eigenvalues.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn pauli_y_like() {
        let m = ComplexMatrix::from_rows(&[[ZERO, -I], [I, ZERO]]);
        let e = hermitian_eig(&m).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert!(e.reconstruct().max_abs_diff(&m) < 1e-14);
    }

    #[test]
    fn degenerate_identity_block() {
        let m = ComplexMatrix::identity(4);
        let e = hermitian_eig(&m).unwrap();
        assert!(e.eigenvectors.unitarity_defect() < 1e-14);
        assert!(e.reconstruct().max_abs_diff(&m) < 1e-14);
    }

    #[test]
    fn errors() {
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&rect), Err(Error::NonSquare { .. })));
        let skew = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&skew), Err(Error::NotHermitian { .. })));
    }
}
