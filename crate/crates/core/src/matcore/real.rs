//! Dense real matrices and the cyclic Jacobi eigensolver for symmetric input.

use std::ops::{Index, IndexMut};

/// Convergence threshold on the off-diagonal Frobenius norm, relative to
/// `max(1, ‖A‖_F)`.
pub const JACOBI_TOLERANCE: f64 = 1e-14;
pub const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count does not match shape");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn add_scaled(&mut self, s: f64, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    /// Frobenius inner product `Σ a_ij b_ij`.
    pub fn dot(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn symmetrized(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| 0.5 * (self[(r, c)] + self[(c, r)]))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;

    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors, in the order of `eigenvalues`.
    pub eigenvectors: RealMatrix,
}

impl SymmetricEigen {
    /// `V f(Λ) Vᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> RealMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = RealMatrix::zeros(n, n);
        for r in 0..n {
            for c in r..n {
                let s: f64 = (0..n).map(|k| v[(r, k)] * fl[k] * v[(c, k)]).sum();
                out[(r, c)] = s;
                out[(c, r)] = s;
            }
        }
        out
    }
}

/// Cyclic Jacobi on a symmetric matrix (only the symmetric part is used).
pub fn symmetric_eig(a: &RealMatrix) -> SymmetricEigen {
    let (values, vectors) = jacobi(a, true);
    let vectors = vectors.expect("vectors requested");
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    SymmetricEigen {
        eigenvalues: order.iter().map(|&i| values[i]).collect(),
        eigenvectors: RealMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]),
    }
}

/// Eigenvalues only, ascending.
pub fn symmetric_eigenvalues(a: &RealMatrix) -> Vec<f64> {
    let (mut values, _) = jacobi(a, false);
    values.sort_by(f64::total_cmp);
    values
}

fn jacobi(input: &RealMatrix, want_vectors: bool) -> (Vec<f64>, Option<RealMatrix>) {
    assert_eq!(input.rows, input.cols, "Jacobi needs a square matrix");
    let n = input.rows;
    let mut a = input.symmetrized();
    let mut v = want_vectors.then(|| RealMatrix::identity(n));
    let threshold = JACOBI_TOLERANCE * a.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)] * a[(p, q)])
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;

                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_closed_form() {
        let a = RealMatrix::from_vec(2, 2, vec![2.0, 1.0, 1.0, 2.0]);
        let e = symmetric_eig(&a);
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] - 3.0).abs() < 1e-15);
        let back = e.map(|l| l);
        assert!(back.matmul(&RealMatrix::identity(2)).as_slice().iter().zip(a.as_slice()).all(|(x, y)| (x - y).abs() < 1e-14));
    }

    #[test]
    fn reconstructs_random_symmetric() {
        let n = 12;
        let mut seed = 7u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let mut a = RealMatrix::zeros(n, n);
        for r in 0..n {
            for c in r..n {
                let x = next() * 5.0;
                a[(r, c)] = x;
                a[(c, r)] = x;
            }
        }
        let e = symmetric_eig(&a);
        let back = e.map(|l| l);
        let mut diff = back.clone();
        diff.add_scaled(-1.0, &a);
        assert!(diff.max_abs() < 1e-12, "reconstruction error {}", diff.max_abs());
        let vtv = e.eigenvectors.transpose().matmul(&e.eigenvectors);
        let mut d = vtv;
        d.add_scaled(-1.0, &RealMatrix::identity(n));
        assert!(d.max_abs() < 1e-13);
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }
}
