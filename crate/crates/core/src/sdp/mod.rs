//! The Q_Γ semidefinite upper bound on quantum capacity and the
//! flagged-extension bound for `Λ_x`.
//!
//! Q_Γ is `log₂ max Tr(J R)` over Hermitian `R ⪰ 0` and states `ρ_A`, with
//! `−ρ_A ⊗ I ⪯ R^{T_B} ⪯ ρ_A ⊗ I`. Cited formulations differ on whether
//! `R ⪰ 0` is imposed; it is imposed here. For `Λ_x` the optimum is the same
//! either way (checked against an external solver).

mod solver;

use std::fmt::Write as _;
use std::io;

use crate::capacities::LOG2_3;
use crate::channels::{hermitian_basis, ChoiMatrix, DensityMatrix};
use crate::error::{Error, Result};
use crate::ls_family::{kraus_for, LsParam};
use crate::matcore::{kron, partial_transpose, symmetric_eigenvalues, ComplexMatrix, RealMatrix};

pub use solver::{IterationRecord, SolveStatus, SolverOptions};

/// Symmetric embedding `[[Re H, −Im H], [Im H, Re H]]`; `H ⪰ 0` iff the
/// embedding is.
pub fn realify(h: &ComplexMatrix) -> RealMatrix {
    let n = h.rows();
    RealMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = h[(r % n, c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// `Σ_i coefficients[i]·y_i = rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearEquality {
    pub coefficients: Vec<f64>,
    pub rhs: f64,
}

/// The affine matrix `constant + Σ_i y_i coefficients[i]`, required to be PSD.
#[derive(Clone, Debug, PartialEq)]
pub struct PsdBlock {
    pub name: String,
    pub constant: RealMatrix,
    pub coefficients: Vec<RealMatrix>,
}

impl PsdBlock {
    pub fn dim(&self) -> usize {
        self.constant.rows()
    }

    pub fn evaluate(&self, y: &[f64]) -> RealMatrix {
        let mut m = self.constant.clone();
        for (c, &v) in self.coefficients.iter().zip(y) {
            if v != 0.0 {
                m.add_scaled(v, c);
            }
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq)]
struct QGammaLayout {
    dim_a: usize,
    dim_b: usize,
    r_basis: Vec<ComplexMatrix>,
    rho_basis: Vec<ComplexMatrix>,
}

/// `max cᵀy` subject to linear equalities and PSD blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpProblem {
    pub objective: Vec<f64>,
    pub equalities: Vec<LinearEquality>,
    pub blocks: Vec<PsdBlock>,
    /// Strictly feasible starting point.
    pub initial_point: Vec<f64>,
    layout: Option<QGammaLayout>,
}

impl SdpProblem {
    pub fn new(objective: Vec<f64>, equalities: Vec<LinearEquality>, blocks: Vec<PsdBlock>, initial_point: Vec<f64>) -> Result<Self> {
        let n = objective.len();
        if initial_point.len() != n {
            return Err(Error::DimensionMismatch(format!("initial point has {} entries for {n} variables", initial_point.len())));
        }
        for eq in &equalities {
            if eq.coefficients.len() != n {
                return Err(Error::DimensionMismatch(format!("equality has {} coefficients for {n} variables", eq.coefficients.len())));
            }
        }
        for blk in &blocks {
            let d = blk.dim();
            if blk.constant.cols() != d || blk.coefficients.len() != n {
                return Err(Error::DimensionMismatch(format!("block {} needs a square constant and {n} coefficients", blk.name)));
            }
            for m in std::iter::once(&blk.constant).chain(&blk.coefficients) {
                if m.rows() != d || m.cols() != d {
                    return Err(Error::DimensionMismatch(format!("block {} mixes matrix sizes", blk.name)));
                }
                let asym = (0..d).flat_map(|r| (0..d).map(move |c| (r, c))).fold(0.0f64, |a, (r, c)| a.max((m[(r, c)] - m[(c, r)]).abs()));
                if asym > 1e-12 * m.max_abs() {
                    return Err(Error::InvalidMatrix(format!("block {} has a non-symmetric coefficient", blk.name)));
                }
            }
        }
        Ok(Self { objective, equalities, blocks, initial_point, layout: None })
    }

    pub fn num_variables(&self) -> usize {
        self.objective.len()
    }

    /// Same problem with the objective multiplied by `c`.
    pub fn scaled_objective(&self, c: f64) -> Self {
        let mut p = self.clone();
        p.objective.iter_mut().for_each(|v| *v *= c);
        p
    }

    /// SDPA sparse text format.
    ///
    /// SDPA minimizes `c'ᵀy` subject to `Σ y_i F'_i − F'_0 ⪰ 0`, so the dump
    /// stores `c' = −c` and `F'_0 = −F_0`. Each equality becomes the pair of
    /// inequalities `aᵀy − b ≥ 0` and `b − aᵀy ≥ 0` in one leading diagonal
    /// block (negative size in the block structure line), and the PSD blocks
    /// follow in order. Entries are `matrix block row col value` with
    /// one-based upper-triangular indices.
    pub fn to_sdpa(&self) -> String {
        let mut out = String::new();
        let n = self.num_variables();
        let n_eq = self.equalities.len();
        let offset = usize::from(n_eq > 0);
        let _ = writeln!(out, "\"qcl SDP: {} variables, {} equalities, {} PSD blocks", n, n_eq, self.blocks.len());
        let _ = writeln!(out, "{n}");
        let _ = writeln!(out, "{}", self.blocks.len() + offset);
        let mut sizes: Vec<String> = Vec::new();
        if n_eq > 0 {
            sizes.push(format!("-{}", 2 * n_eq));
        }
        sizes.extend(self.blocks.iter().map(|b| b.dim().to_string()));
        let _ = writeln!(out, "{}", sizes.join(" "));
        let c: Vec<String> = self.objective.iter().map(|v| format!("{:.17e}", -v)).collect();
        let _ = writeln!(out, "{}", c.join(" "));
        for (k, eq) in self.equalities.iter().enumerate() {
            let (up, down) = (2 * k + 1, 2 * k + 2);
            if eq.rhs != 0.0 {
                let _ = writeln!(out, "0 1 {up} {up} {:.17e}", eq.rhs);
                let _ = writeln!(out, "0 1 {down} {down} {:.17e}", -eq.rhs);
            }
            for (i, &a) in eq.coefficients.iter().enumerate() {
                if a != 0.0 {
                    let _ = writeln!(out, "{} 1 {up} {up} {:.17e}", i + 1, a);
                    let _ = writeln!(out, "{} 1 {down} {down} {:.17e}", i + 1, -a);
                }
            }
        }
        for (b, blk) in self.blocks.iter().enumerate() {
            let bn = b + 1 + offset;
            for (mat, m, sign) in std::iter::once((0, &blk.constant, -1.0)).chain(blk.coefficients.iter().enumerate().map(|(i, m)| (i + 1, m, 1.0))) {
                for r in 0..m.rows() {
                    for col in r..m.cols() {
                        let v = m[(r, col)];
                        if v != 0.0 {
                            let _ = writeln!(out, "{mat} {bn} {} {} {:.17e}", r + 1, col + 1, sign * v);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn write_sdpa(&self, w: &mut impl io::Write) -> io::Result<()> {
        w.write_all(self.to_sdpa().as_bytes())
    }
}

/// `ρ_A` and `R` read back from a Q_Γ solution.
#[derive(Clone, Debug, PartialEq)]
pub struct QGammaVariables {
    pub rho_a: DensityMatrix,
    pub r: ComplexMatrix,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    /// Primal objective at the returned point (pre-logarithm for Q_Γ).
    pub optimal_value: f64,
    pub dual_value: f64,
    pub duality_gap: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    pub variables: Vec<f64>,
    /// Present for problems built by [`build_qgamma`].
    pub qgamma: Option<QGammaVariables>,
    /// Smallest eigenvalue over all PSD blocks at the returned point.
    pub min_block_eigenvalue: f64,
    pub log: Vec<IterationRecord>,
}

impl SdpSolution {
    pub fn is_certified(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

/// Encode the Q_Γ program for a channel with Choi matrix `choi`.
///
/// Variables are the coordinates of `R` (`d_A²d_B²` of them) followed by
/// those of `ρ_A` (`d_A²`), both in the Hermitian basis of
/// [`hermitian_basis`]. Blocks, each realified: `R`, `ρ_A⊗I − R^{T_B}`,
/// `ρ_A⊗I + R^{T_B}`, `ρ_A`. The start point is `ρ_A = I/d_A`, `R = 10⁻³ I`.
pub fn build_qgamma(choi: &ChoiMatrix) -> Result<SdpProblem> {
    let (da, db) = (choi.dim_in(), choi.dim_out());
    let j = choi.matrix();
    if j.rows() != da * db || j.cols() != da * db {
        return Err(Error::DimensionMismatch(format!("Choi matrix is {}x{}, expected {}", j.rows(), j.cols(), da * db)));
    }
    let r_basis = hermitian_basis(da * db);
    let rho_basis = hermitian_basis(da);
    let (nr, nrho) = (r_basis.len(), rho_basis.len());
    let n = nr + nrho;
    let big = 2 * da * db;

    let mut objective: Vec<f64> = r_basis.iter().map(|b| j.matmul(b).trace().re).collect();
    objective.extend(std::iter::repeat_n(0.0, nrho));

    let mut trace_row = vec![0.0; n];
    for (k, b) in rho_basis.iter().enumerate() {
        trace_row[nr + k] = b.trace().re;
    }

    let id_b = ComplexMatrix::identity(db);
    let r_real: Vec<RealMatrix> = r_basis.iter().map(realify).collect();
    let r_pt: Vec<RealMatrix> = r_basis
        .iter()
        .map(|b| partial_transpose(b, da, db).map(|m| realify(&m)))
        .collect::<Result<_>>()?;
    let rho_lift: Vec<RealMatrix> = rho_basis.iter().map(|b| realify(&kron(b, &id_b))).collect();
    let rho_real: Vec<RealMatrix> = rho_basis.iter().map(realify).collect();

    let zero_big = RealMatrix::zeros(big, big);
    let zero_small = RealMatrix::zeros(2 * da, 2 * da);
    let block = |name: &str, r_part: &dyn Fn(usize) -> RealMatrix, rho_part: &dyn Fn(usize) -> RealMatrix, dim: usize| PsdBlock {
        name: name.into(),
        constant: RealMatrix::zeros(dim, dim),
        coefficients: (0..nr).map(r_part).chain((0..nrho).map(rho_part)).collect(),
    };
    let blocks = vec![
        block("R", &|k| r_real[k].clone(), &|_| zero_big.clone(), big),
        block("rho_A x I - R^TB", &|k| r_pt[k].scaled(-1.0), &|k| rho_lift[k].clone(), big),
        block("rho_A x I + R^TB", &|k| r_pt[k].clone(), &|k| rho_lift[k].clone(), big),
        block("rho_A", &|_| zero_small.clone(), &|k| rho_real[k].clone(), 2 * da),
    ];

    // Coordinates of εI and I/d_A: diagonal basis elements come first.
    let mut initial_point = vec![0.0; n];
    for k in 0..da * db {
        initial_point[k] = 1e-3;
    }
    for k in 0..da {
        initial_point[nr + k] = 1.0 / da as f64;
    }

    let mut prob = SdpProblem::new(objective, vec![LinearEquality { coefficients: trace_row, rhs: 1.0 }], blocks, initial_point)?;
    prob.layout = Some(QGammaLayout { dim_a: da, dim_b: db, r_basis, rho_basis });
    Ok(prob)
}

fn decode(layout: &QGammaLayout, y: &[f64]) -> Result<QGammaVariables> {
    let nr = layout.r_basis.len();
    let combine = |basis: &[ComplexMatrix], coords: &[f64], d: usize| {
        let mut m = ComplexMatrix::zeros(d, d);
        for (b, &v) in basis.iter().zip(coords) {
            m += &b.scale_real(v);
        }
        m
    };
    let r = combine(&layout.r_basis, &y[..nr], layout.dim_a * layout.dim_b);
    let rho = combine(&layout.rho_basis, &y[nr..], layout.dim_a);
    let rho_a = DensityMatrix::new(rho).map_err(|e| Error::NumericalBreakdown(format!("solver returned an invalid rho_A: {e}")))?;
    Ok(QGammaVariables { rho_a, r })
}

/// Solve with default options.
pub fn solve(prob: &SdpProblem) -> Result<SdpSolution> {
    solve_with(prob, &SolverOptions::default())
}

pub fn solve_with(prob: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    let raw = solver::solve(prob, opts)?;
    let qgamma = prob.layout.as_ref().map(|l| decode(l, &raw.variables)).transpose()?;
    Ok(SdpSolution {
        optimal_value: raw.primal_objective,
        dual_value: raw.dual_objective,
        duality_gap: raw.duality_gap,
        iterations: raw.iterations,
        status: raw.status,
        variables: raw.variables,
        qgamma,
        min_block_eigenvalue: raw.min_block_eigenvalue,
        log: raw.log,
    })
}

/// Smallest eigenvalue of every block at `y`, in block order.
pub fn block_min_eigenvalues(prob: &SdpProblem, y: &[f64]) -> Vec<f64> {
    prob.blocks.iter().map(|b| symmetric_eigenvalues(&b.evaluate(y))[0]).collect()
}

/// Pre-logarithm Q_Γ optimum for `Λ_x`, certified.
pub fn q_gamma_solution(p: LsParam) -> Result<SdpSolution> {
    let sol = solve(&build_qgamma(&kraus_for(p).choi())?)?;
    if !sol.is_certified() {
        let last = sol.log.last().copied();
        return Err(Error::MaxIterations {
            gap: sol.duality_gap,
            primal_infeasibility: last.map_or(f64::NAN, |r| r.primal_infeasibility),
            dual_infeasibility: last.map_or(f64::NAN, |r| r.dual_infeasibility),
        });
    }
    Ok(sol)
}

/// `log₂` of the Q_Γ optimum, floored at 0 bits.
pub fn q_gamma(p: LsParam) -> Result<f64> {
    let value = q_gamma_solution(p)?.optimal_value;
    if value < 1.0 {
        log::warn!("Q_Gamma optimum {value} < 1 at x = {}; reporting 0 bits", p.x());
        return Ok(0.0);
    }
    Ok(value.log2())
}

/// `(1−x)·log₂3`.
pub fn q_flag(p: LsParam) -> f64 {
    (1.0 - p.x()) * LOG2_3
}

/// Where `q_gamma = q_flag` on `(0.5, 1)`, by bisection to `1e-3` in x.
pub fn bound_crossing() -> Result<f64> {
    let f = |x: f64| -> Result<f64> {
        let p = LsParam::new(x)?;
        Ok(q_gamma(p)? - q_flag(p))
    };
    let (mut lo, mut hi) = (0.5, 1.0);
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo.signum() == fhi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if f(mid)?.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::KrausChannel;

    #[test]
    fn realify_preserves_spectrum() {
        let h = ComplexMatrix::from_rows(&[
            [crate::matcore::ONE, crate::matcore::I],
            [-crate::matcore::I, crate::matcore::ONE],
        ]);
        let ev = symmetric_eigenvalues(&realify(&h));
        let want = [0.0, 0.0, 2.0, 2.0];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn scalar_toy() {
        let one = |v: f64| RealMatrix::from_vec(1, 1, vec![v]);
        let blocks = vec![
            PsdBlock { name: "upper".into(), constant: one(1.0), coefficients: vec![one(-1.0)] },
            PsdBlock { name: "lower".into(), constant: one(0.0), coefficients: vec![one(1.0)] },
        ];
        let prob = SdpProblem::new(vec![1.0], vec![], blocks, vec![0.5]).unwrap();
        let sol = solve(&prob).unwrap();
        assert!(sol.is_certified());
        assert!((sol.optimal_value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn equality_elimination() {
        // max y0 + 2 y1 s.t. y0 + y1 = 1, y0 ≥ 0, y1 ≥ 0 → 2.
        let one = |v: f64| RealMatrix::from_vec(1, 1, vec![v]);
        let blocks = vec![
            PsdBlock { name: "y0".into(), constant: one(0.0), coefficients: vec![one(1.0), one(0.0)] },
            PsdBlock { name: "y1".into(), constant: one(0.0), coefficients: vec![one(0.0), one(1.0)] },
        ];
        let eq = LinearEquality { coefficients: vec![1.0, 1.0], rhs: 1.0 };
        let prob = SdpProblem::new(vec![1.0, 2.0], vec![eq], blocks, vec![0.5, 0.5]).unwrap();
        let sol = solve(&prob).unwrap();
        assert!((sol.optimal_value - 2.0).abs() < 1e-6);
        assert!((sol.variables[0] + sol.variables[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_start_rejected() {
        let one = |v: f64| RealMatrix::from_vec(1, 1, vec![v]);
        let blocks = vec![PsdBlock { name: "b".into(), constant: one(0.0), coefficients: vec![one(1.0)] }];
        let prob = SdpProblem::new(vec![-1.0], vec![], blocks, vec![-1.0]).unwrap();
        assert!(matches!(solve(&prob), Err(Error::NumericalBreakdown(_))));
    }

    #[test]
    fn identity_channel_feasible_point() {
        let prob = build_qgamma(&KrausChannel::identity(3).choi()).unwrap();
        assert_eq!(prob.num_variables(), 90);
        // ρ_A = I/3 and R = (1/3) Σ |ii⟩⟨jj| in basis coordinates.
        let basis = hermitian_basis(9);
        let mut target = ComplexMatrix::zeros(9, 9);
        for i in 0..3 {
            for j in 0..3 {
                target[(4 * i, 4 * j)] = crate::matcore::ONE.scale(1.0 / 3.0);
            }
        }
        let mut y: Vec<f64> = basis.iter().map(|b| b.matmul(&target).trace().re / b.matmul(b).trace().re).collect();
        y.extend([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let objective: f64 = prob.objective.iter().zip(&y).map(|(c, v)| c * v).sum();
        assert!((objective - 3.0).abs() < 1e-12);
        assert!(block_min_eigenvalues(&prob, &y).iter().all(|&l| l > -1e-12));
    }

    #[test]
    fn identity_channel_optimum() {
        let sol = solve(&build_qgamma(&KrausChannel::identity(3).choi()).unwrap()).unwrap();
        assert!(sol.is_certified());
        assert!((sol.optimal_value - 3.0).abs() < 1e-4, "{}", sol.optimal_value);
        assert!(sol.duality_gap <= 1e-6);
        assert!(sol.min_block_eigenvalue >= -1e-8);
        let vars = sol.qgamma.unwrap();
        assert!((vars.rho_a.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flag_bound() {
        assert!((q_flag(LsParam::new(0.5).unwrap()) - 0.5 * 3f64.log2()).abs() < 1e-15);
        assert_eq!(q_flag(LsParam::new(1.0).unwrap()), 0.0);
    }

    #[test]
    fn sdpa_layout() {
        let one = |v: f64| RealMatrix::from_vec(1, 1, vec![v]);
        let blocks = vec![PsdBlock { name: "b".into(), constant: one(1.0), coefficients: vec![one(-1.0)] }];
        let eq = LinearEquality { coefficients: vec![2.0], rhs: 1.0 };
        let text = SdpProblem::new(vec![1.0], vec![eq], blocks, vec![0.5]).unwrap().to_sdpa();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "1");
        assert_eq!(lines[2], "2");
        assert_eq!(lines[3], "-2 1");
        assert!(lines[4].starts_with("-1.0"));
        assert!(text.contains("0 2 1 1 -1.0"));
        assert!(text.contains("1 1 1 1 2.0"));
    }
}
