//! Primal-dual path-following for small dense block SDPs.
//!
//! Internally the problem (after equality elimination) is
//!
//! ```text
//!   max  bᵀy   s.t.  Z = C − Σ y_j A_j ⪰ 0          (the user's LMI)
//!   min ⟨C, X⟩ s.t.  ⟨A_j, X⟩ = b_j,  X ⪰ 0          (its dual)
//! ```
//!
//! with `C = F₀ + Σ y_p,i F_i` and `A_j = −Σ_i N_ij F_i`. The LMI iterate is
//! kept exactly on `Z = C − Σ y_j A_j`; `X` starts at a multiple of the
//! identity and reaches its equality constraints along the way. Directions
//! use Nesterov-Todd scaling with a Mehrotra predictor-corrector.

use crate::error::{Error, Result};
use crate::matcore::{symmetric_eig, symmetric_eigenvalues, RealMatrix};

use super::SdpProblem;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Stop once `max(⟨X, Z⟩, |dual − primal|)` is at most this (objective units).
    pub gap_tolerance: f64,
    /// Relative residual of the dual equalities.
    pub feasibility_tolerance: f64,
    pub max_iterations: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { gap_tolerance: 1e-6, feasibility_tolerance: 1e-8, max_iterations: 100, step_fraction: 0.98 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    /// Iteration budget exhausted; the last iterate is returned uncertified.
    MaxIterations,
}

/// Per-iteration diagnostics, in the user's objective units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `⟨X, Z⟩`.
    pub complementarity: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub step_primal: f64,
    pub step_dual: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct RawSolution {
    pub variables: Vec<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub duality_gap: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    pub log: Vec<IterationRecord>,
    pub min_block_eigenvalue: f64,
}

type Blocks = Vec<RealMatrix>;

fn inner(a: &Blocks, b: &Blocks) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

struct Reduced {
    c: Blocks,
    /// `a[j][b]`, `None` when variable `j` does not touch block `b`.
    a: Vec<Vec<Option<RealMatrix>>>,
    b: Vec<f64>,
    offset: f64,
    particular: Vec<f64>,
    nullspace: Vec<Vec<f64>>,
    scale: f64,
}

/// Least-norm particular solution and an orthonormal nullspace basis of
/// the equality system.
fn eliminate(prob: &SdpProblem) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = prob.num_variables();
    let mut q: Vec<Vec<f64>> = Vec::new();
    let mut coords: Vec<f64> = Vec::new();
    let mut particular = vec![0.0; n];
    // Modified Gram-Schmidt on the constraint rows, carrying the right-hand
    // sides along so `particular` is the least-norm solution.
    for eq in &prob.equalities {
        let mut row = eq.coefficients.clone();
        let mut rhs = eq.rhs;
        for (qi, qrhs) in q.iter().zip(&coords) {
            let d: f64 = row.iter().zip(qi).map(|(a, b)| a * b).sum();
            row.iter_mut().zip(qi).for_each(|(a, b)| *a -= d * b);
            rhs -= d * qrhs;
        }
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            if rhs.abs() > 1e-9 {
                return Err(Error::NumericalBreakdown("inconsistent equality constraints".into()));
            }
            continue;
        }
        row.iter_mut().for_each(|v| *v /= norm);
        let coord = rhs / norm;
        particular.iter_mut().zip(&row).for_each(|(p, r)| *p += coord * r);
        coords.push(coord);
        q.push(row);
    }
    let mut nullspace: Vec<Vec<f64>> = Vec::with_capacity(n - q.len());
    for k in 0..n {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        for basis in q.iter().chain(nullspace.iter()) {
            let d: f64 = v.iter().zip(basis).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(basis).for_each(|(a, b)| *a -= d * b);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.5 {
            v.iter_mut().for_each(|x| *x /= norm);
            nullspace.push(v);
        }
    }
    Ok((particular, nullspace))
}

fn reduce(prob: &SdpProblem) -> Result<Reduced> {
    let (particular, nullspace) = eliminate(prob)?;
    let scale = prob.objective.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if scale > 0.0 { scale } else { 1.0 };

    let c: Blocks = prob
        .blocks
        .iter()
        .map(|blk| {
            let mut m = blk.constant.clone();
            for (coef, &y) in blk.coefficients.iter().zip(&particular) {
                if y != 0.0 {
                    m.add_scaled(y, coef);
                }
            }
            m
        })
        .collect();
    let a: Vec<Vec<Option<RealMatrix>>> = nullspace
        .iter()
        .map(|dir| {
            prob.blocks
                .iter()
                .map(|blk| {
                    let mut m = RealMatrix::zeros(blk.dim(), blk.dim());
                    let mut touched = false;
                    for (coef, &w) in blk.coefficients.iter().zip(dir) {
                        if w != 0.0 && coef.max_abs() > 0.0 {
                            m.add_scaled(-w, coef);
                            touched = true;
                        }
                    }
                    touched.then_some(m)
                })
                .collect()
        })
        .collect();
    let b: Vec<f64> = nullspace.iter().map(|dir| dir.iter().zip(&prob.objective).map(|(d, c)| d * c).sum::<f64>() / scale).collect();
    let offset = particular.iter().zip(&prob.objective).map(|(p, c)| p * c).sum::<f64>();
    Ok(Reduced { c, a, b, offset, particular, nullspace, scale })
}

/// `Z = C − Σ y_j A_j`.
fn slack(r: &Reduced, y: &[f64]) -> Blocks {
    let mut z = r.c.clone();
    for (aj, &yj) in r.a.iter().zip(y) {
        for (zb, ab) in z.iter_mut().zip(aj) {
            if let Some(m) = ab {
                zb.add_scaled(-yj, m);
            }
        }
    }
    z
}

fn apply_a(r: &Reduced, x: &Blocks) -> Vec<f64> {
    r.a.iter().map(|aj| aj.iter().zip(x).map(|(ab, xb)| ab.as_ref().map_or(0.0, |m| m.dot(xb))).sum()).collect()
}

fn apply_at(r: &Reduced, dy: &[f64], dims: &[usize]) -> Blocks {
    let mut out: Blocks = dims.iter().map(|&d| RealMatrix::zeros(d, d)).collect();
    for (aj, &w) in r.a.iter().zip(dy) {
        for (ob, ab) in out.iter_mut().zip(aj) {
            if let Some(m) = ab {
                ob.add_scaled(w, m);
            }
        }
    }
    out
}

fn diag_scale(d: &[f64], m: &RealMatrix, e: &[f64]) -> RealMatrix {
    RealMatrix::from_fn(m.rows(), m.cols(), |r, c| d[r] * m[(r, c)] * e[c])
}

/// Nesterov-Todd scaling of one block: `W = G Gᵀ` with `Gᵀ Z G = G⁻¹ X G⁻ᵀ = V`.
struct Scaling {
    g: RealMatrix,
    g_inv: RealMatrix,
    w: RealMatrix,
    v: Vec<f64>,
}

fn nt_scaling(x: &RealMatrix, z: &RealMatrix) -> Result<Scaling> {
    let ex = symmetric_eig(x);
    if ex.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::NumericalBreakdown(format!("dual iterate left the cone (min eigenvalue {:.3e})", ex.eigenvalues[0])));
    }
    let x_half = ex.map(f64::sqrt);
    let x_inv_half = ex.map(|l| 1.0 / l.sqrt());
    let m = x_half.matmul(z).matmul(&x_half).symmetrized();
    let em = symmetric_eig(&m);
    if em.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::NumericalBreakdown(format!("scaling matrix lost definiteness (min eigenvalue {:.3e})", em.eigenvalues[0])));
    }
    let quarter: Vec<f64> = em.eigenvalues.iter().map(|l| l.powf(-0.25)).collect();
    let inv_quarter: Vec<f64> = em.eigenvalues.iter().map(|l| l.powf(0.25)).collect();
    let ones = vec![1.0; quarter.len()];
    let g = diag_scale(&ones, &x_half.matmul(&em.eigenvectors), &quarter);
    let g_inv = diag_scale(&inv_quarter, &em.eigenvectors.transpose().matmul(&x_inv_half), &ones);
    let w = g.matmul(&g.transpose()).symmetrized();
    let v = em.eigenvalues.iter().map(|l| l.sqrt()).collect();
    Ok(Scaling { g, g_inv, w, v })
}

/// Largest `α ≤ 1/fraction` keeping `M + αΔ ⪰ 0`, given `M ≻ 0`.
fn max_step(m: &RealMatrix, delta: &RealMatrix) -> f64 {
    let em = symmetric_eig(m);
    let inv_half = em.map(|l| 1.0 / l.max(f64::MIN_POSITIVE).sqrt());
    let t = inv_half.matmul(delta).matmul(&inv_half).symmetrized();
    let lmin = symmetric_eigenvalues(&t)[0];
    if lmin < 0.0 {
        -1.0 / lmin
    } else {
        f64::INFINITY
    }
}

fn cholesky(m: &RealMatrix) -> Result<RealMatrix> {
    let n = m.rows();
    let mut l = RealMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) {
            return Err(Error::NumericalBreakdown(format!("Schur complement not positive definite at pivot {j} ({d:.3e})")));
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

fn cholesky_solve(l: &RealMatrix, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut y = rhs.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[(i, k)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[(k, i)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    y
}

struct Direction {
    dx: Blocks,
    dz: Blocks,
    dy: Vec<f64>,
}

/// Solve `ΔX + WΔZW = R_c`, `A(ΔX) = r_p`, `ΔZ = −Aᵀ(Δy)`.
fn direction(r: &Reduced, chol: &RealMatrix, w_a_w: &[Vec<Option<RealMatrix>>], rp: &[f64], rc: &Blocks, dims: &[usize]) -> Direction {
    let a_rc = apply_a(r, rc);
    let rhs: Vec<f64> = rp.iter().zip(&a_rc).map(|(p, q)| p - q).collect();
    let dy = cholesky_solve(chol, &rhs);
    let mut dx = rc.clone();
    for (wj, &d) in w_a_w.iter().zip(&dy) {
        for (xb, wb) in dx.iter_mut().zip(wj) {
            if let Some(m) = wb {
                xb.add_scaled(d, m);
            }
        }
    }
    let dz = apply_at(r, &dy, dims).into_iter().map(|m| m.scaled(-1.0)).collect();
    Direction { dx, dz, dy }
}

pub(crate) fn solve(prob: &SdpProblem, opts: &SolverOptions) -> Result<RawSolution> {
    let r = reduce(prob)?;
    let dims: Vec<usize> = prob.blocks.iter().map(|b| b.dim()).collect();
    let n_total: usize = dims.iter().sum();
    let m = r.nullspace.len();

    let shifted: Vec<f64> = prob.initial_point.iter().zip(&r.particular).map(|(a, b)| a - b).collect();
    let mut y: Vec<f64> = r.nullspace.iter().map(|dir| dir.iter().zip(&shifted).map(|(d, s)| d * s).sum()).collect();
    let mut z = slack(&r, &y);
    for (k, zb) in z.iter().enumerate() {
        let lmin = symmetric_eigenvalues(zb)[0];
        if !(lmin > 0.0) {
            return Err(Error::NumericalBreakdown(format!(
                "initial point is not strictly feasible in block {} (min eigenvalue {lmin:.3e})",
                prob.blocks[k].name
            )));
        }
    }

    let b_norm = r.b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let zeta = r
        .a
        .iter()
        .zip(&r.b)
        .map(|(aj, bj)| {
            let an = aj.iter().flatten().map(|mat| mat.dot(mat)).sum::<f64>().sqrt();
            (1.0 + bj.abs()) / (1.0 + an)
        })
        .fold((n_total as f64).sqrt().max(10.0), f64::max);
    let mut x: Blocks = dims.iter().map(|&d| RealMatrix::identity(d).scaled(zeta)).collect();

    let mut log = Vec::new();
    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0;
    let (mut step_p, mut step_d) = (0.0, 0.0);

    loop {
        let ax = apply_a(&r, &x);
        let rp: Vec<f64> = r.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let pinf = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + b_norm);
        let xz = inner(&x, &z);
        let primal = r.scale * r.b.iter().zip(&y).map(|(b, v)| b * v).sum::<f64>() + r.offset;
        let dual = r.scale * inner(&r.c, &x) + r.offset;
        // Stop on the normalised gap so that rescaling the objective leaves
        // the iterate sequence unchanged.
        let gap = xz.max((dual - primal).abs() / r.scale);
        log.push(IterationRecord {
            iteration: iterations,
            primal_objective: primal,
            dual_objective: dual,
            complementarity: r.scale * xz,
            primal_infeasibility: 0.0,
            dual_infeasibility: pinf,
            step_primal: step_p,
            step_dual: step_d,
        });
        if gap <= opts.gap_tolerance && pinf <= opts.feasibility_tolerance {
            status = SolveStatus::Optimal;
            break;
        }
        if iterations >= opts.max_iterations {
            break;
        }
        if !gap.is_finite() {
            return Err(Error::NumericalBreakdown(format!("non-finite gap at iteration {iterations}")));
        }
        iterations += 1;

        let mu = xz / n_total as f64;
        let scalings: Vec<Scaling> = x.iter().zip(&z).map(|(xb, zb)| nt_scaling(xb, zb)).collect::<Result<_>>()?;
        let w_a_w: Vec<Vec<Option<RealMatrix>>> = r
            .a
            .iter()
            .map(|aj| aj.iter().zip(&scalings).map(|(ab, s)| ab.as_ref().map(|mat| s.w.matmul(mat).matmul(&s.w))).collect())
            .collect();
        let mut schur = RealMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let v: f64 = r.a[i].iter().zip(&w_a_w[j]).map(|(ai, wj)| match (ai, wj) {
                    (Some(p), Some(q)) => p.dot(q),
                    _ => 0.0,
                }).sum();
                schur[(i, j)] = v;
                schur[(j, i)] = v;
            }
        }
        let chol = cholesky(&schur)?;

        // Predictor: R_c = −X.
        let rc: Blocks = x.iter().map(|xb| xb.scaled(-1.0)).collect();
        let pred = direction(&r, &chol, &w_a_w, &rp, &rc, &dims);
        let ap = x.iter().zip(&pred.dx).map(|(xb, d)| max_step(xb, d)).fold(f64::INFINITY, f64::min).min(1.0);
        let ad = z.iter().zip(&pred.dz).map(|(zb, d)| max_step(zb, d)).fold(f64::INFINITY, f64::min).min(1.0);
        let x_trial: Blocks = x.iter().zip(&pred.dx).map(|(xb, d)| { let mut t = xb.clone(); t.add_scaled(ap, d); t }).collect();
        let z_trial: Blocks = z.iter().zip(&pred.dz).map(|(zb, d)| { let mut t = zb.clone(); t.add_scaled(ad, d); t }).collect();
        let sigma = (inner(&x_trial, &z_trial) / xz).clamp(0.0, 1.0).powi(3);

        // Corrector in the scaled space: V∘U = σμI − V² − (DxDz + DzDx)/2.
        let rc: Blocks = scalings
            .iter()
            .zip(pred.dx.iter().zip(&pred.dz))
            .map(|(s, (dx, dz))| {
                let dxs = s.g_inv.matmul(dx).matmul(&s.g_inv.transpose());
                let dzs = s.g.transpose().matmul(dz).matmul(&s.g);
                let cross = dxs.matmul(&dzs);
                let n = s.v.len();
                let u = RealMatrix::from_fn(n, n, |i, j| {
                    let mut t = -0.5 * (cross[(i, j)] + cross[(j, i)]);
                    if i == j {
                        t += sigma * mu - s.v[i] * s.v[i];
                    }
                    2.0 * t / (s.v[i] + s.v[j])
                });
                s.g.matmul(&u).matmul(&s.g.transpose()).symmetrized()
            })
            .collect();
        let corr = direction(&r, &chol, &w_a_w, &rp, &rc, &dims);

        let ap = x.iter().zip(&corr.dx).map(|(xb, d)| max_step(xb, d)).fold(f64::INFINITY, f64::min);
        let ad = z.iter().zip(&corr.dz).map(|(zb, d)| max_step(zb, d)).fold(f64::INFINITY, f64::min);
        step_p = (opts.step_fraction * ap).min(1.0);
        step_d = (opts.step_fraction * ad).min(1.0);
        for (xb, d) in x.iter_mut().zip(&corr.dx) {
            xb.add_scaled(step_p, d);
            *xb = xb.symmetrized();
        }
        y.iter_mut().zip(&corr.dy).for_each(|(v, d)| *v += step_d * d);
        z = slack(&r, &y);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalBreakdown(format!("non-finite iterate at iteration {iterations}")));
        }
    }

    let mut variables = r.particular.clone();
    for (dir, &yj) in r.nullspace.iter().zip(&y) {
        variables.iter_mut().zip(dir).for_each(|(v, d)| *v += yj * d);
    }
    let min_block_eigenvalue = z.iter().map(|zb| symmetric_eigenvalues(zb)[0]).fold(f64::INFINITY, f64::min);
    let last = *log.last().expect("at least one record");
    Ok(RawSolution {
        variables,
        primal_objective: last.primal_objective,
        dual_objective: last.dual_objective,
        duality_gap: last.complementarity.max((last.dual_objective - last.primal_objective).abs()),
        iterations,
        status,
        log,
        min_block_eigenvalue,
    })
}
