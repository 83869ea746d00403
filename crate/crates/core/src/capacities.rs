//! Capacity formulas for `Λ_x`: the one-shot classical capacity χ*, the
//! entanglement-assisted capacity, coherent information and a multistart
//! lower bound on the single-letter quantum capacity.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::DensityMatrix;
use crate::error::{Error, Result};
use crate::ls_family::{apply_closed, complement_closed, kraus_for, LsParam};
use crate::matcore::{matrix_entropy, von_neumann_entropy, xlog2x_neg, ComplexMatrix};
use crate::optim::{derive_seed, nelder_mead, NelderMeadOptions};

pub const LOG2_3: f64 = 1.584_962_500_721_156;

/// One row of the capacity tables, all values in bits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityPoint {
    pub x: f64,
    pub chi_star: f64,
    pub c_ea: f64,
    pub q1_lower: f64,
    pub q_sdp: f64,
    pub q_flag: f64,
}

impl CapacityPoint {
    /// Ordering and sanity constraints between the quantities.
    pub fn check(&self) -> Result<()> {
        let fields = [self.x, self.chi_star, self.c_ea, self.q1_lower, self.q_sdp, self.q_flag];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::CheckFailed(format!("non-finite value in {self:?}")));
        }
        if self.q1_lower < 0.0 {
            return Err(Error::CheckFailed(format!("q1_lower = {} is negative", self.q1_lower)));
        }
        if self.q1_lower > self.q_sdp + 1e-6 {
            return Err(Error::CheckFailed(format!("q1_lower {} exceeds q_sdp {} at x = {}", self.q1_lower, self.q_sdp, self.x)));
        }
        if self.q1_lower > self.q_flag + 1e-9 {
            return Err(Error::CheckFailed(format!("q1_lower {} exceeds q_flag {} at x = {}", self.q1_lower, self.q_flag, self.x)));
        }
        if self.chi_star > self.c_ea + 1e-9 {
            return Err(Error::CheckFailed(format!("chi_star {} exceeds c_ea {} at x = {}", self.chi_star, self.c_ea, self.x)));
        }
        Ok(())
    }
}

/// `log₂3 + (x/2)log₂(x/2) + (1−x/2)log₂(1−x/2)`.
pub fn chi_star(p: LsParam) -> f64 {
    let x = p.x();
    LOG2_3 - xlog2x_neg(x / 2.0) - xlog2x_neg(1.0 - x / 2.0)
}

/// `2log₂3 + x log₂(x/3) + (1−x)log₂(1−x)`.
pub fn c_ea(p: LsParam) -> f64 {
    let x = p.x();
    // x log₂(x/3) = 3 · (x/3) log₂(x/3)
    2.0 * LOG2_3 - 3.0 * xlog2x_neg(x / 3.0) - xlog2x_neg(1.0 - x)
}

/// `S(I/3) + S(Λ_x(I/3)) − S(Λ_x^c(I/3))` from the Kraus representation.
pub fn c_ea_numeric(p: LsParam) -> f64 {
    let channel = kraus_for(p);
    let mixed = DensityMatrix::maximally_mixed(3);
    let out = channel.apply(&mixed).expect("channel output is a state");
    let env = channel.complement().apply(&mixed).expect("complement output is a state");
    let s = |r: &DensityMatrix| von_neumann_entropy(r).expect("valid state");
    s(&mixed) + s(&out) - s(&env)
}

fn coherent_info_matrix(p: LsParam, rho: &ComplexMatrix) -> f64 {
    let out = apply_closed(p, rho).expect("3x3 input");
    let env = complement_closed(p, rho).expect("3x3 input");
    matrix_entropy(&out).expect("channel output is positive") - matrix_entropy(&env).expect("complement output is positive")
}

/// `I_c(Λ_x, ρ) = S(Λ_x(ρ)) − S(Λ_x^c(ρ))`.
///
/// # Panics
/// If `rho` is not a qutrit state.
pub fn coherent_info(p: LsParam, rho: &DensityMatrix) -> f64 {
    assert_eq!(rho.dim(), 3, "coherent_info needs a qutrit state");
    coherent_info_matrix(p, rho.matrix())
}

/// Coherent information at `diag(s, 1−2s, s)`.
pub fn ic_ansatz(p: LsParam, s: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&s) {
        return Err(Error::DomainError(format!("ansatz parameter s = {s} outside [0, 1/2]")));
    }
    let rho = DensityMatrix::diagonal(&[s, (1.0 - 2.0 * s).max(0.0), s])?;
    Ok(coherent_info(p, &rho))
}

/// Root of `I_c(Λ_x, I/3)` in x, by bisection to `1e-9`.
///
/// The bracket is `(0, 1/2)`: the value is `log₂3` at 0 and negative at 1/2.
/// It returns to zero at `x = 1`, where the channel is anti-degradable.
pub fn ic_zero_crossing() -> f64 {
    let mixed = DensityMatrix::maximally_mixed(3);
    let f = |x: f64| coherent_info(LsParam::new(x).expect("bracket inside [0,1]"), &mixed);
    let (mut lo, mut hi) = (0.0, 0.5);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerResult {
    pub best_value: f64,
    pub best_state: DensityMatrix,
    pub starts: usize,
    pub converged_starts: usize,
}

fn factor_from_params(v: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(3, 3, |r, c| {
        let k = 2 * (3 * r + c);
        Complex64::new(v[k], v[k + 1])
    })
}

fn state_from_params(v: &[f64]) -> Option<DensityMatrix> {
    DensityMatrix::from_factor(&factor_from_params(v)).ok()
}

struct StartOutcome {
    value: f64,
    state: DensityMatrix,
    converged: bool,
}

fn run_start(p: LsParam, x0: Vec<f64>, opts: &NelderMeadOptions) -> StartOutcome {
    let objective = |v: &[f64]| match state_from_params(v) {
        Some(rho) => -coherent_info_matrix(p, rho.matrix()),
        None => f64::INFINITY,
    };
    let m = nelder_mead(objective, &x0, opts);
    let (point, converged) = if m.value.is_finite() { (m.point, m.converged) } else { (x0, false) };
    let state = state_from_params(&point).expect("finite objective implies a valid factor");
    let value = coherent_info(p, &state);
    StartOutcome { value, state, converged }
}

/// Multistart maximization of coherent information over qutrit states
/// `ρ = AA†/Tr(AA†)`.
///
/// Runs `starts` Gaussian random factors plus the three basis pure states,
/// each through a simplex search. Basis states have `I_c = 0`, so the
/// result is never negative. Start `i` draws from
/// `derive_seed(seed, i)`, and starts run in parallel without affecting the
/// result.
pub fn q1_lower(p: LsParam, starts: usize, seed: u64) -> OptimizerResult {
    q1_lower_with(p, starts, seed, &NelderMeadOptions::default())
}

pub fn q1_lower_with(p: LsParam, starts: usize, seed: u64, opts: &NelderMeadOptions) -> OptimizerResult {
    let mut initial: Vec<Vec<f64>> = (0..3)
        .map(|i| {
            let mut v = vec![0.0; 18];
            v[2 * (3 * i + i)] = 1.0;
            v
        })
        .collect();
    initial.extend((0..starts as u64).map(|i| {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i));
        (0..18).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
    }));

    let outcomes: Vec<StartOutcome> = initial.into_par_iter().map(|x0| run_start(p, x0, opts)).collect();
    let converged_starts = outcomes.iter().filter(|o| o.converged).count();
    let total = outcomes.len();
    let best = outcomes
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("at least the basis starts");
    OptimizerResult { best_value: best.value.max(0.0), best_state: best.state, starts: total, converged_starts }
}

fn pure_from_angles(a: &[f64]) -> Vec<Complex64> {
    let (s1, c1) = a[0].sin_cos();
    let (s2, c2) = a[1].sin_cos();
    vec![
        Complex64::new(c1, 0.0),
        Complex64::from_polar(s1 * c2, a[2]),
        Complex64::from_polar(s1 * s2, a[3]),
    ]
}

/// Minimum output entropy of `Λ_x` over pure inputs
/// `(cos θ₁, sin θ₁ cos θ₂ e^{iφ₁}, sin θ₁ sin θ₂ e^{iφ₂})`.
pub fn min_output_entropy_numeric(p: LsParam) -> Result<(f64, Vec<Complex64>)> {
    let objective = |a: &[f64]| {
        let rho = ComplexMatrix::outer(&pure_from_angles(a));
        matrix_entropy(&apply_closed(p, &rho).expect("3x3")).unwrap_or(f64::INFINITY)
    };
    let opts = NelderMeadOptions { f_tol: 1e-13, max_evaluations: 4000, initial_step: 0.4 };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for t1 in [0.3, 0.9, 1.4] {
        for t2 in [0.4, 1.1] {
            for ph in [0.5, 2.0] {
                let m = nelder_mead(objective, &[t1, t2, ph, -ph], &opts);
                if best.as_ref().is_none_or(|(v, _)| m.value < *v) {
                    best = Some((m.value, m.point));
                }
            }
        }
    }
    let (value, angles) = best.expect("non-empty start list");
    if !value.is_finite() {
        return Err(Error::OptimizerDiverged(format!("minimum output entropy search at x = {} returned {value}", p.x())));
    }
    Ok((value.max(0.0), pure_from_angles(&angles)))
}
