//! Derivative-free simplex minimization (Nelder-Mead with dimension-adaptive
//! coefficients) and seed derivation for multistart searches.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NelderMeadOptions {
    /// Stop once `f_max − f_min` over the simplex is at most this.
    pub f_tol: f64,
    pub max_evaluations: usize,
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { f_tol: 1e-10, max_evaluations: 20_000, initial_step: 0.25 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimize `f` starting from `x0`. Non-finite function values are treated
/// as `+∞`, so the simplex moves away from them.
pub fn nelder_mead(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], opts: &NelderMeadOptions) -> Minimum {
    let n = x0.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64], count: &mut usize| {
        *count += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    if n == 0 {
        let value = eval(x0, &mut evaluations);
        return Minimum { point: Vec::new(), value, evaluations, converged: true };
    }

    let nf = n as f64;
    let alpha = 1.0;
    let beta = 1.0 + 2.0 / nf;
    let gamma = 0.75 - 0.5 / nf;
    let delta = 1.0 - 1.0 / nf;

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v, &mut evaluations)).collect();
    let mut order: Vec<usize> = (0..=n).collect();
    let mut converged = false;

    let along = |from: &[f64], to: &[f64], t: f64| -> Vec<f64> { from.iter().zip(to).map(|(c, w)| c + t * (c - w)).collect() };

    while evaluations < opts.max_evaluations {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (best, worst, second) = (order[0], order[n], order[n - 1]);
        if values[worst] - values[best] <= opts.f_tol {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for &idx in &order[..n] {
            for (c, v) in centroid.iter_mut().zip(&simplex[idx]) {
                *c += v / nf;
            }
        }

        let xr = along(&centroid, &simplex[worst], alpha);
        let fr = eval(&xr, &mut evaluations);
        if fr < values[best] {
            let xe = along(&centroid, &simplex[worst], alpha * beta);
            let fe = eval(&xe, &mut evaluations);
            if fe < fr {
                simplex[worst] = xe;
                values[worst] = fe;
            } else {
                simplex[worst] = xr;
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second] {
            simplex[worst] = xr;
            values[worst] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[worst] {
            let xc = along(&centroid, &simplex[worst], alpha * gamma);
            let fc = eval(&xc, &mut evaluations);
            (xc, fc)
        } else {
            let xc = along(&centroid, &simplex[worst], -gamma);
            let fc = eval(&xc, &mut evaluations);
            (xc, fc)
        };
        if fc < fr.min(values[worst]) {
            simplex[worst] = xc;
            values[worst] = fc;
            continue;
        }
        let anchor = simplex[best].clone();
        for &idx in &order[1..] {
            let shrunk: Vec<f64> = anchor.iter().zip(&simplex[idx]).map(|(b, v)| b + delta * (v - b)).collect();
            values[idx] = eval(&shrunk, &mut evaluations);
            simplex[idx] = shrunk;
        }
    }

    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    Minimum { point: simplex[best].clone(), value: values[best], evaluations, converged }
}

/// SplitMix64 finalizer; turns `(seed, index)` into an independent stream seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
