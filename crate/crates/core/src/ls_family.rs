//! The qutrit family `Λ_x(ρ) = (1−x)ρ + (x/2)(Tr(ρ) I − ρᵀ)`, `0 ≤ x ≤ 1`.
//!
//! `x = 0` is the identity channel and `x = 1` the spin-1 Landau-Streater
//! channel `½ Σ_a J_a ρ J_a`, which coincides with the Werner-Holevo channel.
//! Kraus operators are `K₀ = √(1−x) I` and `K_a = √(x/2) J_a`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::matcore::{expi_hermitian, ComplexMatrix, I, ONE, ZERO};

/// Noise parameter `x ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LsParam(f64);

impl LsParam {
    pub fn new(x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::DomainError(format!("x = {x} outside [0, 1]")));
        }
        Ok(Self(x))
    }

    pub fn x(self) -> f64 {
        self.0
    }

    /// `n` evenly spaced values covering `[0, 1]` with exact endpoints.
    pub fn grid(n: usize) -> Vec<LsParam> {
        match n {
            0 => Vec::new(),
            1 => vec![LsParam(0.0)],
            _ => (0..n).map(|i| LsParam(if i == n - 1 { 1.0 } else { i as f64 / (n - 1) as f64 })).collect(),
        }
    }
}

/// Spin-1 angular momentum matrices `J_x, J_y, J_z` in the Cartesian basis,
/// `(J_a)_{jk} = −i ε_{ajk}`.
pub fn spin_one_generators() -> [ComplexMatrix; 3] {
    let m = -I;
    let jx = ComplexMatrix::from_rows(&[[ZERO, ZERO, ZERO], [ZERO, ZERO, m], [ZERO, -m, ZERO]]);
    let jy = ComplexMatrix::from_rows(&[[ZERO, ZERO, -m], [ZERO, ZERO, ZERO], [m, ZERO, ZERO]]);
    let jz = ComplexMatrix::from_rows(&[[ZERO, m, ZERO], [-m, ZERO, ZERO], [ZERO, ZERO, ZERO]]);
    [jx, jy, jz]
}

fn axis_generator(n: [f64; 3]) -> ComplexMatrix {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    let [jx, jy, jz] = spin_one_generators();
    let mut g = jx.scale_real(n[0] / norm);
    g += &jy.scale_real(n[1] / norm);
    g += &jz.scale_real(n[2] / norm);
    g
}

/// Spin-1 representation `U = exp(iθ n·J)` of a rotation about the axis `n`.
pub fn spin_rotation(theta: f64, axis: [f64; 3]) -> ComplexMatrix {
    expi_hermitian(&axis_generator(axis).scale_real(theta)).expect("n·J is Hermitian")
}

/// `R = exp(θ n·𝒥)` with the real generators `𝒥_a = −i J_a`; the Kraus
/// operators `K_1..K_3` transform under `spin_rotation` through `Rᵀ`.
pub fn adjoint_rotation(theta: f64, axis: [f64; 3]) -> ComplexMatrix {
    expi_hermitian(&axis_generator(axis).scale_real(-theta)).expect("n·J is Hermitian")
}

/// `Ω = diag(1, Rᵀ)` acting on the Kraus index.
pub fn kraus_representation(theta: f64, axis: [f64; 3]) -> ComplexMatrix {
    let rt = adjoint_rotation(theta, axis).transpose();
    ComplexMatrix::from_fn(4, 4, |i, j| match (i, j) {
        (0, 0) => ONE,
        (0, _) | (_, 0) => ZERO,
        _ => rt[(i - 1, j - 1)],
    })
}

pub fn kraus_for(p: LsParam) -> KrausChannel {
    let x = p.x();
    let mut kraus = vec![ComplexMatrix::identity(3).scale_real((1.0 - x).sqrt())];
    kraus.extend(spin_one_generators().iter().map(|j| j.scale_real((x / 2.0).sqrt())));
    KrausChannel::new(format!("Lambda_x(x={x})"), kraus).expect("closed-form Kraus operators are trace preserving")
}

fn check_qutrit(m: &ComplexMatrix) -> Result<()> {
    if m.rows() != 3 || m.cols() != 3 {
        return Err(Error::DimensionMismatch(format!("expected a 3x3 matrix, got {}x{}", m.rows(), m.cols())));
    }
    Ok(())
}

/// `(1−x)ρ + (x/2)(Tr(ρ) I − ρᵀ)` on any 3×3 matrix.
pub fn apply_closed(p: LsParam, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_qutrit(rho)?;
    let x = p.x();
    let tr = rho.trace();
    Ok(ComplexMatrix::from_fn(3, 3, |r, c| {
        let diag = if r == c { tr } else { ZERO };
        rho[(r, c)] * (1.0 - x) + (diag - rho[(c, r)]) * (x / 2.0)
    }))
}

/// The complementary channel on a general matrix with entries
/// `[[a, b, c], [d, e, f], [g, h, k]]`; the output lives on the
/// four-dimensional environment (index 0 belongs to `K₀`).
pub fn complement_closed(p: LsParam, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_qutrit(m)?;
    let x = p.x();
    let (a, b, c) = (m[(0, 0)], m[(0, 1)], m[(0, 2)]);
    let (d, e, f) = (m[(1, 0)], m[(1, 1)], m[(1, 2)]);
    let (g, h, k) = (m[(2, 0)], m[(2, 1)], m[(2, 2)]);
    let s = I * (2.0 * x * (1.0 - x)).sqrt();
    let t01 = s * (f - h);
    let t02 = -s * (c - g);
    let t03 = s * (b - d);
    let rows = [
        [(a + e + k) * (2.0 * (1.0 - x)), t01, t02, t03],
        [t01, (e + k) * x, -d * x, -g * x],
        [t02, -b * x, (a + k) * x, -h * x],
        [t03, -c * x, -f * x, (a + e) * x],
    ];
    Ok(ComplexMatrix::from_rows(&rows).scale_real(0.5))
}

/// Named eigen-operators of `Λ_x` and their eigenvalues as functions of `x`.
#[derive(Clone, Debug)]
pub struct EigenOperator {
    pub name: String,
    pub matrix: ComplexMatrix,
    pub eigenvalue: fn(f64) -> f64,
}

fn lam_one(_: f64) -> f64 {
    1.0
}

fn lam_sym(x: f64) -> f64 {
    1.0 - 1.5 * x
}

fn lam_antisym(x: f64) -> f64 {
    1.0 - 0.5 * x
}

/// `I`, `Z₁ = E₁₁ − E₃₃`, `Z₂ = E₂₂ − E₃₃`, `X_sr = E_sr + E_rs` and
/// `Y_sr = −i(E_sr − E_rs)` for `s < r` (indices one-based in the names).
pub fn eigen_operators() -> Vec<EigenOperator> {
    let e = |r: usize, c: usize| ComplexMatrix::unit(3, r, c);
    let mut ops = vec![
        EigenOperator { name: "I".into(), matrix: ComplexMatrix::identity(3), eigenvalue: lam_one },
        EigenOperator { name: "Z1".into(), matrix: &e(0, 0) - &e(2, 2), eigenvalue: lam_sym },
        EigenOperator { name: "Z2".into(), matrix: &e(1, 1) - &e(2, 2), eigenvalue: lam_sym },
    ];
    for (s, r) in [(0, 1), (0, 2), (1, 2)] {
        ops.push(EigenOperator {
            name: format!("X{}{}", s + 1, r + 1),
            matrix: &e(s, r) + &e(r, s),
            eigenvalue: lam_sym,
        });
    }
    for (s, r) in [(0, 1), (0, 2), (1, 2)] {
        ops.push(EigenOperator {
            name: format!("Y{}{}", s + 1, r + 1),
            matrix: (&e(s, r) - &e(r, s)).scale(-I),
            eigenvalue: lam_antisym,
        });
    }
    ops
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalue_one_mult: usize,
    /// `1 − 3x/2`, carried by the traceless symmetric operators.
    pub lam_sym: f64,
    pub lam_sym_mult: usize,
    /// `1 − x/2`, carried by the antisymmetric operators.
    pub lam_antisym: f64,
    pub lam_antisym_mult: usize,
    pub determinant: f64,
    /// Negative determinant: the channel is not the exponential of any
    /// Lindblad generator.
    pub markovian_obstruction: bool,
}

impl SpectrumReport {
    /// All nine eigenvalues, with multiplicity, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v = vec![1.0; self.eigenvalue_one_mult];
        v.extend(std::iter::repeat_n(self.lam_sym, self.lam_sym_mult));
        v.extend(std::iter::repeat_n(self.lam_antisym, self.lam_antisym_mult));
        v.sort_by(f64::total_cmp);
        v
    }
}

/// `Det Λ_x = (1 − x/2)³ (1 − 3x/2)⁵`.
pub fn determinant(p: LsParam) -> f64 {
    lam_antisym(p.x()).powi(3) * lam_sym(p.x()).powi(5)
}

pub fn spectrum(p: LsParam) -> SpectrumReport {
    let det = determinant(p);
    SpectrumReport {
        eigenvalue_one_mult: 1,
        lam_sym: lam_sym(p.x()),
        lam_sym_mult: 5,
        lam_antisym: lam_antisym(p.x()),
        lam_antisym_mult: 3,
        determinant: det,
        markovian_obstruction: det < 0.0,
    }
}

pub const ENDPOINT_TOLERANCE: f64 = 1e-12;
pub const ENDPOINT_SAMPLES: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct EndpointReport {
    /// Worst `‖block − Λ₁(m)‖_max` at `x = 1`, including the zero border.
    pub self_complementarity_defect: f64,
    /// Worst `‖Λ₀ᶜ(m) − Tr(m)|0⟩⟨0| ⊕ 0₃‖_max`.
    pub trace_complement_defect: f64,
    pub samples: usize,
}

fn random_hermitian(rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(3, 3, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    g.hermitian_part()
}

/// Endpoint degradability facts, probed on `ENDPOINT_SAMPLES` random
/// Hermitian inputs from `seed` plus `I/3`:
///
/// * at `x = 1` the complement has a vanishing first row and column and its
///   lower 3×3 block equals `Λ₁(m)` (the channel is its own complement);
/// * at `x = 0` the complement is `Tr(m)|0⟩⟨0|`.
pub fn endpoint_checks(seed: u64) -> Result<EndpointReport> {
    let one = LsParam(1.0);
    let zero = LsParam(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs: Vec<ComplexMatrix> = (0..ENDPOINT_SAMPLES).map(|_| random_hermitian(&mut rng)).collect();
    inputs.push(ComplexMatrix::identity(3).scale_real(1.0 / 3.0));

    let mut report = EndpointReport { self_complementarity_defect: 0.0, trace_complement_defect: 0.0, samples: inputs.len() };
    for m in &inputs {
        let comp = complement_closed(one, m)?;
        let channel = apply_closed(one, m)?;
        let embedded = ComplexMatrix::from_fn(4, 4, |r, c| if r == 0 || c == 0 { ZERO } else { channel[(r - 1, c - 1)] });
        let defect = comp.max_abs_diff(&embedded);
        if defect > ENDPOINT_TOLERANCE {
            return Err(Error::CheckFailed(format!("x=1 complement differs from channel by {defect:.3e} on input {m:?}")));
        }
        report.self_complementarity_defect = report.self_complementarity_defect.max(defect);

        let comp0 = complement_closed(zero, m)?;
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected[(0, 0)] = m.trace();
        let defect0 = comp0.max_abs_diff(&expected);
        if defect0 > ENDPOINT_TOLERANCE {
            return Err(Error::CheckFailed(format!("x=0 complement is not the trace map (defect {defect0:.3e}) on input {m:?}")));
        }
        report.trace_complement_defect = report.trace_complement_defect.max(defect0);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::DensityMatrix;

    fn p(x: f64) -> LsParam {
        LsParam::new(x).unwrap()
    }

    #[test]
    fn param_domain() {
        assert!(LsParam::new(-0.1).is_err());
        assert!(LsParam::new(1.5).is_err());
        assert!(LsParam::new(f64::NAN).is_err());
        let g = LsParam::grid(11);
        assert_eq!(g.len(), 11);
        assert_eq!(g[0].x(), 0.0);
        assert_eq!(g[10].x(), 1.0);
    }

    #[test]
    fn kraus_endpoints() {
        let k0 = kraus_for(p(0.0));
        assert_eq!(k0.kraus().len(), 4);
        assert!(k0.kraus()[1..].iter().all(|k| k.max_abs() == 0.0));
        let k1 = kraus_for(p(1.0));
        assert_eq!(k1.kraus()[0].max_abs(), 0.0);
        let j = spin_one_generators();
        for a in 0..3 {
            assert!(k1.kraus()[a + 1].max_abs_diff(&j[a].scale_real(0.5f64.sqrt())) < 1e-16);
        }
        for x in [0.0, 0.13, 0.5, 0.77, 1.0] {
            assert!(kraus_for(p(x)).trace_preservation_defect() <= 1e-12);
        }
    }

    #[test]
    fn closed_form_on_pure_input_at_full_noise() {
        let out = apply_closed(p(1.0), DensityMatrix::basis(3, 0).matrix()).unwrap();
        assert!(out.max_abs_diff(&ComplexMatrix::diag(&[0.0, 0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn unital_for_every_x() {
        let mixed = ComplexMatrix::identity(3).scale_real(1.0 / 3.0);
        for x in LsParam::grid(11) {
            assert!(apply_closed(x, &mixed).unwrap().max_abs_diff(&mixed) < 1e-15);
        }
    }

    #[test]
    fn antisymmetric_eigen_operator() {
        let y12 = (&ComplexMatrix::unit(3, 0, 1) - &ComplexMatrix::unit(3, 1, 0)).scale(-I);
        let out = apply_closed(p(0.4), &y12).unwrap();
        assert!(out.max_abs_diff(&y12.scale_real(0.8)) < 1e-15);
    }

    #[test]
    fn complement_displays() {
        let mixed = ComplexMatrix::identity(3).scale_real(1.0 / 3.0);
        for x in [0.0, 0.25, 0.6, 1.0] {
            let out = complement_closed(p(x), &mixed).unwrap();
            let want = ComplexMatrix::diag(&[1.0 - x, x / 3.0, x / 3.0, x / 3.0]);
            assert!(out.max_abs_diff(&want) < 1e-15);
            let out = complement_closed(p(x), &ComplexMatrix::unit(3, 0, 0)).unwrap();
            let want = ComplexMatrix::diag(&[1.0 - x, 0.0, x / 2.0, x / 2.0]);
            assert!(out.max_abs_diff(&want) < 1e-15);
        }
    }

    #[test]
    fn complement_kraus_matches_explicit_operators() {
        // R_1 from the Kraus recipe at a generic x.
        let x = 0.3;
        let comp = kraus_for(p(x)).complement();
        let a = (1.0 - x).sqrt();
        let b = (x / 2.0).sqrt();
        let r1 = ComplexMatrix::from_rows(&[
            [Complex64::new(a, 0.0), ZERO, ZERO],
            [ZERO, ZERO, ZERO],
            [ZERO, ZERO, I * b],
            [ZERO, -I * b, ZERO],
        ]);
        assert!(comp.kraus()[0].max_abs_diff(&r1) < 1e-15);
        assert_eq!(comp.dim_out(), 4);
    }

    #[test]
    fn spectrum_values() {
        let s = spectrum(p(2.0 / 3.0));
        assert_eq!(s.lam_sym, 0.0);
        assert_eq!(s.determinant, 0.0);
        assert!(!s.markovian_obstruction);
        let s = spectrum(p(1.0));
        assert!((s.determinant + 1.0 / 256.0).abs() < 1e-15);
        assert!(spectrum(p(0.8)).markovian_obstruction);
        assert_eq!(s.eigenvalues().len(), 9);
    }

    #[test]
    fn endpoints_hold() {
        let r = endpoint_checks(11).unwrap();
        assert!(r.self_complementarity_defect <= ENDPOINT_TOLERANCE);
        assert!(r.trace_complement_defect <= ENDPOINT_TOLERANCE);
        let mixed = ComplexMatrix::identity(3).scale_real(1.0 / 3.0);
        let out = complement_closed(p(0.0), &mixed).unwrap();
        assert!(out.max_abs_diff(&ComplexMatrix::diag(&[1.0, 0.0, 0.0, 0.0])) < 1e-15);
    }

    #[test]
    fn rotation_covariance() {
        let axis = [0.3, -1.2, 0.7];
        for theta in [0.0, 0.4, 1.9, -2.7] {
            let u = spin_rotation(theta, axis);
            assert!(u.unitarity_defect() < 1e-12);
            // The spin-1 matrices in this basis generate real rotations.
            assert!(u.as_slice().iter().all(|z| z.im.abs() < 1e-12));
            let ch = kraus_for(p(0.6));
            assert!(ch.covariance_defect(&u, &u).unwrap() < 1e-12);
            let omega = kraus_representation(theta, axis);
            assert!(ch.omega_defect(&u, &u, &omega).unwrap() < 1e-12);
        }
    }

    #[test]
    fn dimension_errors() {
        let m = ComplexMatrix::identity(2);
        assert!(apply_closed(p(0.5), &m).is_err());
        assert!(complement_closed(p(0.5), &m).is_err());
    }
}
