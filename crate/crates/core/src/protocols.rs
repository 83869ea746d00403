//! Dense-coding protocols through `Λ_1` (Alice's half of a maximally
//! entangled qutrit pair goes through the channel, Bob's does not).
//!
//! Two-qutrit kets `|a, b⟩` use flat index `3a + b`, Alice first.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::capacities::{c_ea, LOG2_3};
use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::ls_family::{kraus_for, LsParam};
use crate::matcore::{kron, xlog2x_neg, ComplexMatrix, ZERO};

pub const PROBABILITY_TOLERANCE: f64 = 1e-12;
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolResult {
    pub protocol_name: String,
    /// `joint_distribution[message][outcome]`.
    pub joint_distribution: Vec<Vec<f64>>,
    pub mutual_information: f64,
    /// `c_ea(1) − mutual_information`.
    pub gap_to_capacity: f64,
}

impl ProtocolResult {
    fn new(name: &str, joint: Vec<Vec<f64>>) -> Result<Self> {
        let mutual_information = mutual_information(&joint)?;
        let full = LsParam::new(1.0).expect("1 is in range");
        Ok(Self { protocol_name: name.into(), joint_distribution: joint, mutual_information, gap_to_capacity: c_ea(full) - mutual_information })
    }

    /// `P(outcome | message)`.
    pub fn conditional(&self) -> Vec<Vec<f64>> {
        self.joint_distribution
            .iter()
            .map(|row| {
                let total: f64 = row.iter().sum();
                row.iter().map(|p| if total > 0.0 { p / total } else { 0.0 }).collect()
            })
            .collect()
    }
}

/// `ω^k` with `ω = e^{2πi/3}`.
pub fn omega_pow(k: i64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * k.rem_euclid(3) as f64 / 3.0)
}

fn ket(a: usize, b: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; 9];
    v[3 * a + b] = Complex64::new(1.0, 0.0);
    v
}

/// Fourier basis vector `|f_l⟩ = Σ_k ω^{lk}|k⟩/√3`; `Z|f_l⟩ = |f_{l+1}⟩`.
pub fn fourier_ket(l: usize) -> Vec<Complex64> {
    (0..3).map(|k| omega_pow((l * k) as i64) / 3f64.sqrt()).collect()
}

fn product(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// `Λ_1 ⊗ id` on two qutrits.
fn channel_on_alice() -> KrausChannel {
    let id = ComplexMatrix::identity(3);
    let ops = kraus_for(LsParam::new(1.0).expect("1 is in range")).kraus().iter().map(|k| kron(k, &id)).collect();
    KrausChannel::new("Lambda_1 x id", ops).expect("tensor product with identity stays trace preserving")
}

/// `|Φ_n⟩ = (Z^n ⊗ I)|Φ⟩ = Σ_j ω^{jn}|j, j⟩/√3`.
pub fn phase_state(n: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; 9];
    for j in 0..3 {
        v[3 * j + j] = omega_pow((j * n) as i64) / 3f64.sqrt();
    }
    v
}

/// `(1/6)(I⊗I − Σ_{j,k} ω^{(j−k)n}|k, j⟩⟨j, k|)`.
pub fn phase_output_closed(n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(9);
    for j in 0..3 {
        for k in 0..3 {
            m[(3 * k + j, 3 * j + k)] -= omega_pow((j as i64 - k as i64) * n as i64);
        }
    }
    m.scale_real(1.0 / 6.0)
}

/// `E_p = Σ_l |f_l, f_{l+p}⟩⟨f_l, f_{l+p}|` in the Fourier basis on both
/// qutrits.
///
/// Written in the computational basis the same expression is diagonal, and
/// every `ρ_n` has the same diagonal, so it would carry no information about
/// `n`. In the Fourier basis, `Z^n` shifts labels and the outcome
/// statistics become `(1/2)(1 − δ_{p,n})`.
pub fn phase_povm() -> Vec<ComplexMatrix> {
    (0..3)
        .map(|p| {
            let mut e = ComplexMatrix::zeros(9, 9);
            for l in 0..3 {
                e += &ComplexMatrix::outer(&product(&fourier_ket(l), &fourier_ket((l + p) % 3)));
            }
            e
        })
        .collect()
}

/// Computational-basis reading of `E_p`, kept for comparison.
pub fn computational_povm() -> Vec<ComplexMatrix> {
    (0..3)
        .map(|p| {
            let mut e = ComplexMatrix::zeros(9, 9);
            for l in 0..3 {
                e += &ComplexMatrix::outer(&ket(l, (l + p) % 3));
            }
            e
        })
        .collect()
}

fn outcome_table(states: &[ComplexMatrix], povm: &[ComplexMatrix], prior: f64) -> Vec<Vec<f64>> {
    states
        .iter()
        .map(|rho| {
            povm.iter()
                .map(|e| {
                    let p = prior * e.matmul(rho).trace().re;
                    if p.abs() < PROBABILITY_TOLERANCE {
                        0.0
                    } else {
                        p
                    }
                })
                .collect()
        })
        .collect()
}

/// Phase-only dense coding: Alice sends `n` by applying `Z^n`; Bob measures
/// [`phase_povm`]. Channel outputs are computed from Kraus operators and
/// compared with [`phase_output_closed`].
pub fn phase_protocol() -> Result<ProtocolResult> {
    phase_protocol_with(&phase_povm())
}

/// Phase protocol with a caller-supplied three-outcome measurement.
pub fn phase_protocol_with(povm: &[ComplexMatrix]) -> Result<ProtocolResult> {
    let channel = channel_on_alice();
    let mut outputs = Vec::with_capacity(3);
    for n in 0..3 {
        let rho = channel.apply_matrix(&ComplexMatrix::outer(&phase_state(n)))?;
        let deviation = rho.max_abs_diff(&phase_output_closed(n));
        if deviation > CLOSED_FORM_TOLERANCE {
            return Err(Error::ClosedFormMismatch { deviation });
        }
        outputs.push(rho);
    }
    ProtocolResult::new("phase", outcome_table(&outputs, povm, 1.0 / 3.0))
}

/// `|Φ_{m,n}⟩ = (Z^n X^m ⊗ I)|Φ⟩ = Σ_j ω^{jn}|j, j−m⟩/√3`.
pub fn bell_state(m: usize, n: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; 9];
    for j in 0..3 {
        v[3 * j + (j + 3 - m) % 3] = omega_pow((j * n) as i64) / 3f64.sqrt();
    }
    v
}

/// Projectors onto the nine Bell states, ordered by `3m + n`.
pub fn bell_projectors() -> Vec<ComplexMatrix> {
    (0..9).map(|k| ComplexMatrix::outer(&bell_state(k / 3, k % 3))).collect()
}

/// Full dense coding: Alice sends `(m, n)` by applying `Z^n X^m`; Bob
/// measures in the Bell basis.
pub fn bell_protocol() -> Result<ProtocolResult> {
    let channel = channel_on_alice();
    let outputs: Vec<ComplexMatrix> = (0..9)
        .map(|k| channel.apply_matrix(&ComplexMatrix::outer(&bell_state(k / 3, k % 3))))
        .collect::<Result<_>>()?;
    ProtocolResult::new("bell", outcome_table(&outputs, &bell_projectors(), 1.0 / 9.0))
}

/// Shannon mutual information in bits of a joint distribution `P(x, y)`.
pub fn mutual_information(joint: &[Vec<f64>]) -> Result<f64> {
    let cols = joint.first().map_or(0, Vec::len);
    if joint.is_empty() || cols == 0 || joint.iter().any(|r| r.len() != cols) {
        return Err(Error::NotADistribution("table must be a non-empty rectangle".into()));
    }
    let mut total = 0.0;
    for row in joint {
        for &p in row {
            if !p.is_finite() || p < -PROBABILITY_TOLERANCE {
                return Err(Error::NotADistribution(format!("invalid probability {p}")));
            }
            total += p;
        }
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NotADistribution(format!("probabilities sum to {total}")));
    }
    let clip = |p: f64| p.max(0.0);
    let hx: f64 = joint.iter().map(|r| xlog2x_neg(r.iter().copied().map(clip).sum())).sum();
    let hy: f64 = (0..cols).map(|c| xlog2x_neg(joint.iter().map(|r| clip(r[c])).sum())).sum();
    let hxy: f64 = joint.iter().flatten().map(|&p| xlog2x_neg(clip(p))).sum();
    Ok(hx + hy - hxy)
}

/// The mutual information both protocols reach, `log₂3 − 1`.
pub const PROTOCOL_RATE: f64 = LOG2_3 - 1.0;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{partial_trace, Subsystem};

    #[test]
    fn mutual_information_examples() {
        let uniform = vec![vec![1.0 / 9.0; 3]; 3];
        assert!(mutual_information(&uniform).unwrap().abs() < 1e-15);
        let diag: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| if i == j { 1.0 / 3.0 } else { 0.0 }).collect()).collect();
        assert!((mutual_information(&diag).unwrap() - LOG2_3).abs() < 1e-15);
        let appendix: Vec<Vec<f64>> = (0..3).map(|n| (0..3).map(|p| if p == n { 0.0 } else { 1.0 / 6.0 }).collect()).collect();
        assert!((mutual_information(&appendix).unwrap() - PROTOCOL_RATE).abs() < 1e-15);
    }

    #[test]
    fn mutual_information_rejects() {
        assert!(mutual_information(&[vec![0.5, 0.6]]).is_err());
        assert!(mutual_information(&[vec![1.2, -0.2]]).is_err());
        assert!(mutual_information(&[vec![0.5], vec![0.25, 0.25]]).is_err());
        assert!(mutual_information(&[]).is_err());
    }

    #[test]
    fn phase_table() {
        let r = phase_protocol().unwrap();
        let cond = r.conditional();
        for n in 0..3 {
            for p in 0..3 {
                let want = if p == n { 0.0 } else { 0.5 };
                assert!((cond[n][p] - want).abs() < 1e-12);
            }
        }
        assert!((r.mutual_information - PROTOCOL_RATE).abs() < 1e-12);
        assert!((r.gap_to_capacity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn computational_reading_is_uninformative() {
        let r = phase_protocol_with(&computational_povm()).unwrap();
        assert!(r.mutual_information.abs() < 1e-12);
    }

    #[test]
    fn povms_complete() {
        let mut sum = ComplexMatrix::zeros(9, 9);
        for e in phase_povm() {
            sum += &e;
        }
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(9)) < 1e-12);
        let mut sum = ComplexMatrix::zeros(9, 9);
        for e in bell_projectors() {
            sum += &e;
        }
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(9)) < 1e-12);
    }

    #[test]
    fn bell_rate_and_marginals() {
        let r = bell_protocol().unwrap();
        assert!((r.mutual_information - PROTOCOL_RATE).abs() < 1e-9);
        let channel = channel_on_alice();
        for n in 0..3 {
            let rho = channel.apply_matrix(&ComplexMatrix::outer(&phase_state(n))).unwrap();
            assert!((rho.trace().re - 1.0).abs() < 1e-12);
            let bob = partial_trace(&rho, 3, 3, Subsystem::B).unwrap();
            assert!(bob.max_abs_diff(&ComplexMatrix::identity(3).scale_real(1.0 / 3.0)) < 1e-12);
        }
    }
}
