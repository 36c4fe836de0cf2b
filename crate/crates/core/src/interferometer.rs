//! Mach-Zehnder interferometer with a quantum or a biased second beam-splitter.
//!
//! The input is `(e^{i theta}|psi_1> + |psi_2>)/sqrt(2)`. The second
//! beam-splitter maps the two paths onto the detector ports `D_1, D_2`:
//! - present (`U_Y`): `psi_1 -> (D_1 + D_2)/sqrt(2)`, `psi_2 -> (D_1 - D_2)/sqrt(2)`
//! - absent (`U_N`): `psi_1 -> D_2`, `psi_2 -> D_1`
//! - biased: `psi_1 -> r D_1 + t D_2`, `psi_2 -> t D_1 - r D_2`
//!
//! A quantum beam-splitter has its location in `c1|Y> + c2|N>` and acts as
//! `U_Y (x) |Y><Y| + U_N (x) |N><N|`; port/path index comes first.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{partial_trace, tensor, ComplexMatrix, ComplexVector};
use crate::metrics::coherence;
use crate::tolerance::{MIN_POSTSELECTION, PSD_GATE};

const D1: usize = 0;
const D2: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumBeamSplitter {
    c1: f64,
    c2: f64,
}

impl QuantumBeamSplitter {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        if !c1.is_finite() || !c2.is_finite() || (c1 * c1 + c2 * c2 - 1.0).abs() > PSD_GATE {
            return Err(Error::InvalidConfig(format!("c1^2 + c2^2 must be 1 (c1 = {c1}, c2 = {c2})")));
        }
        Ok(Self { c1, c2 })
    }

    /// Equal superposition of present and absent.
    pub fn balanced() -> Self {
        Self { c1: FRAC_1_SQRT_2, c2: FRAC_1_SQRT_2 }
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn location_state(&self) -> ComplexVector {
        ComplexVector::from_real(&[self.c1, self.c2])
    }

    /// `U_Y (x) |Y><Y| + U_N (x) |N><N|` on path (x) location.
    pub fn unitary() -> ComplexMatrix {
        let y = ComplexVector::basis(2, 0);
        let n = ComplexVector::basis(2, 1);
        &tensor(&present_unitary(), &y.outer(&y)) + &tensor(&absent_unitary(), &n.outer(&n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasedBeamSplitter {
    r: f64,
    t: f64,
}

impl BiasedBeamSplitter {
    pub fn new(r: f64, t: f64) -> Result<Self> {
        if !(r >= 0.0 && t >= 0.0) || (r * r + t * t - 1.0).abs() > PSD_GATE {
            return Err(Error::InvalidConfig(format!(
                "need real r, t >= 0 with r^2 + t^2 = 1 (r = {r}, t = {t})"
            )));
        }
        Ok(Self { r, t })
    }

    /// Biased splitter with reflection amplitude `r` and `t = sqrt(1 - r^2)`.
    pub fn from_reflection(r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidConfig(format!("reflection amplitude {r} outside [0, 1]")));
        }
        Self::new(r, (1.0 - r * r).sqrt())
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `(r|D_1> + t|D_2>)<psi_1| + (t|D_1> - r|D_2>)<psi_2|`.
    pub fn unitary(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[self.r, self.t], &[self.t, -self.r]]).expect("2x2")
    }
}

fn present_unitary() -> ComplexMatrix {
    let s = FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[&[s, s], &[s, -s]]).expect("2x2")
}

fn absent_unitary() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).expect("2x2")
}

/// `(e^{i theta}|psi_1> + |psi_2>)/sqrt(2)`.
pub fn input_state(theta: f64) -> ComplexVector {
    ComplexVector::new(vec![
        Complex64::from_polar(FRAC_1_SQRT_2, theta),
        Complex64::new(FRAC_1_SQRT_2, 0.0),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionStats {
    pub p1: f64,
    pub p2: f64,
    /// Post-selection probability; 1 when nothing was conditioned on.
    pub norm: f64,
}

impl DetectionStats {
    fn from_amplitudes(a1: Complex64, a2: Complex64) -> Result<Self> {
        let norm = a1.norm_sqr() + a2.norm_sqr();
        if norm < MIN_POSTSELECTION {
            return Err(Error::ZeroProbability(norm));
        }
        Ok(Self { p1: a1.norm_sqr() / norm, p2: a2.norm_sqr() / norm, norm })
    }
}

/// Marginal port statistics with the quantum beam-splitter's location unobserved.
pub fn run_qbs(theta: f64, qbs: &QuantumBeamSplitter) -> DetectionStats {
    let out = QuantumBeamSplitter::unitary().apply(&input_state(theta).kron(&qbs.location_state()));
    let port = |d: usize| out[2 * d].norm_sqr() + out[2 * d + 1].norm_sqr();
    DetectionStats { p1: port(D1), p2: port(D2), norm: 1.0 }
}

/// Unnormalized port amplitudes `<phi_alpha| U_QBS |psi>|phi>`.
pub fn conditioned_amplitudes(theta: f64, qbs: &QuantumBeamSplitter, alpha: f64) -> [Complex64; 2] {
    let out = QuantumBeamSplitter::unitary().apply(&input_state(theta).kron(&qbs.location_state()));
    let (ca, sa) = (alpha.cos(), alpha.sin());
    [out[2 * D1] * ca + out[2 * D1 + 1] * sa, out[2 * D2] * ca + out[2 * D2 + 1] * sa]
}

/// Port statistics after projecting the beam-splitter location onto
/// `cos(alpha)|Y> + sin(alpha)|N>`, renormalized.
pub fn run_qbs_conditioned(theta: f64, qbs: &QuantumBeamSplitter, alpha: f64) -> Result<DetectionStats> {
    let [a1, a2] = conditioned_amplitudes(theta, qbs, alpha);
    DetectionStats::from_amplitudes(a1, a2)
}

pub fn bbs_amplitudes(theta: f64, bbs: &BiasedBeamSplitter) -> [Complex64; 2] {
    let out = bbs.unitary().apply(&input_state(theta));
    [out[D1], out[D2]]
}

pub fn run_bbs(theta: f64, bbs: &BiasedBeamSplitter) -> DetectionStats {
    let [a1, a2] = bbs_amplitudes(theta, bbs);
    DetectionStats { p1: a1.norm_sqr(), p2: a2.norm_sqr(), norm: 1.0 }
}

/// With the second beam-splitter removed the ports just record the path.
pub fn run_absent(theta: f64) -> DetectionStats {
    let out = absent_unitary().apply(&input_state(theta));
    DetectionStats { p1: out[D1].norm_sqr(), p2: out[D2].norm_sqr(), norm: 1.0 }
}

/// Biased splitter whose output has the same phase dependence as the
/// quantum beam-splitter conditioned at `alpha = pi/4`: `t - r = sqrt(2) r`,
/// i.e. `r = 1/sqrt(4 + 2 sqrt(2))`, `t = (1 + sqrt(2)) r`.
pub fn bbs_mimic_params() -> BiasedBeamSplitter {
    let r = 1.0 / (4.0 + 2.0 * SQRT_2).sqrt();
    BiasedBeamSplitter { r, t: (1.0 + SQRT_2) * r }
}

/// Ratios of unnormalized port probabilities, biased mimic over the
/// conditioned quantum beam-splitter at `alpha = pi/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MimicComparison {
    pub theta: f64,
    pub ratio_d1: f64,
    pub ratio_d2: f64,
}

pub fn compare_mimic(theta: f64) -> MimicComparison {
    let [q1, q2] = conditioned_amplitudes(theta, &QuantumBeamSplitter::balanced(), std::f64::consts::FRAC_PI_4);
    let [b1, b2] = bbs_amplitudes(theta, &bbs_mimic_params());
    MimicComparison {
        theta,
        ratio_d1: b1.norm_sqr() / q1.norm_sqr(),
        ratio_d2: b2.norm_sqr() / q2.norm_sqr(),
    }
}

/// Which splitter sits at the second position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SecondSplitter {
    Quantum(QuantumBeamSplitter),
    Biased(BiasedBeamSplitter),
    Absent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MziConfig {
    pub theta: f64,
    pub second: SecondSplitter,
    /// Conditioning angle; only meaningful for a quantum splitter.
    pub alpha: Option<f64>,
}

impl MziConfig {
    pub fn run(&self) -> Result<DetectionStats> {
        match (self.second, self.alpha) {
            (SecondSplitter::Quantum(qbs), None) => Ok(run_qbs(self.theta, &qbs)),
            (SecondSplitter::Quantum(qbs), Some(alpha)) => run_qbs_conditioned(self.theta, &qbs, alpha),
            (SecondSplitter::Biased(bbs), None) => Ok(run_bbs(self.theta, &bbs)),
            (SecondSplitter::Absent, None) => Ok(run_absent(self.theta)),
            (_, Some(_)) => Err(Error::InvalidConfig(
                "only a quantum beam-splitter has a location to condition on".into(),
            )),
        }
    }
}

/// Non-orthogonal detector states `|d_1>, |d_2>` rewritten on three
/// orthonormal states: `|d_1> = gamma|q_1> + beta|q_3>`,
/// `|d_2> = gamma|q_2> + beta e^{i phase}|q_3>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedDetector {
    pub gamma: f64,
    /// `sqrt(|<d_1|d_2>|)`.
    pub beta: f64,
    /// Argument of `<d_1|d_2>`, carried by `|d_2>`'s `q_3` component.
    pub phase: f64,
    /// `q_1, q_2, q_3` as coordinate vectors.
    pub basis: [ComplexVector; 3],
    pub d1: ComplexVector,
    pub d2: ComplexVector,
}

impl ExpandedDetector {
    pub fn overlap(&self) -> Complex64 {
        self.d1.inner(&self.d2)
    }
}

pub fn expand_detector_states(overlap: Complex64) -> Result<ExpandedDetector> {
    let modulus = overlap.norm();
    if !modulus.is_finite() || modulus > 1.0 + PSD_GATE {
        return Err(Error::OverlapOutOfRange(modulus));
    }
    let modulus = modulus.min(1.0);
    let beta = modulus.sqrt();
    let gamma = (1.0 - modulus).sqrt();
    let phase = if modulus > 0.0 { overlap.arg() } else { 0.0 };
    let basis = [ComplexVector::basis(3, 0), ComplexVector::basis(3, 1), ComplexVector::basis(3, 2)];
    let d1 = &basis[0].scale_real(gamma) + &basis[2].scale_real(beta);
    let d2 = &basis[1].scale_real(gamma) + &basis[2].scale(Complex64::from_polar(beta, phase));
    Ok(ExpandedDetector { gamma, beta, phase, basis, d1, d2 })
}

/// Quantons seen in coincidence with one of `q_1, q_2, q_3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchReport {
    pub label: String,
    pub weight: f64,
    /// `None` when the branch has zero weight.
    pub coherence: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveParticleReport {
    /// Ordered `q_3` (wave), `q_1`, `q_2` (particle).
    pub branches: [BranchReport; 3],
    pub total_weight: f64,
    /// Coherence of `(|psi_1>|d_1> + |psi_2>|d_2>)/sqrt(2)` with the detector traced out.
    pub overall_coherence: f64,
    /// The same quantity from the `q`-basis form of the state.
    pub expanded_coherence: f64,
}

/// Splits `(|psi_1>|d_1> + |psi_2>|d_2>)/sqrt(2)` into the quanton states
/// correlated with each of `q_1, q_2, q_3`.
pub fn wave_particle_decomposition(overlap: Complex64) -> Result<WaveParticleReport> {
    let ex = expand_detector_states(overlap)?;
    let psi1 = ComplexVector::basis(2, 0);
    let psi2 = ComplexVector::basis(2, 1);
    let state = (&psi1.kron(&ex.d1) + &psi2.kron(&ex.d2)).scale_real(FRAC_1_SQRT_2);

    // gamma/sqrt(2) [psi_1 q_1 + psi_2 q_2] + 1/sqrt(2) [beta psi_1 + beta e^{i phase} psi_2] q_3
    let particle = (&psi1.kron(&ex.basis[0]) + &psi2.kron(&ex.basis[1])).scale_real(ex.gamma * FRAC_1_SQRT_2);
    let wave_quanton = &psi1.scale_real(ex.beta) + &psi2.scale(Complex64::from_polar(ex.beta, ex.phase));
    let expanded = &particle + &wave_quanton.kron(&ex.basis[2]).scale_real(FRAC_1_SQRT_2);

    let project = |q: &ComplexVector| -> ComplexVector {
        ComplexVector::new((0..2).map(|p| (0..3).map(|k| q[k].conj() * state[p * 3 + k]).sum()).collect())
    };
    let branch = |label: &str, q: &ComplexVector| -> Result<BranchReport> {
        let v = project(q);
        let weight = v.norm_sqr();
        let coherence = match v.normalized() {
            Some(u) if weight > MIN_POSTSELECTION => Some(coherence(&u.outer(&u))?),
            _ => None,
        };
        Ok(BranchReport { label: label.to_string(), weight, coherence })
    };
    let branches = [branch("q3", &ex.basis[2])?, branch("q1", &ex.basis[0])?, branch("q2", &ex.basis[1])?];
    let total_weight = branches.iter().map(|b| b.weight).sum();

    let reduced = |v: &ComplexVector| partial_trace(&v.outer(v), &[2, 3], &[0]);
    Ok(WaveParticleReport {
        branches,
        total_weight,
        overall_coherence: coherence(&reduced(&state)?)?,
        expanded_coherence: coherence(&reduced(&expanded)?)?,
    })
}
