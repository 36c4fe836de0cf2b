//! Quanton and path-detector states.
//!
//! Layout conventions used throughout:
//! - the quanton lives on `n` orthonormal path states `|psi_i>`;
//! - the detector's internal space has `n + 1` coordinates and holds
//!   `|d_0>, ..., |d_n>`, realized from the Gram matrix by [`gram_embed`];
//! - the detector location is a qubit with `|Y>` (present) at index 0 and
//!   `|N>` (absent) at index 1.
//!
//! Joint states are ordered quanton (x) internal (x) location.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    gram_embed, is_density_matrix, spectral_decompose, tensor, ComplexMatrix, ComplexVector,
    GramMatrix,
};
use crate::tolerance::{COMPLETENESS, MIN_POSTSELECTION, PSD_GATE};

pub const LOCATION_PRESENT: usize = 0;
pub const LOCATION_ABSENT: usize = 1;

/// Subsystem dimensions of the full joint state for `n` paths.
pub fn joint_dims(n: usize) -> [usize; 3] {
    [n, n + 1, 2]
}

/// The interfering object: path probabilities and, for mixed inputs, the
/// full path-basis density matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantonConfig {
    probabilities: Vec<f64>,
    rho_in: Option<ComplexMatrix>,
}

impl QuantonConfig {
    /// Pure quanton `sum_i sqrt(p_i) |psi_i>` with real non-negative amplitudes.
    pub fn pure(probabilities: Vec<f64>) -> Result<Self> {
        validate_simplex(&probabilities)?;
        Ok(Self { probabilities, rho_in: None })
    }

    pub fn uniform(n: usize) -> Self {
        Self { probabilities: vec![1.0 / n as f64; n], rho_in: None }
    }

    /// Mixed quanton given by its path-basis density matrix.
    pub fn mixed(rho_in: ComplexMatrix) -> Result<Self> {
        let check = is_density_matrix(&rho_in, PSD_GATE);
        if !check.is_valid() {
            return Err(Error::InvalidConfig(format!("rho_in: {check}")));
        }
        let probabilities: Vec<f64> = rho_in.diagonal().iter().map(|z| z.re.max(0.0)).collect();
        Ok(Self { probabilities, rho_in: Some(rho_in) })
    }

    pub fn path_count(&self) -> usize {
        self.probabilities.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn rho_in(&self) -> Option<&ComplexMatrix> {
        self.rho_in.as_ref()
    }

    pub fn is_pure_amplitude(&self) -> bool {
        self.rho_in.is_none()
    }

    pub fn amplitudes(&self) -> ComplexVector {
        ComplexVector::from_real(&self.probabilities.iter().map(|p| p.sqrt()).collect::<Vec<_>>())
    }

    /// `rho_in` when given, otherwise the projector onto the pure input.
    pub fn density_matrix(&self) -> ComplexMatrix {
        match &self.rho_in {
            Some(rho) => rho.clone(),
            None => {
                let psi = self.amplitudes();
                psi.outer(&psi)
            }
        }
    }

    fn require_pure(&self, op: &str) -> Result<()> {
        if self.rho_in.is_some() {
            return Err(Error::InvalidConfig(format!("{op} needs a pure quanton (no rho_in)")));
        }
        Ok(())
    }
}

fn validate_simplex(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidConfig("at least one path is required".into()));
    }
    if let Some(bad) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidConfig(format!("path probability {bad} is not a non-negative number")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PSD_GATE {
        return Err(Error::InvalidConfig(format!("path probabilities sum to {total}, not 1")));
    }
    Ok(())
}

/// Quantum path detector: internal states via their Gram matrix plus the
/// real amplitudes of being present (`c1`) or absent (`c2`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    gram: GramMatrix,
    c1: f64,
    c2: f64,
}

impl DetectorModel {
    pub fn new(gram: GramMatrix, c1: f64, c2: f64) -> Result<Self> {
        if gram.dim() < 2 {
            return Err(Error::InvalidConfig("detector needs d_0 and at least one d_i".into()));
        }
        if !c1.is_finite() || !c2.is_finite() || (c1 * c1 + c2 * c2 - 1.0).abs() > PSD_GATE {
            return Err(Error::InvalidConfig(format!("c1^2 + c2^2 must be 1 (c1 = {c1}, c2 = {c2})")));
        }
        Ok(Self { gram, c1, c2 })
    }

    /// `c2 = sqrt(1 - c1^2)`.
    pub fn with_presence(gram: GramMatrix, c1: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&c1) {
            return Err(Error::InvalidConfig(format!("presence amplitude {c1} outside [-1, 1]")));
        }
        Self::new(gram, c1, (1.0 - c1 * c1).max(0.0).sqrt())
    }

    /// Mutually orthogonal `d_0, ..., d_n`.
    pub fn orthogonal(n: usize, c1: f64) -> Result<Self> {
        Self::with_presence(GramMatrix::identity(n + 1), c1)
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn path_count(&self) -> usize {
        self.gram.dim() - 1
    }

    pub fn internal_dim(&self) -> usize {
        self.gram.dim()
    }

    /// Explicit `|d_0>, ..., |d_n>`; `|d_0>` is the first basis vector.
    pub fn detector_vectors(&self) -> Result<Vec<ComplexVector>> {
        gram_embed(&self.gram)
    }

    /// Internal-space unitaries `U_1, ..., U_n` with `U_i |d_0> = |d_i>`.
    ///
    /// Each acts as an SU(2) rotation in `span{d_0, d_i}` and as the identity
    /// on its orthogonal complement.
    pub fn path_unitaries(&self) -> Result<Vec<ComplexMatrix>> {
        let vectors = self.detector_vectors()?;
        Ok(vectors[1..].iter().map(|di| rotation_onto(&vectors[0], di)).collect())
    }

    /// Initial detector state `|d_0> (c1 |Y> + c2 |N>)`.
    pub fn initial_state(&self) -> Result<ComplexVector> {
        let vectors = self.detector_vectors()?;
        Ok(vectors[0].kron(&ComplexVector::from_real(&[self.c1, self.c2])))
    }

    /// Controlled unitaries on internal (x) location: `U_i` acts only when
    /// the detector is present.
    pub fn controlled_unitaries(&self) -> Result<Vec<ComplexMatrix>> {
        let present = ComplexVector::basis(2, LOCATION_PRESENT);
        let absent = ComplexVector::basis(2, LOCATION_ABSENT);
        let on_present = present.outer(&present);
        let on_absent = absent.outer(&absent);
        let identity = ComplexMatrix::identity(self.internal_dim());
        Ok(self
            .path_unitaries()?
            .iter()
            .map(|u| &tensor(u, &on_present) + &tensor(&identity, &on_absent))
            .collect())
    }

    /// Detector states after the quanton passed path `i`: `U_i |phi_0>`.
    pub fn branch_states(&self) -> Result<Vec<ComplexVector>> {
        let phi0 = self.initial_state()?;
        Ok(self.controlled_unitaries()?.iter().map(|u| u.apply(&phi0)).collect())
    }

    fn require_paths(&self, q: &QuantonConfig) -> Result<()> {
        if q.path_count() != self.path_count() {
            return Err(Error::DimensionMismatch(format!(
                "quanton has {} paths but detector has {} path states",
                q.path_count(),
                self.path_count()
            )));
        }
        Ok(())
    }
}

fn rotation_onto(from: &ComplexVector, to: &ComplexVector) -> ComplexMatrix {
    let dim = from.dim();
    let a = from.inner(to);
    let w = to - &from.scale(a);
    let b = w.norm();
    let mut u = ComplexMatrix::identity(dim);
    if b < 1e-14 {
        // `to` is `from` up to a phase
        let phase = if a.norm() > 0.0 { a / a.norm() } else { Complex64::new(1.0, 0.0) };
        return &u + &from.outer(from).scale(phase - 1.0);
    }
    let e2 = w.scale_real(1.0 / b);
    let image1 = to.clone();
    let image2 = &from.scale_real(-b) + &e2.scale(a.conj());
    u = &u - &from.outer(from);
    u = &u - &e2.outer(&e2);
    u = &u + &image1.outer(from);
    &u + &image2.outer(&e2)
}

/// Projection of the detector location onto `cos(alpha)|Y> + sin(alpha)|N>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocationProjection {
    alpha: f64,
}

impl LocationProjection {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidConfig(format!("projection angle {alpha} is not finite")));
        }
        Ok(Self { alpha })
    }

    /// Selects the detector-present branch.
    pub fn particle() -> Self {
        Self { alpha: 0.0 }
    }

    /// Selects the detector-absent branch.
    pub fn wave() -> Self {
        Self { alpha: FRAC_PI_2 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn state(&self) -> ComplexVector {
        ComplexVector::from_real(&[self.alpha.cos(), self.alpha.sin()])
    }

    /// `c1 cos(alpha) |a> + c2 sin(alpha) |b>`.
    pub(crate) fn combine(
        &self,
        d: &DetectorModel,
        present: &ComplexVector,
        absent: &ComplexVector,
    ) -> ComplexVector {
        &present.scale_real(d.c1 * self.alpha.cos()) + &absent.scale_real(d.c2 * self.alpha.sin())
    }
}

/// Noise on the detector's internal space as a list of Kraus operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Checks shapes only; completeness is checked where the channel is used.
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = operators.first() else {
            return Err(Error::InvalidConfig("a channel needs at least one Kraus operator".into()));
        };
        let dim = first.rows();
        if operators.iter().any(|k| k.rows() != dim || k.cols() != dim) {
            return Err(Error::DimensionMismatch("Kraus operators must be square and equal-sized".into()));
        }
        Ok(Self { operators })
    }

    pub fn identity(dim: usize) -> Self {
        Self { operators: vec![ComplexMatrix::identity(dim)] }
    }

    /// `rho -> (1 - s) rho + s sum_j P_j rho P_j` with `P_j = |b_j><b_j|`.
    pub fn projective_dephasing(basis: &[ComplexVector], strength: f64) -> Result<Self> {
        check_strength(strength)?;
        let dim = basis.first().map_or(0, ComplexVector::dim);
        if basis.len() != dim || basis.iter().any(|b| b.dim() != dim) {
            return Err(Error::DimensionMismatch("dephasing basis must be complete".into()));
        }
        let mut ops = vec![ComplexMatrix::identity(dim).scale_real((1.0 - strength).sqrt())];
        ops.extend(basis.iter().map(|b| b.outer(b).scale_real(strength.sqrt())));
        Self::new(ops)
    }

    /// Dephasing in the discrete Fourier basis of the internal space.
    ///
    /// `|d_0>` is the first computational basis vector, which is an equal
    /// superposition of the Fourier basis, so this channel always acts on it.
    pub fn dephasing(dim: usize, strength: f64) -> Result<Self> {
        let scale = 1.0 / (dim as f64).sqrt();
        let basis: Vec<ComplexVector> = (0..dim)
            .map(|k| {
                ComplexVector::new(
                    (0..dim)
                        .map(|j| {
                            let angle = 2.0 * std::f64::consts::PI * (j * k) as f64 / dim as f64;
                            Complex64::from_polar(scale, angle)
                        })
                        .collect(),
                )
            })
            .collect();
        Self::projective_dephasing(&basis, strength)
    }

    /// `rho -> (1 - s) rho + s I / dim`.
    pub fn depolarizing(dim: usize, strength: f64) -> Result<Self> {
        check_strength(strength)?;
        let mut ops = vec![ComplexMatrix::identity(dim).scale_real((1.0 - strength).sqrt())];
        let w = (strength / dim as f64).sqrt();
        for a in 0..dim {
            for b in 0..dim {
                ops.push(ComplexVector::basis(dim, a).outer(&ComplexVector::basis(dim, b)).scale_real(w));
            }
        }
        Self::new(ops)
    }

    pub fn dim(&self) -> usize {
        self.operators[0].rows()
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// Frobenius norm of `sum_i K_i^dag K_i - I`.
    pub fn completeness_deviation(&self) -> f64 {
        let dim = self.dim();
        let sum = self
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, k| &acc + &(&k.adjoint() * k));
        (&sum - &ComplexMatrix::identity(dim)).frobenius_norm()
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let dim = self.dim();
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, k| &acc + &(&(k * rho) * &k.adjoint()))
    }
}

fn check_strength(strength: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&strength) {
        return Err(Error::InvalidConfig(format!("channel strength {strength} outside [0, 1]")));
    }
    Ok(())
}

/// The pure joint state after the quanton has passed the detector:
/// `c1 [sum_i sqrt(p_i) |psi_i>|d_i>] |Y> + c2 [sum_i sqrt(p_i) |psi_i>] |d_0>|N>`.
pub fn build_joint_pure(q: &QuantonConfig, d: &DetectorModel) -> Result<ComplexVector> {
    q.require_pure("build_joint_pure")?;
    d.require_paths(q)?;
    let vectors = d.detector_vectors()?;
    let n = q.path_count();
    let present = ComplexVector::basis(2, LOCATION_PRESENT);
    let absent = ComplexVector::basis(2, LOCATION_ABSENT);
    let mut state = ComplexVector::zeros(n * d.internal_dim() * 2);
    for (i, p) in q.probabilities().iter().enumerate() {
        let path = ComplexVector::basis(n, i).scale_real(p.sqrt());
        let particle = path.kron(&vectors[i + 1]).kron(&present).scale_real(d.c1);
        let wave = path.kron(&vectors[0]).kron(&absent).scale_real(d.c2);
        state = &state + &(&particle + &wave);
    }
    Ok(state)
}

/// `sum_ij sqrt(p_i p_j) |psi_i><psi_j| (x) U_i|phi_0><phi_0|U_j^dag`, built
/// from the controlled unitaries rather than from the detector vectors.
pub fn build_joint_density(q: &QuantonConfig, d: &DetectorModel) -> Result<ComplexMatrix> {
    q.require_pure("build_joint_density")?;
    d.require_paths(q)?;
    let branches = d.branch_states()?;
    let n = q.path_count();
    let p = q.probabilities();
    let m = branches[0].dim();
    let mut rho = ComplexMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            let weight = (p[i] * p[j]).sqrt();
            if weight == 0.0 {
                continue;
            }
            // block (i, j) = sqrt(p_i p_j) U_i|phi_0><phi_0|U_j^dag
            for a in 0..m {
                for b in 0..m {
                    rho[(i * m + a, j * m + b)] = branches[i][a] * branches[j][b].conj() * weight;
                }
            }
        }
    }
    Ok(rho)
}

/// Result of projecting the detector location onto `|phi_alpha>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Conditioned {
    /// Post-selection probability.
    pub probability: f64,
    /// Renormalized quanton (x) internal state, dims `[n, n + 1]`.
    pub rho: ComplexMatrix,
    /// Unnormalized `|d_i'> = c1 cos(alpha)|d_i> + c2 sin(alpha)|d_0>`, `i = 1..n`.
    pub primed: Vec<ComplexVector>,
}

impl Conditioned {
    /// The operator before renormalization, `sum_ij rho_ij |psi_i><psi_j| (x) |d_i'><d_j'|`.
    pub fn unnormalized(&self) -> ComplexMatrix {
        self.rho.scale_real(self.probability)
    }
}

pub fn condition_on_location(
    q: &QuantonConfig,
    d: &DetectorModel,
    loc: &LocationProjection,
) -> Result<Conditioned> {
    d.require_paths(q)?;
    let vectors = d.detector_vectors()?;
    let primed: Vec<ComplexVector> =
        vectors[1..].iter().map(|di| loc.combine(d, di, &vectors[0])).collect();
    let unnormalized = assemble(&q.density_matrix(), &[(1.0, primed.as_slice())]);
    let probability = unnormalized.trace().re;
    if probability < MIN_POSTSELECTION {
        return Err(Error::ZeroProbability(probability));
    }
    Ok(Conditioned { probability, rho: unnormalized.scale_real(1.0 / probability), primed })
}

/// `sum_ij rho_ij |psi_i><psi_j| (x) sum_k r_k |v_ki><v_kj|`.
fn assemble(rho_q: &ComplexMatrix, branches: &[(f64, &[ComplexVector])]) -> ComplexMatrix {
    let n = rho_q.rows();
    let m = branches[0].1[0].dim();
    let mut out = ComplexMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            let coeff = rho_q[(i, j)];
            if coeff == Complex64::new(0.0, 0.0) {
                continue;
            }
            for &(weight, vs) in branches {
                let block = vs[i].outer(&vs[j]);
                let scale = coeff * weight;
                for a in 0..m {
                    for b in 0..m {
                        out[(i * m + a, j * m + b)] += scale * block[(a, b)];
                    }
                }
            }
        }
    }
    out
}

/// One eigen-branch `r_k |phi_k>` of the noisy initial detector state.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelBranch {
    pub weight: f64,
    /// `|d_k>`: the eigenvector of the noisy initial internal state.
    pub reference: ComplexVector,
    /// `|d_ki> = U_i |d_k>` for `i = 1..n`.
    pub rotated: Vec<ComplexVector>,
}

impl ChannelBranch {
    /// `|d_ki'> = c1 cos(alpha)|d_ki> + c2 sin(alpha)|d_k>`.
    pub fn primed(&self, d: &DetectorModel, loc: &LocationProjection) -> Vec<ComplexVector> {
        self.rotated.iter().map(|v| loc.combine(d, v, &self.reference)).collect()
    }
}

/// Sends `|d_0><d_0|` through the channel and splits the result into
/// orthonormal eigen-branches, each carrying its rotated path states.
pub fn apply_channel(d: &DetectorModel, ch: &KrausChannel) -> Result<Vec<ChannelBranch>> {
    if ch.dim() != d.internal_dim() {
        return Err(Error::DimensionMismatch(format!(
            "channel acts on dimension {} but the detector's internal space has {}",
            ch.dim(),
            d.internal_dim()
        )));
    }
    let deviation = ch.completeness_deviation();
    if deviation > COMPLETENESS {
        return Err(Error::IncompleteChannel(deviation));
    }
    let vectors = d.detector_vectors()?;
    let unitaries = d.path_unitaries()?;
    let noisy = ch.apply(&vectors[0].outer(&vectors[0]));
    Ok(spectral_decompose(&noisy)?
        .into_iter()
        .map(|term| ChannelBranch {
            weight: term.weight,
            rotated: unitaries.iter().map(|u| u.apply(&term.vector)).collect(),
            reference: term.vector,
        })
        .collect())
}

/// Mixed quanton, noisy detector, conditioned location.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedJoint {
    pub probability: f64,
    /// Renormalized quanton (x) internal state, dims `[n, n + 1]`.
    pub rho: ComplexMatrix,
    pub branches: Vec<ChannelBranch>,
    /// `primed[k][i]` is `|d_ki'>`.
    pub primed: Vec<Vec<ComplexVector>>,
}

impl MixedJoint {
    pub fn unnormalized(&self) -> ComplexMatrix {
        self.rho.scale_real(self.probability)
    }
}

pub fn build_mixed_joint(
    q: &QuantonConfig,
    d: &DetectorModel,
    loc: &LocationProjection,
    ch: &KrausChannel,
) -> Result<MixedJoint> {
    d.require_paths(q)?;
    let branches = apply_channel(d, ch)?;
    let primed: Vec<Vec<ComplexVector>> = branches.iter().map(|b| b.primed(d, loc)).collect();
    let weighted: Vec<(f64, &[ComplexVector])> =
        branches.iter().zip(&primed).map(|(b, p)| (b.weight, p.as_slice())).collect();
    let unnormalized = assemble(&q.density_matrix(), &weighted);
    let probability = unnormalized.trace().re;
    if probability < MIN_POSTSELECTION {
        return Err(Error::ZeroProbability(probability));
    }
    Ok(MixedJoint { probability, rho: unnormalized.scale_real(1.0 / probability), branches, primed })
}
