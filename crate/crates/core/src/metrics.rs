//! Wave and particle quantifiers and the duality relations between them.
//!
//! Coherence is the normalized l1 measure `C = (1/(n-1)) sum_{i!=j} |rho_ij|`.
//! Distinguishability is the optimal unambiguous-discrimination success
//! probability of the detector states that record the path,
//! `D = 1 - (1/(n-1)) sum_{i!=j} sqrt(p_i p_j) |<chi_j|chi_i>|`, where
//! `|chi_i>` is whatever detector state is correlated with path `i`.
//!
//! Every closed form here works from Gram matrix entries only.
//! [`distinguishability_oracle`] and [`coherence_oracle`] redo the same
//! numbers from explicit vectors and reduced density matrices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{partial_trace, ComplexMatrix, ComplexVector};
use crate::model::{
    build_joint_density, build_mixed_joint, condition_on_location, joint_dims, DetectorModel,
    KrausChannel, LocationProjection, QuantonConfig,
};
use crate::tolerance::{DUALITY, MIN_POSTSELECTION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Location of the detector ignored; `D + C = 1`.
    Unconditioned,
    /// Location projected onto `|phi_alpha>`; `D + C = 1`.
    Conditioned,
    /// Mixed quanton and noisy detector; `D + C <= 1`.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub distinguishability: f64,
    pub coherence: f64,
    pub sum: f64,
    /// `|D + C - 1|` for the identity regimes, `max(0, D + C - 1)` for [`Regime::Mixed`].
    pub residual: f64,
    pub regime: Regime,
    /// Set when `D` or `C` leaves `[0, 1]` by more than the duality tolerance.
    /// Values are reported raw, never clipped.
    pub out_of_range: bool,
}

impl DualityReport {
    pub fn new(distinguishability: f64, coherence: f64, regime: Regime) -> Self {
        let sum = distinguishability + coherence;
        let residual = match regime {
            Regime::Mixed => (sum - 1.0).max(0.0),
            _ => (sum - 1.0).abs(),
        };
        let outside = |x: f64| !(-DUALITY..=1.0 + DUALITY).contains(&x);
        Self {
            distinguishability,
            coherence,
            sum,
            residual,
            regime,
            out_of_range: outside(distinguishability) || outside(coherence),
        }
    }

    pub fn holds(&self) -> bool {
        self.residual < DUALITY
    }
}

fn normalization(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!("coherence needs at least 2 paths, got {n}")));
    }
    Ok(1.0 / (n - 1) as f64)
}

/// Sum over ordered pairs `i != j` of `f(i, j)`.
fn off_diagonal_sum(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> f64 {
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                total += f(i, j);
            }
        }
    }
    total
}

/// Normalized l1 coherence of a quanton density matrix.
pub fn coherence(rho_q: &ComplexMatrix) -> Result<f64> {
    if !rho_q.is_square() {
        return Err(Error::DimensionMismatch("coherence needs a square matrix".into()));
    }
    let n = rho_q.rows();
    Ok(normalization(n)? * off_diagonal_sum(n, |i, j| rho_q[(i, j)].norm()))
}

/// `<phi_0|U_j^dag U_i|phi_0> = c1^2 <d_j|d_i> + c2^2`.
fn unconditioned_overlap(d: &DetectorModel, i: usize, j: usize) -> Complex64 {
    d.gram().overlap(j + 1, i + 1) * (d.c1() * d.c1()) + d.c2() * d.c2()
}

/// `<d_j'|d_i'>` expanded in Gram entries:
/// `c1^2 cos^2(a) <d_j|d_i> + c2^2 sin^2(a) + (c1 c2 / 2) sin(2a) (<d_j|d_0> + <d_0|d_i>)`.
fn conditioned_overlap(d: &DetectorModel, loc: &LocationProjection, i: usize, j: usize) -> Complex64 {
    let (c1, c2, a) = (d.c1(), d.c2(), loc.alpha());
    let g = d.gram();
    g.overlap(j + 1, i + 1) * (c1 * c1 * a.cos().powi(2))
        + c2 * c2 * a.sin().powi(2)
        + (g.overlap(j + 1, 0) + g.overlap(0, i + 1)) * (0.5 * c1 * c2 * (2.0 * a).sin())
}

/// The naive bracket that drops the present/absent interference term.
fn naive_overlap(d: &DetectorModel, loc: &LocationProjection, i: usize, j: usize) -> Complex64 {
    let (c1, c2, a) = (d.c1(), d.c2(), loc.alpha());
    d.gram().overlap(j + 1, i + 1) * (c1 * c1 * a.cos().powi(2)) + c2 * c2 * a.sin().powi(2)
}

fn weighted_overlap_sum(q: &QuantonConfig, overlap: impl Fn(usize, usize) -> Complex64) -> Result<f64> {
    let n = q.path_count();
    let p = q.probabilities();
    Ok(normalization(n)? * off_diagonal_sum(n, |i, j| (p[i] * p[j]).sqrt() * overlap(i, j).norm()))
}

fn check_pure(q: &QuantonConfig, d: &DetectorModel) -> Result<()> {
    if !q.is_pure_amplitude() {
        return Err(Error::InvalidConfig("expected a pure quanton (no rho_in)".into()));
    }
    if q.path_count() != d.path_count() {
        return Err(Error::DimensionMismatch(format!(
            "quanton has {} paths but detector has {} path states",
            q.path_count(),
            d.path_count()
        )));
    }
    Ok(())
}

/// Path distinguishability with the detector location ignored.
///
/// Uses `|c1^2 <d_j|d_i> + c2^2|`, which equals the often-quoted
/// `c1^2 |<d_j|d_i>| + c2^2` whenever the overlaps are real and non-negative.
pub fn distinguishability_uqsd(q: &QuantonConfig, d: &DetectorModel) -> Result<f64> {
    check_pure(q, d)?;
    Ok(1.0 - weighted_overlap_sum(q, |i, j| unconditioned_overlap(d, i, j))?)
}

/// Coherence of the unconditioned reduced quanton state from Gram entries:
/// `rho_Q[i][j] = sqrt(p_i p_j) (c1^2 <d_j|d_i> + c2^2)`.
pub fn coherence_closed_form(q: &QuantonConfig, d: &DetectorModel) -> Result<f64> {
    check_pure(q, d)?;
    weighted_overlap_sum(q, |i, j| unconditioned_overlap(d, i, j))
}

pub fn unconditioned_metrics(q: &QuantonConfig, d: &DetectorModel) -> Result<DualityReport> {
    Ok(DualityReport::new(
        distinguishability_uqsd(q, d)?,
        coherence_closed_form(q, d)?,
        Regime::Unconditioned,
    ))
}

/// `sum_i p_i ||d_i'||^2` from Gram entries.
pub fn postselection_probability(
    q: &QuantonConfig,
    d: &DetectorModel,
    loc: &LocationProjection,
) -> Result<f64> {
    check_pure(q, d)?;
    Ok(q.probabilities()
        .iter()
        .enumerate()
        .map(|(i, p)| p * conditioned_overlap(d, loc, i, i).re)
        .sum())
}

/// Distinguishability and coherence after projecting the location onto
/// `|phi_alpha>`, both evaluated on the unnormalized `|d_i'>`.
pub fn conditioned_metrics(
    q: &QuantonConfig,
    d: &DetectorModel,
    loc: &LocationProjection,
) -> Result<DualityReport> {
    let probability = postselection_probability(q, d, loc)?;
    if probability < MIN_POSTSELECTION {
        return Err(Error::ZeroProbability(probability));
    }
    let overlap_sum = weighted_overlap_sum(q, |i, j| conditioned_overlap(d, loc, i, j))?;
    Ok(DualityReport::new(1.0 - overlap_sum, overlap_sum, Regime::Conditioned))
}

/// Coherence of the renormalized post-selected quanton state.
pub fn conditioned_coherence_renormalized(
    q: &QuantonConfig,
    d: &DetectorModel,
    loc: &LocationProjection,
) -> Result<f64> {
    let probability = postselection_probability(q, d, loc)?;
    if probability < MIN_POSTSELECTION {
        return Err(Error::ZeroProbability(probability));
    }
    Ok(weighted_overlap_sum(q, |i, j| conditioned_overlap(d, loc, i, j))? / probability)
}

/// Distinguishability obtained by treating `|d_i>` as present with weight
/// `c1^2 cos^2(alpha)` and absent with weight `c2^2 sin^2(alpha)`.
///
/// This misses the interference term between the two branches. Paired with
/// the conditioned coherence the sum can exceed 1.
pub fn naive_distinguishability(
    q: &QuantonConfig,
    d: &DetectorModel,
    loc: &LocationProjection,
) -> Result<f64> {
    check_pure(q, d)?;
    Ok(1.0 - weighted_overlap_sum(q, |i, j| naive_overlap(d, loc, i, j))?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedReport {
    /// `D'` and the true l1 coherence `C'` of the reduced quanton state.
    pub report: DualityReport,
    /// `(1/(n-1)) sum_k r_k sum_{i!=j} |rho_ij| |<d_kj'|d_ki'>|`, an upper bound on `C'`.
    pub coherence_bound: f64,
    /// `(1/(n-1)) sum_k r_k sum_{i!=j} (sqrt(rho_ii rho_jj) - |rho_ij|) |<d_kj'|d_ki'>|`.
    pub slack: f64,
    /// `|D' + coherence_bound + slack - 1|`.
    pub identity_residual: f64,
    /// `coherence_bound - C'`, zero when all branches share the overlap phases.
    pub triangle_gap: f64,
}

/// Duality for a mixed quanton with a noisy detector, conditioned on the
/// location state.
pub fn mixed_metrics(
    q: &QuantonConfig,
    d: &DetectorModel,
    loc: &LocationProjection,
    ch: &KrausChannel,
) -> Result<MixedReport> {
    let n = q.path_count();
    let norm = normalization(n)?;
    let joint = build_mixed_joint(q, d, loc, ch)?;
    let rho = q.density_matrix();
    let diag: Vec<f64> = rho.diagonal().iter().map(|z| z.re.max(0.0)).collect();

    // overlaps[k][i][j] = <d_kj'|d_ki'>
    let overlaps: Vec<Vec<Vec<Complex64>>> = joint
        .primed
        .iter()
        .map(|vs| (0..n).map(|i| (0..n).map(|j| vs[j].inner(&vs[i])).collect()).collect())
        .collect();
    let weights: Vec<f64> = joint.branches.iter().map(|b| b.weight).collect();

    let mut path_sum = 0.0;
    let mut bound_sum = 0.0;
    let mut slack_sum = 0.0;
    for (r, o) in weights.iter().zip(&overlaps) {
        path_sum += r * off_diagonal_sum(n, |i, j| (diag[i] * diag[j]).sqrt() * o[i][j].norm());
        bound_sum += r * off_diagonal_sum(n, |i, j| rho[(i, j)].norm() * o[i][j].norm());
        slack_sum += r * off_diagonal_sum(n, |i, j| {
            ((diag[i] * diag[j]).sqrt() - rho[(i, j)].norm()) * o[i][j].norm()
        });
    }
    let coherence_sum = off_diagonal_sum(n, |i, j| {
        let mixed: Complex64 = weights.iter().zip(&overlaps).map(|(r, o)| o[i][j] * *r).sum();
        (rho[(i, j)] * mixed).norm()
    });

    let distinguishability = 1.0 - norm * path_sum;
    let coherence = norm * coherence_sum;
    let coherence_bound = norm * bound_sum;
    let slack = norm * slack_sum;
    Ok(MixedReport {
        report: DualityReport::new(distinguishability, coherence, Regime::Mixed),
        coherence_bound,
        slack,
        identity_residual: (distinguishability + coherence_bound + slack - 1.0).abs(),
        triangle_gap: coherence_bound - coherence,
    })
}

/// Distinguishability recomputed from explicit detector vectors.
///
/// Without a location projection the path records are the full detector
/// states `U_i|phi_0>` on internal (x) location; with one they are the
/// conditioned vectors `|d_i'>`. Overlaps are taken numerically.
pub fn distinguishability_oracle(
    q: &QuantonConfig,
    d: &DetectorModel,
    loc: Option<&LocationProjection>,
) -> Result<f64> {
    check_pure(q, d)?;
    let records: Vec<ComplexVector> = match loc {
        None => d.branch_states()?,
        Some(loc) => condition_on_location(q, d, loc)?.primed,
    };
    Ok(1.0 - weighted_overlap_sum(q, |i, j| records[j].inner(&records[i]))?)
}

/// Coherence recomputed by tracing the detector out of an explicit joint
/// state. Conditioned states are used unnormalized.
pub fn coherence_oracle(
    q: &QuantonConfig,
    d: &DetectorModel,
    loc: Option<&LocationProjection>,
) -> Result<f64> {
    let n = q.path_count();
    let rho_q = match loc {
        None => partial_trace(&build_joint_density(q, d)?, &joint_dims(n), &[0])?,
        Some(loc) => {
            let cond = condition_on_location(q, d, loc)?;
            partial_trace(&cond.unnormalized(), &[n, d.internal_dim()], &[0])?
        }
    };
    coherence(&rho_q)
}

/// Mixed-regime coherence from the explicitly assembled operator.
pub fn mixed_coherence_oracle(
    q: &QuantonConfig,
    d: &DetectorModel,
    loc: &LocationProjection,
    ch: &KrausChannel,
) -> Result<f64> {
    let joint = build_mixed_joint(q, d, loc, ch)?;
    let rho_q = partial_trace(&joint.unnormalized(), &[q.path_count(), d.internal_dim()], &[0])?;
    coherence(&rho_q)
}
