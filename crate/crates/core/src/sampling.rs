//! Random valid instances for property checks and verification sweeps.
//!
//! Every generator produces valid inputs by construction: path
//! probabilities are flat-simplex samples, Gram matrices come from
//! normalized random vectors, `c1^2` is uniform on `[0, 1]` and `alpha` is
//! uniform on `[0, pi/2]`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::linalg::{orthonormalize, ComplexMatrix, ComplexVector, GramMatrix};
use crate::model::{DetectorModel, KrausChannel, LocationProjection, QuantonConfig};

/// Deterministic per-sample generator: one ChaCha stream per index, so
/// samples can be drawn in any order or in parallel.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Which kind of inner products a random Gram matrix has.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapKind {
    Complex,
    Real,
    /// Real and non-negative (vectors with non-negative entries).
    NonNegative,
}

/// Uniform sample from the probability simplex.
pub fn random_simplex(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / total).collect()
}

pub fn random_vector(rng: &mut impl Rng, dim: usize, kind: OverlapKind) -> ComplexVector {
    let mut gauss = || rng.sample::<f64, _>(StandardNormal);
    let v = ComplexVector::new(
        (0..dim)
            .map(|_| match kind {
                OverlapKind::Complex => Complex64::new(gauss(), gauss()),
                OverlapKind::Real => Complex64::new(gauss(), 0.0),
                OverlapKind::NonNegative => Complex64::new(gauss().abs(), 0.0),
            })
            .collect(),
    );
    v.normalized().unwrap_or_else(|| ComplexVector::basis(dim, 0))
}

/// Gram matrix of `count` normalized random vectors in `dim` dimensions.
/// `dim < count` gives rank-deficient matrices.
pub fn random_gram(rng: &mut impl Rng, count: usize, dim: usize, kind: OverlapKind) -> GramMatrix {
    let vectors: Vec<ComplexVector> = (0..count).map(|_| random_vector(rng, dim, kind)).collect();
    GramMatrix::from_vectors(&vectors).expect("Gram of normalized vectors is valid")
}

/// Detector for `n` paths with `c1^2 ~ U[0, 1]` and a random Gram matrix of
/// random rank between 1 and `n + 1`.
pub fn random_detector(rng: &mut impl Rng, n: usize, kind: OverlapKind) -> DetectorModel {
    let dim = rng.random_range(1..=n + 1);
    let gram = random_gram(rng, n + 1, dim, kind);
    let c1_sq: f64 = rng.random();
    DetectorModel::new(gram, c1_sq.sqrt(), (1.0 - c1_sq).sqrt()).expect("valid by construction")
}

pub fn random_location(rng: &mut impl Rng) -> LocationProjection {
    LocationProjection::new(rng.random_range(0.0..=FRAC_PI_2)).expect("finite angle")
}

pub fn random_pure_quanton(rng: &mut impl Rng, n: usize) -> QuantonConfig {
    QuantonConfig::pure(random_simplex(rng, n)).expect("simplex sample")
}

/// Random `n x n` density matrix of the given rank (`A A^dag / tr`).
pub fn random_density(rng: &mut impl Rng, n: usize, rank: usize) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(n, rank, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let rho = &a * &a.adjoint();
    let tr = rho.trace().re;
    // exact Hermiticity and unit trace
    let rho = rho.scale_real(1.0 / tr);
    (&rho + &rho.adjoint()).scale_real(0.5)
}

pub fn random_mixed_quanton(rng: &mut impl Rng, n: usize, rank: usize) -> QuantonConfig {
    QuantonConfig::mixed(random_density(rng, n, rank)).expect("valid by construction")
}

/// Random channel with `count` Kraus operators on `dim` dimensions, cut
/// from a random isometry `C^dim -> C^(count * dim)`.
pub fn random_channel(rng: &mut impl Rng, dim: usize, count: usize) -> KrausChannel {
    let tall = count * dim;
    let columns: Vec<ComplexVector> = (0..dim).map(|_| random_vector(rng, tall, OverlapKind::Complex)).collect();
    let iso = orthonormalize(&columns);
    assert_eq!(iso.len(), dim, "random columns were dependent");
    let ops = (0..count)
        .map(|k| ComplexMatrix::from_fn(dim, dim, |i, j| iso[j][k * dim + i]))
        .collect();
    KrausChannel::new(ops).expect("square operators")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_density_matrix;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = sample_rng(42, 3).random();
        let b: f64 = sample_rng(42, 3).random();
        let c: f64 = sample_rng(42, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn generated_instances_are_valid() {
        let mut rng = sample_rng(7, 0);
        for n in 2..6 {
            let p = random_simplex(&mut rng, n);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let rho = random_density(&mut rng, n, 2);
            assert!(is_density_matrix(&rho, 1e-12).is_valid());
            let ch = random_channel(&mut rng, n + 1, 2);
            assert!(ch.completeness_deviation() < 1e-12);
            let g = random_gram(&mut rng, n + 1, n, OverlapKind::NonNegative);
            for i in 0..=n {
                for j in 0..=n {
                    assert!(g.overlap(i, j).re >= 0.0 && g.overlap(i, j).im == 0.0);
                }
            }
        }
    }
}
