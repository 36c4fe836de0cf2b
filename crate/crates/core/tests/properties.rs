use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, SQRT_2};

use duality_core::interferometer::{
    bbs_amplitudes, conditioned_amplitudes, expand_detector_states, input_state, run_bbs, run_qbs,
    run_qbs_conditioned, wave_particle_decomposition, BiasedBeamSplitter, QuantumBeamSplitter,
};
use duality_core::linalg::{
    gram_embed, is_density_matrix, partial_trace, spectral_decompose, tensor, ComplexMatrix,
    ComplexVector, GramMatrix,
};
use duality_core::metrics::{
    coherence, coherence_closed_form, coherence_oracle, conditioned_metrics,
    distinguishability_oracle, distinguishability_uqsd, mixed_metrics, naive_distinguishability,
    unconditioned_metrics,
};
use duality_core::model::{
    apply_channel, build_joint_density, build_joint_pure, build_mixed_joint, condition_on_location,
    joint_dims, DetectorModel, LocationProjection, QuantonConfig,
};
use duality_core::sampling::*;
use duality_core::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 128, ..ProptestConfig::default() }
}

fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// Gram matrix with `<d_0|d_i> = 0` for every path.
fn detector_without_d0_overlap(rng: &mut impl Rng, n: usize) -> DetectorModel {
    let inner = random_gram(rng, n, n, OverlapKind::Complex);
    let g = ComplexMatrix::from_fn(n + 1, n + 1, |i, j| match (i, j) {
        (0, 0) => Complex64::new(1.0, 0.0),
        (0, _) | (_, 0) => Complex64::new(0.0, 0.0),
        _ => inner.overlap(i - 1, j - 1),
    });
    DetectorModel::with_presence(GramMatrix::new(g).unwrap(), rng.random::<f64>().sqrt()).unwrap()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn kronecker_index_law(seed in any::<u64>(), ra in 1usize..4, ca in 1usize..4, rb in 1usize..4, cb in 1usize..4) {
        let mut rng = sample_rng(seed, 0);
        let a = random_matrix(&mut rng, ra, ca);
        let b = random_matrix(&mut rng, rb, cb);
        let t = tensor(&a, &b);
        for i in 0..ra { for j in 0..ca { for k in 0..rb { for l in 0..cb {
            prop_assert_eq!(t[(i * rb + k, j * cb + l)], a[(i, j)] * b[(k, l)]);
        }}}}
    }

    #[test]
    fn partial_trace_keeps_trace_and_positivity(seed in any::<u64>(), da in 1usize..4, db in 1usize..4, rank in 1usize..5) {
        let mut rng = sample_rng(seed, 0);
        let rho = random_density(&mut rng, da * db, rank);
        for keep in [0usize, 1] {
            let reduced = partial_trace(&rho, &[da, db], &[keep]).unwrap();
            let check = is_density_matrix(&reduced, 1e-12);
            prop_assert!(check.is_valid(), "{}", check);
        }
    }

    #[test]
    fn gram_embedding_round_trip(seed in any::<u64>(), count in 1usize..8, dim in 1usize..8) {
        let mut rng = sample_rng(seed, 0);
        let g = random_gram(&mut rng, count, dim, OverlapKind::Complex);
        let vs = gram_embed(&g).unwrap();
        for i in 0..count {
            for j in 0..count {
                prop_assert!((vs[i].inner(&vs[j]) - g.overlap(i, j)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn spectral_reconstruction(seed in any::<u64>(), dim in 1usize..7, rank in 1usize..7) {
        let mut rng = sample_rng(seed, 0);
        let rho = random_density(&mut rng, dim, rank);
        let terms = spectral_decompose(&rho).unwrap();
        let total: f64 = terms.iter().map(|t| t.weight).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        let rebuilt = terms.iter().fold(ComplexMatrix::zeros(dim, dim), |acc, t| {
            &acc + &t.vector.outer(&t.vector).scale_real(t.weight)
        });
        prop_assert!(rebuilt.max_abs_diff(&rho) < 1e-10);
        for (k, a) in terms.iter().enumerate() {
            for (l, b) in terms.iter().enumerate() {
                let expected = if k == l { 1.0 } else { 0.0 };
                prop_assert!((a.vector.inner(&b.vector) - Complex64::new(expected, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn joint_state_norm_and_outer_product(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = sample_rng(seed, 0);
        let q = random_pure_quanton(&mut rng, n);
        let d = random_detector(&mut rng, n, OverlapKind::Complex);
        let psi = build_joint_pure(&q, &d).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
        let rho = build_joint_density(&q, &d).unwrap();
        prop_assert!((&rho - &psi.outer(&psi)).frobenius_norm() < 1e-12);
        prop_assert!(is_density_matrix(&rho, 1e-9).is_valid());
    }

    #[test]
    fn reduced_state_matches_gram_formula(seed in any::<u64>(), n in 2usize..7) {
        // rho_Q[i][j] = sqrt(p_i p_j) (c1^2 <d_j|d_i> + c2^2)
        let mut rng = sample_rng(seed, 0);
        let q = random_pure_quanton(&mut rng, n);
        let d = random_detector(&mut rng, n, OverlapKind::Complex);
        let psi = build_joint_pure(&q, &d).unwrap();
        let rho_q = partial_trace(&psi.outer(&psi), &joint_dims(n), &[0]).unwrap();
        let p = q.probabilities();
        for i in 0..n {
            for j in 0..n {
                let expected = (d.gram().overlap(j + 1, i + 1) * d.c1().powi(2) + d.c2().powi(2)) * (p[i] * p[j]).sqrt();
                prop_assert!((rho_q[(i, j)] - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn conditioned_state_is_the_projected_joint_state(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = sample_rng(seed, 0);
        let q = random_pure_quanton(&mut rng, n);
        let d = random_detector(&mut rng, n, OverlapKind::Complex);
        let loc = random_location(&mut rng);
        let cond = condition_on_location(&q, &d, &loc).unwrap();
        // project the location qubit of the pure joint state by hand
        let psi = build_joint_pure(&q, &d).unwrap();
        let (ca, sa) = (loc.alpha().cos(), loc.alpha().sin());
        let projected = ComplexVector::new((0..psi.dim() / 2).map(|k| psi[2 * k] * ca + psi[2 * k + 1] * sa).collect());
        prop_assert!((projected.norm_sqr() - cond.probability).abs() < 1e-12);
        prop_assert!(cond.unnormalized().max_abs_diff(&projected.outer(&projected)) < 1e-12);
    }

    #[test]
    fn unconditioned_identity_and_oracles(seed in any::<u64>(), n in 2usize..9) {
        let mut rng = sample_rng(seed, 0);
        let q = random_pure_quanton(&mut rng, n);
        let d = random_detector(&mut rng, n, OverlapKind::Complex);
        let r = unconditioned_metrics(&q, &d).unwrap();
        prop_assert!(r.residual < 1e-9);
        prop_assert!(!r.out_of_range);
        prop_assert!((r.distinguishability - distinguishability_oracle(&q, &d, None).unwrap()).abs() < 1e-10);
        prop_assert!((r.coherence - coherence_oracle(&q, &d, None).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn separated_form_agrees_for_non_negative_overlaps(seed in any::<u64>(), n in 2usize..9) {
        // (1/(n-1)) sum sqrt(p_i p_j) (c1^2 |<d_j|d_i>| + c2^2)
        let mut rng = sample_rng(seed, 0);
        let q = random_pure_quanton(&mut rng, n);
        let d = random_detector(&mut rng, n, OverlapKind::NonNegative);
        let p = q.probabilities();
        let mut sum = 0.0;
        for i in 0..n { for j in 0..n { if i != j {
            sum += (p[i] * p[j]).sqrt() * (d.c1().powi(2) * d.gram().overlap(j + 1, i + 1).norm() + d.c2().powi(2));
        }}}
        let separated = sum / (n - 1) as f64;
        prop_assert!((coherence_closed_form(&q, &d).unwrap() - separated).abs() < 1e-12);
        prop_assert!((distinguishability_uqsd(&q, &d).unwrap() - (1.0 - separated)).abs() < 1e-12);
    }

    #[test]
    fn conditioned_identity_and_oracles(seed in any::<u64>(), n in 2usize..9) {
        let mut rng = sample_rng(seed, 0);
        let q = random_pure_quanton(&mut rng, n);
        let d = random_detector(&mut rng, n, OverlapKind::Real);
        let loc = random_location(&mut rng);
        let r = conditioned_metrics(&q, &d, &loc).unwrap();
        prop_assert!(r.residual < 1e-9);
        prop_assert!(!r.out_of_range);
        prop_assert!((r.distinguishability - distinguishability_oracle(&q, &d, Some(&loc)).unwrap()).abs() < 1e-10);
        prop_assert!((r.coherence - coherence_oracle(&q, &d, Some(&loc)).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn naive_matches_correct_without_d0_overlap(seed in any::<u64>(), n in 2usize..8) {
        let mut rng = sample_rng(seed, 0);
        let q = random_pure_quanton(&mut rng, n);
        let d = detector_without_d0_overlap(&mut rng, n);
        let loc = random_location(&mut rng);
        let naive = naive_distinguishability(&q, &d, &loc).unwrap();
        let correct = conditioned_metrics(&q, &d, &loc).unwrap().distinguishability;
        prop_assert!((naive - correct).abs() < 1e-12);
    }

    #[test]
    fn naive_equals_correct_at_zero_angle(seed in any::<u64>(), n in 2usize..8) {
        let mut rng = sample_rng(seed, 0);
        let q = random_pure_quanton(&mut rng, n);
        let d = random_detector(&mut rng, n, OverlapKind::Complex);
        prop_assume!(d.c1() > 1e-3);
        let loc = LocationProjection::particle();
        let naive = naive_distinguishability(&q, &d, &loc).unwrap();
        prop_assert!((naive - conditioned_metrics(&q, &d, &loc).unwrap().distinguishability).abs() < 1e-12);
    }

    #[test]
    fn channel_branches_are_a_distribution(seed in any::<u64>(), n in 1usize..6, kraus in 1usize..4) {
        let mut rng = sample_rng(seed, 0);
        let d = random_detector(&mut rng, n, OverlapKind::Complex);
        let ch = random_channel(&mut rng, n + 1, kraus);
        let branches = apply_channel(&d, &ch).unwrap();
        let total: f64 = branches.iter().map(|b| b.weight).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        for (k, a) in branches.iter().enumerate() {
            prop_assert!(a.weight >= 0.0);
            for (l, b) in branches.iter().enumerate() {
                let expected = if k == l { 1.0 } else { 0.0 };
                prop_assert!((a.reference.inner(&b.reference) - Complex64::new(expected, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn mixed_construction_respects_principal_minors(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = sample_rng(seed, 0);
        let rank = rng.random_range(1..=n);
        let q = random_mixed_quanton(&mut rng, n, rank);
        let rho_in = q.rho_in().unwrap();
        for i in 0..n { for j in 0..n {
            prop_assert!((rho_in[(i, i)].re * rho_in[(j, j)].re).sqrt() - rho_in[(i, j)].norm() >= -1e-12);
        }}
        let d = random_detector(&mut rng, n, OverlapKind::Complex);
        let ch = random_channel(&mut rng, n + 1, 2);
        let joint = build_mixed_joint(&q, &d, &random_location(&mut rng), &ch).unwrap();
        prop_assert!(is_density_matrix(&joint.rho, 1e-9).is_valid());
    }

    #[test]
    fn mixed_inequality_and_three_term_identity(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = sample_rng(seed, 0);
        let rank = rng.random_range(1..=n);
        let q = random_mixed_quanton(&mut rng, n, rank);
        let d = random_detector(&mut rng, n, OverlapKind::Complex);
        let loc = random_location(&mut rng);
        let ch = random_channel(&mut rng, n + 1, 2);
        let m = mixed_metrics(&q, &d, &loc, &ch).unwrap();
        prop_assert!(m.report.sum <= 1.0 + 1e-9);
        prop_assert!(m.identity_residual < 1e-9);
        prop_assert!(m.slack >= -1e-12);
        prop_assert!(m.triangle_gap >= -1e-12);
        if rank == 1 {
            prop_assert!(m.slack.abs() < 1e-9);
        }
    }

    #[test]
    fn qbs_matches_branch_amplitudes(theta in 0.0..std::f64::consts::TAU, c1_sq in 0.0f64..=1.0) {
        // amplitudes written branch by branch, not through the 4x4 operator
        let (c1, c2) = (c1_sq.sqrt(), (1.0 - c1_sq).sqrt());
        let qbs = QuantumBeamSplitter::new(c1, c2).unwrap();
        let e = Complex64::from_polar(1.0, theta);
        let s = FRAC_1_SQRT_2;
        let d1 = (e + 1.0) * (c1 * s * s);
        let d1_absent = Complex64::new(c2 * s, 0.0);
        let d2 = (e - 1.0) * (c1 * s * s);
        let d2_absent = e * (c2 * s);
        let stats = run_qbs(theta, &qbs);
        prop_assert!((stats.p1 - (d1.norm_sqr() + d1_absent.norm_sqr())).abs() < 1e-12);
        prop_assert!((stats.p2 - (d2.norm_sqr() + d2_absent.norm_sqr())).abs() < 1e-12);
        prop_assert!((stats.p1 + stats.p2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bbs_matches_closed_form(theta in 0.0..std::f64::consts::TAU, r in 0.0f64..=1.0) {
        let bbs = BiasedBeamSplitter::from_reflection(r).unwrap();
        let t = bbs.t();
        let [a1, a2] = bbs_amplitudes(theta, &bbs);
        let e = Complex64::from_polar(1.0, theta);
        prop_assert!((a1 - (e * r + t) * FRAC_1_SQRT_2).norm() < 1e-12);
        prop_assert!((a2 - (e * t - r) * FRAC_1_SQRT_2).norm() < 1e-12);
        let s = run_bbs(theta, &bbs);
        prop_assert!((s.p1 - (0.5 + r * t * theta.cos())).abs() < 1e-12);
        prop_assert!((s.p2 - (0.5 - r * t * theta.cos())).abs() < 1e-12);
    }

    #[test]
    fn conditioned_qbs_matches_written_out_state(theta in 0.0..std::f64::consts::TAU) {
        // (1/2)(1/sqrt2 + e^{i theta/2} cos(theta/2)) |D1>
        //   + (1/2) e^{i theta/2} (e^{i theta/2}/sqrt2 + i sin(theta/2)) |D2>
        let half = Complex64::from_polar(1.0, theta / 2.0);
        let i = Complex64::new(0.0, 1.0);
        let d1 = (half * (theta / 2.0).cos() + FRAC_1_SQRT_2) * 0.5;
        let d2 = half * (half * FRAC_1_SQRT_2 + i * (theta / 2.0).sin()) * 0.5;
        let [a1, a2] = conditioned_amplitudes(theta, &QuantumBeamSplitter::balanced(), FRAC_PI_4);
        prop_assert!((a1 - d1).norm() < 1e-12);
        prop_assert!((a2 - d2).norm() < 1e-12);
        let stats = run_qbs_conditioned(theta, &QuantumBeamSplitter::balanced(), FRAC_PI_4).unwrap();
        prop_assert!((stats.norm - (d1.norm_sqr() + d2.norm_sqr())).abs() < 1e-12);
    }

    #[test]
    fn mimic_rewrite_matches_amplitudes(theta in 0.0..std::f64::consts::TAU) {
        // sqrt2 r ((t-r)/(2r) + e^{i theta/2} cos(theta/2)) and its D2 partner
        let b = duality_core::bbs_mimic_params();
        let (r, t) = (b.r(), b.t());
        let half = Complex64::from_polar(1.0, theta / 2.0);
        let i = Complex64::new(0.0, 1.0);
        let k = (t - r) / (2.0 * r);
        let d1 = (half * (theta / 2.0).cos() + k) * (SQRT_2 * r);
        let d2 = half * (half * k + i * (theta / 2.0).sin()) * (SQRT_2 * r);
        let [a1, a2] = bbs_amplitudes(theta, &b);
        prop_assert!((a1 - d1).norm() < 1e-12);
        prop_assert!((a2 - d2).norm() < 1e-12);
    }

    #[test]
    fn expansion_round_trip(modulus in 0.0f64..=1.0, phase in -3.1f64..3.1) {
        let g = Complex64::from_polar(modulus, phase);
        let ex = expand_detector_states(g).unwrap();
        prop_assert!((ex.gamma.powi(2) + ex.beta.powi(2) - 1.0).abs() < 1e-12);
        prop_assert!((ex.overlap() - g).norm() < 1e-12);
        let w = wave_particle_decomposition(g).unwrap();
        prop_assert!((w.total_weight - 1.0).abs() < 1e-12);
        prop_assert!((w.overall_coherence - w.expanded_coherence).abs() < 1e-12);
        prop_assert!((w.overall_coherence - modulus).abs() < 1e-12);
    }
}

#[test]
fn input_state_is_normalized() {
    for k in 0..8 {
        assert!((input_state(k as f64).norm() - 1.0).abs() < 1e-15);
    }
}

#[test]
fn coherence_of_explicit_superposition() {
    // equal superposition with phases keeps |rho_ij| = 1/n
    let n = 5;
    let psi = ComplexVector::new((0..n).map(|k| Complex64::from_polar(1.0 / (n as f64).sqrt(), k as f64)).collect());
    assert!((coherence(&psi.outer(&psi)).unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn conditioned_wave_branch_has_identical_detector_states() {
    let mut rng = sample_rng(11, 0);
    let q = random_pure_quanton(&mut rng, 4);
    let d = random_detector(&mut rng, 4, OverlapKind::Complex);
    let loc = LocationProjection::new(FRAC_PI_2).unwrap();
    let report = conditioned_metrics(&q, &d, &loc).unwrap();
    assert!(report.residual < 1e-9);
    let cond = condition_on_location(&q, &d, &loc).unwrap();
    for v in &cond.primed[1..] {
        assert!(v.distance(&cond.primed[0]) < 1e-15);
    }
}

#[test]
fn mixed_regime_matches_pure_limit_with_random_gram() {
    let mut rng = sample_rng(12, 0);
    for _ in 0..20 {
        let q = random_pure_quanton(&mut rng, 3);
        let d = random_detector(&mut rng, 3, OverlapKind::Complex);
        let loc = random_location(&mut rng);
        let mixed = QuantonConfig::mixed(q.density_matrix()).unwrap();
        let m = mixed_metrics(&mixed, &d, &loc, &duality_core::KrausChannel::identity(4)).unwrap();
        let c = conditioned_metrics(&q, &d, &loc).unwrap();
        assert!((m.report.distinguishability - c.distinguishability).abs() < 1e-12);
        assert!((m.report.sum - 1.0).abs() < 1e-9);
    }
}
