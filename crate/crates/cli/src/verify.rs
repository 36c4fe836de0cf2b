//! Seeded randomized verification of the duality relations.
//!
//! Sample `k` draws from its own stream `sample_rng(seed, k)` with
//! `n = 2 + k mod 7`, so results do not depend on thread scheduling.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, TAU};

use duality_core::interferometer::{compare_mimic, wave_particle_decomposition};
use duality_core::metrics::{
    coherence_oracle, conditioned_metrics, distinguishability_oracle, mixed_metrics,
    naive_distinguishability, unconditioned_metrics,
};
use duality_core::sampling::{
    random_channel, random_detector, random_location, random_mixed_quanton, random_pure_quanton,
    sample_rng, OverlapKind,
};
use duality_core::{
    run_bbs, run_qbs, BiasedBeamSplitter, Complex64, ComplexMatrix, DetectorModel, Error,
    GramMatrix, LocationProjection, QuantonConfig, QuantumBeamSplitter,
};
use rand::Rng;
use rayon::prelude::*;

use crate::config::grid;
use crate::experiment::{worst, Cell, Check, DUALITY_TOL, ORACLE_TOL, STATS_TOL};

pub const COLUMNS: &[&str] = &["check", "samples", "worst", "tolerance", "passed"];

pub struct SuiteOutput {
    pub rows: Vec<Vec<Cell>>,
    pub checks: Vec<Check>,
}

const SAMPLED: [(&str, f64); 8] = [
    ("unconditioned identity", DUALITY_TOL),
    ("unconditioned oracle", ORACLE_TOL),
    ("conditioned identity", DUALITY_TOL),
    ("conditioned oracle", ORACLE_TOL),
    ("mixed inequality", DUALITY_TOL),
    ("mixed three-term identity", DUALITY_TOL),
    ("mixed rank-1 saturation", DUALITY_TOL),
    ("mixed slack sign", DUALITY_TOL),
];

fn sample(seed: u64, index: usize) -> Result<[Option<f64>; 8], Error> {
    let mut rng = sample_rng(seed, index as u64);
    let n = 2 + index % 7;
    let mut out = [None; 8];

    let q = random_pure_quanton(&mut rng, n);
    let d = random_detector(&mut rng, n, OverlapKind::Complex);
    let r = unconditioned_metrics(&q, &d)?;
    out[0] = Some(r.residual);
    out[1] = Some(
        (r.distinguishability - distinguishability_oracle(&q, &d, None)?)
            .abs()
            .max((r.coherence - coherence_oracle(&q, &d, None)?).abs()),
    );

    let loc = random_location(&mut rng);
    match conditioned_metrics(&q, &d, &loc) {
        Ok(r) => {
            out[2] = Some(r.residual);
            out[3] = Some(
                (r.distinguishability - distinguishability_oracle(&q, &d, Some(&loc))?)
                    .abs()
                    .max((r.coherence - coherence_oracle(&q, &d, Some(&loc))?).abs()),
            );
        }
        Err(Error::ZeroProbability(_)) => {}
        Err(e) => return Err(e),
    }

    let rank = rng.random_range(1..=n);
    let qm = random_mixed_quanton(&mut rng, n, rank);
    let dm = random_detector(&mut rng, n, OverlapKind::Complex);
    let locm = random_location(&mut rng);
    let ch = random_channel(&mut rng, n + 1, 2);
    match mixed_metrics(&qm, &dm, &locm, &ch) {
        Ok(m) => {
            out[4] = Some(m.report.residual);
            out[5] = Some(m.identity_residual);
            if rank == 1 {
                out[6] = Some((m.report.distinguishability + m.coherence_bound - 1.0).abs());
            }
            out[7] = Some(-m.slack);
        }
        Err(Error::ZeroProbability(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(out)
}

fn fixed_checks() -> Result<Vec<Check>, Error> {
    let mut checks = Vec::new();

    // two paths, c1 = c2 = 1/sqrt(2), alpha = pi/4, <d0|d1> = 1
    let mut g = ComplexMatrix::identity(3).entries().to_vec();
    g[1] = Complex64::new(1.0, 0.0);
    g[3] = Complex64::new(1.0, 0.0);
    let gram = GramMatrix::new(ComplexMatrix::new(3, 3, g)?)?;
    let q = QuantonConfig::uniform(2);
    let d = DetectorModel::with_presence(gram, FRAC_1_SQRT_2)?;
    let loc = LocationProjection::new(FRAC_PI_4)?;
    let correct = conditioned_metrics(&q, &d, &loc)?;
    let naive = naive_distinguishability(&q, &d, &loc)? + correct.coherence;
    checks.push(Check::new("demo naive sum = 5/4", 1, (naive - 1.25).abs(), STATS_TOL));
    checks.push(Check::new("demo correct sum = 1", 1, correct.residual, STATS_TOL));

    let thetas = grid(0.0, TAU, 64);
    let qbs = QuantumBeamSplitter::balanced();
    let bbs = BiasedBeamSplitter::from_reflection(((1.0 - 0.75f64.sqrt()) / 2.0).sqrt())?;
    checks.push(Check::new(
        "qbs cosine law",
        thetas.len(),
        worst(thetas.iter().map(|&t| (run_qbs(t, &qbs).p1 - (0.5 + 0.25 * t.cos())).abs())),
        STATS_TOL,
    ));
    checks.push(Check::new(
        "bbs rt=1/4 matches qbs",
        thetas.len(),
        worst(thetas.iter().map(|&t| {
            let (a, b) = (run_qbs(t, &qbs), run_bbs(t, &bbs));
            (a.p1 - b.p1).abs().max((a.p2 - b.p2).abs())
        })),
        STATS_TOL,
    ));
    let ratios: Vec<f64> = thetas
        .iter()
        .map(|&t| compare_mimic(t).ratio_d2)
        .filter(|r| r.is_finite())
        .collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    checks.push(Check::new("mimic D2 ratio constant", ratios.len(), hi - lo, ORACLE_TOL));

    let w = wave_particle_decomposition(Complex64::new(0.5, 0.0))?;
    let expected = [(0.5, Some(1.0)), (0.25, Some(0.0)), (0.25, Some(0.0))];
    let dev = worst(w.branches.iter().zip(expected).map(|(b, (weight, c))| {
        let dc = match (b.coherence, c) {
            (Some(x), Some(y)) => (x - y).abs(),
            _ => f64::NAN,
        };
        (b.weight - weight).abs().max(dc)
    }));
    checks.push(Check::new("expanded basis at overlap 1/2", 3, dev, STATS_TOL));
    Ok(checks)
}

/// Runs `samples` random configurations plus the fixed reference cases.
pub fn run_suite(seed: u64, samples: usize) -> SuiteOutput {
    let results: Vec<Result<[Option<f64>; 8], Error>> =
        (0..samples).into_par_iter().map(|k| sample(seed, k)).collect();

    let errors = results.iter().filter(|r| r.is_err()).count();
    let ok: Vec<[Option<f64>; 8]> = results.into_iter().filter_map(Result::ok).collect();
    let mut checks: Vec<Check> = SAMPLED
        .iter()
        .enumerate()
        .map(|(k, (name, tol))| {
            let values: Vec<f64> = ok.iter().filter_map(|s| s[k]).collect();
            Check::new(*name, values.len(), worst(values.iter().copied()), *tol)
        })
        .collect();
    checks.push(Check::new("sample errors", samples, errors as f64, 0.0));
    match fixed_checks() {
        Ok(fixed) => checks.extend(fixed),
        Err(_) => checks.push(Check::new("reference cases", 1, f64::NAN, 0.0)),
    }

    let rows = checks
        .iter()
        .map(|c| {
            vec![
                Cell::Text(c.name.clone()),
                Cell::Int(c.samples as u64),
                Cell::Num(c.worst),
                Cell::Num(c.tolerance),
                Cell::Text(c.passed.to_string()),
            ]
        })
        .collect();
    SuiteOutput { rows, checks }
}
