//! Dispatch from an [`ExperimentSpec`] to the core library.

use duality_core::interferometer::{wave_particle_decomposition, BranchReport};
use duality_core::metrics::{
    coherence_oracle, conditioned_metrics, distinguishability_oracle, mixed_metrics,
    naive_distinguishability, postselection_probability, unconditioned_metrics,
};
use duality_core::{
    expand_detector_states, run_bbs, run_qbs, run_qbs_conditioned, BiasedBeamSplitter, Complex64,
    ComplexMatrix, DetectorModel, Error, KrausChannel, LocationProjection, QuantonConfig,
    QuantumBeamSplitter,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ChannelSpec, ExperimentSpec, Kind};
use crate::verify;

pub const DUALITY_TOL: f64 = 1e-9;
pub const ORACLE_TOL: f64 = 1e-10;
pub const STATS_TOL: f64 = 1e-12;

/// One CSV field. `Missing` is written as an empty field and as JSON `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Rows or samples the check was evaluated on.
    pub samples: usize,
    /// Largest violation seen; the check passes when `worst <= tolerance`.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, samples: usize, worst: f64, tolerance: f64) -> Self {
        Self { name: name.into(), samples, worst, tolerance, passed: worst <= tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub spec: ExperimentSpec,
    pub seed: Option<u64>,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub kind: Kind,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: Metadata,
    pub checks: Vec<Check>,
}

impl SweepResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Maximum that propagates NaN, so a NaN measure fails its check.
pub fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc: f64, x| if x.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(x) })
}

struct Row {
    cells: Vec<Cell>,
    /// One entry per check; `None` when the check does not apply to this row.
    measures: Vec<Option<f64>>,
}

fn summarize(names: &[(&str, f64)], rows: &[Row]) -> Vec<Check> {
    names
        .iter()
        .enumerate()
        .map(|(k, (name, tol))| {
            let values: Vec<f64> = rows.iter().filter_map(|r| r.measures[k]).collect();
            Check::new(*name, values.len(), worst(values.iter().copied()), *tol)
        })
        .collect()
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<SweepResult, Error> {
    let (columns, rows, checks): (&[&str], Vec<Vec<Cell>>, Vec<Check>) = match spec.kind {
        Kind::Verify => {
            let out = verify::run_suite(spec.seed.expect("seed validated"), spec.samples);
            (verify::COLUMNS, out.rows, out.checks)
        }
        kind => {
            let (columns, names, rows) = sweep(spec, kind)?;
            let checks = summarize(names, &rows);
            (columns, rows.into_iter().map(|r| r.cells).collect(), checks)
        }
    };
    Ok(SweepResult {
        kind: spec.kind,
        columns: columns.iter().map(|c| c.to_string()).collect(),
        rows,
        metadata: Metadata {
            spec: spec.clone(),
            seed: spec.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
        checks,
    })
}

type Sweep = (&'static [&'static str], &'static [(&'static str, f64)], Vec<Row>);

fn sweep(spec: &ExperimentSpec, kind: Kind) -> Result<Sweep, Error> {
    match kind {
        Kind::Duality => Ok((
            &["c1", "D", "C", "sum", "residual"],
            &[("identity", DUALITY_TOL), ("oracle", ORACLE_TOL)],
            par_rows(&spec.c1, |&c1| duality_row(spec, c1))?,
        )),
        Kind::Conditioned => Ok((
            &["c1", "alpha", "D", "C", "sum", "residual", "naive_D", "naive_sum", "probability"],
            &[("identity", DUALITY_TOL), ("oracle", ORACLE_TOL)],
            par_rows(&pairs(&spec.c1, &spec.alpha), |&(c1, a)| conditioned_row(spec, c1, a))?,
        )),
        Kind::Mixed => {
            let q = mixed_quanton(spec)?;
            let channel = build_channel(spec.channel, spec.n + 1)?;
            Ok((
                &["c1", "alpha", "D", "C", "sum", "bound", "slack", "identity_residual", "triangle_gap"],
                &[("inequality", DUALITY_TOL), ("three-term identity", DUALITY_TOL)],
                par_rows(&pairs(&spec.c1, &spec.alpha), |&(c1, a)| mixed_row(spec, &q, &channel, c1, a))?,
            ))
        }
        Kind::Qbs => {
            let qbs = quantum_splitter(spec)?;
            let c1_sq = qbs.c1().powi(2);
            Ok((
                &["theta", "p1", "p2"],
                &[("normalization", STATS_TOL), ("closed form", STATS_TOL)],
                par_rows(&spec.theta, |&theta| {
                    let s = run_qbs(theta, &qbs);
                    let expected = 0.5 + 0.5 * c1_sq * theta.cos();
                    Ok(stats_row(theta, s.p1, s.p2, None, Some((s.p1 - expected).abs())))
                })?,
            ))
        }
        Kind::Bbs => {
            let bbs = BiasedBeamSplitter::new(spec.r, spec.t)?;
            Ok((
                &["theta", "p1", "p2"],
                &[("normalization", STATS_TOL), ("closed form", STATS_TOL)],
                par_rows(&spec.theta, |&theta| {
                    let s = run_bbs(theta, &bbs);
                    let expected = 0.5 + bbs.r() * bbs.t() * theta.cos();
                    Ok(stats_row(theta, s.p1, s.p2, None, Some((s.p1 - expected).abs())))
                })?,
            ))
        }
        Kind::QbsConditioned => {
            let qbs = quantum_splitter(spec)?;
            let alpha = spec.alpha.first().copied().ok_or_else(|| invalid("alpha list is empty"))?;
            Ok((
                &["theta", "p1", "p2", "norm"],
                &[("normalization", STATS_TOL), ("closed form", STATS_TOL)],
                par_rows(&spec.theta, |&theta| match run_qbs_conditioned(theta, &qbs, alpha) {
                    Ok(s) => Ok(stats_row(theta, s.p1, s.p2, Some(s.norm), None)),
                    Err(Error::ZeroProbability(norm)) => Ok(Row {
                        cells: vec![theta.into(), Cell::Missing, Cell::Missing, norm.into()],
                        measures: vec![None, None],
                    }),
                    Err(e) => Err(e),
                })?,
            ))
        }
        Kind::Expand => Ok((
            &["overlap", "gamma", "beta", "w_q3", "w_q1", "w_q2", "c_q3", "c_q1", "c_q2", "coherence"],
            &[("round trip", STATS_TOL), ("weights", STATS_TOL), ("coherence", STATS_TOL)],
            par_rows(&spec.overlap, |&m| expand_row(m, spec.overlap_phase))?,
        )),
        Kind::Verify => unreachable!("handled by run_experiment"),
    }
}

fn par_rows<T: Sync>(
    points: &[T],
    f: impl Fn(&T) -> Result<Row, Error> + Sync + Send,
) -> Result<Vec<Row>, Error> {
    points.par_iter().map(f).collect()
}

fn pairs(a: &[f64], b: &[f64]) -> Vec<(f64, f64)> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect()
}

fn invalid(msg: &str) -> Error {
    Error::InvalidConfig(msg.to_string())
}

fn detector(spec: &ExperimentSpec, c1: f64) -> Result<DetectorModel, Error> {
    DetectorModel::with_presence(spec.gram.clone(), c1)
}

fn quantum_splitter(spec: &ExperimentSpec) -> Result<QuantumBeamSplitter, Error> {
    let c1 = spec.c1.first().copied().ok_or_else(|| invalid("c1 list is empty"))?;
    QuantumBeamSplitter::new(c1, (1.0 - c1 * c1).max(0.0).sqrt())
}

/// `(1 - lambda) |psi><psi| + lambda diag(p)`.
fn mixed_quanton(spec: &ExperimentSpec) -> Result<QuantonConfig, Error> {
    let pure = QuantonConfig::pure(spec.p.clone())?.density_matrix();
    let lambda = spec.quanton_dephasing;
    let n = spec.n;
    let rho = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            pure[(i, j)]
        } else {
            pure[(i, j)] * (1.0 - lambda)
        }
    });
    QuantonConfig::mixed(rho)
}

pub fn build_channel(spec: ChannelSpec, dim: usize) -> Result<KrausChannel, Error> {
    match spec {
        ChannelSpec::Identity => Ok(KrausChannel::identity(dim)),
        ChannelSpec::Dephasing(s) => KrausChannel::dephasing(dim, s),
        ChannelSpec::Depolarizing(s) => KrausChannel::depolarizing(dim, s),
    }
}

fn duality_row(spec: &ExperimentSpec, c1: f64) -> Result<Row, Error> {
    let q = QuantonConfig::pure(spec.p.clone())?;
    let d = detector(spec, c1)?;
    let r = unconditioned_metrics(&q, &d)?;
    let oracle = (r.distinguishability - distinguishability_oracle(&q, &d, None)?)
        .abs()
        .max((r.coherence - coherence_oracle(&q, &d, None)?).abs());
    Ok(Row {
        cells: vec![c1.into(), r.distinguishability.into(), r.coherence.into(), r.sum.into(), r.residual.into()],
        measures: vec![Some(r.residual), Some(oracle)],
    })
}

fn conditioned_row(spec: &ExperimentSpec, c1: f64, alpha: f64) -> Result<Row, Error> {
    let q = QuantonConfig::pure(spec.p.clone())?;
    let d = detector(spec, c1)?;
    let loc = LocationProjection::new(alpha)?;
    let probability = postselection_probability(&q, &d, &loc)?;
    let r = match conditioned_metrics(&q, &d, &loc) {
        Ok(r) => r,
        Err(Error::ZeroProbability(_)) => {
            let mut cells = vec![c1.into(), alpha.into()];
            cells.extend(std::iter::repeat_n(Cell::Missing, 6));
            cells.push(probability.into());
            return Ok(Row { cells, measures: vec![None, None] });
        }
        Err(e) => return Err(e),
    };
    let naive = naive_distinguishability(&q, &d, &loc)?;
    let oracle = (r.distinguishability - distinguishability_oracle(&q, &d, Some(&loc))?)
        .abs()
        .max((r.coherence - coherence_oracle(&q, &d, Some(&loc))?).abs());
    Ok(Row {
        cells: vec![
            c1.into(),
            alpha.into(),
            r.distinguishability.into(),
            r.coherence.into(),
            r.sum.into(),
            r.residual.into(),
            naive.into(),
            (naive + r.coherence).into(),
            probability.into(),
        ],
        measures: vec![Some(r.residual), Some(oracle)],
    })
}

fn mixed_row(
    spec: &ExperimentSpec,
    q: &QuantonConfig,
    channel: &KrausChannel,
    c1: f64,
    alpha: f64,
) -> Result<Row, Error> {
    let d = detector(spec, c1)?;
    let loc = LocationProjection::new(alpha)?;
    match mixed_metrics(q, &d, &loc, channel) {
        Ok(m) => Ok(Row {
            cells: vec![
                c1.into(),
                alpha.into(),
                m.report.distinguishability.into(),
                m.report.coherence.into(),
                m.report.sum.into(),
                m.coherence_bound.into(),
                m.slack.into(),
                m.identity_residual.into(),
                m.triangle_gap.into(),
            ],
            measures: vec![Some(m.report.residual), Some(m.identity_residual)],
        }),
        Err(Error::ZeroProbability(_)) => {
            let mut cells = vec![c1.into(), alpha.into()];
            cells.extend(std::iter::repeat_n(Cell::Missing, 7));
            Ok(Row { cells, measures: vec![None, None] })
        }
        Err(e) => Err(e),
    }
}

fn stats_row(theta: f64, p1: f64, p2: f64, norm: Option<f64>, closed_form: Option<f64>) -> Row {
    let mut cells = vec![theta.into(), p1.into(), p2.into()];
    cells.extend(norm.map(Cell::Num));
    Row { cells, measures: vec![Some((p1 + p2 - 1.0).abs()), closed_form] }
}

fn expand_row(modulus: f64, phase: f64) -> Result<Row, Error> {
    let g = Complex64::from_polar(modulus, phase);
    let ex = expand_detector_states(g)?;
    let w = wave_particle_decomposition(g)?;
    let coherence = |b: &BranchReport| b.coherence.map_or(Cell::Missing, Cell::Num);
    let [q3, q1, q2] = &w.branches;
    Ok(Row {
        cells: vec![
            modulus.into(),
            ex.gamma.into(),
            ex.beta.into(),
            q3.weight.into(),
            q1.weight.into(),
            q2.weight.into(),
            coherence(q3),
            coherence(q1),
            coherence(q2),
            w.overall_coherence.into(),
        ],
        measures: vec![
            Some((ex.overlap() - g).norm()),
            Some((w.total_weight - 1.0).abs()),
            Some((w.overall_coherence - w.expanded_coherence).abs()),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn run(text: &str) -> SweepResult {
        run_experiment(&parse_config(text).unwrap()).unwrap()
    }

    fn num(c: &Cell) -> f64 {
        match c {
            Cell::Num(x) => *x,
            other => panic!("not a number: {other:?}"),
        }
    }

    #[test]
    fn qbs_rows_follow_the_cosine_law() {
        let r = run("kind=qbs\ntheta_grid=0:6.283185307179586:64");
        assert_eq!(r.columns, ["theta", "p1", "p2"]);
        assert_eq!(r.rows.len(), 64);
        for row in &r.rows {
            let theta = num(&row[0]);
            assert!((num(&row[1]) - (0.5 + 0.25 * theta.cos())).abs() < 1e-12);
        }
        assert!((num(&r.rows[0][1]) - 0.75).abs() < 1e-15);
        assert!(r.passed());
    }

    #[test]
    fn duality_sweep_over_c1() {
        let r = run("kind=duality\nn=3\np=0.2,0.3,0.5\nc1=0:1:11\nd1_2=0.5\nd0_3=0.3,0.1");
        assert_eq!(r.columns, ["c1", "D", "C", "sum", "residual"]);
        assert_eq!(r.rows.len(), 11);
        assert!(r.passed(), "{:?}", r.checks);
        assert!(r.rows.iter().all(|row| (num(&row[3]) - 1.0).abs() < 1e-9));
    }

    #[test]
    fn demo_config_exposes_the_naive_sum() {
        let r = run("kind=conditioned\nd0_1=1");
        let row = &r.rows[0];
        assert!((num(&row[4]) - 1.0).abs() < 1e-12);
        assert!((num(&row[7]) - 1.25).abs() < 1e-12);
    }

    #[test]
    fn zero_probability_rows_are_blank() {
        let r = run("kind=conditioned\nc1=0\nalpha=0,0.5");
        assert_eq!(r.rows[0][2], Cell::Missing);
        assert_eq!(num(&r.rows[0][8]), 0.0);
        assert!(matches!(r.rows[1][2], Cell::Num(_)));
        assert_eq!(r.checks[0].samples, 1);
        assert!(r.passed());
    }

    #[test]
    fn mixed_with_dephasing_stays_below_one() {
        let r = run("kind=mixed\nn=3\nchannel=dephasing(0.4)\nquanton_dephasing=0.3\nc1=0:1:5\nalpha=0.2,0.7,1.2");
        assert_eq!(r.rows.len(), 15);
        assert!(r.passed(), "{:?}", r.checks);
        assert!(r.rows.iter().all(|row| num(&row[4]) <= 1.0 + 1e-9));
    }

    #[test]
    fn bbs_defaults_match_the_quantum_splitter() {
        let b = run("kind=bbs");
        let q = run("kind=qbs");
        for (rb, rq) in b.rows.iter().zip(&q.rows) {
            assert!((num(&rb[1]) - num(&rq[1])).abs() < 1e-12);
        }
    }

    #[test]
    fn expand_half_overlap() {
        let r = run("kind=expand\noverlap=0.5");
        let row = &r.rows[0];
        let values: Vec<f64> = row[3..].iter().map(num).collect();
        let expected = [0.5, 0.25, 0.25, 1.0, 0.0, 0.0, 0.5];
        for (v, e) in values.iter().zip(expected) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn expand_full_overlap_has_empty_particle_branches() {
        let r = run("kind=expand\noverlap=1");
        assert_eq!(r.rows[0][7], Cell::Missing);
    }

    #[test]
    fn empty_grid_gives_no_rows() {
        let r = run("kind=qbs\ntheta_grid=0:1:0");
        assert!(r.rows.is_empty());
        assert!(r.passed());
        assert_eq!(r.checks[0].samples, 0);
    }

    #[test]
    fn worst_propagates_nan() {
        assert!(worst([0.1, f64::NAN, 0.2]).is_nan());
        assert_eq!(worst([0.1, 0.3]), 0.3);
        assert!(!Check::new("x", 1, f64::NAN, 1.0).passed);
    }
}
