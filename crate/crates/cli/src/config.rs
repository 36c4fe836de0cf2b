//! `key=value` experiment files.
//!
//! One entry per line, `#` starts a comment, lists are comma-separated and
//! later entries override earlier ones. Unset keys take these defaults:
//!
//! | key | default |
//! |-----|---------|
//! | `n` | 2, or the length of `p` |
//! | `p` | uniform |
//! | `c1` | `1/sqrt(2)` (so `c1^2 = 1/2`) |
//! | `alpha` | `pi/4` |
//! | `d<i>_<j>` | 0 for every `i != j` |
//! | `theta_grid` | 64 points on `[0, 2 pi]` |
//! | `channel` | `identity` |
//! | `quanton_dephasing` | 0 |
//! | `r`, `t` | `rt = 1/4`, the splitter matching the balanced quantum one |
//! | `overlap`, `overlap_phase` | 0.5, 0 |
//! | `samples` | 1000 |
//!
//! `c1`, `alpha`, `theta_grid` and `overlap` accept either a list or a grid
//! `start:stop:count` with both ends included.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, TAU};
use std::fmt;
use std::str::FromStr;

use duality_core::{Complex64, ComplexMatrix, GramMatrix};
use serde::Serialize;
use thiserror::Error;

/// Where a configuration entry came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// 1-based line of a config file.
    Line(usize),
    /// 1-based position among `--set` options.
    Set(usize),
    Flag(&'static str),
    Default,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Set(n) => write!(f, "--set #{n}"),
            Origin::Flag(name) => write!(f, "--{name}"),
            Origin::Default => f.write_str("default"),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{origin}: unknown key `{key}`")]
    UnknownKey { key: String, origin: Origin },
    #[error("{origin}: bad value for `{key}`: {reason}")]
    BadValue { key: String, origin: Origin, reason: String },
    #[error("{origin}: expected `key=value`")]
    Syntax { origin: Origin },
    #[error("no experiment kind given")]
    MissingKind,
    #[error("kind `{given}` conflicts with `{configured}` set in the config")]
    KindMismatch { given: Kind, configured: Kind },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Duality,
    Conditioned,
    Mixed,
    Qbs,
    Bbs,
    QbsConditioned,
    Expand,
    Verify,
}

impl Kind {
    pub const ALL: [Kind; 8] = [
        Kind::Duality,
        Kind::Conditioned,
        Kind::Mixed,
        Kind::Qbs,
        Kind::Bbs,
        Kind::QbsConditioned,
        Kind::Expand,
        Kind::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Duality => "duality",
            Kind::Conditioned => "conditioned",
            Kind::Mixed => "mixed",
            Kind::Qbs => "qbs",
            Kind::Bbs => "bbs",
            Kind::QbsConditioned => "qbs-conditioned",
            Kind::Expand => "expand",
            Kind::Verify => "verify",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown kind `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "name", content = "strength", rename_all = "kebab-case")]
pub enum ChannelSpec {
    Identity,
    Dephasing(f64),
    Depolarizing(f64),
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelSpec::Identity => f.write_str("identity"),
            ChannelSpec::Dephasing(s) => write!(f, "dephasing({s})"),
            ChannelSpec::Depolarizing(s) => write!(f, "depolarizing({s})"),
        }
    }
}

/// Validated experiment description with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub kind: Kind,
    pub n: usize,
    pub p: Vec<f64>,
    /// Presence amplitudes swept over; `c2 = sqrt(1 - c1^2)`.
    pub c1: Vec<f64>,
    pub alpha: Vec<f64>,
    pub theta: Vec<f64>,
    /// `(n+1) x (n+1)` detector Gram matrix as `[re, im]` pairs, row-major.
    #[serde(serialize_with = "serialize_gram")]
    pub gram: GramMatrix,
    pub channel: ChannelSpec,
    pub quanton_dephasing: f64,
    pub r: f64,
    pub t: f64,
    pub overlap: Vec<f64>,
    pub overlap_phase: f64,
    pub seed: Option<u64>,
    pub samples: usize,
}

fn serialize_gram<S: serde::Serializer>(g: &GramMatrix, s: S) -> Result<S::Ok, S::Error> {
    let m = g.matrix();
    let rows: Vec<Vec<[f64; 2]>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    rows.serialize(s)
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    origin: Origin,
}

/// Accumulates raw entries from files and overrides, validated by [`ConfigBuilder::build`].
#[derive(Debug, Clone, Default)]
pub struct ConfigBuilder {
    entries: BTreeMap<String, Entry>,
    gram: BTreeMap<(usize, usize), Entry>,
}

const KEYS: &[&str] = &[
    "kind",
    "n",
    "p",
    "c1",
    "alpha",
    "theta",
    "theta_grid",
    "overlap",
    "overlap_phase",
    "channel",
    "quanton_dephasing",
    "r",
    "t",
    "seed",
    "samples",
];

impl ConfigBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            self.set_line(line, Origin::Line(idx + 1))?;
        }
        Ok(())
    }

    pub fn set_line(&mut self, line: &str, origin: Origin) -> Result<(), ConfigError> {
        let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { origin })?;
        self.set(key.trim(), value.trim(), origin)
    }

    pub fn set(&mut self, key: &str, value: &str, origin: Origin) -> Result<(), ConfigError> {
        let entry = Entry { value: value.to_string(), origin };
        if let Some(ij) = gram_key(key) {
            let (i, j) = ij.map_err(|reason| bad(key, origin, reason))?;
            self.gram.insert((i, j), entry);
            return Ok(());
        }
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey { key: key.to_string(), origin });
        }
        // `theta` and `theta_grid` name the same setting
        let key = if key == "theta_grid" { "theta" } else { key };
        self.entries.insert(key.to_string(), entry);
        Ok(())
    }

    /// Validates everything and fills defaults. `kind` overrides a missing
    /// `kind=` entry and must agree with a present one.
    pub fn build(&self, kind: Option<Kind>) -> Result<ExperimentSpec, ConfigError> {
        let configured = self.get("kind", |s| s.parse::<Kind>())?;
        let kind = match (kind, configured) {
            (Some(given), Some(configured)) if given != configured => {
                return Err(ConfigError::KindMismatch { given, configured })
            }
            (Some(k), _) | (None, Some(k)) => k,
            (None, None) => return Err(ConfigError::MissingKind),
        };

        let p_list = self.get("p", parse_list)?;
        let n = match self.get("n", parse_scalar::<usize>)? {
            Some(n) => n,
            None => p_list.as_ref().map_or(2, Vec::len),
        };
        if n < 2 {
            return Err(self.bad_at("n", "need at least two paths"));
        }
        let p = match p_list {
            Some(p) => {
                if p.len() != n {
                    return Err(self.bad_at("p", format!("{} probabilities for n = {n}", p.len())));
                }
                check_simplex(&p).map_err(|r| self.bad_at("p", r))?;
                p
            }
            None => vec![1.0 / n as f64; n],
        };

        let c1 = self.get("c1", parse_sweep)?.unwrap_or_else(|| vec![FRAC_1_SQRT_2]);
        if let Some(c) = c1.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(self.bad_at("c1", format!("amplitude {c} outside [0, 1]")));
        }
        let alpha = self.get("alpha", parse_sweep)?.unwrap_or_else(|| vec![FRAC_PI_4]);
        let theta = self.get("theta", parse_sweep)?.unwrap_or_else(|| grid(0.0, TAU, 64));
        let overlap = self.get("overlap", parse_sweep)?.unwrap_or_else(|| vec![0.5]);
        if let Some(o) = overlap.iter().find(|o| !(0.0..=1.0).contains(*o)) {
            return Err(self.bad_at("overlap", format!("modulus {o} outside [0, 1]")));
        }
        let overlap_phase = self.get("overlap_phase", parse_scalar::<f64>)?.unwrap_or(0.0);

        let gram = self.gram(n)?;
        let channel = self.get("channel", parse_channel)?.unwrap_or(ChannelSpec::Identity);
        let quanton_dephasing = self.get("quanton_dephasing", parse_scalar::<f64>)?.unwrap_or(0.0);
        if !(0.0..=1.0).contains(&quanton_dephasing) {
            return Err(self.bad_at("quanton_dephasing", "must lie in [0, 1]"));
        }
        let (r, t) = self.splitter()?;

        let seed = self.get("seed", parse_scalar::<u64>)?;
        let samples = self.get("samples", parse_scalar::<usize>)?.unwrap_or(1000);
        if kind == Kind::Verify && seed.is_none() {
            return Err(ConfigError::BadValue {
                key: "seed".into(),
                origin: Origin::Default,
                reason: "verify needs an explicit seed".into(),
            });
        }

        Ok(ExperimentSpec {
            kind,
            n,
            p,
            c1,
            alpha,
            theta,
            gram,
            channel,
            quanton_dephasing,
            r,
            t,
            overlap,
            overlap_phase,
            seed,
            samples,
        })
    }

    fn get<T>(
        &self,
        key: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<Option<T>, ConfigError> {
        self.entries
            .get(key)
            .map(|e| parse(&e.value).map_err(|reason| bad(key, e.origin, reason)))
            .transpose()
    }

    fn bad_at(&self, key: &str, reason: impl Into<String>) -> ConfigError {
        let origin = self.entries.get(key).map_or(Origin::Default, |e| e.origin);
        bad(key, origin, reason)
    }

    fn gram(&self, n: usize) -> Result<GramMatrix, ConfigError> {
        let dim = n + 1;
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for k in 0..dim {
            m[k * dim + k] = Complex64::new(1.0, 0.0);
        }
        let mut last = (String::from("d<i>_<j>"), Origin::Default);
        for (&(i, j), entry) in &self.gram {
            let key = format!("d{i}_{j}");
            if i >= dim || j >= dim {
                return Err(bad(&key, entry.origin, format!("index out of range for n = {n}")));
            }
            let z = parse_complex(&entry.value).map_err(|r| bad(&key, entry.origin, r))?;
            m[i * dim + j] = z;
            m[j * dim + i] = z.conj();
            if later(entry.origin, last.1) {
                last = (key, entry.origin);
            }
        }
        let matrix = ComplexMatrix::new(dim, dim, m).expect("square by construction");
        GramMatrix::new(matrix).map_err(|e| bad(&last.0, last.1, e.to_string()))
    }

    fn splitter(&self) -> Result<(f64, f64), ConfigError> {
        let r = self.get("r", parse_scalar::<f64>)?;
        let t = self.get("t", parse_scalar::<f64>)?;
        let check = |key: &str, x: f64| {
            if (0.0..=1.0).contains(&x) {
                Ok(x)
            } else {
                Err(self.bad_at(key, "amplitude outside [0, 1]"))
            }
        };
        Ok(match (r, t) {
            (None, None) => {
                let r = ((1.0 - 0.75f64.sqrt()) / 2.0).sqrt();
                (r, (1.0 - r * r).sqrt())
            }
            (Some(r), None) => (check("r", r)?, (1.0 - r * r).sqrt()),
            (None, Some(t)) => ((1.0 - check("t", t)? * t).sqrt(), t),
            (Some(r), Some(t)) => {
                check("r", r)?;
                check("t", t)?;
                if (r * r + t * t - 1.0).abs() > 1e-10 {
                    return Err(self.bad_at("t", "r^2 + t^2 must equal 1"));
                }
                (r, t)
            }
        })
    }
}

/// Parses a whole config file. The file must name its `kind`.
pub fn parse_config(text: &str) -> Result<ExperimentSpec, ConfigError> {
    let mut builder = ConfigBuilder::new();
    builder.apply_text(text)?;
    builder.build(None)
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn grid(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}

fn bad(key: &str, origin: Origin, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue { key: key.to_string(), origin, reason: reason.into() }
}

/// Whether `a` was applied after `b`: file lines, then `--set` options.
fn later(a: Origin, b: Origin) -> bool {
    match (a, b) {
        (Origin::Line(x), Origin::Line(y)) | (Origin::Set(x), Origin::Set(y)) => x > y,
        (Origin::Set(_), Origin::Line(_)) | (_, Origin::Default) => true,
        _ => false,
    }
}

/// `d<i>_<j>` with `i != j`; `None` when the key has a different shape.
fn gram_key(key: &str) -> Option<Result<(usize, usize), String>> {
    let rest = key.strip_prefix('d')?;
    let (i, j) = rest.split_once('_')?;
    let (i, j) = (i.parse::<usize>().ok()?, j.parse::<usize>().ok()?);
    Some(if i == j { Err("diagonal entries are fixed at 1".into()) } else { Ok((i, j)) })
}

fn parse_scalar<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    let v = s.trim().parse::<T>().map_err(|e| format!("`{s}`: {e}"))?;
    Ok(v)
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let x: f64 = parse_scalar(s)?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_f64).collect()
}

fn parse_sweep(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [_] => parse_list(s),
        [a, b, count] => Ok(grid(parse_f64(a)?, parse_f64(b)?, parse_scalar(count)?)),
        _ => Err(format!("`{s}` is neither a list nor start:stop:count")),
    }
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    match parse_list(s)?.as_slice() {
        [re] => Ok(Complex64::new(*re, 0.0)),
        [re, im] => Ok(Complex64::new(*re, *im)),
        _ => Err(format!("`{s}`: expected `re` or `re,im`")),
    }
}

fn parse_channel(s: &str) -> Result<ChannelSpec, String> {
    let s = s.trim();
    if s == "identity" {
        return Ok(ChannelSpec::Identity);
    }
    let (name, rest) = s.split_once('(').ok_or_else(|| format!("unknown channel `{s}`"))?;
    let arg = rest.strip_suffix(')').ok_or_else(|| format!("unclosed `(` in `{s}`"))?;
    let strength = parse_f64(arg)?;
    if !(0.0..=1.0).contains(&strength) {
        return Err(format!("strength {strength} outside [0, 1]"));
    }
    match name.trim() {
        "dephasing" => Ok(ChannelSpec::Dephasing(strength)),
        "depolarizing" => Ok(ChannelSpec::Depolarizing(strength)),
        other => Err(format!("unknown channel `{other}`")),
    }
}

fn check_simplex(p: &[f64]) -> Result<(), String> {
    if let Some(x) = p.iter().find(|x| **x < 0.0) {
        return Err(format!("negative probability {x}"));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(format!("probabilities sum to {total}, not 1"));
    }
    Ok(())
}
