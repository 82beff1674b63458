use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifier::{KernelKind, DEFAULT_DELTA};
use crate::error::{Error, Result};
use crate::fuzzy_rough::{Implicator, ScoreMode, TNorm};
use crate::metrics::MetricConvention;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DataFormat {
    Csv,
    Keel,
}

impl FromStr for DataFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(DataFormat::Csv),
            "keel" | "dat" => Ok(DataFormat::Keel),
            other => Err(Error::Parameter(format!("unknown data format {other:?}"))),
        }
    }
}

impl DataFormat {
    /// `.dat` files are KEEL, everything else CSV.
    pub fn guess(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("dat") => DataFormat::Keel,
            _ => DataFormat::Csv,
        }
    }
}

/// Everything a cross-validation run needs besides the data itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: Option<PathBuf>,
    pub format: Option<DataFormat>,
    pub positive_label: String,
    pub tau: Vec<f64>,
    pub gamma: Vec<f64>,
    pub c1: Vec<f64>,
    /// Ignored unless `untie_c`; otherwise `c2 = c1` at every grid point.
    pub c2: Vec<f64>,
    pub untie_c: bool,
    pub sigma: Vec<f64>,
    pub kernel: KernelKind,
    pub delta: f64,
    pub tnorm: TNorm,
    pub implicator: Implicator,
    pub score_mode: ScoreMode,
    pub subsample: bool,
    pub weights: bool,
    pub folds: usize,
    /// Inner grid-search folds; `folds - 1` when unset.
    pub inner_folds: Option<usize>,
    pub repeats: usize,
    pub seed: u64,
    pub metric_convention: MetricConvention,
    /// 0 means one worker per available core. Left out of result files,
    /// which must not depend on scheduling.
    #[serde(skip)]
    pub workers: usize,
}

pub fn default_tau_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 * 0.05).map(round12).collect()
}

pub fn default_gamma_grid() -> Vec<f64> {
    (1..=20).map(|i| i as f64 * 0.1).map(round12).collect()
}

pub fn default_c_grid() -> Vec<f64> {
    (-4..=4).map(|i| 2f64.powi(2 * i)).collect()
}

pub fn default_sigma_grid() -> Vec<f64> {
    (-4..=4).map(|i| 2f64.powi(i)).collect()
}

/// Snaps `0.1 * 3` and friends onto the decimal a user would type.
fn round12(v: f64) -> f64 {
    (v * 1e12).round() / 1e12
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            format: None,
            positive_label: "positive".into(),
            tau: default_tau_grid(),
            gamma: default_gamma_grid(),
            c1: default_c_grid(),
            c2: default_c_grid(),
            untie_c: false,
            sigma: default_sigma_grid(),
            kernel: KernelKind::Linear,
            delta: DEFAULT_DELTA,
            tnorm: TNorm::Minimum,
            implicator: Implicator::Lukasiewicz,
            score_mode: ScoreMode::Density,
            subsample: true,
            weights: true,
            folds: 10,
            inner_folds: None,
            repeats: 10,
            seed: 0,
            metric_convention: MetricConvention::Standard,
            workers: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn kernel_name(&self) -> &'static str {
        match self.kernel {
            KernelKind::Linear => "linear",
            KernelKind::Gaussian => "gaussian",
        }
    }

    /// Applies one `key = value` assignment. Keys accept `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        let bad = |what: &str| Error::Config(format!("{key}: {what} {value:?}"));
        match key.as_str() {
            "dataset" => self.dataset = Some(PathBuf::from(value)),
            "format" => self.format = Some(value.parse().map_err(|_| bad("unknown format"))?),
            "positive_label" => self.positive_label = value.to_string(),
            "tau" => self.tau = parse_list(&key, value)?,
            "gamma" => self.gamma = parse_list(&key, value)?,
            "c1" | "c" => self.c1 = parse_list(&key, value)?,
            "c2" => self.c2 = parse_list(&key, value)?,
            "untie_c" => self.untie_c = parse_bool(&key, value)?,
            "sigma" => self.sigma = parse_list(&key, value)?,
            "kernel" => self.kernel = value.parse().map_err(|_| bad("unknown kernel"))?,
            "delta" => self.delta = parse_scalar(&key, value)?,
            "tnorm" => self.tnorm = value.parse().map_err(|_| bad("unknown t-norm"))?,
            "implicator" => self.implicator = value.parse().map_err(|_| bad("unknown implicator"))?,
            "score_mode" => self.score_mode = value.parse().map_err(|_| bad("unknown score mode"))?,
            "subsample" => self.subsample = parse_bool(&key, value)?,
            "weights" => self.weights = parse_bool(&key, value)?,
            "folds" | "k" => self.folds = parse_scalar(&key, value)?,
            "inner_folds" => self.inner_folds = Some(parse_scalar(&key, value)?),
            "repeats" => self.repeats = parse_scalar(&key, value)?,
            "seed" => self.seed = parse_scalar(&key, value)?,
            "metric_convention" => self.metric_convention = value.parse().map_err(|_| bad("unknown convention"))?,
            "workers" => self.workers = parse_scalar(&key, value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let grid = |name: &str, v: &[f64], ok: &dyn Fn(f64) -> bool, range: &str| -> Result<()> {
            if v.is_empty() {
                return Err(Error::Config(format!("{name}: grid is empty")));
            }
            match v.iter().find(|&&x| !ok(x)) {
                Some(x) => Err(Error::Config(format!("{name}: {x} is outside {range}"))),
                None => Ok(()),
            }
        };
        let pos = |x: f64| x > 0.0 && x.is_finite();
        grid("tau", &self.tau, &|x| (0.0..=1.0).contains(&x), "[0, 1]")?;
        grid("gamma", &self.gamma, &pos, "(0, inf)")?;
        grid("c1", &self.c1, &pos, "(0, inf)")?;
        if self.untie_c {
            grid("c2", &self.c2, &pos, "(0, inf)")?;
        }
        if self.kernel == KernelKind::Gaussian {
            grid("sigma", &self.sigma, &pos, "(0, inf)")?;
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::Config(format!("delta: {} is outside [0, inf)", self.delta)));
        }
        if self.folds < 2 {
            return Err(Error::Config(format!("folds: {} is below 2", self.folds)));
        }
        if self.inner_folds.is_some_and(|k| k < 2) {
            return Err(Error::Config("inner_folds: must be at least 2".into()));
        }
        if self.repeats < 1 {
            return Err(Error::Config("repeats: must be at least 1".into()));
        }
        Ok(())
    }
}

fn parse_scalar<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected a boolean, got {value:?}"))),
    }
}

/// Comma-separated reals; `2^k` is accepted as a power of two.
pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let v = match t.split_once('^') {
                Some((base, exp)) => {
                    let b: f64 = parse_scalar(key, base.trim())?;
                    let e: i32 = parse_scalar(key, exp.trim())?;
                    b.powi(e)
                }
                None => parse_scalar(key, t)?,
            };
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Config(format!("{key}: {t:?} is not finite")))
            }
        })
        .collect()
}

/// Parses a flat `key = value` file; `#` starts a comment. Returns the
/// assignments in file order so command-line flags can be layered on top.
pub fn parse_assignments(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Parses and validates a config file body on top of the defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    for (k, v) in parse_assignments(text)? {
        cfg.set(&k, &v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.tau.len(), 21);
        assert_eq!((c.tau[0], c.tau[20]), (0.0, 1.0));
        assert_eq!(c.tau[3], 0.15);
        assert_eq!(c.gamma.len(), 20);
        assert_eq!((c.gamma[0], c.gamma[2], c.gamma[19]), (0.1, 0.3, 2.0));
        assert_eq!(c.c1.first(), Some(&(1.0 / 256.0)));
        assert_eq!(c.c1.last(), Some(&256.0));
        assert_eq!(c.c1.len(), 9);
        assert_eq!(c.sigma, vec![0.0625, 0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0]);
        assert_eq!(c.delta, 1e-6);
        assert_eq!((c.folds, c.repeats), (10, 10));
    }

    #[test]
    fn lists_and_comments() {
        let c = parse_config("# grid\ntau = 0.2,0.4\nc1 = 2^-2, 1 # inline\nseed=7\n").unwrap();
        assert_eq!(c.tau, vec![0.2, 0.4]);
        assert_eq!(c.c1, vec![0.25, 1.0]);
        assert_eq!(c.seed, 7);
    }

    #[test]
    fn errors_name_the_key() {
        let e = parse_config("gamma = -1").unwrap_err().to_string();
        assert!(e.contains("gamma"), "{e}");
        let e = parse_config("gamme = 1").unwrap_err().to_string();
        assert!(e.contains("gamme"), "{e}");
        assert!(parse_config("folds = two").is_err());
        assert!(parse_config("tau = 1.5").is_err());
        assert!(parse_config("tau =").is_err());
        assert!(parse_config("folds = 1").is_err());
        assert!(parse_config("just words").is_err());
        assert!(parse_config("kernel = poly").is_err());
    }
}
