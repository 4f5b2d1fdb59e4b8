//! Experiment configuration.
//!
//! The file is flat `key = value` text in TOML syntax; every key is optional.
//!
//! | key             | type          | default            | meaning                                        |
//! |-----------------|---------------|--------------------|------------------------------------------------|
//! | `n`             | integer       | 1                  | spatial dimension, 1 or 2                      |
//! | `N`             | integer       | 256 (n=1), 64 (n=2)| samples per axis, a power of two >= 8          |
//! | `L`             | float         | `2 pi N / 8`       | box side length                                |
//! | `k`             | integer       | 2                  | matrix size of the coefficient algebra         |
//! | `theta`         | float         | 0                  | scale of the standard symplectic form          |
//! | `J`             | float array   | none               | explicit row-major entries, replaces `theta`   |
//! | `m_list`        | integer array | all admissible `m` | mollifier sweep, strictly increasing           |
//! | `seed`          | integer       | 1                  | seed for every random ensemble                 |
//! | `samples`       | integer       | 20                 | random cases per identity                      |
//! | `probes`        | integer       | 16                 | probe pairs for the commutant test             |
//! | `probe_band`    | integer       | `min(16, N / 8)`   | frequency band of probes and test functions    |
//! | `rank_one_band` | integer       | see below          | band of the rank-one operators and their probes|
//! | `tol`           | float         | 1e-8               | conjecture tolerance                           |
//! | `floor`         | float         | 0.1                | lowest residual accepted for a rejection       |
//! | `exact_gate`    | float         | 1e-12              | gate for Plancherel, Weyl, undeformed, inverse |
//! | `identity_gate` | float         | 1e-10              | gate for homomorphism, involution, adjoint     |
//! | `approx_gate`   | float         | 1e-3               | final `||L_e g - g|| / ||g||`                  |
//! | `decay_gate`    | float         | 1e-2               | final/initial derivation norm                  |
//! | `symbol_gate`   | float         | 1e-3               | final/initial symbol deviation                 |
//! | `out`           | string        | `rieffel-out`      | output directory                               |
//!
//! A rank-one residual scales like `1 / sqrt(modes)` in the probe band, so
//! `rank_one_band` defaults to the widest band with at most 33 modes (16 on a
//! line, 2 in the plane), the mode count at which `floor` was calibrated.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rieffel_core::grid::{SkewForm, TorusGrid};
use rieffel_core::mollifier::MollifierFamily;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

/// The file as written, before defaults that depend on other keys.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct RawConfig {
    n: Option<usize>,
    N: Option<usize>,
    L: Option<f64>,
    k: Option<usize>,
    theta: Option<f64>,
    J: Option<Vec<f64>>,
    m_list: Option<Vec<usize>>,
    seed: Option<u64>,
    samples: Option<usize>,
    probes: Option<usize>,
    probe_band: Option<usize>,
    rank_one_band: Option<usize>,
    tol: Option<f64>,
    floor: Option<f64>,
    exact_gate: Option<f64>,
    identity_gate: Option<f64>,
    approx_gate: Option<f64>,
    decay_gate: Option<f64>,
    symbol_gate: Option<f64>,
    out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Gates {
    pub tol: f64,
    pub floor: f64,
    pub exact: f64,
    pub identity: f64,
    pub approx: f64,
    pub decay: f64,
    pub symbol: f64,
}

/// A validated configuration with every default filled in.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub n: usize,
    #[serde(rename = "N")]
    pub points: usize,
    #[serde(rename = "L")]
    pub length: f64,
    pub k: usize,
    #[serde(rename = "J")]
    pub skew: Vec<f64>,
    pub m_list: Vec<usize>,
    pub seed: u64,
    pub samples: usize,
    pub probes: usize,
    pub probe_band: usize,
    pub rank_one_band: usize,
    pub gates: Gates,
    /// Left out of reports so that runs into different directories compare equal.
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    grid: TorusGrid,
    #[serde(skip)]
    form: SkewForm,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Self::resolve(toml::from_str(text)?)
    }

    pub fn defaults() -> Self {
        Self::resolve(RawConfig::default()).expect("defaults are valid")
    }

    fn resolve(raw: RawConfig) -> Result<Self, ConfigError> {
        let n = raw.n.unwrap_or(1);
        if !(1..=2).contains(&n) {
            return invalid(format!("n must be 1 or 2, got {n}"));
        }
        let points = raw.N.unwrap_or(if n == 1 { 256 } else { 64 });
        if points < 8 || !points.is_power_of_two() {
            return invalid(format!("N must be a power of two >= 8, got {points}"));
        }
        let length = raw.L.unwrap_or(2.0 * PI * (points / 8) as f64);
        let grid = TorusGrid::new(n, points, length).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let k = raw.k.unwrap_or(2);
        if !(1..=8).contains(&k) {
            return invalid(format!("k must be in 1..=8, got {k}"));
        }

        let form = match (raw.theta, raw.J) {
            (Some(_), Some(_)) => return invalid("give either theta or J, not both"),
            (_, Some(entries)) => SkewForm::new(n, entries).map_err(|e| ConfigError::Invalid(format!("J: {e}")))?,
            (theta, None) => {
                let theta = theta.unwrap_or(0.0);
                if !theta.is_finite() {
                    return invalid("theta must be finite");
                }
                if n == 1 && theta != 0.0 {
                    return invalid("a nonzero theta needs n = 2; every skew form on a line is zero");
                }
                SkewForm::symplectic(n, theta)
            }
        };

        let family = MollifierFamily::new(&grid);
        let m_list = match raw.m_list {
            Some(list) => {
                if list.is_empty() {
                    return invalid("m_list is empty");
                }
                if list.windows(2).any(|w| w[1] <= w[0]) {
                    return invalid("m_list must be strictly increasing");
                }
                for &m in &list {
                    if family.check_admissible(m).is_err() {
                        return invalid(format!(
                            "m = {m} is not admissible on this grid (1..={})",
                            family.max_admissible()
                        ));
                    }
                }
                list
            }
            None => family.admissible_range(),
        };
        if m_list.is_empty() {
            return invalid("the grid admits no mollifier index; increase L");
        }

        let positive = |name: &str, v: Option<usize>, default: usize| -> Result<usize, ConfigError> {
            match v.unwrap_or(default) {
                0 => invalid(format!("{name} must be positive")),
                v => Ok(v),
            }
        };
        let samples = positive("samples", raw.samples, 20)?;
        let probes = positive("probes", raw.probes, 16)?;
        let probe_band = positive("probe_band", raw.probe_band, (points / 8).min(16))?;
        let calibrated = (1..=points / 2).take_while(|b| (2 * b + 1).pow(n as u32) <= 33).last().unwrap_or(1);
        let rank_one_band = positive("rank_one_band", raw.rank_one_band, calibrated)?;
        for (name, band) in [("probe_band", probe_band), ("rank_one_band", rank_one_band)] {
            if band > points / 2 {
                return invalid(format!("{name} must be at most N/2 = {}", points / 2));
            }
        }

        let gate = |name: &str, v: Option<f64>, default: f64| -> Result<f64, ConfigError> {
            let v = v.unwrap_or(default);
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                invalid(format!("{name} must be positive and finite, got {v}"))
            }
        };
        let gates = Gates {
            tol: gate("tol", raw.tol, 1e-8)?,
            floor: gate("floor", raw.floor, 0.1)?,
            exact: gate("exact_gate", raw.exact_gate, 1e-12)?,
            identity: gate("identity_gate", raw.identity_gate, 1e-10)?,
            approx: gate("approx_gate", raw.approx_gate, 1e-3)?,
            decay: gate("decay_gate", raw.decay_gate, 1e-2)?,
            symbol: gate("symbol_gate", raw.symbol_gate, 1e-3)?,
        };

        Ok(ExperimentConfig {
            n,
            points,
            length,
            k,
            skew: form.entries().to_vec(),
            m_list,
            seed: raw.seed.unwrap_or(1),
            samples,
            probes,
            probe_band,
            rank_one_band,
            gates,
            out: raw.out.unwrap_or_else(|| PathBuf::from("rieffel-out")),
            grid,
            form,
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn form(&self) -> &SkewForm {
        &self.form
    }
}
