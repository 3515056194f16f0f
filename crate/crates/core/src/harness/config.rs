//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comments run to the end of the line
//! experiment = crossings
//! grid_size = 256
//! epsilon_list = 0.25, 0.125
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::crossings::{max_scan_depth, MIN_SCAN_RADIUS};
use crate::error::{LabError, Result};
use crate::lfpp::fmt as ffmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Field,
    Geodesic,
    Ball,
    Sle,
    Crossings,
    Scales,
    Dimension,
    Removability,
    Compare,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Field,
        Experiment::Geodesic,
        Experiment::Ball,
        Experiment::Sle,
        Experiment::Crossings,
        Experiment::Scales,
        Experiment::Dimension,
        Experiment::Removability,
        Experiment::Compare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Field => "field",
            Experiment::Geodesic => "geodesic",
            Experiment::Ball => "ball",
            Experiment::Sle => "sle",
            Experiment::Crossings => "crossings",
            Experiment::Scales => "scales",
            Experiment::Dimension => "dimension",
            Experiment::Removability => "removability",
            Experiment::Compare => "compare",
        }
    }

    fn uses_field(self) -> bool {
        !matches!(self, Experiment::Sle)
    }

    fn uses_trace(self) -> bool {
        matches!(self, Experiment::Sle | Experiment::Compare)
    }

    fn uses_annuli(self) -> bool {
        matches!(self, Experiment::Sle | Experiment::Crossings | Experiment::Compare)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| validation("experiment", format!("unknown experiment `{s}`")))
    }
}

fn validation(field: &str, message: impl Into<String>) -> LabError {
    LabError::Validation {
        field: field.into(),
        message: message.into(),
    }
}

fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| validation(line, format!("line {}: expected `key = value`", lineno + 1)))?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

/// Every setting of a run. Lengths are in plane units, `dt` and `horizon` in
/// Loewner capacity time.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub grid_size: usize,
    pub spacing: f64,
    pub xi: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub epsilon_list: Vec<f64>,
    pub alpha: f64,
    pub k: usize,
    pub m: f64,
    pub c: f64,
    pub dt: f64,
    pub horizon: f64,
    pub replicas: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
}

pub const KEYS: [&str; 16] = [
    "experiment",
    "grid_size",
    "spacing",
    "xi",
    "gamma",
    "kappa",
    "epsilon_list",
    "alpha",
    "K",
    "M",
    "c",
    "dt",
    "horizon",
    "replicas",
    "seed",
    "output_dir",
];

/// Without an explicit `spacing` the lattice spans this width.
pub const DEFAULT_EXTENT: f64 = 4.0;

impl ExperimentConfig {
    /// Defaults for every key but `experiment`; `spacing` follows
    /// `grid_size` so the lattice is [`DEFAULT_EXTENT`] wide.
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            grid_size: 128,
            spacing: DEFAULT_EXTENT / 128.0,
            xi: 0.41,
            gamma: (8.0f64 / 3.0).sqrt(),
            kappa: 6.0,
            epsilon_list: vec![0.5, 0.25],
            alpha: 1.2,
            k: 2,
            m: 4.0,
            c: 16.0,
            dt: 1e-5,
            horizon: 0.01,
            replicas: 1,
            seed: 0,
            output_dir: PathBuf::from("lab-out"),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        ExperimentConfig::from_pairs(&parse_pairs(text)?)
    }

    /// Parses a config file for a given experiment; the file may omit the
    /// `experiment` key but must not name a different one.
    pub fn parse_for(experiment: Experiment, text: &str) -> Result<Self> {
        let mut pairs = parse_pairs(text)?;
        match pairs.iter().find(|(k, _)| k == "experiment") {
            Some((_, v)) if v != experiment.name() => {
                return Err(validation(
                    "experiment",
                    format!("config file is for `{v}`, not `{experiment}`"),
                ))
            }
            Some(_) => {}
            None => pairs.push(("experiment".into(), experiment.name().into())),
        }
        ExperimentConfig::from_pairs(&pairs)
    }

    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self> {
        let mut seen: Vec<&str> = Vec::new();
        for (k, _) in pairs {
            if !KEYS.contains(&k.as_str()) {
                return Err(validation(k, "unknown key"));
            }
            if seen.contains(&k.as_str()) {
                return Err(validation(k, "key given twice"));
            }
            seen.push(k);
        }
        let get = |key: &str| pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let experiment: Experiment = get("experiment")
            .ok_or_else(|| validation("experiment", "missing"))?
            .parse()?;
        let mut cfg = ExperimentConfig::new(experiment);
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| validation(key, format!("cannot parse `{v}`")))
        }
        for (key, v) in pairs {
            let v = v.as_str();
            match key.as_str() {
                "experiment" => {}
                "grid_size" => cfg.grid_size = num(key, v)?,
                "spacing" => cfg.spacing = num(key, v)?,
                "xi" => cfg.xi = num(key, v)?,
                "gamma" => cfg.gamma = num(key, v)?,
                "kappa" => cfg.kappa = num(key, v)?,
                "epsilon_list" => {
                    cfg.epsilon_list = v.split(',').map(|s| num::<f64>(key, s.trim())).collect::<Result<_>>()?
                }
                "alpha" => cfg.alpha = num(key, v)?,
                "K" => cfg.k = num(key, v)?,
                "M" => cfg.m = num(key, v)?,
                "c" => cfg.c = num(key, v)?,
                "dt" => cfg.dt = num(key, v)?,
                "horizon" => cfg.horizon = num(key, v)?,
                "replicas" => cfg.replicas = num(key, v)?,
                "seed" => cfg.seed = num(key, v)?,
                "output_dir" => cfg.output_dir = PathBuf::from(v),
                _ => unreachable!(),
            }
        }
        if get("spacing").is_none() {
            cfg.spacing = DEFAULT_EXTENT / cfg.grid_size as f64;
        }
        Ok(cfg)
    }

    /// Canonical `(key, value)` list; floats use their shortest round-trip
    /// form, so parsing it back gives an identical config.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let eps = self
            .epsilon_list
            .iter()
            .map(|&e| ffmt(e))
            .collect::<Vec<_>>()
            .join(", ");
        [
            ("experiment", self.experiment.name().to_string()),
            ("grid_size", self.grid_size.to_string()),
            ("spacing", ffmt(self.spacing)),
            ("xi", ffmt(self.xi)),
            ("gamma", ffmt(self.gamma)),
            ("kappa", ffmt(self.kappa)),
            ("epsilon_list", eps),
            ("alpha", ffmt(self.alpha)),
            ("K", self.k.to_string()),
            ("M", ffmt(self.m)),
            ("c", ffmt(self.c)),
            ("dt", ffmt(self.dt)),
            ("horizon", ffmt(self.horizon)),
            ("replicas", self.replicas.to_string()),
            ("seed", self.seed.to_string()),
            ("output_dir", self.output_dir.display().to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    pub fn to_text(&self) -> String {
        self.to_pairs()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// Half-width of the lattice.
    pub fn half_width(&self) -> f64 {
        self.spacing * (self.grid_size as f64 - 1.0) / 2.0
    }

    /// Base radius of scale scans: the first scale's annuli reach out to
    /// `7/8` of the half-width.
    pub fn scan_base_radius(&self) -> f64 {
        2.0 * self.half_width()
    }

    /// Checks every precondition the experiment will meet, reporting the
    /// first offending key.
    pub fn validate(&self) -> Result<()> {
        let e = self.experiment;
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(validation(key, format!("must be positive, got {v}")))
            }
        };
        if self.replicas == 0 {
            return Err(validation("replicas", "must be at least 1"));
        }
        if !(self.gamma > 0.0 && self.gamma < 2.0) {
            return Err(validation("gamma", format!("must lie in (0, 2), got {}", self.gamma)));
        }
        if e.uses_field() {
            if self.grid_size < crate::grf::MIN_GRID_SIZE || self.grid_size > 4096 {
                return Err(validation(
                    "grid_size",
                    format!("must lie in [8, 4096], got {}", self.grid_size),
                ));
            }
            positive("spacing", self.spacing)?;
            positive("xi", self.xi)?;
            // the whole-plane normalization averages over the unit circle
            if self.half_width() <= 1.0 + 2.0 * self.spacing {
                return Err(validation(
                    "spacing",
                    format!(
                        "grid half-width {} must exceed 1 so the unit circle fits",
                        self.half_width()
                    ),
                ));
            }
        }
        if e.uses_trace() {
            if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
                return Err(validation("kappa", format!("must be nonnegative, got {}", self.kappa)));
            }
            positive("dt", self.dt)?;
            if !(self.horizon >= self.dt && self.horizon.is_finite()) {
                return Err(validation("horizon", format!("must be at least dt = {}", self.dt)));
            }
        }
        if e.uses_annuli() {
            if !(self.alpha > 1.0 && self.alpha.is_finite()) {
                return Err(validation("alpha", format!("must exceed 1, got {}", self.alpha)));
            }
            if self.epsilon_list.is_empty() {
                return Err(validation("epsilon_list", "must not be empty"));
            }
            for &eps in &self.epsilon_list {
                if !(eps > 0.0 && eps < 1.0) {
                    return Err(validation(
                        "epsilon_list",
                        format!("values must lie in (0, 1), got {eps}"),
                    ));
                }
                if e != Experiment::Sle && !(eps.powf(self.alpha) > 4.0 * self.spacing) {
                    return Err(validation(
                        "epsilon_list",
                        format!(
                            "epsilon = {eps} gives inner radius {} not above 4 x spacing",
                            eps.powf(self.alpha)
                        ),
                    ));
                }
            }
        }
        if e == Experiment::Scales {
            positive("c", self.c)?;
            positive("M", self.m)?;
            let feasible = max_scan_depth(self.scan_base_radius(), self.spacing);
            if self.k == 0 || self.k > feasible {
                return Err(validation(
                    "K",
                    format!(
                        "must lie in [1, {feasible}] so the smallest radius stays above {MIN_SCAN_RADIUS} lattice spacings"
                    ),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_round_trips() {
        let cfg = ExperimentConfig::parse(
            "# run\nexperiment = crossings\ngrid_size = 256 # lattice\nepsilon_list = 0.5, 0.25\nK = 4\nseed = 9\n",
        )
        .unwrap();
        assert_eq!(cfg.experiment, Experiment::Crossings);
        assert_eq!(cfg.grid_size, 256);
        assert_eq!(cfg.epsilon_list, vec![0.5, 0.25]);
        assert_eq!(cfg.k, 4);
        assert_eq!(ExperimentConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn rejects_unknown_and_repeated_keys() {
        let e = ExperimentConfig::parse("experiment = field\nfoo = 1\n").unwrap_err();
        assert!(matches!(e, LabError::Validation { ref field, .. } if field == "foo"));
        let e = ExperimentConfig::parse("experiment = field\nxi = 1\nxi = 2\n").unwrap_err();
        assert!(matches!(e, LabError::Validation { ref field, .. } if field == "xi"));
        assert!(ExperimentConfig::parse("grid_size = 8\n").is_err());
        assert!(ExperimentConfig::parse("experiment = nope\n").is_err());
    }

    #[test]
    fn validation_names_the_field() {
        let mut cfg = ExperimentConfig::new(Experiment::Field);
        cfg.gamma = 3.0;
        assert!(matches!(cfg.validate(), Err(LabError::Validation { ref field, .. }) if field == "gamma"));
        let mut cfg = ExperimentConfig::new(Experiment::Scales);
        cfg.k = 9;
        assert!(matches!(cfg.validate(), Err(LabError::Validation { ref field, .. }) if field == "K"));
        assert!(ExperimentConfig::new(Experiment::Compare).validate().is_ok());
    }
}
