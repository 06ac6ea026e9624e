//! Experiment configuration: a single JSON document per run.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use quasifix::{DomainBox, MapSpec, QuasiNormSpec, SampleConfig, SolverConfig, Vector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Solve,
    Asymptotic,
    Maia,
    Estimate,
    VerifyNorm,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Solve => "solve",
            Mode::Asymptotic => "asymptotic",
            Mode::Maia => "maia",
            Mode::Estimate => "estimate",
            Mode::VerifyNorm => "verify_norm",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `{"b": .., "theta": ..}`, `{"b": ..}` or `{"b_grid": [..]}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_grid: Option<Vec<f64>>,
}

/// An explicit point or `"random:<seed>"`.
#[derive(Debug, Clone, PartialEq)]
pub enum StartPoint {
    Fixed(Vector),
    Random { seed: u64 },
}

impl FromStr for StartPoint {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let seed = s
            .strip_prefix("random:")
            .ok_or_else(|| format!("expected \"random:<seed>\", got {s:?}"))?;
        seed.parse()
            .map(|seed| StartPoint::Random { seed })
            .map_err(|_| format!("bad seed in {s:?}"))
    }
}

impl Serialize for StartPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            StartPoint::Fixed(v) => v.serialize(s),
            StartPoint::Random { seed } => s.serialize_str(&format!("random:{seed}")),
        }
    }
}

impl<'de> Deserialize<'de> for StartPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Point(Vector),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Point(v) => Ok(StartPoint::Fixed(v)),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    /// The measured norm; in `maia` mode the complete (dominated) one.
    pub norm: QuasiNormSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<StartPoint>,
    #[serde(default)]
    pub solver: SolverConfig,
    /// `maia` mode: the norm in which the map is enriched.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_norm: Option<QuasiNormSpec>,
    /// `asymptotic` mode: the iterate power `N`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_iterate: Option<usize>,
    #[serde(default)]
    pub samples: SampleConfig,
    /// Ambient dimension when neither the norm, map nor x0 pins it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// `solve` mode: additionally solve from this many seeded random starts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniqueness_starts: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn map(&self) -> Result<&MapSpec, RunError> {
        self.map
            .as_ref()
            .ok_or_else(|| RunError::Config(format!("mode {} requires \"map\"", self.mode)))
    }

    fn validate(&self) -> Result<(), RunError> {
        let bad = |m: String| Err(RunError::Config(m));
        self.solver
            .validate()
            .map_err(|e| RunError::Config(e.to_string()))?;
        self.samples
            .validate()
            .map_err(|e| RunError::Config(e.to_string()))?;
        match self.mode {
            Mode::Solve | Mode::Asymptotic | Mode::Maia => {
                self.map()?;
                if self.x0.is_none() {
                    return bad(format!("mode {} requires \"x0\"", self.mode));
                }
            }
            Mode::Estimate => {
                self.map()?;
            }
            Mode::VerifyNorm => {}
        }
        if self.mode == Mode::Asymptotic && self.n_iterate.unwrap_or(0) == 0 {
            return bad("mode asymptotic requires \"n_iterate\" >= 1".into());
        }
        if self.mode == Mode::Maia && self.second_norm.is_none() {
            return bad("mode maia requires \"second_norm\"".into());
        }
        if let Some(p) = &self.params {
            if p.b_grid.is_some() && (p.b.is_some() || p.theta.is_some()) {
                return bad("params takes either b/theta or b_grid, not both".into());
            }
            if p.theta.is_some() && p.b.is_none() {
                return bad("params.theta requires params.b".into());
            }
            if matches!(&p.b_grid, Some(g) if g.is_empty()) {
                return bad("params.b_grid must not be empty".into());
            }
        }
        self.dim()?;
        Ok(())
    }

    /// Ambient dimension; every source that pins it must agree.
    pub fn dim(&self) -> Result<usize, RunError> {
        let sources = [
            (
                "x0",
                match &self.x0 {
                    Some(StartPoint::Fixed(v)) => Some(v.dim()),
                    _ => None,
                },
            ),
            ("map", self.map.as_ref().and_then(MapSpec::dim)),
            ("norm", self.norm.dim()),
            (
                "second_norm",
                self.second_norm.as_ref().and_then(QuasiNormSpec::dim),
            ),
            ("dim", self.dim),
        ];
        let mut found: Option<(&str, usize)> = None;
        for (name, d) in sources {
            if let Some(d) = d {
                match found {
                    Some((other, n)) if n != d => {
                        return Err(RunError::Config(format!(
                            "dimension conflict: {other} has {n}, {name} has {d}"
                        )))
                    }
                    None => found = Some((name, d)),
                    _ => {}
                }
            }
        }
        match found {
            Some((_, 0)) => Err(RunError::Config("dimension must be at least 1".into())),
            Some((_, d)) => Ok(d),
            None if self.mode == Mode::VerifyNorm => Ok(2),
            None => Err(RunError::Config(
                "cannot infer the dimension; set \"dim\" or give x0 explicitly".into(),
            )),
        }
    }

    /// Region used for random starts and sampled pairs.
    pub fn sampling_box(&self) -> Result<DomainBox, RunError> {
        let dim = self.dim()?;
        Ok(match self.map.as_ref().and_then(MapSpec::domain) {
            Some(bx) => bx.clone(),
            None => self.samples.cube(dim),
        })
    }

    pub fn start_point(&self) -> Result<Vector, RunError> {
        match &self.x0 {
            Some(StartPoint::Fixed(v)) => Ok(v.clone()),
            Some(StartPoint::Random { seed }) => {
                Ok(
                    quasifix::quasi_space::uniform_in_box(&self.sampling_box()?, 1, *seed)
                        .remove(0),
                )
            }
            None => Err(RunError::Config("missing \"x0\"".into())),
        }
    }
}
