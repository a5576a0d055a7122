use std::fmt;
use std::path::PathBuf;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ball::{BallFamily, BallSpec};
use crate::error::{Error, Result};
use crate::oracle::{BruteForceConfig, DEFAULT_SEED};
use crate::width::{LogBase, WidthQuery};

/// An exponent in `[1, inf]`, written as a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(v) => v,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    /// `1/p`, with `inf` mapped to 0.
    pub fn inverse(self) -> f64 {
        match self {
            Exponent::Finite(v) => 1.0 / v,
            Exponent::Infinite => 0.0,
        }
    }

    fn is_valid(self) -> bool {
        match self {
            Exponent::Finite(v) => v.is_finite() && v >= 1.0,
            Exponent::Infinite => true,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(v) => write!(f, "{v}"),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(v) => s.serialize_f64(*v),
            Exponent::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct ExponentVisitor;

        impl Visitor<'_> for ExponentVisitor {
            type Value = Exponent;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Ok(Exponent::Finite(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                Ok(Exponent::Finite(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                Ok(Exponent::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                match v {
                    "inf" => Ok(Exponent::Infinite),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }

        d.deserialize_any(ExponentVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Estimate,
    Normalize,
    Check,
    Sandwich,
    Sweep,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Command::Estimate => "estimate",
            Command::Normalize => "normalize",
            Command::Check => "check",
            Command::Sandwich => "sandwich",
            Command::Sweep => "sweep",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallEntry {
    pub p: Exponent,
    pub nu: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxes {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Exponent>>,
    /// Attach coordinate/inscribed bounds (and the grid search when enabled) to each row.
    #[serde(default)]
    pub sandwich: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// A validated run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(rename = "N")]
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Exponent>,
    pub balls: Vec<BallEntry>,
    #[serde(default)]
    pub auto_normalize: bool,
    #[serde(default)]
    pub log_base: LogBase,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Grid search resolution; its seed comes from `seed`.
    #[serde(default)]
    pub resolution: BruteForceConfig,
    /// Run the grid search in `sandwich` (and sweeps with bounds) when `N <= 4`, `n <= 2`.
    #[serde(default)]
    pub brute_force: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepAxes>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl RunConfig {
    /// Family built from the configured balls in dimension `dim`.
    pub fn family(&self, dim: usize) -> Result<BallFamily> {
        let balls = self
            .balls
            .iter()
            .map(|b| BallSpec::from_p(b.p.value(), b.nu))
            .collect::<Result<Vec<_>>>()?;
        BallFamily::new(dim, balls)
    }

    /// Single-point query from `n`, `N`, `q`.
    pub fn query(&self) -> Result<WidthQuery> {
        let n = self.n.ok_or_else(|| Error::config("n", format!("n is required for {}", self.command)))?;
        let q = self.q.ok_or_else(|| Error::config("q", format!("q is required for {}", self.command)))?;
        WidthQuery::new(n, self.dim, q.inverse())
    }

    pub fn brute_force_config(&self) -> BruteForceConfig {
        BruteForceConfig { seed: self.seed, ..self.resolution.clone() }
    }

    /// Warnings for repeated exponents, which are collapsed to the smallest radius.
    pub fn duplicate_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, a) in self.balls.iter().enumerate() {
            if let Some(j) = self.balls[..i].iter().position(|b| b.p == a.p) {
                out.push(format!(
                    "balls[{i}] repeats p = {} from balls[{j}]; the smaller radius is kept",
                    a.p
                ));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::config("N", "N must be >= 1"));
        }
        if self.balls.is_empty() {
            return Err(Error::config("balls", "family must be non-empty"));
        }
        for (i, b) in self.balls.iter().enumerate() {
            if !b.p.is_valid() {
                return Err(Error::config(format!("balls[{i}].p"), "p must be >= 1 or 'inf'"));
            }
            if !(b.nu.is_finite() && b.nu > 0.0) {
                return Err(Error::config(format!("balls[{i}].nu"), "nu must be a positive number"));
            }
        }
        if let Some(q) = self.q {
            if !q.is_valid() {
                return Err(Error::config("q", "q must be ≥ 1 or 'inf'"));
            }
        }
        match self.command {
            Command::Estimate | Command::Sandwich => {
                self.query()?;
            }
            Command::Sweep => {
                let axes = self
                    .sweep
                    .as_ref()
                    .ok_or_else(|| Error::config("sweep", "sweep axes are required for sweep"))?;
                if axes.n.is_none() && self.n.is_none() {
                    return Err(Error::config("sweep.n", "give sweep.n or a scalar n"));
                }
                if axes.q.is_none() && self.q.is_none() {
                    return Err(Error::config("sweep.q", "give sweep.q or a scalar q"));
                }
                if let Some(dims) = &axes.dim {
                    if let Some(i) = dims.iter().position(|&d| d == 0) {
                        return Err(Error::config(format!("sweep.N[{i}]"), "N must be >= 1"));
                    }
                }
                if let Some(qs) = &axes.q {
                    if let Some(i) = qs.iter().position(|q| !q.is_valid()) {
                        return Err(Error::config(format!("sweep.q[{i}]"), "q must be ≥ 1 or 'inf'"));
                    }
                }
            }
            Command::Normalize | Command::Check => {}
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Parses and validates a JSON run configuration. Unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| {
        Error::config(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}
