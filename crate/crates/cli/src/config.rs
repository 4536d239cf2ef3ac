//! Job configuration: TOML (primary) or JSON, with schema validation and
//! path-qualified error messages.

use num_rational::Rational64;
use quiver_dt::dt::Stability;
use quiver_dt::{DimVector, ExtQuiverSpec, Quiver, StabilityWeights};
use serde::Deserialize;
use std::collections::BTreeMap;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(message.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigFormat {
    Toml,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    #[serde(default = "default_oracle_q")]
    pub q: Vec<u64>,
    #[serde(default = "default_max_total_dim")]
    pub max_total_dim: u64,
}

fn default_oracle_q() -> Vec<u64> {
    vec![2, 3]
}

fn default_max_total_dim() -> u64 {
    3
}

impl Default for OracleSection {
    fn default() -> Self {
        OracleSection {
            q: default_oracle_q(),
            max_total_dim: default_max_total_dim(),
        }
    }
}

/// Raw configuration as found in the file. Unknown keys are rejected.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default)]
    pub vertices: Vec<String>,
    #[serde(default)]
    pub arrows: Vec<(String, String, u64)>,
    #[serde(rename = "box")]
    pub bound: Vec<u64>,
    #[serde(default)]
    pub theta: Option<BTreeMap<String, i64>>,
    #[serde(default)]
    pub mu: Option<String>,
    #[serde(default)]
    pub framing: Option<BTreeMap<String, u64>>,
    #[serde(default)]
    pub gram: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub multiplicities: Option<Vec<u64>>,
    #[serde(default)]
    pub oracle: Option<OracleSection>,
}

/// Parse a configuration document in the given format.
pub fn parse_config(text: &str, format: ConfigFormat) -> Result<JobConfig, ConfigError> {
    match format {
        ConfigFormat::Toml => {
            toml::from_str(text).map_err(|e| ConfigError(format!("config (toml): {e}")))
        }
        ConfigFormat::Json => {
            serde_json::from_str(text).map_err(|e| ConfigError(format!("config (json): {e}")))
        }
    }
}

impl JobConfig {
    fn vertex_index(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == label)
    }

    /// Build the quiver from `vertices`/`arrows`, validating references.
    pub fn quiver(&self) -> Result<Quiver, ConfigError> {
        if self.vertices.is_empty() {
            return err("vertices: at least one vertex is required");
        }
        let mut seen = std::collections::BTreeSet::new();
        for v in &self.vertices {
            if !seen.insert(v) {
                return err(format!("vertices: duplicate label \"{v}\""));
            }
        }
        let n = self.vertices.len();
        let mut matrix = vec![vec![0u64; n]; n];
        for (idx, (src, dst, count)) in self.arrows.iter().enumerate() {
            let i = self.vertex_index(src).ok_or_else(|| {
                ConfigError(format!(
                    "arrows[{idx}] ([\"{src}\", \"{dst}\", {count}]): references undeclared vertex \"{src}\""
                ))
            })?;
            let j = self.vertex_index(dst).ok_or_else(|| {
                ConfigError(format!(
                    "arrows[{idx}] ([\"{src}\", \"{dst}\", {count}]): references undeclared vertex \"{dst}\""
                ))
            })?;
            matrix[i][j] += count;
        }
        Quiver::new(self.vertices.clone(), matrix).map_err(|e| ConfigError(e.to_string()))
    }

    /// The truncation box, validated against the quiver's vertex count.
    pub fn quiver_bound(&self, quiver: &Quiver) -> Result<DimVector, ConfigError> {
        if self.bound.len() != quiver.vertex_count() {
            return err(format!(
                "box: expected {} entries (one per vertex), got {}",
                quiver.vertex_count(),
                self.bound.len()
            ));
        }
        Ok(DimVector::new(self.bound.clone()))
    }

    /// Resolve the stability data; King stability requires a complete theta
    /// map and a slope.
    pub fn stability(&self) -> Result<Stability, ConfigError> {
        let Some(theta) = &self.theta else {
            if self.mu.is_some() {
                return err("mu: slope given without stability weights (theta)");
            }
            return Ok(Stability::Trivial);
        };
        for key in theta.keys() {
            if self.vertex_index(key).is_none() {
                return err(format!("theta: unknown vertex \"{key}\""));
            }
        }
        let mut weights = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            match theta.get(v) {
                Some(w) => weights.push(*w),
                None => return err(format!("theta: missing weight for vertex \"{v}\"")),
            }
        }
        let Some(mu_text) = &self.mu else {
            return err("mu: slope required with stability (theta)");
        };
        let mu = parse_slope(mu_text)
            .ok_or_else(|| ConfigError(format!("mu: cannot parse \"{mu_text}\" as p/q")))?;
        Ok(Stability::King {
            theta: StabilityWeights::new(weights),
            mu,
        })
    }

    /// The framing vector, required by the `framed` command.
    pub fn framing(&self, quiver: &Quiver) -> Result<DimVector, ConfigError> {
        let Some(framing) = &self.framing else {
            return err("framing: the framed command requires a framing vector");
        };
        for key in framing.keys() {
            if self.vertex_index(key).is_none() {
                return err(format!("framing: unknown vertex \"{key}\""));
            }
        }
        let entries = quiver
            .labels()
            .iter()
            .map(|v| framing.get(v).copied().unwrap_or(0))
            .collect();
        Ok(DimVector::new(entries))
    }

    /// The Ext-quiver data, required by the `local` command.
    pub fn ext_spec(&self) -> Result<(ExtQuiverSpec, DimVector), ConfigError> {
        let Some(gram) = &self.gram else {
            return err("gram: the local command requires a Gram matrix");
        };
        let s = gram.len();
        if self.bound.len() != s {
            return err(format!(
                "box: expected {s} entries (one per Gram row), got {}",
                self.bound.len()
            ));
        }
        let multiplicities = match &self.multiplicities {
            Some(m) => {
                if m.len() != s {
                    return err(format!(
                        "multiplicities: expected {s} entries, got {}",
                        m.len()
                    ));
                }
                DimVector::new(m.clone())
            }
            None => DimVector::new(self.bound.clone()),
        };
        let spec = ExtQuiverSpec {
            gram: gram.clone(),
            multiplicities,
            framing_dims: None,
        };
        spec.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok((spec, DimVector::new(self.bound.clone())))
    }

    pub fn oracle_section(&self) -> OracleSection {
        self.oracle.clone().unwrap_or_default()
    }

    /// Trivial weights used by the oracle when no theta is configured.
    pub fn oracle_theta(&self, quiver: &Quiver) -> Result<StabilityWeights, ConfigError> {
        match self.stability()? {
            Stability::King { theta, .. } => Ok(theta),
            Stability::Trivial => Ok(StabilityWeights::trivial(quiver.vertex_count())),
        }
    }
}

pub fn parse_slope(text: &str) -> Option<Rational64> {
    match text.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().ok()?;
            let q: i64 = q.trim().parse().ok()?;
            if q == 0 {
                return None;
            }
            Some(Rational64::new(p, q))
        }
        None => Some(Rational64::from_integer(text.trim().parse().ok()?)),
    }
}
