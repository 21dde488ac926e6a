//! Experiment configuration: a TOML file with `graph`, `model`, `init`,
//! `sim`, `analysis` and `output` tables.

use std::fmt;

use serde::{Deserialize, Serialize};

use ipsim_core::dynamics::{total_rate_bound, Enumeration, LocalRule, State};
use ipsim_core::graph::{Graph, Region};

use crate::error::CliError;

pub const GRAPH_TYPES: &[&str] = &["torus", "tree", "tetra_tree"];
pub const MODEL_TYPES: &[&str] = &["independent", "contact", "ladder"];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphConfig {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interior_margin: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitConfig {
    pub state: State,
}

/// Either an explicit list of times or the text `linspace(t0, t1, G)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Times(Vec<f64>),
    Text(String),
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Times(Vec::new())
    }
}

impl GridSpec {
    pub fn expand(&self) -> Result<Vec<f64>, String> {
        match self {
            GridSpec::Times(t) => Ok(t.clone()),
            GridSpec::Text(s) => parse_linspace(s),
        }
    }
}

fn parse_linspace(s: &str) -> Result<Vec<f64>, String> {
    let inner = s
        .trim()
        .strip_prefix("linspace(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| format!("expected `linspace(t0, t1, G)`, got `{s}`"))?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    let [a, b, n] = parts[..] else {
        return Err(format!("linspace takes three arguments, got `{s}`"));
    };
    let a: f64 = a.parse().map_err(|_| format!("bad start `{a}`"))?;
    let b: f64 = b.parse().map_err(|_| format!("bad end `{b}`"))?;
    let n: usize = n.parse().map_err(|_| format!("bad point count `{n}`"))?;
    match n {
        0 => Err("linspace needs at least one point".into()),
        1 => Ok(vec![a]),
        _ => Ok((0..n)
            .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
            .collect()),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub t_end: f64,
    pub grid: GridSpec,
    pub replicas: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub significance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth_c: Option<f64>,
    /// Decay rates for the covariance-bound sweep; each must exceed the
    /// graph's growth rate. Defaults to growth rate + 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    /// Degradation score of each state; the state index by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: String,
    /// Write the event logs of the first this-many replicas.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_logs: Option<usize>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: "out".into(),
            event_logs: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphConfig,
    pub model: ModelConfig,
    pub init: InitConfig,
    pub sim: SimConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// All problems found in a configuration, one per line.
#[derive(Clone, Debug, PartialEq)]
pub struct Violations(pub Vec<String>);

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  - {v}")?;
        }
        Ok(())
    }
}

fn rate_ok(x: f64) -> bool {
    x.is_finite() && x >= 0.0
}

impl ExperimentConfig {
    /// Parses and validates; reports every violation rather than the first.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn emit(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let mut v = Vec::new();
        self.check_graph(&mut v);
        let n_states = self.check_model(&mut v);
        if let Some(n) = n_states {
            if self.init.state as usize >= n {
                v.push(format!("init.state = {} is not one of the {n} model states", self.init.state));
            }
            if let Some(f) = &self.analysis.f {
                if f.len() != n {
                    v.push(format!("analysis.f has {} entries, the model has {n} states", f.len()));
                }
            }
        }
        if !(self.sim.t_end > 0.0 && self.sim.t_end.is_finite()) {
            v.push(format!("sim.t_end must be positive, got {}", self.sim.t_end));
        }
        match self.sim.grid.expand() {
            Err(e) => v.push(format!("sim.grid: {e}")),
            Ok(g) if g.is_empty() => v.push("sim.grid is empty".into()),
            Ok(g) => {
                if let Some(t) = g.iter().find(|&&t| !(t >= 0.0 && t <= self.sim.t_end)) {
                    v.push(format!("sim.grid point {t} lies outside [0, sim.t_end = {}]", self.sim.t_end));
                }
                if g.windows(2).any(|w| w[1] <= w[0]) {
                    v.push("sim.grid must be strictly increasing".into());
                }
                if let Some(times) = &self.analysis.times {
                    for t in times {
                        if !g.iter().any(|&x| (x - t).abs() <= 1e-9 * t.abs().max(1.0)) {
                            v.push(format!("analysis.times entry {t} is not a point of sim.grid"));
                        }
                    }
                }
            }
        }
        if self.sim.replicas < 1 {
            v.push("sim.replicas must be at least 1".into());
        }
        let a = &self.analysis;
        if let Some(alpha) = a.alpha {
            if !(alpha.is_finite() && alpha >= 0.0) {
                v.push(format!("analysis.alpha must be finite and >= 0, got {alpha}"));
            }
        }
        if let Some(s) = a.significance {
            if !(s > 0.0 && s < 1.0) {
                v.push(format!("analysis.significance must lie in (0, 1), got {s}"));
            }
        }
        if let Some(c) = a.bandwidth_c {
            if !(c > 0.0 && c.is_finite()) {
                v.push(format!("analysis.bandwidth_c must be positive, got {c}"));
            }
        }
        if let Some(b) = &a.beta {
            if b.is_empty() || b.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                v.push("analysis.beta must list positive finite values".into());
            }
        }
        if let Some(l) = &a.ladder {
            if l.is_empty() || l.contains(&0) {
                v.push("analysis.ladder must list positive sizes".into());
            }
            if l.windows(2).any(|w| w[1] <= w[0]) {
                v.push("analysis.ladder must be strictly increasing".into());
            }
        }
        if self.output.directory.is_empty() {
            v.push("output.directory must not be empty".into());
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(CliError::Invalid(Violations(v)))
        }
    }

    fn check_graph(&self, v: &mut Vec<String>) {
        let g = &self.graph;
        let mut need = |key: &str, val: Option<usize>, min: usize| match val {
            None => v.push(format!("graph.{key} is required for graph.type = \"{}\"", g.kind)),
            Some(x) if x < min => v.push(format!("graph.{key} must be >= {min}, got {x}")),
            _ => {}
        };
        match g.kind.as_str() {
            "torus" => {
                need("dim", g.dim, 1);
                need("side", g.side, 3);
            }
            "tree" => {
                need("degree", g.degree, 3);
                need("radius", g.radius, 0);
            }
            "tetra_tree" => need("radius", g.radius, 1),
            other => v.push(format!(
                "graph.type = \"{other}\" is not supported; expected one of {}",
                GRAPH_TYPES.join(", ")
            )),
        }
    }

    /// Returns the number of states when the model table is usable.
    fn check_model(&self, v: &mut Vec<String>) -> Option<usize> {
        let m = &self.model;
        let before = v.len();
        if m.range == Some(0) {
            v.push("model.range must be >= 1".into());
        }
        for (key, val) in [("lambda", m.lambda), ("delta", m.delta)] {
            if let Some(x) = val {
                if !rate_ok(x) {
                    v.push(format!("model.{key} must be finite and >= 0, got {x}"));
                }
            }
        }
        let n = match m.kind.as_str() {
            "independent" => {
                if m.lambda.is_none() {
                    v.push("model.lambda is required for model.type = \"independent\"".into());
                }
                let n = m.states.unwrap_or(2);
                if !(2..=255).contains(&n) {
                    v.push(format!("model.states must lie in 2..=255, got {n}"));
                }
                n
            }
            "contact" => {
                if m.lambda.is_none() {
                    v.push("model.lambda is required for model.type = \"contact\"".into());
                }
                if m.states.is_some_and(|s| s != 2) {
                    v.push("model.states must be 2 for the contact process".into());
                }
                2
            }
            "ladder" => match (&m.a, &m.b) {
                (Some(a), Some(b)) => {
                    if a.is_empty() || a.len() != b.len() {
                        v.push(format!(
                            "model.a and model.b must be non-empty and equally long (got {} and {})",
                            a.len(),
                            b.len()
                        ));
                    }
                    if a.iter().chain(b).any(|&x| !rate_ok(x)) {
                        v.push("model.a and model.b entries must be finite and >= 0".into());
                    }
                    if m.states.is_some_and(|s| s != a.len() + 1) {
                        v.push("model.states must equal len(model.a) + 1".into());
                    }
                    a.len() + 1
                }
                _ => {
                    v.push("model.a and model.b are required for model.type = \"ladder\"".into());
                    return None;
                }
            },
            other => {
                v.push(format!(
                    "model.type = \"{other}\" is not supported; expected one of {}",
                    MODEL_TYPES.join(", ")
                ));
                return None;
            }
        };
        (v.len() == before).then_some(n)
    }

    pub fn build_graph(&self) -> Result<Graph, CliError> {
        let g = &self.graph;
        let graph = match g.kind.as_str() {
            "torus" => Graph::torus(g.dim.unwrap_or(0), g.side.unwrap_or(0))?,
            "tree" => Graph::tree_ball(g.degree.unwrap_or(0), g.radius.unwrap_or(0))?,
            _ => Graph::tetra_tree_ball(g.radius.unwrap_or(0))?,
        };
        Ok(graph)
    }

    pub fn build_rule(&self) -> Result<LocalRule<f64>, CliError> {
        let m = &self.model;
        let range = m.range.unwrap_or(1);
        let rule = match m.kind.as_str() {
            "independent" => {
                LocalRule::independent_ladder(m.states.unwrap_or(2), m.lambda.unwrap_or(0.0), m.delta.unwrap_or(0.0))?
            }
            "contact" => LocalRule::contact_with_range(m.lambda.unwrap_or(0.0), m.delta.unwrap_or(1.0), range)?,
            _ => LocalRule::ladder(m.a.clone().unwrap_or_default(), m.b.clone().unwrap_or_default(), range)?,
        };
        Ok(rule)
    }

    pub fn grid(&self) -> Vec<f64> {
        self.sim.grid.expand().expect("validated grid")
    }

    /// Observation region. On truncated graphs the margin defaults to
    /// `ceil(t_end * B * range)`, at most half the radius.
    pub fn interior(&self, g: &Graph, rule: &LocalRule<f64>) -> Result<Region, CliError> {
        let margin = match self.graph.interior_margin {
            Some(m) => m,
            None if g.is_truncated() => {
                let b = total_rate_bound(rule, g, &Enumeration::default())?.total;
                let m = (self.sim.t_end * b * rule.range() as f64).ceil() as usize;
                m.min(self.graph.radius.unwrap_or(0) / 2)
            }
            None => 0,
        };
        Ok(Region::interior(g, margin)?)
    }

    /// Degradation map: `analysis.f` or the state index.
    pub fn degradation(&self, n_states: usize) -> Vec<f64> {
        self.analysis
            .f
            .clone()
            .unwrap_or_else(|| (0..n_states).map(|w| w as f64).collect())
    }

    /// Whether the model is independent two-state pure degradation, which has
    /// closed-form hitting quantities.
    pub fn pure_degradation_rate(&self) -> Option<f64> {
        let m = &self.model;
        (m.kind == "independent" && m.states.unwrap_or(2) == 2 && m.delta.unwrap_or(0.0) == 0.0)
            .then_some(m.lambda.unwrap_or(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[graph]
type = "torus"
dim = 2
side = 5

[model]
type = "independent"
lambda = 1.0

[init]
state = 0

[sim]
t_end = 1.0
grid = "linspace(0, 1, 5)"
replicas = 10
seed = 3
"#;

    #[test]
    fn minimal_config_parses() {
        let cfg = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.grid(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(cfg.output.directory, "out");
        assert_eq!(cfg.build_graph().unwrap().len(), 25);
    }

    #[test]
    fn grid_beyond_t_end_names_the_key() {
        let text = MINIMAL.replace("linspace(0, 1, 5)", "linspace(0, 2, 5)");
        let err = ExperimentConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("sim.grid"), "{err}");
    }

    #[test]
    fn unknown_model_lists_supported_types() {
        let text = MINIMAL.replace("\"independent\"", "\"voter\"");
        let err = ExperimentConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("independent, contact, ladder"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("seed = 3", "seed = 3\nsede = 4");
        assert!(matches!(ExperimentConfig::parse(&text), Err(CliError::Parse(_))));
    }

    #[test]
    fn all_violations_are_reported() {
        let text = MINIMAL
            .replace("side = 5", "side = 2")
            .replace("state = 0", "state = 7")
            .replace("replicas = 10", "replicas = 0");
        let CliError::Invalid(Violations(v)) = ExperimentConfig::parse(&text).unwrap_err() else {
            panic!("expected validation errors");
        };
        assert_eq!(v.len(), 3, "{v:?}");
    }
}
