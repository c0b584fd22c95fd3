//! Experiment orchestration: instance specs, parameter resolution, seeded
//! ensembles and the report types written by the command line front end.

mod ensemble;
mod experiments;
mod tables;

pub use ensemble::{cmd_run, EnsembleRow, RunSummary};
pub use experiments::{
    cmd_count_experiment, cmd_gowers_experiment, CountExperiment, CountReport, GowersExperiment, GowersReport,
    GowersRow,
};
pub use tables::{audit_trace, cmd_trajectory, trajectory_header, TraceAudit, TrajectoryTable};

use crate::error::{Error, Result};
use crate::generators::{k_ap, random_uniform, sum_free, template_copies, Template};
use crate::hypergraph::{check_main_conditions, Hypergraph};
use crate::trajectory::{StopFamily, TrajectoryParams};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "HYGREEDY_THREADS";

/// Static hypergraph to run on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSpec {
    /// `k`-term arithmetic progressions in `Z_N`.
    KAp { n: usize, k: usize },
    /// Copies of a template in `K_n` (built-in name or inline `tmpl` text).
    Template { template: String, n: usize },
    SumFree { n: usize },
    Random { n: usize, r: usize, m: usize, seed: u64 },
    File { path: PathBuf },
}

impl InstanceSpec {
    pub fn build(&self) -> Result<Hypergraph> {
        match self {
            Self::KAp { n, k } => k_ap(*n, *k),
            Self::Template { template, n } => template_copies(&parse_template(template)?, *n),
            Self::SumFree { n } => sum_free(*n),
            Self::Random { n, r, m, seed } => random_uniform(*n, *r, *m, *seed),
            Self::File { path } => Hypergraph::parse_any(&std::fs::read_to_string(path)?),
        }
    }
}

/// A built-in template name or inline `tmpl` text.
pub fn parse_template(spec: &str) -> Result<Template> {
    if spec.trim_start().starts_with("tmpl") {
        Template::parse(spec)
    } else {
        Template::by_name(spec)
    }
}

/// Optional overrides of the trajectory constants. Unset values default to
/// `ε = ε_sup - 0.01`, `δ = ε/10`, `ζ = δ/10`, and searched `(α, β)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamOverrides {
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub zeta: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    /// Accept constants that break `ζ ≤ δ/10 ≤ ε/100`, with a warning.
    pub allow_loose: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolvedParams {
    pub params: TrajectoryParams<f64>,
    pub warnings: Vec<String>,
}

/// Trajectory constants for `h` after applying `o`.
pub fn resolve_params(h: &Hypergraph, o: &ParamOverrides) -> Result<ResolvedParams> {
    let r = h.require_uniform()?;
    let mut warnings = Vec::new();
    let epsilon = match o.epsilon {
        Some(e) => e,
        None => {
            let sup = check_main_conditions(h, 0.01)?.supremum_epsilon().ok_or_else(|| {
                Error::Precondition("no positive epsilon satisfies the hypotheses; set epsilon explicitly".into())
            })?;
            if sup <= 0.01 {
                return Err(Error::Precondition(format!(
                    "largest admissible epsilon {sup:.4} leaves no room for the 0.01 margin"
                )));
            }
            sup - 0.01
        }
    };
    let report = check_main_conditions(h, epsilon)?;
    if !report.all_satisfied() {
        warnings.push(format!("hypotheses fail at epsilon = {epsilon}"));
    }
    let delta = o.delta.unwrap_or(epsilon / 10.0);
    let zeta = o.zeta.unwrap_or(delta / 10.0);
    let mut params = TrajectoryParams::new(r, h.vertex_count(), report.d, epsilon, delta, zeta, 0.0, 0.0)?;
    if let Some(w) = params.validate(o.allow_loose)? {
        warnings.push(w);
    }
    match (o.alpha, o.beta) {
        (Some(a), Some(b)) => {
            params.alpha = a;
            params.beta = b;
        }
        _ => {
            if let Err(e) = params.fit_alpha_beta() {
                warnings.push(format!("{e}; using alpha = beta = 0"));
            }
            if let Some(a) = o.alpha {
                params.alpha = a;
            }
            if let Some(b) = o.beta {
                params.beta = b;
            }
        }
    }
    Ok(ResolvedParams { params, warnings })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Monitors {
    pub stop: bool,
    pub z: bool,
    /// End a run at its first violation.
    pub halt: bool,
    /// Families to evaluate; empty means all.
    pub families: Vec<String>,
}

impl Monitors {
    pub fn families(&self) -> Result<Vec<StopFamily>> {
        if self.families.is_empty() {
            return Ok(StopFamily::ALL.to_vec());
        }
        self.families.iter().map(|f| f.parse()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    pub csv: bool,
    pub json: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: None, csv: true, json: true }
    }
}

fn one() -> usize {
    1
}

/// One JSON document describing an ensemble; command line flags override fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    #[serde(default)]
    pub seed_base: u64,
    #[serde(default = "one")]
    pub runs: usize,
    #[serde(default = "one")]
    pub checkpoint_every: usize,
    #[serde(default)]
    pub max_steps: Option<usize>,
    #[serde(default)]
    pub params: ParamOverrides,
    #[serde(default)]
    pub monitors: Monitors,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn new(instance: InstanceSpec) -> Self {
        Self {
            instance,
            seed_base: 0,
            runs: 1,
            checkpoint_every: 1,
            max_steps: None,
            params: ParamOverrides::default(),
            monitors: Monitors::default(),
            output: OutputSpec::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.checkpoint_every == 0 {
            return Err(Error::Config("checkpoint_every must be at least 1".into()));
        }
        self.monitors.families()?;
        Ok(())
    }

    /// Seed of run `idx`.
    pub fn seed(&self, idx: usize) -> u64 {
        self.seed_base.wrapping_add(idx as u64)
    }
}

/// Worker pool sized by `HYGREEDY_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::Resource(e.to_string()))
}

/// Summary statistics of a full sample; quantiles interpolate linearly between order statistics.
#[derive(Clone, Debug, Serialize)]
pub struct SampleStats {
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

impl SampleStats {
    pub fn of(sample: &[f64]) -> Option<Self> {
        if sample.is_empty() {
            return None;
        }
        let mut sorted = sample.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let mean = sorted.iter().sum::<f64>() / n;
        let var = if sorted.len() > 1 {
            sorted.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Some(Self {
            count: sorted.len(),
            mean,
            sd: var.sqrt(),
            min: sorted[0],
            q25: quantile(&sorted, 0.25),
            median: quantile(&sorted, 0.5),
            q75: quantile(&sorted, 0.75),
            max: sorted[sorted.len() - 1],
        })
    }
}

/// Quantile of an ascending, nonempty sample.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip_and_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"instance": {"generator": "k_ap", "n": 11, "k": 3}}"#).unwrap();
        assert_eq!(cfg.runs, 1);
        assert_eq!(cfg.checkpoint_every, 1);
        assert!(cfg.output.csv && cfg.output.json);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
        assert!(ExperimentConfig::from_json(r#"{"instance": {"generator": "k_ap", "n": 11, "k": 3}, "runs": 0}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"instance": {"generator": "nope"}}"#).is_err());
        let bad = r#"{"instance": {"generator": "sum_free", "n": 11}, "monitors": {"families": ["pts"]}}"#;
        assert!(ExperimentConfig::from_json(bad).is_err());
    }

    #[test]
    fn seeds_are_offsets() {
        let mut cfg = ExperimentConfig::new(InstanceSpec::SumFree { n: 11 });
        cfg.seed_base = u64::MAX;
        assert_eq!(cfg.seed(0), u64::MAX);
        assert_eq!(cfg.seed(1), 0);
    }

    #[test]
    fn instances_build() {
        let h = InstanceSpec::Template { template: "triangle".into(), n: 6 }.build().unwrap();
        assert_eq!(h.edge_count(), 20);
        let inline = InstanceSpec::Template { template: "tmpl 3 3 2\n0 1\n0 2\n1 2\n".into(), n: 6 };
        assert_eq!(inline.build().unwrap().edge_count(), 20);
        assert_eq!(InstanceSpec::KAp { n: 11, k: 3 }.build().unwrap().edge_count(), 55);
    }

    #[test]
    fn quantiles() {
        let s = SampleStats::of(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(s.median, 2.5);
        assert_eq!(s.q25, 1.75);
        assert_eq!(s.min, 1.0);
        assert_eq!(s.max, 4.0);
        assert!(SampleStats::of(&[]).is_none());
    }

    #[test]
    fn resolved_defaults_match_condition_defaults() {
        let h = k_ap(101, 3).unwrap();
        let got = resolve_params(&h, &ParamOverrides::default()).unwrap();
        let want = TrajectoryParams::<f64>::from_conditions(&check_main_conditions(&h, 0.01).unwrap()).unwrap();
        assert_eq!(got.params, want);
        let loose = ParamOverrides { zeta: Some(1.0), ..ParamOverrides::default() };
        assert!(resolve_params(&h, &loose).is_err());
        let loose = ParamOverrides { zeta: Some(1.0), allow_loose: true, ..ParamOverrides::default() };
        let got = resolve_params(&h, &loose).unwrap();
        assert_eq!(got.params.zeta, 1.0);
        assert!(!got.warnings.is_empty());
    }
}
