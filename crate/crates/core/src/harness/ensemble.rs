use super::{resolve_params, thread_pool, ExperimentConfig, InstanceSpec, SampleStats};
use crate::error::{Error, Result};
use crate::process::{run, ProcessState, RunOptions, RunTrace, StopSettings};
use crate::trajectory::TrajectoryParams;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Ensemble view of `|V(i)|` at one checkpoint step.
#[derive(Clone, Debug, Serialize)]
pub struct EnsembleRow {
    pub i: usize,
    pub t: Option<f64>,
    pub nq: Option<f64>,
    pub open: SampleStats,
    /// Median over runs of `||V(i)| - Nq| / Nq`.
    pub median_rel_dev: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub version: String,
    pub instance: InstanceSpec,
    pub seed_base: u64,
    pub runs: usize,
    pub params: Option<TrajectoryParams<f64>>,
    pub warnings: Vec<String>,
    pub terminal: SampleStats,
    /// `N (ln N / D)^{1/(r-1)}`.
    pub prediction_scale: Option<f64>,
    pub terminal_ratio: Option<f64>,
    pub i_max: Option<usize>,
    /// Runs with a monitored violation at a checkpoint `i <= i_max`.
    pub violation_fraction: Option<f64>,
    pub checkpoints: Vec<EnsembleRow>,
}

/// Runs the configured ensemble, writing trace CSVs and `summary.json` when an
/// output directory is configured.
pub fn cmd_run(cfg: &ExperimentConfig) -> Result<(RunSummary, Vec<RunTrace>)> {
    cfg.validate()?;
    let h = cfg.instance.build()?;
    let monitored = cfg.monitors.stop || cfg.monitors.z;
    let mut warnings = Vec::new();
    let params = if h.edge_count() == 0 {
        None
    } else {
        match resolve_params(&h, &cfg.params) {
            Ok(res) => {
                warnings.extend(res.warnings);
                Some(res.params)
            }
            Err(e) if !monitored => {
                warnings.push(format!("no trajectory parameters: {e}"));
                None
            }
            Err(e) => return Err(e),
        }
    };
    if monitored && params.is_none() {
        return Err(Error::Config("monitors need a nonempty uniform instance".into()));
    }
    let opts = RunOptions {
        max_steps: cfg.max_steps,
        checkpoint_every: cfg.checkpoint_every,
        params,
        stop: cfg.monitors.stop.then(|| -> Result<StopSettings> {
            Ok(StopSettings { families: cfg.monitors.families()?, halt: cfg.monitors.halt })
        }).transpose()?,
        z: cfg.monitors.z,
        check_trackers: false,
        record_events: false,
    };
    let pool = thread_pool()?;
    let traces: Vec<RunTrace> = pool.install(|| {
        (0..cfg.runs)
            .into_par_iter()
            .map(|idx| {
                let mut st = ProcessState::new(&h, cfg.seed(idx))?;
                run(&mut st, &opts)
            })
            .collect::<Result<_>>()
    })?;

    let terminal: Vec<f64> = traces.iter().map(|t| t.terminal_size as f64).collect();
    let terminal = SampleStats::of(&terminal).expect("at least one run");
    let n = h.vertex_count() as f64;
    let prediction_scale = params.map(|p| n * (n.ln() / p.d).powf(1.0 / (p.r as f64 - 1.0)));
    let i_max = params.map(|p| p.i_max());
    let violation_fraction = match (cfg.monitors.stop, i_max) {
        (true, Some(limit)) => {
            let bad = traces.iter().filter(|t| t.stop_step.is_some_and(|s| s <= limit)).count();
            Some(bad as f64 / cfg.runs as f64)
        }
        _ => None,
    };

    let mut by_step: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for t in &traces {
        for c in &t.checkpoints {
            by_step.entry(c.i).or_default().push(c.open as f64);
        }
    }
    let checkpoints = by_step
        .into_iter()
        .map(|(i, opens)| {
            let t = params.map(|p| p.scaled_time(i));
            let nq = params.map(|p| n * p.q(p.scaled_time(i)));
            let median_rel_dev = nq.and_then(|nq| {
                let devs: Vec<f64> = opens.iter().map(|o| (o - nq).abs() / nq).collect();
                SampleStats::of(&devs).map(|s| s.median)
            });
            EnsembleRow { i, t, nq, open: SampleStats::of(&opens).expect("nonempty"), median_rel_dev }
        })
        .collect();
    let summary = RunSummary {
        version: crate::VERSION.to_string(),
        instance: cfg.instance.clone(),
        seed_base: cfg.seed_base,
        runs: cfg.runs,
        params,
        warnings,
        terminal_ratio: prediction_scale.map(|s| terminal.mean / s),
        terminal,
        prediction_scale,
        i_max,
        violation_fraction,
        checkpoints,
    };
    if let Some(dir) = &cfg.output.dir {
        std::fs::create_dir_all(dir)?;
        if cfg.output.csv {
            for (idx, t) in traces.iter().enumerate() {
                std::fs::write(dir.join(format!("trace_{idx:04}.csv")), t.to_csv())?;
            }
        }
        if cfg.output.json {
            std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
        }
    }
    Ok((summary, traces))
}
