use super::{ProcessState, StepRecord};
use crate::error::{Error, Result};
use crate::trajectory::{stop_check, z_diagnostics, StopFamily, StopReport, TrajectoryParams, ZDiagnostics};
use serde::Serialize;
use std::fmt::Write as _;

/// Which stop-condition families to evaluate at checkpoints, and whether a
/// violation ends the run.
#[derive(Clone, Debug, Serialize)]
pub struct StopSettings {
    pub families: Vec<StopFamily>,
    pub halt: bool,
}

impl Default for StopSettings {
    fn default() -> Self {
        Self {
            families: StopFamily::ALL.to_vec(),
            halt: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunOptions {
    /// Stop after this many steps; `None` runs until `V(i)` is empty.
    pub max_steps: Option<usize>,
    pub checkpoint_every: usize,
    pub params: Option<TrajectoryParams<f64>>,
    pub stop: Option<StopSettings>,
    pub z: bool,
    /// Recount live degrees after every step and compare with the trackers.
    pub check_trackers: bool,
    pub record_events: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            max_steps: None,
            checkpoint_every: 1,
            params: None,
            stop: None,
            z: false,
            check_trackers: false,
            record_events: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Checkpoint {
    pub i: usize,
    pub t: Option<f64>,
    pub open: usize,
    /// `N q(t)`.
    pub nq: Option<f64>,
    /// `N D^{-δ} f_v(t)`.
    pub fv_bound: Option<f64>,
    /// Mean, max and min live degree over open vertices, for sizes `2..=r`.
    pub mean_d: Vec<f64>,
    pub max_d: Vec<u32>,
    pub min_d: Vec<u32>,
    pub live_edges: usize,
    pub stop: Option<StopReport>,
    pub z: Option<ZDiagnostics>,
}

impl Checkpoint {
    pub fn stop_ok(&self) -> Option<bool> {
        self.stop.as_ref().map(StopReport::ok)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunTrace {
    pub seed: u64,
    pub r: usize,
    pub params: Option<TrajectoryParams<f64>>,
    pub checkpoints: Vec<Checkpoint>,
    pub terminal_size: usize,
    pub completed: bool,
    /// First checkpoint step at which a monitored condition failed.
    pub stop_step: Option<usize>,
    pub events: Vec<StepRecord>,
}

impl RunTrace {
    pub fn csv_header(r: usize) -> String {
        let mut cols = vec!["i", "t", "open", "Nq", "fv_bound"]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>();
        cols.extend((2..=r).map(|l| format!("mean_d{l}")));
        cols.extend((2..=r).map(|l| format!("max_d{l}")));
        cols.push("live_edges".into());
        cols.push("stop_ok".into());
        cols.join(",")
    }

    /// CSV with `#` metadata lines (version, params JSON) ahead of the header.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {}", crate::VERSION);
        let _ = writeln!(out, "# seed {}", self.seed);
        match &self.params {
            Some(p) => {
                let _ = writeln!(out, "# params {}", serde_json::to_string(p).expect("params serialize"));
            }
            None => out.push_str("# params null\n"),
        }
        out.push_str(&Self::csv_header(self.r));
        out.push('\n');
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for c in &self.checkpoints {
            let mut row = vec![c.i.to_string(), opt(c.t), c.open.to_string(), opt(c.nq), opt(c.fv_bound)];
            row.extend(c.mean_d.iter().map(f64::to_string));
            row.extend(c.max_d.iter().map(u32::to_string));
            row.push(c.live_edges.to_string());
            row.push(c.stop_ok().map(|b| b.to_string()).unwrap_or_default());
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn events_json(&self) -> String {
        serde_json::to_string(&self.events).expect("events serialize")
    }
}

pub fn run(state: &mut ProcessState<'_>, opts: &RunOptions) -> Result<RunTrace> {
    run_with(state, opts, |_, _| {})
}

/// Runs the process, calling `observe` at every checkpoint.
pub fn run_with(
    state: &mut ProcessState<'_>,
    opts: &RunOptions,
    mut observe: impl FnMut(&ProcessState<'_>, &Checkpoint),
) -> Result<RunTrace> {
    if opts.checkpoint_every == 0 {
        return Err(Error::Config("checkpoint_every must be at least 1".into()));
    }
    if (opts.stop.is_some() || opts.z) && opts.params.is_none() {
        return Err(Error::Config("monitored runs need trajectory parameters".into()));
    }
    let mut trace = RunTrace {
        seed: state.seed(),
        r: state.rank(),
        params: opts.params,
        checkpoints: Vec::new(),
        terminal_size: 0,
        completed: false,
        stop_step: None,
        events: Vec::new(),
    };
    let start = state.step_index();
    let mut halted = false;
    let mut record = |state: &ProcessState<'_>, trace: &mut RunTrace| -> Result<bool> {
        let cp = checkpoint(state, opts)?;
        let failed = cp.stop_ok() == Some(false);
        if failed && trace.stop_step.is_none() {
            trace.stop_step = Some(cp.i);
        }
        observe(state, &cp);
        trace.checkpoints.push(cp);
        Ok(failed && opts.stop.as_ref().is_some_and(|s| s.halt))
    };
    if record(state, &mut trace)? {
        halted = true;
    }
    while !halted && !state.is_complete() && opts.max_steps.is_none_or(|m| state.step_index() - start < m) {
        let ev = state.step()?;
        if opts.check_trackers {
            state.check_trackers()?;
        }
        if opts.record_events {
            trace.events.push(ev);
        }
        let i = state.step_index();
        let last = state.is_complete() || opts.max_steps.is_some_and(|m| i - start >= m);
        if (i - start).is_multiple_of(opts.checkpoint_every) || last {
            halted = record(state, &mut trace)?;
        }
    }
    trace.terminal_size = state.independent_set().len();
    trace.completed = state.is_complete();
    Ok(trace)
}

fn checkpoint(state: &ProcessState<'_>, opts: &RunOptions) -> Result<Checkpoint> {
    let snap = state.snapshot();
    let i = snap.step;
    let (t, nq, fv_bound) = match &opts.params {
        Some(p) => {
            let t = p.scaled_time(i);
            (Some(t), Some(p.n as f64 * p.q(t)), Some(p.points_band(t)))
        }
        None => (None, None, None),
    };
    let stop = match (&opts.stop, &opts.params) {
        (Some(s), Some(p)) => Some(stop_check(p, state, &s.families)?),
        _ => None,
    };
    let z = match (opts.z, &opts.params) {
        (true, Some(p)) => Some(z_diagnostics(p, state)?),
        _ => None,
    };
    Ok(Checkpoint {
        i,
        t,
        open: snap.open,
        nq,
        fv_bound,
        mean_d: snap.degrees.iter().map(|d| d.mean).collect(),
        max_d: snap.degrees.iter().map(|d| d.max).collect(),
        min_d: snap.degrees.iter().map(|d| d.min).collect(),
        live_edges: snap.live_edges(),
        stop,
        z,
    })
}
