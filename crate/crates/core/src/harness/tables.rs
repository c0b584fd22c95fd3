use crate::error::{Error, Result};
use crate::trajectory::{
    check_variation_equations, points_verdict, uniform_grid, ErrorFn, Sign, TrajectoryParams, VareqReport,
    DEFAULT_GRID,
};
use serde::Serialize;
use std::fmt::Write as _;

/// `t,q,s_2..s_r,s2p..s{r-1}p,s2m..s{r}m,f_v,f_2..f_r`.
pub fn trajectory_header(r: usize) -> String {
    let mut cols = vec!["t".to_string(), "q".to_string()];
    cols.extend((2..=r).map(|l| format!("s_{l}")));
    cols.extend((2..r).map(|l| format!("s{l}p")));
    cols.extend((2..=r).map(|l| format!("s{l}m")));
    cols.push("f_v".into());
    cols.extend((2..=r).map(|l| format!("f_{l}")));
    cols.join(",")
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryTable {
    pub csv: String,
    pub vareq: Option<VareqReport<f64>>,
}

/// Predicted curves on `points` evenly spaced times in `[0, t_end]`, with
/// `#` metadata lines; the variation-equation report is appended as a
/// trailing `#` line when requested.
pub fn cmd_trajectory(p: &TrajectoryParams<f64>, t_end: f64, points: usize, check_vareq: bool) -> Result<TrajectoryTable> {
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::input(format!("grid end {t_end} must be finite and nonnegative")));
    }
    let r = p.r;
    let mut csv = String::new();
    let _ = writeln!(csv, "# {}", crate::VERSION);
    let _ = writeln!(csv, "# params {}", serde_json::to_string(p)?);
    csv.push_str(&trajectory_header(r));
    csv.push('\n');
    for t in uniform_grid(t_end, points) {
        let mut row = vec![t, p.q(t)];
        for l in 2..=r {
            row.push(p.s(l, t)?);
        }
        for l in 2..r {
            row.push(p.s_pm(l, t, Sign::Plus)?);
        }
        for l in 2..=r {
            row.push(p.s_pm(l, t, Sign::Minus)?);
        }
        row.push(p.f_value(ErrorFn::Vertex, t));
        for l in 2..=r {
            row.push(p.f_value(ErrorFn::Size(l), t));
        }
        let text: Vec<String> = row.iter().map(f64::to_string).collect();
        csv.push_str(&text.join(","));
        csv.push('\n');
    }
    let vareq = check_vareq.then(|| check_variation_equations(p, &uniform_grid(p.t_max(), DEFAULT_GRID)));
    if let Some(rep) = &vareq {
        let _ = writeln!(csv, "# vareq {}", serde_json::to_string(rep)?);
    }
    Ok(TrajectoryTable { csv, vareq })
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceAudit {
    pub params: TrajectoryParams<f64>,
    pub rows: usize,
    /// Rows whose recorded `stop_ok` is `false`.
    pub recorded_failures: usize,
    /// Rows whose `(i, |V(i)|)` leave the points band on recomputation.
    pub points_failures: usize,
    pub first_points_failure: Option<usize>,
    /// Every recomputed points failure is also recorded as a failure.
    pub consistent: bool,
}

/// Re-checks the points condition on every row of a saved trace CSV.
pub fn audit_trace(csv: &str) -> Result<TraceAudit> {
    let mut params: Option<TrajectoryParams<f64>> = None;
    let mut header: Option<Vec<&str>> = None;
    let mut rows = 0;
    let mut recorded_failures = 0;
    let mut points_failures = 0;
    let mut first_points_failure = None;
    let mut consistent = true;
    for line in csv.lines().filter(|l| !l.trim().is_empty()) {
        if let Some(rest) = line.strip_prefix("# params ") {
            params = serde_json::from_str(rest)?;
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let Some(cols) = &header else {
            header = Some(fields);
            continue;
        };
        let p = params
            .as_ref()
            .ok_or_else(|| Error::input("trace carries no trajectory parameters"))?;
        let col = |name: &str| -> Result<&str> {
            let idx = cols
                .iter()
                .position(|c| *c == name)
                .ok_or_else(|| Error::input(format!("trace lacks column {name}")))?;
            fields
                .get(idx)
                .copied()
                .ok_or_else(|| Error::input(format!("short trace row {line:?}")))
        };
        let num = |name: &str| -> Result<usize> {
            col(name)?
                .parse()
                .map_err(|_| Error::input(format!("bad {name} in row {line:?}")))
        };
        let (i, open) = (num("i")?, num("open")?);
        let recorded = col("stop_ok")?;
        rows += 1;
        if recorded == "false" {
            recorded_failures += 1;
        }
        if !points_verdict(p, i, open).ok {
            points_failures += 1;
            first_points_failure.get_or_insert(i);
            if recorded != "false" {
                consistent = false;
            }
        }
    }
    let params = params.ok_or_else(|| Error::input("trace carries no trajectory parameters"))?;
    if header.is_none() {
        return Err(Error::input("trace has no header row"));
    }
    Ok(TraceAudit { params, rows, recorded_failures, points_failures, first_points_failure, consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::k_ap;
    use crate::process::{run, ProcessState, RunOptions, StopSettings};
    use crate::trajectory::StopFamily;

    fn params() -> TrajectoryParams<f64> {
        TrajectoryParams::new(3, 10_000, 100.0, 0.3, 0.03, 0.003, 12.0, 4.0).unwrap()
    }

    #[test]
    fn header_layout() {
        assert_eq!(trajectory_header(3), "t,q,s_2,s_3,s2p,s2m,s3m,f_v,f_2,f_3");
        assert_eq!(
            trajectory_header(4),
            "t,q,s_2,s_3,s_4,s2p,s3p,s2m,s3m,s4m,f_v,f_2,f_3,f_4"
        );
    }

    #[test]
    fn first_row_and_peak() {
        let table = cmd_trajectory(&params(), 2.0, 2001, false).unwrap();
        let rows: Vec<Vec<f64>> = table
            .csv
            .lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 2001);
        let first = &rows[0];
        assert_eq!(&first[..4], &[0.0, 1.0, 0.0, 100.0]);
        assert_eq!(first[7], 1.0);
        let peak = rows.iter().max_by(|a, b| a[2].total_cmp(&b[2])).unwrap()[0];
        assert!((peak - 0.5f64.sqrt()).abs() <= 1e-3);
        assert!(table.vareq.is_none());
    }

    #[test]
    fn vareq_is_appended() {
        let table = cmd_trajectory(&params(), 1.0, 5, true).unwrap();
        assert!(table.vareq.is_some());
        assert!(table.csv.lines().last().unwrap().starts_with("# vareq {"));
    }

    #[test]
    fn audit_of_a_monitored_trace() {
        let h = k_ap(101, 3).unwrap();
        let p = TrajectoryParams::new(3, 101, 150.0, 0.2, 0.02, 0.002, 0.0, 0.0).unwrap();
        let mut st = ProcessState::new(&h, 3).unwrap();
        let opts = RunOptions {
            params: Some(p),
            stop: Some(StopSettings { families: vec![StopFamily::Points], halt: false }),
            ..RunOptions::default()
        };
        let trace = run(&mut st, &opts).unwrap();
        let audit = audit_trace(&trace.to_csv()).unwrap();
        assert_eq!(audit.rows, trace.checkpoints.len());
        assert!(audit.consistent);
        assert_eq!(audit.points_failures, audit.recorded_failures);
        assert!(audit_trace("i,open\n1,2\n").is_err());
    }
}
