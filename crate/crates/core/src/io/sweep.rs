//! Cartesian parameter sweeps over run configurations.
//!
//! A sweep file is a run config plus `sweep.*` keys:
//!
//! ```text
//! sweep.mode = conditions-only        # or simulate
//! sweep.axis.params.lambda_ratio = 0, 0.05, 0.1
//! sweep.axis.initial.amplitude = 0.1, 1
//! sweep.cap = 10000
//! sweep.workers = 1
//! ```
//!
//! Points are ordered with the first axis varying slowest. Each point owns
//! its row; a point whose config is invalid or whose run errors records the
//! message in-row and the sweep continues.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use serde::Serialize;

use crate::conditions::{evaluate_all, Condition, ConditionReport};
use crate::dynamics::{simulate, RunStatus};
use crate::error::{Error, Result};
use crate::io::config::{config_from_entries, parse_entries, RunConfig, RUN_KEYS};
use crate::norms::MonitorRow;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    ConditionsOnly,
    Simulate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub base: RunConfig,
    base_entries: BTreeMap<String, String>,
    /// `(key path, values)` in file order.
    pub axes: Vec<(String, Vec<String>)>,
    pub mode: SweepMode,
    pub cap: usize,
    pub workers: usize,
}

impl SweepConfig {
    pub fn point_count(&self) -> usize {
        self.axes.iter().map(|(_, v)| v.len()).product()
    }

    /// Axis values of point `index`.
    pub fn point(&self, index: usize) -> Vec<&str> {
        let mut rest = index;
        let mut out = vec![""; self.axes.len()];
        for (slot, (_, values)) in out.iter_mut().zip(&self.axes).rev() {
            *slot = values[rest % values.len()].as_str();
            rest /= values.len();
        }
        out
    }
}

pub fn parse_sweep_config(text: &str) -> Result<SweepConfig> {
    let mut base_entries = BTreeMap::new();
    let mut axes = Vec::new();
    let mut mode = SweepMode::ConditionsOnly;
    let mut cap = 10_000usize;
    let mut workers = 1usize;
    for (key, value) in parse_entries(text)? {
        if let Some(path) = key.strip_prefix("sweep.axis.") {
            if !RUN_KEYS.contains(&path) {
                return Err(Error::config(&key, format!("`{path}` is not a run key")));
            }
            let values: Vec<String> = value
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            if values.is_empty() {
                return Err(Error::config(&key, "axis needs at least one value"));
            }
            axes.push((path.to_string(), values));
        } else if key == "sweep.mode" {
            mode = match value.as_str() {
                "conditions-only" => SweepMode::ConditionsOnly,
                "simulate" => SweepMode::Simulate,
                other => {
                    return Err(Error::config(
                        key,
                        format!("expected conditions-only or simulate, got `{other}`"),
                    ))
                }
            };
        } else if key == "sweep.cap" {
            cap = value
                .parse()
                .map_err(|_| Error::config(&key, format!("cannot parse `{value}` as a count")))?;
        } else if key == "sweep.workers" {
            workers = value
                .parse()
                .ok()
                .filter(|&w: &usize| w >= 1)
                .ok_or_else(|| Error::config(&key, "workers must be an integer >= 1"))?;
        } else if RUN_KEYS.contains(&key.as_str()) {
            base_entries.insert(key, value);
        } else {
            return Err(Error::config(key, "unknown key"));
        }
    }
    let base = config_from_entries(&base_entries)?;
    let count = axes
        .iter()
        .try_fold(1usize, |acc, (_, v): &(String, Vec<String>)| {
            acc.checked_mul(v.len())
        });
    match count {
        Some(c) if c <= cap => {}
        _ => {
            return Err(Error::config(
                "sweep.cap",
                format!("sweep has more than {cap} points"),
            ))
        }
    }
    Ok(SweepConfig {
        base,
        base_entries,
        axes,
        mode,
        cap,
        workers,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub values: Vec<String>,
    pub lambda_kappa_ratio: Option<f64>,
    pub conditions: Vec<ConditionReport>,
    pub status: Option<RunStatus>,
    pub steps: Option<usize>,
    pub final_row: Option<MonitorRow>,
    pub error: Option<String>,
}

fn run_point(sc: &SweepConfig, index: usize) -> SweepRow {
    let values: Vec<String> = sc.point(index).into_iter().map(String::from).collect();
    let mut row = SweepRow {
        index,
        values,
        lambda_kappa_ratio: None,
        conditions: Vec::new(),
        status: None,
        steps: None,
        final_row: None,
        error: None,
    };
    if let Err(e) = fill_point(sc, &mut row) {
        row.error = Some(e.to_string());
    }
    row
}

fn fill_point(sc: &SweepConfig, row: &mut SweepRow) -> Result<()> {
    let mut entries = sc.base_entries.clone();
    for ((path, _), v) in sc.axes.iter().zip(&row.values) {
        entries.insert(path.clone(), v.clone());
    }
    let cfg = config_from_entries(&entries)?;
    row.lambda_kappa_ratio = Some(cfg.params.lambda_kappa_ratio());
    let initial = cfg.initial_state()?;
    row.conditions = evaluate_all(&cfg.params, &initial, &cfg.conditions)?;
    if sc.mode == SweepMode::Simulate {
        let run = simulate(&initial, &cfg.params, &cfg.integrator, &cfg.conditions)?;
        row.status = Some(run.status);
        row.steps = Some(run.steps_taken);
        row.final_row = run.series.last().copied();
    }
    Ok(())
}

/// Evaluates every point. Rows come back in point order regardless of
/// `workers`.
pub fn run_sweep(sc: &SweepConfig) -> Vec<SweepRow> {
    let total = sc.point_count();
    let workers = sc.workers.min(total.max(1));
    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<SweepRow>> = vec![None; total];
    let (tx, rx) = mpsc::channel::<SweepRow>();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let next = &next;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= total {
                    break;
                }
                if tx.send(run_point(sc, i)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for row in rx {
            let i = row.index;
            slots[i] = Some(row);
        }
    });
    slots
        .into_iter()
        .map(|r| r.expect("every point reports"))
        .collect()
}

fn csv_text(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

/// Sweep table as CSV: axis values, `|λ|/κ`, the four condition left-hand
/// sides and verdicts, run outcome and final monitors, and any error.
pub fn sweep_to_csv(sc: &SweepConfig, rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str("index");
    for (path, _) in &sc.axes {
        let _ = write!(out, ",{path}");
    }
    out.push_str(",lambda_kappa_ratio");
    for c in Condition::ALL {
        let _ = write!(out, ",lhs_{0},holds_{0}", c.name());
    }
    out.push_str(",status,steps,final_t,final_energy,final_a_minus_l3,final_a_minus_h12,error\n");
    for r in rows {
        let _ = write!(out, "{}", r.index);
        for v in &r.values {
            let _ = write!(out, ",{}", csv_text(v));
        }
        let _ = write!(out, ",{}", opt(r.lambda_kappa_ratio));
        for c in Condition::ALL {
            match r.conditions.iter().find(|x| x.which == c) {
                Some(rep) => {
                    let _ = write!(out, ",{:?},{}", rep.lhs, rep.holds);
                }
                None => out.push_str(",,"),
            }
        }
        let fr = r.final_row.as_ref();
        let _ = writeln!(
            out,
            ",{},{},{},{},{},{},{}",
            r.status.map(|s| s.name()).unwrap_or(""),
            r.steps.map(|s| s.to_string()).unwrap_or_default(),
            opt(fr.map(|f| f.t)),
            opt(fr.map(|f| f.total_energy())),
            opt(fr.map(|f| f.a_minus_l3)),
            opt(fr.map(|f| f.a_minus_h12)),
            r.error.as_deref().map(csv_text).unwrap_or_default(),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "grid.n = 8\nparams.kappa = 1\ninitial.amplitude = 0.05\n\
                        initial.magnetic_ratio = 0.5\n";

    #[test]
    fn point_order_is_row_major() {
        let sc = parse_sweep_config(&format!(
            "{BASE}sweep.axis.params.lambda_ratio = 0, 0.1\nsweep.axis.initial.amplitude = 1, 2, 3"
        ))
        .unwrap();
        assert_eq!(sc.point_count(), 6);
        assert_eq!(sc.point(0), vec!["0", "1"]);
        assert_eq!(sc.point(2), vec!["0", "3"]);
        assert_eq!(sc.point(3), vec!["0.1", "1"]);
    }

    #[test]
    fn lhs_increases_with_lambda_ratio() {
        let sc = parse_sweep_config(&format!(
            "{BASE}sweep.axis.params.lambda_ratio = 0, 0.05, 0.1"
        ))
        .unwrap();
        let rows = run_sweep(&sc);
        let lhs: Vec<f64> = rows
            .iter()
            .map(|r| {
                r.conditions
                    .iter()
                    .find(|c| c.which == Condition::Thm2Minus)
                    .unwrap()
                    .lhs
            })
            .collect();
        assert!(lhs[0] < lhs[1] && lhs[1] < lhs[2], "{lhs:?}");
    }

    #[test]
    fn bad_point_is_recorded_in_row() {
        let sc =
            parse_sweep_config(&format!("{BASE}sweep.axis.params.lambda_ratio = 0, 2")).unwrap();
        let rows = run_sweep(&sc);
        assert!(rows[0].error.is_none());
        let err = rows[1].error.as_deref().unwrap();
        assert!(err.contains("params.lambda_ratio"), "{err}");
    }

    #[test]
    fn cap_and_unknown_axis() {
        let err = parse_sweep_config(&format!(
            "{BASE}sweep.cap = 2\nsweep.axis.initial.amplitude = 1,2,3"
        ))
        .unwrap_err();
        assert!(err.to_string().contains("sweep.cap"));
        let err = parse_sweep_config("sweep.axis.grid.m = 8").unwrap_err();
        assert!(err.to_string().contains("sweep.axis.grid.m"));
    }

    #[test]
    fn no_axes_is_a_single_point() {
        let sc = parse_sweep_config(BASE).unwrap();
        assert_eq!(sc.point_count(), 1);
        let rows = run_sweep(&sc);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].conditions.len(), 4);
    }

    #[test]
    fn workers_do_not_change_output() {
        let text = format!(
            "{BASE}sweep.axis.params.lambda_ratio = 0, 0.05, 0.1, 0.2\nsweep.axis.initial.amplitude = 0.1, 1"
        );
        let one = parse_sweep_config(&text).unwrap();
        let three = parse_sweep_config(&format!("{text}\nsweep.workers = 3")).unwrap();
        let a = sweep_to_csv(&one, &run_sweep(&one));
        let b = sweep_to_csv(&three, &run_sweep(&three));
        assert_eq!(a, b);
    }
}
