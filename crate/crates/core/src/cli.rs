//! Command implementations behind the `mhd` binary.
//!
//! Each command writes its JSON or CSV result to `out` and returns the
//! process exit code. Errors map to [`EXIT_USAGE`].

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::conditions::{evaluate_all, ConditionReport};
use crate::dynamics::{simulate, RunStatus};
use crate::error::{Error, Result};
use crate::fields::FluidParams;
use crate::io::checkpoint::{checkpoint_read, checkpoint_write};
use crate::io::config::{parse_config, OutputFormat, RunConfig, VerifyCheck};
use crate::io::csv::write_timeseries;
use crate::io::sweep::{parse_sweep_config, run_sweep, sweep_to_csv};
use crate::norms::{MonitorRow, StateNorms};
use crate::verification::{
    check_apriori_thm1, check_apriori_thm2, check_energy_balance, check_scaling_equivalence,
    convergence_check, heat_oracle, pressure_estimate_ratio, self_convergence, CheckReport,
    ORACLE_TOLERANCE,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;

/// Relative residual allowed by the energy check in `verify`.
pub const ENERGY_TOLERANCE: f64 = 1e-6;
/// Relative field discrepancy allowed by the scaling check in `verify`.
pub const SCALING_TOLERANCE: f64 = 1e-5;

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

fn emit(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    writeln!(out, "{text}").map_err(|e| Error::io("<stdout>", e))
}

#[derive(Serialize)]
struct RunSummary<'a> {
    status: RunStatus,
    steps_taken: usize,
    final_time: f64,
    config_digest: String,
    params: FluidParams,
    conditions: &'a [ConditionReport],
    final_monitors: Option<MonitorRow>,
    outputs: Vec<PathBuf>,
}

/// `simulate --config F [--out D]`: runs the configured trajectory and
/// writes `timeseries.csv`, `final.chk` and `run.json` per `output.formats`.
pub fn cmd_simulate(config: &Path, out_dir: Option<&Path>, out: &mut dyn Write) -> Result<i32> {
    let cfg = load_config(config)?;
    let dir = out_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| cfg.output.directory.clone());
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;

    let initial = cfg.initial_state()?;
    let mut run = simulate(&initial, &cfg.params, &cfg.integrator, &cfg.conditions)?;
    run.series.config_digest = cfg.digest();

    let mut outputs = Vec::new();
    if cfg.output.formats.contains(&OutputFormat::Csv) {
        let path = dir.join("timeseries.csv");
        write_timeseries(&run.series, &path)?;
        outputs.push(path);
    }
    if cfg.output.formats.contains(&OutputFormat::Checkpoint) {
        let path = dir.join("final.chk");
        checkpoint_write(&run.final_state, &cfg.params, &path)?;
        outputs.push(path);
    }
    let json_path = dir.join("run.json");
    let want_json = cfg.output.formats.contains(&OutputFormat::Json);
    if want_json {
        outputs.push(json_path.clone());
    }
    let summary = RunSummary {
        status: run.status,
        steps_taken: run.steps_taken,
        final_time: run.final_state.time,
        config_digest: cfg.digest(),
        params: cfg.params,
        conditions: &run.conditions,
        final_monitors: run.series.last().copied(),
        outputs,
    };
    if want_json {
        let text = serde_json::to_string_pretty(&summary)?;
        std::fs::write(&json_path, text).map_err(|e| Error::io(&json_path, e))?;
    }
    emit(out, &summary)?;
    Ok(match run.status {
        RunStatus::Completed => EXIT_OK,
        RunStatus::BlowupDetected | RunStatus::CflViolation => EXIT_BLOWUP,
    })
}

#[derive(Serialize)]
struct CheckSummary {
    config_digest: String,
    lambda_kappa_ratio: f64,
    implied_ratio_bound: f64,
    reports: Vec<ConditionReport>,
}

/// `check --config F`: evaluates the four smallness conditions on the
/// configured initial data.
pub fn cmd_check(config: &Path, out: &mut dyn Write) -> Result<i32> {
    let cfg = load_config(config)?;
    let initial = cfg.initial_state()?;
    let reports = evaluate_all(&cfg.params, &initial, &cfg.conditions)?;
    emit(
        out,
        &CheckSummary {
            config_digest: cfg.digest(),
            lambda_kappa_ratio: cfg.params.lambda_kappa_ratio(),
            implied_ratio_bound: cfg.conditions.implied_ratio_bound(),
            reports,
        },
    )?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct VerifySummary {
    config_digest: String,
    run_status: Option<RunStatus>,
    failed: usize,
    checks: Vec<CheckReport>,
}

/// Runs the checks listed in `verify.checks` for a parsed config.
pub fn verify_suite(cfg: &RunConfig) -> Result<(Option<RunStatus>, Vec<CheckReport>)> {
    let initial = cfg.initial_state()?;
    let needs_run = cfg.verify.iter().any(|c| {
        matches!(
            c,
            VerifyCheck::AprioriThm1 | VerifyCheck::AprioriThm2 | VerifyCheck::Energy
        )
    });
    let run = if needs_run {
        Some(simulate(
            &initial,
            &cfg.params,
            &cfg.integrator,
            &cfg.conditions,
        )?)
    } else {
        None
    };
    let mut checks = Vec::new();
    for check in &cfg.verify {
        let report = match check {
            VerifyCheck::Heat => match heat_oracle(cfg.grid, &cfg.params, &cfg.integrator) {
                Ok(r) => r,
                Err(Error::Precondition(msg)) => {
                    CheckReport::not_applicable("heat_oracle", ORACLE_TOLERANCE, msg)
                }
                Err(e) => return Err(e),
            },
            VerifyCheck::AprioriThm1 => {
                check_apriori_thm1(&run.as_ref().expect("run present").series, &cfg.conditions)
            }
            VerifyCheck::AprioriThm2 => {
                check_apriori_thm2(&run.as_ref().expect("run present").series, &cfg.conditions)
            }
            VerifyCheck::Energy => {
                check_energy_balance(&run.as_ref().expect("run present").series, ENERGY_TOLERANCE)
            }
            VerifyCheck::Scaling => check_scaling_equivalence(
                &initial,
                &cfg.params,
                &cfg.integrator,
                SCALING_TOLERANCE,
            )?,
            VerifyCheck::Convergence => {
                convergence_check(&self_convergence(&initial, &cfg.params, &cfg.integrator)?)
            }
        };
        checks.push(report);
    }
    Ok((run.map(|r| r.status), checks))
}

/// `verify --config F`: exit status 2 when any applicable check fails.
pub fn cmd_verify(config: &Path, out: &mut dyn Write) -> Result<i32> {
    let cfg = load_config(config)?;
    let (run_status, checks) = verify_suite(&cfg)?;
    let failed = checks.iter().filter(|c| c.is_failure()).count();
    emit(
        out,
        &VerifySummary {
            config_digest: cfg.digest(),
            run_status,
            failed,
            checks,
        },
    )?;
    Ok(if failed > 0 {
        EXIT_VERIFY_FAILED
    } else {
        EXIT_OK
    })
}

/// `sweep --config F [--out D]`: prints the sweep table, and writes it to
/// `D/sweep.csv` when `--out` is given.
pub fn cmd_sweep(config: &Path, out_dir: Option<&Path>, out: &mut dyn Write) -> Result<i32> {
    let text = std::fs::read_to_string(config).map_err(|e| Error::io(config, e))?;
    let sc = parse_sweep_config(&text)?;
    let rows = run_sweep(&sc);
    let table = sweep_to_csv(&sc, &rows);
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("sweep.csv");
        std::fs::write(&path, &table).map_err(|e| Error::io(&path, e))?;
    }
    out.write_all(table.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct NormsSummary {
    time: f64,
    n: usize,
    params: FluidParams,
    norms: StateNorms,
    pressure_estimate_ratio: f64,
}

/// `norms --checkpoint F`: every monitored norm of a saved state.
pub fn cmd_norms(checkpoint: &Path, out: &mut dyn Write) -> Result<i32> {
    let (state, params) = checkpoint_read(checkpoint)?;
    let norms = StateNorms::compute(&state, &params)?;
    emit(
        out,
        &NormsSummary {
            time: state.time,
            n: state.grid().n(),
            params,
            norms,
            pressure_estimate_ratio: pressure_estimate_ratio(&state)?,
        },
    )?;
    Ok(EXIT_OK)
}
