//! Runs Taylor–Green MHD data, writes the monitor CSV and a checkpoint,
//! then reads both back.

use elsasser_mhd::conditions::ConditionParams;
use elsasser_mhd::dynamics::{simulate, IntegratorConfig};
use elsasser_mhd::fields::{generate_initial, make_params, to_elsasser, InitialDataSpec};
use elsasser_mhd::io::{checkpoint_read, checkpoint_write, read_timeseries, write_timeseries};
use elsasser_mhd::spectral::Grid;

fn main() -> elsasser_mhd::Result<()> {
    let grid = Grid::new(16)?;
    let params = make_params(20.0, 20.0, 1.0)?;
    let spec = InitialDataSpec::taylor_green(1.0).with_magnetic(0.3, 0.4);
    let w0 = to_elsasser(&generate_initial(&spec, grid)?.absorb_coupling(&params))?;
    let cfg = IntegratorConfig {
        dt: 5e-3,
        t_end: 0.5,
        monitor_every: 20,
        ..IntegratorConfig::default()
    };
    let run = simulate(&w0, &params, &cfg, &ConditionParams::default())?;
    println!("status={} steps={}", run.status.name(), run.steps_taken);
    for row in &run.series.rows {
        println!(
            "t={:.3}  E={:.6}  a_minus_l3={:.3e}  div={:.1e}",
            row.t,
            row.total_energy(),
            row.a_minus_l3,
            row.div_max
        );
    }

    let dir = std::env::temp_dir().join("elsasser_tg_example");
    std::fs::create_dir_all(&dir).map_err(|e| elsasser_mhd::Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    let csv = dir.join("timeseries.csv");
    let chk = dir.join("final.chk");
    write_timeseries(&run.series, &csv)?;
    checkpoint_write(&run.final_state, &params, &chk)?;

    let rows = read_timeseries(&csv, params)?;
    let (state, _) = checkpoint_read(&chk)?;
    println!("csv rows read back: {}", rows.len());
    println!("checkpoint identical: {}", state == run.final_state);
    println!("files in {}", dir.display());
    Ok(())
}
