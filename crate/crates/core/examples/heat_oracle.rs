//! With u₀ = B₀ and equal Reynolds numbers, W⁻ stays zero and W⁺ follows
//! the heat flow exactly. A 1% error in the decay rate is detected.

use elsasser_mhd::dynamics::IntegratorConfig;
use elsasser_mhd::fields::{generate_initial, make_params, to_elsasser, InitialDataSpec};
use elsasser_mhd::spectral::Grid;
use elsasser_mhd::verification::{heat_oracle, heat_oracle_for};

fn main() -> elsasser_mhd::Result<()> {
    let grid = Grid::new(16)?;
    let params = make_params(1.0, 1.0, 1.0)?;
    let cfg = IntegratorConfig {
        dt: 1e-3,
        t_end: 0.2,
        monitor_every: 50,
        ..IntegratorConfig::default()
    };
    let report = heat_oracle(grid, &params, &cfg)?;
    println!("{}", serde_json::to_string_pretty(&report)?);

    let spec = InitialDataSpec::taylor_green(1.0).with_magnetic(1.0, 0.0);
    let w0 = to_elsasser(&generate_initial(&spec, grid)?)?;
    let off = heat_oracle_for(&w0, &params, &cfg, 1.01 * params.kappa())?;
    println!(
        "with kappa off by 1%: passed={} margin={:?}",
        off.passed, off.margin
    );
    Ok(())
}
