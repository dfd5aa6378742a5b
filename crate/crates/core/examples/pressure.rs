//! Pressure recovered from the Elsasser fields, and the observed constant
//! in the L^{9/4} pressure estimate along a short run.

use elsasser_mhd::conditions::ConditionParams;
use elsasser_mhd::dynamics::{recover_pressure, simulate_with, IntegratorConfig};
use elsasser_mhd::fields::{
    generate_initial, make_params, to_elsasser, ElsasserState, InitialDataSpec,
};
use elsasser_mhd::spectral::{to_spectral, Grid, PhysicalVectorField};
use elsasser_mhd::verification::pressure_estimate_ratio;

fn main() -> elsasser_mhd::Result<()> {
    let grid = Grid::new(16)?;
    let wm = to_spectral(&PhysicalVectorField::from_fn(grid, |x| {
        [x[1].cos(), 0.0, 0.0]
    }))?;
    let wp = to_spectral(&PhysicalVectorField::from_fn(grid, |x| {
        [0.0, x[0].cos(), 0.0]
    }))?;
    let e = ElsasserState::new(wp, wm, 0.0)?;
    let p = recover_pressure(&e)?;
    println!(
        "P(k=(1,1,0)) = {:?}  (sin x1 sin x2 / 2 has -1/8)",
        p.coeff_at([1, 1, 0])
    );

    let params = make_params(20.0, 20.0, 1.0)?;
    let spec = InitialDataSpec::taylor_green(1.0).with_magnetic(0.3, 0.4);
    let w0 = to_elsasser(&generate_initial(&spec, grid)?)?;
    let cfg = IntegratorConfig {
        dt: 1e-2,
        t_end: 0.5,
        ..IntegratorConfig::default()
    };
    let mut seen = 0usize;
    simulate_with(&w0, &params, &cfg, &ConditionParams::default(), |s| {
        if seen.is_multiple_of(10) {
            if let Ok(r) = pressure_estimate_ratio(s) {
                println!("t={:.2}  |P|_(9/4) / (|W-|_3 |W+|_9) = {r:.4}", s.time);
            }
        }
        seen += 1;
    })?;
    Ok(())
}
