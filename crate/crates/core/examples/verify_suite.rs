//! Trajectory checks on a compliant run: the a priori inequalities, the
//! energy identity, temporal convergence and the rescaling equivalence.

use elsasser_mhd::conditions::ConditionParams;
use elsasser_mhd::dynamics::{simulate, IntegratorConfig};
use elsasser_mhd::fields::{generate_initial, to_elsasser, FluidParams, InitialDataSpec};
use elsasser_mhd::spectral::Grid;
use elsasser_mhd::verification::{
    check_apriori_thm1, check_apriori_thm2, check_energy_balance, check_scaling_equivalence,
    convergence_check, self_convergence, CheckReport,
};

fn show(r: &CheckReport) {
    println!(
        "{:<20} {:?}  margin={:?}",
        r.name,
        r.status,
        r.margin.map(|m| format!("{m:.3e}"))
    );
}

fn main() -> elsasser_mhd::Result<()> {
    let grid = Grid::new(16)?;
    let cp = ConditionParams::default();
    let spec = InitialDataSpec::taylor_green(0.05).with_magnetic(1.0, 0.02);
    let w0 = to_elsasser(&generate_initial(&spec, grid)?)?;

    for ratio in [0.0, 0.05] {
        let params = FluidParams::from_diffusivities(1.0, ratio, 1.0)?;
        let cfg = IntegratorConfig {
            dt: 1e-2,
            t_end: 0.5,
            monitor_every: 1,
            ..IntegratorConfig::default()
        };
        let run = simulate(&w0, &params, &cfg, &cp)?;
        println!("|lambda|/kappa = {ratio}");
        show(&check_apriori_thm1(&run.series, &cp));
        show(&check_apriori_thm2(&run.series, &cp));
        show(&check_energy_balance(&run.series, 1e-6));
    }

    let params = FluidParams::from_diffusivities(0.02, 0.002, 1.0)?;
    let big = to_elsasser(&generate_initial(
        &InitialDataSpec::taylor_green(1.0).with_magnetic(0.3, 0.4),
        grid,
    )?)?;
    let cfg = IntegratorConfig {
        dt: 2e-2,
        t_end: 0.4,
        monitor_every: 5,
        ..IntegratorConfig::default()
    };
    let conv = self_convergence(&big, &params, &cfg)?;
    println!("successive differences {:?}", conv.differences);
    show(&convergence_check(&conv));

    let params = FluidParams::from_diffusivities(2.0, 0.2, 1.0)?;
    let cfg = IntegratorConfig {
        dt: 1e-3,
        t_end: 0.05,
        monitor_every: 10,
        ..IntegratorConfig::default()
    };
    show(&check_scaling_equivalence(&big, &params, &cfg, 1e-5)?);
    Ok(())
}
