//! A conditions-only sweep over |λ|/κ and data amplitude.

use elsasser_mhd::io::sweep::{parse_sweep_config, run_sweep, sweep_to_csv};

const SWEEP: &str = "
grid.n = 16
params.kappa = 1
initial.magnetic_ratio = 1
initial.magnetic_perturbation = 0.05
sweep.mode = conditions-only
sweep.axis.params.lambda_ratio = 0, 0.1, 0.3
sweep.axis.initial.amplitude = 0.01, 0.1
sweep.workers = 2
";

fn main() -> elsasser_mhd::Result<()> {
    let sc = parse_sweep_config(SWEEP)?;
    let rows = run_sweep(&sc);
    print!("{}", sweep_to_csv(&sc, &rows));
    Ok(())
}
