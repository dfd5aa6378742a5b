//! Parameters, Elsasser variables and the unit-diffusivity rescaling.

use elsasser_mhd::fields::{
    from_elsasser, generate_initial, make_params, rescale_from_v, rescale_to_v, to_elsasser,
    InitialDataSpec,
};
use elsasser_mhd::spectral::Grid;

fn main() -> elsasser_mhd::Result<()> {
    let params = make_params(50.0, 10.0, 4.0)?;
    println!(
        "Re={} Rm={} S={}  ->  kappa={} lambda={} |lambda|/kappa={:.4}",
        params.re(),
        params.rm(),
        params.s_coupling(),
        params.kappa(),
        params.lambda(),
        params.lambda_kappa_ratio()
    );

    let grid = Grid::new(16)?;
    let spec = InitialDataSpec::taylor_green(1.0).with_magnetic(0.5, 0.2);
    let prim = generate_initial(&spec, grid)?.absorb_coupling(&params);
    let w = to_elsasser(&prim)?;
    let back = from_elsasser(&w);
    println!("round trip error: {:.2e}", back.u.max_rel_diff(&prim.u));

    let (v, unit) = rescale_to_v(&w, &params)?;
    println!(
        "rescaled: kappa'={} lambda'={:.6}",
        unit.kappa(),
        unit.lambda()
    );
    let again = rescale_from_v(&v, params.kappa());
    println!("rescale inverse error: {:.2e}", again.max_rel_diff(&w));
    Ok(())
}
