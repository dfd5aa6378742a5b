//! Transforms, projection and norms on a small grid.

use elsasser_mhd::norms::{hs_norm, lp_norm};
use elsasser_mhd::spectral::{
    dealias_two_thirds, divergence_max, leray_project, to_physical, to_spectral, Grid,
    PhysicalVectorField,
};

fn main() -> elsasser_mhd::Result<()> {
    let grid = Grid::new(16)?;

    // cos(x1) e2 is divergence-free; sin(x1) e1 is a pure gradient.
    let f = PhysicalVectorField::from_fn(grid, |x| [x[0].sin(), x[0].cos(), 0.0]);
    let g = to_spectral(&f)?;
    println!("coefficient at k=(1,0,0): {:?}", g.coeff_at([1, 0, 0]));
    println!("divergence before projection: {:.3e}", divergence_max(&g));

    let p = leray_project(&g);
    println!("divergence after projection:  {:.3e}", divergence_max(&p));

    let back = to_physical(&p)?;
    println!("max |Pf| = {:.6}", back.max_magnitude());
    println!("L2 = {:.12}", hs_norm(&p, 0.0)?);
    println!("H^1/2 = {:.12}", hs_norm(&p, 0.5)?);
    println!("L3 = {:.12}", lp_norm(&back, 3.0)?);

    let kept = dealias_two_thirds(&g);
    println!("L2 after dealiasing = {:.12}", hs_norm(&kept, 0.0)?);
    Ok(())
}
