//! Below and above `eta_c = alpha / (beta d)`: small data blows up for `eta = 1` and
//! stays under the heat-kernel envelope for `eta = 5`.

use fracheat::kernel::build_kernel_profile;
use fracheat::operators::{Field, SpaceGrid, TimeMesh};
use fracheat::solver::{march, SolveConfig};
use fracheat::ModelParams;

fn main() -> fracheat::Result<()> {
    let params = ModelParams::new(1.5, 0.5, 1, 1.0)?;
    let k = build_kernel_profile(&params, 6)?;
    println!("eta_c = {}", params.eta_c());

    let grid = SpaceGrid::with_spacing(200.0, 0.5)?;
    let v0 = Field::indicator(grid, -1.0, 1.0, 0.01)?;
    let trace = march(&k, &SolveConfig::new(params, TimeMesh::uniform(2500.0, 400)?, v0))?;
    println!("eta = 1, v0 = 0.01 on [-1, 1]: {:?}", trace.verdict);

    let grid = SpaceGrid::with_spacing(100.0, 0.5)?;
    let v0 = Field::from_fn(grid, 0.0, |x| 0.01 * k.density(1.0, x.abs()))?;
    let cfg = SolveConfig::new(params.with_eta(5.0)?, TimeMesh::uniform(100.0, 100)?, v0).with_decay_test(1.0, 0.01);
    let trace = march(&k, &cfg)?;
    println!("eta = 5, v0 = 0.01 G(1, .): {:?}", trace.verdict);
    println!("sup_t sup_x V / G(t + 1, x) = {:.6}", trace.max_weighted_ratio().unwrap_or(f64::NAN));
    Ok(())
}
