//! The two solvers of the mild equation on the same mesh: Picard iteration over the
//! whole horizon and the step-by-step march.

use fracheat::kernel::build_kernel_profile;
use fracheat::operators::{Field, SpaceGrid, TimeMesh};
use fracheat::solver::{march, picard, SolveConfig};
use fracheat::ModelParams;

fn main() -> fracheat::Result<()> {
    let params = ModelParams::new(1.5, 0.5, 1, 2.0)?;
    let k = build_kernel_profile(&params, 6)?;
    let grid = SpaceGrid::with_spacing(40.0, 0.5)?;
    let v0 = Field::from_fn(grid, 0.0, |x| 0.5 * k.density(1.0, x.abs()))?;
    let mut cfg = SolveConfig::new(params, TimeMesh::uniform(5.0, 40)?, v0);
    cfg.refine = false;
    let marched = march(&k, &cfg)?;
    let fixed = picard(&k, &cfg, 5.0)?;
    let last = fixed.fields.last().expect("picard returns every node");
    let diff = last.values.iter().zip(&marched.final_field.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("picard: {} iterations, last update {:.2e}", fixed.iterations, fixed.last_difference);
    println!("sup |picard - march| at t = 5: {diff:.2e}");
    Ok(())
}
