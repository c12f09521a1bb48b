//! Decay of the linear flow from a point mass: `|G(t) V0|_r ~ t^(-(beta d / alpha)(1 - 1/r))`.

use fracheat::kernel::build_kernel_profile;
use fracheat::operators::{Field, SpaceGrid};
use fracheat::verify::check_lp_decay;
use fracheat::ModelParams;

fn main() -> fracheat::Result<()> {
    let k = build_kernel_profile(&ModelParams::new(1.5, 0.5, 1, 1.0)?, 6)?;
    let delta = Field::delta(SpaceGrid::with_spacing(200.0, 0.05)?);
    let times: Vec<f64> = (0..21).map(|i| 10f64.powf(1.0 + i as f64 / 10.0)).collect();
    for r in [f64::INFINITY, 4.0, 2.0] {
        let rep = check_lp_decay(&k, &delta, 1.0, r, &times)?;
        println!("r = {r}: fitted {:.5}, predicted {:.5}", rep.measured["exponent"], rep.measured["young_exponent"]);
    }
    Ok(())
}
