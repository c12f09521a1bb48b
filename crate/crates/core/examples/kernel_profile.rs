//! Builds the self-similar profile of `G(t, x)` and reads off mass, tails and the two-sided envelope.

use fracheat::kernel::{bound_envelope, build_kernel_profile, envelope_grid};
use fracheat::ModelParams;

fn main() -> fracheat::Result<()> {
    let params = ModelParams::new(1.5, 0.5, 1, 1.0)?;
    let k = build_kernel_profile(&params, 6)?;
    println!("near-origin model {:?}, far-field constant {:.6e}", k.near_origin_model, k.tail_constant);
    println!("total mass {:.12}", k.total_mass());
    for z in [0.0, 0.5, 1.0, 5.0, 50.0] {
        println!("Phi({z:>4}) = {:.8e}", k.phi(z));
    }
    for t in [0.1, 1.0, 10.0] {
        println!("G({t}, 1) = {:.8e}", k.density(t, 1.0));
    }
    let env = bound_envelope(&k, &envelope_grid((1e-2, 1e2), (1e-2, 1e2), 20, 20, true))?;
    println!("c1 = {:.4}, c2 = {:.4}, spread {:.3}", env.lower, env.upper, env.spread());
    Ok(())
}
