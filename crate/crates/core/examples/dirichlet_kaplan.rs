//! The ball problem: with `beta < 1` the first mode decays only like `t^-beta`, so
//! even tiny data blows up for `eta = 0.5`; with `beta = 1` the same data decays away.

use fracheat::dirichlet::{build_basis, dirichlet_march, ode_blowup_time, DirichletConfig};
use fracheat::operators::{Field, TimeMesh};
use fracheat::ModelParams;

fn main() -> fracheat::Result<()> {
    let basis = build_basis(1.5, 1.0, 65, 24)?;
    println!("nu_1 = {:.6}, orthonormality residual {:.1e}", basis.eigenvalues[0], basis.orthonormality_residual(10));
    let k = 1e-3;
    let mut values = vec![0.0];
    values.extend(basis.modes[0].iter().map(|v| k * v.max(0.0)));
    values.push(0.0);
    let v0 = Field::new(basis.grid, values, 0.0)?;
    println!("comparison ODE blow-up time for K = 1: {:?}", ode_blowup_time(0.5, 0.5, 1.0)?);
    for beta in [0.5, 1.0] {
        let params = ModelParams::new(1.5, beta, 1, 0.5)?;
        let cfg = DirichletConfig::new(basis.clone(), params, v0.clone(), TimeMesh::geometric(1e-4, 1e9, 300)?);
        let trace = dirichlet_march(&cfg)?;
        println!("beta = {beta}: {:?}", trace.verdict);
    }
    Ok(())
}
