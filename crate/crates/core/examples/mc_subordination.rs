//! Monte-Carlo check of the subordination formula at `(alpha, beta) = (1, 0.5)`.

use fracheat::kernel::build_kernel_profile;
use fracheat::verify::mc_subordination_oracle;
use fracheat::ModelParams;

fn main() -> fracheat::Result<()> {
    let params = ModelParams::new(1.0, 0.5, 1, 1.0)?;
    let k = build_kernel_profile(&params, 6)?;
    for x in [0.5, 1.0, 2.0, 4.0] {
        let est = mc_subordination_oracle(&params, 1.0, &[x], 1_000_000, 7)?;
        let g = k.density(1.0, x);
        println!(
            "x = {x}: MC {:.6} +- {:.1e}, kernel {g:.6}, {:.2} sigma",
            est.estimate,
            est.std_error,
            (est.estimate - g).abs() / est.std_error
        );
    }
    Ok(())
}
