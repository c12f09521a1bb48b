//! Mittag-Leffler decay `E_beta(-t)` next to its two-sided rational bound.

use fracheat::specfun::mittag_leffler_neg;
use statrs::function::gamma::gamma;

fn main() -> fracheat::Result<()> {
    println!("{:>5} {:>10} {:>14} {:>14} {:>14}", "beta", "t", "lower", "E_beta(-t)", "upper");
    for beta in [0.25, 0.5, 0.9] {
        for t in [0.01, 1.0, 100.0, 1e6] {
            let e = mittag_leffler_neg(beta, t)?;
            let lower = 1.0 / (1.0 + gamma(1.0 - beta) * t);
            let upper = 1.0 / (1.0 + t / gamma(1.0 + beta));
            println!("{beta:>5} {t:>10.0e} {lower:>14.6e} {e:>14.6e} {upper:>14.6e}");
        }
    }
    // the tail is algebraic, t^-1 / Gamma(1 - beta), not exponential
    let t = 1e8;
    println!("t E_0.5(-t) at t = 1e8: {:.6} (1/Gamma(1/2) = {:.6})", t * mittag_leffler_neg(0.5, t)?, 1.0 / gamma(0.5));
    Ok(())
}
