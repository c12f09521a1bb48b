//! Special functions: symmetric stable densities, the one-sided stable
//! (subordinator) density, the inverse-subordinator density and the
//! Mittag-Leffler function on the negative real axis.

mod mittag_leffler;
mod stable;
mod subordinator;

pub use mittag_leffler::{mittag_leffler_neg, mittag_leffler_neg2};
pub use stable::{
    stable_density, stable_density_radial, stable_tail_constant, stable_unit_density_1d,
    stable_unit_density_1d_derivative, StableProfile,
};
pub use subordinator::{
    inverse_subordinator_density, ln_subordinator_density, sample_subordinator, subordinator_cdf, subordinator_density,
    subordinator_tail_constant,
};

use statrs::function::gamma::{gamma, ln_gamma};

/// `1 / Gamma(z)`, entire in `z`; zero at the nonpositive integers.
pub(crate) fn rgamma(z: f64) -> f64 {
    if z <= 0.0 && z == z.floor() {
        return 0.0;
    }
    if z > 0.5 {
        if z > 170.0 {
            return (-ln_gamma(z)).exp();
        }
        return 1.0 / gamma(z);
    }
    // Reflection: 1/Gamma(z) = sin(pi z) Gamma(1 - z) / pi.
    let s = sin_pi(z);
    let one_minus = 1.0 - z;
    if one_minus > 170.0 {
        return s * (ln_gamma(one_minus)).exp() / std::f64::consts::PI;
    }
    s * gamma(one_minus) / std::f64::consts::PI
}

/// Upper bound for `|1 / Gamma(z)|` that does not vanish at the poles.
pub(crate) fn rgamma_bound(z: f64) -> f64 {
    if z >= 1.0 {
        (-ln_gamma(z)).exp()
    } else if z > 0.0 {
        1.2
    } else {
        (ln_gamma(1.0 - z)).exp() / std::f64::consts::PI
    }
}

/// `sin(pi x)` with exact zeros at the integers.
pub(crate) fn sin_pi(x: f64) -> f64 {
    if x == x.floor() {
        return 0.0;
    }
    let r = x - 2.0 * (x / 2.0).floor();
    (std::f64::consts::PI * r).sin()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reciprocal_gamma_values() {
        assert!((rgamma(1.0) - 1.0).abs() < 1e-15);
        assert!((rgamma(0.5) - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert_eq!(rgamma(-2.0), 0.0);
        // Gamma(-0.5) = -2 sqrt(pi)
        assert!((rgamma(-0.5) + 1.0 / (2.0 * std::f64::consts::PI.sqrt())).abs() < 1e-14);
        assert!(rgamma_bound(-0.5) >= rgamma(-0.5).abs());
    }
}
