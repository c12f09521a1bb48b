//! One-sided cumulative masses of a one-dimensional profile.
//!
//! `C(z) = int_0^z Phi` is accurate near the origin and `S(z) = int_z^inf Phi`
//! in the tail; `mass` uses whichever difference does not cancel.

use super::{power_coefficients, KernelProfile, NearOriginModel};
use crate::interp::Pchip;
use crate::quad::GaussLegendre;

const SPLIT: f64 = 1.0;

#[derive(Debug, Clone)]
pub struct CumulativeMass {
    z_min: f64,
    z_max: f64,
    phi_min: f64,
    dphi_min: f64,
    model: NearOriginModel,
    alpha: f64,
    tail_constant: f64,
    ln_c: Pchip,
    ln_s: Pchip,
    c_split: f64,
    s_split: f64,
}

impl CumulativeMass {
    pub(crate) fn new(profile: &KernelProfile) -> Self {
        let grid = &profile.grid;
        let n = grid.len();
        let rule = GaussLegendre::new(6);
        // integrate in s = ln z so that each panel sees a smooth integrand
        let pieces: Vec<f64> = grid
            .windows(2)
            .map(|w| {
                rule.integrate(w[0].ln(), w[1].ln(), |s| {
                    let z = s.exp();
                    profile.phi(z) * z
                })
            })
            .collect();
        let (z_min, z_max, phi_min, dphi_min) = (grid[0], grid[n - 1], profile.values[0], profile.derivatives[0]);
        let model = profile.near_origin_model;
        let (alpha, tail_constant) = (profile.params.alpha, profile.tail_constant);
        let mut c = vec![origin_mass(model, z_min, phi_min, dphi_min, z_min); n];
        for i in 1..n {
            c[i] = c[i - 1] + pieces[i - 1];
        }
        let last_phi = profile.values[n - 1];
        let s_last = if alpha < 2.0 {
            tail_constant * z_max.powf(-alpha) / alpha
        } else {
            // Gaussian-type decay: the remainder is about Phi / |dPhi/dz|
            last_phi * last_phi / profile.derivatives[n - 1].abs().max(f64::MIN_POSITIVE)
        };
        let mut s = vec![s_last; n];
        for i in (0..n - 1).rev() {
            s[i] = s[i + 1] + pieces[i];
        }
        let xs: Vec<f64> = grid.iter().map(|z| z.ln()).collect();
        let keep_s = s.iter().take_while(|&&v| v > 0.0).count().max(2);
        let ln_c = Pchip::with_slopes(
            xs.clone(),
            c.iter().map(|v| v.ln()).collect(),
            (0..n).map(|i| grid[i] * profile.values[i] / c[i]).collect(),
        );
        let ln_s = Pchip::with_slopes(
            xs[..keep_s].to_vec(),
            s[..keep_s].iter().map(|v| v.ln()).collect(),
            (0..keep_s).map(|i| -grid[i] * profile.values[i] / s[i]).collect(),
        );
        let mut this = Self {
            z_min,
            z_max,
            phi_min,
            dphi_min,
            model,
            alpha,
            tail_constant,
            ln_c,
            ln_s,
            c_split: 0.0,
            s_split: 0.0,
        };
        this.c_split = this.below(SPLIT);
        this.s_split = this.above(SPLIT);
        this
    }

    /// `C(z) = int_0^z Phi`.
    pub fn below(&self, z: f64) -> f64 {
        if z <= 0.0 {
            0.0
        } else if z < self.z_min {
            origin_mass(self.model, self.z_min, self.phi_min, self.dphi_min, z)
        } else if z > self.z_max {
            self.below(self.z_max) + self.above(self.z_max) - self.above(z)
        } else {
            self.ln_c.eval(z.ln()).exp()
        }
    }

    /// `S(z) = int_z^inf Phi`.
    pub fn above(&self, z: f64) -> f64 {
        let xs = self.ln_s.xs();
        let s_end = xs[xs.len() - 1].exp();
        if z > s_end {
            if self.alpha < 2.0 {
                self.tail_constant * z.powf(-self.alpha) / self.alpha
            } else {
                0.0
            }
        } else if z < self.z_min {
            self.above(self.z_min) + self.below(self.z_min) - self.below(z)
        } else {
            self.ln_s.eval(z.ln()).exp()
        }
    }

    /// `int_0^inf Phi`, one half of the total mass in one dimension.
    pub fn half_mass(&self) -> f64 {
        self.c_split + self.s_split
    }

    /// `int_a^b Phi` for `0 <= a <= b`.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        debug_assert!(0.0 <= a && a <= b);
        if b <= SPLIT {
            self.below(b) - self.below(a)
        } else if a >= SPLIT {
            self.above(a) - self.above(b)
        } else {
            (self.c_split - self.below(a)) + (self.s_split - self.above(b))
        }
    }

    /// Masses of `G(tau, .)` over the cells `[(m - 1/2) dx, (m + 1/2) dx]`, `m = 0..count`.
    pub fn cell_masses(&self, tau: f64, spread_exponent: f64, dx: f64, count: usize) -> Vec<f64> {
        let w = tau.powf(-spread_exponent);
        (0..count)
            .map(|m| {
                if m == 0 {
                    2.0 * self.below(0.5 * dx * w)
                } else {
                    let a = (m as f64 - 0.5) * dx * w;
                    self.mass(a, a + dx * w)
                }
            })
            .collect()
    }
}

/// `int_0^z Phi` for `z <= z_min`, from the near-origin model.
fn origin_mass(model: NearOriginModel, zm: f64, pm: f64, dm: f64, z: f64) -> f64 {
    match model {
        NearOriginModel::Finite { phi0, exponent } => {
            phi0 * z - (phi0 - pm) * zm * (z / zm).powf(exponent + 1.0) / (exponent + 1.0)
        }
        NearOriginModel::LogSingular { slope } => z * (pm + slope * ((z / zm).ln() - 1.0)),
        NearOriginModel::PowerSingular { exponent } => {
            let (a, b) = power_coefficients(zm, pm, dm, exponent);
            a * z.powf(1.0 - exponent) / (1.0 - exponent) + b * z
        }
    }
}
