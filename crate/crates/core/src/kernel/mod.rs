//! The space-time fractional heat kernel `G(t, x) = t^(-beta d / alpha) Phi(|x| t^(-beta / alpha))`.
//!
//! Everything is reduced to the unit-time profile `Phi`, tabulated once on a
//! log-spaced grid and interpolated with cubic Hermite pieces in
//! `(ln z, ln Phi)` using quadrature-exact slopes.

mod build;
mod cells;
mod envelope;
mod store;

pub use cells::CumulativeMass;
pub use envelope::{bound_envelope, bound_shape, envelope_grid, BoundEnvelope, EnvelopeRegime};

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{domain, Error, Result};
use crate::interp::Pchip;
use crate::params::ModelParams;
use crate::specfun::{stable_density_radial, StableProfile};

pub const PROFILE_POINTS: usize = 2048;
pub const PROFILE_Z_MIN: f64 = 1e-4;
pub const PROFILE_Z_MAX: f64 = 1e4;
pub const DEFAULT_QUADRATURE_BUDGET: usize = 6;
const PROFILE_REL_TOL: f64 = 1e-8;

/// Behaviour of `Phi` below the first grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NearOriginModel {
    /// `d < alpha`: `Phi(0)` is finite; the approach is `Phi(0) - C z^exponent`.
    Finite { phi0: f64, exponent: f64 },
    /// `d = alpha`: `Phi(z) ~ slope * ln z`, with `slope = dPhi / d ln z < 0`.
    LogSingular { slope: f64 },
    /// `d > alpha`: `Phi(z) = A z^(-exponent) + B` with `exponent = d - alpha`; `A`, `B`
    /// match value and slope at the first grid point.
    PowerSingular { exponent: f64 },
}

/// Build diagnostics carried with a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuildInfo {
    pub refinements: usize,
    pub panel_width: f64,
    pub last_change: f64,
}

#[derive(Debug, Clone)]
pub struct KernelProfile {
    pub params: ModelParams,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// `dPhi/dz` at the grid points.
    pub derivatives: Vec<f64>,
    pub near_origin_model: NearOriginModel,
    /// Coefficient of the far field `Phi(z) ~ c z^(-(d + alpha))`; zero for Gaussian tails.
    pub tail_constant: f64,
    pub info: BuildInfo,
    log_interp: Pchip,
    cumulative: Option<CumulativeMass>,
}

/// `p(1, 0)` in dimension `d`.
fn stable_at_origin(alpha: f64, dim: usize) -> Result<f64> {
    stable_density_radial(alpha, dim, 1.0, 0.0)
}

/// Surface area of the unit sphere in `R^d`.
pub fn sphere_area(dim: usize) -> f64 {
    let d = dim as f64;
    2.0 * std::f64::consts::PI.powf(d / 2.0) / gamma(d / 2.0)
}

fn log_grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Builds the profile on the default grid.
pub fn build_kernel_profile(params: &ModelParams, quadrature_budget: usize) -> Result<KernelProfile> {
    build_kernel_profile_on(params, quadrature_budget, PROFILE_POINTS, PROFILE_Z_MIN, PROFILE_Z_MAX)
}

/// Builds the profile on `points` log-spaced abscissae in `[z_min, z_max]`.
pub fn build_kernel_profile_on(
    params: &ModelParams,
    quadrature_budget: usize,
    points: usize,
    z_min: f64,
    z_max: f64,
) -> Result<KernelProfile> {
    if points < 16 || !(z_min > 0.0 && z_max > z_min) {
        return domain("profile grid needs at least 16 points on 0 < z_min < z_max");
    }
    let stable = StableProfile::new(params.alpha, params.dim)?;
    let grid = log_grid(points, z_min, z_max);
    let (values, derivatives, info) = if params.beta == 1.0 {
        let v = grid.iter().map(|&z| stable.eval(z)).collect();
        let d = grid.iter().map(|&z| stable.eval_derivative(z)).collect();
        (v, d, BuildInfo { refinements: 0, panel_width: 0.0, last_change: 0.0 })
    } else {
        let b = build::integrate_profile(params, &stable, &grid, quadrature_budget, PROFILE_REL_TOL)?;
        let info = BuildInfo { refinements: b.refinements, panel_width: b.panel_width, last_change: b.change };
        (b.phi, b.dphi, info)
    };
    let (alpha, d) = (params.alpha, params.dim as f64);
    let near_origin_model = if params.beta == 1.0 || d < alpha {
        // E[D^q] = Gamma(1 - q/beta) / Gamma(1 - q) at q = beta d / alpha
        let factor = if params.beta == 1.0 { 1.0 } else { gamma(1.0 - d / alpha) / gamma(1.0 - params.beta * d / alpha) };
        let exponent = if params.beta == 1.0 { 2.0 } else { (alpha - d).min(2.0) };
        NearOriginModel::Finite { phi0: stable_at_origin(alpha, params.dim)? * factor, exponent }
    } else if d == alpha {
        NearOriginModel::LogSingular { slope: grid[0] * derivatives[0] }
    } else {
        NearOriginModel::PowerSingular { exponent: d - alpha }
    };
    KernelProfile::assemble(*params, grid, values, derivatives, near_origin_model, info)
}

impl KernelProfile {
    /// Finishes a profile from tabulated values: trims underflow, fits the tail, builds interpolants.
    pub(crate) fn assemble(
        params: ModelParams,
        mut grid: Vec<f64>,
        mut values: Vec<f64>,
        mut derivatives: Vec<f64>,
        near_origin_model: NearOriginModel,
        info: BuildInfo,
    ) -> Result<Self> {
        let keep = values.iter().take_while(|&&v| v > 1e-280 && v.is_finite()).count();
        if keep < 16 {
            return Err(Error::ProfileConvergence { worst_z: grid[keep.min(grid.len() - 1)], change: f64::NAN });
        }
        grid.truncate(keep);
        values.truncate(keep);
        derivatives.truncate(keep);
        for w in values.windows(2) {
            if w[1] > w[0] * (1.0 + 1e-9) {
                return Err(Error::ProfileConvergence { worst_z: f64::NAN, change: (w[1] - w[0]) / w[0] });
            }
        }
        let last = keep - 1;
        let tail_constant = if params.alpha < 2.0 {
            values[last] * grid[last].powf(params.dim as f64 + params.alpha)
        } else {
            0.0
        };
        let s: Vec<f64> = grid.iter().map(|z| z.ln()).collect();
        let lv: Vec<f64> = values.iter().map(|v| v.ln()).collect();
        let ls: Vec<f64> = grid.iter().zip(&values).zip(&derivatives).map(|((z, v), d)| z * d / v).collect();
        let log_interp = Pchip::with_slopes(s, lv, ls);
        let mut profile = Self {
            params,
            grid,
            values,
            derivatives,
            near_origin_model,
            tail_constant,
            info,
            log_interp,
            cumulative: None,
        };
        if params.dim == 1 {
            profile.cumulative = Some(CumulativeMass::new(&profile));
        }
        Ok(profile)
    }

    pub fn z_min(&self) -> f64 {
        self.grid[0]
    }

    pub fn z_max(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    /// `Phi(z) = G(1, z)`.
    pub fn phi(&self, z: f64) -> f64 {
        let z = z.abs();
        let (zm, zx) = (self.z_min(), self.z_max());
        if z < zm {
            let pm = self.values[0];
            return match self.near_origin_model {
                NearOriginModel::Finite { phi0, exponent } => phi0 - (phi0 - pm) * (z / zm).powf(exponent),
                NearOriginModel::LogSingular { slope } => pm + slope * (z / zm).ln(),
                NearOriginModel::PowerSingular { exponent } => {
                    let (a, b) = self.power_coefficients(exponent);
                    a * z.powf(-exponent) + b
                }
            };
        }
        if z > zx {
            return self.tail_constant * z.powf(-(self.params.dim as f64 + self.params.alpha));
        }
        self.log_interp.eval(z.ln()).exp()
    }

    /// `dPhi/dz` for `z > 0`.
    pub fn phi_derivative(&self, z: f64) -> f64 {
        let z = z.abs();
        let (zm, zx) = (self.z_min(), self.z_max());
        if z < zm {
            let pm = self.values[0];
            return match self.near_origin_model {
                NearOriginModel::Finite { phi0, exponent } => {
                    -(phi0 - pm) * exponent * (z / zm).powf(exponent - 1.0) / zm
                }
                NearOriginModel::LogSingular { slope } => slope / z,
                NearOriginModel::PowerSingular { exponent } => {
                    -exponent * self.power_coefficients(exponent).0 * z.powf(-exponent - 1.0)
                }
            };
        }
        if z > zx {
            let e = self.params.dim as f64 + self.params.alpha;
            return -e * self.tail_constant * z.powf(-e - 1.0);
        }
        let s = z.ln();
        self.log_interp.eval(s).exp() * self.log_interp.derivative(s) / z
    }

    /// `G(t, r)` with `r = |x|`.
    pub fn density(&self, t: f64, r: f64) -> f64 {
        let p = &self.params;
        t.powf(-p.decay_exponent()) * self.phi(r * t.powf(-p.spread_exponent()))
    }

    fn power_coefficients(&self, exponent: f64) -> (f64, f64) {
        power_coefficients(self.grid[0], self.values[0], self.derivatives[0], exponent)
    }

    /// `d/dr G(t, r)`.
    pub fn density_radial_derivative(&self, t: f64, r: f64) -> f64 {
        let p = &self.params;
        let w = t.powf(-p.spread_exponent());
        t.powf(-p.decay_exponent()) * w * self.phi_derivative(r * w)
    }

    /// Cumulative masses of the one-dimensional profile.
    pub fn cumulative(&self) -> Result<&CumulativeMass> {
        self.cumulative
            .as_ref()
            .ok_or_else(|| Error::Unsupported(format!("cell masses need d = 1, profile has d = {}", self.params.dim)))
    }

    /// `int_{R^d} Phi`, from the interpolant plus the analytic end pieces.
    pub fn total_mass(&self) -> f64 {
        let d = self.params.dim as f64;
        let alpha = self.params.alpha;
        let zm = self.z_min();
        let pm = self.values[0];
        let origin = match self.near_origin_model {
            NearOriginModel::Finite { phi0, exponent } => phi0 * zm.powf(d) / d - (phi0 - pm) * zm.powf(d) / (exponent + d),
            NearOriginModel::LogSingular { slope } => pm * zm.powf(d) / d - slope * zm.powf(d) / (d * d),
            NearOriginModel::PowerSingular { exponent } => {
                let (a, b) = self.power_coefficients(exponent);
                a * zm.powf(d - exponent) / (d - exponent) + b * zm.powf(d) / d
            }
        };
        let rule = crate::quad::GaussLegendre::new(6);
        let mut bulk = 0.0;
        for w in self.grid.windows(2) {
            bulk += rule.integrate(w[0].ln(), w[1].ln(), |s| {
                let z = s.exp();
                self.phi(z) * z.powf(d)
            });
        }
        let tail = self.tail_constant * self.z_max().powf(-alpha) / alpha;
        sphere_area(self.params.dim) * (origin + bulk + tail)
    }

    /// Profile value by direct subordination quadrature at the finest panel width of the build.
    pub fn direct_value(&self, z: f64) -> Result<f64> {
        if self.params.beta == 1.0 {
            return stable_density_radial(self.params.alpha, self.params.dim, 1.0, z);
        }
        let stable = StableProfile::new(self.params.alpha, self.params.dim)?;
        build::integrate_point(&self.params, &stable, z, self.info.panel_width)
    }
}

/// `(A, B)` in `A z^(-e) + B` through value `pm` and slope `dm` at `zm`.
fn power_coefficients(zm: f64, pm: f64, dm: f64, exponent: f64) -> (f64, f64) {
    let a = -dm * zm.powf(exponent + 1.0) / exponent;
    (a, pm - a * zm.powf(-exponent))
}

/// `G(t, x)` for a point of the model dimension.
pub fn heat_kernel(profile: &KernelProfile, t: f64, x: &[f64]) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("heat kernel needs t > 0, got {t}"));
    }
    if x.len() != profile.params.dim {
        return domain(format!("point has {} coordinates, model dimension is {}", x.len(), profile.params.dim));
    }
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(profile.density(t, r))
}

pub use store::{load_profile, save_profile};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::GaussLegendre;
    use crate::specfun::stable_unit_density_1d;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn profile_155() -> &'static KernelProfile {
        static P: OnceLock<KernelProfile> = OnceLock::new();
        P.get_or_init(|| build_kernel_profile(&ModelParams::new(1.5, 0.5, 1, 1.0).unwrap(), 6).unwrap())
    }

    fn profile_105() -> &'static KernelProfile {
        static P: OnceLock<KernelProfile> = OnceLock::new();
        P.get_or_init(|| build_kernel_profile(&ModelParams::new(1.0, 0.5, 1, 1.0).unwrap(), 6).unwrap())
    }

    /// Half-order subordinator density, written out directly.
    fn g_half(u: f64) -> f64 {
        (-0.25 / u).exp() * u.powf(-1.5) / (4.0 * std::f64::consts::PI).sqrt()
    }

    /// `int_0^inf f(u) g_half(u) du` over fine panels in `ln u`.
    fn against_g_half(f: impl Fn(f64) -> f64) -> f64 {
        let rule = GaussLegendre::new(16);
        let (lo, hi, n) = (-8.0f64, 90.0f64, 4000);
        let h = (hi - lo) / n as f64;
        let body: f64 = (0..n)
            .map(|k| {
                let a = lo + h * k as f64;
                rule.integrate(a, a + h, |v| {
                    let u = v.exp();
                    u * f(u) * g_half(u)
                })
            })
            .sum();
        body
    }

    #[test]
    fn beta_one_reproduces_stable_density() {
        let k = build_kernel_profile(&ModelParams::new(1.5, 1.0, 1, 1.0).unwrap(), 6).unwrap();
        let mut worst = 0.0f64;
        for i in 0..400 {
            let z = 10f64.powf(-3.0 + 6.0 * (i as f64 + 0.37) / 400.0);
            worst = worst.max((k.phi(z) - stable_unit_density_1d(1.5, z).unwrap()).abs());
        }
        assert!(worst < 1e-10, "max abs diff {worst:e}");
    }

    #[test]
    fn unit_mass() {
        let k = profile_155();
        assert!((k.total_mass() - 1.0).abs() < 1e-6, "{}", k.total_mass());
        let c = k.cumulative().unwrap();
        assert!((2.0 * c.half_mass() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn value_at_origin_matches_moment_formula() {
        // Phi(0) = p(1, 0) E[D^(1/3)] with p(1, 0) = Gamma(5/3) / pi at alpha = 3/2
        let p0 = gamma(5.0 / 3.0) / std::f64::consts::PI;
        // the integrand decays like u^(-7/6); add the remainder beyond the last panel
        let remainder = 6.0 * (-15.0f64).exp() / (4.0 * std::f64::consts::PI).sqrt();
        let want = p0 * (against_g_half(|u| u.powf(1.0 / 3.0)) + remainder);
        let k = profile_155();
        assert!((k.phi(0.0) - want).abs() < 1e-8 * want, "{} vs {want}", k.phi(0.0));
        assert!((k.phi(1e-12) - want).abs() < 1e-4 * want);
    }

    #[test]
    fn cauchy_subordination_matches_direct_quadrature() {
        // d = alpha = 1: Phi(0) diverges, so compare at positive z
        let k = profile_105();
        for &z in &[0.01, 0.5, 1.0, 10.0] {
            let want = against_g_half(|u| u.sqrt() / (std::f64::consts::PI * (1.0 + z * z * u)));
            let got = k.phi(z);
            assert!((got - want).abs() < 1e-8 * want, "z={z}: {got} vs {want}");
        }
        assert!(matches!(k.near_origin_model, NearOriginModel::LogSingular { .. }));
    }

    #[test]
    fn log_singular_growth() {
        let k = profile_105();
        let slope = (k.phi(1e-6) - k.phi(1e-5)) / (1e-6f64.ln() - 1e-5f64.ln());
        let NearOriginModel::LogSingular { slope: s } = k.near_origin_model else { unreachable!() };
        assert!((slope - s).abs() < 1e-3 * s.abs());
    }

    #[test]
    fn far_field_constant() {
        // Phi(z) ~ c_alpha E[D^(-beta)] z^(-1-alpha), E[D^(-beta)] = 1 / Gamma(1 + beta)
        let c_alpha = gamma(2.5) * (0.75 * std::f64::consts::PI).sin() / std::f64::consts::PI;
        let want = c_alpha / gamma(1.5);
        let k = profile_155();
        assert!((k.tail_constant - want).abs() < 1e-3 * want, "{} vs {want}", k.tail_constant);
    }

    #[test]
    fn regimes_by_sign_of_d_minus_alpha() {
        let k = build_kernel_profile(&ModelParams::new(0.8, 0.5, 1, 1.0).unwrap(), 6).unwrap();
        assert!(matches!(k.near_origin_model, NearOriginModel::PowerSingular { exponent } if (exponent - 0.2).abs() < 1e-12));
        assert!((k.total_mass() - 1.0).abs() < 1e-6);
        let r = k.phi(1e-8) / k.phi(1e-7);
        assert!((r.ln() / 10f64.ln() - 0.2).abs() < 0.02);
        assert!(matches!(profile_155().near_origin_model, NearOriginModel::Finite { .. }));
    }

    #[test]
    fn gaussian_subordination_mass() {
        let k = build_kernel_profile(&ModelParams::new(2.0, 0.5, 1, 1.0).unwrap(), 6).unwrap();
        assert!((k.total_mass() - 1.0).abs() < 1e-6);
        assert_eq!(k.tail_constant, 0.0);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let err = build_kernel_profile(&ModelParams::new(2.0, 0.5, 1, 1.0).unwrap(), 1).unwrap_err();
        assert!(matches!(err, Error::ProfileConvergence { worst_z, .. } if worst_z > 0.0));
    }

    #[test]
    fn cell_masses_partition_the_line() {
        let k = profile_155();
        let c = k.cumulative().unwrap();
        let (dx, n, tau) = (0.1, 400, 2.0);
        let cells = c.cell_masses(tau, k.params.spread_exponent(), dx, n);
        let inside = cells[0] + 2.0 * cells[1..].iter().sum::<f64>();
        let outside = 2.0 * c.above((n as f64 - 0.5) * dx * tau.powf(-k.params.spread_exponent()));
        assert!((inside + outside - 1.0).abs() < 1e-9, "{}", inside + outside);
        // cell mass against the midpoint value of G
        let m = 50;
        let mid = k.density(tau, m as f64 * dx) * dx;
        assert!((cells[m] - mid).abs() < 1e-3 * mid);
    }

    #[test]
    fn envelope_is_finite_with_moderate_spread() {
        let k = profile_155();
        let grid = envelope_grid((1e-2, 1e2), (1e-3, 1e2), 21, 61, true);
        let env = bound_envelope(k, &grid).unwrap();
        assert_eq!(env.regime, EnvelopeRegime::WholeRange);
        assert!(env.lower > 0.0 && env.spread() < 1e2, "{env:?}");
    }

    #[test]
    fn gaussian_envelope_collapses_with_range() {
        // the lower bound has a polynomial tail, which a Gaussian beats
        let k = build_kernel_profile(&ModelParams::new(2.0, 1.0, 1, 1.0).unwrap(), 6).unwrap();
        let near = bound_envelope(&k, &envelope_grid((1.0, 1.0), (1e-3, 2.0), 1, 20, true)).unwrap();
        let far = bound_envelope(&k, &envelope_grid((1.0, 1.0), (1e-3, 12.0), 1, 40, true)).unwrap();
        assert!(near.lower > 0.0 && near.upper.is_finite());
        assert!(far.lower < 1e-6 * near.lower, "{} vs {}", far.lower, near.lower);
    }

    #[test]
    fn saved_profile_round_trips() {
        let k = profile_155();
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("profile.csv");
        save_profile(k, &csv).unwrap();
        let back = load_profile(&csv).unwrap();
        assert_eq!(back.grid, k.grid);
        assert_eq!(back.values, k.values);
        assert_eq!(back.near_origin_model, k.near_origin_model);
        for &z in &[0.0, 1e-6, 0.3, 7.0, 3e5] {
            assert_eq!(back.phi(z), k.phi(z));
        }
    }

    #[test]
    fn rejects_bad_points() {
        let k = profile_155();
        assert!(heat_kernel(k, 0.0, &[1.0]).is_err());
        assert!(heat_kernel(k, 1.0, &[1.0, 2.0]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn self_similar_scaling(s in 0.01f64..100.0, t in 0.01f64..100.0, x in -50.0f64..50.0) {
            let k = profile_155();
            let lhs = heat_kernel(k, s * t, &[x]).unwrap();
            let rhs = s.powf(-k.params.decay_exponent()) * heat_kernel(k, t, &[x * s.powf(-k.params.spread_exponent())]).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300) * 10.0);
        }

        #[test]
        fn positive_and_radially_decreasing(a in -6.0f64..6.0, b in -6.0f64..6.0) {
            let k = profile_155();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let (p_lo, p_hi) = (k.phi(10f64.powf(lo)), k.phi(10f64.powf(hi)));
            prop_assert!(p_hi > 0.0);
            prop_assert!(p_hi <= p_lo);
        }
    }
}
