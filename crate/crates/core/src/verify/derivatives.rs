//! Finite-difference derivative ratios and the integrated Hölder increment of `G`.

use serde::{Deserialize, Serialize};

use super::{fit_slope, relative_change, OracleReport};
use crate::error::{domain, Result};
use crate::kernel::KernelProfile;
use crate::params::ModelParams;
use crate::quad::{adaptive, Tolerance};

/// Relative step of the central difference in `t`.
pub const TIME_STEP: f64 = 1e-4;
const STABILITY: f64 = 0.1;

/// Test points `x = j dz t^(beta/alpha)`, `0 <= j dz <= z_max`, at each time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeGrid {
    pub times: Vec<f64>,
    pub z_max: f64,
    pub dz: f64,
}

impl Default for DerivativeGrid {
    fn default() -> Self {
        Self { times: (0..9).map(|i| 10f64.powf(-2.0 + 0.5 * i as f64)).collect(), z_max: 10.0, dz: 0.05 }
    }
}

impl DerivativeGrid {
    fn refined(&self) -> Self {
        Self { dz: self.dz / 2.0, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightFunction {
    One,
    /// `1[-1, 1]`.
    Indicator,
    /// `(1 + cos x) / 2`.
    Cosine,
}

impl WeightFunction {
    fn eval(self, x: f64) -> f64 {
        match self {
            WeightFunction::One => 1.0,
            WeightFunction::Indicator => {
                if x.abs() <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            WeightFunction::Cosine => 0.5 * (1.0 + x.cos()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderCheckParams {
    pub rho: f64,
    /// Offsets `h` in units of `t^(beta/alpha)`.
    pub offsets: Vec<f64>,
    pub weight: WeightFunction,
    pub t: f64,
}

impl HolderCheckParams {
    pub fn new(rho: f64) -> Self {
        Self { rho, offsets: vec![1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2], weight: WeightFunction::One, t: 1.0 }
    }

    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < params.alpha) {
            return domain(format!("rho = {} must lie in (0, alpha = {})", self.rho, params.alpha));
        }
        if self.offsets.len() < 2 || self.offsets.iter().any(|h| !(*h > 0.0)) {
            return domain("need at least two positive offsets");
        }
        if !(self.t > 0.0) {
            return domain("Hölder check needs t > 0");
        }
        Ok(())
    }
}

/// `int |G(t, x + h) - G(t, x)| f(x) dx` on the line.
pub fn holder_increment(profile: &KernelProfile, t: f64, h: f64, weight: WeightFunction) -> Result<f64> {
    if profile.params.dim != 1 {
        return domain("the Hölder increment is computed on the line only");
    }
    let scale = t.powf(profile.params.spread_exponent());
    let mut pts = vec![-h, -h / 2.0, 0.0];
    let mut w = 2.0 * h.max(1e-6 * scale);
    while w < 1e5 * scale {
        pts.push(w);
        pts.push(-h - w);
        w *= 4.0;
    }
    if weight == WeightFunction::Indicator {
        pts.extend([-1.0, 1.0]);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let f = |x: f64| (profile.density(t, (x + h).abs()) - profile.density(t, x.abs())).abs() * weight.eval(x);
    let tol = Tolerance { abs: 1e-300, rel: 1e-10, max_intervals: 4000 };
    Ok(adaptive(f, &pts, tol)?.0)
}

struct Ratios {
    time: f64,
    time_richardson: f64,
    gradient: f64,
    /// `(t, x)` where `|dG/dt| t / G` peaks.
    time_arg: (f64, f64),
}

fn ratio_maxima(profile: &KernelProfile, grid: &DerivativeGrid) -> Result<Ratios> {
    let p = &profile.params;
    let mut out = Ratios { time: 0.0, time_richardson: 0.0, gradient: 0.0, time_arg: (f64::NAN, f64::NAN) };
    let steps = (grid.z_max / grid.dz).round() as usize;
    for &t in &grid.times {
        let (lo, hi) = (t * (1.0 - TIME_STEP), t * (1.0 + TIME_STEP));
        let scale = t.powf(p.spread_exponent());
        let dx = grid.dz * scale;
        if !(lo < t && t < hi) || !(dx > 0.0) || (dx + scale) == scale {
            return domain(format!("finite-difference step underflows at t = {t}"));
        }
        for j in 0..=steps {
            let x = j as f64 * dx;
            let g = profile.density(t, x);
            let central = |e: f64| (profile.density(t * (1.0 + e), x) - profile.density(t * (1.0 - e), x)) / (2.0 * e * t);
            let d1 = central(TIME_STEP);
            let d2 = central(2.0 * TIME_STEP);
            let rich = (4.0 * d1 - d2) / 3.0;
            let q = d1.abs() * t / g;
            if q > out.time {
                out.time = q;
                out.time_arg = (t, x);
            }
            out.time_richardson = out.time_richardson.max((rich - d1).abs() * t / g);
            let grad = (profile.density(t, x + dx) - profile.density(t, (x - dx).abs())) / (2.0 * dx);
            out.gradient = out.gradient.max(grad.abs() * scale / g);
        }
    }
    Ok(out)
}

/// Derivative-ratio maxima `|dG/dt| t / G` and `|dG/dx| t^(beta/alpha) / G` over `grid` and its
/// refinement, plus the Hölder increment slope for `holder`.
///
/// The gradient ratio counts toward the verdict only for `alpha > 1`. For the Gaussian profile
/// the time ratio is also compared with `max |x^2/(4t) - 1/2|` over the same grid.
pub fn check_derivatives(profile: &KernelProfile, grid: &DerivativeGrid, holder: &HolderCheckParams) -> Result<OracleReport> {
    let p = profile.params;
    holder.validate(&p)?;
    let mut report = OracleReport::new(format!("derivatives(alpha={}, beta={}, d={})", p.alpha, p.beta, p.dim));

    let coarse = ratio_maxima(profile, grid)?;
    let fine = ratio_maxima(profile, &grid.refined())?;
    let mut time = OracleReport::new("time_derivative_ratio");
    time.measure("max", fine.time).stat("refinement_change", relative_change(coarse.time, fine.time));
    time.stat("richardson_change", fine.time_richardson).stat("argmax_t", fine.time_arg.0).stat("argmax_x", fine.time_arg.1);
    time.require(fine.time.is_finite(), "time ratio finite");
    time.require(relative_change(coarse.time, fine.time) <= STABILITY, "time ratio stable within 10% under refinement");
    report.child(time);

    let mut grad = OracleReport::new("gradient_ratio");
    let change = relative_change(coarse.gradient, fine.gradient);
    grad.measure("max", fine.gradient).stat("refinement_change", change);
    if p.alpha > 1.0 {
        grad.require(fine.gradient.is_finite(), "gradient ratio finite");
        grad.require(change <= STABILITY, "gradient ratio stable within 10% under refinement");
    } else {
        grad.note("alpha <= 1: no gradient bound is claimed; reported only");
    }
    report.child(grad);

    if p.alpha == 2.0 && p.beta == 1.0 {
        let mut gauss = OracleReport::new("gaussian_time_derivative");
        let fg = grid.refined();
        let steps = (fg.z_max / fg.dz).round() as usize;
        let exact = fg
            .times
            .iter()
            .flat_map(|&t| (0..=steps).map(move |j| {
                let x = j as f64 * fg.dz * t.sqrt();
                (x * x / (4.0 * t) - 0.5).abs()
            }))
            .fold(0.0, f64::max);
        let err = relative_change(fine.time, exact);
        gauss.measure("measured", fine.time).measure("closed_form", exact).stat("relative_error", err);
        gauss.require(err <= 0.01, "matches the closed form to 1%");
        report.child(gauss);
    }

    if p.dim == 1 {
        let mut hr = OracleReport::new(format!("holder_increment(rho={})", holder.rho));
        let scale = holder.t.powf(p.spread_exponent());
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut constant = 0.0f64;
        for &u in &holder.offsets {
            let h = u * scale;
            let inc = holder_increment(profile, holder.t, h, holder.weight)?;
            xs.push(h.ln());
            ys.push(inc.ln());
            constant = constant.max(inc * holder.t.powf(holder.rho * p.spread_exponent()) / h.powf(holder.rho));
        }
        let slope = fit_slope(&xs, &ys);
        hr.measure("slope", slope).measure("bound_constant", constant).stat("rho", holder.rho);
        hr.require(constant.is_finite(), "bound constant finite");
        hr.require((slope - holder.rho).abs() <= 0.1 * holder.rho, format!("slope {slope:.4} within 10% of rho"));
        report.child(hr);
    }
    Ok(report)
}
