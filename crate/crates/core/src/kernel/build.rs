//! Subordination quadrature for the self-similar profile
//! `Phi(z) = int_0^inf u^(beta d / alpha) p(1, z u^(beta / alpha)) g_beta(u) du`.
//!
//! The integral runs in `v = ln u` over composite Gauss-Legendre panels on a
//! grid shared by all `z`, so `g_beta` is evaluated once per node. The left
//! end stops where `g_beta` is negligible; the right end stops once both
//! `g_beta` and `p(1, .)` are in their power-law regimes, and the remainder
//! `c_g c_alpha z^(-d-alpha) U^(-2 beta) / (2 beta)` is added in closed form.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::quad::GaussLegendre;
use crate::specfun::{ln_subordinator_density, subordinator_tail_constant, StableProfile};

const GL_POINTS: usize = 8;
/// Coarsest panel width in `v = ln u`; refinement halves it.
const BASE_WIDTH: f64 = 0.5;

/// Tabulated quadrature in `v` with the subordinator weight folded in.
struct SubordinationRule {
    width: f64,
    v_lo: f64,
    /// `(u^(beta/alpha), w u^(1 + beta d/alpha) g(u))` for every node, panel by panel.
    nodes: Vec<(f64, f64)>,
}

impl SubordinationRule {
    fn new(params: &ModelParams, v_lo: f64, v_hi: f64, width: f64) -> Result<Self> {
        let beta = params.beta;
        let s = params.spread_exponent();
        let dexp = params.decay_exponent();
        let rule = GaussLegendre::new(GL_POINTS);
        let panels = ((v_hi - v_lo) / width).ceil() as usize;
        let mut nodes = Vec::with_capacity(panels * GL_POINTS);
        for k in 0..panels {
            let a = v_lo + width * k as f64;
            for (v, w) in rule.mapped(a, a + width) {
                let lg = ln_subordinator_density(beta, v.exp())?;
                nodes.push(((s * v).exp(), w * (lg + (1.0 + dexp) * v).exp()));
            }
        }
        Ok(Self { width, v_lo, nodes })
    }

    /// Number of nodes covering `[v_lo, v_end]` rounded up to whole panels, and the end point.
    fn cut(&self, v_end: f64) -> (usize, f64) {
        let panels = ((v_end - self.v_lo) / self.width).ceil().max(1.0) as usize;
        let n = (panels * GL_POINTS).min(self.nodes.len());
        (n, self.v_lo + self.width * (n / GL_POINTS) as f64)
    }
}

/// Where each factor of the integrand reaches its asymptotic regime.
struct Horizon {
    beta: f64,
    alpha: f64,
    v_lo: f64,
    v_g: f64,
    y_far: f64,
}

impl Horizon {
    fn new(params: &ModelParams, stable: &StableProfile) -> Result<Self> {
        let (alpha, beta) = (params.alpha, params.beta);
        let growth = 1.0 + params.decay_exponent();
        // g_beta is superexponentially small to the left: stop where it is below e^-90.
        let mut v_lo = 0.0;
        loop {
            let lg = ln_subordinator_density(beta, f64::exp(v_lo))?;
            if lg + growth * v_lo < -90.0 {
                break;
            }
            v_lo -= BASE_WIDTH;
            if v_lo < -400.0 {
                return Err(Error::Quadrature { context: "left cut of the subordinator density".into(), error: f64::NAN });
            }
        }
        // beyond u = 1e4^(1/beta) the relative correction to the tail of g is ~1e-4
        let v_g = (4.0 * std::f64::consts::LN_10 / beta).max(1.0);
        let y_far = match stable.series_switch() {
            // closed forms: Gaussian is negligible past 100, Cauchy is within 1e-8 of its power law past 1e4
            s if s.is_infinite() && alpha == 2.0 => 100.0,
            s if s.is_infinite() => 1e4,
            s => (4.0 * s).max(1e3),
        };
        Ok(Self { beta, alpha, v_lo, v_g, y_far })
    }

    fn v_end(&self, z: f64) -> f64 {
        let v_p = if z > 0.0 { self.alpha / self.beta * (self.y_far / z).ln() } else { f64::INFINITY };
        self.v_g.max(v_p)
    }
}

struct Integrator<'a> {
    stable: &'a StableProfile,
    beta: f64,
    alpha: f64,
    dim: usize,
    c_tail: f64,
}

impl Integrator<'_> {
    /// `(Phi(z), Phi'(z))` on one quadrature level.
    fn eval(&self, rule: &SubordinationRule, horizon: &Horizon, z: f64) -> (f64, f64) {
        let (n, v_end) = rule.cut(horizon.v_end(z));
        let mut phi = 0.0;
        let mut dphi = 0.0;
        for &(scale, base) in &rule.nodes[..n] {
            let y = z * scale;
            phi += base * self.stable.eval(y);
            dphi += base * scale * self.stable.eval_derivative(y);
        }
        if self.c_tail > 0.0 {
            let d_alpha = self.dim as f64 + self.alpha;
            let tail = self.c_tail * z.powf(-d_alpha) * (-2.0 * self.beta * v_end).exp() / (2.0 * self.beta);
            phi += tail;
            dphi -= d_alpha / z * tail;
        }
        (phi, dphi)
    }
}

pub(crate) struct BuiltValues {
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub refinements: usize,
    pub panel_width: f64,
    pub change: f64,
}

/// Values of the profile and its derivative on `grid`, refined until the
/// largest relative change between successive levels is below `rel_tol`.
pub(crate) fn integrate_profile(
    params: &ModelParams,
    stable: &StableProfile,
    grid: &[f64],
    quadrature_budget: usize,
    rel_tol: f64,
) -> Result<BuiltValues> {
    let horizon = Horizon::new(params, stable)?;
    let v_hi = grid.iter().fold(horizon.v_g, |m, &z| m.max(horizon.v_end(z)));
    let integ = Integrator {
        stable,
        beta: params.beta,
        alpha: params.alpha,
        dim: params.dim,
        c_tail: subordinator_tail_constant(params.beta) * stable.tail_constant,
    };
    let level = |width: f64| -> Result<Vec<(f64, f64)>> {
        let rule = SubordinationRule::new(params, horizon.v_lo, v_hi, width)?;
        Ok(grid.par_iter().map(|&z| integ.eval(&rule, &horizon, z)).collect())
    };
    let mut width = BASE_WIDTH;
    let mut prev = level(width)?;
    let mut worst = (f64::NAN, f64::INFINITY);
    for refinement in 1..=quadrature_budget.max(1) {
        width /= 2.0;
        let next = level(width)?;
        worst = (f64::NAN, 0.0);
        for ((z, a), b) in grid.iter().zip(&prev).zip(&next) {
            if b.0 > 1e-250 {
                let change = ((a.0 - b.0) / b.0).abs();
                if !(change <= worst.1) {
                    worst = (*z, change);
                }
            }
        }
        prev = next;
        if worst.1 < rel_tol {
            return Ok(BuiltValues {
                phi: prev.iter().map(|p| p.0).collect(),
                dphi: prev.iter().map(|p| p.1).collect(),
                refinements: refinement,
                panel_width: width,
                change: worst.1,
            });
        }
    }
    Err(Error::ProfileConvergence { worst_z: worst.0, change: worst.1 })
}

/// Direct evaluation of `Phi(z)` at the finest level a build would use; for diagnostics.
pub(crate) fn integrate_point(params: &ModelParams, stable: &StableProfile, z: f64, width: f64) -> Result<f64> {
    if !(z > 0.0) {
        return crate::error::domain("pointwise profile quadrature needs z > 0");
    }
    let horizon = Horizon::new(params, stable)?;
    let rule = SubordinationRule::new(params, horizon.v_lo, horizon.v_end(z), width)?;
    let integ = Integrator {
        stable,
        beta: params.beta,
        alpha: params.alpha,
        dim: params.dim,
        c_tail: subordinator_tail_constant(params.beta) * stable.tail_constant,
    };
    Ok(integ.eval(&rule, &horizon, z).0)
}
