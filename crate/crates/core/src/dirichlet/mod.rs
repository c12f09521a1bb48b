//! The semilinear problem on `(-R, R)` with zero exterior data.
//!
//! The Dirichlet kernel is the eigenfunction series
//! `G_D(t, x, y) = sum_n E_beta(-nu_n t^beta) phi_n(x) phi_n(y)`, so the mild
//! equation decouples into one Volterra equation per mode. The Kaplan functional
//! `F(t) = int V(t, x) phi_1(x) dx` is the first modal coefficient.

mod basis;
mod march;

pub use basis::{build_basis, load_basis, save_basis, SpectralBasis};
pub use march::{dirichlet_march, DirichletConfig};

use statrs::function::gamma::gamma;

use crate::error::{domain, Result};
use crate::operators::Field;
use crate::params::ModelParams;
use crate::specfun::mittag_leffler_neg;

/// A truncated kernel sum and a bound on the dropped modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSum {
    pub value: f64,
    /// Upper bound on `sum_{n > N} |E_beta(-nu_n t^beta) phi_n(x) phi_n(y)|`, assuming Weyl growth
    /// `nu_n ~ nu_N (n / N)^alpha` and `|phi_n| <= max_m |phi_m|`. Infinite for `alpha <= 1`.
    pub tail_bound: f64,
}

/// `G_D(t, x, y)` summed over the modes of `basis`.
pub fn dirichlet_kernel(basis: &SpectralBasis, beta: f64, t: f64, x: f64, y: f64) -> Result<KernelSum> {
    if !(t > 0.0) {
        return domain(format!("Dirichlet kernel needs t > 0, got {t}"));
    }
    let tb = t.powf(beta);
    let mut value = 0.0;
    for (n, nu) in basis.eigenvalues.iter().enumerate() {
        value += mittag_leffler_neg(beta, nu * tb)? * basis.mode_at(n + 1, x) * basis.mode_at(n + 1, y);
    }
    Ok(KernelSum { value, tail_bound: tail_bound(basis, beta, tb) })
}

/// The upper bound `E_beta(-s) <= 1 / (1 + s / Gamma(1 + beta))`, summed by the integral test.
/// At `beta = 1` the exponential itself is summed.
fn tail_bound(basis: &SpectralBasis, beta: f64, tb: f64) -> f64 {
    let alpha = basis.alpha;
    let count = basis.count() as f64;
    let sup = basis.modes.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let weyl = basis.eigenvalues[basis.count() - 1] / count.powf(alpha);
    if beta == 1.0 {
        let mut sum = 0.0;
        for n in basis.count() + 1..basis.count() + 1_000_000 {
            let term = (-weyl * (n as f64).powf(alpha) * tb).exp();
            sum += term;
            if term < 1e-17 * sum.max(1e-300) {
                break;
            }
        }
        return sup * sup * sum;
    }
    if alpha <= 1.0 {
        return f64::INFINITY;
    }
    let c = weyl * tb / gamma(1.0 + beta);
    sup * sup * count.powf(1.0 - alpha) / (c * (alpha - 1.0))
}

/// `int V phi_1` as the interior sum `dx sum V_i phi_1(x_i)`.
pub fn kaplan_functional(v: &Field, basis: &SpectralBasis) -> Result<f64> {
    if v.grid != basis.grid {
        return domain("field and basis live on different grids");
    }
    let n = v.values.len();
    Ok(basis.inner(&basis.modes[0], &v.values[1..n - 1]))
}

/// Blow-up time of `G' = s^(-b) G^(1+eta)`, `b = beta (1 + eta)`.
///
/// For `b < 1` the data is `G(0) = K` and the time is always finite. For `b >= 1`
/// the data is `G(1) = K`, and blow-up happens only when `1 / (eta K^eta)` is below
/// `int_1^inf s^(-b) ds`. `None` also when the finite time overflows.
pub fn ode_blowup_time(beta: f64, eta: f64, k: f64) -> Result<Option<f64>> {
    if !(k > 0.0) {
        return domain(format!("initial value K = {k} must be positive"));
    }
    if !(beta > 0.0 && eta > 0.0) {
        return domain("beta and eta must be positive");
    }
    let b = beta * (1.0 + eta);
    let budget = 1.0 / (eta * k.powf(eta));
    let t = if b < 1.0 {
        ((1.0 - b) * budget).powf(1.0 / (1.0 - b))
    } else if b == 1.0 {
        budget.exp()
    } else {
        let room = 1.0 - (b - 1.0) * budget;
        if room <= 0.0 {
            return Ok(None);
        }
        room.powf(-1.0 / (b - 1.0))
    };
    Ok(t.is_finite().then_some(t))
}

/// `c = min t^beta E_beta(-nu_1 t^beta)` over the given times; `E_beta(-nu_1 t^beta) >= c / t^beta` there.
pub fn mittag_leffler_floor(beta: f64, nu: f64, times: &[f64]) -> Result<f64> {
    let mut c = f64::INFINITY;
    for &t in times {
        if !(t > 0.0) {
            return domain("floor constant needs positive times");
        }
        let tb = t.powf(beta);
        c = c.min(tb * mittag_leffler_neg(beta, nu * tb)?);
    }
    Ok(c)
}

/// The comparison lower bound on `F`:
/// `F(t) >= (c / t^beta) (K + (int phi_1)^(-eta) int_0^t F(s)^(1+eta) ds)`,
/// from Jensen on the probability weight `phi_1 / int phi_1` and the monotonicity of `E_beta`.
/// The time integral is the trapezoid rule over `times`, which starts at 0.
pub fn kaplan_lower_bound(basis: &SpectralBasis, params: &ModelParams, c: f64, times: &[f64], functional: &[f64]) -> Vec<f64> {
    let eta = params.eta;
    let mass = basis.dx() * basis.modes[0].iter().sum::<f64>();
    let k = functional[0];
    let mut acc = 0.0;
    let mut out = vec![f64::NAN; times.len()];
    for i in 1..times.len() {
        let f = |j: usize| functional[j].max(0.0).powf(1.0 + eta);
        acc += 0.5 * (times[i] - times[i - 1]) * (f(i) + f(i - 1));
        out[i] = c / times[i].powf(params.beta) * (k + mass.powf(-eta) * acc);
    }
    out
}

#[cfg(test)]
mod tests;
