//! One-sided stable law `D` with `E exp(-s D) = exp(-s^beta)` and the law of the
//! inverse subordinator `E_t`, which equals `(t / D)^beta` in distribution.
//!
//! The generic-`beta` density comes from Kanter's representation
//! `D = (A(U) / W)^((1 - beta) / beta)` with `U` uniform on `(0, pi)` and `W`
//! standard exponential, giving
//!
//! `g(u) = beta / ((1 - beta) pi u) * int_0^pi h exp(-h) d phi`, `h = u^(-beta/(1-beta)) A(phi)`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma, ln_gamma};

use super::sin_pi;
use crate::error::{domain, Result};
use crate::quad::{adaptive, Tolerance};

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0) {
        return domain(format!("subordinator index beta = {beta} outside (0, 1)"));
    }
    Ok(())
}

/// `ln(sin x / x)`, accurate for small `x`.
fn ln_sinc(x: f64) -> f64 {
    if x.abs() < 0.05 {
        let x2 = x * x;
        -x2 * (1.0 / 6.0 + x2 * (1.0 / 180.0 + x2 * (1.0 / 2835.0 + x2 / 37800.0)))
    } else {
        (x.sin() / x).ln()
    }
}

/// `ln A(0)`, the limit `(beta ln beta + (1 - beta) ln(1 - beta)) / (1 - beta)`.
fn ln_kanter0(beta: f64) -> f64 {
    let c = 1.0 - beta;
    (beta * beta.ln() + c * c.ln()) / c
}

/// `ln A(phi) - ln A(0) >= 0` with
/// `A(phi) = (sin(beta phi) / sin phi)^(1/(1-beta)) sin((1-beta) phi) / sin(beta phi)`.
fn kanter_excess(beta: f64, phi: f64) -> f64 {
    let c = 1.0 - beta;
    (beta * ln_sinc(beta * phi) + c * ln_sinc(c * phi) - ln_sinc(phi)) / c
}

fn ln_kanter(beta: f64, phi: f64) -> f64 {
    ln_kanter0(beta) + kanter_excess(beta, phi)
}

/// Coefficient of the heavy tail `g(u) ~ beta / Gamma(1 - beta) u^(-1 - beta)`.
pub fn subordinator_tail_constant(beta: f64) -> f64 {
    beta / gamma(1.0 - beta)
}

/// Convergent large-`u` series `(1/pi) sum (-1)^(k+1) Gamma(beta k + 1)/k! sin(pi beta k) u^(-beta k - 1)`.
fn large_u_series(beta: f64, u: f64) -> Option<f64> {
    let lu = u.ln();
    let mut sum = 0.0f64;
    let mut largest = 0.0f64;
    for k in 1..=400usize {
        let kf = k as f64;
        let bound = (ln_gamma(beta * kf + 1.0) - ln_gamma(kf + 1.0) - (beta * kf + 1.0) * lu).exp() / PI;
        let term = bound * sin_pi(beta * kf);
        sum += if k % 2 == 1 { term } else { -term };
        largest = largest.max(bound);
        if k >= 3 && bound <= 1e-16 * sum.abs() {
            return if sum > 0.0 && largest <= 10.0 * sum { Some(sum) } else { None };
        }
    }
    None
}

/// Splits `(0, pi)` where `h = eps A(phi)` crosses one, plus a width point near the origin.
fn kanter_breakpoints(beta: f64, ln_eps: f64) -> Vec<f64> {
    let h0 = (ln_eps + ln_kanter0(beta)).exp();
    let mut pts = vec![0.0];
    if h0 < 1.0 {
        let (mut lo, mut hi) = (0.0, PI);
        for _ in 0..80 {
            let m = 0.5 * (lo + hi);
            if ln_eps + ln_kanter(beta, m) < 0.0 {
                lo = m;
            } else {
                hi = m;
            }
        }
        let star = 0.5 * (lo + hi);
        for p in [0.5 * star, star, 0.5 * (star + PI)] {
            if p > *pts.last().unwrap() && p < PI {
                pts.push(p);
            }
        }
    } else {
        let w = 5.0 / h0.sqrt();
        for p in [0.2 * w, w, 3.0 * w] {
            if p < PI {
                pts.push(p);
            }
        }
    }
    pts.push(PI);
    pts
}

const KANTER_TOL: Tolerance = Tolerance { abs: 1e-300, rel: 1e-14, max_intervals: 2000 };

/// `ln g_beta(u)` from the Kanter integral, with `exp(-min h)` factored out so
/// that arbitrarily small `u` stay representable.
fn kanter_ln_density(beta: f64, u: f64) -> Result<f64> {
    let c = 1.0 - beta;
    let ln_eps = -beta / c * u.ln();
    let pts = kanter_breakpoints(beta, ln_eps);
    let lh0 = ln_eps + ln_kanter0(beta);
    let h0 = lh0.exp();
    let shifted = h0 > 1.0;
    let f = |phi: f64| {
        let ex = kanter_excess(beta, phi);
        // h - shift, where shift = h0 when the peak sits at the origin
        let excess = if shifted { h0 * ex.exp_m1() } else { (lh0 + ex).exp() };
        let arg = lh0 + ex - excess;
        if arg.is_nan() || arg < -745.0 {
            0.0
        } else {
            arg.exp()
        }
    };
    let (v, _) = adaptive(f, &pts, KANTER_TOL)?;
    let shift = if shifted { h0 } else { 0.0 };
    Ok((beta / (c * PI * u)).ln() - shift + v.ln())
}

fn kanter_density(beta: f64, u: f64) -> Result<f64> {
    Ok(kanter_ln_density(beta, u)?.exp())
}

/// `ln g_beta(u)`; `-inf` for `u <= 0`. Stays finite where `g_beta` itself underflows.
pub fn ln_subordinator_density(beta: f64, u: f64) -> Result<f64> {
    check_beta(beta)?;
    if u.is_nan() {
        return domain("subordinator density evaluated at NaN");
    }
    if u <= 0.0 || u.is_infinite() {
        return Ok(f64::NEG_INFINITY);
    }
    if beta == 0.5 {
        return Ok(-0.5 * (4.0 * PI).ln() - 1.5 * u.ln() - 0.25 / u);
    }
    if u >= 1.0 {
        if let Some(v) = large_u_series(beta, u) {
            return Ok(v.ln());
        }
    }
    kanter_ln_density(beta, u)
}

/// Density `g_beta(u)` of `D_1`; zero for `u <= 0`.
pub fn subordinator_density(beta: f64, u: f64) -> Result<f64> {
    check_beta(beta)?;
    if u.is_nan() {
        return domain("subordinator density evaluated at NaN");
    }
    if u <= 0.0 || u.is_infinite() {
        return Ok(0.0);
    }
    if beta == 0.5 {
        return Ok((4.0 * PI).powf(-0.5) * u.powf(-1.5) * (-0.25 / u).exp());
    }
    if u >= 1.0 {
        if let Some(v) = large_u_series(beta, u) {
            return Ok(v);
        }
    }
    kanter_density(beta, u)
}

/// `P(D_1 <= u)`.
pub fn subordinator_cdf(beta: f64, u: f64) -> Result<f64> {
    check_beta(beta)?;
    if u <= 0.0 {
        return Ok(0.0);
    }
    if u.is_infinite() {
        return Ok(1.0);
    }
    if beta == 0.5 {
        return Ok(erfc(0.5 / u.sqrt()));
    }
    let ln_eps = -beta / (1.0 - beta) * u.ln();
    let pts = kanter_breakpoints(beta, ln_eps);
    let f = |phi: f64| {
        let lh = ln_eps + ln_kanter(beta, phi);
        if lh > 6.6 {
            0.0
        } else {
            (-lh.exp()).exp()
        }
    };
    let (v, _) = adaptive(f, &pts, KANTER_TOL)?;
    Ok((v / PI).min(1.0))
}

/// Density of `E_t` at `s`: `(t / beta) s^(-1 - 1/beta) g_beta(t s^(-1/beta))`.
pub fn inverse_subordinator_density(beta: f64, t: f64, s: f64) -> Result<f64> {
    check_beta(beta)?;
    if !(t > 0.0) {
        return domain(format!("inverse subordinator density needs t > 0, got {t}"));
    }
    if !(s > 0.0) {
        return domain(format!("inverse subordinator density needs s > 0, got {s}"));
    }
    let ib = 1.0 / beta;
    let g = subordinator_density(beta, t * s.powf(-ib))?;
    Ok(t / beta * s.powf(-1.0 - ib) * g)
}

/// One draw of `D_1` by Kanter's method.
pub fn sample_subordinator<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    let phi = rng.random::<f64>() * PI;
    let w: f64 = Exp1.sample(rng);
    let c = 1.0 - beta;
    ((ln_kanter(beta, phi) - w.ln()) * c / beta).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::GaussLegendre;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// `int_0^inf e^{-s u} g(u) du` by Gauss-Legendre panels in `v = ln u`.
    fn laplace(s: f64, g: impl Fn(f64) -> f64) -> f64 {
        let rule = GaussLegendre::new(20);
        let (lo, hi) = (-12f64 * 2.3, 40f64.ln() - s.ln() + 4.0);
        let n = 600;
        let mut acc = 0.0;
        for k in 0..n {
            let a = lo + (hi - lo) * k as f64 / n as f64;
            let b = lo + (hi - lo) * (k + 1) as f64 / n as f64;
            acc += rule.integrate(a, b, |v| {
                let u = v.exp();
                u * (-s * u).exp() * g(u)
            });
        }
        acc
    }

    #[test]
    fn laplace_transform_identity() {
        for &beta in &[0.3, 0.5, 0.7, 0.9] {
            for &s in &[0.5, 1.0, 2.0] {
                let got = laplace(s, |u| subordinator_density(beta, u).unwrap());
                let want = (-s.powf(beta)).exp();
                assert!((got - want).abs() < 1e-8, "beta={beta} s={s}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn kanter_integral_reproduces_half_order_closed_form() {
        for &u in &[0.01, 0.1, 0.5, 1.0, 3.0, 50.0] {
            let k = kanter_density(0.5, u).unwrap();
            let c = subordinator_density(0.5, u).unwrap();
            assert!((k - c).abs() < 1e-11 * c, "u={u}: {k} vs {c}");
        }
    }

    #[test]
    fn series_and_integral_agree() {
        for &beta in &[0.3, 0.7, 0.9] {
            for &u in &[2.0, 10.0, 100.0] {
                if let Some(s) = large_u_series(beta, u) {
                    let k = kanter_density(beta, u).unwrap();
                    assert!((s - k).abs() < 1e-11 * k, "beta={beta} u={u}: {s} vs {k}");
                }
            }
        }
    }

    #[test]
    fn vanishes_on_negative_axis() {
        for &beta in &[0.2, 0.5, 0.8] {
            assert_eq!(subordinator_density(beta, -1.0).unwrap(), 0.0);
            assert_eq!(subordinator_density(beta, 0.0).unwrap(), 0.0);
        }
        assert!(subordinator_density(1.0, 1.0).is_err());
        assert!(subordinator_density(0.0, 1.0).is_err());
    }

    #[test]
    fn heavy_tail_constant() {
        let beta = 0.7;
        let u = 1e8;
        let r = subordinator_density(beta, u).unwrap() * u.powf(beta + 1.0);
        let want = subordinator_tail_constant(beta);
        assert!((r - want).abs() < 1e-4 * want, "{r} vs {want}");
    }

    #[test]
    fn small_argument_decay_exponent() {
        // log g(u) ~ -(1 - beta) (u / beta)^(beta / (beta - 1)); fit the exponent of -log g.
        for &beta in &[0.3, 0.5, 0.7] {
            let pts: Vec<(f64, f64)> = (0..10)
                .map(|i| {
                    let u = beta * 10f64.powf(-10.0 - i as f64);
                    (u.ln(), (-ln_subordinator_density(beta, u).unwrap()).ln())
                })
                .collect();
            let n = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
                / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
            let want = beta / (beta - 1.0);
            assert!(((slope - want) / want).abs() < 0.05, "beta={beta}: {slope} vs {want}");
            // the generic route agrees with the closed form in log space too
            if beta == 0.5 {
                let u = 1e-6;
                let k = kanter_ln_density(beta, u).unwrap();
                let c = ln_subordinator_density(beta, u).unwrap();
                assert!((k - c).abs() < 1e-9 * c.abs(), "{k} vs {c}");
            }
        }
    }

    #[test]
    fn cdf_is_consistent_with_density() {
        let beta = 0.6;
        let (a, b) = (0.3, 4.0);
        let (mass, _) = adaptive(|u| subordinator_density(beta, u).unwrap(), &[a, 1.0, b], KANTER_TOL).unwrap();
        let diff = subordinator_cdf(beta, b).unwrap() - subordinator_cdf(beta, a).unwrap();
        assert!((mass - diff).abs() < 1e-12, "{mass} vs {diff}");
    }

    #[test]
    fn inverse_density_has_unit_mass() {
        for &t in &[0.1, 1.0, 10.0] {
            let rule = GaussLegendre::new(20);
            let (lo, hi) = ((1e-12f64).ln(), (1e8f64).ln());
            let n = 400;
            let mut m = 0.0;
            for k in 0..n {
                let a = lo + (hi - lo) * k as f64 / n as f64;
                let b = lo + (hi - lo) * (k + 1) as f64 / n as f64;
                m += rule.integrate(a, b, |v| v.exp() * inverse_subordinator_density(0.5, t, v.exp()).unwrap());
            }
            assert!((m - 1.0).abs() < 1e-6, "t={t}: {m}");
        }
        assert!(inverse_subordinator_density(0.5, 0.0, 1.0).is_err());
        assert!(inverse_subordinator_density(0.5, 1.0, -1.0).is_err());
    }

    #[test]
    fn sampler_matches_law_in_ks_distance() {
        // E_1 = D^(-beta); P(E_1 <= s) = 1 - P(D <= s^(-1/beta)).
        let beta = 0.5;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let mut e: Vec<f64> = (0..n).map(|_| sample_subordinator(beta, &mut rng).powf(-beta)).collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut ks = 0.0f64;
        for (i, &s) in e.iter().enumerate() {
            let f = 1.0 - subordinator_cdf(beta, s.powf(-1.0 / beta)).unwrap();
            let lo = i as f64 / n as f64;
            let hi = (i + 1) as f64 / n as f64;
            ks = ks.max((f - lo).abs()).max((hi - f).abs());
        }
        assert!(ks < 0.01, "KS distance {ks}");
    }
}
