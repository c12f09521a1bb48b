//! Mittag-Leffler functions `E_beta(-x)` and `E_{beta,2}(-x)` for `x >= 0`.
//!
//! Small arguments use the power series. Large arguments use the algebraic
//! asymptotic expansion when it converges to full precision, and otherwise a
//! non-oscillatory Laplace-type integral. With `q = r^beta` the spectral
//! representation of the completely monotone function becomes
//!
//! `E_beta(-x) = sin(beta pi) / (beta pi) * int_0^inf exp(-(x q)^(1/beta)) / (q^2 + 2 q cos(beta pi) + 1) dq`,
//!
//! whose integrand is bounded and smooth on `[0, inf)`.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use super::{rgamma, rgamma_bound};
use crate::error::{domain, Result};
use crate::quad::{adaptive, adaptive_to_infinity, Tolerance};

const ML_TOL: Tolerance = Tolerance { abs: 1e-300, rel: 2e-15, max_intervals: 4000 };

fn check_args(beta: f64, x: f64) -> Result<()> {
    if !(beta > 0.0 && beta <= 1.0) {
        return domain(format!("Mittag-Leffler order beta = {beta} outside (0, 1]"));
    }
    if x.is_nan() || x < 0.0 {
        return domain(format!("Mittag-Leffler argument must be >= 0, got {x}"));
    }
    Ok(())
}

/// `E_beta(-x)` for `0 < beta <= 1`, `x >= 0`.
pub fn mittag_leffler_neg(beta: f64, x: f64) -> Result<f64> {
    check_args(beta, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if beta == 1.0 {
        return Ok((-x).exp());
    }
    if x <= 1.0 {
        return Ok(series(beta, 1.0, x));
    }
    if let Some(v) = asymptotic(beta, 1.0, x) {
        return Ok(v);
    }
    integral_e1(beta, x)
}

/// `E_{beta,2}(-x)`, the primitive kernel: `d/dt [t E_{beta,2}(-nu t^beta)] = E_beta(-nu t^beta)`.
pub fn mittag_leffler_neg2(beta: f64, x: f64) -> Result<f64> {
    check_args(beta, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if beta == 1.0 {
        return Ok(-(-x).exp_m1() / x);
    }
    if x <= 1.0 {
        return Ok(series(beta, 2.0, x));
    }
    if let Some(v) = asymptotic(beta, 2.0, x) {
        return Ok(v);
    }
    integral_e2(beta, x)
}

fn series(beta: f64, gamma0: f64, x: f64) -> f64 {
    let lx = x.ln();
    let mut sum = 0.0;
    for k in 0..4000usize {
        let kf = k as f64;
        let mag = (kf * lx - ln_gamma(gamma0 + beta * kf)).exp();
        let term = if k % 2 == 0 { mag } else { -mag };
        sum += term;
        if k > 4 && mag < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Algebraic expansion `sum_{k>=1} (-1)^(k+1) x^(-k) / Gamma(g - beta k)`;
/// `None` when the terms stop shrinking before full precision is reached.
fn asymptotic(beta: f64, gamma0: f64, x: f64) -> Option<f64> {
    if x < 4.0 {
        return None;
    }
    let lx = x.ln();
    let mut sum = 0.0;
    let mut prev_bound = f64::INFINITY;
    for k in 1..200usize {
        let kf = k as f64;
        let z = gamma0 - beta * kf;
        let bound = (rgamma_bound(z).ln() - kf * lx).exp();
        let term = rgamma(z) * (-kf * lx).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if k > 2 && bound < 1e-17 * sum.abs() {
            return if sum > 0.0 { Some(sum) } else { None };
        }
        if bound > prev_bound && k > 2 {
            return None;
        }
        prev_bound = bound;
    }
    None
}

fn denominator(beta: f64) -> impl Fn(f64) -> f64 {
    let c = (beta * PI).cos();
    move |q: f64| q * q + 2.0 * q * c + 1.0
}

fn breakpoints(beta: f64, scale: f64, upper: f64) -> Vec<f64> {
    let mut pts = vec![0.0, scale.min(upper)];
    let c = (beta * PI).cos();
    if c < 0.0 {
        let peak = -c;
        let width = (beta * PI).sin();
        for p in [peak - 4.0 * width, peak, peak + 4.0 * width] {
            if p > 0.0 && p < upper {
                pts.push(p);
            }
        }
    }
    pts.push(upper);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}

fn integral_e1(beta: f64, x: f64) -> Result<f64> {
    let den = denominator(beta);
    let inv_beta = 1.0 / beta;
    // exp(-(x q)^(1/beta)) is negligible past q = 745^beta / x.
    let upper = 745f64.powf(beta) / x;
    let pts = breakpoints(beta, 1.0 / x, upper);
    let (v, _) = adaptive(|q| (-(x * q).powf(inv_beta)).exp() / den(q), &pts, ML_TOL)?;
    Ok((beta * PI).sin() / (beta * PI) * v)
}

fn integral_e2(beta: f64, x: f64) -> Result<f64> {
    let den = denominator(beta);
    let inv_beta = 1.0 / beta;
    let f = |u: f64| {
        if u == 0.0 {
            return 1.0 / den(0.0);
        }
        let w = u.powf(inv_beta);
        let num = if w < 1e-8 { 1.0 - 0.5 * w } else { -(-w).exp_m1() / w };
        num / den(u / x)
    };
    // Peak of 1/den(u/x) sits at u = -x cos(beta pi) when beta > 1/2.
    let c = (beta * PI).cos();
    let mut pts = vec![0.0, 1.0];
    let mut last = 1.0f64;
    if c < 0.0 {
        let peak = -c * x;
        let width = (beta * PI).sin() * x;
        for p in [peak - 4.0 * width, peak, peak + 4.0 * width] {
            if p > last {
                pts.push(p);
                last = p;
            }
        }
    }
    let finite_end = (4.0 * x).max(last * 2.0).max(2.0);
    pts.push(finite_end);
    let (head, _) = adaptive(f, &pts, ML_TOL)?;
    let (tail, _) = adaptive_to_infinity(f, finite_end, ML_TOL)?;
    Ok((beta * PI).sin() / (beta * PI * x) * (head + tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;

    /// `exp(x^2) erfc(x)`: Taylor series of erf below 2, continued fraction above.
    fn scaled_erfc(x: f64) -> f64 {
        if x < 2.0 {
            let mut term = x;
            let mut sum = x;
            for n in 1..200 {
                term *= -x * x / n as f64;
                let add = term / (2 * n + 1) as f64;
                sum += add;
                if add.abs() < 1e-18 {
                    break;
                }
            }
            (x * x).exp() * (1.0 - 2.0 / PI.sqrt() * sum)
        } else {
            let mut k = x;
            for n in (1..400).rev() {
                k = x + (n as f64 / 2.0) / k;
            }
            1.0 / (PI.sqrt() * k)
        }
    }

    #[test]
    fn anchors() {
        for b in [0.1, 0.5, 0.9, 1.0] {
            assert_eq!(mittag_leffler_neg(b, 0.0).unwrap(), 1.0);
        }
        assert!((mittag_leffler_neg(1.0, 1.0).unwrap() - (-1f64).exp()).abs() < 1e-15);
        let expected = scaled_erfc(1.0);
        assert!((mittag_leffler_neg(0.5, 1.0).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn half_order_matches_erfc_identity_across_branches() {
        // E_{1/2}(-t) = exp(t^2) erfc(t)
        for &t in &[0.3, 0.99, 1.01, 2.0, 3.5, 5.0, 8.0, 30.0] {
            let got = mittag_leffler_neg(0.5, t).unwrap();
            let want = scaled_erfc(t);
            assert!((got - want).abs() < 1e-12 * want, "t={t}: {got} vs {want}");
        }
    }

    #[test]
    fn integral_and_series_agree_in_overlap() {
        for &b in &[0.2, 0.5, 0.75, 0.95] {
            for &x in &[0.3, 0.7, 1.0] {
                let s = series(b, 1.0, x);
                let i = integral_e1(b, x).unwrap();
                assert!((s - i).abs() < 1e-11, "beta={b} x={x}: {s} vs {i}");
                let s2 = series(b, 2.0, x);
                let i2 = integral_e2(b, x).unwrap();
                assert!((s2 - i2).abs() < 1e-11, "E2 beta={b} x={x}: {s2} vs {i2}");
            }
        }
    }

    #[test]
    fn asymptotic_and_integral_agree() {
        for &b in &[0.3, 0.5, 0.8] {
            for &x in &[20.0, 100.0, 1e4] {
                if let Some(a) = asymptotic(b, 1.0, x) {
                    let i = integral_e1(b, x).unwrap();
                    assert!((a - i).abs() < 1e-12 * i, "beta={b} x={x}: {a} vs {i}");
                }
                if let Some(a) = asymptotic(b, 2.0, x) {
                    let i = integral_e2(b, x).unwrap();
                    assert!((a - i).abs() < 1e-12 * i, "E2 beta={b} x={x}: {a} vs {i}");
                }
            }
        }
    }

    #[test]
    fn primitive_relation_by_quadrature() {
        // int_0^T E_b(-nu s^b) ds = T E_{b,2}(-nu T^b)
        let (b, nu, t_end) = (0.6, 2.5, 3.0);
        let (lhs, _) = adaptive(
            |s| mittag_leffler_neg(b, nu * s.powf(b)).unwrap(),
            &[0.0, 0.01, 0.1, 1.0, t_end],
            Tolerance { abs: 1e-14, rel: 1e-12, max_intervals: 500 },
        )
        .unwrap();
        let rhs = t_end * mittag_leffler_neg2(b, nu * t_end.powf(b)).unwrap();
        assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn polynomial_decay_bounds() {
        for &b in &[0.3, 0.5, 0.7] {
            for i in 0..200 {
                let t = 10f64.powf(-3.0 + 7.0 * i as f64 / 199.0);
                let e = mittag_leffler_neg(b, t).unwrap();
                let lo = 1.0 / (1.0 + gamma(1.0 - b) * t);
                let hi = 1.0 / (1.0 + t / gamma(1.0 + b));
                assert!(lo <= e + 1e-12 && e <= hi + 1e-12, "b={b} t={t}: {lo} {e} {hi}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(mittag_leffler_neg(0.0, 1.0).is_err());
        assert!(mittag_leffler_neg(1.2, 1.0).is_err());
        assert!(mittag_leffler_neg(0.5, -1.0).is_err());
    }
}
