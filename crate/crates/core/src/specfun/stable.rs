//! Symmetric stable densities `p(t, x)` with `E exp(i xi . X_t) = exp(-t |xi|^alpha)`.
//!
//! Closed forms cover `alpha = 2` (Gaussian, variance `2t` per coordinate)
//! and `alpha = 1` (Cauchy) in any dimension. For other `alpha` only `d = 1`
//! is available: the cosine integral for moderate `|x|` and the convergent (or
//! asymptotic) power series in `|x|^(-alpha)` far out.

use std::f64::consts::PI;
use std::io::Write;

use statrs::function::gamma::{gamma, ln_gamma};

use super::sin_pi;
use crate::error::{domain, Error, Result};
use crate::params::ModelParams;
use crate::quad::{adaptive, Tolerance};

/// Cutoff exponent for the cosine integral: `exp(-xi^alpha)` is below `4e-18` past `40^(1/alpha)`.
const FOURIER_CUTOFF: f64 = 40.0;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return domain(format!("stable index alpha = {alpha} outside (0, 2]"));
    }
    Ok(())
}

fn gaussian_radial(dim: usize, t: f64, r: f64) -> f64 {
    (4.0 * PI * t).powf(-(dim as f64) / 2.0) * (-r * r / (4.0 * t)).exp()
}

fn cauchy_radial(dim: usize, t: f64, r: f64) -> f64 {
    let h = (dim as f64 + 1.0) / 2.0;
    let c = gamma(h) / PI.powf(h);
    c * t / (t * t + r * r).powf(h)
}

fn gaussian_radial_derivative(dim: usize, t: f64, r: f64) -> f64 {
    -r / (2.0 * t) * gaussian_radial(dim, t, r)
}

fn cauchy_radial_derivative(dim: usize, t: f64, r: f64) -> f64 {
    -(dim as f64 + 1.0) * r / (t * t + r * r) * cauchy_radial(dim, t, r)
}

/// Coefficient `c` of the far field `p(1, x) ~ c |x|^(-d - alpha)`; zero for `alpha = 2`.
pub fn stable_tail_constant(alpha: f64, dim: usize) -> f64 {
    if alpha >= 2.0 {
        return 0.0;
    }
    let d = dim as f64;
    alpha * 2f64.powf(alpha - 1.0) * PI.powf(-d / 2.0 - 1.0) * (PI * alpha / 2.0).sin()
        * gamma((d + alpha) / 2.0)
        * gamma(alpha / 2.0)
}

/// `(1 / pi) int_0^inf cos(y xi) exp(-xi^alpha) d xi`, the one-dimensional density at unit time.
fn fourier_unit(alpha: f64, y: f64) -> Result<f64> {
    let xi_max = FOURIER_CUTOFF.powf(1.0 / alpha);
    let mut pts = vec![0.0];
    if alpha < 1.0 {
        // the cusp of xi^alpha at the origin
        for p in [1e-6, 1e-4, 1e-2, 0.1, 1.0] {
            if p < xi_max {
                pts.push(p);
            }
        }
    }
    let panels = (xi_max * y / (2.0 * PI)).ceil().max(1.0) as usize;
    let step = xi_max / panels as f64;
    for i in 1..=panels {
        let p = step * i as f64;
        if p > *pts.last().unwrap() {
            pts.push(p);
        }
    }
    let tol = Tolerance { abs: 1e-17, rel: 1e-14, max_intervals: 20 * pts.len() + 2000 };
    let (v, _) = adaptive(|xi| (y * xi).cos() * (-xi.powf(alpha)).exp(), &pts, tol)?;
    Ok(v / PI)
}

/// `d/dy` of the cosine integral: `-(1 / pi) int_0^inf xi sin(y xi) exp(-xi^alpha) d xi`.
fn fourier_unit_derivative(alpha: f64, y: f64) -> Result<f64> {
    if y == 0.0 {
        return Ok(0.0);
    }
    let xi_max = (FOURIER_CUTOFF + 5.0).powf(1.0 / alpha);
    let panels = (xi_max * y / (2.0 * PI)).ceil().max(1.0) as usize;
    let mut pts = vec![0.0];
    if alpha < 1.0 {
        for p in [1e-4, 1e-2, 1.0] {
            if p < xi_max / panels as f64 {
                pts.push(p);
            }
        }
    }
    let step = xi_max / panels as f64;
    for i in 1..=panels {
        pts.push(step * i as f64);
    }
    let tol = Tolerance { abs: 1e-17, rel: 1e-13, max_intervals: 20 * pts.len() + 2000 };
    let (v, _) = adaptive(|xi| -xi * (y * xi).sin() * (-xi.powf(alpha)).exp(), &pts, tol)?;
    Ok(v / PI)
}

/// Derivative of [`tail_series`] in `y`, summed with the same acceptance rule.
fn tail_series_derivative(alpha: f64, y: f64, rel_tol: f64) -> Option<f64> {
    let ly = y.ln();
    let mut sum = 0.0f64;
    let mut largest = 0.0f64;
    let mut prev = f64::INFINITY;
    for k in 1..=300usize {
        let kf = k as f64;
        let e = alpha * kf + 1.0;
        let bound = e * (ln_gamma(e) - ln_gamma(kf + 1.0) - (e + 1.0) * ly).exp() / PI;
        let term = -bound * sin_pi(kf * alpha / 2.0);
        sum += if k % 2 == 1 { term } else { -term };
        largest = largest.max(bound);
        if k >= 2 && bound <= rel_tol * sum.abs() {
            return if sum < 0.0 && largest <= -1e2 * sum { Some(sum) } else { None };
        }
        if k >= 2 && bound > prev {
            return None;
        }
        prev = bound;
    }
    None
}

/// Far-field series `(1/pi) sum_k (-1)^(k+1) Gamma(alpha k + 1)/k! sin(k pi alpha / 2) y^(-alpha k - 1)`.
/// Returns `None` unless the terms shrink to `rel_tol` without cancellation.
fn tail_series(alpha: f64, y: f64, rel_tol: f64) -> Option<f64> {
    if y <= 0.0 {
        return None;
    }
    let ly = y.ln();
    let mut sum = 0.0f64;
    let mut largest = 0.0f64;
    let mut prev = f64::INFINITY;
    for k in 1..=300usize {
        let kf = k as f64;
        let bound = (ln_gamma(alpha * kf + 1.0) - ln_gamma(kf + 1.0) - (alpha * kf + 1.0) * ly).exp() / PI;
        let term = bound * sin_pi(kf * alpha / 2.0);
        sum += if k % 2 == 1 { term } else { -term };
        largest = largest.max(bound);
        if k >= 2 && bound <= rel_tol * sum.abs() {
            return if sum > 0.0 && largest <= 1e2 * sum { Some(sum) } else { None };
        }
        if k >= 2 && bound > prev {
            return None;
        }
        prev = bound;
    }
    None
}

/// `p(1, y)` on the line.
pub fn stable_unit_density_1d(alpha: f64, y: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let y = y.abs();
    if alpha == 2.0 {
        return Ok(gaussian_radial(1, 1.0, y));
    }
    if alpha == 1.0 {
        return Ok(cauchy_radial(1, 1.0, y));
    }
    if y.is_infinite() {
        return Ok(0.0);
    }
    if y >= 1.0 {
        if let Some(v) = tail_series(alpha, y, 1e-15) {
            return Ok(v);
        }
    }
    fourier_unit(alpha, y)
}

/// `d/dy p(1, y)` on the line.
pub fn stable_unit_density_1d_derivative(alpha: f64, y: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let sign = if y < 0.0 { -1.0 } else { 1.0 };
    let y = y.abs();
    let v = if alpha == 2.0 {
        gaussian_radial_derivative(1, 1.0, y)
    } else if alpha == 1.0 {
        cauchy_radial_derivative(1, 1.0, y)
    } else if y.is_infinite() {
        0.0
    } else if let Some(v) = (y >= 1.0).then(|| tail_series_derivative(alpha, y, 1e-15)).flatten() {
        v
    } else {
        fourier_unit_derivative(alpha, y)?
    };
    Ok(sign * v)
}

/// `p(t, r)` as a function of the radius `r = |x|`.
pub fn stable_density_radial(alpha: f64, dim: usize, t: f64, r: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(t > 0.0) {
        return domain(format!("stable density needs t > 0, got {t}"));
    }
    if dim == 0 {
        return domain("dimension must be at least 1");
    }
    let r = r.abs();
    if alpha == 2.0 {
        return Ok(gaussian_radial(dim, t, r));
    }
    if alpha == 1.0 {
        return Ok(cauchy_radial(dim, t, r));
    }
    if dim != 1 {
        return Err(Error::Unsupported(format!(
            "stable density for alpha = {alpha} is only available in one dimension (got d = {dim})"
        )));
    }
    let s = t.powf(-1.0 / alpha);
    Ok(s * stable_unit_density_1d(alpha, r * s)?)
}

/// `p(t, x)` for a point `x` of the model dimension.
pub fn stable_density(params: &ModelParams, t: f64, x: &[f64]) -> Result<f64> {
    if x.len() != params.dim {
        return domain(format!("point has {} coordinates, model dimension is {}", x.len(), params.dim));
    }
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    stable_density_radial(params.alpha, params.dim, t, r)
}

const PANEL_DEGREE: usize = 24;
const PANEL_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
struct ChebPanel {
    b: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

fn lobatto_weight(j: usize, n: usize) -> f64 {
    let s = if j % 2 == 0 { 1.0 } else { -1.0 };
    if j == 0 || j == n {
        0.5 * s
    } else {
        s
    }
}

impl ChebPanel {
    fn build(a: f64, b: f64, f: &impl Fn(f64) -> Result<f64>, df: &impl Fn(f64) -> Result<f64>) -> Result<Self> {
        let n = PANEL_DEGREE;
        let mut nodes = Vec::with_capacity(n + 1);
        let mut values = Vec::with_capacity(n + 1);
        let mut slopes = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let c = (PI * j as f64 / n as f64).cos();
            let x = 0.5 * (a + b) + 0.5 * (b - a) * c;
            nodes.push(x);
            values.push(f(x)?);
            slopes.push(df(x)?);
        }
        Ok(Self { b, nodes, values, slopes })
    }

    fn barycentric(&self, x: f64, data: &[f64]) -> f64 {
        let n = PANEL_DEGREE;
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..=n {
            let diff = x - self.nodes[j];
            if diff == 0.0 {
                return data[j];
            }
            let w = lobatto_weight(j, n) / diff;
            num += w * data[j];
            den += w;
        }
        num / den
    }

    fn eval(&self, x: f64) -> f64 {
        self.barycentric(x, &self.values)
    }

    fn eval_derivative(&self, x: f64) -> f64 {
        self.barycentric(x, &self.slopes)
    }
}

#[derive(Debug, Clone)]
enum ProfileKind {
    Gaussian,
    Cauchy,
    /// Chebyshev panels on `[0, switch]`, far-field series beyond.
    Generic { panels: Vec<ChebPanel>, switch: f64, series: Vec<(f64, f64)> },
}

/// Tabulated unit-time stable density `p(1, |x|)`, cheap to evaluate repeatedly.
#[derive(Debug, Clone)]
pub struct StableProfile {
    pub alpha: f64,
    pub dim: usize,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub tail_constant: f64,
    kind: ProfileKind,
}

impl StableProfile {
    pub fn new(alpha: f64, dim: usize) -> Result<Self> {
        check_alpha(alpha)?;
        if dim == 0 {
            return domain("dimension must be at least 1");
        }
        let tail_constant = stable_tail_constant(alpha, dim);
        if alpha == 2.0 || alpha == 1.0 {
            let kind = if alpha == 2.0 { ProfileKind::Gaussian } else { ProfileKind::Cauchy };
            let grid: Vec<f64> = (0..=400).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 400.0)).collect();
            let mut p = Self { alpha, dim, grid: Vec::new(), values: Vec::new(), tail_constant, kind };
            p.values = grid.iter().map(|&r| p.eval(r)).collect();
            p.grid = grid;
            return Ok(p);
        }
        if dim != 1 {
            return Err(Error::Unsupported(format!(
                "stable profile for alpha = {alpha} is only available in one dimension (got d = {dim})"
            )));
        }
        let mut switch = 1.0;
        while tail_series(alpha, switch, 1e-15).is_none() {
            switch *= 2.0;
            if switch > 1e6 {
                return Err(Error::Quadrature {
                    context: format!("far-field series never converges for alpha = {alpha}"),
                    error: f64::NAN,
                });
            }
        }
        let direct = |y: f64| fourier_unit(alpha, y);
        let direct_derivative = |y: f64| fourier_unit_derivative(alpha, y);
        let mut edges = vec![0.0, 0.5, 1.0];
        while *edges.last().unwrap() < switch {
            let next = edges.last().unwrap() * 2.0;
            edges.push(next);
        }
        let mut panels = Vec::new();
        for w in edges.windows(2) {
            build_adaptive(w[0], w[1], &direct, &direct_derivative, 0, &mut panels)?;
        }
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for p in &panels {
            for (x, v) in p.nodes.iter().rev().zip(p.values.iter().rev()) {
                if grid.last().is_none_or(|&g| *x > g) {
                    grid.push(*x);
                    values.push(*v);
                }
            }
        }
        // signed coefficients and magnitudes of the far-field series
        let mut series = Vec::new();
        for k in 1..=300usize {
            let kf = k as f64;
            let lb = ln_gamma(alpha * kf + 1.0) - ln_gamma(kf + 1.0);
            if lb > 600.0 {
                break;
            }
            let b = lb.exp() / PI;
            let a = b * sin_pi(kf * alpha / 2.0) * if k % 2 == 1 { 1.0 } else { -1.0 };
            series.push((a, b));
        }
        Ok(Self { alpha, dim, grid, values, tail_constant, kind: ProfileKind::Generic { panels, switch, series } })
    }

    /// `p(1, r)`.
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        match &self.kind {
            ProfileKind::Gaussian => gaussian_radial(self.dim, 1.0, r),
            ProfileKind::Cauchy => cauchy_radial(self.dim, 1.0, r),
            ProfileKind::Generic { panels, switch, series } => {
                if r >= *switch {
                    return far_field(self.alpha, series, r, 0);
                }
                let idx = panels.partition_point(|p| p.b <= r).min(panels.len() - 1);
                panels[idx].eval(r)
            }
        }
    }

    /// `d/dr p(1, r)` for `r >= 0`.
    pub fn eval_derivative(&self, r: f64) -> f64 {
        let r = r.abs();
        match &self.kind {
            ProfileKind::Gaussian => gaussian_radial_derivative(self.dim, 1.0, r),
            ProfileKind::Cauchy => cauchy_radial_derivative(self.dim, 1.0, r),
            ProfileKind::Generic { panels, switch, series } => {
                if r >= *switch {
                    return far_field(self.alpha, series, r, 1);
                }
                let idx = panels.partition_point(|p| p.b <= r).min(panels.len() - 1);
                panels[idx].eval_derivative(r)
            }
        }
    }

    /// `p(t, r)` by the scaling `p(t, x) = t^(-d/alpha) p(1, t^(-1/alpha) x)`.
    pub fn density(&self, t: f64, r: f64) -> f64 {
        let s = t.powf(-1.0 / self.alpha);
        s.powi(self.dim as i32) * self.eval(r * s)
    }

    /// Radius beyond which the far-field series is used (infinite for closed forms).
    pub fn series_switch(&self) -> f64 {
        match &self.kind {
            ProfileKind::Generic { switch, .. } => *switch,
            _ => f64::INFINITY,
        }
    }

    /// Writes `x,p1_of_x` rows for the tabulated abscissae.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,p1_of_x")?;
        for (x, v) in self.grid.iter().zip(&self.values) {
            writeln!(w, "{x:.17e},{v:.17e}")?;
        }
        Ok(())
    }
}

/// Far-field series (`order = 0`) or its derivative (`order = 1`) from precomputed coefficients.
fn far_field(alpha: f64, series: &[(f64, f64)], y: f64, order: usize) -> f64 {
    if y.is_infinite() {
        return 0.0;
    }
    let q = y.powf(-alpha);
    let mut pw = 1.0 / y;
    let mut sum = 0.0;
    for (k, (a, b)) in series.iter().enumerate() {
        pw *= q;
        let (term, bound) = if order == 0 {
            (a * pw, b * pw)
        } else {
            let e = -(alpha * (k + 1) as f64 + 1.0) / y;
            (e * a * pw, -e * b * pw)
        };
        sum += term;
        if bound <= 1e-16 * sum.abs() {
            break;
        }
    }
    sum
}

fn build_adaptive(
    a: f64,
    b: f64,
    f: &impl Fn(f64) -> Result<f64>,
    df: &impl Fn(f64) -> Result<f64>,
    depth: usize,
    out: &mut Vec<ChebPanel>,
) -> Result<()> {
    let panel = ChebPanel::build(a, b, f, df)?;
    let mut worst = 0.0f64;
    for k in [1usize, 5, 11, 17, 23] {
        let x = 0.5 * (panel.nodes[k] + panel.nodes[k - 1]);
        let exact = f(x)?;
        worst = worst.max(((panel.eval(x) - exact) / exact).abs());
        let dexact = df(x)?;
        // derivative vanishes at the origin; measure it against the local scale
        let scale = dexact.abs().max(exact / b.max(1.0) * 1e-3);
        worst = worst.max(((panel.eval_derivative(x) - dexact) / scale).abs() * 1e-2);
    }
    if worst <= PANEL_REL_TOL || depth >= 6 {
        out.push(panel);
        return Ok(());
    }
    let m = 0.5 * (a + b);
    build_adaptive(a, m, f, df, depth + 1, out)?;
    build_adaptive(m, b, f, df, depth + 1, out)
}
