use std::f64::consts::PI;

use proptest::prelude::*;

use super::basis::centred_difference_weights;
use super::*;
use crate::operators::{Field, TimeMesh};
use crate::params::ModelParams;

fn nodal(basis: &SpectralBasis, n: usize) -> Vec<f64> {
    let mut v = vec![0.0];
    v.extend(&basis.modes[n - 1]);
    v.push(0.0);
    v
}

fn field_of(basis: &SpectralBasis, f: impl Fn(f64) -> f64) -> Field {
    let r = basis.half_width();
    Field::from_fn(basis.grid, 0.0, |x| if x.abs() >= r { 0.0 } else { f(x) }).unwrap()
}

#[test]
fn sine_basis() {
    let b = build_basis(2.0, 1.0, 129, 20).unwrap();
    assert!((b.eigenvalues[0] - 2.4674011).abs() < 1e-7);
    assert!(!b.approximate);
    assert!(b.orthonormality_residual(20) < 1e-6);
    assert!(b.modes[0].iter().all(|&v| v > 0.0));
}

#[test]
fn centred_difference_reduces_to_second_difference() {
    let g = centred_difference_weights(2.0, 4);
    assert!((g[0] - 2.0).abs() < 1e-14 && (g[1] + 1.0).abs() < 1e-14);
    assert!(g[2].abs() < 1e-14 && g[3].abs() < 1e-14);
    // the symbol sum_k g_k e^(ik theta) = |2 sin(theta/2)|^alpha vanishes at theta = 0
    let g = centred_difference_weights(1.5, 200_000);
    let total = g[0] + 2.0 * g[1..].iter().sum::<f64>();
    assert!(total.abs() < 1e-3, "{total}");
}

#[test]
fn fractional_basis_invariants() {
    let b = build_basis(1.5, 1.0, 129, 20).unwrap();
    assert!(b.approximate);
    assert!(b.orthonormality_residual(20) < 1e-6);
    assert!(b.eigenvalues.windows(2).all(|w| w[1] > w[0]) && b.eigenvalues[0] > 0.0);
    assert!(b.modes[0].iter().all(|&v| v > 0.0));
    let fine = build_basis(1.5, 1.0, 257, 1).unwrap();
    let rel = (b.eigenvalues[0] - fine.eigenvalues[0]).abs() / fine.eigenvalues[0];
    assert!(rel < 0.02, "{rel}");
    assert!(build_basis(1.5, 1.0, 11, 0).is_err());
    assert!(build_basis(1.5, 1.0, 11, 10).is_err());
}

#[test]
fn basis_cache_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let b = build_basis(1.2, 2.0, 33, 6).unwrap();
    let csv = dir.path().join("basis.csv");
    save_basis(&b, &csv).unwrap();
    assert_eq!(load_basis(&csv).unwrap(), b);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("n,nu,v_1,"));
}

#[test]
fn classical_kernel_matches_images() {
    // e^(t Delta) on (-R, R) by the method of images
    let (r, t) = (1.0, 0.05);
    let g = |z: f64| (-z * z / (4.0 * t)).exp() / (4.0 * PI * t).sqrt();
    let images = |x: f64, y: f64| -> f64 {
        (-20..=20).map(|k| g(x - y + 4.0 * k as f64 * r) - g(x + y + 2.0 * r + 4.0 * k as f64 * r)).sum()
    };
    let b = build_basis(2.0, r, 129, 64).unwrap();
    for &(x, y) in &[(0.0, 0.0), (0.3, -0.2), (0.9, 0.7), (-0.5, 0.55)] {
        let k = dirichlet_kernel(&b, 1.0, t, x, y).unwrap();
        assert!((k.value - images(x, y)).abs() < 1e-8, "({x},{y}): {} vs {}", k.value, images(x, y));
        assert!(k.tail_bound < 1e-6);
    }
    assert!(dirichlet_kernel(&b, 1.0, 0.0, 0.0, 0.0).is_err());
}

#[test]
fn diagonal_partial_sums_grow() {
    let b = build_basis(1.5, 1.0, 65, 40).unwrap();
    let mut prev = 0.0;
    for n in [1, 5, 10, 20, 40] {
        let sub = SpectralBasis { eigenvalues: b.eigenvalues[..n].to_vec(), modes: b.modes[..n].to_vec(), ..b.clone() };
        let v = dirichlet_kernel(&sub, 0.5, 1e-4, 0.1, 0.1).unwrap().value;
        assert!(v > prev);
        prev = v;
    }
    assert!(dirichlet_kernel(&b, 0.5, 1e-4, 0.1, 0.1).unwrap().tail_bound.is_finite());
    let b1 = build_basis(0.8, 1.0, 33, 4).unwrap();
    assert!(dirichlet_kernel(&b1, 0.5, 1.0, 0.0, 0.0).unwrap().tail_bound.is_infinite());
}

#[test]
fn first_mode_weighted_mass() {
    let b = build_basis(1.5, 1.0, 65, 16).unwrap();
    let (beta, t) = (0.5, 0.7);
    let xs = b.grid.nodes();
    let inner = &xs[1..xs.len() - 1];
    let mut total = 0.0;
    for (i, &x) in inner.iter().enumerate() {
        for (j, &y) in inner.iter().enumerate() {
            total += dirichlet_kernel(&b, beta, t, x, y).unwrap().value * b.modes[0][i] * b.modes[0][j];
        }
    }
    total *= b.dx() * b.dx();
    let want = mittag_leffler_neg(beta, b.eigenvalues[0] * t.powf(beta)).unwrap();
    assert!((total - want).abs() < 1e-6, "{total} vs {want}");
}

#[test]
fn kaplan_functional_values() {
    let b = build_basis(1.5, 1.0, 65, 8).unwrap();
    let phi1 = Field { grid: b.grid, values: nodal(&b, 1), time: 0.0 };
    let phi2 = Field { grid: b.grid, values: nodal(&b, 2).iter().map(|v| v.abs()).collect(), time: 0.0 };
    assert!((kaplan_functional(&phi1, &b).unwrap() - 1.0).abs() < 1e-6);
    let signed = Field { values: nodal(&b, 2), ..phi2.clone() };
    assert!(kaplan_functional(&signed, &b).unwrap().abs() < 1e-6);
    // trapezoid over all nodes, zero ends included
    let v = field_of(&b, |x| (1.0 - x * x) * (3.0 + x).ln());
    let f1 = nodal(&b, 1);
    let n = v.values.len();
    let h = b.dx();
    let mut trap = 0.5 * h * (v.values[0] * f1[0] + v.values[n - 1] * f1[n - 1]);
    for i in 1..n - 1 {
        trap += h * v.values[i] * f1[i];
    }
    assert!((kaplan_functional(&v, &b).unwrap() - trap).abs() < 1e-12);
}

/// Integrates `dsigma/dv = e^(-eta v)` with `v = ln G`, `sigma = s^(1-b)/(1-b)`, by classical RK4.
fn ode_oracle(beta: f64, eta: f64, k: f64) -> f64 {
    let b = beta * (1.0 + eta);
    let f = |v: f64| (-eta * v).exp();
    let (v0, v1) = (k.ln(), k.ln() + 80.0 / eta);
    let steps = 20_000;
    let h = (v1 - v0) / steps as f64;
    let mut sigma = 0.0;
    for i in 0..steps {
        let v = v0 + h * i as f64;
        sigma += h / 6.0 * (f(v) + 4.0 * f(v + h / 2.0) + f(v + h));
    }
    ((1.0 - b) * sigma).powf(1.0 / (1.0 - b))
}

#[test]
fn ode_blowup_anchor() {
    let t = ode_blowup_time(0.5, 0.5, 1.0).unwrap().unwrap();
    assert!((t - 0.0625).abs() < 1e-6);
    assert!((t - ode_oracle(0.5, 0.5, 1.0)).abs() < 1e-6);
    let t_small = ode_blowup_time(0.5, 0.5, 1e-3).unwrap().unwrap();
    assert!((t_small / ode_oracle(0.5, 0.5, 1e-3) - 1.0).abs() < 1e-6);
    assert!(ode_blowup_time(0.5, 0.5, 0.0).is_err());
    assert!(ode_blowup_time(0.6, 1.0, 0.1).unwrap().is_none());
    assert!(ode_blowup_time(0.6, 1.0, 100.0).unwrap().is_some());
    assert!(ode_blowup_time(0.5, 1.0, 2.0).unwrap().is_some());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ode_time_grows_as_data_shrinks(k in 1e-4f64..10.0, shrink in 0.01f64..0.99) {
        let a = ode_blowup_time(0.5, 0.5, k).unwrap().unwrap();
        let b = ode_blowup_time(0.5, 0.5, k * shrink).unwrap().unwrap();
        prop_assert!(b > a);
    }
}

fn params(alpha: f64, beta: f64, eta: f64) -> ModelParams {
    ModelParams::new(alpha, beta, 1, eta).unwrap()
}

#[test]
fn linear_modes_evolve_exactly() {
    let b = build_basis(2.0, 1.0, 65, 16).unwrap();
    let coeff = [1.0, 0.0, 0.2];
    let v0 = Field { grid: b.grid, values: (0..65).map(|i| (0..3).map(|n| coeff[n] * nodal(&b, n + 1)[i]).sum::<f64>().max(0.0)).collect(), time: 0.0 };
    let mut cfg = DirichletConfig::new(b.clone(), params(2.0, 0.5, 0.5), v0, TimeMesh::geometric(1e-3, 1e3, 25).unwrap());
    cfg.nonlinear = false;
    cfg.refine = false;
    let tr = dirichlet_march(&cfg).unwrap();
    for (k, &t) in tr.times.iter().enumerate().skip(1) {
        let e1 = mittag_leffler_neg(0.5, b.eigenvalues[0] * t.sqrt()).unwrap();
        assert!((tr.functional[k] - e1).abs() < 1e-10);
    }
    let last = &tr.final_field;
    let got = b.project(&last.values[1..64]);
    let t = last.time;
    for n in 0..3 {
        let want = coeff[n] * mittag_leffler_neg(0.5, b.eigenvalues[n] * t.sqrt()).unwrap();
        assert!((got[n] - want).abs() < 1e-6);
    }
}

#[test]
fn polynomial_versus_exponential_decay() {
    let b = build_basis(2.0, 1.0, 33, 8).unwrap();
    let v0 = Field { grid: b.grid, values: nodal(&b, 1), time: 0.0 };
    let run = |beta: f64| {
        let mut cfg = DirichletConfig::new(b.clone(), params(2.0, beta, 0.5), v0.clone(), TimeMesh::geometric(1e-2, 1e4, 31).unwrap());
        cfg.nonlinear = false;
        cfg.refine = false;
        dirichlet_march(&cfg).unwrap()
    };
    let frac = run(0.5);
    let n = frac.times.len();
    let limit = 1.0 / (b.eigenvalues[0] * PI.sqrt());
    let scaled = |k: usize| frac.functional[k] * frac.times[k].sqrt();
    assert!((scaled(n - 1) / limit - 1.0).abs() < 1e-3);
    assert!((scaled(n - 1) - scaled(n - 5)).abs() < (scaled(n - 5) - scaled(n - 9)).abs());
    let classical = run(1.0);
    let k = classical.times.iter().position(|&t| t > 2.0).unwrap();
    let rate = -classical.functional[k].ln() / classical.times[k];
    assert!((rate - b.eigenvalues[0]).abs() < 1e-10);
}

#[test]
fn small_exponent_blows_up_from_moderate_data() {
    let b = build_basis(2.0, 1.0, 33, 12).unwrap();
    let v0 = field_of(&b, |x| 0.1 * (1.0 - x * x));
    let cfg = DirichletConfig::new(b.clone(), params(2.0, 0.5, 0.5), v0, TimeMesh::geometric(1e-4, 1e4, 200).unwrap());
    let tr = dirichlet_march(&cfg).unwrap();
    assert!(tr.verdict.is_blowup(), "{:?}", tr.verdict);
    // the Kaplan comparison bound holds where the Mittag-Leffler floor is measured
    let window: Vec<usize> = (0..tr.times.len()).filter(|&k| tr.times[k] >= 1.0 && tr.sup_norms[k] < 1e3).collect();
    let ts: Vec<f64> = window.iter().map(|&k| tr.times[k]).collect();
    let c = mittag_leffler_floor(0.5, b.eigenvalues[0], &ts).unwrap();
    let lower = kaplan_lower_bound(&b, &cfg.params, c, &tr.times, &tr.functional);
    for &k in &window {
        assert!(tr.functional[k] >= lower[k] * (1.0 - 1e-3), "t={} F={} lower={}", tr.times[k], tr.functional[k], lower[k]);
    }
}

#[test]
fn large_exponent_tiny_data_stays_bounded() {
    let b = build_basis(2.0, 1.0, 33, 12).unwrap();
    let v0 = field_of(&b, |x| 1e-3 * (1.0 - x * x));
    let cfg = DirichletConfig::new(b, params(2.0, 0.5, 3.0), v0, TimeMesh::geometric(1e-4, 1e8, 80).unwrap());
    let tr = dirichlet_march(&cfg).unwrap();
    assert!(tr.verdict.is_global(), "{:?}", tr.verdict);
    assert!(tr.sup_norms.iter().all(|&s| s <= 2e-3));
}

#[test]
fn config_validation() {
    let b = build_basis(2.0, 1.0, 33, 4).unwrap();
    let mesh = TimeMesh::geometric(1e-3, 1.0, 4).unwrap();
    let bad = Field::from_fn(b.grid, 0.0, |_| 1.0).unwrap();
    assert!(dirichlet_march(&DirichletConfig::new(b.clone(), params(2.0, 0.5, 1.0), bad, mesh.clone())).is_err());
    let ok = field_of(&b, |x| 1.0 - x * x);
    assert!(dirichlet_march(&DirichletConfig::new(b, params(1.5, 0.5, 1.0), ok, mesh)).is_err());
}
