use proptest::prelude::*;
use statrs::function::erf::erf;

use super::*;
use crate::operators::{Field, SpaceGrid};
use crate::testutil::profile;
use crate::{Error, ModelParams};

fn params(alpha: f64, beta: f64) -> ModelParams {
    ModelParams::new(alpha, beta, 1, 1.0).unwrap()
}

fn child<'a>(r: &'a OracleReport, prefix: &str) -> &'a OracleReport {
    r.children.iter().find(|c| c.name.starts_with(prefix)).unwrap_or_else(|| panic!("no child {prefix} in {r:#?}"))
}

#[test]
fn mc_degenerate_and_too_small() {
    let p = params(1.5, 1.0);
    let e = mc_subordination_oracle(&p, 2.0, &[0.3], 5000, 1).unwrap();
    let stable = crate::specfun::StableProfile::new(1.5, 1).unwrap();
    assert_eq!(e.estimate, stable.density(2.0, 0.3));
    assert_eq!(e.std_error, 0.0);
    assert!(matches!(mc_subordination_oracle(&params(1.0, 0.5), 1.0, &[0.0], 999, 1), Err(Error::Domain(_))));
}

#[test]
fn mc_agrees_with_kernel() {
    let k = profile(1.0, 0.5);
    let e = mc_subordination_oracle(&k.params, 1.0, &[1.0], 1_000_000, 7).unwrap();
    let g = k.density(1.0, 1.0);
    assert!((e.estimate - g).abs() < 3.0 * e.std_error, "{e:?} vs {g}");
}

#[test]
fn mc_standard_error_rate() {
    let p = params(1.0, 0.5);
    let a = mc_subordination_oracle(&p, 1.0, &[0.5], 100_000, 3).unwrap();
    let b = mc_subordination_oracle(&p, 1.0, &[0.5], 200_000, 3).unwrap();
    let ratio = b.std_error / a.std_error;
    assert!((ratio * 2f64.sqrt() - 1.0).abs() < 0.1, "{ratio}");
}

#[test]
fn bounds_suites() {
    for (a, b) in [(1.5, 0.5), (1.0, 0.5), (2.0, 1.0)] {
        let r = check_bounds_suite(profile(a, b));
        assert!(r.passed, "{r:#?}");
    }
    let r = check_bounds_suite(profile(1.5, 0.5));
    assert_eq!(r.children.len(), 2);
    assert!(child(&r, "heat_comparability").measured["inf_ratio"] > 0.0);
    let r = check_bounds_suite(profile(1.0, 0.5));
    child(&r, "log_interior_ratio");
}

#[test]
fn gaussian_time_ratio_matches_closed_form() {
    let grid = DerivativeGrid { times: vec![0.1, 1.0, 10.0], z_max: 6.0, dz: 0.05 };
    let r = check_derivatives(profile(2.0, 1.0), &grid, &HolderCheckParams::new(0.5)).unwrap();
    let g = child(&r, "gaussian_time_derivative");
    assert!(g.passed, "{g:#?}");
    assert!(child(&r, "time_derivative_ratio").passed);
}

#[test]
fn generic_derivative_constants_are_finite() {
    let grid = DerivativeGrid { times: vec![0.1, 1.0, 10.0], z_max: 6.0, dz: 0.05 };
    let r = check_derivatives(profile(1.5, 0.5), &grid, &HolderCheckParams::new(0.5)).unwrap();
    let t = child(&r, "time_derivative_ratio");
    assert!(t.passed, "{t:#?}");
    assert!(child(&r, "gradient_ratio").measured["max"].is_finite());
    assert!(child(&r, "holder_increment").measured["bound_constant"].is_finite());
}

#[test]
fn holder_rho_must_lie_below_alpha() {
    let grid = DerivativeGrid::default();
    for rho in [0.0, 1.5, 2.0] {
        assert!(check_derivatives(profile(1.5, 0.5), &grid, &HolderCheckParams::new(rho)).is_err());
    }
}

#[test]
fn gaussian_increment_is_total_variation() {
    // two normals with variance 2t, shifted by h: 2 erf(h / (4 sqrt t))
    let k = profile(2.0, 1.0);
    for (t, h) in [(1.0, 0.01), (1.0, 0.3), (4.0, 1.0)] {
        let got = holder_increment(k, t, h, WeightFunction::One).unwrap();
        let want = 2.0 * erf(h / (4.0 * f64::sqrt(t)));
        assert!((got - want).abs() < 1e-6 * want, "t={t} h={h}: {got} vs {want}");
    }
    let ind = holder_increment(k, 1.0, 0.1, WeightFunction::Indicator).unwrap();
    assert!(ind > 0.0 && ind < holder_increment(k, 1.0, 0.1, WeightFunction::One).unwrap());
}

fn decay_times() -> Vec<f64> {
    (0..21).map(|i| 10f64.powf(1.0 + i as f64 / 10.0)).collect()
}

#[test]
fn young_exponents() {
    let k = profile(1.5, 0.5);
    let grid = SpaceGrid::with_spacing(200.0, 0.05).unwrap();
    let delta = Field::delta(grid);
    let sup = check_lp_decay(k, &delta, 1.0, f64::INFINITY, &decay_times()).unwrap();
    assert!(sup.passed, "{sup:#?}");
    assert!((sup.measured["exponent"] - 1.0 / 3.0).abs() < 0.05 / 3.0);
    let l2 = check_lp_decay(k, &delta, 1.0, 2.0, &decay_times()).unwrap();
    assert!((l2.measured["exponent"] - 1.0 / 6.0).abs() < 0.05 / 6.0, "{l2:#?}");
    let flat = check_lp_decay(k, &Field::indicator(grid, -1.0, 1.0, 1.0).unwrap(), 2.0, 2.0, &decay_times()).unwrap();
    assert_eq!(flat.measured["young_exponent"], 0.0);
    assert!(flat.passed, "{flat:#?}");
}

#[test]
fn decay_preconditions() {
    let k = profile(1.5, 0.5);
    let delta = Field::delta(SpaceGrid::with_spacing(20.0, 0.5).unwrap());
    assert!(check_lp_decay(k, &delta, 1.0, 2.0, &[1.0, 2.0, 5.0]).is_err());
    assert!(check_lp_decay(k, &delta, 2.0, 1.0, &decay_times()).is_err());
    // 1/p - 1/r = 1 > alpha/d for alpha = 0.8
    assert!(check_lp_decay(profile(0.8, 0.5), &delta, 1.0, f64::INFINITY, &decay_times()).is_err());
}

#[test]
fn reports_roll_up_and_serialize() {
    let mut bad = OracleReport::new("b");
    bad.require(false, "x");
    let mut parent = OracleReport::new("a");
    parent.measure("c", 1.0).child(bad.clone());
    assert!(!parent.passed);
    assert!(roll_up(&[OracleReport::new("ok")]));
    assert!(!roll_up(&[OracleReport::new("ok"), bad]));
    let json = parent.to_json();
    assert_eq!(json["children"][0]["notes"][0], "failed: x");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn mc_is_reproducible(seed in any::<u64>(), x in 0.0f64..3.0) {
        let p = params(1.5, 0.6);
        let a = mc_subordination_oracle(&p, 1.0, &[x], 70_000, seed).unwrap();
        let b = mc_subordination_oracle(&p, 1.0, &[x], 70_000, seed).unwrap();
        prop_assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        prop_assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }
}
