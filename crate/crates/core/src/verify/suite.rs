//! The default verification suite: every check independent, run in parallel, merged by name.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma;

use super::{check_bounds_suite, check_derivatives, check_lp_decay, mc_subordination_oracle, DerivativeGrid, HolderCheckParams, OracleReport};
use crate::error::Result;
use crate::kernel::{build_kernel_profile, heat_kernel, KernelProfile};
use crate::operators::{Field, SpaceGrid};
use crate::params::ModelParams;
use crate::specfun::{mittag_leffler_neg, stable_unit_density_1d};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub seed: u64,
    pub mc_samples: usize,
    /// Passed to the kernel builder.
    pub quadrature_budget: usize,
    /// Hölder exponent tested on the (1.5, 0.5) profile.
    pub rho: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { seed: 20240917, mc_samples: 1_000_000, quadrature_budget: 6, rho: 0.5 }
    }
}

fn specfun_anchors() -> OracleReport {
    let mut r = OracleReport::new("specfun_anchors");
    // statrs erfc is good to about 1e-10, which sets the tolerance of the half-order anchors
    let mut close = |key: &str, got: Result<f64>, want: f64, tol: f64| match got {
        Ok(g) => {
            let err = (g - want).abs() / want.abs();
            r.measure(key, g).stat(&format!("{key}_relative_error"), err);
            r.require(err <= tol, format!("{key} = {g} against {want}"));
        }
        Err(e) => {
            r.require(false, format!("{key}: {e}"));
        }
    };
    close("E_1(-1)", mittag_leffler_neg(1.0, 1.0), (-1f64).exp(), 1e-10);
    close("E_0.5(-1)", mittag_leffler_neg(0.5, 1.0), 1f64.exp() * erfc(1.0), 1e-8);
    close("E_0.5(-3)", mittag_leffler_neg(0.5, 3.0), 9f64.exp() * erfc(3.0), 1e-8);
    close("gaussian_origin", stable_unit_density_1d(2.0, 0.0), 1.0 / (4.0 * PI).sqrt(), 1e-14);
    close("cauchy_at_1", stable_unit_density_1d(1.0, 1.0), 1.0 / (2.0 * PI), 1e-12);
    close("origin_alpha_1.5", stable_unit_density_1d(1.5, 0.0), gamma(1.0 + 1.0 / 1.5) / PI, 1e-12);
    r
}

/// Away from the origin: for `d = alpha`, `G(t, 0)` is infinite and so is the sample variance.
const MC_POINT: f64 = 1.0;

fn mc_check(profile: &KernelProfile, cfg: &SuiteConfig) -> OracleReport {
    let p = profile.params;
    let name = format!("mc_subordination(alpha={}, beta={})", p.alpha, p.beta);
    let mut r = OracleReport::new(name.clone());
    r.seeds.push(cfg.seed);
    let est = match mc_subordination_oracle(&p, 1.0, &[MC_POINT], cfg.mc_samples, cfg.seed) {
        Ok(e) => e,
        Err(e) => return OracleReport::errored(name, &e),
    };
    let g = match heat_kernel(profile, 1.0, &[MC_POINT]) {
        Ok(g) => g,
        Err(e) => return OracleReport::errored(name, &e),
    };
    let z = (est.estimate - g).abs() / est.std_error;
    r.measure("estimate", est.estimate).measure("kernel", g);
    r.stat("std_error", est.std_error).stat("samples", est.samples as f64).stat("sigmas", z);
    r.require(z < 3.0, "agreement within 3 standard errors");
    r
}

fn decay_checks(profile: &KernelProfile) -> Vec<OracleReport> {
    let times: Vec<f64> = (0..21).map(|i| 10f64.powf(1.0 + i as f64 / 10.0)).collect();
    let narrow = SpaceGrid::with_spacing(200.0, 0.05).map(Field::delta);
    let wide = SpaceGrid::with_spacing(200.0, 0.05).and_then(|g| Field::indicator(g, -1.0, 1.0, 1.0));
    let cases = [(1.0, f64::INFINITY, &narrow), (1.0, 2.0, &narrow), (2.0, 2.0, &wide)];
    cases
        .into_iter()
        .map(|(p, r, v0)| match v0.as_ref().map_err(Clone::clone).and_then(|v| check_lp_decay(profile, v, p, r, &times)) {
            Ok(rep) => rep,
            Err(e) => OracleReport::errored(format!("lp_decay(p={p}, r={r})"), &e),
        })
        .collect()
}

fn derivative_check(profile: &KernelProfile, rho: f64) -> OracleReport {
    let p = profile.params;
    match check_derivatives(profile, &DerivativeGrid::default(), &HolderCheckParams::new(rho)) {
        Ok(r) => r,
        Err(e) => OracleReport::errored(format!("derivatives(alpha={}, beta={}, d={})", p.alpha, p.beta, p.dim), &e),
    }
}

enum Job<'a> {
    Anchors,
    Mc(&'a KernelProfile),
    Bounds(&'a KernelProfile),
    Derivatives(&'a KernelProfile, f64),
    Decay(&'a KernelProfile),
}

/// Runs the default checks and returns their reports sorted by name.
///
/// Profiles: (1.5, 0.5), (1, 0.5) and the Gaussian (2, 1), all on the line. The Gaussian is
/// smooth, so its increment is tested at the Lipschitz rate `rho = 1`.
pub fn default_suite(cfg: &SuiteConfig) -> Result<Vec<OracleReport>> {
    let shapes = [(1.5, 0.5), (1.0, 0.5), (2.0, 1.0)];
    let profiles: Vec<KernelProfile> = shapes
        .par_iter()
        .map(|&(a, b)| build_kernel_profile(&ModelParams::new(a, b, 1, 1.0)?, cfg.quadrature_budget))
        .collect::<Result<_>>()?;
    let [generic, cauchy, gauss] = [&profiles[0], &profiles[1], &profiles[2]];
    let jobs = vec![
        Job::Anchors,
        Job::Mc(cauchy),
        Job::Bounds(generic),
        Job::Bounds(cauchy),
        Job::Bounds(gauss),
        Job::Derivatives(generic, cfg.rho),
        Job::Derivatives(gauss, 1.0),
        Job::Decay(generic),
    ];
    let mut reports: Vec<OracleReport> = jobs
        .par_iter()
        .flat_map_iter(|job| match job {
            Job::Anchors => vec![specfun_anchors()],
            Job::Mc(k) => vec![mc_check(k, cfg)],
            Job::Bounds(k) => vec![check_bounds_suite(k)],
            Job::Derivatives(k, rho) => vec![derivative_check(k, *rho)],
            Job::Decay(k) => decay_checks(k),
        })
        .collect();
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(reports)
}
