//! Two-sided kernel bounds, measured on a test grid and on its refinement.

use super::{relative_change, OracleReport};
use crate::kernel::{bound_envelope, envelope_grid, KernelProfile};
use crate::specfun::StableProfile;

const STABILITY: f64 = 0.1;
const T_RANGE: (f64, f64) = (1e-2, 1e2);
const R_RANGE: (f64, f64) = (1e-2, 1e2);

/// Coarse `(nt, nr)` test grid; the refined grid roughly doubles both counts.
const COARSE: (usize, usize) = (9, 17);
const FINE: (usize, usize) = (17, 33);

fn stable_pair(report: &mut OracleReport, key: &str, coarse: f64, fine: f64) {
    let change = relative_change(coarse, fine);
    report.measure(key, fine).stat(&format!("{key}_refinement_change"), change);
    report.require(coarse.is_finite() && fine.is_finite() && fine > 0.0, format!("{key} finite and positive"));
    report.require(change <= STABILITY, format!("{key} stable within 10% under refinement"));
}

fn heat_envelope(profile: &KernelProfile) -> OracleReport {
    let mut r = OracleReport::new("heat_envelope");
    let grids = [COARSE, FINE].map(|(nt, nr)| envelope_grid(T_RANGE, R_RANGE, nt, nr, true));
    match (bound_envelope(profile, &grids[0]), bound_envelope(profile, &grids[1])) {
        (Ok(c), Ok(f)) => {
            r.note(format!("regime {:?}", f.regime));
            stable_pair(&mut r, "c1", c.lower, f.lower);
            stable_pair(&mut r, "c2", c.upper, f.upper);
            r.measure("spread", f.spread());
            r.stat("points", f.points as f64);
        }
        (Err(e), _) | (_, Err(e)) => {
            r.require(false, format!("envelope: {e}"));
        }
    }
    r
}

/// `G(t, x) / p(t^beta, x)` extremes.
fn comparability(profile: &KernelProfile) -> OracleReport {
    let mut r = OracleReport::new("heat_comparability");
    let p = &profile.params;
    let stable = match StableProfile::new(p.alpha, p.dim) {
        Ok(s) => s,
        Err(e) => return OracleReport::errored("heat_comparability", &e),
    };
    let extremes = |(nt, nr): (usize, usize)| {
        envelope_grid(T_RANGE, R_RANGE, nt, nr, true).iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &(t, x)| {
            let q = profile.density(t, x) / stable.density(t.powf(p.beta), x);
            (lo.min(q), hi.max(q))
        })
    };
    let (c, f) = (extremes(COARSE), extremes(FINE));
    stable_pair(&mut r, "inf_ratio", c.0, f.0);
    stable_pair(&mut r, "sup_ratio", c.1, f.1);
    r
}

/// `G(t, x) t^beta / ln(2 / (|x| t^(-beta/alpha)))` for `0 < |x| <= t^(beta/alpha)`.
fn log_interior(profile: &KernelProfile) -> OracleReport {
    let mut r = OracleReport::new("log_interior_ratio");
    let p = &profile.params;
    let extremes = |(nt, nr): (usize, usize)| {
        envelope_grid(T_RANGE, (1e-3, 1.0), nt, nr, false).iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &(t, s)| {
            let x = s * t.powf(p.spread_exponent());
            let q = profile.density(t, x) * t.powf(p.beta) / (2.0 / s).ln();
            (lo.min(q), hi.max(q))
        })
    };
    let (c, f) = (extremes(COARSE), extremes(FINE));
    stable_pair(&mut r, "lower", c.0, f.0);
    stable_pair(&mut r, "upper", c.1, f.1);
    r
}

/// `alpha = 2`: tails are faster than any power, so only the near region carries a finite
/// envelope; the lower constant must collapse once the range reaches `12 t^(beta/2)`.
fn gaussian_tails(profile: &KernelProfile) -> OracleReport {
    let mut r = OracleReport::new("gaussian_tail_sanity");
    let spread = profile.params.spread_exponent();
    let scaled = |reach: f64, (nt, nr): (usize, usize)| -> Vec<(f64, f64)> {
        envelope_grid((1e-1, 1e1), (1e-2, reach), nt, nr, true)
            .into_iter()
            .map(|(t, s)| (t, s * t.powf(spread)))
            .collect()
    };
    let near = [COARSE, FINE].map(|g| bound_envelope(profile, &scaled(2.0, g)));
    let far = bound_envelope(profile, &scaled(12.0, FINE));
    match (&near[0], &near[1], far) {
        (Ok(c), Ok(f), Ok(w)) => {
            stable_pair(&mut r, "near_c1", c.lower, f.lower);
            stable_pair(&mut r, "near_c2", c.upper, f.upper);
            r.measure("far_c1", w.lower);
            r.require(f.lower / w.lower > 1e6, "lower constant collapses with range");
        }
        (Err(e), _, _) | (_, Err(e), _) => {
            r.require(false, format!("near envelope: {e}"));
        }
        (_, _, Err(_)) => {
            r.note("far envelope underflows: the lower bound is vacuous there");
        }
    }
    r
}

/// The kernel bound checks that apply to the profile's regime.
///
/// `d < alpha`: the two-sided envelope over the whole range and comparability with
/// `p(t^beta, .)`. `d = alpha`: the log-corrected interior ratio and the exterior envelope.
/// `d > alpha`: the exterior envelope. `alpha = 2` gets the Gaussian tail sanity check instead.
pub fn check_bounds_suite(profile: &KernelProfile) -> OracleReport {
    let p = profile.params;
    let mut report = OracleReport::new(format!("bounds(alpha={}, beta={}, d={})", p.alpha, p.beta, p.dim));
    if p.alpha == 2.0 {
        report.child(gaussian_tails(profile));
        return report;
    }
    report.child(heat_envelope(profile));
    let d = p.dim as f64;
    if d < p.alpha {
        report.child(comparability(profile));
    } else if d == p.alpha {
        report.child(log_interior(profile));
    }
    report
}
