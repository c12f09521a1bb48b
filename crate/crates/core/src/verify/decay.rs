//! Decay exponent of `||G V0(t)||_r` against the Young exponent `(beta d / alpha)(1/p - 1/r)`.

use super::{fit_slope, OracleReport};
use crate::error::{domain, Result};
use crate::kernel::KernelProfile;
use crate::operators::{norm, Field, LinearFlow, NormSpec};

const TOLERANCE: f64 = 0.05;

/// For `p = 1` the fitted exponent must match the Young exponent within 5%. For `p > 1` and
/// integrable data the true decay is faster, so the Young exponent is only a floor.
pub fn check_lp_decay(profile: &KernelProfile, v0: &Field, p: f64, r: f64, times: &[f64]) -> Result<OracleReport> {
    let params = profile.params;
    let gap = 1.0 / p - 1.0 / r;
    if !(p >= 1.0 && r >= p) || !(gap >= 0.0 && gap < params.alpha / params.dim as f64) {
        return domain(format!("need 1 <= p <= r and 0 <= 1/p - 1/r < alpha/d, got p = {p}, r = {r}"));
    }
    let (lo, hi) = times.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &t| (a.min(t), b.max(t)));
    if times.len() < 3 || !(lo > 0.0) || hi / lo < 10.0 {
        return domain("decay fit needs at least three positive times spanning a decade");
    }
    let flow = LinearFlow::new(profile, v0)?;
    let spec = NormSpec::lp(r);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &t in times {
        xs.push(t.ln());
        ys.push(norm(&flow.at(t)?.field, spec).ln());
    }
    let measured = -fit_slope(&xs, &ys);
    let expected = params.decay_exponent() * gap;
    let mut report = OracleReport::new(format!("lp_decay(p={p}, r={r})"));
    report.measure("exponent", measured).measure("young_exponent", expected);
    report.stat("t_min", lo).stat("t_max", hi).stat("points", times.len() as f64);
    if p == 1.0 {
        let err = (measured - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
        report.stat("relative_error", err);
        report.require(err <= TOLERANCE, format!("exponent {measured:.4} within 5% of {expected:.4}"));
    } else {
        report.note("p > 1: the Young exponent is a floor for integrable data");
        report.require(measured >= expected - TOLERANCE * expected.abs().max(1.0 / 3.0), format!("exponent {measured:.4} at least {expected:.4}"));
    }
    Ok(report)
}
