//! Measured constants in `c1 min(t^(-beta d/alpha), t^beta |x|^(-d-alpha)) <= G(t, x) <= c2 min(...)`.

use serde::{Deserialize, Serialize};

use super::KernelProfile;
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeRegime {
    /// `d < alpha`: the bound is claimed for all `x`.
    WholeRange,
    /// `d >= alpha`: only `|x| >= t^(beta/alpha)` is tested.
    ExteriorOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundEnvelope {
    pub lower: f64,
    pub upper: f64,
    pub regime: EnvelopeRegime,
    /// `(t, |x|)` where the ratio is smallest / largest.
    pub argmin: (f64, f64),
    pub argmax: (f64, f64),
    pub points: usize,
}

impl BoundEnvelope {
    pub fn spread(&self) -> f64 {
        self.upper / self.lower
    }
}

/// `min(t^(-beta d/alpha), t^beta |x|^(-d-alpha))`.
pub fn bound_shape(profile: &KernelProfile, t: f64, r: f64) -> f64 {
    let p = &profile.params;
    let interior = t.powf(-p.decay_exponent());
    let exterior = t.powf(p.beta) * r.powf(-(p.dim as f64 + p.alpha));
    interior.min(exterior)
}

/// Ratio extremes of `G(t, r)` against [`bound_shape`] over `(t, r)` pairs in the regime.
pub fn bound_envelope(profile: &KernelProfile, test_grid: &[(f64, f64)]) -> Result<BoundEnvelope> {
    let p = &profile.params;
    let regime = if (p.dim as f64) < p.alpha { EnvelopeRegime::WholeRange } else { EnvelopeRegime::ExteriorOnly };
    let mut env = BoundEnvelope {
        lower: f64::INFINITY,
        upper: 0.0,
        regime,
        argmin: (f64::NAN, f64::NAN),
        argmax: (f64::NAN, f64::NAN),
        points: 0,
    };
    for &(t, r) in test_grid {
        if !(t > 0.0) || !(r >= 0.0) {
            return domain(format!("envelope point needs t > 0 and |x| >= 0, got ({t}, {r})"));
        }
        if regime == EnvelopeRegime::ExteriorOnly && r < t.powf(p.spread_exponent()) {
            continue;
        }
        let ratio = profile.density(t, r) / bound_shape(profile, t, r);
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(Error::NonFiniteEnvelope { t, x: r });
        }
        if ratio < env.lower {
            env.lower = ratio;
            env.argmin = (t, r);
        }
        if ratio > env.upper {
            env.upper = ratio;
            env.argmax = (t, r);
        }
        env.points += 1;
    }
    if env.points == 0 {
        return domain("no envelope test point lies in the regime of the bound");
    }
    Ok(env)
}

/// Log-spaced `(t, |x|)` pairs for `t in [t_lo, t_hi]`, `|x| in {0} u [r_lo, r_hi]`.
pub fn envelope_grid(t_range: (f64, f64), r_range: (f64, f64), nt: usize, nr: usize, with_origin: bool) -> Vec<(f64, f64)> {
    let logspace = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        if n == 1 {
            return vec![lo];
        }
        (0..n).map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp()).collect()
    };
    let ts = logspace(t_range.0, t_range.1, nt);
    let mut rs = logspace(r_range.0, r_range.1, nr);
    if with_origin {
        rs.insert(0, 0.0);
    }
    ts.iter().flat_map(|&t| rs.iter().map(move |&r| (t, r))).collect()
}
