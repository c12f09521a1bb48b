//! Time marching and Picard iteration for the mild equation
//! `V(t) = G(t) * V0 + int_0^t G(t - s) * V(s)^(1+eta) ds` on a truncated line.
//!
//! Blow-up cannot be observed directly. A run is declared blown up when the
//! sup norm crosses a threshold, and only if the crossing time moves by less
//! than 15% when the time step is halved.

mod diagnostics;
mod output;
mod picard;

pub use diagnostics::{estimate_eta_star, estimate_eta_star_with, parabolic_infimum, weighted_ratio};
pub use output::{trace_csv, verdict_json};
pub use picard::{picard, PicardResult};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::kernel::KernelProfile;
use crate::operators::{norm, Field, LinearFlow, MemoryOperator, NormSpec, SpaceGrid, TimeMesh};
use crate::params::ModelParams;

/// Tail mass at which a run stops with a truncation error.
pub const TAIL_ERROR: f64 = 0.05;
/// Relative shift of `T*` under refinement that a blow-up verdict tolerates.
pub const BLOWUP_STABILITY: f64 = 0.15;
/// Relative sup-norm change under refinement that a global verdict tolerates.
pub const GLOBAL_STABILITY: f64 = 0.05;

/// Small-data hypothesis `0 <= V0 <= delta G(gamma, .)`, under which supercritical solutions stay global.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayTest {
    pub gamma: f64,
    pub delta: f64,
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub params: ModelParams,
    pub grid: SpaceGrid,
    pub mesh: TimeMesh,
    pub v0: Field,
    pub blowup_threshold: f64,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub decay_test: Option<DecayTest>,
    /// Drop the memory term; the solution is then `G(t) * V0`.
    pub nonlinear: bool,
    /// Re-run on a halved mesh to confirm the verdict.
    pub refine: bool,
}

impl SolveConfig {
    pub fn new(params: ModelParams, mesh: TimeMesh, v0: Field) -> Self {
        Self {
            params,
            grid: v0.grid,
            mesh,
            v0,
            blowup_threshold: 1e6,
            picard_tol: 1e-8,
            picard_max_iters: 50,
            decay_test: None,
            nonlinear: true,
            refine: true,
        }
    }

    pub fn with_decay_test(mut self, gamma: f64, delta: f64) -> Self {
        self.decay_test = Some(DecayTest { gamma, delta });
        self
    }

    /// Checks thresholds and, when a decay test is set, `V0 <= delta G(gamma, .)`.
    pub fn validate(&self, profile: &KernelProfile) -> Result<()> {
        if profile.params.alpha != self.params.alpha || profile.params.beta != self.params.beta || self.params.dim != 1 {
            return domain("profile parameters do not match the solve (only d = 1 is marched)");
        }
        if self.v0.grid != self.grid {
            return domain("initial field lives on a different grid");
        }
        if !(self.blowup_threshold > 0.0 && self.picard_tol > 0.0) || self.picard_max_iters == 0 {
            return domain("blow-up threshold, Picard tolerance and iteration cap must be positive");
        }
        if let Some(DecayTest { gamma, delta }) = self.decay_test {
            if !(gamma > 0.0 && delta > 0.0) {
                return domain("decay test needs gamma > 0 and delta > 0");
            }
            for (x, v) in self.grid.nodes().iter().zip(&self.v0.values) {
                let cap = delta * profile.density(gamma, x.abs());
                if *v > cap * (1.0 + 1e-12) {
                    return domain(format!("initial data exceeds delta G(gamma, x) at x = {x}: {v} > {cap}"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    GlobalUpToHorizon { horizon: f64, refinement_change: Option<f64> },
    Blowup { t_star: f64, uncertainty: f64 },
    /// The verdict did not survive refinement.
    Unconfirmed { reason: String, t_star: Option<f64>, refined_t_star: Option<f64> },
}

impl Verdict {
    pub fn is_blowup(&self) -> bool {
        matches!(self, Verdict::Blowup { .. })
    }

    pub fn is_global(&self) -> bool {
        matches!(self, Verdict::GlobalUpToHorizon { .. })
    }

    pub fn t_star(&self) -> Option<f64> {
        match self {
            Verdict::Blowup { t_star, .. } => Some(*t_star),
            Verdict::Unconfirmed { t_star, .. } => *t_star,
            Verdict::GlobalUpToHorizon { .. } => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveTrace {
    pub times: Vec<f64>,
    pub sup_norms: Vec<f64>,
    /// `(p, ||V(t_k)||_p)` for `p = 1, 2`.
    pub lp_norms: Vec<(f64, Vec<f64>)>,
    pub weighted_ratio: Option<Vec<f64>>,
    /// `F(t)`: the parabolic infimum on the line, `int V phi_1` on a bounded interval.
    pub functional: Vec<f64>,
    pub verdict: Verdict,
    pub warnings: Vec<String>,
    /// Last computed field.
    pub final_field: Field,
    /// Where the threshold was crossed on this mesh, if it was.
    pub crossing: Option<f64>,
}

impl SolveTrace {
    pub fn max_weighted_ratio(&self) -> Option<f64> {
        self.weighted_ratio.as_ref().map(|r| r.iter().cloned().fold(0.0, f64::max))
    }
}

/// Fields at every node of `mesh` up to a threshold crossing, with per-node diagnostics.
pub(crate) struct RawRun {
    pub fields: Vec<Field>,
    pub crossing: Option<f64>,
    pub warnings: Vec<String>,
}

/// Crossing time of `threshold` between two sup values, interpolating `ln sup` linearly in `t`.
pub(crate) fn crossing_time(t0: f64, s0: f64, t1: f64, s1: f64, threshold: f64) -> f64 {
    if !s1.is_finite() || !(s0 > 0.0) || s1 <= s0 {
        return t1;
    }
    let w = ((threshold.ln() - s0.ln()) / (s1.ln() - s0.ln())).clamp(0.0, 1.0);
    t0 + w * (t1 - t0)
}

pub(crate) fn march_raw(profile: &KernelProfile, cfg: &SolveConfig, mesh: &TimeMesh) -> Result<RawRun> {
    let flow = LinearFlow::new(profile, &cfg.v0)?;
    let mut memory = MemoryOperator::new(profile, cfg.grid, mesh, cfg.params.eta)?;
    let mut fields = vec![Field { time: 0.0, ..cfg.v0.clone() }];
    let mut warnings = Vec::new();
    let mut warned = false;
    for k in 1..=mesh.steps() {
        let t = mesh.nodes[k];
        memory.push(&fields[k - 1]);
        let lin = flow.at(t)?;
        if lin.tail_mass > TAIL_ERROR {
            return Err(Error::Truncation { t, tail_mass: lin.tail_mass });
        }
        if lin.truncated && !warned {
            warnings.push(format!("tail mass {:.3e} beyond the domain at t = {t:.6e}", lin.tail_mass));
            warned = true;
        }
        let mut v = lin.field;
        if cfg.nonlinear {
            let mem = memory.evaluate(k)?;
            for (a, b) in v.values.iter_mut().zip(&mem.field.values) {
                *a += b;
            }
        }
        let (s_prev, s) = (fields[k - 1].sup(), v.sup());
        fields.push(v);
        if !(s <= cfg.blowup_threshold) {
            let tc = crossing_time(mesh.nodes[k - 1], s_prev, t, s, cfg.blowup_threshold);
            return Ok(RawRun { fields, crossing: Some(tc), warnings });
        }
    }
    Ok(RawRun { fields, crossing: None, warnings })
}

pub(crate) fn build_trace(profile: &KernelProfile, cfg: &SolveConfig, run: RawRun, verdict: Verdict) -> SolveTrace {
    let fields = &run.fields;
    let times = fields.iter().map(|f| f.time).collect();
    let sup_norms = fields.iter().map(|f| f.sup()).collect();
    let lp_norms = [1.0, 2.0].iter().map(|&p| (p, fields.iter().map(|f| norm(f, NormSpec::lp(p))).collect())).collect();
    let weighted = cfg.decay_test.map(|d| fields.iter().map(|f| weighted_ratio(profile, f, d.gamma)).collect());
    let parabolic = fields.iter().map(|f| parabolic_infimum(profile, f)).collect();
    SolveTrace {
        times,
        sup_norms,
        lp_norms,
        weighted_ratio: weighted,
        functional: parabolic,
        verdict,
        warnings: run.warnings,
        final_field: fields.last().unwrap().clone(),
        crossing: run.crossing,
    }
}

/// Marches the mild equation node by node on `cfg.mesh`; see the module notes for the verdict.
pub fn march(profile: &KernelProfile, cfg: &SolveConfig) -> Result<SolveTrace> {
    cfg.validate(profile)?;
    let run = march_raw(profile, cfg, &cfg.mesh)?;
    let verdict = if !cfg.refine {
        match run.crossing {
            Some(t) => Verdict::Unconfirmed { reason: "refinement disabled".into(), t_star: Some(t), refined_t_star: None },
            None => Verdict::GlobalUpToHorizon { horizon: cfg.mesh.horizon(), refinement_change: None },
        }
    } else {
        let fine_mesh = cfg.mesh.refined()?;
        let fine = march_raw(profile, cfg, &fine_mesh)?;
        judge(&run, &fine, cfg.mesh.horizon())
    };
    Ok(build_trace(profile, cfg, run, verdict))
}

pub(crate) fn judge(coarse: &RawRun, fine: &RawRun, horizon: f64) -> Verdict {
    match (coarse.crossing, fine.crossing) {
        (Some(a), Some(b)) => {
            let shift = (a - b).abs();
            if shift <= BLOWUP_STABILITY * b {
                Verdict::Blowup { t_star: b, uncertainty: shift }
            } else {
                Verdict::Unconfirmed {
                    reason: format!("crossing moved by {:.1}% under refinement", 100.0 * shift / b),
                    t_star: Some(a),
                    refined_t_star: Some(b),
                }
            }
        }
        (None, None) => {
            let (a, b) = (coarse.fields.last().unwrap().sup(), fine.fields.last().unwrap().sup());
            let change = if b > 0.0 { (a - b).abs() / b } else { (a - b).abs() };
            if change <= GLOBAL_STABILITY {
                Verdict::GlobalUpToHorizon { horizon, refinement_change: Some(change) }
            } else {
                Verdict::Unconfirmed {
                    reason: format!("final sup norm changed by {:.1}% under refinement", 100.0 * change),
                    t_star: None,
                    refined_t_star: None,
                }
            }
        }
        (a, b) => Verdict::Unconfirmed {
            reason: "threshold crossed on only one of the two meshes".into(),
            t_star: a,
            refined_t_star: b,
        },
    }
}

#[cfg(test)]
mod solver_tests;
