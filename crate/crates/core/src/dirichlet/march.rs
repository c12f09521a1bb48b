//! Modal product integration of the Dirichlet mild equation.
//!
//! Coefficient `n` obeys `c_n(t) = E_beta(-nu_n t^beta) c_n(0) + int_0^t E_beta(-nu_n (t - s)^beta) g_n(s) ds`
//! with `g_n = <phi_n, V^(1+eta)>`. On each panel `g_n` is replaced by the mean of its end
//! values and the kernel integrates exactly through `P(tau) = tau E_{beta,2}(-nu tau^beta)`.
//! The end value at the new node is found by a few fixed-point passes.

use rayon::prelude::*;

use super::SpectralBasis;
use crate::error::{domain, Result};
use crate::operators::{norm, Field, NormSpec, TimeMesh};
use crate::params::ModelParams;
use crate::solver::{crossing_time, judge, RawRun, SolveTrace, Verdict};
use crate::specfun::{mittag_leffler_neg, mittag_leffler_neg2};

#[derive(Debug, Clone)]
pub struct DirichletConfig {
    pub basis: SpectralBasis,
    pub params: ModelParams,
    /// On `basis.grid`, zero at both boundary nodes.
    pub v0: Field,
    pub mesh: TimeMesh,
    pub blowup_threshold: f64,
    pub nonlinear: bool,
    pub refine: bool,
}

impl DirichletConfig {
    pub fn new(basis: SpectralBasis, params: ModelParams, v0: Field, mesh: TimeMesh) -> Self {
        Self { basis, params, v0, mesh, blowup_threshold: 1e6, nonlinear: true, refine: true }
    }

    pub fn validate(&self) -> Result<()> {
        if self.params.dim != 1 || self.params.alpha != self.basis.alpha {
            return domain("Dirichlet runs need d = 1 and the basis built for the same alpha");
        }
        if self.v0.grid != self.basis.grid {
            return domain("initial field lives on a different grid than the basis");
        }
        let n = self.v0.values.len();
        if self.v0.values.iter().any(|v| !(*v >= 0.0)) {
            return domain("initial field must be nonnegative");
        }
        if self.v0.values[0] != 0.0 || self.v0.values[n - 1] != 0.0 {
            return domain("initial field must vanish on the boundary");
        }
        if self.mesh.nodes[0] != 0.0 || self.mesh.nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("time mesh must start at 0 and increase strictly");
        }
        if !(self.blowup_threshold > 0.0) {
            return domain("blow-up threshold must be positive");
        }
        Ok(())
    }
}

fn primitive(beta: f64, nu: f64, tau: f64) -> Result<f64> {
    if tau == 0.0 {
        return Ok(0.0);
    }
    Ok(tau * mittag_leffler_neg2(beta, nu * tau.powf(beta))?)
}

/// `int_b^a E_beta(-nu s^beta) ds`; for `beta = 1` in a form free of cancellation.
fn panel_weight(beta: f64, nu: f64, a: f64, b: f64, upper: f64, lower: f64) -> f64 {
    if beta == 1.0 {
        -(-nu * b).exp() * (-nu * (a - b)).exp_m1() / nu
    } else {
        upper - lower
    }
}

struct ModalRun {
    raw: RawRun,
    functional: Vec<f64>,
}

fn to_field(basis: &SpectralBasis, interior: &[f64], time: f64) -> Field {
    let mut values = Vec::with_capacity(interior.len() + 2);
    values.push(0.0);
    values.extend(interior.iter().map(|v| if v.is_nan() { f64::INFINITY } else { v.max(0.0) }));
    values.push(0.0);
    Field { grid: basis.grid, values, time }
}

/// Corrector passes per step; the last panel's source is implicit.
const CORRECTIONS: usize = 4;

fn march_modes(cfg: &DirichletConfig, mesh: &TimeMesh) -> Result<ModalRun> {
    let basis = &cfg.basis;
    let beta = cfg.params.beta;
    let power = 1.0 + cfg.params.eta;
    let t = &mesh.nodes;
    let n = cfg.v0.values.len();
    let c0 = basis.project(&cfg.v0.values[1..n - 1]);
    let source = |field: &Field| -> Vec<f64> {
        let f: Vec<f64> = field.values[1..n - 1].iter().map(|v| v.powf(power)).collect();
        basis.project(&f)
    };
    let mut fields = vec![Field { time: 0.0, ..cfg.v0.clone() }];
    let mut functional = vec![c0[0]];
    let mut sources = vec![if cfg.nonlinear { source(&fields[0]) } else { vec![0.0; basis.count()] }];
    for k in 1..=mesh.steps() {
        let tk = t[k];
        // (everything but the last panel's right half, weight of that half) per mode
        let split: Vec<(f64, f64)> = basis
            .eigenvalues
            .par_iter()
            .enumerate()
            .map(|(m, &nu)| -> Result<(f64, f64)> {
                let mut c = mittag_leffler_neg(beta, nu * tk.powf(beta))? * c0[m];
                if !cfg.nonlinear {
                    return Ok((c, 0.0));
                }
                let mut upper = primitive(beta, nu, tk)?;
                let mut last = 0.0;
                for j in 0..k {
                    let lower = primitive(beta, nu, tk - t[j + 1])?;
                    let w = 0.5 * panel_weight(beta, nu, tk - t[j], tk - t[j + 1], upper, lower);
                    c += w * sources[j][m];
                    if j + 1 < k {
                        c += w * sources[j + 1][m];
                    } else {
                        last = w;
                    }
                    upper = lower;
                }
                Ok((c, last))
            })
            .collect::<Result<_>>()?;
        let mut g_new = sources[k - 1].clone();
        let mut coeffs: Vec<f64> = Vec::new();
        let mut field = fields[k - 1].clone();
        for pass in 0..=CORRECTIONS {
            coeffs = split.iter().zip(&g_new).map(|(&(c, w), g)| c + w * g).collect();
            field = to_field(basis, &basis.synthesize(&coeffs), tk);
            if !cfg.nonlinear || pass == CORRECTIONS || !field.is_finite() || field.sup() > cfg.blowup_threshold {
                break;
            }
            g_new = source(&field);
        }
        let (s_prev, s) = (fields[k - 1].sup(), field.sup());
        functional.push(coeffs[0]);
        let crossed = !(s <= cfg.blowup_threshold);
        if cfg.nonlinear && !crossed {
            sources.push(source(&field));
        } else {
            sources.push(vec![0.0; basis.count()]);
        }
        fields.push(field);
        if crossed {
            let tc = crossing_time(t[k - 1], s_prev, tk, s, cfg.blowup_threshold);
            return Ok(ModalRun { raw: RawRun { fields, crossing: Some(tc), warnings: Vec::new() }, functional });
        }
    }
    Ok(ModalRun { raw: RawRun { fields, crossing: None, warnings: Vec::new() }, functional })
}

/// Marches the modal equations on `cfg.mesh` and, when `cfg.refine`, confirms the verdict on
/// the halved mesh. `functional` in the trace holds `F(t_k) = int V phi_1`.
pub fn dirichlet_march(cfg: &DirichletConfig) -> Result<SolveTrace> {
    cfg.validate()?;
    let run = march_modes(cfg, &cfg.mesh)?;
    let verdict = if !cfg.refine {
        match run.raw.crossing {
            Some(t) => Verdict::Unconfirmed { reason: "refinement disabled".into(), t_star: Some(t), refined_t_star: None },
            None => Verdict::GlobalUpToHorizon { horizon: cfg.mesh.horizon(), refinement_change: None },
        }
    } else {
        let fine = march_modes(cfg, &cfg.mesh.refined()?)?;
        judge(&run.raw, &fine.raw, cfg.mesh.horizon())
    };
    let mut warnings = run.raw.warnings;
    if cfg.basis.approximate {
        warnings.push("eigenpairs from a matrix discretization (approximate)".into());
    }
    let fields = &run.raw.fields;
    Ok(SolveTrace {
        times: fields.iter().map(|f| f.time).collect(),
        sup_norms: fields.iter().map(|f| f.sup()).collect(),
        lp_norms: [1.0, 2.0].iter().map(|&p| (p, fields.iter().map(|f| norm(f, NormSpec::lp(p))).collect())).collect(),
        weighted_ratio: None,
        functional: run.functional,
        verdict,
        warnings,
        final_field: fields.last().unwrap().clone(),
        crossing: run.raw.crossing,
    })
}
