//! `V_{n+1} = G V0 + A V_n`, started from the linear term.

use super::{SolveConfig, TAIL_ERROR};
use crate::error::{domain, Error, Result};
use crate::kernel::KernelProfile;
use crate::operators::{Field, LinearFlow, MemoryOperator, TimeMesh};

/// Consecutive growing differences that count as divergence.
const GROWTH_LIMIT: usize = 3;

#[derive(Debug, Clone)]
pub struct PicardResult {
    /// The fixed point at every mesh node up to the horizon.
    pub fields: Vec<Field>,
    pub iterations: usize,
    pub last_difference: f64,
}

fn sup_difference(a: &[Field], b: &[Field]) -> f64 {
    let mut worst = 0.0f64;
    for (fa, fb) in a.iter().zip(b) {
        for (x, y) in fa.values.iter().zip(&fb.values) {
            let d = (x - y).abs();
            if !d.is_finite() {
                return f64::INFINITY;
            }
            worst = worst.max(d);
        }
    }
    worst
}

/// Picard iteration on the nodes of `cfg.mesh` that do not exceed `horizon`.
pub fn picard(profile: &KernelProfile, cfg: &SolveConfig, horizon: f64) -> Result<PicardResult> {
    cfg.validate(profile)?;
    let nodes: Vec<f64> = cfg.mesh.nodes.iter().cloned().take_while(|&t| t <= horizon).collect();
    if nodes.len() < 2 {
        return domain("Picard horizon must contain at least one step");
    }
    let mesh = TimeMesh { nodes, kind: cfg.mesh.kind };
    let flow = LinearFlow::new(profile, &cfg.v0)?;
    let mut linear = vec![Field { time: 0.0, ..cfg.v0.clone() }];
    for &t in &mesh.nodes[1..] {
        let out = flow.at(t)?;
        if out.tail_mass > TAIL_ERROR {
            return Err(Error::Truncation { t, tail_mass: out.tail_mass });
        }
        linear.push(out.field);
    }
    if !cfg.nonlinear {
        return Ok(PicardResult { fields: linear, iterations: 1, last_difference: 0.0 });
    }
    let mut memory = MemoryOperator::new(profile, cfg.grid, &mesh, cfg.params.eta)?;
    let mut current = linear.clone();
    let (mut previous, mut grew) = (f64::INFINITY, 0usize);
    for it in 1..=cfg.picard_max_iters {
        memory.clear_history();
        for f in &current[..mesh.steps()] {
            memory.push(f);
        }
        let mut next = vec![linear[0].clone()];
        for k in 1..=mesh.steps() {
            let mem = memory.evaluate(k)?;
            let mut v = linear[k].clone();
            for (a, b) in v.values.iter_mut().zip(&mem.field.values) {
                *a += b;
            }
            next.push(v);
        }
        let diff = sup_difference(&next, &current);
        current = next;
        if diff < cfg.picard_tol {
            return Ok(PicardResult { fields: current, iterations: it, last_difference: diff });
        }
        grew = if !diff.is_finite() || diff > previous { grew + 1 } else { 0 };
        if grew >= GROWTH_LIMIT {
            return Err(Error::NoContraction { grew, last: diff });
        }
        previous = diff;
    }
    Err(Error::PicardStalled { iters: cfg.picard_max_iters, last: previous })
}
