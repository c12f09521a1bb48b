//! One solve per `eta`, rows independent and run on the worker pool.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::{solve_config, verdict_label, ExperimentConfig};
use crate::kernel::KernelProfile;
use crate::solver::{march, picard, Verdict};
use crate::{Error, Result};

pub const CRITICAL_NOTE: &str = "critical: not certified";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub eta: f64,
    pub eta_c: f64,
    /// `blowup`, `global_up_to_horizon`, `unconfirmed` or `error`.
    pub verdict: String,
    pub t_star: Option<f64>,
    pub uncertainty: Option<f64>,
    pub max_weighted_ratio: Option<f64>,
    /// Initial amplitude actually used, after any halvings.
    pub amplitude: f64,
    pub notes: Vec<String>,
}

fn is_critical(eta: f64, eta_c: f64) -> bool {
    (eta - eta_c).abs() <= 1e-12 * eta_c
}

fn row(cfg: &ExperimentConfig, prof: &KernelProfile, eta: f64, retries: usize) -> SweepRow {
    let eta_c = cfg.params.eta_c();
    let mut out = SweepRow {
        eta,
        eta_c,
        verdict: "error".into(),
        t_star: None,
        uncertainty: None,
        max_weighted_ratio: None,
        amplitude: cfg.initial.amplitude(),
        notes: Vec::new(),
    };
    if is_critical(eta, eta_c) {
        out.notes.push(CRITICAL_NOTE.into());
    }
    match solve_row(cfg, prof, eta, retries, &mut out) {
        Ok(()) => {}
        Err(e) => out.notes.push(format!("error: {e}")),
    }
    out
}

fn solve_row(cfg: &ExperimentConfig, prof: &KernelProfile, eta: f64, retries: usize, out: &mut SweepRow) -> Result<()> {
    let params = cfg.params.with_eta(eta)?;
    let mut sc = solve_config(cfg, prof, params, out.amplitude)?;
    if eta > out.eta_c && !is_critical(eta, out.eta_c) {
        // small data exists but its size is unknown: halve until the fixed point contracts
        let mut halvings = 0;
        loop {
            match picard(prof, &sc, sc.mesh.horizon()) {
                Ok(_) => break,
                Err(Error::NoContraction { .. }) if halvings < retries => {
                    halvings += 1;
                    out.amplitude /= 2.0;
                    sc = solve_config(cfg, prof, params, out.amplitude)?;
                }
                Err(Error::NoContraction { .. }) => {
                    out.notes.push(format!("picard did not contract after {retries} halvings"));
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if halvings > 0 {
            out.notes.push(format!("amplitude halved {halvings} times"));
        }
    }
    let trace = march(prof, &sc)?;
    out.verdict = verdict_label(&trace.verdict).into();
    out.t_star = trace.verdict.t_star();
    out.uncertainty = match trace.verdict {
        Verdict::Blowup { uncertainty, .. } => Some(uncertainty),
        _ => None,
    };
    out.max_weighted_ratio = trace.max_weighted_ratio();
    out.notes.extend(trace.warnings);
    Ok(())
}

/// Rows in the order of the configured `eta` list; per-row failures are recorded in the row.
pub fn sweep(cfg: &ExperimentConfig, prof: &KernelProfile) -> Result<Vec<SweepRow>> {
    let Some(block) = &cfg.sweep else {
        return Err(Error::Config("sweep mode needs a sweep block".into()));
    };
    let etas = block.etas();
    if etas.is_empty() {
        return Err(Error::Config("eta list is empty".into()));
    }
    Ok(etas.par_iter().map(|&eta| row(cfg, prof, eta, block.retries)).collect())
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// `eta,eta_c,verdict,t_star,uncertainty,max_weighted_ratio,amplitude,notes`; notes joined by `; `.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("eta,eta_c,verdict,t_star,uncertainty,max_weighted_ratio,amplitude,notes\n");
    for r in rows {
        let notes = r.notes.join("; ").replace(['"', ','], " ");
        let _ = writeln!(
            out,
            "{:e},{:e},{},{},{},{},{:e},{}",
            r.eta,
            r.eta_c,
            r.verdict,
            cell(r.t_star),
            cell(r.uncertainty),
            cell(r.max_weighted_ratio),
            r.amplitude,
            notes
        );
    }
    out
}
