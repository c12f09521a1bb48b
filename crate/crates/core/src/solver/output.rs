use std::fmt::Write as _;

use serde_json::json;

use super::SolveTrace;
use crate::params::ModelParams;

/// Trace table `t,sup_norm,l1,l2,weighted_ratio,F_t`; an absent ratio is written as an empty cell.
pub fn trace_csv(trace: &SolveTrace) -> String {
    let mut out = String::from("t,sup_norm,l1,l2,weighted_ratio,F_t\n");
    let l1 = &trace.lp_norms[0].1;
    let l2 = &trace.lp_norms[1].1;
    for k in 0..trace.times.len() {
        let ratio = trace.weighted_ratio.as_ref().map(|r| format!("{:e}", r[k])).unwrap_or_default();
        let _ = writeln!(
            out,
            "{:e},{:e},{:e},{:e},{},{:e}",
            trace.times[k], trace.sup_norms[k], l1[k], l2[k], ratio, trace.functional[k]
        );
    }
    out
}

/// Verdict summary; blow-up is reported as numerical evidence, not as a proof.
pub fn verdict_json(params: &ModelParams, trace: &SolveTrace) -> serde_json::Value {
    json!({
        "params": params,
        "verdict": trace.verdict,
        "t_star": trace.verdict.t_star(),
        "uncertainty": match &trace.verdict {
            super::Verdict::Blowup { uncertainty, .. } => Some(*uncertainty),
            _ => None,
        },
        "max_weighted_ratio": trace.max_weighted_ratio(),
        "evidence": "threshold crossing of the sup norm confirmed under one halving of the time step; a numerical proxy for non-existence of a global solution",
        "warnings": trace.warnings,
    })
}
