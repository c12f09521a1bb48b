//! Monte-Carlo subordination: `G(t, x) = E p(E_t, x)` with `E_t = (t / D_1)^beta` in law.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::params::ModelParams;
use crate::specfun::{sample_subordinator, StableProfile};

pub const MIN_SAMPLES: usize = 1000;
const CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Mean and standard error of `p(E_t, x)` over `n_samples` draws.
///
/// Chunk `i` of 65536 draws uses stream `i` of a ChaCha8 generator seeded with `seed`,
/// and chunk statistics are merged in order, so the result does not depend on threading.
pub fn mc_subordination_oracle(params: &ModelParams, t: f64, x: &[f64], n_samples: usize, seed: u64) -> Result<McEstimate> {
    if n_samples < MIN_SAMPLES {
        return domain(format!("{n_samples} samples is too few for a standard error (need {MIN_SAMPLES})"));
    }
    if !(t > 0.0) {
        return domain(format!("t = {t} must be positive"));
    }
    if x.len() != params.dim {
        return domain(format!("point has {} coordinates, model dimension is {}", x.len(), params.dim));
    }
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let stable = StableProfile::new(params.alpha, params.dim)?;
    let beta = params.beta;
    if beta == 1.0 {
        return Ok(McEstimate { estimate: stable.density(t, r), std_error: 0.0, samples: n_samples });
    }
    let chunks = n_samples.div_ceil(CHUNK);
    let parts: Vec<(f64, f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(n_samples - c * CHUNK);
            let (mut mean, mut m2) = (0.0, 0.0);
            for i in 0..len {
                let d = sample_subordinator(beta, &mut rng);
                let v = stable.density((t / d).powf(beta), r);
                let delta = v - mean;
                mean += delta / (i + 1) as f64;
                m2 += delta * (v - mean);
            }
            (len as f64, mean, m2)
        })
        .collect();
    let (mut n, mut mean, mut m2) = (0.0, 0.0, 0.0);
    for (nb, mb, m2b) in parts {
        let total = n + nb;
        let delta = mb - mean;
        mean += delta * nb / total;
        m2 += m2b + delta * delta * n * nb / total;
        n = total;
    }
    let variance = m2 / (n - 1.0);
    Ok(McEstimate { estimate: mean, std_error: (variance / n).sqrt(), samples: n_samples })
}
