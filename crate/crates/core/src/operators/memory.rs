//! Product integration of the memory term.
//!
//! On each past panel `[t_j, t_j+1]` the source is frozen at its left value
//! `f_j = V(t_j)^(1+eta)` and the kernel is integrated in time exactly in its
//! cell masses: `K_kj = int_panel m(t_k - s) ds`, by 4-point Gauss on ordinary
//! panels. The panel touching `t_k` uses `tau = Delta w^p`, `p = ceil(1/beta)`,
//! which absorbs the `tau^beta` onset of the off-centre masses.

use rayon::prelude::*;
use realfft::num_complex::Complex;

use super::convolve::{multiply_accumulate, Convolver, Spectrum};
use super::linear::kernel_taps;
use super::{Field, SpaceGrid, TimeMesh};
use crate::error::{domain, Result};
use crate::kernel::KernelProfile;
use crate::quad::GaussLegendre;

#[derive(Debug, Clone)]
pub struct MemoryOutput {
    pub field: Field,
    /// A past value was not finite; the field is set to `+inf`.
    pub blown_up: bool,
}

enum Source {
    Zero,
    Blown,
    Values(Spectrum),
}

/// Memory operator on a fixed grid and mesh, accumulating source spectra as history grows.
pub struct MemoryOperator<'a> {
    profile: &'a KernelProfile,
    grid: SpaceGrid,
    mesh: TimeMesh,
    eta: f64,
    conv: Convolver,
    sources: Vec<Source>,
    lag_cache: Vec<Option<Spectrum>>,
    regular: GaussLegendre,
    touching: GaussLegendre,
}

impl<'a> MemoryOperator<'a> {
    pub fn new(profile: &'a KernelProfile, grid: SpaceGrid, mesh: &TimeMesh, eta: f64) -> Result<Self> {
        profile.cumulative()?;
        if mesh.nodes.windows(2).any(|w| !(w[1] > w[0])) || mesh.nodes[0] != 0.0 {
            return domain("time mesh must start at 0 and increase strictly");
        }
        Ok(Self {
            profile,
            grid,
            mesh: mesh.clone(),
            eta,
            conv: Convolver::new(grid.points),
            sources: Vec::new(),
            lag_cache: vec![None; mesh.steps() + 1],
            regular: GaussLegendre::new(4),
            touching: GaussLegendre::new(8),
        })
    }

    pub fn history_len(&self) -> usize {
        self.sources.len()
    }

    /// Appends `V(t_j)` for the next `j`.
    pub fn push(&mut self, v: &Field) {
        if !v.is_finite() {
            self.sources.push(Source::Blown);
            return;
        }
        let power = 1.0 + self.eta;
        let f: Vec<f64> = v.values.iter().map(|&x| x.max(0.0).powf(power)).collect();
        if f.iter().all(|&x| x == 0.0) {
            self.sources.push(Source::Zero);
        } else {
            self.sources.push(Source::Values(self.conv.signal_spectrum(&f)));
        }
    }

    /// Forgets the history so the operator can be reused for a new iterate on the same mesh.
    pub fn clear_history(&mut self) {
        self.sources.clear();
    }

    /// Cell-mass taps of `int_{t_j}^{t_j+1} G(t_k - s, .) ds`.
    fn panel_taps(&self, k: usize, j: usize) -> Result<Vec<f64>> {
        let t = &self.mesh.nodes;
        let n = self.grid.points;
        let mut acc = vec![0.0; n];
        let mut add = |tau: f64, w: f64| -> Result<()> {
            for (a, m) in acc.iter_mut().zip(kernel_taps(self.profile, &self.grid, tau)?) {
                *a += w * m;
            }
            Ok(())
        };
        if j + 1 == k {
            let delta = t[k] - t[j];
            let p = (1.0 / self.profile.params.beta).ceil();
            for (w, wt) in self.touching.mapped(0.0, 1.0) {
                add(delta * w.powf(p), wt * delta * p * w.powf(p - 1.0))?;
            }
        } else {
            for (s, wt) in self.regular.mapped(t[j], t[j + 1]) {
                add(t[k] - s, wt)?;
            }
        }
        Ok(acc)
    }

    fn panel_spectrum(&self, k: usize, j: usize) -> Result<Spectrum> {
        Ok(self.conv.kernel_spectrum(&self.panel_taps(k, j)?))
    }

    /// `A f(t_k)` from the first `k` history entries.
    pub fn evaluate(&mut self, k: usize) -> Result<MemoryOutput> {
        if k == 0 || k > self.sources.len() || k > self.mesh.steps() {
            return domain(format!("memory term at node {k} needs {k} history entries, have {}", self.sources.len()));
        }
        let time = self.mesh.nodes[k];
        if self.sources[..k].iter().any(|s| matches!(s, Source::Blown)) {
            return Ok(MemoryOutput {
                field: Field { grid: self.grid, values: vec![f64::INFINITY; self.grid.points], time },
                blown_up: true,
            });
        }
        if self.mesh.is_uniform() {
            for j in 0..k {
                if matches!(self.sources[j], Source::Values(_)) && self.lag_cache[k - j].is_none() {
                    self.lag_cache[k - j] = Some(self.panel_spectrum(k, j)?);
                }
            }
        }
        let active: Vec<(usize, &Spectrum)> = self.sources[..k]
            .iter()
            .enumerate()
            .filter_map(|(j, s)| if let Source::Values(v) = s { Some((j, v)) } else { None })
            .collect();
        let mut acc = vec![Complex::new(0.0, 0.0); self.conv.spectrum_len()];
        if self.mesh.is_uniform() {
            for &(j, source) in &active {
                multiply_accumulate(&mut acc, self.lag_cache[k - j].as_ref().unwrap(), source);
            }
        } else {
            let kernels: Vec<Spectrum> =
                active.par_iter().map(|&(j, _)| self.panel_spectrum(k, j)).collect::<Result<_>>()?;
            for (kernel, &(_, source)) in kernels.iter().zip(&active) {
                multiply_accumulate(&mut acc, kernel, source);
            }
        }
        let values = if active.is_empty() {
            vec![0.0; self.grid.points]
        } else {
            self.conv.invert(acc).into_iter().map(|v| v.max(0.0)).collect()
        };
        Ok(MemoryOutput { field: Field { grid: self.grid, values, time }, blown_up: false })
    }
}

/// `A f(t_k)` for `k = history.len()`, with `history[j] = V(t_j)`.
pub fn apply_a(profile: &KernelProfile, history: &[Field], mesh: &TimeMesh, eta: f64) -> Result<MemoryOutput> {
    let Some(first) = history.first() else {
        return domain("memory term needs at least one history entry");
    };
    if history.iter().any(|f| f.values.iter().any(|&v| v < 0.0)) {
        return domain("history must be nonnegative");
    }
    let mut op = MemoryOperator::new(profile, first.grid, mesh, eta)?;
    for f in history {
        op.push(f);
    }
    op.evaluate(history.len())
}
