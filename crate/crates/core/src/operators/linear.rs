use super::convolve::{Convolver, Spectrum};
use super::{Field, SpaceGrid};
use crate::error::{domain, Result};
use crate::kernel::KernelProfile;

/// Tail mass above which a result is flagged as truncated.
pub const TAIL_WARNING: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct LinearOutput {
    pub field: Field,
    /// Mass of `G(t, .)` beyond the half width, a proxy for what the truncated domain loses.
    pub tail_mass: f64,
    pub truncated: bool,
}

/// Cell masses of `G(t, .)` for offsets `0..n`.
pub(crate) fn kernel_taps(profile: &KernelProfile, grid: &SpaceGrid, t: f64) -> Result<Vec<f64>> {
    let c = profile.cumulative()?;
    Ok(c.cell_masses(t, profile.params.spread_exponent(), grid.dx(), grid.points))
}

/// Mass of `G(t, .)` outside `[-(L + dx/2), L + dx/2]`.
pub(crate) fn tail_mass(profile: &KernelProfile, grid: &SpaceGrid, t: f64) -> Result<f64> {
    let c = profile.cumulative()?;
    let w = t.powf(-profile.params.spread_exponent());
    Ok(2.0 * c.above((grid.half_width + 0.5 * grid.dx()) * w))
}

/// `t -> G(t, .) * V0` with the initial spectrum computed once.
pub struct LinearFlow<'a> {
    profile: &'a KernelProfile,
    grid: SpaceGrid,
    conv: Convolver,
    v0: Spectrum,
    zero: bool,
}

impl<'a> LinearFlow<'a> {
    pub fn new(profile: &'a KernelProfile, v0: &Field) -> Result<Self> {
        profile.cumulative()?;
        let conv = Convolver::new(v0.grid.points);
        let v0_spec = conv.signal_spectrum(&v0.values);
        Ok(Self { profile, grid: v0.grid, conv, v0: v0_spec, zero: v0.values.iter().all(|&v| v == 0.0) })
    }

    pub fn at(&self, t: f64) -> Result<LinearOutput> {
        if !(t > 0.0) {
            return domain(format!("linear flow needs t > 0, got {t}"));
        }
        let tail = tail_mass(self.profile, &self.grid, t)?;
        let values = if self.zero {
            vec![0.0; self.grid.points]
        } else {
            let k = self.conv.kernel_spectrum(&kernel_taps(self.profile, &self.grid, t)?);
            let prod = k.iter().zip(&self.v0).map(|(a, b)| a * b).collect();
            // FFT round-off can leave values of order -1e-17 where the true result is ~0
            self.conv.invert(prod).into_iter().map(|v| v.max(0.0)).collect()
        };
        Ok(LinearOutput { field: Field { grid: self.grid, values, time: t }, tail_mass: tail, truncated: tail > TAIL_WARNING })
    }
}

/// `G(t, .) * V0` on the grid of `v0`, zero outside `[-L, L]`.
pub fn apply_g(profile: &KernelProfile, v0: &Field, t: f64) -> Result<LinearOutput> {
    if v0.values.iter().any(|&v| v < 0.0) {
        return domain("initial data must be nonnegative");
    }
    LinearFlow::new(profile, v0)?.at(t)
}
