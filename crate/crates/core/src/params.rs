use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The model tuple: space order `alpha`, time order `beta`, dimension and
/// nonlinearity exponent `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ModelParams {
    pub alpha: f64,
    pub beta: f64,
    pub dim: usize,
    pub eta: f64,
}

#[derive(Deserialize)]
struct RawParams {
    alpha: f64,
    beta: f64,
    dim: usize,
    eta: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(r: RawParams) -> Result<Self> {
        ModelParams::new(r.alpha, r.beta, r.dim, r.eta)
    }
}

impl ModelParams {
    pub fn new(alpha: f64, beta: f64, dim: usize, eta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::Domain(format!("alpha = {alpha} must lie in (0, 2]")));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::Domain(format!("beta = {beta} must lie in (0, 1]")));
        }
        if dim < 1 {
            return Err(Error::Domain("dim must be at least 1".into()));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::Domain(format!("eta = {eta} must be positive")));
        }
        Ok(Self { alpha, beta, dim, eta })
    }

    /// Critical exponent `alpha / (beta d)`.
    pub fn eta_c(&self) -> f64 {
        self.alpha / (self.beta * self.dim as f64)
    }

    /// Decay exponent `beta d / alpha` of the sup norm of the linear flow.
    pub fn decay_exponent(&self) -> f64 {
        self.beta * self.dim as f64 / self.alpha
    }

    /// Spatial spread exponent `beta / alpha`: the kernel lives on `|x| ~ t^(beta/alpha)`.
    pub fn spread_exponent(&self) -> f64 {
        self.beta / self.alpha
    }

    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, self.dim, eta)
    }

    /// Open-interval time order as required by the subordinator routines.
    pub fn has_memory(&self) -> bool {
        self.beta < 1.0
    }
}
