//! Discrete fields on a truncated line and the two integral operators of the
//! mild formulation: `G f(t) = G(t, .) * V0` and the memory operator
//! `A f(t) = int_0^t G(t - s, .) * f(s)^(1+eta) ds`.
//!
//! Field values are cell averages on cells of width `dx` centred at the nodes.
//! Convolution against the kernel uses exact cell masses of `G(t, .)`, so the
//! spatial step is exact for piecewise-constant data.

mod convolve;
mod linear;
mod memory;
mod snapshot;

pub use convolve::Convolver;
pub use linear::{apply_g, LinearFlow, LinearOutput};
pub use memory::{apply_a, MemoryOperator};
pub use snapshot::{load_field, save_field};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Uniform grid on `[-L, L]` with an odd number of nodes, so `x = 0` is a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceGrid {
    pub half_width: f64,
    pub points: usize,
}

impl SpaceGrid {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return domain(format!("half width {half_width} must be positive"));
        }
        if points < 3 || points % 2 == 0 {
            return domain(format!("grid needs an odd number of points >= 3, got {points}"));
        }
        Ok(Self { half_width, points })
    }

    /// Grid with spacing `dx` whose cells tile `[-L, L]` exactly when `L / dx` is a half-integer.
    pub fn with_spacing(half_width: f64, dx: f64) -> Result<Self> {
        let half = (half_width / dx).round() as usize;
        Self::new(half as f64 * dx, 2 * half + 1)
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + self.dx() * i as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.x(i)).collect()
    }

    pub fn center(&self) -> usize {
        self.points / 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeshKind {
    /// `t_k = T (k/N)^r`.
    Graded { grading: f64 },
    /// `t_k = t_1 q^(k-1)` after `t_0 = 0`.
    Geometric { first: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeMesh {
    pub nodes: Vec<f64>,
    pub kind: MeshKind,
}

impl TimeMesh {
    pub fn graded(horizon: f64, steps: usize, grading: f64) -> Result<Self> {
        if !(horizon > 0.0) || steps == 0 || !(grading >= 1.0) {
            return domain("graded mesh needs horizon > 0, steps >= 1 and grading >= 1");
        }
        let nodes = (0..=steps).map(|k| horizon * (k as f64 / steps as f64).powf(grading)).collect();
        Ok(Self { nodes, kind: MeshKind::Graded { grading } })
    }

    pub fn uniform(horizon: f64, steps: usize) -> Result<Self> {
        Self::graded(horizon, steps, 1.0)
    }

    /// Zero followed by `steps` geometrically spaced nodes from `first` to `horizon`.
    pub fn geometric(first: f64, horizon: f64, steps: usize) -> Result<Self> {
        if !(first > 0.0 && horizon > first) || steps < 2 {
            return domain("geometric mesh needs 0 < first < horizon and steps >= 2");
        }
        let q = (horizon / first).ln() / (steps - 1) as f64;
        let mut nodes = vec![0.0];
        nodes.extend((0..steps).map(|k| first * (q * k as f64).exp()));
        *nodes.last_mut().unwrap() = horizon;
        Ok(Self { nodes, kind: MeshKind::Geometric { first } })
    }

    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// The same family with twice the steps.
    pub fn refined(&self) -> Result<Self> {
        match self.kind {
            MeshKind::Graded { grading } => Self::graded(self.horizon(), 2 * self.steps(), grading),
            MeshKind::Geometric { first } => Self::geometric(first / 2.0, self.horizon(), 2 * self.steps()),
        }
    }

    /// True when all steps are equal, so kernels depend only on the lag.
    pub fn is_uniform(&self) -> bool {
        matches!(self.kind, MeshKind::Graded { grading } if grading == 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: SpaceGrid,
    pub values: Vec<f64>,
    pub time: f64,
}

impl Field {
    pub fn new(grid: SpaceGrid, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.points {
            return domain(format!("field has {} values for {} grid points", values.len(), grid.points));
        }
        if let Some(v) = values.iter().find(|v| v.is_nan() || **v < 0.0) {
            return domain(format!("field values must be nonnegative, found {v}"));
        }
        Ok(Self { grid, values, time })
    }

    pub fn zeros(grid: SpaceGrid, time: f64) -> Self {
        Self { grid, values: vec![0.0; grid.points], time }
    }

    /// Samples `f` at the nodes.
    pub fn from_fn(grid: SpaceGrid, time: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().into_iter().map(f).collect(), time)
    }

    /// Cell averages of `c 1[a, b]`.
    pub fn indicator(grid: SpaceGrid, a: f64, b: f64, c: f64) -> Result<Self> {
        let dx = grid.dx();
        let values = grid
            .nodes()
            .into_iter()
            .map(|x| {
                let overlap = (b.min(x + dx / 2.0) - a.max(x - dx / 2.0)).max(0.0);
                c * overlap / dx
            })
            .collect();
        Self::new(grid, values, 0.0)
    }

    /// Unit-mass spike at the origin cell.
    pub fn delta(grid: SpaceGrid) -> Self {
        let mut f = Self::zeros(grid, 0.0);
        f.values[grid.center()] = 1.0 / grid.dx();
        f
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, &v| if v > m || v.is_nan() { v } else { m })
    }

    pub fn integral(&self) -> f64 {
        norm(self, NormSpec::lp(1.0))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// `||V||_{p,theta}` evaluated at one time: `t^theta ||V(t)||_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    /// `f64::INFINITY` for the sup norm.
    pub p: f64,
    #[serde(default)]
    pub theta: f64,
}

impl NormSpec {
    pub fn lp(p: f64) -> Self {
        Self { p, theta: 0.0 }
    }

    pub fn sup() -> Self {
        Self::lp(f64::INFINITY)
    }

    /// The fixed-point weight `(beta d/alpha)(alpha/(beta d eta) - 1/p)`.
    pub fn fixed_point(params: &crate::ModelParams, p: f64) -> Self {
        let q = params.decay_exponent();
        Self { p, theta: q * (1.0 / (q * params.eta) - 1.0 / p) }
    }
}

/// Discrete `L^p` norm by the trapezoid rule, or the max for `p = inf`, times `t^theta`.
pub fn norm(field: &Field, spec: NormSpec) -> f64 {
    let v = &field.values;
    let raw = if spec.p.is_infinite() {
        v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    } else {
        let n = v.len();
        let inner: f64 = v[1..n - 1].iter().map(|x| x.abs().powf(spec.p)).sum();
        let ends = 0.5 * (v[0].abs().powf(spec.p) + v[n - 1].abs().powf(spec.p));
        ((inner + ends) * field.grid.dx()).powf(1.0 / spec.p)
    };
    if spec.theta == 0.0 {
        raw
    } else {
        field.time.powf(spec.theta) * raw
    }
}


#[cfg(test)]
mod operator_tests;
