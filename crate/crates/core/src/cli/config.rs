//! The experiment document: one JSON object, checked field by field at parse time.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::Mode;
use crate::kernel::KernelProfile;
use crate::operators::{Field, SpaceGrid, TimeMesh};
use crate::params::ModelParams;
use crate::Result;

/// A schema or invariant violation at `path` (dotted, as in `mesh.steps`).
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for SchemaError {}

fn bad<T>(path: &str, message: impl Into<String>) -> std::result::Result<T, SchemaError> {
    Err(SchemaError { path: path.into(), message: message.into() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must agree with the mode on the command line when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default = "default_params")]
    pub params: ModelParams,
    #[serde(default)]
    pub kernel: KernelBlock,
    #[serde(default)]
    pub grid: GridBlock,
    #[serde(default)]
    pub mesh: MeshSpec,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub dirichlet: DirichletBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
    #[serde(default)]
    pub verify: VerifyBlock,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

fn default_params() -> ModelParams {
    ModelParams { alpha: 1.5, beta: 0.5, dim: 1, eta: 1.0 }
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelBlock {
    pub quadrature_budget: usize,
    /// Profiles are loaded from here when present and saved after a build.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
    /// Times and radii of the `kernel` mode value table.
    pub times: Vec<f64>,
    pub radii: Vec<f64>,
}

impl Default for KernelBlock {
    fn default() -> Self {
        Self {
            quadrature_budget: 6,
            cache_dir: None,
            times: vec![0.1, 1.0, 10.0],
            radii: vec![0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub half_width: f64,
    pub dx: f64,
}

impl Default for GridBlock {
    fn default() -> Self {
        Self { half_width: 100.0, dx: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshSpec {
    Uniform { horizon: f64, steps: usize },
    Graded { horizon: f64, steps: usize, grading: f64 },
    Geometric { first: f64, horizon: f64, steps: usize },
}

impl Default for MeshSpec {
    fn default() -> Self {
        MeshSpec::Uniform { horizon: 100.0, steps: 200 }
    }
}

impl MeshSpec {
    pub fn build(&self) -> Result<TimeMesh> {
        match *self {
            MeshSpec::Uniform { horizon, steps } => TimeMesh::uniform(horizon, steps),
            MeshSpec::Graded { horizon, steps, grading } => TimeMesh::graded(horizon, steps, grading),
            MeshSpec::Geometric { first, horizon, steps } => TimeMesh::geometric(first, horizon, steps),
        }
    }
}

/// Initial data on the line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `amplitude 1[a, b]`.
    Indicator { a: f64, b: f64, amplitude: f64 },
    /// `amplitude G(gamma, .)`, the data of the decay test.
    Kernel { gamma: f64, amplitude: f64 },
    /// Mass `amplitude` on the centre cell.
    Delta { amplitude: f64 },
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData::Indicator { a: -1.0, b: 1.0, amplitude: 0.01 }
    }
}

impl InitialData {
    pub fn amplitude(&self) -> f64 {
        match *self {
            InitialData::Indicator { amplitude, .. } | InitialData::Kernel { amplitude, .. } | InitialData::Delta { amplitude } => amplitude,
        }
    }

    pub fn with_amplitude(&self, value: f64) -> Self {
        let mut out = *self;
        match &mut out {
            InitialData::Indicator { amplitude, .. } | InitialData::Kernel { amplitude, .. } | InitialData::Delta { amplitude } => *amplitude = value,
        }
        out
    }

    pub fn field(&self, profile: &KernelProfile, grid: SpaceGrid) -> Result<Field> {
        match *self {
            InitialData::Indicator { a, b, amplitude } => Field::indicator(grid, a, b, amplitude),
            InitialData::Kernel { gamma, amplitude } => Field::from_fn(grid, 0.0, |x| amplitude * profile.density(gamma, x.abs())),
            InitialData::Delta { amplitude } => {
                let mut f = Field::delta(grid);
                f.values.iter_mut().for_each(|v| *v *= amplitude);
                Ok(f)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverBlock {
    pub blowup_threshold: f64,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub refine: bool,
    pub nonlinear: bool,
    /// `V0 <= delta G(gamma, .)` is checked and `V / G(t + gamma)` reported when set.
    /// Kernel-shaped initial data sets it implicitly.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay_test: Option<crate::solver::DecayTest>,
}

impl Default for SolverBlock {
    fn default() -> Self {
        Self { blowup_threshold: 1e6, picard_tol: 1e-8, picard_max_iters: 50, refine: true, nonlinear: true, decay_test: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DirichletInitial {
    /// `k phi_1`.
    FirstMode { k: f64 },
    /// `amplitude (1 - (x/R)^2)`.
    Parabola { amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DirichletBlock {
    pub half_width: f64,
    /// Grid points including both boundary nodes; odd.
    pub points: usize,
    pub modes: usize,
    pub initial: DirichletInitial,
    pub mesh: MeshSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_cache: Option<PathBuf>,
}

impl Default for DirichletBlock {
    fn default() -> Self {
        Self {
            half_width: 1.0,
            points: 129,
            modes: 64,
            initial: DirichletInitial::FirstMode { k: 1e-3 },
            mesh: MeshSpec::Geometric { first: 1e-4, horizon: 1e9, steps: 300 },
            basis_cache: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtaRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub etas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<EtaRange>,
    /// Amplitude halvings allowed when Picard does not contract on a supercritical row.
    #[serde(default = "default_retries")]
    pub retries: usize,
}

fn default_retries() -> usize {
    6
}

impl SweepBlock {
    pub fn etas(&self) -> Vec<f64> {
        let mut out = self.etas.clone().unwrap_or_default();
        if let Some(r) = &self.range {
            if r.count == 1 {
                out.push(r.start);
            } else {
                out.extend((0..r.count).map(|i| r.start + (r.stop - r.start) * i as f64 / (r.count - 1) as f64));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyBlock {
    pub mc_samples: usize,
    pub rho: f64,
}

impl Default for VerifyBlock {
    fn default() -> Self {
        let s = crate::verify::SuiteConfig::default();
        Self { mc_samples: s.mc_samples, rho: s.rho }
    }
}

fn positive(path: &str, v: f64) -> std::result::Result<(), SchemaError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        bad(path, format!("must be positive and finite, got {v}"))
    }
}

fn check_mesh(path: &str, m: &MeshSpec) -> std::result::Result<(), SchemaError> {
    match *m {
        MeshSpec::Uniform { horizon, steps } | MeshSpec::Graded { horizon, steps, .. } => {
            positive(&format!("{path}.horizon"), horizon)?;
            if steps == 0 {
                return bad(&format!("{path}.steps"), "must be at least 1");
            }
            if let MeshSpec::Graded { grading, .. } = m {
                if !(*grading >= 1.0) {
                    return bad(&format!("{path}.grading"), format!("must be at least 1, got {grading}"));
                }
            }
        }
        MeshSpec::Geometric { first, horizon, steps } => {
            positive(&format!("{path}.first"), first)?;
            if !(horizon > first) {
                return bad(&format!("{path}.horizon"), "must exceed first");
            }
            if steps < 2 {
                return bad(&format!("{path}.steps"), "must be at least 2");
            }
        }
    }
    Ok(())
}

impl ExperimentConfig {
    /// Module-level invariants the schema cannot express; the path names the offending field.
    pub fn validate(&self, mode: Mode) -> std::result::Result<(), SchemaError> {
        if let Some(m) = self.mode {
            if m != mode {
                return bad("mode", format!("config says {m:?}, command line says {mode:?}"));
            }
        }
        let k = &self.kernel;
        if k.quadrature_budget == 0 {
            return bad("kernel.quadrature_budget", "must be at least 1");
        }
        for (i, t) in k.times.iter().enumerate() {
            positive(&format!("kernel.times[{i}]"), *t)?;
        }
        for (i, r) in k.radii.iter().enumerate() {
            if !(*r >= 0.0 && r.is_finite()) {
                return bad(&format!("kernel.radii[{i}]"), format!("must be nonnegative, got {r}"));
            }
        }
        let needs_line = matches!(mode, Mode::Solve | Mode::Sweep | Mode::Dirichlet);
        if needs_line && self.params.dim != 1 {
            return bad("params.dim", "solvers run on the line only (dim = 1)");
        }
        if matches!(mode, Mode::Solve | Mode::Sweep) {
            positive("grid.half_width", self.grid.half_width)?;
            positive("grid.dx", self.grid.dx)?;
            if self.grid.dx > self.grid.half_width {
                return bad("grid.dx", "must not exceed the half width");
            }
            check_mesh("mesh", &self.mesh)?;
            match self.initial {
                InitialData::Indicator { a, b, amplitude } => {
                    if !(a < b) {
                        return bad("initial.b", "must exceed a");
                    }
                    if !(amplitude >= 0.0) {
                        return bad("initial.amplitude", "must be nonnegative");
                    }
                }
                InitialData::Kernel { gamma, amplitude } => {
                    positive("initial.gamma", gamma)?;
                    if !(amplitude >= 0.0) {
                        return bad("initial.amplitude", "must be nonnegative");
                    }
                }
                InitialData::Delta { amplitude } => {
                    if !(amplitude >= 0.0) {
                        return bad("initial.amplitude", "must be nonnegative");
                    }
                }
            }
            let s = &self.solver;
            positive("solver.blowup_threshold", s.blowup_threshold)?;
            positive("solver.picard_tol", s.picard_tol)?;
            if s.picard_max_iters == 0 {
                return bad("solver.picard_max_iters", "must be at least 1");
            }
            if let Some(d) = s.decay_test {
                positive("solver.decay_test.gamma", d.gamma)?;
                positive("solver.decay_test.delta", d.delta)?;
            }
        }
        if mode == Mode::Dirichlet {
            let d = &self.dirichlet;
            positive("dirichlet.half_width", d.half_width)?;
            if d.points < 5 || d.points % 2 == 0 {
                return bad("dirichlet.points", format!("must be odd and at least 5, got {}", d.points));
            }
            if d.modes == 0 || d.modes > d.points - 2 {
                return bad("dirichlet.modes", format!("must lie in 1..={}", d.points - 2));
            }
            match d.initial {
                DirichletInitial::FirstMode { k } => positive("dirichlet.initial.k", k)?,
                DirichletInitial::Parabola { amplitude } => positive("dirichlet.initial.amplitude", amplitude)?,
            }
            check_mesh("dirichlet.mesh", &d.mesh)?;
            positive("solver.blowup_threshold", self.solver.blowup_threshold)?;
        }
        if mode == Mode::Sweep {
            let Some(s) = &self.sweep else {
                return bad("sweep", "sweep mode needs a sweep block");
            };
            if let Some(r) = &s.range {
                if r.count == 0 {
                    return bad("sweep.range.count", "must be at least 1");
                }
            }
            let etas = s.etas();
            if etas.is_empty() {
                return bad("sweep.etas", "eta list is empty");
            }
            for (i, e) in etas.iter().enumerate() {
                positive(&format!("sweep.etas[{i}]"), *e)?;
            }
        }
        if mode == Mode::Verify {
            if self.verify.mc_samples < crate::verify::MIN_SAMPLES {
                return bad("verify.mc_samples", format!("must be at least {}", crate::verify::MIN_SAMPLES));
            }
            if !(self.verify.rho > 0.0 && self.verify.rho < 1.5) {
                return bad("verify.rho", "must lie in (0, 1.5), the space order of the tested profile");
            }
        }
        Ok(())
    }
}

/// Parses a config document; the error names the field path and the line.
pub fn parse_config(text: &str) -> std::result::Result<ExperimentConfig, SchemaError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        SchemaError { path: if path == "." { "<root>".into() } else { path }, message: e.into_inner().to_string() }
    })
}
