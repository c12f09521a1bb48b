//! Batch front end for `frac <mode> --config <path>`.
//!
//! Exit codes: 0 success (a blow-up verdict included), 1 a failed verification roll-up,
//! 2 a config that does not parse or violates an invariant, 3 a numerical failure.

mod config;
mod sweep;

pub use config::{
    parse_config, DirichletBlock, DirichletInitial, EtaRange, ExperimentConfig, GridBlock, InitialData, KernelBlock,
    MeshSpec, SchemaError, SolverBlock, SweepBlock, VerifyBlock,
};
pub use sweep::{sweep, sweep_csv, SweepRow};

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dirichlet::{build_basis, dirichlet_march, kaplan_lower_bound, load_basis, mittag_leffler_floor, ode_blowup_time, save_basis, DirichletConfig, SpectralBasis};
use crate::kernel::{bound_envelope, build_kernel_profile, envelope_grid, load_profile, save_profile, KernelProfile};
use crate::operators::{Field, SpaceGrid};
use crate::solver::{march, trace_csv, verdict_json, DecayTest, SolveConfig};
use crate::verify::{default_suite, roll_up, SuiteConfig};
use crate::{Error, ModelParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Kernel,
    Solve,
    Dirichlet,
    Sweep,
    Verify,
}

#[derive(Debug, Parser)]
#[command(name = "frac", about = "Space-time fractional heat kernels and semilinear mild solutions")]
pub struct Cli {
    pub mode: Mode,
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; outputs do not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug)]
pub enum CliError {
    Schema(SchemaError),
    Numeric(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numeric(e)
    }
}

impl From<SchemaError> for CliError {
    fn from(e: SchemaError) -> Self {
        CliError::Schema(e)
    }
}

/// What a run left on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// False only for a verification roll-up with a failing check.
    pub passed: bool,
    pub summary: String,
}

/// Reads, overrides and validates the config; the result is what every output embeds.
pub fn resolve(cli: &Cli) -> Result<ExperimentConfig, SchemaError> {
    let text = fs::read_to_string(&cli.config)
        .map_err(|e| SchemaError { path: "<file>".into(), message: format!("{}: {e}", cli.config.display()) })?;
    let mut cfg = parse_config(&text)?;
    cfg.validate(cli.mode)?;
    cfg.mode = Some(cli.mode);
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// Runs one mode; `jobs` sizes the worker pool.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = resolve(cli)?;
    let work = || execute(cli.mode, &cfg);
    match cli.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| CliError::Numeric(Error::Config(e.to_string())))?
            .install(work),
        None => work(),
    }
}

/// Parses `std::env::args`, runs and reports; returns the process exit code.
/// The process exit code for a finished run.
pub fn exit_code(result: &Result<Outcome, CliError>) -> i32 {
    match result {
        Ok(o) if o.passed => EXIT_OK,
        Ok(_) => EXIT_CHECKS_FAILED,
        Err(CliError::Schema(_)) => EXIT_SCHEMA,
        Err(CliError::Numeric(_)) => EXIT_NUMERIC,
    }
}

pub fn main() -> i32 {
    let cli = Cli::parse();
    let result = run(&cli);
    match &result {
        Ok(o) => println!("{}", o.summary),
        Err(CliError::Schema(e)) => eprintln!("config error at {e}"),
        Err(CliError::Numeric(e)) => eprintln!("numerical failure: {e}"),
    }
    exit_code(&result)
}

pub fn execute(mode: Mode, cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    fs::create_dir_all(&cfg.out).map_err(Error::from)?;
    let mut out = Writer { dir: cfg.out.clone(), config: serde_json::to_value(cfg).expect("config serializes"), files: Vec::new() };
    let (passed, summary) = match mode {
        Mode::Kernel => run_kernel(cfg, &mut out)?,
        Mode::Solve => run_solve(cfg, &mut out)?,
        Mode::Dirichlet => run_dirichlet(cfg, &mut out)?,
        Mode::Sweep => run_sweep(cfg, &mut out)?,
        Mode::Verify => run_verify(cfg, &mut out)?,
    };
    Ok(Outcome { files: out.files, passed, summary })
}

struct Writer {
    dir: PathBuf,
    config: Value,
    files: Vec<PathBuf>,
}

impl Writer {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// A CSV plus `<stem>.config.json` holding the resolved config.
    fn csv(&mut self, name: &str, body: &str) -> Result<(), Error> {
        let path = self.path(name);
        fs::write(&path, body)?;
        let side = path.with_extension("config.json");
        fs::write(&side, pretty(&json!({ "file": name, "config": self.config }))?)?;
        self.files.push(path);
        self.files.push(side);
        Ok(())
    }

    /// A JSON document with the resolved config under `config`.
    fn json(&mut self, name: &str, mut doc: Value) -> Result<(), Error> {
        if let Value::Object(map) = &mut doc {
            map.insert("config".into(), self.config.clone());
        }
        let path = self.path(name);
        fs::write(&path, pretty(&doc)?)?;
        self.files.push(path);
        Ok(())
    }
}

fn pretty(v: &Value) -> Result<String, Error> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn cache_name(p: &ModelParams, budget: usize) -> String {
    format!("profile_a{}_b{}_d{}_q{}.csv", p.alpha, p.beta, p.dim, budget)
}

/// Loads the profile from the cache directory when it holds one for these parameters.
pub fn kernel_profile(cfg: &ExperimentConfig) -> Result<KernelProfile, Error> {
    let k = &cfg.kernel;
    let Some(dir) = &k.cache_dir else {
        return build_kernel_profile(&cfg.params, k.quadrature_budget);
    };
    let path = dir.join(cache_name(&cfg.params, k.quadrature_budget));
    if path.exists() {
        let prof = load_profile(&path)?;
        let q = prof.params;
        if (q.alpha, q.beta, q.dim) == (cfg.params.alpha, cfg.params.beta, cfg.params.dim) {
            return Ok(prof);
        }
    }
    let prof = build_kernel_profile(&cfg.params, k.quadrature_budget)?;
    fs::create_dir_all(dir)?;
    save_profile(&prof, &path)?;
    Ok(prof)
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn run_kernel(cfg: &ExperimentConfig, out: &mut Writer) -> Result<(bool, String), Error> {
    let prof = kernel_profile(cfg)?;
    save_profile(&prof, &out.path("profile.csv"))?;
    out.files.push(out.path("profile.csv"));
    out.files.push(out.path("profile.json"));
    let mut body = String::from("t,r,G\n");
    for &t in &cfg.kernel.times {
        for &r in &cfg.kernel.radii {
            let _ = writeln!(body, "{},{},{}", num(t), num(r), num(prof.density(t, r)));
        }
    }
    out.csv("kernel_values.csv", &body)?;
    let shape = if prof.params.alpha == 2.0 { (1e-1, 2.0) } else { (1e-2, 1e2) };
    let envelope = bound_envelope(&prof, &envelope_grid((1e-2, 1e2), shape, 9, 17, true));
    let doc = json!({
        "params": prof.params,
        "total_mass": prof.total_mass(),
        "tail_constant": prof.tail_constant,
        "near_origin_model": prof.near_origin_model,
        "build": prof.info,
        "envelope": match &envelope {
            Ok(e) => json!({ "lower": e.lower, "upper": e.upper, "regime": format!("{:?}", e.regime), "points": e.points }),
            Err(e) => json!({ "error": e.to_string() }),
        },
    });
    out.json("kernel.json", doc)?;
    Ok((true, format!("kernel profile with {} points, mass {:.12}", prof.grid.len(), prof.total_mass())))
}

/// The solver config for `cfg` with initial amplitude `amplitude`.
pub(crate) fn solve_config(cfg: &ExperimentConfig, prof: &KernelProfile, params: ModelParams, amplitude: f64) -> Result<SolveConfig, Error> {
    let grid = SpaceGrid::with_spacing(cfg.grid.half_width, cfg.grid.dx)?;
    let data = cfg.initial.with_amplitude(amplitude);
    let v0 = data.field(prof, grid)?;
    let s = &cfg.solver;
    let mut sc = SolveConfig::new(params, cfg.mesh.build()?, v0);
    sc.blowup_threshold = s.blowup_threshold;
    sc.picard_tol = s.picard_tol;
    sc.picard_max_iters = s.picard_max_iters;
    sc.refine = s.refine;
    sc.nonlinear = s.nonlinear;
    sc.decay_test = s.decay_test.or(match data {
        InitialData::Kernel { gamma, amplitude } if amplitude > 0.0 => Some(DecayTest { gamma, delta: amplitude }),
        _ => None,
    });
    Ok(sc)
}

fn field_csv(f: &Field) -> String {
    let mut body = String::from("x,v\n");
    for (x, v) in f.grid.nodes().iter().zip(&f.values) {
        let _ = writeln!(body, "{},{}", num(*x), num(*v));
    }
    body
}

fn run_solve(cfg: &ExperimentConfig, out: &mut Writer) -> Result<(bool, String), Error> {
    let prof = kernel_profile(cfg)?;
    let sc = solve_config(cfg, &prof, cfg.params, cfg.initial.amplitude())?;
    let trace = march(&prof, &sc)?;
    out.csv("trace.csv", &trace_csv(&trace))?;
    out.csv("final_field.csv", &field_csv(&trace.final_field))?;
    let mut doc = verdict_json(&cfg.params, &trace);
    doc["eta_c"] = json!(cfg.params.eta_c());
    out.json("verdict.json", doc)?;
    Ok((true, format!("solve: {}", verdict_label(&trace.verdict))))
}

pub(crate) fn verdict_label(v: &crate::solver::Verdict) -> &'static str {
    match v {
        crate::solver::Verdict::Blowup { .. } => "blowup",
        crate::solver::Verdict::GlobalUpToHorizon { .. } => "global_up_to_horizon",
        crate::solver::Verdict::Unconfirmed { .. } => "unconfirmed",
    }
}

fn dirichlet_basis(cfg: &ExperimentConfig) -> Result<SpectralBasis, Error> {
    let d = &cfg.dirichlet;
    let fits = |b: &SpectralBasis| {
        b.alpha == cfg.params.alpha && b.grid.points == d.points && b.half_width() == d.half_width && b.count() >= d.modes
    };
    if let Some(path) = &d.basis_cache {
        if path.exists() {
            let b = load_basis(path)?;
            if fits(&b) {
                return Ok(b);
            }
        }
    }
    let b = build_basis(cfg.params.alpha, d.half_width, d.points, d.modes)?;
    if let Some(path) = &d.basis_cache {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        save_basis(&b, path)?;
    }
    Ok(b)
}

fn run_dirichlet(cfg: &ExperimentConfig, out: &mut Writer) -> Result<(bool, String), Error> {
    let d = &cfg.dirichlet;
    let basis = dirichlet_basis(cfg)?;
    let r = d.half_width;
    let v0 = match d.initial {
        DirichletInitial::FirstMode { k } => {
            let mut values = vec![0.0];
            values.extend(basis.modes[0].iter().map(|v| k * v.max(0.0)));
            values.push(0.0);
            Field::new(basis.grid, values, 0.0)?
        }
        DirichletInitial::Parabola { amplitude } => {
            let mut f = Field::from_fn(basis.grid, 0.0, |x| amplitude * (1.0 - (x / r).powi(2)).max(0.0))?;
            let n = f.values.len();
            f.values[0] = 0.0;
            f.values[n - 1] = 0.0;
            f
        }
    };
    let mut dc = DirichletConfig::new(basis.clone(), cfg.params, v0, d.mesh.build()?);
    dc.blowup_threshold = cfg.solver.blowup_threshold;
    dc.nonlinear = cfg.solver.nonlinear;
    dc.refine = cfg.solver.refine;
    let trace = dirichlet_march(&dc)?;
    out.csv("trace.csv", &trace_csv(&trace))?;
    out.csv("final_field.csv", &field_csv(&trace.final_field))?;

    let nu1 = basis.eigenvalues[0];
    let k0 = trace.functional[0];
    let ode = if k0 > 0.0 { ode_blowup_time(cfg.params.beta, cfg.params.eta, k0)? } else { None };
    // the comparison is checked where the trapezoid rule resolves F: t >= 1, up to the first
    // step where F grows by more than half
    let resolved = (1..trace.times.len()).find(|&i| trace.functional[i] > 1.5 * trace.functional[i - 1]).unwrap_or(trace.times.len());
    let window: Vec<usize> = (0..resolved).filter(|&i| trace.times[i] >= 1.0).collect();
    let comparison = if window.is_empty() {
        json!(null)
    } else {
        let ts: Vec<f64> = window.iter().map(|&i| trace.times[i]).collect();
        let c = mittag_leffler_floor(cfg.params.beta, nu1, &ts)?;
        let lower = kaplan_lower_bound(&basis, &cfg.params, c, &trace.times, &trace.functional);
        let worst = window.iter().map(|&i| trace.functional[i] / lower[i]).fold(f64::INFINITY, f64::min);
        json!({ "floor_constant": c, "window": [ts[0], ts[ts.len() - 1]], "min_ratio_F_to_bound": worst })
    };
    let mut doc = verdict_json(&cfg.params, &trace);
    doc["dirichlet"] = json!({
        "half_width": r,
        "nu_1": nu1,
        "modes": basis.count(),
        "approximate_basis": basis.approximate,
        "initial_functional": k0,
        "ode_blowup_time": ode,
        "comparison": comparison,
    });
    out.json("verdict.json", doc)?;
    Ok((true, format!("dirichlet: {}", verdict_label(&trace.verdict))))
}

fn run_sweep(cfg: &ExperimentConfig, out: &mut Writer) -> Result<(bool, String), Error> {
    let prof = kernel_profile(cfg)?;
    let rows = sweep(cfg, &prof)?;
    let rows_dir = out.path("rows");
    fs::create_dir_all(&rows_dir)?;
    for (i, row) in rows.iter().enumerate() {
        let name = format!("rows/row_{i:03}.json");
        out.json(&name, serde_json::to_value(row)?)?;
    }
    out.csv("summary.csv", &sweep_csv(&rows))?;
    let blowups = rows.iter().filter(|r| r.verdict == "blowup").count();
    Ok((true, format!("sweep: {} rows, {} blow-up verdicts", rows.len(), blowups)))
}

fn file_name(check: &str) -> String {
    let raw: String = check.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '_' }).collect();
    raw.split('_').filter(|s| !s.is_empty()).collect::<Vec<_>>().join("_")
}

fn run_verify(cfg: &ExperimentConfig, out: &mut Writer) -> Result<(bool, String), Error> {
    let suite = SuiteConfig {
        seed: cfg.seed,
        mc_samples: cfg.verify.mc_samples,
        quadrature_budget: cfg.kernel.quadrature_budget,
        rho: cfg.verify.rho,
    };
    let reports = default_suite(&suite)?;
    fs::create_dir_all(out.path("reports"))?;
    for r in &reports {
        out.json(&format!("reports/{}.json", file_name(&r.name)), r.to_json())?;
    }
    let passed = roll_up(&reports);
    let checks: Vec<Value> = reports.iter().map(|r| json!({ "name": r.name, "passed": r.passed })).collect();
    out.json("verify.json", json!({ "passed": passed, "checks": checks }))?;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    let summary = if passed {
        format!("verify: all {} checks passed", reports.len())
    } else {
        format!("verify: {} of {} checks failed: {}", failed.len(), reports.len(), failed.join(", "))
    };
    Ok((passed, summary))
}

/// Path of an output file relative to the output directory, for tests and examples.
pub fn output_path(cfg: &ExperimentConfig, name: &str) -> PathBuf {
    Path::new(&cfg.out).join(name)
}
