//! Dirichlet eigenpairs on `(-R, R)` and their cache files.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Error, Result};
use crate::operators::SpaceGrid;

/// Eigenpairs `(nu_n, phi_n)` on the interior nodes of `grid`, orthonormal for `dx * sum`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    pub alpha: f64,
    /// Including the two boundary nodes `x = -R, R`, where every mode vanishes.
    pub grid: SpaceGrid,
    pub eigenvalues: Vec<f64>,
    /// `modes[n][i]` is `phi_(n+1)` at interior node `i + 1`.
    pub modes: Vec<Vec<f64>>,
    /// True for `alpha < 2`, where the pairs come from a matrix discretization.
    pub approximate: bool,
}

impl SpectralBasis {
    pub fn half_width(&self) -> f64 {
        self.grid.half_width
    }

    pub fn count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn interior_points(&self) -> usize {
        self.grid.points - 2
    }

    pub fn dx(&self) -> f64 {
        self.grid.dx()
    }

    /// `dx * sum u_i v_i` over interior nodes.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.dx() * u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Modal coefficients of interior values.
    pub fn project(&self, interior: &[f64]) -> Vec<f64> {
        self.modes.iter().map(|m| self.inner(m, interior)).collect()
    }

    /// Interior values of `sum c_n phi_n`.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.interior_points()];
        for (c, m) in coeffs.iter().zip(&self.modes) {
            if *c != 0.0 {
                for (o, v) in out.iter_mut().zip(m) {
                    *o += c * v;
                }
            }
        }
        out
    }

    /// `phi_n(x)` for `n >= 1`: the sine in reference mode, linear interpolation of the nodal vector otherwise.
    pub fn mode_at(&self, n: usize, x: f64) -> f64 {
        let r = self.half_width();
        if x.abs() >= r || n == 0 || n > self.count() {
            return 0.0;
        }
        if !self.approximate {
            return sine_mode(n, r, x);
        }
        let s = (x + r) / self.dx();
        let i = s.floor() as usize;
        let w = s - i as f64;
        let node = |k: usize| if k == 0 || k > self.interior_points() { 0.0 } else { self.modes[n - 1][k - 1] };
        (1.0 - w) * node(i) + w * node(i + 1)
    }

    /// `max |<phi_m, phi_n> - delta_mn|` over the first `upto` modes.
    pub fn orthonormality_residual(&self, upto: usize) -> f64 {
        let n = upto.min(self.count());
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in a..n {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((self.inner(&self.modes[a], &self.modes[b]) - target).abs());
            }
        }
        worst
    }
}

fn sine_mode(n: usize, r: f64, x: f64) -> f64 {
    (n as f64 * PI * (x + r) / (2.0 * r)).sin() / r.sqrt()
}

/// Coefficients `g_k h^alpha` of the fractional centred difference for `(-Delta)^(alpha/2)`.
pub(crate) fn centred_difference_weights(alpha: f64, count: usize) -> Vec<f64> {
    let mut g = Vec::with_capacity(count);
    g.push((ln_gamma(alpha + 1.0) - 2.0 * ln_gamma(alpha / 2.0 + 1.0)).exp());
    for k in 0..count.saturating_sub(1) {
        let prev = g[k];
        g.push(prev * (1.0 - (alpha + 1.0) / (alpha / 2.0 + k as f64 + 1.0)));
    }
    g
}

/// First `modes` Dirichlet eigenpairs on `(-R, R)` with `grid_points` nodes counting both ends.
///
/// `alpha = 2` gives `nu_n = (n pi / 2R)^2` and sampled sines. `alpha < 2` diagonalizes the
/// Toeplitz matrix of the fractional centred difference with zero exterior.
pub fn build_basis(alpha: f64, half_width: f64, grid_points: usize, modes: usize) -> Result<SpectralBasis> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return domain(format!("alpha = {alpha} must lie in (0, 2]"));
    }
    let grid = SpaceGrid::new(half_width, grid_points)?;
    let m = grid.points - 2;
    if modes == 0 || modes > m {
        return domain(format!("need 1 <= modes <= {m} interior points, got {modes}"));
    }
    let r = half_width;
    if alpha == 2.0 {
        let eigenvalues = (1..=modes).map(|n| (n as f64 * PI / (2.0 * r)).powi(2)).collect();
        let vecs = (1..=modes).map(|n| (1..=m).map(|i| sine_mode(n, r, grid.x(i))).collect()).collect();
        return Ok(SpectralBasis { alpha, grid, eigenvalues, modes: vecs, approximate: false });
    }
    let h = grid.dx();
    let g = centred_difference_weights(alpha, m);
    let scale = h.powf(-alpha);
    let a = DMatrix::from_fn(m, m, |i, j| scale * g[i.abs_diff(j)]);
    let eig = SymmetricEigen::try_new(a, f64::EPSILON, 0).ok_or_else(|| Error::Eigen("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&p, &q| eig.eigenvalues[p].total_cmp(&eig.eigenvalues[q]));
    let mut eigenvalues = Vec::with_capacity(modes);
    let mut vecs = Vec::with_capacity(modes);
    let norm = 1.0 / h.sqrt();
    for &k in order.iter().take(modes) {
        let nu = eig.eigenvalues[k];
        if !nu.is_finite() || nu <= 0.0 || eigenvalues.last().is_some_and(|&p: &f64| nu <= p) {
            return Err(Error::Eigen(format!("eigenvalue {nu} breaks strict positivity or ordering")));
        }
        let col = eig.eigenvectors.column(k);
        let sign = if col[0] < 0.0 { -1.0 } else { 1.0 };
        vecs.push(col.iter().map(|v| sign * norm * v).collect::<Vec<f64>>());
        eigenvalues.push(nu);
    }
    Ok(SpectralBasis { alpha, grid, eigenvalues, modes: vecs, approximate: true })
}

#[derive(Serialize, Deserialize)]
struct Header {
    alpha: f64,
    grid: SpaceGrid,
    modes: usize,
    approximate: bool,
}

/// CSV `n,nu,v_1..v_M` with one row per mode, plus a JSON header next to it.
pub fn save_basis(basis: &SpectralBasis, csv: &Path) -> Result<PathBuf> {
    let mut body = String::from("n,nu");
    for i in 1..=basis.interior_points() {
        let _ = write!(body, ",v_{i}");
    }
    body.push('\n');
    for (n, (nu, m)) in basis.eigenvalues.iter().zip(&basis.modes).enumerate() {
        let _ = write!(body, "{},{nu:e}", n + 1);
        for v in m {
            let _ = write!(body, ",{v:e}");
        }
        body.push('\n');
    }
    fs::write(csv, body)?;
    let header = Header { alpha: basis.alpha, grid: basis.grid, modes: basis.count(), approximate: basis.approximate };
    let side = csv.with_extension("json");
    fs::write(&side, serde_json::to_string_pretty(&header)? + "\n")?;
    Ok(side)
}

pub fn load_basis(csv: &Path) -> Result<SpectralBasis> {
    let header: Header = serde_json::from_str(&fs::read_to_string(csv.with_extension("json"))?)?;
    let text = fs::read_to_string(csv)?;
    let m = header.grid.points - 2;
    let mut eigenvalues = Vec::new();
    let mut modes = Vec::new();
    for (row, line) in text.lines().skip(1).enumerate() {
        let cells: Vec<f64> = line
            .split(',')
            .skip(1)
            .map(|c| c.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Config(format!("{} row {}: {e}", csv.display(), row + 1)))?;
        if cells.len() != m + 1 {
            return Err(Error::Config(format!("{} row {}: expected {} values", csv.display(), row + 1, m + 1)));
        }
        eigenvalues.push(cells[0]);
        modes.push(cells[1..].to_vec());
    }
    if modes.len() != header.modes {
        return Err(Error::Config(format!("{}: header promises {} modes, found {}", csv.display(), header.modes, modes.len())));
    }
    Ok(SpectralBasis { alpha: header.alpha, grid: header.grid, eigenvalues, modes, approximate: header.approximate })
}
