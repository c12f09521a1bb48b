use crate::error::{domain, Error, Result};
use crate::kernel::KernelProfile;
use crate::operators::{Field, LinearFlow};

/// `sup_x V(t, x) / G(t + gamma, x)` over the grid nodes.
pub fn weighted_ratio(profile: &KernelProfile, field: &Field, gamma: f64) -> f64 {
    let t = field.time + gamma;
    field
        .grid
        .nodes()
        .iter()
        .zip(&field.values)
        .map(|(x, v)| v / profile.density(t, x.abs()))
        .fold(0.0, f64::max)
}

/// `F(t) = t^(beta d/alpha) inf_{|x| <= t^(beta/alpha)} V(t, x)`; the centre node is always included.
pub fn parabolic_infimum(profile: &KernelProfile, field: &Field) -> f64 {
    let p = &profile.params;
    let t = field.time;
    let radius = t.powf(p.spread_exponent());
    let grid = field.grid;
    let inf = grid
        .nodes()
        .iter()
        .zip(&field.values)
        .filter(|(x, _)| x.abs() <= radius)
        .map(|(_, v)| *v)
        .fold(field.values[grid.center()], f64::min);
    t.powf(p.decay_exponent()) * inf
}

/// Least-squares slope `a` of `-ln sup_x G(t) * V0` against `ln t` over `times`.
pub fn estimate_eta_star_with(profile: &KernelProfile, v0: &Field, times: &[f64]) -> Result<f64> {
    if times.len() < 10 {
        return Err(Error::DegenerateFit(format!("{} sample times, need at least 10", times.len())));
    }
    if v0.values.iter().all(|&v| v == 0.0) {
        return domain("initial data must be nonzero");
    }
    let flow = LinearFlow::new(profile, v0)?;
    let mut xs = Vec::with_capacity(times.len());
    let mut ys = Vec::with_capacity(times.len());
    for &t in times {
        xs.push(t.ln());
        ys.push(-flow.at(t)?.field.sup().ln());
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateFit("sample times coincide".into()));
    }
    Ok(xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / sxx)
}

/// Sup-norm decay exponent of the linear flow over 21 log-spaced times in `[10, 1000]`.
pub fn estimate_eta_star(profile: &KernelProfile, v0: &Field) -> Result<f64> {
    let times: Vec<f64> = (0..21).map(|i| 10f64.powf(1.0 + i as f64 / 10.0)).collect();
    estimate_eta_star_with(profile, v0, &times)
}
