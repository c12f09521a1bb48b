//! Profile cache: `z,phi,dphi_dz` CSV plus a JSON sidecar with the same stem.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{BuildInfo, KernelProfile, NearOriginModel};
use crate::error::{Error, Result};
use crate::params::ModelParams;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    params: ModelParams,
    tail_constant: f64,
    near_origin_model: NearOriginModel,
    points: usize,
    z_min: f64,
    z_max: f64,
    build: BuildInfo,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Writes the CSV at `csv` and the header next to it; returns the header path.
pub fn save_profile(profile: &KernelProfile, csv: &Path) -> Result<PathBuf> {
    let mut body = String::from("z,phi,dphi_dz\n");
    for ((z, v), d) in profile.grid.iter().zip(&profile.values).zip(&profile.derivatives) {
        let _ = writeln!(body, "{z:e},{v:e},{d:e}");
    }
    fs::write(csv, body)?;
    let header = Header {
        params: profile.params,
        tail_constant: profile.tail_constant,
        near_origin_model: profile.near_origin_model,
        points: profile.grid.len(),
        z_min: profile.z_min(),
        z_max: profile.z_max(),
        build: profile.info,
    };
    let json = sidecar_path(csv);
    fs::write(&json, serde_json::to_string_pretty(&header)? + "\n")?;
    Ok(json)
}

pub fn load_profile(csv: &Path) -> Result<KernelProfile> {
    let header: Header = serde_json::from_str(&fs::read_to_string(sidecar_path(csv))?)?;
    let text = fs::read_to_string(csv)?;
    let mut lines = text.lines();
    if lines.next() != Some("z,phi,dphi_dz") {
        return Err(Error::Config(format!("{}: expected header z,phi,dphi_dz", csv.display())));
    }
    let (mut grid, mut values, mut derivatives) = (Vec::new(), Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Config(format!("{} row {}: {e}", csv.display(), i + 1)))?;
        if cols.len() != 3 {
            return Err(Error::Config(format!("{} row {}: expected 3 columns", csv.display(), i + 1)));
        }
        grid.push(cols[0]);
        values.push(cols[1]);
        derivatives.push(cols[2]);
    }
    if grid.len() != header.points {
        return Err(Error::Config(format!("{}: header says {} rows, found {}", csv.display(), header.points, grid.len())));
    }
    KernelProfile::assemble(header.params, grid, values, derivatives, header.near_origin_model, header.build)
}
