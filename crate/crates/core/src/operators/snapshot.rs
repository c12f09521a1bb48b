//! Field snapshots: `x,value` CSV plus a JSON sidecar with time, params and grid.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Field, SpaceGrid};
use crate::error::{Error, Result};
use crate::params::ModelParams;

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    t: f64,
    params: ModelParams,
    grid: SpaceGrid,
}

pub fn save_field(field: &Field, params: &ModelParams, csv: &Path) -> Result<()> {
    let mut body = String::from("x,value\n");
    for (x, v) in field.grid.nodes().iter().zip(&field.values) {
        let _ = writeln!(body, "{x:e},{v:e}");
    }
    fs::write(csv, body)?;
    let side = Sidecar { t: field.time, params: *params, grid: field.grid };
    fs::write(csv.with_extension("json"), serde_json::to_string_pretty(&side)? + "\n")?;
    Ok(())
}

pub fn load_field(csv: &Path) -> Result<(Field, ModelParams)> {
    let side: Sidecar = serde_json::from_str(&fs::read_to_string(csv.with_extension("json"))?)?;
    let text = fs::read_to_string(csv)?;
    let mut values = Vec::with_capacity(side.grid.points);
    for (i, line) in text.lines().skip(1).enumerate() {
        let v = line
            .split(',')
            .nth(1)
            .and_then(|c| c.parse::<f64>().ok())
            .ok_or_else(|| Error::Config(format!("{} row {}: expected x,value", csv.display(), i + 1)))?;
        values.push(v);
    }
    Ok((Field::new(side.grid, values, side.t)?, side.params))
}
