//! Surface file format.
//!
//! A surface is one JSON document:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "kind": "leps",
//!   "masses": { "m_a": 6.941, "m_b": 18.998, "m_c": 1.008 },
//!   "domain": { "x1": [-14.0, -0.3], "x2": [0.2, 9.0] },
//!   "asymptotic_radius": 8.0,
//!   "params": { ... kind-specific ... }
//! }
//! ```
//!
//! `kind` is one of `leps`, `morse-channels`, `tabulated-bicubic`. The
//! tabulated kind carries its knots inline: `params.x1_grid`,
//! `params.x2_grid`, and row-major `params.values` (length nx * ny, row j
//! holding x2_grid[j]); NaN anywhere is a schema violation. Unknown fields
//! are rejected so typos fail loudly rather than silently defaulting.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    Domain, LepsParams, MassTriple, MorseChannelsParams, PotentialSurface, SurfaceModel,
    TabulatedGrid,
};
use crate::error::{Error, Result};

pub const SURFACE_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SurfaceFile {
    schema_version: u32,
    kind: String,
    masses: MassTriple,
    domain: DomainFile,
    asymptotic_radius: f64,
    params: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainFile {
    x1: [f64; 2],
    x2: [f64; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TabulatedParams {
    x1_grid: Vec<f64>,
    x2_grid: Vec<f64>,
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x2_center: Option<f64>,
}

fn schema_err(path: &str, message: impl std::fmt::Display) -> Error {
    Error::Schema { path: path.to_string(), message: message.to_string() }
}

/// Parse a surface from JSON text. `origin` labels error messages.
pub fn surface_from_json(text: &str, origin: &str) -> Result<PotentialSurface> {
    let file: SurfaceFile =
        serde_json::from_str(text).map_err(|e| schema_err(origin, e))?;
    if file.schema_version != SURFACE_SCHEMA_VERSION {
        return Err(schema_err(
            origin,
            format!(
                "unsupported schema_version {} (expected {SURFACE_SCHEMA_VERSION})",
                file.schema_version
            ),
        ));
    }
    let model = match file.kind.as_str() {
        "leps" => {
            let p: LepsParams = serde_json::from_value(file.params)
                .map_err(|e| schema_err(origin, format!("params: {e}")))?;
            SurfaceModel::Leps(p)
        }
        "morse-channels" => {
            let p: MorseChannelsParams = serde_json::from_value(file.params)
                .map_err(|e| schema_err(origin, format!("params: {e}")))?;
            SurfaceModel::MorseChannels(p)
        }
        "tabulated-bicubic" => {
            let p: TabulatedParams = serde_json::from_value(file.params)
                .map_err(|e| schema_err(origin, format!("params: {e}")))?;
            let grid = TabulatedGrid::new(p.x1_grid, p.x2_grid, p.values, p.x2_center)
                .map_err(|e| schema_err(origin, format!("params: {e}")))?;
            SurfaceModel::Tabulated(grid)
        }
        other => {
            return Err(schema_err(origin, format!("unknown surface kind \"{other}\"")));
        }
    };
    let domain = Domain::new(file.domain.x1, file.domain.x2)
        .map_err(|e| schema_err(origin, format!("domain: {e}")))?;
    let masses = MassTriple::new(file.masses.m_a, file.masses.m_b, file.masses.m_c)
        .map_err(|e| schema_err(origin, format!("masses: {e}")))?;
    PotentialSurface::new(masses, model, domain, file.asymptotic_radius)
        .map_err(|e| schema_err(origin, e))
}

pub fn surface_to_json(surface: &PotentialSurface) -> Result<String> {
    let params = match surface.model() {
        SurfaceModel::Leps(p) => serde_json::to_value(p),
        SurfaceModel::MorseChannels(p) => serde_json::to_value(p),
        SurfaceModel::Tabulated(g) => serde_json::to_value(TabulatedParams {
            x1_grid: g.x1_grid.clone(),
            x2_grid: g.x2_grid.clone(),
            values: g.values.clone(),
            x2_center: g.x2_center,
        }),
    }
    .map_err(|e| Error::invalid(format!("serialize params: {e}")))?;
    let kind = match surface.model() {
        SurfaceModel::Leps(_) => "leps",
        SurfaceModel::MorseChannels(_) => "morse-channels",
        SurfaceModel::Tabulated(_) => "tabulated-bicubic",
    };
    let file = SurfaceFile {
        schema_version: SURFACE_SCHEMA_VERSION,
        kind: kind.to_string(),
        masses: *surface.masses(),
        domain: DomainFile { x1: surface.domain().x1, x2: surface.domain().x2 },
        asymptotic_radius: surface.geometry().r_asym,
        params,
    };
    serde_json::to_string_pretty(&file).map_err(|e| Error::invalid(format!("serialize: {e}")))
}

pub fn load_surface(path: impl AsRef<Path>) -> Result<PotentialSurface> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    surface_from_json(&text, &path.display().to_string())
}

pub fn save_surface(surface: &PotentialSurface, path: impl AsRef<Path>) -> Result<()> {
    let text = surface_to_json(surface)?;
    fs::write(path, text)?;
    Ok(())
}
