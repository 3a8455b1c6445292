//! Instance input: a strict JSON file schema or inline flags.

use std::path::PathBuf;

use clap::Args;
use nalgebra::{Matrix3, Vector3};
use serde::Deserialize;

use dubins_sphere::geometry::{Configuration, TurnRadius};

use crate::CliError;

/// Normalization window for targets read from instance files.
const FILE_NORM_WINDOW: f64 = 1e-6;
/// Looser window for inline `--target` flags, which are commonly typed with
/// few decimals.
const FLAG_NORM_WINDOW: f64 = 1e-3;

/// A fully resolved problem instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub r: TurnRadius,
    pub target: Vector3<f64>,
    pub r0: Configuration,
    pub options: InstanceOptions,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceOptions {
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub grid_step: Option<f64>,
    #[serde(default)]
    pub max_segments: Option<usize>,
}

/// On-disk instance schema, version 1. Unknown fields are rejected.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    format: u32,
    r: f64,
    target: [f64; 3],
    #[serde(default)]
    r0: Option<[[f64; 3]; 3]>,
    #[serde(default)]
    options: Option<InstanceOptions>,
}

/// Instance source: a JSON file or inline flags (mutually exclusive).
#[derive(Args, Debug, Clone)]
pub struct InstanceArgs {
    /// Instance file (JSON, format 1).
    pub instance: Option<PathBuf>,
    /// Turn radius r in (0, 1/2] for planning.
    #[arg(long = "r")]
    pub r: Option<f64>,
    /// Target location, three comma-separated coordinates.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub target: Option<[f64; 3]>,
    /// Start pose, nine comma-separated entries row-major (default identity).
    #[arg(long, value_parser = parse_mat3, allow_hyphen_values = true)]
    pub r0: Option<[f64; 9]>,
}

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected 3 comma-separated values, got {}", parts.len()));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad coordinate {part:?}: {e}"))?;
    }
    Ok(out)
}

fn parse_mat3(s: &str) -> Result<[f64; 9], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 9 {
        return Err(format!(
            "expected 9 comma-separated row-major entries, got {}",
            parts.len()
        ));
    }
    let mut out = [0.0; 9];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad entry {part:?}: {e}"))?;
    }
    Ok(out)
}

fn normalize_target(raw: Vector3<f64>, window: f64, origin: &str) -> Result<Vector3<f64>, CliError> {
    let norm = raw.norm();
    if (norm - 1.0).abs() > window {
        return Err(CliError::Input(format!(
            "target from {origin} must be a unit vector within {window:e}: |target| = {norm}"
        )));
    }
    Ok(raw / norm)
}

fn build_r0(rows: Option<[[f64; 3]; 3]>) -> Result<Configuration, CliError> {
    match rows {
        None => Ok(Configuration::identity()),
        Some(rows) => {
            let m = Matrix3::new(
                rows[0][0], rows[0][1], rows[0][2], rows[1][0], rows[1][1], rows[1][2],
                rows[2][0], rows[2][1], rows[2][2],
            );
            Configuration::new(m).map_err(|e| CliError::Input(format!("invalid r0: {e}")))
        }
    }
}

impl InstanceArgs {
    pub fn resolve(&self) -> Result<Instance, CliError> {
        match (&self.instance, self.r, self.target) {
            (Some(path), None, None) => {
                if self.r0.is_some() {
                    return Err(CliError::Input(
                        "give either an instance file or inline flags, not both".into(),
                    ));
                }
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Input(format!("cannot read {}: {e}", path.display()))
                })?;
                let file: InstanceFile = serde_json::from_str(&text)
                    .map_err(|e| CliError::Input(format!("invalid instance file: {e}")))?;
                if file.format != 1 {
                    return Err(CliError::Input(format!(
                        "unsupported instance format {} (expected 1)",
                        file.format
                    )));
                }
                let target = normalize_target(
                    Vector3::new(file.target[0], file.target[1], file.target[2]),
                    FILE_NORM_WINDOW,
                    "the instance file",
                )?;
                Ok(Instance {
                    r: parse_radius(file.r)?,
                    target,
                    r0: build_r0(file.r0)?,
                    options: file.options.unwrap_or_default(),
                })
            }
            (None, Some(r), Some(target)) => {
                let target = normalize_target(
                    Vector3::new(target[0], target[1], target[2]),
                    FLAG_NORM_WINDOW,
                    "--target",
                )?;
                let rows = self.r0.map(|m| {
                    [
                        [m[0], m[1], m[2]],
                        [m[3], m[4], m[5]],
                        [m[6], m[7], m[8]],
                    ]
                });
                Ok(Instance {
                    r: parse_radius(r)?,
                    target,
                    r0: build_r0(rows)?,
                    options: InstanceOptions::default(),
                })
            }
            (None, _, _) => Err(CliError::Input(
                "missing instance: give an instance file or both --r and --target".into(),
            )),
            (Some(_), _, _) => Err(CliError::Input(
                "give either an instance file or inline flags, not both".into(),
            )),
        }
    }
}

fn parse_radius(r: f64) -> Result<TurnRadius, CliError> {
    if r > 0.5 {
        // Name the planner's gate here so the message is actionable before
        // the library sees the value.
        return Err(CliError::Input(format!(
            "r must be <= 0.5 (candidate set is proven for r <= 1/2): got {r}"
        )));
    }
    TurnRadius::new(r).map_err(|e| CliError::Input(e.to_string()))
}
