//! Run configuration: plain-text `key = value` files with `[section]`
//! headers, overridden by command-line flags. Unknown keys are rejected
//! before any computation starts.

use crate::bundle::DiracBundleSpec;
use crate::error::{DiracError, Result};
use crate::geometry::{make_geometry, GeometryKind};
use crate::operators::BoundaryCondition;
use std::collections::BTreeMap;

#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    /// section-qualified key -> value, e.g. "geometry.kind" -> "disk"
    pub entries: BTreeMap<String, String>,
}

const KNOWN_KEYS: &[&str] = &[
    "geometry.kind",
    "geometry.l1",
    "geometry.l2",
    "geometry.spin",
    "geometry.radius",
    "geometry.r_in",
    "geometry.r_out",
    "geometry.length",
    "geometry.circumference",
    "geometry.n",
    "bundle.twist",
    "bc.kind",
    "bc.b",
    "bc.sign",
    "solver.resolution",
    "solver.modes",
    "solver.k",
    "solver.tol",
    "solver.seed",
    "solver.sigma",
    "solver.gamma",
    "solver.instances",
    "output.path",
    "output.format",
];

impl RawConfig {
    pub fn parse_file(path: &str) -> Result<RawConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| DiracError::config(format!("cannot read {path}: {e}")))?;
        Self::parse_str(&text)
    }

    pub fn parse_str(text: &str) -> Result<RawConfig> {
        let mut section = String::new();
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') {
                    return Err(DiracError::config(format!(
                        "line {}: malformed section header `{raw}`",
                        lineno + 1
                    )));
                }
                section = line[1..line.len() - 1].trim().to_string();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(DiracError::config(format!(
                    "line {}: expected `key = value`, got `{raw}`",
                    lineno + 1
                )));
            };
            let key = if section.is_empty() {
                key.trim().to_string()
            } else {
                format!("{section}.{}", key.trim())
            };
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(DiracError::config(format!("line {}: unknown key `{key}`", lineno + 1)));
            }
            entries.insert(key, value.trim().to_string());
        }
        Ok(RawConfig { entries })
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    fn parse_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| DiracError::config(format!("{key}: `{v}` is not a number"))),
        }
    }

    fn parse_usize(&self, key: &str) -> Result<Option<usize>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<usize>()
                .map(Some)
                .map_err(|_| DiracError::config(format!("{key}: `{v}` is not a nonnegative integer"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub bundle: DiracBundleSpec,
    pub bc: Option<BoundaryCondition>,
    pub resolution: usize,
    pub modes: usize,
    pub k: usize,
    pub tol: f64,
    pub seed: u64,
    pub sigma: f64,
    pub gamma: Option<f64>,
    pub instances: usize,
    pub out: Option<String>,
    pub format: OutputFormat,
    /// echo of every configured key for the report header
    pub echo: BTreeMap<String, String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

pub fn build_config(raw: &RawConfig) -> Result<RunConfig> {
    let kind = raw.get("geometry.kind").unwrap_or("torus").to_lowercase();
    let geometry = match kind.as_str() {
        "torus" => {
            let l1 = raw.parse_f64("geometry.l1")?.unwrap_or(1.0);
            let l2 = raw.parse_f64("geometry.l2")?.unwrap_or(1.0);
            let spin = parse_spin2(raw.get("geometry.spin").unwrap_or("0,0"))?;
            make_geometry(GeometryKind::FlatTorus2 { l1, l2, spin })?
        }
        "sphere" => {
            let n = raw.parse_usize("geometry.n")?.unwrap_or(2);
            let radius = raw.parse_f64("geometry.radius")?.unwrap_or(1.0);
            make_geometry(GeometryKind::RoundSphere { n, radius })?
        }
        "disk" => {
            let radius = raw.parse_f64("geometry.radius")?.unwrap_or(1.0);
            make_geometry(GeometryKind::UnitDisk { radius })?
        }
        "annulus" => {
            let r_in = raw.parse_f64("geometry.r_in")?.unwrap_or(0.5);
            let r_out = raw.parse_f64("geometry.r_out")?.unwrap_or(1.0);
            make_geometry(GeometryKind::Annulus { r_in, r_out })?
        }
        "cylinder" => {
            let length = raw.parse_f64("geometry.length")?.unwrap_or(1.0);
            let circumference = raw.parse_f64("geometry.circumference")?.unwrap_or(1.0);
            let spin = parse_spin1(raw.get("geometry.spin").unwrap_or("0"))?;
            make_geometry(GeometryKind::Cylinder { length, circumference, spin })?
        }
        other => return Err(DiracError::config(format!("unknown geometry kind `{other}`"))),
    };
    let twist = raw.parse_f64("bundle.twist")?.unwrap_or(0.0);
    let bundle = DiracBundleSpec::twisted(geometry, twist)
        .map_err(|e| DiracError::config(e.to_string()))?;

    let bc = match raw.get("bc.kind") {
        None | Some("none") => None,
        Some(kind) => {
            let b = raw.parse_f64("bc.b")?.unwrap_or(0.0);
            let sign = match raw.get("bc.sign").unwrap_or("+1") {
                "+1" | "1" | "+" => 1i8,
                "-1" | "-" => -1i8,
                other => {
                    return Err(DiracError::config(format!("bc.sign: `{other}` must be +1 or -1")))
                }
            };
            Some(match kind.to_lowercase().as_str() {
                "mit" => BoundaryCondition::MitBag { sign },
                "local" => BoundaryCondition::LocalChirality { sign },
                "aps" => BoundaryCondition::Aps { b },
                "maps" => BoundaryCondition::ModifiedAps { b, sign },
                other => {
                    return Err(DiracError::config(format!("unknown boundary condition `{other}`")))
                }
            })
        }
    };

    let format = match raw.get("output.format").unwrap_or("json") {
        "json" => OutputFormat::Json,
        "csv" => OutputFormat::Csv,
        other => return Err(DiracError::config(format!("unknown output format `{other}`"))),
    };

    Ok(RunConfig {
        bundle,
        bc,
        resolution: raw.parse_usize("solver.resolution")?.unwrap_or(256),
        modes: raw.parse_usize("solver.modes")?.unwrap_or(48),
        k: raw.parse_usize("solver.k")?.unwrap_or(6),
        tol: raw.parse_f64("solver.tol")?.unwrap_or(1e-10),
        seed: raw.parse_usize("solver.seed")?.unwrap_or(7) as u64,
        sigma: raw.parse_f64("solver.sigma")?.unwrap_or(2.0),
        gamma: raw.parse_f64("solver.gamma")?,
        instances: raw.parse_usize("solver.instances")?.unwrap_or(100),
        out: raw.get("output.path").map(|s| s.to_string()),
        format,
        echo: raw.entries.clone(),
    })
}

fn parse_spin2(text: &str) -> Result<[u8; 2]> {
    let parts: Vec<&str> = text.split(',').map(|s| s.trim()).collect();
    if parts.len() != 2 {
        return Err(DiracError::config(format!("spin `{text}` must be two comma-separated bits")));
    }
    let mut out = [0u8; 2];
    for (i, p) in parts.iter().enumerate() {
        out[i] = match *p {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(DiracError::config(format!("spin component `{other}` must be 0 or 1")))
            }
        };
    }
    Ok(out)
}

fn parse_spin1(text: &str) -> Result<u8> {
    match text.trim() {
        "0" => Ok(0),
        "1" => Ok(1),
        other => Err(DiracError::config(format!("spin `{other}` must be 0 or 1"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_rejects_unknown_keys() {
        let text = "\n[geometry]\nkind = disk\nradius = 2.0\n[bc]\nkind = local\nsign = -1\n";
        let raw = RawConfig::parse_str(text).unwrap();
        let cfg = build_config(&raw).unwrap();
        assert_eq!(cfg.bundle.geometry.kind, GeometryKind::UnitDisk { radius: 2.0 });
        assert_eq!(cfg.bc, Some(BoundaryCondition::LocalChirality { sign: -1 }));

        assert!(RawConfig::parse_str("[geometry]\nbogus = 1\n").is_err());
        assert!(RawConfig::parse_str("key value\n").is_err());
    }

    #[test]
    fn invalid_spin_is_a_config_error() {
        let text = "[geometry]\nkind = torus\nspin = 2,0\n";
        let raw = RawConfig::parse_str(text).unwrap();
        assert!(build_config(&raw).is_err());
    }

    #[test]
    fn flags_override_file_values() {
        let mut raw = RawConfig::parse_str("[solver]\nk = 4\n").unwrap();
        raw.set("solver.k", 9);
        let cfg = build_config(&raw).unwrap();
        assert_eq!(cfg.k, 9);
    }
}
