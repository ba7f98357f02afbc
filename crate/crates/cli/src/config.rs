//! Sweep configuration: presets, JSON files and flag overrides.

use std::path::Path;

use lidstone_fem::assembly::StageTwoLoad;
use lidstone_fem::experiments::{doubling, Measurement, Source, SweepConfig};
use lidstone_fem::mesh::MeshKind;
use serde::Deserialize;

use crate::error::{CliError, Result};
use crate::parse;

pub const PRESETS: [&str; 7] = [
    "table1",
    "table2",
    "table3",
    "table4",
    "table5",
    "table6",
    "epsilon-one",
];

const SMALL_EPS: [f64; 3] = [1e-10, 1e-8, 1e-6];
const LARGE_EPS: [f64; 3] = [1e-4, 1e-2, 1.0];

/// Settings that may come from a preset, a file or flags. Later layers
/// replace only the fields they set.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepLayer {
    pub epsilons: Option<Vec<f64>>,
    pub n_values: Option<Vec<usize>>,
    pub mesh_kinds: Option<Vec<String>>,
    pub sigma: Option<f64>,
    pub alpha: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub f_poly: Option<[f64; 3]>,
    pub measurement: Option<String>,
    pub stage_two_load: Option<String>,
    pub repetitions: Option<usize>,
    pub assumption_constant: Option<f64>,
    pub jobs: Option<usize>,
}

impl SweepLayer {
    pub fn merge(self, over: SweepLayer) -> SweepLayer {
        SweepLayer {
            epsilons: over.epsilons.or(self.epsilons),
            n_values: over.n_values.or(self.n_values),
            mesh_kinds: over.mesh_kinds.or(self.mesh_kinds),
            sigma: over.sigma.or(self.sigma),
            alpha: over.alpha.or(self.alpha),
            a: over.a.or(self.a),
            b: over.b.or(self.b),
            f_poly: over.f_poly.or(self.f_poly),
            measurement: over.measurement.or(self.measurement),
            stage_two_load: over.stage_two_load.or(self.stage_two_load),
            repetitions: over.repetitions.or(self.repetitions),
            assumption_constant: over.assumption_constant.or(self.assumption_constant),
            jobs: over.jobs.or(self.jobs),
        }
    }

    /// Fills unset fields from the library defaults.
    pub fn resolve(self, default_jobs: usize) -> Result<SweepConfig> {
        let base = SweepConfig::default();
        let n_values = self.n_values.unwrap_or_default();
        if n_values.is_empty() {
            return Err(CliError::flag(
                "--n",
                "at least one N is required (use --n, --preset or n_values in --config)",
            ));
        }
        let mesh_kinds = match self.mesh_kinds {
            Some(names) => names
                .iter()
                .map(|s| s.parse::<MeshKind>())
                .collect::<lidstone_fem::Result<Vec<_>>>()
                .map_err(crate::error::with_flag)?,
            None => base.mesh_kinds.clone(),
        };
        let measurement = match self.measurement {
            Some(s) => parse::measurement(&s).map_err(|r| CliError::flag("--measurement", r))?,
            None => Measurement::default(),
        };
        let stage_two_load = match self.stage_two_load {
            Some(s) => s
                .parse::<StageTwoLoad>()
                .map_err(|_| CliError::flag("--load", format!("unknown load rule `{s}`")))?,
            None => StageTwoLoad::default(),
        };
        Ok(SweepConfig {
            epsilons: self.epsilons.unwrap_or_default(),
            n_values,
            mesh_kinds,
            sigma: self.sigma.unwrap_or(base.sigma),
            alpha: self.alpha.unwrap_or(base.alpha),
            a: self.a.unwrap_or(base.a),
            b: self.b.unwrap_or(base.b),
            source: self.f_poly.map_or(Source::Model, Source::Polynomial),
            measurement,
            stage_two_load,
            repetitions: self.repetitions.unwrap_or(base.repetitions),
            assumption_constant: self.assumption_constant.unwrap_or(base.assumption_constant),
            jobs: self.jobs.unwrap_or(default_jobs),
        })
    }
}

pub fn preset(name: &str) -> Result<SweepLayer> {
    let both = Some(vec!["uniform".to_string(), "shishkin".to_string()]);
    let layer = |eps: &[f64], ns: Vec<usize>| SweepLayer {
        epsilons: Some(eps.to_vec()),
        n_values: Some(ns),
        mesh_kinds: both.clone(),
        ..SweepLayer::default()
    };
    Ok(match name {
        "table1" | "table3" => layer(&SMALL_EPS, doubling(4, 8192)),
        "table2" | "table4" => layer(&LARGE_EPS, doubling(4, 8192)),
        // Runtime tables: sequential so cells do not compete for cores.
        "table5" => SweepLayer {
            jobs: Some(1),
            ..layer(&SMALL_EPS, doubling(512, 16384))
        },
        "table6" => SweepLayer {
            jobs: Some(1),
            ..layer(&LARGE_EPS, doubling(512, 16384))
        },
        "epsilon-one" => SweepLayer {
            mesh_kinds: Some(vec!["uniform".to_string()]),
            ..layer(&[1.0], doubling(4, 8192))
        },
        other => {
            return Err(CliError::flag(
                "--preset",
                format!("unknown preset `{other}` (known: {})", PRESETS.join(", ")),
            ))
        }
    })
}

pub fn parse_config(text: &str, path: &str) -> Result<SweepLayer> {
    let layer: SweepLayer = serde_json::from_str(text).map_err(|e| CliError::Config {
        path: path.to_string(),
        message: format!("line {} column {}: {e}", e.line(), e.column()),
    })?;
    if layer.n_values.as_ref().is_some_and(Vec::is_empty) {
        return Err(CliError::Config {
            path: path.to_string(),
            message: "field `n_values`: list is empty".to_string(),
        });
    }
    if layer.epsilons.as_ref().is_some_and(Vec::is_empty) {
        return Err(CliError::Config {
            path: path.to_string(),
            message: "field `epsilons`: list is empty".to_string(),
        });
    }
    Ok(layer)
}

pub fn load_config(path: &Path) -> Result<SweepLayer> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("reading config {shown}"), e))?;
    parse_config(&text, &shown)
}
