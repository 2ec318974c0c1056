//! Run configuration.
//!
//! Files are TOML with dotted keys, e.g. `meshify.voxel_size = 0.05`. Any key
//! left out keeps its default; unknown keys are rejected. The canonical form
//! lists every key in sorted order and its SHA-256 is the config hash that
//! plans carry.

use crate::meshify::MeshifyParams;
use crate::solver::{SolverParams, WeightMode, DEFAULT_DENSITY_RADIUS};
use crate::visibility::{AerialParams, GroundParams, SensorSet};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("config value out of range: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateConfig {
    pub sample_spacing: f64,
    pub ground_grid_spacing: f64,
    pub ground_mount_height: f64,
    pub ground_clearance_radius: f64,
    pub ground_max_step: f64,
    pub aerial_lattice_spacing: f64,
    pub aerial_standoff: f64,
    pub aerial_alt_min: f64,
    pub aerial_alt_max: f64,
}

impl Default for CandidateConfig {
    fn default() -> Self {
        let g = GroundParams::default();
        let a = AerialParams::default();
        CandidateConfig {
            sample_spacing: 0.25,
            ground_grid_spacing: g.grid_spacing,
            ground_mount_height: g.mount_height,
            ground_clearance_radius: g.clearance_radius,
            ground_max_step: g.max_step,
            aerial_lattice_spacing: a.lattice_spacing,
            aerial_standoff: a.standoff,
            aerial_alt_min: a.min_altitude,
            aerial_alt_max: a.max_altitude,
        }
    }
}

impl CandidateConfig {
    pub fn ground(&self) -> GroundParams {
        GroundParams {
            grid_spacing: self.ground_grid_spacing,
            mount_height: self.ground_mount_height,
            clearance_radius: self.ground_clearance_radius,
            max_step: self.ground_max_step,
        }
    }

    pub fn aerial(&self) -> AerialParams {
        AerialParams {
            lattice_spacing: self.aerial_lattice_spacing,
            standoff: self.aerial_standoff,
            min_altitude: self.aerial_alt_min,
            max_altitude: self.aerial_alt_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub target_coverage: f64,
    pub min_gain: f64,
    pub max_views: usize,
    pub weight_mode: WeightMode,
    /// Prior point density (points per m²) at which a sample's weight halves.
    pub rho_ref: f64,
    pub density_radius: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let p = SolverParams::default();
        SolverConfig {
            target_coverage: p.target_coverage,
            min_gain: p.min_gain,
            max_views: p.max_views,
            weight_mode: WeightMode::Uniform,
            rho_ref: 100.0,
            density_radius: DEFAULT_DENSITY_RADIUS,
        }
    }
}

impl SolverConfig {
    pub fn params(&self) -> SolverParams {
        SolverParams {
            target_coverage: self.target_coverage,
            min_gain: self.min_gain,
            max_views: self.max_views,
        }
    }
}

/// Coarse survey settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub coarse_angular_resolution: f64,
    pub coarse_range_noise_sigma: f64,
    pub pose_jitter_sigma: f64,
    /// The walk-through uses the ground grid at this multiple of its spacing.
    pub coarse_decimation: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            coarse_angular_resolution: 2.0,
            coarse_range_noise_sigma: 0.03,
            pose_jitter_sigma: 0.05,
            coarse_decimation: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub epsilon_stop: f64,
    pub max_iterations: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            epsilon_stop: 0.005,
            max_iterations: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub meshify: MeshifyParams,
    pub candidates: CandidateConfig,
    pub sensors: SensorSet,
    pub solver: SolverConfig,
    pub sim: SimConfig,
    pub pipeline: PipelineConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            meshify: MeshifyParams::default(),
            candidates: CandidateConfig::default(),
            sensors: SensorSet::default(),
            solver: SolverConfig::default(),
            sim: SimConfig::default(),
            pipeline: PipelineConfig::default(),
        }
    }
}

fn merge(base: &mut toml::Value, over: toml::Value) {
    match (base, over) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_table() && v.is_table() => merge(slot, v),
                    Some(slot) => *slot = v,
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

fn flatten(prefix: &str, v: &toml::Value, out: &mut Vec<(String, String)>) {
    match v {
        toml::Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn int_to_float(v: &mut toml::Value, defaults: &toml::Value) {
    match (v, defaults) {
        (toml::Value::Table(t), toml::Value::Table(d)) => {
            for (k, v) in t.iter_mut() {
                if let Some(dv) = d.get(k) {
                    int_to_float(v, dv);
                }
            }
        }
        (v @ toml::Value::Integer(_), toml::Value::Float(_)) => {
            let i = v.as_integer().unwrap();
            *v = toml::Value::Float(i as f64);
        }
        _ => {}
    }
}

impl RunConfig {
    /// Parses config text over the defaults, then validates ranges.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let mut over: toml::Value =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let mut base =
            toml::Value::try_from(RunConfig::default()).map_err(|e| ConfigError::Parse(e.to_string()))?;
        // Let `voxel_size = 1` stand for a float.
        int_to_float(&mut over, &base);
        merge(&mut base, over);
        let cfg: RunConfig = base.try_into().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// Every key as `dotted.key = value`, one per line, sorted by key.
    pub fn canonical_text(&self) -> String {
        let v = toml::Value::try_from(self).expect("config serializes");
        let mut lines = Vec::new();
        flatten("", &v, &mut lines);
        lines.sort();
        lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Hex SHA-256 of the canonical text.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_text().as_bytes()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        let m = &self.meshify;
        if !(m.voxel_size > 0.0) || !(m.truncation > 0.0) || m.normal_k < 3 || !(m.min_component_area >= 0.0) {
            return bad(format!("meshify: {m:?}"));
        }
        let c = &self.candidates;
        if !(c.sample_spacing > 0.0)
            || !(c.ground_grid_spacing > 0.0)
            || !(c.ground_mount_height > 0.0)
            || !(c.ground_clearance_radius >= 0.0)
            || !(c.ground_max_step >= 0.0)
            || !(c.aerial_lattice_spacing > 0.0)
            || !(c.aerial_standoff > 0.0)
            || !(c.aerial_alt_min < c.aerial_alt_max)
        {
            return bad(format!("candidates: {c:?}"));
        }
        self.sensors.ground.validate().or_else(|e| bad(format!("sensors.ground: {e}")))?;
        self.sensors.aerial.validate().or_else(|e| bad(format!("sensors.aerial: {e}")))?;
        let s = &self.solver;
        s.params().validate().or_else(|e| bad(format!("solver: {e}")))?;
        if !(s.rho_ref > 0.0) || !(s.density_radius > 0.0) {
            return bad(format!("solver: {s:?}"));
        }
        let sim = &self.sim;
        if !(sim.coarse_angular_resolution > 0.0)
            || !(sim.coarse_range_noise_sigma >= 0.0)
            || !(sim.pose_jitter_sigma >= 0.0)
            || sim.coarse_decimation == 0
        {
            return bad(format!("sim: {sim:?}"));
        }
        let p = &self.pipeline;
        if !(p.epsilon_stop >= 0.0) || p.max_iterations == 0 {
            return bad(format!("pipeline: {p:?}"));
        }
        Ok(())
    }
}
