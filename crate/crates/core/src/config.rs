//! Pipeline configuration (TOML).
//!
//! Every field has a default, so a config file only lists what it changes.
//! The defaults describe the full-size scenario: a 20 km square, 10 m/s
//! north-easterly wind, a 146 MHz transmitter, three UAVs flying at
//! 100 m/s. [`PipelineConfig::desk_scale`] shrinks it tenfold for quick runs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Polygon, Rect};
use crate::gp::GpHyperparams;
use crate::mission::MissionParams;
use crate::placement::{FitThresholds, Leveling, PlacementOptions};
use crate::planner::DEFAULT_GAMMA;
use crate::routing::GaParams;
use crate::scenario::{Region, RfSource, WindSpec};

/// Linear scale factor applied by [`PipelineConfig::desk_scale`].
pub const DESK_SCALE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Seeds {
    pub placement: u64,
    pub planner: u64,
    pub routing: u64,
    pub mission: u64,
}

impl Default for Seeds {
    fn default() -> Self {
        Self::from_master(42)
    }
}

impl Seeds {
    /// Per-stage seeds derived from one number.
    pub fn from_master(seed: u64) -> Self {
        Self {
            placement: seed,
            planner: seed.wrapping_add(1),
            routing: seed.wrapping_add(2),
            mission: seed.wrapping_add(3),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub region: Region,
    pub wind: WindSpec,
    /// Lattice spacing of the wind and shadowing fields (m).
    pub field_spacing: f64,
    pub source: RfSource,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            region: Region {
                bounds: Rect { min: Point::new(0.0, 0.0), max: Point::new(20_000.0, 20_000.0) },
                obstacles: vec![],
            },
            wind: WindSpec::Uniform { speed: 10.0, from_deg: 45.0 },
            field_spacing: 500.0,
            source: RfSource {
                position: Point::new(12_000.0, 9_000.0),
                tx_power_dbm: 40.0,
                frequency_hz: 146e6,
                gain_tx_dbi: 6.0,
                gain_rx_dbi: 2.0,
                shadowing_sigma_db: 6.0,
                shadowing_length_m: 2_000.0,
                seed: 7,
            },
        }
    }
}

/// Sensor hyperparameters (isotropic squared-exponential kernel).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensorConfig {
    pub sigma_f: f64,
    pub sigma_n: f64,
    pub length_scale: f64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self { sigma_f: 30.0, sigma_n: 1.0, length_scale: 4_000.0 }
    }
}

impl SensorConfig {
    pub fn hyper(&self) -> GpHyperparams {
        GpHyperparams::isotropic(self.sigma_f, self.sigma_n, self.length_scale)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlacementConfig {
    pub n_tasks: usize,
    pub grid_spacing: f64,
    pub leveling: Leveling,
    pub options: PlacementOptions,
    pub thresholds: FitThresholds,
}

impl Default for PlacementConfig {
    fn default() -> Self {
        Self {
            n_tasks: 12,
            grid_spacing: 1_000.0,
            leveling: Leveling::default(),
            options: PlacementOptions::default(),
            thresholds: FitThresholds::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerConfig {
    pub samples: usize,
    pub gamma: f64,
    /// Airspeed used for the energy cost (m/s).
    pub v0: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self { samples: 2_000, gamma: DEFAULT_GAMMA, v0: 100.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MissionConfig {
    /// One depot (and UAV) per entry.
    pub depots: Vec<Point>,
    #[serde(flatten)]
    pub params: MissionParams,
}

impl Default for MissionConfig {
    fn default() -> Self {
        Self {
            depots: vec![Point::new(2_000.0, 2_000.0), Point::new(18_000.0, 2_000.0), Point::new(10_000.0, 18_000.0)],
            params: MissionParams { prior_mean: -50.0, ..MissionParams::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub seeds: Seeds,
    pub scenario: ScenarioConfig,
    pub sensor: SensorConfig,
    pub placement: PlacementConfig,
    pub planner: PlannerConfig,
    pub routing: GaParams,
    pub mission: MissionConfig,
    pub output_dir: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Replaces every seed (stage seeds, shadowing, seeded wind) with ones derived from `seed`.
    pub fn override_seed(&mut self, seed: u64) {
        self.seeds = Seeds::from_master(seed);
        self.scenario.source.seed = seed.wrapping_add(4);
        if let WindSpec::SeededSmoothNoise { seed: s, .. } = &mut self.scenario.wind {
            *s = seed.wrapping_add(5);
        }
    }

    /// Shrinks every length tenfold: region, obstacles, depots, source,
    /// lattices, correlation and kernel length scales, and the sensing
    /// period (so samples stay as dense relative to the length scale).
    /// Speeds and the turn radius are unchanged.
    pub fn desk_scale(&self) -> Self {
        let s = DESK_SCALE;
        let p = |q: Point| q * s;
        let mut c = self.clone();
        let region = &mut c.scenario.region;
        region.bounds = Rect { min: p(region.bounds.min), max: p(region.bounds.max) };
        for poly in &mut region.obstacles {
            for v in &mut poly.vertices {
                *v = p(*v);
            }
        }
        c.scenario.wind = match c.scenario.wind {
            WindSpec::Vortex { center, max_speed, core_radius } => {
                WindSpec::Vortex { center: p(center), max_speed, core_radius: core_radius * s }
            }
            WindSpec::SeededSmoothNoise { mean_speed, from_deg, amplitude, correlation_length, seed } => {
                WindSpec::SeededSmoothNoise { mean_speed, from_deg, amplitude, correlation_length: correlation_length * s, seed }
            }
            other => other,
        };
        c.scenario.field_spacing *= s;
        c.scenario.source.position = p(c.scenario.source.position);
        c.scenario.source.shadowing_length_m *= s;
        c.sensor.length_scale *= s;
        c.placement.grid_spacing *= s;
        for d in &mut c.mission.depots {
            *d = p(*d);
        }
        c.mission.params.period *= s;
        c
    }

    /// Checks every cross-field constraint that serde cannot express.
    pub fn validate(&self) -> Result<()> {
        let region = &self.scenario.region;
        Rect::new(region.bounds.min, region.bounds.max)?;
        for poly in &region.obstacles {
            Polygon::new(poly.vertices.clone())?;
        }
        region.validate()?;
        self.scenario.source.validate()?;
        if !(self.scenario.field_spacing > 0.0) {
            return Err(Error::Config("scenario.field_spacing must be positive".into()));
        }
        self.sensor.hyper().validate().map_err(|e| Error::Config(format!("sensor: {e}")))?;
        if self.placement.n_tasks == 0 {
            return Err(Error::Config("placement.n_tasks must be at least 1".into()));
        }
        if !(self.placement.grid_spacing > 0.0) {
            return Err(Error::Config("placement.grid_spacing must be positive".into()));
        }
        let lv = &self.placement.leveling;
        if !(lv.noise_factor > 0.0 && lv.length_factor > 0.0) {
            return Err(Error::Config("placement.leveling factors must be positive".into()));
        }
        let po = &self.placement.options;
        if po.restarts == 0 || po.iterations_per_coordinate == 0 || !(po.initial_step > 0.0) {
            return Err(Error::Config("placement.options: restarts, iterations and initial_step must be positive".into()));
        }
        if self.planner.samples == 0 || !(self.planner.gamma > 0.0) || !(self.planner.v0 > 0.0) {
            return Err(Error::Config("planner: samples, gamma and v0 must be positive".into()));
        }
        self.routing.validate()?;
        if self.mission.depots.is_empty() {
            return Err(Error::Config("mission.depots needs at least one depot".into()));
        }
        for (k, d) in self.mission.depots.iter().enumerate() {
            if !region.is_free(*d) {
                return Err(Error::Config(format!("depot {k} at ({}, {}) is not in free space", d.x, d.y)));
            }
        }
        self.mission.params.validate()
    }

    pub fn n_uavs(&self) -> usize {
        self.mission.depots.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        let cfg = PipelineConfig::default();
        cfg.validate().unwrap();
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(PipelineConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn default_wind_blows_from_the_northeast() {
        assert_eq!(PipelineConfig::default().scenario.wind, WindSpec::Uniform { speed: 10.0, from_deg: 45.0 });
    }

    #[test]
    fn partial_file_keeps_other_defaults() {
        let cfg = PipelineConfig::from_toml_str("[placement]\nn_tasks = 5\n[mission]\nrefit_every = 10\n").unwrap();
        assert_eq!(cfg.placement.n_tasks, 5);
        assert_eq!(cfg.mission.params.refit_every, 10);
        assert_eq!(cfg.planner, PlannerConfig::default());
    }

    #[test]
    fn unknown_keys_and_bad_values_are_config_errors() {
        assert!(matches!(PipelineConfig::from_toml_str("[planner]\nsmaples = 3\n"), Err(Error::Config(_))));
        assert!(matches!(PipelineConfig::from_toml_str("[mission]\ndepots = []\n"), Err(Error::Config(_))));
        assert!(matches!(
            PipelineConfig::from_toml_str("[mission]\ndepots = [{ x = -5.0, y = 0.0 }]\n"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn desk_scale_shrinks_lengths() {
        let desk = PipelineConfig::default().desk_scale();
        desk.validate().unwrap();
        assert_eq!(desk.scenario.region.bounds.max, Point::new(2_000.0, 2_000.0));
        assert_eq!(desk.sensor.length_scale, 400.0);
        assert_eq!(desk.mission.params.period, 1.0);
        assert_eq!(desk.mission.params.speed, 100.0);
    }

    #[test]
    fn seed_override_touches_every_seed() {
        let mut cfg = PipelineConfig::default();
        cfg.override_seed(1000);
        assert_eq!(cfg.seeds, Seeds { placement: 1000, planner: 1001, routing: 1002, mission: 1003 });
        assert_eq!(cfg.scenario.source.seed, 1004);
    }
}
