use std::fs;
use std::path::Path;

use hookebook::model::BookTable;
use hookebook::MomentumValue;
use serde::{Deserialize, Serialize};

/// Bad configuration; reported with exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Everything a run depends on. Every field has a default, so a config file
/// only needs the keys it changes; the resolved value is written next to the
/// artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub k: f64,
    pub n: usize,
    pub radius: f64,
    pub seed: u64,
    pub simulate: SimulateConfig,
    pub diagram: DiagramConfig,
    pub classify: ClassifyConfig,
    pub eigen: EigenConfig,
    pub rotation: RotationConfig,
    pub monodromy: MonodromyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            k: -1.0,
            n: 1,
            radius: 1.0,
            seed: 0,
            simulate: SimulateConfig::default(),
            diagram: DiagramConfig::default(),
            classify: ClassifyConfig::default(),
            eigen: EigenConfig::default(),
            rotation: RotationConfig::default(),
            monodromy: MonodromyConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())).into())
    }

    pub fn table(&self) -> hookebook::Result<BookTable> {
        BookTable::new(self.radius, self.k, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    State { sheet: usize, x: f64, y: f64, vx: f64, vy: f64 },
    /// The state at the radial minimum of the fiber over `(h, f)`.
    Fiber { sheet: usize, h: f64, f: f64, phase: f64 },
    /// Position uniform in the disk, velocity components uniform in
    /// `[-speed, speed]`, drawn from the run seed.
    Random { speed: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub initial: InitialState,
    pub reflections: Option<usize>,
    pub max_time: Option<f64>,
    pub points_per_segment: usize,
    pub svg: bool,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            initial: InitialState::Random { speed: 1.5 },
            reflections: None,
            max_time: None,
            points_per_segment: 16,
            svg: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagramConfig {
    pub f_min: f64,
    pub f_max: f64,
    pub resolution: usize,
    /// Grid points per axis of the classification overlay; 0 disables it.
    pub overlay: usize,
    pub h_min: f64,
    pub h_max: f64,
    /// Draw the monodromy loop described by the `monodromy` section.
    pub show_loop: bool,
}

impl Default for DiagramConfig {
    fn default() -> Self {
        Self { f_min: -1.5, f_max: 1.5, resolution: 301, overlay: 0, h_min: -1.0, h_max: 1.5, show_loop: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyConfig {
    pub h_min: f64,
    pub h_max: f64,
    pub f_min: f64,
    pub f_max: f64,
    pub per_axis: usize,
    /// Draw this many values uniformly from the box instead of the grid.
    pub random: usize,
    /// Explicit values; when present they replace grid and random sampling.
    pub values: Vec<MomentumValue>,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self { h_min: -1.5, h_max: 1.5, f_min: -1.5, f_max: 1.5, per_axis: 21, random: 0, values: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EigenConfig {
    pub lambda: f64,
    pub mu: f64,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self { lambda: 1.0, mu: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RotationConfig {
    pub values: Vec<MomentumValue>,
    /// Also measure each value on a simulated orbit.
    pub simulate: bool,
}

impl Default for RotationConfig {
    fn default() -> Self {
        Self { values: vec![MomentumValue::new(0.5, 0.3)], simulate: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonodromyConfig {
    pub c: f64,
    pub f_max: f64,
    pub points_per_side: usize,
    /// A polygon loop through these values; replaces the default contour.
    pub vertices: Vec<MomentumValue>,
    pub per_edge: usize,
    pub svg: bool,
}

impl Default for MonodromyConfig {
    fn default() -> Self {
        Self { c: 0.5, f_max: 0.8, points_per_side: 48, vertices: Vec::new(), per_edge: 16, svg: true }
    }
}
