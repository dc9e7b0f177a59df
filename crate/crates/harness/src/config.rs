//! Experiment configuration read from TOML. Every table rejects unknown keys.

use std::fmt;
use std::path::Path;

use msmaxwell::msrk::{ButcherTableau, StageSolveConfig};
use msmaxwell::pml::{make_layer_config, PmlConfig};
use msmaxwell::{make_grid, Boundary, Grid};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub steps: usize,
    pub grid: GridConfig,
    pub solver: SolverConfig,
    pub pml: PmlBlock,
    pub ic: InitialCondition,
    pub output: OutputConfig,
    pub verify: VerifyConfig,
    pub convergence: ConvergenceConfig,
    pub absorption: AbsorptionConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            steps: 50,
            grid: GridConfig::default(),
            solver: SolverConfig::default(),
            pml: PmlBlock::default(),
            ic: InitialCondition::Random,
            output: OutputConfig::default(),
            verify: VerifyConfig::default(),
            convergence: ConvergenceConfig::default(),
            absorption: AbsorptionConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Periodic,
    Pec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
    pub cfl_fraction: f64,
    pub boundary: BoundaryKind,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            nx: 8,
            ny: 8,
            nz: 8,
            dx: 0.125,
            dy: 0.125,
            dz: 0.125,
            cfl_fraction: 0.9,
            boundary: BoundaryKind::Periodic,
        }
    }
}

impl GridConfig {
    pub fn cubic(n: usize, cfl_fraction: f64) -> Self {
        let h = 1.0 / n as f64;
        Self { nx: n, ny: n, nz: n, dx: h, dy: h, dz: h, cfl_fraction, boundary: BoundaryKind::Periodic }
    }

    pub fn build(&self) -> Result<Grid> {
        let boundary = match self.boundary {
            BoundaryKind::Periodic => Boundary::Periodic,
            BoundaryKind::Pec => Boundary::PecWithPml,
        };
        make_grid([self.nx, self.ny, self.nz], [self.dx, self.dy, self.dz], self.cfl_fraction, boundary)
            .map_err(|e| field_error("grid", e))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scheme {
    Yee,
    Msrk(String),
}

impl Scheme {
    pub fn tableau(&self) -> Option<ButcherTableau<f64>> {
        match self {
            Scheme::Yee => None,
            Scheme::Msrk(name) => ButcherTableau::by_name(name).ok(),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Yee => f.write_str("yee"),
            Scheme::Msrk(name) => write!(f, "msrk:{name}"),
        }
    }
}

impl TryFrom<String> for Scheme {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        if s == "yee" {
            return Ok(Scheme::Yee);
        }
        match s.strip_prefix("msrk:") {
            Some(name) if ButcherTableau::<f64>::NAMES.contains(&name) => Ok(Scheme::Msrk(name.to_string())),
            Some(name) => Err(format!("unknown tableau `{name}`; known: {}", ButcherTableau::<f64>::NAMES.join(", "))),
            None => Err(format!("unknown scheme `{s}`; expected `yee` or `msrk:<tableau>`")),
        }
    }
}

impl Serialize for Scheme {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scheme {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Scheme::try_from(String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub scheme: Scheme,
    pub stage_tolerance: f64,
    pub max_stage_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let stage = StageSolveConfig::default();
        Self { scheme: Scheme::Yee, stage_tolerance: stage.tolerance, max_stage_iterations: stage.max_iterations }
    }
}

impl SolverConfig {
    pub fn stage(&self) -> StageSolveConfig {
        StageSolveConfig { tolerance: self.stage_tolerance, max_iterations: self.max_stage_iterations }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PmlBlock {
    pub sigma: f64,
    /// Cells damped on each z face; absent means a uniform medium.
    pub thickness: Option<usize>,
    pub axes: Vec<String>,
}

impl Default for PmlBlock {
    fn default() -> Self {
        Self { sigma: 0.5, thickness: None, axes: vec!["z".into()] }
    }
}

impl PmlBlock {
    pub fn build(&self, grid: &Grid) -> Result<PmlConfig<f64>> {
        if self.axes.iter().any(|a| a != "z") {
            return Err(config_error("pml.axes", format!("only [\"z\"] is supported, got {:?}", self.axes)));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(config_error("pml.sigma", format!("must be finite and non-negative, got {}", self.sigma)));
        }
        if self.axes.is_empty() || self.sigma == 0.0 {
            return Ok(PmlConfig::lossless());
        }
        match self.thickness {
            None => {
                let cfg = PmlConfig::uniform_z(self.sigma);
                cfg.validate(grid).map_err(|e| field_error("pml", e))?;
                Ok(cfg)
            }
            Some(t) => make_layer_config(grid, t, self.sigma).map_err(|e| field_error("pml.thickness", e)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    PlaneWave,
    /// TE packet moving toward +z; `center` and `width` in units of the z extent.
    GaussianPulse {
        center: f64,
        width: f64,
        wavelength: f64,
    },
    Random,
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub trace: String,
    pub sidecar: String,
    /// Field snapshot period in steps; 0 disables snapshots.
    pub snapshot_every: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { trace: "trace.csv".into(), sidecar: "run.json".into(), snapshot_every: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub trials: usize,
    pub sigmas: Vec<f64>,
    pub tableaux: Vec<String>,
    /// Tableaux whose certification is expected to fail.
    pub expected_fail: Vec<String>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            trials: 4,
            sigmas: vec![0.0, 0.3, 2.5],
            tableaux: ["midpoint", "gauss2", "gauss3", "heun-nonsymplectic"].map(String::from).to_vec(),
            expected_fail: vec!["heun-nonsymplectic".into()],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergenceConfig {
    pub base: usize,
    pub levels: usize,
    /// Steps on the coarsest grid; doubled with each refinement.
    pub base_steps: usize,
    pub target_order: f64,
    pub tolerance: f64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self { base: 8, levels: 3, base_steps: 8, target_order: 2.0, tolerance: 0.15 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AbsorptionConfig {
    pub thicknesses: Vec<usize>,
    pub sigma: f64,
    /// Cells per unit length.
    pub resolution: usize,
    pub interior: usize,
    pub transverse: usize,
    /// Pulse travel in cells before the interior is measured.
    pub travel: usize,
    pub pulse_width: f64,
    pub wavelength: f64,
}

impl Default for AbsorptionConfig {
    fn default() -> Self {
        Self {
            thicknesses: vec![2, 4, 8, 16],
            sigma: 2.0,
            resolution: 16,
            interior: 64,
            transverse: 16,
            travel: 150,
            pulse_width: 6.0,
            wavelength: 8.0,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| config_error(origin, e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid.build()?;
        self.pml.build(&grid)?;
        if self.solver.stage_tolerance.is_nan()
            || self.solver.stage_tolerance <= 0.0
            || self.solver.max_stage_iterations == 0
        {
            return Err(config_error("solver", "stage_tolerance and max_stage_iterations must be positive"));
        }
        if let InitialCondition::GaussianPulse { center, width, wavelength } = self.ic {
            let positive = |v: f64| v.is_finite() && v > 0.0;
            if !(0.0..=1.0).contains(&center) || !positive(width) || !positive(wavelength) {
                return Err(config_error("ic", "gaussian_pulse needs 0 <= center <= 1, width > 0, wavelength > 0"));
            }
        }
        if self.convergence.levels < 2 || self.convergence.base < 2 || self.convergence.base_steps == 0 {
            return Err(config_error("convergence", "needs levels >= 2, base >= 2, base_steps >= 1"));
        }
        let a = &self.absorption;
        if a.thicknesses.is_empty() || a.thicknesses.contains(&0) || a.resolution < 2 || a.interior < 4 {
            return Err(config_error("absorption", "needs positive thicknesses, resolution >= 2, interior >= 4"));
        }
        for tableau in &self.verify.tableaux {
            ButcherTableau::<f64>::by_name(tableau).map_err(|e| field_error("verify.tableaux", e))?;
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn config_error(path: &str, message: impl Into<String>) -> HarnessError {
    HarnessError::Config { path: path.into(), message: message.into() }
}

fn field_error(path: &str, e: msmaxwell::Error) -> HarnessError {
    config_error(path, e.to_string())
}
