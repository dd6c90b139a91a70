//! Versioned JSON run configuration.
//!
//! Physical blocks default to the reference setup (BiBO, 397.5 nm pump of
//! 3.54 nm FWHM, 500-point grid); task blocks must be present for the command
//! that reads them. Unknown keys are rejected everywhere.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use spdc_core::modes::{ClusterGraph, FrexelSpec, PhaseSearch};
use spdc_core::optimizer::FitnessSpec;
use spdc_core::pump::ShaperConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub crystal: CrystalBlock,
    #[serde(default)]
    pub pump: PumpBlock,
    #[serde(default)]
    pub grid: GridBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shaper: Option<ShaperBlock>,
    #[serde(default)]
    pub calibration: CalibrationBlock,
    #[serde(default)]
    pub supermodes: SupermodesBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chirp_scan: Option<ChirpScanBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster: Option<ClusterBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub squeezing_scan: Option<SqueezingScanBlock>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Material {
    Bibo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrystalBlock {
    pub material: Material,
    /// Metres.
    pub length: f64,
    /// Pump central wavelength in metres; the signal sits at twice this.
    pub pump_wavelength: f64,
    /// Cut angle in radians; solved from phase matching when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl Default for CrystalBlock {
    fn default() -> Self {
        Self {
            material: Material::Bibo,
            length: 0.5e-3,
            pump_wavelength: 397.5e-9,
            theta: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PumpBlock {
    /// Intensity FWHM in metres of wavelength.
    pub fwhm: f64,
    /// Quadratic spectral phase in s^2.
    pub phi2: f64,
}

impl Default for PumpBlock {
    fn default() -> Self {
        Self {
            fwhm: 3.54e-9,
            phi2: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridBlock {
    pub n_points: usize,
    /// Half span in units of the pump spectral width.
    pub halfwidth_sigmas: f64,
}

impl Default for GridBlock {
    fn default() -> Self {
        Self {
            n_points: 500,
            halfwidth_sigmas: 15.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ShaperParams {
    Named(ShaperPreset),
    Values(Vec<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShaperPreset {
    Identity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShaperBlock {
    #[serde(default = "default_controls")]
    pub n_control: usize,
    #[serde(default = "default_window")]
    pub window_halfwidth_sigmas: f64,
    #[serde(default = "default_params")]
    pub params: ShaperParams,
}

fn default_controls() -> usize {
    ShaperConfig::DEFAULT_CONTROLS
}
fn default_window() -> f64 {
    3.0
}
fn default_params() -> ShaperParams {
    ShaperParams::Named(ShaperPreset::Identity)
}

impl Default for ShaperBlock {
    fn default() -> Self {
        Self {
            n_control: default_controls(),
            window_halfwidth_sigmas: default_window(),
            params: default_params(),
        }
    }
}

impl ShaperBlock {
    pub fn to_config(&self) -> Result<ShaperConfig> {
        let config = match &self.params {
            ShaperParams::Named(ShaperPreset::Identity) => {
                ShaperConfig::identity(self.n_control, self.window_halfwidth_sigmas)
            }
            ShaperParams::Values(v) => ShaperConfig {
                n_control: self.n_control,
                window_halfwidth_sigmas: self.window_halfwidth_sigmas,
                params: v.clone(),
            },
        };
        config.validate().context("shaper block")?;
        Ok(config)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrationBlock {
    /// Squeezing of the leading supermode in dB.
    pub leading_db: f64,
}

impl Default for CalibrationBlock {
    fn default() -> Self {
        Self { leading_db: 7.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SupermodesBlock {
    /// Number of supermode profiles written out.
    pub export_modes: usize,
    /// Gains at or above this fraction of the largest are counted.
    pub gain_fraction: f64,
}

impl Default for SupermodesBlock {
    fn default() -> Self {
        Self {
            export_modes: 8,
            gain_fraction: 0.9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChirpScanBlock {
    /// Quadratic phases in s^2, one chirped and one matched row each.
    pub phi2: Vec<f64>,
    #[serde(default = "default_top")]
    pub top: usize,
    #[serde(default = "default_near_max")]
    pub near_max_fraction: f64,
}

fn default_top() -> usize {
    100
}
fn default_near_max() -> f64 {
    0.95
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeBlock {
    pub fitness: FitnessSpec,
    pub max_generations: usize,
    #[serde(default = "default_step")]
    pub initial_step: f64,
    /// Overrides the default `4 + floor(3 ln n)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub population: Option<usize>,
}

fn default_step() -> f64 {
    0.3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterBlock {
    #[serde(default = "FrexelSpec::four_band_default")]
    pub frexels: FrexelSpec,
    pub graph: GraphSpec,
    /// Node `j` carries frexel `permutation[j]`; searched when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
    #[serde(default)]
    pub search: PhaseSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    Linear(usize),
    Adjacency(Vec<Vec<u8>>),
    Edges { nodes: usize, edges: Vec<(usize, usize)> },
}

impl GraphSpec {
    pub fn build(&self) -> Result<ClusterGraph> {
        Ok(match self {
            GraphSpec::Linear(n) => ClusterGraph::linear(*n),
            GraphSpec::Adjacency(rows) => ClusterGraph::from_adjacency(rows)?,
            GraphSpec::Edges { nodes, edges } => ClusterGraph::from_edges(*nodes, edges)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezingScanBlock {
    /// Leading-supermode squeezing values in dB.
    pub leading_db: Vec<f64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: RunConfig = serde_json::from_str(text).context("invalid run configuration")?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            bail!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            );
        }
        let positive = |name: &str, v: f64| -> Result<()> {
            if !(v > 0.0 && v.is_finite()) {
                bail!("{name} must be positive and finite, got {v}");
            }
            Ok(())
        };
        positive("crystal.length", self.crystal.length)?;
        positive("crystal.pump_wavelength", self.crystal.pump_wavelength)?;
        positive("pump.fwhm", self.pump.fwhm)?;
        positive("grid.halfwidth_sigmas", self.grid.halfwidth_sigmas)?;
        if !self.pump.phi2.is_finite() {
            bail!("pump.phi2 must be finite");
        }
        if self.grid.n_points < 2 {
            bail!("grid.n_points must be at least 2");
        }
        if !self.calibration.leading_db.is_finite() {
            bail!("calibration.leading_db must be finite");
        }
        if !(self.supermodes.gain_fraction > 0.0 && self.supermodes.gain_fraction <= 1.0) {
            bail!("supermodes.gain_fraction must lie in (0, 1]");
        }
        if let Some(shaper) = &self.shaper {
            shaper.to_config()?;
        }
        if let Some(scan) = &self.chirp_scan {
            if scan.phi2.is_empty() || scan.phi2.iter().any(|p| !p.is_finite()) {
                bail!("chirp_scan.phi2 must be a non-empty list of finite values");
            }
            if !(scan.near_max_fraction > 0.0 && scan.near_max_fraction <= 1.0) {
                bail!("chirp_scan.near_max_fraction must lie in (0, 1]");
            }
        }
        if let Some(opt) = &self.optimize {
            opt.fitness.validate()?;
            if opt.max_generations == 0 {
                bail!("optimize.max_generations must be at least 1");
            }
            positive("optimize.initial_step", opt.initial_step)?;
        }
        if let Some(cluster) = &self.cluster {
            cluster.frexels.validate()?;
            let graph = cluster.graph.build()?;
            if graph.len() != cluster.frexels.len() {
                bail!(
                    "cluster graph has {} nodes for {} frexels",
                    graph.len(),
                    cluster.frexels.len()
                );
            }
            if let Some(p) = &cluster.permutation {
                let mut sorted = p.clone();
                sorted.sort_unstable();
                if sorted != (0..cluster.frexels.len()).collect::<Vec<_>>() {
                    bail!(
                        "cluster.permutation must be a permutation of 0..{}",
                        cluster.frexels.len()
                    );
                }
            }
        }
        if let Some(scan) = &self.squeezing_scan {
            if scan.leading_db.is_empty() || scan.leading_db.iter().any(|d| !d.is_finite()) {
                bail!("squeezing_scan.leading_db must be a non-empty list of finite values");
            }
        }
        Ok(())
    }

    /// Errors naming every block in `names` that is absent.
    pub fn require(&self, command: &str, names: &[&str]) -> Result<()> {
        let missing: Vec<&str> = names
            .iter()
            .copied()
            .filter(|name| match *name {
                "chirp_scan" => self.chirp_scan.is_none(),
                "optimize" => self.optimize.is_none(),
                "cluster" => self.cluster.is_none(),
                "squeezing_scan" => self.squeezing_scan.is_none(),
                _ => false,
            })
            .collect();
        if !missing.is_empty() {
            bail!("{command} needs the missing config block(s): {}", missing.join(", "));
        }
        Ok(())
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            seed: 0,
            crystal: CrystalBlock::default(),
            pump: PumpBlock::default(),
            grid: GridBlock::default(),
            shaper: None,
            calibration: CalibrationBlock::default(),
            supermodes: SupermodesBlock::default(),
            chirp_scan: None,
            optimize: None,
            cluster: None,
            squeezing_scan: None,
        }
    }
}
