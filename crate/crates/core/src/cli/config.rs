//! Job configuration for `asylat generate`.

use serde::{Deserialize, Serialize};

use crate::chart::ChartJet;
use crate::error::Result;
use crate::geometry::Rect;
use crate::lattice::Region;
use crate::synth::{ModelSystem, NoiseModel};

/// Either a named model system on a domain or an explicit chart jet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartSpec {
    Model {
        #[serde(flatten)]
        system: ModelSystem,
        domain: Rect,
    },
    Jet(ChartJet),
}

impl ChartSpec {
    pub fn build(&self) -> Result<ChartJet> {
        match self {
            Self::Model { system, domain } => system.chart(*domain),
            Self::Jet(jet) => Ok(jet.clone()),
        }
    }
}

/// ```json
/// {
///   "region": {"min": [0, 0], "max": [1, 1], "inner_margin": 0.1},
///   "chart": {"model": {"model": "shear", "param": 0.3, "domain": {"min": [0, 0], "max": [1, 1]}}},
///   "hbars": [0.1, 0.05],
///   "noise": {"order": 3, "amplitude": 1.0, "seed": 7}
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub region: Region,
    pub chart: ChartSpec,
    pub hbars: Vec<f64>,
    /// No perturbation when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseModel>,
}
