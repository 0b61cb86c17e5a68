//! On-disk JSON configuration with `device`, `noise`, `experiment` and
//! `tenancy` sections.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AttackChoice, ExperimentConfig, ProbabilitySource};
use crate::adders::Family;
use crate::attacks::Realization;
use crate::error::{Error, Result};
use crate::noise::NoiseParams;
use crate::tenancy::{DeviceModel, TenancyModel};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default = "super::default_sizes")]
    pub npqa_sizes: Vec<u32>,
    #[serde(default)]
    pub extra_moduli: Vec<u64>,
    #[serde(default = "super::default_attacks")]
    pub attacks: Vec<AttackChoice>,
    #[serde(default = "super::default_shots")]
    pub shots: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "super::default_mod3")]
    pub mod3_family: Family,
    #[serde(default)]
    pub attack_input: u8,
    #[serde(default)]
    pub realization: Realization,
    #[serde(default)]
    pub source: ProbabilitySource,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ConfigFile::from(&ExperimentConfig::default()).experiment
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TenancySection {
    #[serde(default)]
    pub model: TenancyModel,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub device: DeviceModel,
    #[serde(default)]
    pub noise: NoiseParams,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub tenancy: TenancySection,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

impl From<&ExperimentConfig> for ConfigFile {
    fn from(c: &ExperimentConfig) -> Self {
        ConfigFile {
            device: c.device.clone(),
            noise: c.noise,
            experiment: ExperimentSection {
                npqa_sizes: c.npqa_sizes.clone(),
                extra_moduli: c.extra_moduli.clone(),
                attacks: c.attacks.clone(),
                shots: c.shots,
                seed: c.seed,
                mod3_family: c.mod3_family,
                attack_input: c.attack_input,
                realization: c.realization,
                source: c.source,
            },
            tenancy: TenancySection { model: c.tenancy },
        }
    }
}

impl From<ConfigFile> for ExperimentConfig {
    fn from(f: ConfigFile) -> Self {
        let e = f.experiment;
        ExperimentConfig {
            npqa_sizes: e.npqa_sizes,
            extra_moduli: e.extra_moduli,
            attacks: e.attacks,
            shots: e.shots,
            seed: e.seed,
            noise: f.noise,
            tenancy: f.tenancy.model,
            device: f.device,
            mod3_family: e.mod3_family,
            attack_input: e.attack_input,
            realization: e.realization,
            source: e.source,
        }
    }
}
