//! Fitting the noise model to the published base and existing-attack
//! probabilities of the full adders.

use serde::{Deserialize, Serialize};

use super::{case_inputs, co_scheduled, golden, AttackChoice, ExperimentConfig};
use crate::adders::{Adder, AdderSpec};
use crate::error::{Error, Result};
use crate::noise::{calibrate, CalibrationCase, CalibrationResult, CalibrationTarget, NoiseField};

/// Calibration cases for one adder under one attack.
pub fn adder_target(
    spec: &AdderSpec,
    attack: AttackChoice,
    probability: f64,
    config: &ExperimentConfig,
) -> Result<CalibrationTarget> {
    let adder = Adder::build(*spec)?;
    let (merged, victim) = co_scheduled(&adder, attack, config)?;
    let cases = case_inputs(spec)
        .iter()
        .map(|&(a, b)| {
            let local = adder.input_index(a, b)?;
            let index = victim
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &q)| acc | (((local >> i) & 1) << q));
            Ok(CalibrationCase {
                circuit: merged.clone(),
                initial_index: index,
                expected: spec.oracle(a, b),
                tracked: victim.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CalibrationTarget {
        label: format!("{spec}|{attack}"),
        cases,
        probability,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationStage {
    pub targets: Vec<String>,
    pub free: Vec<NoiseField>,
    pub result: CalibrationResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCalibration {
    pub stages: Vec<CalibrationStage>,
    pub config: ExperimentConfig,
}

/// Full-adder widths whose published values anchor the fit.
pub const ANCHOR_SIZES: [u32; 2] = [6, 9];

fn published_targets(
    attack: AttackChoice,
    config: &ExperimentConfig,
) -> Result<Vec<CalibrationTarget>> {
    ANCHOR_SIZES
        .iter()
        .map(|&n| {
            let p = golden::full_adder(n, attack)
                .ok_or_else(|| Error::param(format!("no published value for {n} bits")))?;
            adder_target(&AdderSpec::qfa(n)?, attack, p, config)
        })
        .collect()
}

/// Fits `p2` and `p_meas` to the published base values, then
/// `ct_strength` to the existing-attack values, then refits the base pair
/// with crosstalk in place (the crosstalk channel also fires on the
/// victim's own gates). Returns the config with fitted noise.
pub fn calibrate_to_reference(
    config: &ExperimentConfig,
    budget: usize,
) -> Result<ReferenceCalibration> {
    config.validate()?;
    let mut cfg = config.clone();
    let mut stages = Vec::new();
    let base_free = [NoiseField::P2, NoiseField::PMeas];
    let plan: [(&[AttackChoice], &[NoiseField]); 3] = [
        (&[AttackChoice::None], &base_free),
        (&[AttackChoice::Existing], &[NoiseField::CtStrength]),
        (&[AttackChoice::None], &base_free),
    ];
    for (i, (attacks, free)) in plan.into_iter().enumerate() {
        let mut targets = Vec::new();
        for &attack in attacks {
            targets.extend(published_targets(attack, &cfg)?);
        }
        let result = calibrate(
            &targets,
            free,
            cfg.noise,
            &cfg.device,
            budget,
            super::child_seed(cfg.seed, &format!("calibration-{i}")),
        )?;
        cfg.noise = result.params;
        stages.push(CalibrationStage {
            targets: targets.iter().map(|t| t.label.clone()).collect(),
            free: free.to_vec(),
            result,
        });
    }
    Ok(ReferenceCalibration {
        stages,
        config: cfg,
    })
}
