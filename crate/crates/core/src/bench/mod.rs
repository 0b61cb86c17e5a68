//! Experiment harness: per-case output probabilities under attack, attack
//! effectiveness, parallel-vs-monolithic improvement, and suite reports.

pub mod calibration;
mod config;
pub mod golden;
mod report;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::adders::{Adder, AdderSpec, Family};
use crate::attacks::{build_attack, AttackKind, AttackSpec, Realization};
use crate::error::{Error, Result};
use crate::noise::{sample_tracked_readouts, NoiseParams};
use crate::rns::{aggregate_probability, select_moduli, table_set, RnsSet, SelectionMode};
use crate::simcore::{Circuit, Gate};
use crate::tenancy::{allocate, merge_timeline, DeviceModel, TenancyModel};

pub use calibration::{calibrate_to_reference, ReferenceCalibration};
pub use config::{ConfigFile, ExperimentSection, TenancySection};
pub use report::{report_file_name, write_report, ReportFormat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackChoice {
    None,
    Existing,
    AltCnot,
    Sac,
    Apc,
}

impl AttackChoice {
    pub const ALL: [AttackChoice; 5] = [
        AttackChoice::None,
        AttackChoice::Existing,
        AttackChoice::AltCnot,
        AttackChoice::Sac,
        AttackChoice::Apc,
    ];

    pub fn kind(self) -> Option<AttackKind> {
        match self {
            AttackChoice::None => None,
            AttackChoice::Existing => Some(AttackKind::Existing),
            AttackChoice::AltCnot => Some(AttackKind::AltCnot),
            AttackChoice::Sac => Some(AttackKind::Sac),
            AttackChoice::Apc => Some(AttackKind::Apc),
        }
    }

    pub fn name(self) -> &'static str {
        self.kind().map_or("none", AttackKind::name)
    }
}

impl From<AttackKind> for AttackChoice {
    fn from(k: AttackKind) -> Self {
        match k {
            AttackKind::Existing => AttackChoice::Existing,
            AttackKind::AltCnot => AttackChoice::AltCnot,
            AttackKind::Sac => AttackChoice::Sac,
            AttackKind::Apc => AttackChoice::Apc,
        }
    }
}

impl fmt::Display for AttackChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("none") || s.eq_ignore_ascii_case("base") {
            return Ok(AttackChoice::None);
        }
        s.parse::<AttackKind>().map(Into::into)
    }
}

/// Where the suite's probabilities come from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbabilitySource {
    #[default]
    Simulated,
    /// Published table values injected in place of simulation.
    Golden,
}

pub const DEFAULT_SHOTS: usize = 100;
pub const MAX_SHOTS: usize = 100_000;

fn default_sizes() -> Vec<u32> {
    vec![6, 7, 8, 9]
}

fn default_attacks() -> Vec<AttackChoice> {
    AttackChoice::ALL.to_vec()
}

fn default_shots() -> usize {
    DEFAULT_SHOTS
}

fn default_mod3() -> Family {
    Family::PowPlusOne
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Full-adder output widths; each also selects a moduli set.
    #[serde(default = "default_sizes")]
    pub npqa_sizes: Vec<u32>,
    /// Modulo adders run in addition to those the moduli sets need.
    #[serde(default)]
    pub extra_moduli: Vec<u64>,
    #[serde(default = "default_attacks")]
    pub attacks: Vec<AttackChoice>,
    #[serde(default = "default_shots")]
    pub shots: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub noise: NoiseParams,
    #[serde(default)]
    pub tenancy: TenancyModel,
    #[serde(default)]
    pub device: DeviceModel,
    /// Family used for modulus 3.
    #[serde(default = "default_mod3")]
    pub mod3_family: Family,
    /// Initial target bit of every attack pair.
    #[serde(default)]
    pub attack_input: u8,
    #[serde(default)]
    pub realization: Realization,
    #[serde(default)]
    pub source: ProbabilitySource,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            npqa_sizes: default_sizes(),
            extra_moduli: Vec::new(),
            attacks: default_attacks(),
            shots: DEFAULT_SHOTS,
            seed: 0,
            noise: NoiseParams::default(),
            tenancy: TenancyModel::Grey,
            device: DeviceModel::default(),
            mod3_family: Family::PowPlusOne,
            attack_input: 0,
            realization: Realization::Literal,
            source: ProbabilitySource::Simulated,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_SHOTS).contains(&self.shots) {
            return Err(Error::param(format!(
                "shots must lie in [1, {MAX_SHOTS}], got {}",
                self.shots
            )));
        }
        if self.attacks.is_empty() {
            return Err(Error::param("attack list is empty"));
        }
        if self.attack_input > 1 {
            return Err(Error::param("attack_input must be 0 or 1"));
        }
        for &n in &self.npqa_sizes {
            AdderSpec::qfa(n)?;
            if n < 3 {
                return Err(Error::param(format!("no moduli set for {n}-bit sums")));
            }
        }
        self.noise.validate()
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }

    pub fn moduli_set(&self, output_bits: u32) -> Result<RnsSet> {
        let mode = if table_set(output_bits).is_some() {
            SelectionMode::Table
        } else {
            SelectionMode::General
        };
        Ok(select_moduli(output_bits, mode)?.set)
    }

    pub fn qma_spec(&self, modulus: u64) -> Result<AdderSpec> {
        AdderSpec::qma(modulus, Family::infer(modulus, self.mod3_family))
    }
}

/// The three measured inputs: zero, both maximal, and one maximal.
pub fn case_inputs(spec: &AdderSpec) -> [(u64, u64); 3] {
    let m = spec.max_operand();
    [(0, 0), (m, m), (0, m)]
}

/// Seed for one grid cell, derived from the master seed and a key.
pub fn child_seed(master: u64, key: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(key.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest is 32 bytes"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub a: u64,
    pub b: u64,
    pub expected: u64,
    pub shots: usize,
    pub correct: usize,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub adder: String,
    pub spec: AdderSpec,
    pub attack: AttackChoice,
    pub cases: Vec<CaseResult>,
    pub mean: f64,
    pub trajectories: usize,
    pub seed: u64,
}

/// Victim circuit with MEASURE on its output register, in register order.
pub fn measured_victim(adder: &Adder) -> Result<Circuit> {
    let mut c = adder.circuit.clone();
    for &q in &adder.layout.output {
        c.push(Gate::measure(q))?;
    }
    Ok(c)
}

/// Device-wide circuit of the victim running next to `attack`.
pub fn co_scheduled(
    adder: &Adder,
    attack: AttackChoice,
    config: &ExperimentConfig,
) -> Result<(Circuit, Vec<usize>)> {
    let model = if attack.kind().is_none() {
        TenancyModel::None
    } else {
        config.tenancy
    };
    let plan = allocate(
        adder.layout.width,
        model,
        &config.device,
        adder.circuit.depth(),
    )?;
    let attacker = match attack.kind() {
        Some(kind) if !plan.pairs.is_empty() && plan.attack_layers > 0 => {
            let spec = AttackSpec::new(
                kind,
                plan.attack_layers,
                config.attack_input,
                plan.pairs.len(),
            )?
            .with_realization(config.realization);
            build_attack(&spec)?
        }
        _ => Circuit::new(0, "idle"),
    };
    let merged = merge_timeline(&measured_victim(adder)?, &attacker, &plan)?;
    Ok((merged, plan.victim))
}

/// Runs `shots` trajectories per input case and counts decoded outputs
/// equal to the classical sum.
pub fn output_probability(
    spec: &AdderSpec,
    attack: AttackChoice,
    config: &ExperimentConfig,
) -> Result<Measurement> {
    config.validate()?;
    let adder = Adder::build(*spec)?;
    let (merged, victim) = co_scheduled(&adder, attack, config)?;
    let label = spec.label();
    let cell_seed = child_seed(config.seed, &format!("{label}|{attack}"));
    let cases = case_inputs(spec)
        .iter()
        .enumerate()
        .map(|(ci, &(a, b))| {
            let local = adder.input_index(a, b)?;
            let index = victim
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &q)| acc | (((local >> i) & 1) << q));
            let expected = spec.oracle(a, b);
            let seed = child_seed(cell_seed, &ci.to_string());
            let readouts = sample_tracked_readouts(
                &merged,
                index,
                &victim,
                &config.device,
                &config.noise,
                config.shots,
                seed,
            )?;
            let correct = readouts.iter().filter(|&&r| r == expected).count();
            Ok(CaseResult {
                a,
                b,
                expected,
                shots: config.shots,
                correct,
                probability: correct as f64 / config.shots as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = cases.iter().map(|c| c.probability).sum::<f64>() / cases.len() as f64;
    Ok(Measurement {
        adder: label,
        spec: *spec,
        attack,
        trajectories: config.shots * cases.len(),
        cases,
        mean,
        seed: cell_seed,
    })
}

/// Relative drop of output probability under attack, in percent.
pub fn effectiveness(p_base: f64, p_attack: f64) -> Result<f64> {
    if p_base <= 0.0 {
        return Err(Error::param(
            "effectiveness needs a positive base probability",
        ));
    }
    Ok(100.0 * (p_base - p_attack) / p_base)
}

/// Relative gain of parallel over monolithic addition, in percent.
pub fn improvement(p_npqa: f64, p_pqa: f64) -> Result<f64> {
    if p_npqa <= 0.0 {
        return Err(Error::param(
            "improvement needs a positive monolithic probability",
        ));
    }
    Ok(100.0 * (p_pqa - p_npqa) / p_npqa)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PqaRow {
    pub output_bits: u32,
    pub moduli: RnsSet,
    pub attack: AttackChoice,
    /// Mean probability of each modulo adder, in moduli order.
    pub per_modulus: Vec<f64>,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectivenessRow {
    pub adder: String,
    pub attack: AttackChoice,
    pub base: f64,
    pub attacked: f64,
    pub effectiveness: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImprovementRow {
    pub output_bits: u32,
    pub attack: AttackChoice,
    pub npqa: f64,
    pub pqa: f64,
    pub improvement: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub seed: u64,
    pub config_hash: String,
    pub source: ProbabilitySource,
    pub shots: usize,
    pub measurements: Vec<Measurement>,
    pub pqa: Vec<PqaRow>,
    pub effectiveness: Vec<EffectivenessRow>,
    pub improvement: Vec<ImprovementRow>,
}

impl ExperimentReport {
    pub fn mean(&self, adder: &str, attack: AttackChoice) -> Option<f64> {
        self.measurements
            .iter()
            .find(|m| m.adder == adder && m.attack == attack)
            .map(|m| m.mean)
    }

    pub fn pqa(&self, output_bits: u32, attack: AttackChoice) -> Option<&PqaRow> {
        self.pqa
            .iter()
            .find(|r| r.output_bits == output_bits && r.attack == attack)
    }

    pub fn improvement(&self, output_bits: u32, attack: AttackChoice) -> Option<&ImprovementRow> {
        self.improvement
            .iter()
            .find(|r| r.output_bits == output_bits && r.attack == attack)
    }
}

fn golden_measurement(spec: &AdderSpec, attack: AttackChoice) -> Result<Measurement> {
    let p = match *spec {
        AdderSpec::Qfa { output_bits } => golden::full_adder(output_bits, attack),
        AdderSpec::Qma { modulus, family } => golden::modulo_adder(modulus, family, attack),
    }
    .ok_or_else(|| {
        Error::param(format!(
            "no published probability for {spec} under {attack}"
        ))
    })?;
    Ok(Measurement {
        adder: spec.label(),
        spec: *spec,
        attack,
        cases: Vec::new(),
        mean: p,
        trajectories: 0,
        seed: 0,
    })
}

/// Full grid of full adders and modulo adders against every configured
/// attack, with derived parallel-addition, effectiveness and improvement
/// tables. Output is independent of scheduling.
pub fn run_suite(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let sets = config
        .npqa_sizes
        .iter()
        .map(|&n| Ok((n, config.moduli_set(n)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut specs: Vec<AdderSpec> = config
        .npqa_sizes
        .iter()
        .map(|&n| AdderSpec::qfa(n))
        .collect::<Result<_>>()?;
    let mut moduli: Vec<u64> = sets.iter().flat_map(|(_, s)| s.moduli().to_vec()).collect();
    moduli.extend(&config.extra_moduli);
    moduli.sort_unstable();
    moduli.dedup();
    for m in moduli {
        specs.push(config.qma_spec(m)?);
    }
    for spec in &specs {
        let width = Adder::build(*spec)?.layout.width;
        if width > config.device.qubit_count() {
            return Err(Error::DeviceOverflow {
                needed: width,
                available: config.device.qubit_count(),
            });
        }
    }
    let grid: Vec<(AdderSpec, AttackChoice)> = specs
        .iter()
        .flat_map(|s| config.attacks.iter().map(move |a| (*s, *a)))
        .collect();
    let measurements = grid
        .par_iter()
        .map(|(spec, attack)| match config.source {
            ProbabilitySource::Simulated => output_probability(spec, *attack, config),
            ProbabilitySource::Golden => golden_measurement(spec, *attack),
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = |label: &str, attack| {
        measurements
            .iter()
            .find(|m| m.adder == label && m.attack == attack)
            .map(|m| m.mean)
            .expect("grid covers every adder and attack")
    };

    let mut pqa = Vec::new();
    let mut improvement_rows = Vec::new();
    for (n, set) in &sets {
        for &attack in &config.attacks {
            let per_modulus = set
                .moduli()
                .iter()
                .map(|&m| Ok(mean(&config.qma_spec(m)?.label(), attack)))
                .collect::<Result<Vec<_>>>()?;
            let probability = aggregate_probability(&per_modulus)?;
            let npqa = mean(&AdderSpec::qfa(*n)?.label(), attack);
            improvement_rows.push(ImprovementRow {
                output_bits: *n,
                attack,
                npqa,
                pqa: probability,
                improvement: improvement(npqa, probability).ok(),
            });
            pqa.push(PqaRow {
                output_bits: *n,
                moduli: set.clone(),
                attack,
                per_modulus,
                probability,
            });
        }
    }

    let mut effectiveness_rows = Vec::new();
    if config.attacks.contains(&AttackChoice::None) {
        for spec in &specs {
            let label = spec.label();
            let base = mean(&label, AttackChoice::None);
            for &attack in config.attacks.iter().filter(|a| **a != AttackChoice::None) {
                let attacked = mean(&label, attack);
                effectiveness_rows.push(EffectivenessRow {
                    adder: label.clone(),
                    attack,
                    base,
                    attacked,
                    effectiveness: effectiveness(base, attacked).ok(),
                });
            }
        }
    }

    Ok(ExperimentReport {
        seed: config.seed,
        config_hash: config.hash(),
        source: config.source,
        shots: config.shots,
        measurements,
        pqa,
        effectiveness: effectiveness_rows,
        improvement: improvement_rows,
    })
}
