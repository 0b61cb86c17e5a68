//! Ion-chain device model, victim/attacker placement and the co-scheduled
//! timeline of both tenants.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::attacks::AttackSpec;
use crate::error::{Error, Result};
use crate::simcore::{Circuit, Gate, GateKind};

pub const DEFAULT_QUBITS: usize = 20;
pub const DEFAULT_MAX_ATTACK_LAYERS: usize = 32;

/// A linear ion chain with all-to-all gate connectivity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DeviceRepr", into = "DeviceRepr")]
pub struct DeviceModel {
    qubit_count: usize,
    /// `positions[q]` is the chain slot of logical qubit `q`.
    positions: Vec<usize>,
    /// `qubit_at[p]` is the logical qubit in chain slot `p`.
    qubit_at: Vec<usize>,
    pub max_attack_layers: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct DeviceRepr {
    #[serde(default = "default_qubits")]
    qubit_count: usize,
    #[serde(default)]
    positions: Option<Vec<usize>>,
    #[serde(default = "default_layers")]
    max_attack_layers: usize,
}

fn default_qubits() -> usize {
    DEFAULT_QUBITS
}

fn default_layers() -> usize {
    DEFAULT_MAX_ATTACK_LAYERS
}

impl TryFrom<DeviceRepr> for DeviceModel {
    type Error = Error;

    fn try_from(r: DeviceRepr) -> Result<Self> {
        let mut d = match r.positions {
            Some(p) => DeviceModel::with_positions(p)?,
            None => DeviceModel::line(r.qubit_count),
        };
        if d.qubit_count != r.qubit_count {
            return Err(Error::param(format!(
                "qubit_count {} disagrees with {} chain positions",
                r.qubit_count, d.qubit_count
            )));
        }
        d.max_attack_layers = r.max_attack_layers;
        Ok(d)
    }
}

impl From<DeviceModel> for DeviceRepr {
    fn from(d: DeviceModel) -> Self {
        DeviceRepr {
            qubit_count: d.qubit_count,
            positions: Some(d.positions),
            max_attack_layers: d.max_attack_layers,
        }
    }
}

impl Default for DeviceModel {
    fn default() -> Self {
        DeviceModel::line(DEFAULT_QUBITS)
    }
}

impl DeviceModel {
    /// Logical qubit `q` sits in chain slot `q`.
    pub fn line(qubit_count: usize) -> Self {
        let positions: Vec<usize> = (0..qubit_count).collect();
        DeviceModel {
            qubit_count,
            qubit_at: positions.clone(),
            positions,
            max_attack_layers: DEFAULT_MAX_ATTACK_LAYERS,
        }
    }

    pub fn with_positions(positions: Vec<usize>) -> Result<Self> {
        let n = positions.len();
        let mut qubit_at = vec![usize::MAX; n];
        for (q, &p) in positions.iter().enumerate() {
            if p >= n || qubit_at[p] != usize::MAX {
                return Err(Error::param("chain positions must be a permutation"));
            }
            qubit_at[p] = q;
        }
        Ok(DeviceModel {
            qubit_count: n,
            positions,
            qubit_at,
            max_attack_layers: DEFAULT_MAX_ATTACK_LAYERS,
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn position(&self, qubit: usize) -> Result<usize> {
        self.positions
            .get(qubit)
            .copied()
            .ok_or(Error::UnplacedQubit(qubit))
    }

    pub fn qubit_at(&self, position: usize) -> usize {
        self.qubit_at[position]
    }

    pub fn distance(&self, a: usize, b: usize) -> Result<usize> {
        Ok(self.position(a)?.abs_diff(self.position(b)?))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TenancyModel {
    /// Attacker knows the victim's width and depth and sits next to it.
    #[default]
    Grey,
    /// Attacker runs fixed-depth chains spread over the free qubits.
    Black,
    /// No attacker.
    None,
}

impl TenancyModel {
    pub fn name(self) -> &'static str {
        match self {
            TenancyModel::Grey => "grey",
            TenancyModel::Black => "black",
            TenancyModel::None => "none",
        }
    }
}

impl fmt::Display for TenancyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TenancyModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "grey" | "gray" | "grey_box" | "grey-box" => Ok(TenancyModel::Grey),
            "black" | "black_box" | "black-box" => Ok(TenancyModel::Black),
            "none" => Ok(TenancyModel::None),
            other => Err(Error::param(format!("unknown tenancy model {other:?}"))),
        }
    }
}

/// Relative extra depth a grey-box attacker adds over the victim.
pub const GREY_DEPTH_MARGIN: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TenancyPlan {
    pub model: TenancyModel,
    pub device_qubits: usize,
    /// Device qubit for each victim qubit.
    pub victim: Vec<usize>,
    /// Device qubits (control, target) for each attack pair.
    pub pairs: Vec<(usize, usize)>,
    pub attack_layers: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attack: Option<AttackSpec>,
}

impl TenancyPlan {
    pub fn attacker_qubits(&self) -> Vec<usize> {
        self.pairs.iter().flat_map(|&(c, t)| [c, t]).collect()
    }

    pub fn with_attack(mut self, attack: AttackSpec) -> Result<Self> {
        if attack.pairs != self.pairs.len() {
            return Err(Error::param(format!(
                "attack has {} pairs, plan has {}",
                attack.pairs,
                self.pairs.len()
            )));
        }
        self.attack = Some(attack);
        Ok(self)
    }

    fn check(&self) -> Result<()> {
        let mut used = vec![false; self.device_qubits];
        for q in self.victim.iter().chain(self.attacker_qubits().iter()) {
            let slot = used.get_mut(*q).ok_or(Error::UnplacedQubit(*q))?;
            if *slot {
                return Err(Error::Overlap(*q));
            }
            *slot = true;
        }
        Ok(())
    }
}

pub fn grey_box_layers(victim_depth: usize) -> usize {
    let scaled = (victim_depth as f64 * (1.0 + GREY_DEPTH_MARGIN)).ceil() as usize;
    scaled.max(victim_depth + 1)
}

/// Places the victim in a centered contiguous block and fills the rest of
/// the chain with attack pairs.
pub fn allocate(
    victim_width: usize,
    model: TenancyModel,
    device: &DeviceModel,
    victim_depth: usize,
) -> Result<TenancyPlan> {
    let n = device.qubit_count();
    if victim_width > n {
        return Err(Error::DeviceOverflow {
            needed: victim_width,
            available: n,
        });
    }
    let start = (n - victim_width) / 2;
    let end = start + victim_width;
    let victim = (start..end).map(|p| device.qubit_at(p)).collect();
    let pair_positions = match model {
        TenancyModel::None => Vec::new(),
        TenancyModel::Grey => adjacent_pairs(start, end, n),
        TenancyModel::Black => spread_pairs(start, end, n),
    };
    let pairs = pair_positions
        .into_iter()
        .map(|(c, t)| (device.qubit_at(c), device.qubit_at(t)))
        .collect();
    let attack_layers = match model {
        TenancyModel::None => 0,
        TenancyModel::Grey => grey_box_layers(victim_depth),
        TenancyModel::Black => device.max_attack_layers,
    };
    let plan = TenancyPlan {
        model,
        device_qubits: n,
        victim,
        pairs,
        attack_layers,
        attack: None,
    };
    plan.check()?;
    Ok(plan)
}

/// Pairs taken outward from the victim block, nearest side first.
fn adjacent_pairs(start: usize, end: usize, n: usize) -> Vec<(usize, usize)> {
    let mut left: Vec<usize> = (0..start).rev().collect();
    let mut right: Vec<usize> = (end..n).collect();
    let total = (left.len() + right.len()) / 2;
    let mut pairs = Vec::with_capacity(total);
    let (mut li, mut ri) = (0, 0);
    while pairs.len() < total {
        let l_ok = left.len() - li >= 2;
        let r_ok = right.len() - ri >= 2;
        let take_left = match (l_ok, r_ok) {
            (true, true) => start - left[li + 1] <= right[ri + 1] + 1 - end,
            (true, false) => true,
            (false, true) => false,
            (false, false) => break,
        };
        if take_left {
            pairs.push((left[li + 1], left[li]));
            li += 2;
        } else {
            pairs.push((right[ri + 1], right[ri]));
            ri += 2;
        }
    }
    // one leftover slot on each side: pair them across the victim
    if pairs.len() < total {
        left.drain(..li);
        right.drain(..ri);
        pairs.push((left[0], right[0]));
    }
    pairs
}

/// Pairs of consecutive free slots from the chain ends inward.
fn spread_pairs(start: usize, end: usize, n: usize) -> Vec<(usize, usize)> {
    let free: Vec<usize> = (0..start).chain(end..n).collect();
    free.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

/// Interleaves victim and attacker layer by layer on the device. Victim
/// MEASURE gates form one final layer.
pub fn merge_timeline(victim: &Circuit, attacker: &Circuit, plan: &TenancyPlan) -> Result<Circuit> {
    plan.check()?;
    if victim.width > plan.victim.len() {
        return Err(Error::WidthMismatch {
            expected: plan.victim.len(),
            got: victim.width,
        });
    }
    if attacker.width > 2 * plan.pairs.len() {
        return Err(Error::WidthMismatch {
            expected: 2 * plan.pairs.len(),
            got: attacker.width,
        });
    }
    if attacker.has_measure() {
        return Err(Error::param("attacker circuits are never measured"));
    }
    let attacker_map = plan.attacker_qubits();
    let unitary = |c: &Circuit, map: &[usize]| -> Result<(Vec<Vec<Gate>>, Vec<Gate>)> {
        let mut body = Circuit::new(c.width, "");
        let mut measures = Vec::new();
        for g in c.gates() {
            let mapped = g.remapped(|q| map[q]);
            if g.kind == GateKind::Measure {
                measures.push(mapped);
            } else {
                body.add(g.clone());
                if !measures.is_empty() {
                    return Err(Error::param(
                        "victim MEASURE must come after all unitary gates",
                    ));
                }
            }
        }
        let layers = body
            .asap_layers()
            .into_iter()
            .map(|l| {
                l.into_iter()
                    .map(|i| body.gates()[i].remapped(|q| map[q]))
                    .collect()
            })
            .collect();
        Ok((layers, measures))
    };
    let (v_layers, measures) = unitary(victim, &plan.victim)?;
    let (a_layers, _) = unitary(attacker, &attacker_map)?;

    let mut merged = Circuit::new(
        plan.device_qubits,
        format!("{}+{}", victim.label, attacker.label),
    );
    let mut layers = Vec::new();
    for i in 0..v_layers.len().max(a_layers.len()) {
        let mut layer = Vec::new();
        for g in v_layers
            .get(i)
            .into_iter()
            .flatten()
            .chain(a_layers.get(i).into_iter().flatten())
        {
            layer.push(merged.len());
            merged.push(g.clone())?;
        }
        layers.push(layer);
    }
    if !measures.is_empty() {
        let mut layer = Vec::new();
        for g in measures {
            layer.push(merged.len());
            merged.push(g)?;
        }
        layers.push(layer);
    }
    merged.set_layers(layers)?;
    Ok(merged)
}
