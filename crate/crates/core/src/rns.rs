//! Residue number system: moduli sets, residue encoding, CRT reconstruction,
//! parallel job planning and probability aggregation.

use serde::{Deserialize, Serialize};

use crate::adders::{Adder, AdderSpec, Family};
use crate::error::{Error, Result};

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Pairwise-coprime moduli, sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct RnsSet {
    moduli: Vec<u64>,
}

impl TryFrom<Vec<u64>> for RnsSet {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        RnsSet::new(v)
    }
}

impl From<RnsSet> for Vec<u64> {
    fn from(s: RnsSet) -> Self {
        s.moduli
    }
}

impl RnsSet {
    pub fn new(mut moduli: Vec<u64>) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::param("moduli set is empty"));
        }
        moduli.sort_unstable();
        for (i, &m) in moduli.iter().enumerate() {
            if m < 2 {
                return Err(Error::param(format!("modulus {m} is below 2")));
            }
            if let Some(&o) = moduli[..i].iter().find(|&&o| gcd(o, m) != 1) {
                return Err(Error::param(format!("moduli {o} and {m} are not coprime")));
            }
        }
        moduli
            .iter()
            .try_fold(1u64, |acc, &m| acc.checked_mul(m))
            .ok_or_else(|| Error::param("dynamic range overflows 64 bits"))?;
        Ok(RnsSet { moduli })
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn dynamic_range(&self) -> u64 {
        self.moduli.iter().product()
    }
}

impl std::fmt::Display for RnsSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.moduli.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMode {
    /// Published sets for 6..=9 output bits, used as is.
    #[default]
    Table,
    /// Published sets plus a range check that emits warnings.
    Strict,
    /// Smallest `(2^m-1, 2^m, 2^m+1)` covering the sum range, for any width.
    General,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub set: RnsSet,
    pub warnings: Vec<String>,
}

/// Largest possible sum of two `(n-1)`-bit operands, plus one.
pub fn required_range(output_bits: u32) -> u64 {
    2 * ((1u64 << (output_bits - 1)) - 1) + 1
}

pub fn table_set(output_bits: u32) -> Option<&'static [u64]> {
    match output_bits {
        6 => Some(&[3, 4, 5]),
        7 => Some(&[4, 5, 9]),
        8 => Some(&[5, 8, 9]),
        9 => Some(&[7, 8, 9]),
        _ => None,
    }
}

pub fn select_moduli(output_bits: u32, mode: SelectionMode) -> Result<Selection> {
    if !(3..=40).contains(&output_bits) {
        return Err(Error::param(format!(
            "output width {output_bits} unsupported"
        )));
    }
    let need = required_range(output_bits);
    let set = match (mode, table_set(output_bits)) {
        (SelectionMode::Table | SelectionMode::Strict, Some(m)) => RnsSet::new(m.to_vec())?,
        (SelectionMode::Table | SelectionMode::Strict, None) => {
            return Err(Error::param(format!(
                "no published moduli set for {output_bits} output bits; use general mode"
            )))
        }
        (SelectionMode::General, _) => {
            let mut m = 2u32;
            loop {
                let p = 1u64 << m;
                let set = RnsSet::new(vec![p - 1, p, p + 1])?;
                if set.dynamic_range() >= need {
                    break set;
                }
                m += 1;
            }
        }
    };
    let mut warnings = Vec::new();
    if mode == SelectionMode::Strict && set.dynamic_range() < need {
        warnings.push(format!(
            "dynamic range {} of {set} is below the {need} needed for {output_bits}-bit sums",
            set.dynamic_range()
        ));
    }
    Ok(Selection { set, warnings })
}

pub fn to_residues(x: u64, set: &RnsSet) -> Result<Vec<u64>> {
    if x >= set.dynamic_range() {
        return Err(Error::OutOfRange {
            value: x,
            what: format!("dynamic range {} of {set}", set.dynamic_range()),
        });
    }
    Ok(set.moduli.iter().map(|m| x % m).collect())
}

/// Modular inverse of `a` modulo `m` (coprime inputs).
fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    t.rem_euclid(m as i128) as u64
}

pub fn crt_reconstruct(residues: &[u64], set: &RnsSet) -> Result<u64> {
    if residues.len() != set.moduli.len() {
        return Err(Error::WidthMismatch {
            expected: set.moduli.len(),
            got: residues.len(),
        });
    }
    let range = set.dynamic_range() as u128;
    let mut x = 0u128;
    for (&r, &m) in residues.iter().zip(&set.moduli) {
        if r >= m {
            return Err(Error::OutOfRange {
                value: r,
                what: format!("residue modulo {m}"),
            });
        }
        let big = range / m as u128;
        let inv = mod_inverse((big % m as u128) as u64, m) as u128;
        x = (x + r as u128 * big % range * inv) % range;
    }
    Ok(x as u64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PqaJob {
    pub spec: AdderSpec,
    pub qubits: usize,
    pub inputs: (u64, u64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PqaPlan {
    pub set: RnsSet,
    pub a: u64,
    pub b: u64,
    pub dynamic_range: u64,
    pub jobs: Vec<PqaJob>,
}

impl PqaPlan {
    pub fn max_qubits(&self) -> usize {
        self.jobs.iter().map(|j| j.qubits).max().unwrap_or(0)
    }

    /// Integer whose residues are the per-job sums.
    pub fn reconstruct(&self, job_outputs: &[u64]) -> Result<u64> {
        crt_reconstruct(job_outputs, &self.set)
    }
}

/// One modulo-adder job per modulus. Modulus 3 uses `prefer_for_three`.
pub fn plan_pqa(a: u64, b: u64, set: &RnsSet, prefer_for_three: Family) -> Result<PqaPlan> {
    let jobs = set
        .moduli()
        .iter()
        .map(|&m| {
            let spec = AdderSpec::qma(m, Family::infer(m, prefer_for_three))?;
            let qubits = Adder::build(spec)?.layout.width;
            Ok(PqaJob {
                spec,
                qubits,
                inputs: (a % m, b % m),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PqaPlan {
        set: set.clone(),
        a,
        b,
        dynamic_range: set.dynamic_range(),
        jobs,
    })
}

/// Parallel-addition success probability from its per-modulus jobs: the
/// least reliable job.
pub fn aggregate_probability(per_modulus: &[f64]) -> Result<f64> {
    if per_modulus.is_empty() {
        return Err(Error::param("no probabilities to aggregate"));
    }
    if let Some(p) = per_modulus.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::param(format!("probability {p} outside [0, 1]")));
    }
    Ok(per_modulus.iter().copied().fold(f64::INFINITY, f64::min))
}
