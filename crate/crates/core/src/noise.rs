//! Parametric ion-trap noise: depolarizing gate errors, readout flips and
//! distance-attenuated crosstalk onto spectator qubits, sampled as
//! Monte-Carlo Pauli trajectories.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simcore::{BasisFrame, Bits, Circuit, Gate, GateKind, Pauli, QuantumState, SparseState};
use crate::tenancy::DeviceModel;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseParams {
    pub p1: f64,
    pub p2: f64,
    pub p_meas: f64,
    pub ct_strength: f64,
    pub ct_coherent_angle: f64,
    pub ct_decay: f64,
    pub toffoli_factor: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams {
            p1: 0.0,
            p2: 0.0,
            p_meas: 0.0,
            ct_strength: 0.0,
            ct_coherent_angle: 0.0,
            ct_decay: 0.8,
            toffoli_factor: 2.0,
        }
    }
}

impl NoiseParams {
    /// No noise at all.
    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        for field in NoiseField::PROBABILITIES {
            let v = self.get(field);
            if !(0.0..0.5).contains(&v) {
                return Err(Error::param(format!(
                    "{field} must lie in [0, 0.5), got {v}"
                )));
            }
        }
        if !(self.ct_decay > 0.0 && self.ct_decay <= 1.0) {
            return Err(Error::param(format!(
                "ct_decay must lie in (0, 1], got {}",
                self.ct_decay
            )));
        }
        if !(0.0..=std::f64::consts::FRAC_PI_8).contains(&self.ct_coherent_angle) {
            return Err(Error::param(format!(
                "ct_coherent_angle must lie in [0, pi/8], got {}",
                self.ct_coherent_angle
            )));
        }
        if !(self.toffoli_factor >= 1.0 && self.toffoli_factor.is_finite()) {
            return Err(Error::param(format!(
                "toffoli_factor must be >= 1, got {}",
                self.toffoli_factor
            )));
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        NoiseField::PROBABILITIES
            .iter()
            .all(|&f| self.get(f) == 0.0)
            && self.ct_coherent_angle == 0.0
    }

    pub fn get(&self, field: NoiseField) -> f64 {
        match field {
            NoiseField::P1 => self.p1,
            NoiseField::P2 => self.p2,
            NoiseField::PMeas => self.p_meas,
            NoiseField::CtStrength => self.ct_strength,
            NoiseField::CtCoherentAngle => self.ct_coherent_angle,
        }
    }

    pub fn set(&mut self, field: NoiseField, value: f64) {
        match field {
            NoiseField::P1 => self.p1 = value,
            NoiseField::P2 => self.p2 = value,
            NoiseField::PMeas => self.p_meas = value,
            NoiseField::CtStrength => self.ct_strength = value,
            NoiseField::CtCoherentAngle => self.ct_coherent_angle = value,
        }
    }

    /// Depolarizing probability of a gate on its own operands.
    pub fn gate_error(&self, kind: GateKind) -> f64 {
        match kind.arity() {
            1 if kind != GateKind::Measure => self.p1,
            2 => self.p2,
            3 => (self.p2 * self.toffoli_factor).min(1.0),
            _ => 0.0,
        }
    }
}

/// Noise parameters a calibration may vary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseField {
    P1,
    P2,
    PMeas,
    CtStrength,
    CtCoherentAngle,
}

impl NoiseField {
    pub const ALL: [NoiseField; 5] = [
        NoiseField::P1,
        NoiseField::P2,
        NoiseField::PMeas,
        NoiseField::CtStrength,
        NoiseField::CtCoherentAngle,
    ];
    const PROBABILITIES: [NoiseField; 4] = [
        NoiseField::P1,
        NoiseField::P2,
        NoiseField::PMeas,
        NoiseField::CtStrength,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NoiseField::P1 => "p1",
            NoiseField::P2 => "p2",
            NoiseField::PMeas => "p_meas",
            NoiseField::CtStrength => "ct_strength",
            NoiseField::CtCoherentAngle => "ct_coherent_angle",
        }
    }

    /// Largest value the calibration grid visits.
    fn upper(self) -> f64 {
        match self {
            NoiseField::CtCoherentAngle => std::f64::consts::FRAC_PI_8,
            _ => 0.3,
        }
    }
}

impl fmt::Display for NoiseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NoiseField::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::param(format!("unknown noise parameter {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectatorChannel {
    pub qubit: usize,
    pub probability: f64,
    pub angle: f64,
}

/// Crosstalk a multi-qubit gate injects on every other device qubit,
/// attenuated by chain distance to the nearest operand.
pub fn spectator_channels(
    gate: &Gate,
    device: &DeviceModel,
    params: &NoiseParams,
) -> Result<Vec<SpectatorChannel>> {
    if !gate.kind.is_multi_qubit() {
        return Ok(Vec::new());
    }
    let operand_pos = gate
        .operands
        .iter()
        .map(|&q| device.position(q))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(device.qubit_count());
    for q in 0..device.qubit_count() {
        if gate.touches(q) {
            continue;
        }
        let p = device.position(q)?;
        let d = operand_pos
            .iter()
            .map(|&o| o.abs_diff(p))
            .min()
            .unwrap_or(0);
        let atten = params.ct_decay.powi(d as i32);
        out.push(SpectatorChannel {
            qubit: q,
            probability: params.ct_strength * atten,
            angle: params.ct_coherent_angle * atten,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// Pauli string, one letter per affected qubit.
    Pauli(String),
    /// Coherent ZZ rotation between a gate target and a spectator.
    Coherent,
    ReadoutFlip,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryEvent {
    pub gate_index: usize,
    pub kind: ErrorKind,
    pub qubits: Vec<usize>,
}

/// Uniform non-identity Pauli string on `k` qubits.
fn random_pauli<R: Rng>(rng: &mut R, k: usize) -> Vec<Pauli> {
    let code = rng.random_range(1..(1usize << (2 * k)));
    (0..k).map(|i| Pauli::from_index(code >> (2 * i))).collect()
}

fn pauli_label(ps: &[Pauli]) -> String {
    ps.iter().map(|p| p.label()).collect()
}

/// Bernoulli draw that consumes no randomness when `p` is zero.
fn chance<R: Rng>(rng: &mut R, p: f64) -> bool {
    p > 0.0 && rng.random::<f64>() < p
}

/// One noisy gate. Returns the readout bit for MEASURE.
#[allow(clippy::too_many_arguments)]
pub fn apply_noisy_gate<S: QuantumState<f64>, R: Rng>(
    state: &mut S,
    gate: &Gate,
    gate_index: usize,
    device: &DeviceModel,
    params: &NoiseParams,
    rng: &mut R,
    mut events: Option<&mut Vec<TrajectoryEvent>>,
) -> Result<Option<bool>> {
    gate.validate(state.width())?;
    let mut log = |kind: ErrorKind, qubits: Vec<usize>| {
        if let Some(ev) = events.as_deref_mut() {
            ev.push(TrajectoryEvent {
                gate_index,
                kind,
                qubits,
            });
        }
    };
    if gate.kind == GateKind::Measure {
        let q = gate.operands[0];
        let mut bit = state.measure(q, rng.random::<f64>());
        if chance(rng, params.p_meas) {
            bit = !bit;
            log(ErrorKind::ReadoutFlip, vec![q]);
        }
        return Ok(Some(bit));
    }
    state.apply_gate_mut(gate)?;
    if chance(rng, params.gate_error(gate.kind)) {
        let paulis = random_pauli(rng, gate.operands.len());
        for (&q, &p) in gate.operands.iter().zip(&paulis) {
            state.apply_pauli(q, p);
        }
        log(
            ErrorKind::Pauli(pauli_label(&paulis)),
            gate.operands.clone(),
        );
    }
    if gate.kind.is_multi_qubit() && (params.ct_strength > 0.0 || params.ct_coherent_angle > 0.0) {
        let target = gate.target();
        for ch in spectator_channels(gate, device, params)? {
            if ch.qubit >= state.width() {
                continue;
            }
            if chance(rng, ch.probability) {
                let p = random_pauli(rng, 1);
                state.apply_pauli(ch.qubit, p[0]);
                log(ErrorKind::Pauli(pauli_label(&p)), vec![ch.qubit]);
            }
            if ch.angle > 0.0 {
                state.apply_zz(target, ch.qubit, ch.angle);
                log(ErrorKind::Coherent, vec![target, ch.qubit]);
            }
        }
    }
    Ok(None)
}

/// Per-trajectory generator derived from the master seed and index alone.
pub fn trajectory_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// Readout bits in MEASURE order.
    pub bits: Bits,
    pub events: Vec<TrajectoryEvent>,
}

/// Runs `circuit` once from `initial` with sampled noise.
pub fn run_trajectory<S: QuantumState<f64>>(
    circuit: &Circuit,
    initial: &S,
    device: &DeviceModel,
    params: &NoiseParams,
    rng: &mut impl Rng,
    record_events: bool,
) -> Result<Trajectory> {
    if initial.width() != circuit.width {
        return Err(Error::WidthMismatch {
            expected: circuit.width,
            got: initial.width(),
        });
    }
    let mut state = initial.clone();
    let mut bits = Vec::new();
    let mut events = Vec::new();
    for layer in circuit.schedule() {
        for i in layer {
            let ev = record_events.then_some(&mut events);
            if let Some(b) =
                apply_noisy_gate(&mut state, &circuit.gates()[i], i, device, params, rng, ev)?
            {
                bits.push(b);
            }
        }
    }
    Ok(Trajectory {
        bits: Bits(bits),
        events,
    })
}

/// Readout values of `shots` independent trajectories starting from basis
/// state `initial_index`. Results do not depend on the number of workers.
pub fn sample_readouts(
    circuit: &Circuit,
    initial_index: u64,
    device: &DeviceModel,
    params: &NoiseParams,
    shots: usize,
    master_seed: u64,
) -> Result<Vec<u64>> {
    let initial = SparseState::<f64>::basis(circuit.width, initial_index)?;
    (0..shots as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trajectory_rng(master_seed, i);
            run_trajectory(circuit, &initial, device, params, &mut rng, false)
                .map(|t| t.bits.value())
        })
        .collect()
}

/// Like [`sample_readouts`], for circuits whose `tracked` qubits only ever
/// hold a basis state and touch the other qubits through diagonal gates.
/// Those qubits are then followed exactly in a [`BasisFrame`], which draws
/// the same random numbers as the full state and so yields identical
/// readouts. Other circuits fall back to the sparse backend.
pub fn sample_tracked_readouts(
    circuit: &Circuit,
    initial_index: u64,
    tracked: &[usize],
    device: &DeviceModel,
    params: &NoiseParams,
    shots: usize,
    master_seed: u64,
) -> Result<Vec<u64>> {
    let measured_tracked = circuit
        .gates()
        .iter()
        .filter(|g| g.kind == GateKind::Measure)
        .all(|g| tracked.contains(&g.operands[0]));
    if !measured_tracked || !BasisFrame::supports(circuit.gates(), tracked) {
        return sample_readouts(circuit, initial_index, device, params, shots, master_seed);
    }
    let initial = BasisFrame::new(circuit.width, initial_index, tracked)?;
    (0..shots as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trajectory_rng(master_seed, i);
            run_trajectory(circuit, &initial, device, params, &mut rng, false)
                .map(|t| t.bits.value())
        })
        .collect()
}

/// One measured case: a circuit with MEASURE gates, its basis input, and the
/// readout value counted as correct.
#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationCase {
    pub circuit: Circuit,
    pub initial_index: u64,
    pub expected: u64,
    /// Qubits followed in a basis frame; empty simulates the full state.
    pub tracked: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationTarget {
    pub label: String,
    pub cases: Vec<CalibrationCase>,
    pub probability: f64,
}

/// Fraction of correct readouts, averaged over the cases.
pub fn success_probability(
    cases: &[CalibrationCase],
    device: &DeviceModel,
    params: &NoiseParams,
    shots: usize,
    master_seed: u64,
) -> Result<f64> {
    if cases.is_empty() {
        return Err(Error::param("no cases to evaluate"));
    }
    let mut total = 0.0;
    for (ci, case) in cases.iter().enumerate() {
        let seed = master_seed.wrapping_add((ci as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let readouts = if case.tracked.is_empty() {
            sample_readouts(
                &case.circuit,
                case.initial_index,
                device,
                params,
                shots,
                seed,
            )?
        } else {
            sample_tracked_readouts(
                &case.circuit,
                case.initial_index,
                &case.tracked,
                device,
                params,
                shots,
                seed,
            )?
        };
        total += readouts.iter().filter(|&&r| r == case.expected).count() as f64 / shots as f64;
    }
    Ok(total / cases.len() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub params: NoiseParams,
    /// Sum of squared deviations at `params`.
    pub residual: f64,
    /// Simulated probability per target, in target order.
    pub achieved: Vec<f64>,
    pub evaluations: usize,
}

/// Half-width the calibration must resolve each target probability to.
pub const CALIBRATION_PRECISION: f64 = 0.05;
const GRID_POINTS: usize = 28;
const GRID_FLOOR: f64 = 1e-4;
const SWEEPS: usize = 4;

/// Zero followed by a logarithmic grid up to the field's upper bound.
pub fn log_grid(field: NoiseField) -> Vec<f64> {
    let hi = field.upper();
    let ratio = (hi / GRID_FLOOR).powf(1.0 / (GRID_POINTS - 1) as f64);
    std::iter::once(0.0)
        .chain((0..GRID_POINTS).map(|i| GRID_FLOOR * ratio.powi(i as i32)))
        .collect()
}

/// Fits the `free` parameters by coordinate descent over a logarithmic grid,
/// followed by a finer search between the neighbors of each optimum. All
/// evaluations share the same random streams.
pub fn calibrate(
    targets: &[CalibrationTarget],
    free: &[NoiseField],
    start: NoiseParams,
    device: &DeviceModel,
    budget: usize,
    seed: u64,
) -> Result<CalibrationResult> {
    if targets.is_empty() {
        return Err(Error::param("calibration needs at least one target"));
    }
    start.validate()?;
    for t in targets {
        let samples = budget * t.cases.len();
        let half_width = 3.0 * (0.25 / samples.max(1) as f64).sqrt();
        if half_width > CALIBRATION_PRECISION + 1e-12 {
            return Err(Error::param(format!(
                "budget of {budget} trajectories per case resolves {} only to +/-{half_width:.3}",
                t.label
            )));
        }
    }
    let mut evaluations = 0;
    let mut evaluate = |p: &NoiseParams| -> Result<(f64, Vec<f64>)> {
        evaluations += 1;
        let mut loss = 0.0;
        let mut achieved = Vec::with_capacity(targets.len());
        for (ti, t) in targets.iter().enumerate() {
            let s = success_probability(&t.cases, device, p, budget, seed.wrapping_add(ti as u64))?;
            loss += (s - t.probability).powi(2);
            achieved.push(s);
        }
        Ok((loss, achieved))
    };

    let mut params = start;
    let (mut best, mut achieved) = evaluate(&params)?;
    for _ in 0..SWEEPS {
        let mut improved = false;
        for &field in free {
            let grid = log_grid(field);
            let mut pick = (params.get(field), best, achieved.clone());
            for &v in &grid {
                let mut trial = params;
                trial.set(field, v);
                let (loss, ach) = evaluate(&trial)?;
                // ties go to the smaller value
                if loss < pick.1 - 1e-15 || (loss <= pick.1 + 1e-15 && v < pick.0) {
                    pick = (v, loss, ach);
                }
            }
            // refine between the grid neighbors of the pick
            let pos = grid
                .iter()
                .position(|&g| g >= pick.0)
                .unwrap_or(grid.len() - 1);
            let lo = grid[pos.saturating_sub(1)];
            let hi = grid[(pos + 1).min(grid.len() - 1)];
            for i in 1..8 {
                let v = lo + (hi - lo) * i as f64 / 8.0;
                let mut trial = params;
                trial.set(field, v);
                let (loss, ach) = evaluate(&trial)?;
                if loss < pick.1 - 1e-15 {
                    pick = (v, loss, ach);
                }
            }
            if pick.0 != params.get(field) {
                improved |= pick.1 < best - 1e-15;
                params.set(field, pick.0);
                best = pick.1;
                achieved = pick.2;
            }
        }
        if !improved {
            break;
        }
    }
    Ok(CalibrationResult {
        params,
        residual: best,
        achieved,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simcore::StateVector;

    fn measured(mut c: Circuit, qubits: &[usize]) -> Circuit {
        for &q in qubits {
            c.push(Gate::measure(q)).unwrap();
        }
        c
    }

    #[test]
    fn channel_examples() {
        let d = DeviceModel::default();
        let mut p = NoiseParams {
            ct_strength: 0.1,
            ct_coherent_angle: 0.05,
            ct_decay: 1.0,
            ..NoiseParams::default()
        };
        let ch = spectator_channels(&Gate::cnot(5, 6), &d, &p).unwrap();
        assert_eq!(ch.len(), 18);
        assert!(ch.iter().all(|c| c.probability == 0.1 && c.angle == 0.05));
        p.ct_decay = 0.5;
        let ch = spectator_channels(&Gate::cnot(5, 6), &d, &p).unwrap();
        let at8 = ch.iter().find(|c| c.qubit == 8).unwrap();
        assert!((at8.probability - 0.025).abs() < 1e-15);
        assert!(spectator_channels(&Gate::x(3), &d, &p).unwrap().is_empty());
        assert!(spectator_channels(&Gate::cnot(5, 25), &d, &p).is_err());
    }

    #[test]
    fn injected_probability_linear_in_active_gates() {
        let d = DeviceModel::line(40);
        let p = NoiseParams {
            ct_strength: 0.01,
            ct_decay: 1.0,
            ..NoiseParams::default()
        };
        let per_gate: f64 = spectator_channels(&Gate::cnot(0, 1), &d, &p)
            .unwrap()
            .iter()
            .map(|c| c.probability)
            .sum();
        for k in 1..=4 {
            let total: f64 = (0..k)
                .flat_map(|i| spectator_channels(&Gate::cnot(2 * i, 2 * i + 1), &d, &p).unwrap())
                .map(|c| c.probability)
                .sum();
            assert!((total - k as f64 * per_gate).abs() < 1e-12);
        }
    }

    #[test]
    fn noiseless_matches_exact() {
        let d = DeviceModel::line(3);
        let mut c = Circuit::new(3, "ghz");
        c.push(Gate::h(0)).unwrap();
        c.push(Gate::cnot(0, 1)).unwrap();
        c.push(Gate::toffoli(0, 1, 2)).unwrap();
        let p = NoiseParams::noiseless();
        let mut rng = trajectory_rng(1, 0);
        let mut dense = StateVector::<f64>::zero(3).unwrap();
        let mut sparse = SparseState::<f64>::basis(3, 0).unwrap();
        for (i, g) in c.gates().iter().enumerate() {
            apply_noisy_gate(&mut dense, g, i, &d, &p, &mut rng, None).unwrap();
            apply_noisy_gate(&mut sparse, g, i, &d, &p, &mut rng, None).unwrap();
        }
        let exact = crate::simcore::run_pure(&c, &StateVector::zero(3).unwrap()).unwrap();
        assert_eq!(dense, exact);
        assert_eq!(sparse.to_dense().unwrap(), exact);
        // no randomness consumed by noiseless gates
        let mut a = trajectory_rng(1, 0);
        assert_eq!(a.random::<u64>(), trajectory_rng(1, 0).random::<u64>());
    }

    #[test]
    fn full_two_qubit_depolarizing() {
        // 12 of the 15 non-identity Paulis flip at least one bit of |00>
        let d = DeviceModel::line(2);
        let p = NoiseParams {
            p2: 1.0,
            ..NoiseParams::default()
        };
        let c = measured(
            Circuit::from_gates(2, "c", vec![Gate::cnot(0, 1)]).unwrap(),
            &[0, 1],
        );
        let shots = 10_000;
        let r = sample_readouts(&c, 0, &d, &p, shots, 9).unwrap();
        let frac = r.iter().filter(|&&v| v != 0).count() as f64 / shots as f64;
        assert!(frac >= 0.7, "{frac}");
        let sigma = (0.8f64 * 0.2 / shots as f64).sqrt();
        assert!((frac - 12.0 / 15.0).abs() < 3.0 * sigma, "{frac}");
    }

    #[test]
    fn spectator_flip_rate() {
        let d = DeviceModel::line(3);
        let p = NoiseParams {
            ct_strength: 0.1,
            ct_decay: 1.0,
            ..NoiseParams::default()
        };
        let c = measured(
            Circuit::from_gates(3, "c", vec![Gate::cnot(0, 1)]).unwrap(),
            &[2],
        );
        let shots = 1000;
        let r = sample_readouts(&c, 0, &d, &p, shots, 4).unwrap();
        let rate = r.iter().filter(|&&v| v == 1).count() as f64 / shots as f64;
        let expect = 0.1 * 2.0 / 3.0;
        let sigma = (expect * (1.0 - expect) / shots as f64).sqrt();
        assert!((rate - expect).abs() < 3.0 * sigma, "{rate}");
    }

    #[test]
    fn readout_flip_half() {
        let d = DeviceModel::line(1);
        let p = NoiseParams {
            p_meas: 0.5,
            ..NoiseParams::default()
        };
        let c = measured(Circuit::new(1, "m"), &[0]);
        let shots = 4000;
        let r = sample_readouts(&c, 0, &d, &p, shots, 2).unwrap();
        let ones = r.iter().sum::<u64>() as f64 / shots as f64;
        assert!((ones - 0.5).abs() < 3.0 * (0.25 / shots as f64).sqrt());
    }

    fn ladder() -> Circuit {
        let mut c = Circuit::new(4, "ladder");
        for _ in 0..3 {
            c.push(Gate::cnot(0, 1)).unwrap();
            c.push(Gate::toffoli(0, 1, 2)).unwrap();
            c.push(Gate::x(3)).unwrap();
            c.push(Gate::cnot(2, 3)).unwrap();
        }
        measured(c, &[0, 1, 2, 3])
    }

    fn expected_readout(c: &Circuit, input: u64) -> u64 {
        let mut s = SparseState::<f64>::basis(c.width, input).unwrap();
        for g in c.gates().iter().filter(|g| g.kind != GateKind::Measure) {
            s.apply_gate_mut(g).unwrap();
        }
        s.entries()[0].0
    }

    #[test]
    fn monotone_in_each_parameter() {
        let c = ladder();
        let case = CalibrationCase {
            expected: expected_readout(&c, 1),
            circuit: c,
            initial_index: 1,
            tracked: Vec::new(),
        };
        let d = DeviceModel::line(6);
        let shots = 3000;
        for field in NoiseField::PROBABILITIES {
            let mut last = 1.0f64;
            for v in [0.01, 0.05, 0.15] {
                let mut p = NoiseParams::default();
                p.set(field, v);
                let s =
                    success_probability(std::slice::from_ref(&case), &d, &p, shots, 11).unwrap();
                let sigma = (2.0 * 0.25 / shots as f64).sqrt();
                assert!(s <= last + 1.96 * sigma, "{field}={v}: {s} > {last}");
                last = s;
            }
        }
    }

    #[test]
    fn event_log_reproducible() {
        let c = ladder();
        let d = DeviceModel::line(4);
        let p = NoiseParams {
            p1: 0.1,
            p2: 0.2,
            p_meas: 0.1,
            ct_strength: 0.1,
            ct_coherent_angle: 0.1,
            ..NoiseParams::default()
        };
        let init = SparseState::<f64>::basis(4, 3).unwrap();
        for i in 0..20 {
            let a = run_trajectory(&c, &init, &d, &p, &mut trajectory_rng(5, i), true).unwrap();
            let b = run_trajectory(&c, &init, &d, &p, &mut trajectory_rng(5, i), true).unwrap();
            assert_eq!(a, b);
            assert!(a.events.iter().all(|e| e.qubits.iter().all(|&q| q < 4)));
        }
    }

    #[test]
    fn validation() {
        assert!(NoiseParams::default().validate().is_ok());
        let bad = [
            NoiseParams {
                p2: 0.5,
                ..Default::default()
            },
            NoiseParams {
                p1: -0.1,
                ..Default::default()
            },
            NoiseParams {
                ct_decay: 0.0,
                ..Default::default()
            },
            NoiseParams {
                ct_coherent_angle: 0.5,
                ..Default::default()
            },
            NoiseParams {
                toffoli_factor: 0.5,
                ..Default::default()
            },
        ];
        for p in bad {
            assert!(p.validate().is_err(), "{p:?}");
        }
        let p: NoiseParams = serde_json::from_str(r#"{"p2": 0.01, "ct_decay": 0.9}"#).unwrap();
        assert_eq!(p.p2, 0.01);
        assert_eq!(p.toffoli_factor, 2.0);
        assert!(serde_json::from_str::<NoiseParams>(r#"{"p3": 0.01}"#).is_err());
    }

    #[test]
    fn calibrate_noiseless_targets_to_zero() {
        let c = ladder();
        let target = CalibrationTarget {
            label: "ladder".into(),
            cases: vec![CalibrationCase {
                expected: expected_readout(&c, 0),
                circuit: c,
                initial_index: 0,
                tracked: Vec::new(),
            }],
            probability: 1.0,
        };
        let free = [NoiseField::P2, NoiseField::PMeas];
        let start = NoiseParams {
            p2: 0.05,
            p_meas: 0.05,
            ..Default::default()
        };
        let r = calibrate(
            std::slice::from_ref(&target),
            &free,
            start,
            &DeviceModel::line(4),
            900,
            1,
        )
        .unwrap();
        assert_eq!(r.params.p2, 0.0);
        assert_eq!(r.params.p_meas, 0.0);
        assert_eq!(r.residual, 0.0);
        assert!(calibrate(&[target], &free, start, &DeviceModel::line(4), 100, 1).is_err());
    }
}

#[cfg(test)]
mod frame_tests {
    use super::*;
    use crate::adders::build_qfa;
    use crate::attacks::{build_attack, AttackKind, AttackSpec};
    use crate::tenancy::{allocate, merge_timeline, TenancyModel};

    #[test]
    fn frame_readouts_equal_full_state() {
        let adder = build_qfa(3).unwrap();
        let mut victim = adder.circuit.clone();
        for &q in &adder.layout.output {
            victim.push(Gate::measure(q)).unwrap();
        }
        let device = DeviceModel::line(11);
        let plan = allocate(5, TenancyModel::Grey, &device, adder.circuit.depth()).unwrap();
        let params = NoiseParams {
            p1: 0.02,
            p2: 0.05,
            p_meas: 0.03,
            ct_strength: 0.05,
            ct_coherent_angle: 0.3,
            ..NoiseParams::default()
        };
        for kind in [AttackKind::Sac, AttackKind::Apc] {
            let spec = AttackSpec::new(kind, plan.attack_layers, 1, plan.pairs.len()).unwrap();
            let merged = merge_timeline(&victim, &build_attack(&spec).unwrap(), &plan).unwrap();
            let local = adder.input_index(3, 2).unwrap();
            let index = plan
                .victim
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &q)| acc | (((local >> i) & 1) << q));
            let full = sample_readouts(&merged, index, &device, &params, 300, 3).unwrap();
            let frame =
                sample_tracked_readouts(&merged, index, &plan.victim, &device, &params, 300, 3)
                    .unwrap();
            assert_eq!(full, frame, "{kind}");
        }
    }
}
