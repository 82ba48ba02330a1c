//! Dense state-vector simulation of small circuits built from X, Z, H,
//! CNOT, SWAP and Toffoli.
//!
//! Wire 0 is the top wire of a circuit diagram and the most significant
//! bit of a basis index: on `q` wires, `|i_0 i_1 … i_{q-1}⟩` is amplitude
//! `Σ i_w · 2^{q-1-w}`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub const MAX_QUBITS: usize = 20;
const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantumError {
    #[error("{0} qubits outside 1..={MAX_QUBITS}")]
    Qubits(usize),
    #[error("wire {wire} out of range for {qubits} qubits")]
    Wire { wire: usize, qubits: usize },
    #[error("gate {0} repeats a wire")]
    RepeatedWire(String),
    #[error("state norm is {0}, expected 1")]
    Norm(f64),
    #[error("circuit line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("noise probability {0} outside [0, 1]")]
    Probability(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Gate {
    X(usize),
    Z(usize),
    H(usize),
    Cnot { control: usize, target: usize },
    Swap(usize, usize),
    Toffoli { c1: usize, c2: usize, target: usize },
}

impl Gate {
    pub fn wires(&self) -> Vec<usize> {
        match *self {
            Gate::X(w) | Gate::Z(w) | Gate::H(w) => vec![w],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Swap(a, b) => vec![a, b],
            Gate::Toffoli { c1, c2, target } => vec![c1, c2, target],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::X(_) => "X",
            Gate::Z(_) => "Z",
            Gate::H(_) => "H",
            Gate::Cnot { .. } => "CNOT",
            Gate::Swap(..) => "SWAP",
            Gate::Toffoli { .. } => "TOFFOLI",
        }
    }

    fn check(&self, qubits: usize) -> Result<(), QuantumError> {
        let w = self.wires();
        if let Some(&wire) = w.iter().find(|&&x| x >= qubits) {
            return Err(QuantumError::Wire { wire, qubits });
        }
        for i in 0..w.len() {
            if w[i + 1..].contains(&w[i]) {
                return Err(QuantumError::RepeatedWire(self.to_string()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        for w in self.wires() {
            write!(f, " {w}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Circuit {
    qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubits: usize, gates: Vec<Gate>) -> Result<Self, QuantumError> {
        if !(1..=MAX_QUBITS).contains(&qubits) {
            return Err(QuantumError::Qubits(qubits));
        }
        for g in &gates {
            g.check(qubits)?;
        }
        Ok(Circuit { qubits, gates })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn count(&self, name: &str) -> usize {
        self.gates.iter().filter(|g| g.name() == name).count()
    }

    pub fn run(&self, state: &mut StateVector) -> Result<(), QuantumError> {
        if state.qubits() != self.qubits {
            return Err(QuantumError::Qubits(state.qubits()));
        }
        for g in &self.gates {
            state.apply(*g)?;
        }
        Ok(())
    }

    pub fn then(mut self, other: &Circuit) -> Result<Circuit, QuantumError> {
        if other.qubits != self.qubits {
            return Err(QuantumError::Qubits(other.qubits));
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(self)
    }

    /// Runs with an X on each touched wire after each gate, independently
    /// with probability `eps`. Returns the number of faults.
    pub fn run_noisy<R: Rng + ?Sized>(
        &self,
        state: &mut StateVector,
        eps: f64,
        rng: &mut R,
    ) -> Result<usize, QuantumError> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(QuantumError::Probability(eps));
        }
        let mut faults = 0;
        for g in &self.gates {
            state.apply(*g)?;
            if eps > 0.0 {
                for w in g.wires() {
                    if rng.random_bool(eps) {
                        state.apply(Gate::X(w))?;
                        faults += 1;
                    }
                }
            }
        }
        Ok(faults)
    }

    /// One gate per line (`X 0`, `CNOT 0 1`, `TOFFOLI 0 1 2`); an optional
    /// `qubits N` line, otherwise the widest wire decides. `#` starts a
    /// comment.
    pub fn parse(text: &str) -> Result<Self, QuantumError> {
        let mut declared = None;
        let mut gates = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| QuantumError::Parse { line: i + 1, msg };
            let mut toks = line.split_whitespace();
            let head = toks.next().unwrap_or("").to_ascii_uppercase();
            let args: Vec<usize> = toks
                .map(|t| t.parse().map_err(|e| err(format!("bad wire {t:?}: {e}"))))
                .collect::<Result<_, _>>()?;
            let want = |k: usize| {
                if args.len() == k {
                    Ok(())
                } else {
                    Err(err(format!("{head} takes {k} wire(s), found {}", args.len())))
                }
            };
            let gate = match head.as_str() {
                "QUBITS" => {
                    want(1)?;
                    declared = Some(args[0]);
                    continue;
                }
                "X" => want(1).map(|_| Gate::X(args[0]))?,
                "Z" => want(1).map(|_| Gate::Z(args[0]))?,
                "H" => want(1).map(|_| Gate::H(args[0]))?,
                "CNOT" | "CX" => want(2).map(|_| Gate::Cnot { control: args[0], target: args[1] })?,
                "SWAP" => want(2).map(|_| Gate::Swap(args[0], args[1]))?,
                "TOFFOLI" | "CCX" | "CCNOT" => {
                    want(3).map(|_| Gate::Toffoli { c1: args[0], c2: args[1], target: args[2] })?
                }
                other => return Err(err(format!("unknown gate {other:?}"))),
            };
            gates.push(gate);
        }
        let widest = gates.iter().flat_map(|g| g.wires()).max().map_or(1, |w| w + 1);
        Circuit::new(declared.unwrap_or(widest), gates)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("qubits {}\n", self.qubits);
        for g in &self.gates {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }
}

impl FromStr for Circuit {
    type Err = QuantumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Circuit::parse(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(qubits: usize) -> Result<Self, QuantumError> {
        Self::basis(qubits, 0)
    }

    pub fn basis(qubits: usize, index: usize) -> Result<Self, QuantumError> {
        if !(1..=MAX_QUBITS).contains(&qubits) {
            return Err(QuantumError::Qubits(qubits));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, QuantumError> {
        let len = amps.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(QuantumError::Qubits(len));
        }
        let qubits = len.trailing_zeros() as usize;
        if qubits > MAX_QUBITS {
            return Err(QuantumError::Qubits(qubits));
        }
        let s = StateVector { qubits, amps };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QuantumError::Norm(norm));
        }
        Ok(s)
    }

    pub fn random<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> Result<Self, QuantumError> {
        let mut s = Self::zero(qubits)?;
        for a in s.amps.iter_mut() {
            *a = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
        let norm = s.norm_sqr().sqrt();
        s.amps.iter_mut().for_each(|a| *a /= norm);
        Ok(s)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|⟨a|b⟩|²`; blind to global phase.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    fn bit(&self, wire: usize) -> usize {
        1 << (self.qubits - 1 - wire)
    }

    pub fn apply(&mut self, gate: Gate) -> Result<(), QuantumError> {
        gate.check(self.qubits)?;
        let len = self.amps.len();
        match gate {
            Gate::X(w) => {
                let b = self.bit(w);
                for i in (0..len).filter(|i| i & b == 0) {
                    self.amps.swap(i, i | b);
                }
            }
            Gate::Z(w) => {
                let b = self.bit(w);
                for i in (0..len).filter(|i| i & b != 0) {
                    self.amps[i] = -self.amps[i];
                }
            }
            Gate::H(w) => {
                let b = self.bit(w);
                let r = std::f64::consts::FRAC_1_SQRT_2;
                for i in (0..len).filter(|i| i & b == 0) {
                    let (a0, a1) = (self.amps[i], self.amps[i | b]);
                    self.amps[i] = (a0 + a1) * r;
                    self.amps[i | b] = (a0 - a1) * r;
                }
            }
            Gate::Cnot { control, target } => {
                let (c, t) = (self.bit(control), self.bit(target));
                for i in (0..len).filter(|i| i & c != 0 && i & t == 0) {
                    self.amps.swap(i, i | t);
                }
            }
            Gate::Swap(a, b) => {
                let (a, b) = (self.bit(a), self.bit(b));
                for i in (0..len).filter(|i| i & a != 0 && i & b == 0) {
                    self.amps.swap(i, i ^ a ^ b);
                }
            }
            Gate::Toffoli { c1, c2, target } => {
                let (c, t) = (self.bit(c1) | self.bit(c2), self.bit(target));
                for i in (0..len).filter(|i| i & c == c && i & t == 0) {
                    self.amps.swap(i, i | t);
                }
            }
        }
        Ok(())
    }

    /// Probability of each basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Samples a basis index.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mut u = rng.random::<f64>();
        for (i, p) in self.probabilities().into_iter().enumerate() {
            if u < p {
                return i;
            }
            u -= p;
        }
        self.amps.len() - 1
    }

    /// `Σ_rest |Σ_top conj(ψ[top]) · self[top, rest]|²`: fidelity of the
    /// top `ψ.qubits()` wires with `ψ`, tracing out the rest.
    pub fn top_fidelity(&self, psi: &StateVector) -> f64 {
        let rest = self.qubits - psi.qubits;
        (0..1usize << rest)
            .map(|r| {
                psi.amps
                    .iter()
                    .enumerate()
                    .map(|(t, p)| p.conj() * self.amps[t << rest | r])
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .sum()
    }

    /// `self ⊗ |0…0⟩` on `extra` more wires below.
    pub fn extend(&self, extra: usize) -> Result<StateVector, QuantumError> {
        let mut s = StateVector::zero(self.qubits + extra)?;
        for (i, a) in self.amps.iter().enumerate() {
            s.amps[i << extra] = *a;
        }
        Ok(s)
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BellState {
    /// `(|00⟩ + |11⟩)/√2`
    Psi1,
    /// `(|01⟩ + |10⟩)/√2`
    Psi2,
    /// `(|01⟩ − |10⟩)/√2`
    Psi3,
}

impl BellState {
    pub const ALL: [BellState; 3] = [BellState::Psi1, BellState::Psi2, BellState::Psi3];

    pub fn state(self) -> StateVector {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let amps = match self {
            BellState::Psi1 => [c(r), c(0.0), c(0.0), c(r)],
            BellState::Psi2 => [c(0.0), c(r), c(r), c(0.0)],
            BellState::Psi3 => [c(0.0), c(r), c(-r), c(0.0)],
        };
        StateVector::from_amplitudes(amps.to_vec()).expect("normalised")
    }

    /// Basis outcome of the distinguishing circuit.
    pub fn outcome(self) -> usize {
        match self {
            BellState::Psi1 => 0b00,
            BellState::Psi2 => 0b01,
            BellState::Psi3 => 0b11,
        }
    }
}

/// `H` then `CNOT` from `|00⟩`.
pub fn bell_prep() -> Circuit {
    Circuit::new(2, vec![Gate::H(0), Gate::Cnot { control: 0, target: 1 }]).expect("valid")
}

/// `Z` then `X` on the second wire.
pub fn bell_to_singlet_circuit() -> Circuit {
    Circuit::new(2, vec![Gate::Z(1), Gate::X(1)]).expect("valid")
}

pub fn bell_to_singlet(state: &StateVector) -> Result<StateVector, QuantumError> {
    let mut s = state.clone();
    bell_to_singlet_circuit().run(&mut s)?;
    Ok(s)
}

/// `CNOT` then `H` on the first wire.
pub fn distinguish_circuit() -> Circuit {
    Circuit::new(2, vec![Gate::Cnot { control: 0, target: 1 }, Gate::H(0)]).expect("valid")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Distinction {
    pub probabilities: Vec<f64>,
    pub measured: usize,
    /// Set when the outcome is certain and matches one of the three states.
    pub identified: Option<BellState>,
}

pub fn distinguish_bell<R: Rng + ?Sized>(state: &StateVector, rng: &mut R) -> Result<Distinction, QuantumError> {
    let mut s = state.clone();
    distinguish_circuit().run(&mut s)?;
    let probabilities = s.probabilities();
    let measured = s.measure(rng);
    let identified = BellState::ALL
        .into_iter()
        .find(|b| (probabilities[b.outcome()] - 1.0).abs() < 1e-9);
    Ok(Distinction { probabilities, measured, identified })
}

/// Data wires 0..3, ancillas 3 and 4.
pub const QEC_QUBITS: usize = 5;

/// `α|0⟩ + β|1⟩ ↦ α|000⟩ + β|111⟩` with two CNOTs.
pub fn encoding_circuit() -> Circuit {
    Circuit::new(3, vec![Gate::Cnot { control: 0, target: 1 }, Gate::Cnot { control: 1, target: 2 }])
        .expect("valid")
}

pub fn qubit(alpha: Complex64, beta: Complex64) -> Result<StateVector, QuantumError> {
    StateVector::from_amplitudes(vec![alpha, beta])
}

pub fn repetition_encode(alpha: Complex64, beta: Complex64) -> Result<StateVector, QuantumError> {
    let mut s = qubit(alpha, beta)?.extend(2)?;
    encoding_circuit().run(&mut s)?;
    Ok(s)
}

pub fn inject_bitflip(state: &mut StateVector, wire: usize) -> Result<(), QuantumError> {
    state.apply(Gate::X(wire))
}

/// Four CNOTs onto the ancillas: wire 3 gets `d0 ⊕ d1`, wire 4 `d0 ⊕ d2`.
pub fn syndrome_circuit() -> Circuit {
    Circuit::new(
        QEC_QUBITS,
        vec![
            Gate::Cnot { control: 0, target: 3 },
            Gate::Cnot { control: 1, target: 3 },
            Gate::Cnot { control: 0, target: 4 },
            Gate::Cnot { control: 2, target: 4 },
        ],
    )
    .expect("valid")
}

/// Syndrome extraction followed by three Toffolis, with X gates moving
/// each syndrome to `|11⟩` in turn.
pub fn correction_circuit() -> Circuit {
    let tof = |target| Gate::Toffoli { c1: 3, c2: 4, target };
    let fix = vec![tof(0), Gate::X(4), tof(1), Gate::X(3), Gate::X(4), tof(2), Gate::X(3)];
    syndrome_circuit()
        .then(&Circuit::new(QEC_QUBITS, fix).expect("valid"))
        .expect("same width")
}

/// The variant with a single Toffoli: data wires 0 and 1 are moved onto the
/// ancillas, compared with wire 2, and the majority is copied back.
pub fn alt_correction_circuit() -> Circuit {
    let cx = |control, target| Gate::Cnot { control, target };
    Circuit::new(
        QEC_QUBITS,
        vec![
            cx(0, 3),
            cx(3, 0),
            cx(1, 4),
            cx(4, 1),
            cx(2, 3),
            cx(2, 4),
            Gate::Toffoli { c1: 3, c2: 4, target: 2 },
            cx(2, 1),
            cx(2, 0),
        ],
    )
    .expect("valid")
}

/// Runs `circuit` on `state ⊗ |00⟩`.
pub fn correct(state: &StateVector, circuit: &Circuit) -> Result<StateVector, QuantumError> {
    let mut s = state.extend(QEC_QUBITS - state.qubits())?;
    circuit.run(&mut s)?;
    Ok(s)
}

/// Ancilla pair `(wire 3, wire 4)` when it is a basis state.
pub fn syndrome_of(state: &StateVector) -> Option<(u8, u8)> {
    let mut s = state.extend(QEC_QUBITS - state.qubits()).ok()?;
    syndrome_circuit().run(&mut s).ok()?;
    let mut found = None;
    for (i, p) in s.probabilities().into_iter().enumerate() {
        if p > 1e-12 {
            let anc = ((i >> 1 & 1) as u8, (i & 1) as u8);
            if found.is_some_and(|f| f != anc) {
                return None;
            }
            found = Some(anc);
        }
    }
    found
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Corrector {
    ThreeToffoli,
    OneToffoli,
}

impl Corrector {
    pub fn circuit(self) -> Circuit {
        match self {
            Corrector::ThreeToffoli => correction_circuit(),
            Corrector::OneToffoli => alt_correction_circuit(),
        }
    }
}

impl FromStr for Corrector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "three-toffoli" => Ok(Corrector::ThreeToffoli),
            "one-toffoli" | "alt" => Ok(Corrector::OneToffoli),
            _ => Err(format!("unknown corrector {s:?}")),
        }
    }
}

/// Majority decoder onto wire 0: `CNOT(0,1)`, `CNOT(0,2)`, `Toffoli(1,2→0)`.
fn decoder() -> Circuit {
    Circuit::new(
        QEC_QUBITS,
        vec![
            Gate::Cnot { control: 0, target: 1 },
            Gate::Cnot { control: 0, target: 2 },
            Gate::Toffoli { c1: 1, c2: 2, target: 0 },
        ],
    )
    .expect("valid")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoiseRow {
    pub eps: f64,
    pub trials: u64,
    pub logical_errors: u64,
    pub logical_rate: f64,
    /// Binomial standard error of `logical_rate`.
    pub std_err: f64,
    /// An unencoded qubit through the same error box: `eps`.
    pub unprotected_rate: f64,
}

/// Test qubit for the sweep; amplitudes away from any symmetric point so a
/// logical X or a decohered qubit both show up as fidelity loss.
fn sweep_qubit() -> StateVector {
    let t: f64 = 0.3;
    qubit(c(t.cos()), c(t.sin())).expect("normalised")
}

/// One trial: ideal encoding, each data wire flipped with probability
/// `eps`, noisy correction, ideal majority decoding. A logical error is a
/// decoded fidelity below one.
pub fn noisy_trial<R: Rng + ?Sized>(corrector: &Circuit, eps: f64, rng: &mut R) -> Result<bool, QuantumError> {
    let psi = sweep_qubit();
    let mut s = repetition_encode(psi.amps[0], psi.amps[1])?.extend(2)?;
    for w in 0..3 {
        if rng.random_bool(eps) {
            s.apply(Gate::X(w))?;
        }
    }
    corrector.run_noisy(&mut s, eps, rng)?;
    decoder().run(&mut s)?;
    Ok(s.top_fidelity(&psi) < 1.0 - 1e-9)
}

const TRIAL_CHUNK: u64 = 4096;

/// Monte Carlo sweep. Chunk `j` of point `i` draws from stream
/// `(i << 32) | j` of a generator seeded with `seed`, so results do not
/// depend on the thread count.
pub fn noise_sweep(
    corrector: Corrector,
    eps_list: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<NoiseRow>, QuantumError> {
    if let Some(&e) = eps_list.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(QuantumError::Probability(e));
    }
    let circuit = corrector.circuit();
    let chunks = trials.div_ceil(TRIAL_CHUNK);
    eps_list
        .iter()
        .enumerate()
        .map(|(i, &eps)| {
            let errors = (0..chunks)
                .into_par_iter()
                .map(|j| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream((i as u64) << 32 | j);
                    let n = TRIAL_CHUNK.min(trials - j * TRIAL_CHUNK);
                    let mut e = 0u64;
                    for _ in 0..n {
                        e += noisy_trial(&circuit, eps, &mut rng)? as u64;
                    }
                    Ok(e)
                })
                .sum::<Result<u64, QuantumError>>()?;
            let rate = errors as f64 / trials as f64;
            Ok(NoiseRow {
                eps,
                trials,
                logical_errors: errors,
                logical_rate: rate,
                std_err: (rate * (1.0 - rate) / trials as f64).sqrt(),
                unprotected_rate: eps,
            })
        })
        .collect()
}

/// Exact logical error rate by summing over every fault pattern. There are
/// `3 + Σ wires` fault locations, so only usable for small `eps` grids.
pub fn exact_logical_rate(corrector: Corrector, eps: f64) -> Result<f64, QuantumError> {
    let circuit = corrector.circuit();
    let locations = 3 + circuit.gates().iter().map(|g| g.wires().len()).sum::<usize>();
    let psi = sweep_qubit();
    let base = repetition_encode(psi.amps[0], psi.amps[1])?.extend(2)?;
    let dec = decoder();
    (0..1u64 << locations)
        .into_par_iter()
        .map(|pattern| {
            let k = pattern.count_ones() as i32;
            let weight = eps.powi(k) * (1.0 - eps).powi(locations as i32 - k);
            if weight == 0.0 {
                return Ok(0.0);
            }
            let mut s = base.clone();
            for w in 0..3 {
                if pattern >> w & 1 == 1 {
                    s.apply(Gate::X(w))?;
                }
            }
            let mut loc = 3;
            for g in circuit.gates() {
                s.apply(*g)?;
                for w in g.wires() {
                    if pattern >> loc & 1 == 1 {
                        s.apply(Gate::X(w))?;
                    }
                    loc += 1;
                }
            }
            dec.run(&mut s)?;
            Ok(if s.top_fidelity(&psi) < 1.0 - 1e-9 { weight } else { 0.0 })
        })
        .sum()
}

pub fn noise_csv(rows: &[NoiseRow]) -> String {
    let mut s = String::from("eps,trials,logical_errors,logical_rate,std_err,unprotected_rate\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.eps, r.trials, r.logical_errors, r.logical_rate, r.std_err, r.unprotected_rate
        ));
    }
    s
}
