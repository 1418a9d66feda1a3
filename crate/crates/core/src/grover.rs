//! Amplitude-level simulation of Grover search over an `n`-element index
//! register, plus closed-form and recurrence oracles and a small full
//! statevector check of the phase-kickback oracle.
//!
//! The fingerprint register is a deterministic function of the index and
//! both the oracle and the diffusion act on it trivially, so the simulated
//! state is just `n` real amplitudes. [`gate_level_oracle_check`] confirms
//! the reduction on small registers.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fingerprint::FingerprintWord;

/// Norm tolerance for amplitude vectors after every operation.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Largest register the full statevector check will allocate.
pub const MAX_GATE_LEVEL_QUBITS: usize = 14;

/// Slack added before flooring `pi / (4 theta)`, so that exact integer
/// ratios such as `n = 2` are not pushed below by `asin` rounding.
const SCHEDULE_SLACK: f64 = 1e-9;

/// `ceil(log2 n)`, with `ceil_log2(1) == 0`.
pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Qubits used by one run: index register, fingerprint register, ancilla.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitBudget {
    pub index: usize,
    pub fingerprint: usize,
    pub ancilla: usize,
}

impl QubitBudget {
    pub fn new(n: usize, fingerprint_width: usize) -> Self {
        Self {
            index: ceil_log2(n),
            fingerprint: fingerprint_width,
            ancilla: 1,
        }
    }

    pub fn total(&self) -> usize {
        self.index + self.fingerprint + self.ancilla
    }
}

/// Real amplitudes over the index register.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeState {
    amplitudes: Vec<f64>,
    budget: QubitBudget,
}

impl AmplitudeState {
    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn n(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn budget(&self) -> QubitBudget {
        self.budget
    }

    pub fn with_fingerprint_width(mut self, width: usize) -> Self {
        self.budget.fingerprint = width;
        self
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum()
    }

    pub fn probability(&self, k: usize) -> f64 {
        self.amplitudes.get(k).map_or(0.0, |a| a * a)
    }

    /// Total probability of the given indices.
    pub fn probability_of(&self, indices: &[usize]) -> f64 {
        indices.iter().map(|&k| self.probability(k)).sum()
    }

    /// Samples an index with probability `amplitude^2`.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let weights = self.amplitudes.iter().map(|a| a * a);
        WeightedIndex::new(weights)
            .expect("normalized state has positive total weight")
            .sample(rng)
    }
}

/// Uniform superposition `1/sqrt(n)` over `n` indices.
pub fn init_uniform(n: usize) -> Result<AmplitudeState> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "register dimension must be at least 1".into(),
        ));
    }
    Ok(AmplitudeState {
        amplitudes: vec![1.0 / (n as f64).sqrt(); n],
        budget: QubitBudget::new(n, 0),
    })
}

/// The oracle's acceptance set.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OracleSpec {
    marked: Vec<usize>,
}

impl OracleSpec {
    /// Sorts and deduplicates `marked`; every index must be `< n`.
    pub fn new(mut marked: Vec<usize>, n: usize) -> Result<Self> {
        marked.sort_unstable();
        marked.dedup();
        if let Some(&k) = marked.last().filter(|&&k| k >= n) {
            return Err(Error::IndexOutOfRange { index: k, bound: n });
        }
        Ok(Self { marked })
    }

    /// Indices whose fingerprint equals `target`.
    pub fn from_fingerprints(words: &[FingerprintWord], target: &FingerprintWord) -> Result<Self> {
        if let Some(w) = words.iter().find(|w| w.width() != target.width()) {
            return Err(Error::WidthMismatch {
                expected: target.width(),
                found: w.width(),
            });
        }
        let marked = words
            .iter()
            .enumerate()
            .filter(|(_, w)| *w == target)
            .map(|(k, _)| k)
            .collect();
        Ok(Self { marked })
    }

    pub fn marked(&self) -> &[usize] {
        &self.marked
    }

    /// Marked count `t`.
    pub fn t(&self) -> usize {
        self.marked.len()
    }
}

/// Negates the amplitude of every marked index.
pub fn oracle_phase_flip(state: &mut AmplitudeState, oracle: &OracleSpec) -> Result<()> {
    let n = state.n();
    if let Some(&k) = oracle.marked().iter().find(|&&k| k >= n) {
        return Err(Error::IndexOutOfRange { index: k, bound: n });
    }
    for &k in oracle.marked() {
        state.amplitudes[k] = -state.amplitudes[k];
    }
    Ok(())
}

/// Inversion about the mean, `2R - I` with `R = J / n`.
pub fn diffusion(state: &mut AmplitudeState) {
    let scale = 1.0 / state.n() as f64;
    diffusion_with_projector_scale(state, scale);
}

/// `2R - I` with `R = scale * J`. Only `scale = 1/n` is unitary; other
/// values exist to exercise the equivalence checks.
pub fn diffusion_with_projector_scale(state: &mut AmplitudeState, scale: f64) {
    let sum: f64 = state.amplitudes.iter().sum();
    let reflected = 2.0 * scale * sum;
    for a in &mut state.amplitudes {
        *a = reflected - *a;
    }
}

/// The iteration schedule `r = floor(pi / (4 theta))`, `sin theta = sqrt(t/n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub iterations: usize,
    /// Zero when the oracle marks nothing.
    pub theta: f64,
    /// Set when `t = 0`: there is nothing to amplify and `iterations = 0`.
    pub empty_oracle: bool,
}

/// Number of Grover iterations for `t` marked items among `n`.
pub fn iteration_count(n: usize, t: usize) -> Result<Schedule> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "register dimension must be at least 1".into(),
        ));
    }
    if t > n {
        return Err(Error::DegenerateMarkedCount { t, n });
    }
    if t == 0 {
        return Ok(Schedule {
            iterations: 0,
            theta: 0.0,
            empty_oracle: true,
        });
    }
    let theta = (t as f64 / n as f64).sqrt().asin();
    let iterations = (PI / (4.0 * theta) + SCHEDULE_SLACK).floor() as usize;
    Ok(Schedule {
        iterations,
        theta,
        empty_oracle: false,
    })
}

/// Per-index amplitudes after `j` iterations: `(alpha_j, beta_j)` for a
/// marked and an unmarked index respectively.
pub fn closed_form_amplitudes(n: usize, t: usize, j: usize) -> Result<(f64, f64)> {
    if t == 0 || t >= n {
        return Err(Error::DegenerateMarkedCount { t, n });
    }
    let theta = (t as f64 / n as f64).sqrt().asin();
    let angle = (2 * j + 1) as f64 * theta;
    Ok((
        angle.sin() / (t as f64).sqrt(),
        angle.cos() / ((n - t) as f64).sqrt(),
    ))
}

/// One Grover iteration restricted to the span of the marked and unmarked
/// uniform states.
pub fn recurrence_step(n: usize, t: usize, alpha: f64, beta: f64) -> Result<(f64, f64)> {
    if t == 0 || t >= n {
        return Err(Error::DegenerateMarkedCount { t, n });
    }
    let (nf, tf) = (n as f64, t as f64);
    let norm = alpha * alpha * tf + beta * beta * (nf - tf);
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NormViolation { norm });
    }
    let keep = (nf - 2.0 * tf) / nf;
    Ok((
        keep * alpha + 2.0 * (nf - tf) / nf * beta,
        keep * beta - 2.0 * tf / nf * alpha,
    ))
}

/// Result of [`run_grover`].
#[derive(Debug, Clone)]
pub struct GroverRun {
    pub measured_index: usize,
    /// Probability mass on the marked set before measurement.
    pub success_probability: f64,
    pub final_state: AmplitudeState,
    /// Oracle applications performed.
    pub queries: usize,
}

/// Applies `iterations` rounds of oracle then diffusion to the uniform
/// state and measures the index register.
pub fn run_grover<R: Rng + ?Sized>(
    n: usize,
    oracle: &OracleSpec,
    iterations: usize,
    rng: &mut R,
) -> Result<GroverRun> {
    let mut state = init_uniform(n)?;
    let mut queries = 0;
    for _ in 0..iterations {
        oracle_phase_flip(&mut state, oracle)?;
        queries += 1;
        diffusion(&mut state);
    }
    debug_assert!((state.norm_squared() - 1.0).abs() < 1e-10);
    Ok(GroverRun {
        measured_index: state.measure(rng),
        success_probability: state.probability_of(oracle.marked()),
        final_state: state,
        queries,
    })
}

/// Amplitudes after `iterations` rounds, without measuring.
pub fn evolve(n: usize, oracle: &OracleSpec, iterations: usize) -> Result<AmplitudeState> {
    let mut state = init_uniform(n)?;
    for _ in 0..iterations {
        oracle_phase_flip(&mut state, oracle)?;
        diffusion(&mut state);
    }
    Ok(state)
}

/// A 2x2 complex gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateMatrix {
    pub entries: [[Complex64; 2]; 2],
}

impl GateMatrix {
    pub const fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self {
            entries: [
                [Complex64::new(a, 0.0), Complex64::new(b, 0.0)],
                [Complex64::new(c, 0.0), Complex64::new(d, 0.0)],
            ],
        }
    }

    pub const I: Self = Self::real(1.0, 0.0, 0.0, 1.0);
    pub const X: Self = Self::real(0.0, 1.0, 1.0, 0.0);
    pub const Z: Self = Self::real(1.0, 0.0, 0.0, -1.0);
    pub const H: Self = Self::real(FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2);

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut entries = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..2).map(|k| self.entries[i][k] * rhs.entries[k][j]).sum();
            }
        }
        Self { entries }
    }

    pub fn adjoint(&self) -> Self {
        let e = &self.entries;
        Self {
            entries: [[e[0][0].conj(), e[1][0].conj()], [e[0][1].conj(), e[1][1].conj()]],
        }
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .all(|(a, b)| (a - b).norm() <= tol)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.adjoint().mul(self).approx_eq(&Self::I, tol)
    }
}

/// How the `U_f` step of the gate-level oracle is wired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OracleWiring {
    /// `|x>|y> -> |x>|y xor f_v(x)>`.
    #[default]
    Standard,
    /// Flips the ancilla on the complement of the target; a negative control.
    Complemented,
}

/// Applies a single-qubit gate to `qubit` (bit position in the basis index)
/// of a full statevector.
fn apply_single_qubit(state: &mut [Complex64], qubit: usize, gate: &GateMatrix) {
    let stride = 1usize << qubit;
    let e = &gate.entries;
    for base in 0..state.len() {
        if base & stride != 0 {
            continue;
        }
        let (a0, a1) = (state[base], state[base | stride]);
        state[base] = e[0][0] * a0 + e[0][1] * a1;
        state[base | stride] = e[1][0] * a0 + e[1][1] * a1;
    }
}

/// Builds `(1/sqrt n) sum_k |k>|v_k>|1>` on `index_qubits + l + 1` qubits,
/// runs H on the ancilla, then `U_f`, then H again, and checks the result
/// equals `(1/sqrt n) sum_k (-1)^{f(v_k)} |k>|v_k>|1>` to within `1e-10`
/// per amplitude.
pub fn gate_level_oracle_check(
    index_qubits: usize,
    l: usize,
    target: &FingerprintWord,
    fingerprint_map: &[FingerprintWord],
) -> Result<bool> {
    gate_level_oracle_check_with(index_qubits, l, target, fingerprint_map, OracleWiring::Standard)
}

pub fn gate_level_oracle_check_with(
    index_qubits: usize,
    l: usize,
    target: &FingerprintWord,
    fingerprint_map: &[FingerprintWord],
    wiring: OracleWiring,
) -> Result<bool> {
    let qubits = index_qubits + l + 1;
    if qubits > MAX_GATE_LEVEL_QUBITS {
        return Err(Error::QubitBudgetExceeded {
            requested: qubits,
            max: MAX_GATE_LEVEL_QUBITS,
        });
    }
    let n = 1usize << index_qubits;
    if fingerprint_map.len() != n {
        return Err(Error::InvalidParameter(format!(
            "fingerprint map has {} entries, register holds {n}",
            fingerprint_map.len()
        )));
    }
    let value = |w: &FingerprintWord| -> Result<usize> {
        if w.width() != l {
            return Err(Error::WidthMismatch {
                expected: l,
                found: w.width(),
            });
        }
        Ok(w.bits().numeric_value()? as usize)
    };
    let target = value(target)?;
    let fingerprints = fingerprint_map.iter().map(value).collect::<Result<Vec<_>>>()?;

    // Basis index layout: index register | fingerprint register | ancilla (bit 0).
    let basis = |k: usize, x: usize, ancilla: usize| (k << (l + 1)) | (x << 1) | ancilla;
    let amp = 1.0 / (n as f64).sqrt();
    let mut state = vec![Complex64::new(0.0, 0.0); 1 << qubits];
    for (k, &x) in fingerprints.iter().enumerate() {
        state[basis(k, x, 1)] = Complex64::new(amp, 0.0);
    }

    apply_single_qubit(&mut state, 0, &GateMatrix::H);
    let accepts = |x: usize| match wiring {
        OracleWiring::Standard => x == target,
        OracleWiring::Complemented => x != target,
    };
    let mut after = vec![Complex64::new(0.0, 0.0); state.len()];
    for (idx, a) in state.iter().enumerate() {
        let x = (idx >> 1) & ((1 << l) - 1);
        let dest = if accepts(x) { idx ^ 1 } else { idx };
        after[dest] += a;
    }
    let mut state = after;
    apply_single_qubit(&mut state, 0, &GateMatrix::H);

    let mut expected = vec![Complex64::new(0.0, 0.0); state.len()];
    for (k, &x) in fingerprints.iter().enumerate() {
        let sign = if x == target { -1.0 } else { 1.0 };
        expected[basis(k, x, 1)] = Complex64::new(sign * amp, 0.0);
    }
    Ok(state.iter().zip(&expected).all(|(a, b)| (a - b).norm() <= 1e-10))
}
