//! Fingerprint-hashed Grover search for a pattern in a binary text.
//!
//! A run draws one hash function at random, hashes every window of the text
//! and the pattern, and amplifies the indices whose hash matches the
//! pattern's. The schedule always assumes a single matching index.
//!
//! Randomness comes from one seed split into two ChaCha streams: stream 0
//! draws the hash function, stream 1 samples the measurement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{find_occurrences_classical, BitString, Vocabulary};
use crate::error::{Error, Result};
use crate::fingerprint::{
    freivalds_family, hashed_vocabulary, residue, FingerprintWord, FreivaldsFamily, HashFamily,
};
use crate::grover::{evolve, iteration_count, AmplitudeState, OracleSpec, QubitBudget};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Redundancy factor; the family has `c * n * m` members. At least 3.
    pub c: usize,
    pub seed: u64,
    /// Check the measured window against the pattern. Observational only.
    pub verify_classically: bool,
}

impl SearchConfig {
    pub fn new(c: usize, seed: u64) -> Result<Self> {
        let config = Self {
            c,
            seed,
            verify_classically: false,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn verified(mut self) -> Self {
        self.verify_classically = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.c < 3 {
            return Err(Error::InvalidParameter("c must be ≥ 3".into()));
        }
        Ok(())
    }
}

/// The two independent random streams behind one search.
pub struct SearchStreams {
    pub hash: ChaCha8Rng,
    pub measurement: ChaCha8Rng,
}

impl SearchStreams {
    pub fn from_seed(seed: u64) -> Self {
        let mut hash = ChaCha8Rng::seed_from_u64(seed);
        hash.set_stream(0);
        let mut measurement = ChaCha8Rng::seed_from_u64(seed);
        measurement.set_stream(1);
        Self { hash, measurement }
    }
}

/// What a single run of the hashed Grover search produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub index: usize,
    /// The drawn prime (Freivalds) or family member index.
    pub hash_id: u64,
    pub iterations: usize,
    #[serde(rename = "queries")]
    pub oracle_queries: usize,
    #[serde(rename = "qubits")]
    pub qubit_budget: QubitBudget,
    pub marked_count: usize,
    /// Marked-set probability just before measurement.
    pub success_probability: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub is_correct: Option<bool>,
    /// Present when the pattern does not occur exactly once.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub contract_violation: Option<bool>,
    /// Present when every index is marked, so amplification does nothing.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub degenerate_amplification: Option<bool>,
}

/// Result of the quantum stage alone.
#[derive(Debug, Clone)]
pub struct ProcedureOutcome {
    pub index: usize,
    pub marked: OracleSpec,
    pub iterations: usize,
    pub queries: usize,
    pub success_probability: f64,
    pub final_state: AmplitudeState,
}

/// Grover search for `target` among `hashed_vocab`, scheduled for exactly
/// one match. An empty marked set runs zero iterations.
pub fn procedure_a1<R: Rng + ?Sized>(
    hashed_vocab: &[FingerprintWord],
    target: &FingerprintWord,
    rng: &mut R,
) -> Result<ProcedureOutcome> {
    let n = hashed_vocab.len();
    if n == 0 {
        return Err(Error::InvalidParameter("hashed vocabulary is empty".into()));
    }
    let marked = OracleSpec::from_fingerprints(hashed_vocab, target)?;
    let iterations = if marked.t() == 0 {
        0
    } else {
        iteration_count(n, 1)?.iterations
    };
    let final_state = evolve(n, &marked, iterations)?;
    Ok(ProcedureOutcome {
        index: final_state.measure(rng),
        success_probability: final_state.probability_of(marked.marked()),
        marked,
        iterations,
        queries: iterations,
        final_state,
    })
}

/// Text, pattern and vocabulary shared by both algorithm variants.
#[derive(Debug, Clone)]
pub struct Instance {
    vocabulary: Vocabulary,
    pattern: BitString,
    occurrences: Vec<usize>,
}

impl Instance {
    pub fn new(text: &BitString, pattern: &BitString) -> Result<Self> {
        let vocabulary = Vocabulary::build(text, pattern.len())?;
        Ok(Self {
            occurrences: find_occurrences_classical(text, pattern),
            vocabulary,
            pattern: pattern.clone(),
        })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn pattern(&self) -> &BitString {
        &self.pattern
    }

    /// True occurrence offsets (ground truth, not used by the search).
    pub fn occurrences(&self) -> &[usize] {
        &self.occurrences
    }

    pub fn n(&self) -> usize {
        self.vocabulary.n()
    }

    pub fn m(&self) -> usize {
        self.vocabulary.m()
    }

    pub fn in_contract(&self) -> bool {
        self.occurrences.len() == 1
    }

    fn outcome(&self, run: ProcedureOutcome, hash_id: u64, width: usize, verify: bool) -> SearchOutcome {
        let n = self.n();
        SearchOutcome {
            index: run.index,
            hash_id,
            iterations: run.iterations,
            oracle_queries: run.queries,
            qubit_budget: QubitBudget::new(n, width),
            marked_count: run.marked.t(),
            success_probability: run.success_probability,
            is_correct: verify.then(|| self.vocabulary.window(run.index) == Some(&self.pattern)),
            contract_violation: (!self.in_contract()).then_some(true),
            degenerate_amplification: (n > 1 && run.marked.t() == n).then_some(true),
        }
    }
}

/// Hashed search over the Freivalds family, prepared once and runnable
/// with many seeds.
#[derive(Debug, Clone)]
pub struct FreivaldsSearch {
    instance: Instance,
    family: FreivaldsFamily,
}

impl FreivaldsSearch {
    pub fn prepare(text: &BitString, pattern: &BitString, c: usize) -> Result<Self> {
        let instance = Instance::new(text, pattern)?;
        let family = freivalds_family(c, instance.n(), instance.m())?;
        Ok(Self { instance, family })
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn family(&self) -> &FreivaldsFamily {
        &self.family
    }

    /// Runs with a prime drawn from the hash stream.
    pub fn run(&self, seed: u64, verify: bool) -> Result<SearchOutcome> {
        let mut streams = SearchStreams::from_seed(seed);
        let j = streams.hash.gen_range(0..self.family.size());
        self.run_with_prime(self.family.prime(j)?, &mut streams.measurement, verify)
    }

    /// Runs with a fixed prime, skipping the random draw.
    pub fn run_with_prime<R: Rng + ?Sized>(
        &self,
        p: u64,
        rng: &mut R,
        verify: bool,
    ) -> Result<SearchOutcome> {
        let width = self.family.width();
        let hashed = self
            .instance
            .vocabulary
            .windows()
            .iter()
            .map(|w| FingerprintWord::from_residue(residue(w, p), width))
            .collect::<Result<Vec<_>>>()?;
        let target = FingerprintWord::from_residue(residue(&self.instance.pattern, p), width)?;
        let run = procedure_a1(&hashed, &target, rng)?;
        Ok(self.instance.outcome(run, p, width, verify))
    }
}

/// Hashed search over an arbitrary family.
pub struct UniversalSearch<'f> {
    instance: Instance,
    family: &'f dyn HashFamily,
}

impl<'f> UniversalSearch<'f> {
    pub fn prepare(text: &BitString, pattern: &BitString, family: &'f dyn HashFamily) -> Result<Self> {
        if family.size() == 0 {
            return Err(Error::InvalidParameter("hash family is empty".into()));
        }
        Ok(Self {
            instance: Instance::new(text, pattern)?,
            family,
        })
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn run(&self, seed: u64, verify: bool) -> Result<SearchOutcome> {
        let mut streams = SearchStreams::from_seed(seed);
        let j = streams.hash.gen_range(0..self.family.size());
        let hashed = hashed_vocabulary(&self.instance.vocabulary, self.family, j)?;
        let target = self.family.evaluate(j, &self.instance.pattern)?;
        let run = procedure_a1(&hashed, &target, &mut streams.measurement)?;
        Ok(self
            .instance
            .outcome(run, self.family.hash_id(j), self.family.width(), verify))
    }
}

/// Searches `text` for `pattern` using a randomly drawn prime fingerprint.
pub fn algorithm_a(text: &BitString, pattern: &BitString, config: &SearchConfig) -> Result<SearchOutcome> {
    config.validate()?;
    FreivaldsSearch::prepare(text, pattern, config.c)?.run(config.seed, config.verify_classically)
}

/// Searches `text` for `pattern` using a function drawn from `family`.
pub fn algorithm_a2(
    text: &BitString,
    pattern: &BitString,
    family: &dyn HashFamily,
    seed: u64,
    verify_classically: bool,
) -> Result<SearchOutcome> {
    UniversalSearch::prepare(text, pattern, family)?.run(seed, verify_classically)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingerprint::{ConstantFamily, IdentityFamily};
    use crate::grover::{init_uniform, recurrence_step};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn words(values: &[u64], width: usize) -> Vec<FingerprintWord> {
        values
            .iter()
            .map(|&v| FingerprintWord::from_residue(v, width).unwrap())
            .collect()
    }

    #[test]
    fn config_requires_c_at_least_three() {
        assert!(SearchConfig::new(2, 0).is_err());
        assert!(SearchConfig::new(3, 0).is_ok());
    }

    #[test]
    fn procedure_unique_match_n4() {
        let hashed = words(&[0, 1, 2, 3], 2);
        let target = FingerprintWord::from_residue(2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let run = procedure_a1(&hashed, &target, &mut rng).unwrap();
        assert_eq!(run.index, 2);
        assert!((run.success_probability - 1.0).abs() < 1e-12);
        assert_eq!((run.iterations, run.queries), (1, 1));
    }

    #[test]
    fn procedure_unique_match_n3() {
        let hashed = words(&[5, 1, 4], 3);
        let target = FingerprintWord::from_residue(1, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let run = procedure_a1(&hashed, &target, &mut rng).unwrap();
        assert!((run.success_probability - 25.0 / 27.0).abs() < 1e-12);
    }

    #[test]
    fn procedure_collision_n4_matches_recurrence() {
        let hashed = words(&[0, 1, 2, 1], 2);
        let target = FingerprintWord::from_residue(1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let run = procedure_a1(&hashed, &target, &mut rng).unwrap();
        assert_eq!(run.marked.marked(), [1, 3]);
        assert_eq!(run.iterations, 1);
        let (alpha, _) = recurrence_step(4, 2, 0.5, 0.5).unwrap();
        assert!((run.success_probability - 2.0 * alpha * alpha).abs() < 1e-12);
        // theta = pi/4: one iteration overshoots to sin^2(3 pi / 4) = 1/2.
        assert!((run.success_probability - 0.5).abs() < 1e-12);
    }

    #[test]
    fn procedure_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let target = FingerprintWord::from_residue(0, 3).unwrap();
        assert!(matches!(
            procedure_a1(&words(&[0, 1], 2), &target, &mut rng),
            Err(Error::WidthMismatch { .. })
        ));
        assert!(procedure_a1(&[], &target, &mut rng).is_err());
    }

    #[test]
    fn procedure_no_match_measures_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let run = procedure_a1(
            &words(&[0, 1, 2], 2),
            &FingerprintWord::from_residue(3, 2).unwrap(),
            &mut rng,
        )
        .unwrap();
        assert_eq!(run.iterations, 0);
        assert_eq!(run.marked.t(), 0);
        assert_eq!(run.final_state, init_uniform(3).unwrap());
    }

    #[test]
    fn algorithm_a_good_prime_distribution() {
        let search = FreivaldsSearch::prepare(&bs("0011"), &bs("01"), 3).unwrap();
        for &p in search.family().primes().primes().iter().filter(|&&p| p != 2) {
            let mut rng = ChaCha8Rng::seed_from_u64(p);
            let out = search.run_with_prime(p, &mut rng, true).unwrap();
            assert_eq!(out.marked_count, 1);
            assert!((out.success_probability - 25.0 / 27.0).abs() < 1e-12);
            assert_eq!(out.oracle_queries, 1);
            assert_eq!(
                out.qubit_budget,
                QubitBudget {
                    index: 2,
                    fingerprint: 6,
                    ancilla: 1
                }
            );
        }
    }

    #[test]
    fn algorithm_a_bad_prime_collision() {
        let search = FreivaldsSearch::prepare(&bs("0011"), &bs("01"), 3).unwrap();
        let mut wrong = 0;
        for seed in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = search.run_with_prime(2, &mut rng, true).unwrap();
            assert_eq!(out.marked_count, 2);
            assert_eq!(out.iterations, 1);
            // Marked amplitudes 1/(3 sqrt 3) each, unmarked -5/(3 sqrt 3).
            assert!((out.success_probability - 2.0 / 27.0).abs() < 1e-12);
            if out.is_correct == Some(false) {
                wrong += 1;
            }
        }
        assert!(wrong > 150);
    }

    #[test]
    fn algorithm_a_n2_unique() {
        let out = algorithm_a(&bs("01"), &bs("0"), &SearchConfig::new(3, 5).unwrap()).unwrap();
        assert_eq!(out.iterations, 1);
        assert!((out.success_probability - 0.5).abs() < 1e-12);
        assert_eq!(out.contract_violation, None);
    }

    #[test]
    fn algorithm_a_flags_out_of_contract() {
        let config = SearchConfig::new(3, 1).unwrap();
        let out = algorithm_a(&bs("10101"), &bs("101"), &config).unwrap();
        assert_eq!(out.contract_violation, Some(true));
        let out = algorithm_a(&bs("0000"), &bs("11"), &config).unwrap();
        assert_eq!(out.contract_violation, Some(true));
        assert!(matches!(
            algorithm_a(&bs("01"), &bs("011"), &config),
            Err(Error::PatternLongerThanText { .. })
        ));
    }

    #[test]
    fn a_and_a2_agree_on_freivalds() {
        let family = freivalds_family(3, 3, 2).unwrap();
        for seed in 0..100 {
            let config = SearchConfig::new(3, seed).unwrap().verified();
            let a = algorithm_a(&bs("0011"), &bs("01"), &config).unwrap();
            let a2 = algorithm_a2(&bs("0011"), &bs("01"), &family, seed, true).unwrap();
            assert_eq!(a, a2);
        }
    }

    #[test]
    fn a2_identity_family_is_pure_grover() {
        let out = algorithm_a2(&bs("0011"), &bs("01"), &IdentityFamily { m: 2 }, 3, true).unwrap();
        assert_eq!(out.marked_count, 1);
        assert_eq!(out.hash_id, 0);
        assert!((out.success_probability - 25.0 / 27.0).abs() < 1e-12);
    }

    #[test]
    fn a2_constant_family_marks_everything() {
        let family = ConstantFamily { size: 4, width: 3 };
        let out = algorithm_a2(&bs("00110101"), &bs("0110"), &family, 11, false).unwrap();
        assert_eq!(out.marked_count, 5);
        assert_eq!(out.degenerate_amplification, Some(true));
        assert!((out.success_probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn outcome_json_schema() {
        let config = SearchConfig::new(3, 7).unwrap();
        let out = algorithm_a(&bs("0011"), &bs("01"), &config).unwrap();
        let json: serde_json::Value = serde_json::to_value(&out).unwrap();
        let mut keys: Vec<&str> = json.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(
            keys,
            [
                "hash_id",
                "index",
                "iterations",
                "marked_count",
                "qubits",
                "queries",
                "success_probability"
            ]
        );
        assert_eq!(json["qubits"]["ancilla"], 1);
        let back: SearchOutcome = serde_json::from_value(json).unwrap();
        assert_eq!(back, out);
    }

    #[test]
    fn same_seed_same_outcome() {
        let config = SearchConfig::new(5, 42).unwrap();
        let a = algorithm_a(&bs("0110100110010110"), &bs("1001011"), &config).unwrap();
        let b = algorithm_a(&bs("0110100110010110"), &bs("1001011"), &config).unwrap();
        assert_eq!(a, b);
    }
}
