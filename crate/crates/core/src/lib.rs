//! Substring search in a binary text by Grover amplitude amplification over
//! prime-modulus fingerprints of the text's sliding windows, simulated
//! exactly at the amplitude level.
//!
//! Hashing every length-`m` window to `O(log n + log m)` bits keeps the
//! quantum register small; a randomly drawn prime from the first `c n m`
//! primes collides the pattern with a wrong window with probability at
//! most `1/c`, and the search itself fails with probability at most `1/n`.
//!
//! - [`bits`]: binary words, window vocabularies, classical search.
//! - [`fingerprint`]: prime families, modular fingerprints, hash families.
//! - [`grover`]: amplitude simulation and its closed-form oracles.
//! - [`search`]: the hashed search itself.
//! - [`harness`]: Monte Carlo and exact bound checks, complexity reports.
//! - [`selftest`]: a deterministic battery of internal consistency checks.
//! - [`cli`]: the `fingergrover` command line.

pub mod bits;
pub mod cli;
pub mod error;
pub mod fingerprint;
pub mod grover;
pub mod harness;
pub mod search;
pub mod selftest;

pub use bits::{build_vocabulary, find_occurrences_classical, BitString, Vocabulary};
pub use error::{Error, Result};
pub use fingerprint::{
    bad_prime_census, first_primes, freivalds_family, hashed_vocabulary, mod_fingerprint,
    verify_strong_universality, FingerprintWord, FreivaldsFamily, HashFamily, PrimeFamily,
};
pub use grover::{
    closed_form_amplitudes, diffusion, gate_level_oracle_check, init_uniform, iteration_count,
    oracle_phase_flip, recurrence_step, run_grover, AmplitudeState, GateMatrix, OracleSpec, QubitBudget,
};
pub use harness::{complexity_report, estimate_error_rate, sweep, ErrorStats};
pub use search::{algorithm_a, algorithm_a2, procedure_a1, SearchConfig, SearchOutcome};
