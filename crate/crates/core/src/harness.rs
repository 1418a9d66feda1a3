//! Monte Carlo and exact checks of the error, query and qubit bounds of the
//! hashed search.
//!
//! Every trial draws its randomness from `derive_seed(seed, trial)`, so
//! results are independent of thread scheduling.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{find_occurrences_classical, BitString};
use crate::error::{Error, Result};
use crate::fingerprint::{first_primes, residue, CensusReport, FingerprintWord, HashFamily};
use crate::grover::{ceil_log2, evolve, iteration_count, OracleSpec};
use crate::search::{FreivaldsSearch, SearchConfig};

/// Minimum trial count accepted by [`estimate_error_rate`].
pub const MIN_TRIALS: usize = 100;

/// Statistical tolerance, in binomial standard errors, of every Monte Carlo
/// comparison.
pub const SIGMA_TOLERANCE: f64 = 4.0;

/// Rejection-sampling limit for [`plant_instance`].
pub const MAX_PLANT_ATTEMPTS: usize = 10_000;

/// SplitMix64 finalizer over `(seed, index)`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `sqrt(rate (1 - rate) / trials)`.
pub fn binomial_stderr(rate: f64, trials: usize) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    (rate * (1.0 - rate) / trials as f64).sqrt()
}

/// A random text with `n` windows of length `m` and a pattern that occurs
/// in it exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedInstance {
    pub text: BitString,
    pub pattern: BitString,
    pub position: usize,
}

/// Draws a random text of length `n + m - 1` and a random window of it,
/// retrying until that window occurs exactly once.
pub fn plant_instance<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<PlantedInstance> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("n and m must be at least 1".into()));
    }
    let len = n + m - 1;
    for _ in 0..MAX_PLANT_ATTEMPTS {
        let text = BitString::from_bits((0..len).map(|_| rng.gen_range(0..=1u8)).collect())?;
        let position = rng.gen_range(0..n);
        let pattern = text.slice(position, m)?;
        if find_occurrences_classical(&text, &pattern).len() == 1 {
            return Ok(PlantedInstance {
                text,
                pattern,
                position,
            });
        }
    }
    Err(Error::PlantingFailed {
        attempts: MAX_PLANT_ATTEMPTS,
    })
}

/// Empirical error of the hashed search on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub trials: usize,
    pub errors: usize,
    pub empirical_rate: f64,
    /// `1/c + 1/n`.
    pub theoretical_bound: f64,
    /// Fraction of trials that drew a bad prime.
    pub bad_draw_fraction: f64,
    /// `1/c`.
    pub bad_mass_bound: f64,
    /// Exact bad-prime mass from the census.
    pub census_mass: f64,
    pub stderr: f64,
    pub good_draws: usize,
    pub good_draw_errors: usize,
    pub good_draw_failure_rate: f64,
    pub good_draw_stderr: f64,
}

/// Runs the search `trials` times with seeds `derive_seed(config.seed, i)`
/// and counts returned indices whose window differs from `pattern`.
pub fn estimate_error_rate(
    text: &BitString,
    pattern: &BitString,
    config: &SearchConfig,
    trials: usize,
) -> Result<ErrorStats> {
    config.validate()?;
    if trials < MIN_TRIALS {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_TRIALS} trials required, got {trials}"
        )));
    }
    let search = FreivaldsSearch::prepare(text, pattern, config.c)?;
    estimate_prepared(&search, config.seed, trials)
}

fn estimate_prepared(search: &FreivaldsSearch, seed: u64, trials: usize) -> Result<ErrorStats> {
    let instance = search.instance();
    if !instance.in_contract() {
        return Err(Error::ContractViolation {
            occurrences: instance.occurrences().len(),
        });
    }
    let census = CensusReport::compute(
        instance.vocabulary(),
        instance.pattern(),
        search.family().primes(),
    )?;

    // (errors, bad draws, errors on good draws)
    let (errors, bad_draws, good_errors) = (0..trials as u64)
        .into_par_iter()
        .map(|i| -> Result<(usize, usize, usize)> {
            let out = search.run(derive_seed(seed, i), true)?;
            let wrong = usize::from(out.is_correct == Some(false));
            let bad = census.is_bad(out.hash_id);
            Ok((wrong, usize::from(bad), if bad { 0 } else { wrong }))
        })
        .try_reduce(|| (0, 0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1, a.2 + b.2)))?;

    let n = instance.n() as f64;
    let c = search.family().c() as f64;
    let rate = errors as f64 / trials as f64;
    let good_draws = trials - bad_draws;
    let good_rate = if good_draws == 0 {
        0.0
    } else {
        good_errors as f64 / good_draws as f64
    };
    Ok(ErrorStats {
        trials,
        errors,
        empirical_rate: rate,
        theoretical_bound: 1.0 / c + 1.0 / n,
        bad_draw_fraction: bad_draws as f64 / trials as f64,
        bad_mass_bound: 1.0 / c,
        census_mass: census.mass,
        stderr: binomial_stderr(rate, trials),
        good_draws,
        good_draw_errors: good_errors,
        good_draw_failure_rate: good_rate,
        good_draw_stderr: binomial_stderr(good_rate, good_draws),
    })
}

/// Exact error probability of the hashed search, averaged over every prime
/// in the family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactMixture {
    pub d: usize,
    pub census_mass: f64,
    /// Mean simulated error over bad primes (0 when there are none).
    pub bad_branch_error: f64,
    /// `1 - sin^2((2r + 1) theta)` for a single marked index.
    pub good_branch_error: f64,
    /// `census_mass * bad_branch_error + (1 - census_mass) * good_branch_error`.
    pub mixture: f64,
    /// Mean simulated error over all primes, computed without the split.
    pub simulated_mean: f64,
    pub bound: f64,
}

/// Computes [`ExactMixture`] by evolving the amplitudes for every prime.
pub fn exact_error_rate(text: &BitString, pattern: &BitString, c: usize) -> Result<ExactMixture> {
    let search = FreivaldsSearch::prepare(text, pattern, c)?;
    let instance = search.instance();
    if !instance.in_contract() {
        return Err(Error::ContractViolation {
            occurrences: instance.occurrences().len(),
        });
    }
    let n = instance.n();
    let primes = search.family().primes();
    let census = CensusReport::compute(instance.vocabulary(), instance.pattern(), primes)?;
    let schedule = iteration_count(n, 1)?;
    let width = primes.width();

    let branch_error = |p: u64| -> Result<f64> {
        let hashed = instance
            .vocabulary()
            .windows()
            .iter()
            .map(|w| FingerprintWord::from_residue(residue(w, p), width))
            .collect::<Result<Vec<_>>>()?;
        let target = FingerprintWord::from_residue(residue(instance.pattern(), p), width)?;
        let oracle = OracleSpec::from_fingerprints(&hashed, &target)?;
        let iterations = if oracle.t() == 0 { 0 } else { schedule.iterations };
        let state = evolve(n, &oracle, iterations)?;
        Ok(1.0 - state.probability_of(instance.occurrences()))
    };

    let errors: Vec<(u64, f64)> = primes
        .primes()
        .par_iter()
        .map(|&p| branch_error(p).map(|e| (p, e)))
        .collect::<Result<_>>()?;

    let bad_errors: Vec<f64> = errors
        .iter()
        .filter(|(p, _)| census.is_bad(*p))
        .map(|&(_, e)| e)
        .collect();
    let bad_branch_error = if bad_errors.is_empty() {
        0.0
    } else {
        bad_errors.iter().sum::<f64>() / bad_errors.len() as f64
    };
    let good_branch_error = 1.0
        - ((2 * schedule.iterations + 1) as f64 * schedule.theta)
            .sin()
            .powi(2);
    Ok(ExactMixture {
        d: primes.d(),
        census_mass: census.mass,
        bad_branch_error,
        good_branch_error,
        mixture: census.mass * bad_branch_error + (1.0 - census.mass) * good_branch_error,
        simulated_mean: errors.iter().map(|&(_, e)| e).sum::<f64>() / errors.len() as f64,
        bound: 1.0 / c as f64 + 1.0 / n as f64,
    })
}

/// Resource counts of the hashed search for given `(n, m, c)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub n: usize,
    pub m: usize,
    pub c: usize,
    pub d: usize,
    pub largest_prime: u64,
    pub l: usize,
    pub qubits_total: usize,
    pub queries: usize,
    pub pi4_sqrt_n: f64,
}

pub fn complexity_report(n: usize, m: usize, c: usize) -> Result<ComplexityReport> {
    if c < 3 {
        return Err(Error::InvalidParameter("c must be ≥ 3".into()));
    }
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("n and m must be at least 1".into()));
    }
    let d = c * n * m;
    let primes = first_primes(d)?;
    let l = primes.width();
    Ok(ComplexityReport {
        n,
        m,
        c,
        d,
        largest_prime: primes.largest(),
        l,
        qubits_total: ceil_log2(n) + l + 1,
        queries: iteration_count(n, 1)?.iterations,
        pi4_sqrt_n: PI / 4.0 * (n as f64).sqrt(),
    })
}

/// One `(n, m)` row of a sweep. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub m: usize,
    pub c: usize,
    pub d: usize,
    pub l: usize,
    pub qubits: usize,
    pub queries: usize,
    pub pi4_sqrt_n: f64,
    pub empirical_error: f64,
    pub bound: f64,
    pub bad_fraction: f64,
    pub census_mass: f64,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepFailure {
    pub n: usize,
    pub m: usize,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub failures: Vec<SweepFailure>,
}

impl SweepTable {
    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        if self.rows.is_empty() {
            writer
                .write_record(SWEEP_COLUMNS)
                .map_err(|e| Error::Io(e.into()))?;
        }
        for row in &self.rows {
            writer.serialize(row).map_err(|e| Error::Io(e.into()))?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

pub const SWEEP_COLUMNS: [&str; 14] = [
    "n",
    "m",
    "c",
    "d",
    "l",
    "qubits",
    "queries",
    "pi4_sqrt_n",
    "empirical_error",
    "bound",
    "bad_fraction",
    "census_mass",
    "trials",
    "seed",
];

/// One row per `(n, m)` pair, in `n`-major order. Each row plants its own
/// instance from `derive_seed(seed, row)`; failing rows are recorded and
/// skipped.
pub fn sweep(n_values: &[usize], m_values: &[usize], c: usize, trials: usize, seed: u64) -> SweepTable {
    let mut table = SweepTable::default();
    let pairs = n_values
        .iter()
        .flat_map(|&n| m_values.iter().map(move |&m| (n, m)));
    for (row, (n, m)) in pairs.enumerate() {
        match sweep_row(n, m, c, trials, seed, derive_seed(seed, row as u64)) {
            Ok(r) => table.rows.push(r),
            Err(e) => table.failures.push(SweepFailure {
                n,
                m,
                error: e.to_string(),
            }),
        }
    }
    table
}

fn sweep_row(n: usize, m: usize, c: usize, trials: usize, seed: u64, row_seed: u64) -> Result<SweepRow> {
    let report = complexity_report(n, m, c)?;
    let mut rng = ChaCha8Rng::seed_from_u64(row_seed);
    let planted = plant_instance(n, m, &mut rng)?;
    if trials < MIN_TRIALS {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_TRIALS} trials required, got {trials}"
        )));
    }
    let search = FreivaldsSearch::prepare(&planted.text, &planted.pattern, c)?;
    let stats = estimate_prepared(&search, derive_seed(row_seed, u64::MAX), trials)?;
    Ok(SweepRow {
        n,
        m,
        c,
        d: report.d,
        l: report.l,
        qubits: report.qubits_total,
        queries: report.queries,
        pi4_sqrt_n: report.pi4_sqrt_n,
        empirical_error: stats.empirical_rate,
        bound: stats.theoretical_bound,
        bad_fraction: stats.bad_draw_fraction,
        census_mass: stats.census_mass,
        trials,
        seed,
    })
}

/// Qubits used by a search over `n` windows with a family of width
/// `family.width()`.
pub fn qubits_for(n: usize, family: &dyn HashFamily) -> usize {
    ceil_log2(n) + family.width() + 1
}
