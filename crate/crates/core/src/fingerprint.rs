//! Modular fingerprints over the first `d` primes and the hash-family
//! abstraction used by the search.
//!
//! A word `w` is fingerprinted under prime `p` as `bin(a(w) mod p)`, with the
//! residue computed by Horner reduction so `a(w)` is never materialized. All
//! members of a family share one output width: the bit length of the
//! family's largest prime.

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{BitString, Vocabulary};
use crate::error::{Error, Result};

/// Default ceiling on sieve entries (one byte each).
pub const DEFAULT_SIEVE_CAP: u64 = 1 << 28;

const SMALL_PRIMES: [u64; 5] = [2, 3, 5, 7, 11];

/// Number of bits needed to write `x`; `bit_length(0) == 0`.
pub fn bit_length(x: u64) -> usize {
    (u64::BITS - x.leading_zeros()) as usize
}

/// Rosser's upper bound `d (ln d + ln ln d)` on the `d`-th prime, valid for
/// `d >= 6`.
pub fn nth_prime_upper_bound(d: usize) -> f64 {
    let d = d as f64;
    d * (d.ln() + d.ln().ln())
}

/// The first `d` primes, strictly increasing from 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeFamily {
    primes: Vec<u64>,
}

impl PrimeFamily {
    pub fn d(&self) -> usize {
        self.primes.len()
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn largest(&self) -> u64 {
        *self.primes.last().expect("prime family is never empty")
    }

    /// Bit length of the largest prime; the common output width of the
    /// Freivalds family built on these primes.
    pub fn width(&self) -> usize {
        bit_length(self.largest())
    }
}

/// The first `d` primes, sieving up to Rosser's bound.
pub fn first_primes(d: usize) -> Result<PrimeFamily> {
    first_primes_capped(d, DEFAULT_SIEVE_CAP)
}

/// [`first_primes`] with an explicit cap on sieve size.
pub fn first_primes_capped(d: usize, cap: u64) -> Result<PrimeFamily> {
    if d == 0 {
        return Err(Error::InvalidParameter(
            "prime family size must be at least 1".into(),
        ));
    }
    if d < 6 {
        return Ok(PrimeFamily {
            primes: SMALL_PRIMES[..d].to_vec(),
        });
    }
    let limit = nth_prime_upper_bound(d).floor() as u64;
    if limit >= cap {
        return Err(Error::Capacity {
            requested: limit + 1,
            cap,
        });
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::with_capacity(d);
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        if primes.len() == d {
            break;
        }
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    debug_assert_eq!(primes.len(), d, "Rosser bound must cover the d-th prime");
    Ok(PrimeFamily { primes })
}

/// A fixed-width hash output.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FingerprintWord {
    bits: BitString,
}

impl FingerprintWord {
    pub fn new(bits: BitString) -> Self {
        Self { bits }
    }

    pub fn from_residue(residue: u64, width: usize) -> Result<Self> {
        Ok(Self {
            bits: BitString::from_value(residue, width)?,
        })
    }

    pub fn width(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }
}

/// `a(w) mod p` by streaming Horner reduction, `r <- (2r + bit) mod p`.
pub fn residue(w: &BitString, p: u64) -> u64 {
    w.bits().iter().fold(0u64, |r, &bit| {
        // r < p < 2^63 keeps 2r + 1 inside u64.
        (2 * r + u64::from(bit)) % p
    })
}

/// `bin(a(w) mod p)` zero-padded to `width` bits.
pub fn mod_fingerprint(w: &BitString, p: u64, width: usize) -> Result<FingerprintWord> {
    if !(2..1 << 63).contains(&p) {
        return Err(Error::InvalidParameter(format!("modulus {p} out of range")));
    }
    if width < bit_length(p) {
        return Err(Error::InvalidParameter(format!(
            "width {width} narrower than modulus {p} ({} bits)",
            bit_length(p)
        )));
    }
    FingerprintWord::from_residue(residue(w, p), width)
}

/// A finite family `f_0 .. f_{d-1}` of hash functions from words to
/// fixed-width fingerprints.
pub trait HashFamily: Sync {
    /// Number of functions `d`.
    fn size(&self) -> usize;

    /// Output width `l`, identical for every member.
    fn width(&self) -> usize;

    /// `f_j(w)`. Deterministic.
    fn evaluate(&self, j: usize, w: &BitString) -> Result<FingerprintWord>;

    /// Identifier reported for member `j` (the prime for Freivalds families).
    fn hash_id(&self, j: usize) -> u64 {
        j as u64
    }
}

/// `{ w -> bin(a(w) mod p_j) }` over the first `d = c n m` primes.
#[derive(Debug, Clone)]
pub struct FreivaldsFamily {
    primes: PrimeFamily,
    c: usize,
    n: usize,
    m: usize,
}

impl FreivaldsFamily {
    pub fn primes(&self) -> &PrimeFamily {
        &self.primes
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn prime(&self, j: usize) -> Result<u64> {
        self.primes
            .primes()
            .get(j)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                index: j,
                bound: self.primes.d(),
            })
    }
}

impl HashFamily for FreivaldsFamily {
    fn size(&self) -> usize {
        self.primes.d()
    }

    fn width(&self) -> usize {
        self.primes.width()
    }

    fn evaluate(&self, j: usize, w: &BitString) -> Result<FingerprintWord> {
        mod_fingerprint(w, self.prime(j)?, self.width())
    }

    fn hash_id(&self, j: usize) -> u64 {
        self.primes.primes().get(j).copied().unwrap_or(j as u64)
    }
}

/// Builds the Freivalds family with `d = c n m`. Requires `c >= 3`.
pub fn freivalds_family(c: usize, n: usize, m: usize) -> Result<FreivaldsFamily> {
    if c < 3 {
        return Err(Error::InvalidParameter("c must be ≥ 3".into()));
    }
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("n and m must be at least 1".into()));
    }
    let d = c
        .checked_mul(n)
        .and_then(|x| x.checked_mul(m))
        .ok_or_else(|| Error::InvalidParameter("c·n·m overflows".into()))?;
    Ok(FreivaldsFamily {
        primes: first_primes(d)?,
        c,
        n,
        m,
    })
}

/// Single-function family that passes `m`-bit words through unchanged.
#[derive(Debug, Clone, Copy)]
pub struct IdentityFamily {
    pub m: usize,
}

impl HashFamily for IdentityFamily {
    fn size(&self) -> usize {
        1
    }

    fn width(&self) -> usize {
        self.m
    }

    fn evaluate(&self, j: usize, w: &BitString) -> Result<FingerprintWord> {
        if j != 0 {
            return Err(Error::IndexOutOfRange { index: j, bound: 1 });
        }
        if w.len() != self.m {
            return Err(Error::WidthMismatch {
                expected: self.m,
                found: w.len(),
            });
        }
        Ok(FingerprintWord::new(w.clone()))
    }
}

/// `size` copies of the all-zero function. Every pair of words collides.
#[derive(Debug, Clone, Copy)]
pub struct ConstantFamily {
    pub size: usize,
    pub width: usize,
}

impl HashFamily for ConstantFamily {
    fn size(&self) -> usize {
        self.size
    }

    fn width(&self) -> usize {
        self.width
    }

    fn evaluate(&self, j: usize, _w: &BitString) -> Result<FingerprintWord> {
        if j >= self.size {
            return Err(Error::IndexOutOfRange {
                index: j,
                bound: self.size,
            });
        }
        Ok(FingerprintWord::new(BitString::zeros(self.width)?))
    }
}

/// `V_f = [f_j(w_0), ..., f_j(w_{n-1})]`.
pub fn hashed_vocabulary(
    vocabulary: &Vocabulary,
    family: &dyn HashFamily,
    j: usize,
) -> Result<Vec<FingerprintWord>> {
    if j >= family.size() {
        return Err(Error::IndexOutOfRange {
            index: j,
            bound: family.size(),
        });
    }
    vocabulary
        .windows()
        .iter()
        .map(|w| family.evaluate(j, w))
        .collect()
}

/// Primes under which `w` shares a residue with some window that differs
/// from `w`.
pub fn bad_prime_census(
    vocabulary: &Vocabulary,
    w: &BitString,
    primes: &PrimeFamily,
) -> Result<BTreeSet<u64>> {
    if w.len() != vocabulary.m() {
        return Err(Error::WidthMismatch {
            expected: vocabulary.m(),
            found: w.len(),
        });
    }
    let others: BTreeSet<&BitString> = vocabulary.windows().iter().filter(|v| *v != w).collect();
    Ok(primes
        .primes()
        .iter()
        .copied()
        .filter(|&p| {
            let target = residue(w, p);
            others.iter().any(|v| residue(v, p) == target)
        })
        .collect())
}

/// Bad-prime census with its probability mass `|bad| / d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub d: usize,
    pub bad_primes: Vec<u64>,
    pub mass: f64,
}

impl CensusReport {
    pub fn compute(vocabulary: &Vocabulary, w: &BitString, primes: &PrimeFamily) -> Result<Self> {
        let bad = bad_prime_census(vocabulary, w, primes)?;
        Ok(Self {
            d: primes.d(),
            mass: bad.len() as f64 / primes.d() as f64,
            bad_primes: bad.into_iter().collect(),
        })
    }

    pub fn is_bad(&self, p: u64) -> bool {
        self.bad_primes.binary_search(&p).is_ok()
    }
}

/// Limits for [`verify_strong_universality`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniversalityBudget {
    /// Largest number of `(Set, w)` pairs enumerated exhaustively outside
    /// the always-exhaustive region `m <= 8, n <= 3`.
    pub exhaustive_limit: u64,
    /// Pairs drawn when enumeration is over budget.
    pub samples: u64,
    pub seed: u64,
}

impl Default for UniversalityBudget {
    fn default() -> Self {
        Self {
            exhaustive_limit: 5_000_000,
            samples: 20_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniversalityWitness {
    pub set: Vec<BitString>,
    pub word: BitString,
    pub colliding_functions: usize,
}

/// Largest observed `|F_{Set,w}| / |F|` over the tested pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniversalityReport {
    pub max_ratio: f64,
    pub eps: f64,
    pub exhaustive: bool,
    pub tested: u64,
    /// Total `(Set, w)` pairs in the definition, as a float (may be huge).
    pub total: f64,
    pub coverage: f64,
    /// Present only when `max_ratio > eps`.
    pub witness: Option<UniversalityWitness>,
}

impl UniversalityReport {
    pub fn holds(&self) -> bool {
        self.max_ratio <= self.eps
    }
}

/// Checks the strong `(n, eps)`-universality condition: for every `n`-subset
/// `Set` of `{0,1}^m` and every word `w` outside it, the fraction of
/// functions that collide `w` with some member of `Set` is at most `eps`.
///
/// Enumerates every pair when `m <= 8 && n <= 3` or when the pair count is
/// within `budget.exhaustive_limit`; otherwise samples `budget.samples`
/// pairs and reports `exhaustive = false`.
pub fn verify_strong_universality(
    family: &dyn HashFamily,
    n: usize,
    eps: f64,
    m: usize,
    budget: UniversalityBudget,
) -> Result<UniversalityReport> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("n and m must be at least 1".into()));
    }
    let total = pair_count(m, n);
    if total == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "no {n}-subset of {{0,1}}^{m} excludes a word"
        )));
    }
    let exhaustive = m <= 16 && ((m <= 8 && n <= 3) || total <= budget.exhaustive_limit as f64);
    let mut scan = Scan::new(family.size(), eps);
    if exhaustive {
        exhaustive_scan(family, n, m, &mut scan)?;
    } else {
        sampled_scan(family, n, m, budget, &mut scan)?;
    }
    let coverage = scan.tested as f64 / total;
    Ok(UniversalityReport {
        max_ratio: scan.max_colliding as f64 / family.size() as f64,
        eps,
        exhaustive,
        tested: scan.tested,
        total,
        coverage: if exhaustive { 1.0 } else { coverage },
        witness: scan.witness,
    })
}

/// `2^m * C(2^m - 1, n)` in floating point.
fn pair_count(m: usize, n: usize) -> f64 {
    let words = 2f64.powi(m as i32);
    let others = words - 1.0;
    if (n as f64) > others {
        return 0.0;
    }
    let subsets = (0..n).fold(1.0, |acc, i| acc * (others - i as f64) / (i as f64 + 1.0));
    words * subsets
}

struct Scan {
    size: usize,
    eps: f64,
    tested: u64,
    max_colliding: usize,
    witness: Option<UniversalityWitness>,
}

impl Scan {
    fn new(size: usize, eps: f64) -> Self {
        Self {
            size,
            eps,
            tested: 0,
            max_colliding: 0,
            witness: None,
        }
    }

    fn record(&mut self, colliding: usize, set: impl FnOnce() -> Vec<BitString>, word: &BitString) {
        self.tested += 1;
        if colliding > self.max_colliding {
            self.max_colliding = colliding;
            if colliding as f64 / self.size as f64 > self.eps {
                self.witness = Some(UniversalityWitness {
                    set: set(),
                    word: word.clone(),
                    colliding_functions: colliding,
                });
            }
        }
    }
}

type Mask = Vec<u64>;

fn union_into(acc: &mut [u64], other: &[u64]) {
    acc.iter_mut().zip(other).for_each(|(a, b)| *a |= b);
}

fn popcount(mask: &[u64]) -> usize {
    mask.iter().map(|x| x.count_ones() as usize).sum()
}

fn exhaustive_scan(family: &dyn HashFamily, n: usize, m: usize, scan: &mut Scan) -> Result<()> {
    let words: Vec<BitString> = (0..1u64 << m)
        .map(|a| BitString::from_value(a, m))
        .collect::<Result<_>>()?;
    let d = family.size();
    let table: Vec<Vec<FingerprintWord>> = words
        .iter()
        .map(|w| (0..d).map(|j| family.evaluate(j, w)).collect())
        .collect::<Result<_>>()?;
    let lanes = d.div_ceil(64);

    for (wi, word) in words.iter().enumerate() {
        // masks[k]: functions colliding `word` with the k-th other word.
        let others: Vec<usize> = (0..words.len()).filter(|&v| v != wi).collect();
        let masks: Vec<Mask> = others
            .iter()
            .map(|&v| {
                let mut mask = vec![0u64; lanes];
                for j in 0..d {
                    if table[v][j] == table[wi][j] {
                        mask[j / 64] |= 1 << (j % 64);
                    }
                }
                mask
            })
            .collect();
        let mut chosen = Vec::with_capacity(n);
        let empty = vec![0u64; lanes];
        visit_subsets(&masks, n, 0, &empty, &mut chosen, &mut |union, chosen| {
            scan.record(
                popcount(union),
                || chosen.iter().map(|&k| words[others[k]].clone()).collect(),
                word,
            );
        });
    }
    Ok(())
}

fn visit_subsets(
    masks: &[Mask],
    remaining: usize,
    start: usize,
    union: &[u64],
    chosen: &mut Vec<usize>,
    leaf: &mut dyn FnMut(&[u64], &[usize]),
) {
    if remaining == 0 {
        leaf(union, chosen);
        return;
    }
    for k in start..=masks.len() - remaining {
        let mut next = union.to_vec();
        union_into(&mut next, &masks[k]);
        chosen.push(k);
        visit_subsets(masks, remaining - 1, k + 1, &next, chosen, leaf);
        chosen.pop();
    }
}

fn random_word(rng: &mut ChaCha8Rng, m: usize) -> BitString {
    BitString::from_bits((0..m).map(|_| rng.gen_range(0..=1u8)).collect())
        .expect("m >= 1 random bits form a valid word")
}

fn sampled_scan(
    family: &dyn HashFamily,
    n: usize,
    m: usize,
    budget: UniversalityBudget,
    scan: &mut Scan,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let d = family.size();
    for _ in 0..budget.samples {
        let word = random_word(&mut rng, m);
        let mut set = HashSet::with_capacity(n);
        while set.len() < n {
            let v = random_word(&mut rng, m);
            if v != word {
                set.insert(v);
            }
        }
        let mut set: Vec<BitString> = set.into_iter().collect();
        set.sort();
        let targets: Vec<FingerprintWord> =
            (0..d).map(|j| family.evaluate(j, &word)).collect::<Result<_>>()?;
        let mut colliding = 0;
        for (j, target) in targets.iter().enumerate() {
            for v in &set {
                if family.evaluate(j, v)? == *target {
                    colliding += 1;
                    break;
                }
            }
        }
        scan.record(colliding, || set.clone(), &word);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::build_vocabulary;
    use proptest::prelude::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn trial_division_primes(d: usize) -> Vec<u64> {
        let mut out = Vec::new();
        let mut x = 2u64;
        while out.len() < d {
            if (2..x).take_while(|q| q * q <= x).all(|q| !x.is_multiple_of(q)) {
                out.push(x);
            }
            x += 1;
        }
        out
    }

    #[test]
    fn first_primes_examples() {
        assert_eq!(first_primes(5).unwrap().primes(), [2, 3, 5, 7, 11]);
        assert_eq!(first_primes(1).unwrap().primes(), [2]);
        let oracle = trial_division_primes(18);
        assert_eq!(*oracle.last().unwrap(), 61);
        assert_eq!(first_primes(18).unwrap().largest(), 61);
    }

    #[test]
    fn first_primes_match_trial_division() {
        let oracle = trial_division_primes(2000);
        for d in [1, 2, 5, 6, 7, 10, 100, 999, 2000] {
            assert_eq!(first_primes(d).unwrap().primes(), &oracle[..d], "d={d}");
        }
    }

    #[test]
    fn first_primes_errors() {
        assert!(matches!(first_primes(0), Err(Error::InvalidParameter(_))));
        assert!(matches!(
            first_primes_capped(1000, 100),
            Err(Error::Capacity { cap: 100, .. })
        ));
    }

    #[test]
    fn largest_prime_respects_rosser_bound() {
        for d in 6..3000 {
            let fam = first_primes(d).unwrap();
            assert!((fam.largest() as f64) < nth_prime_upper_bound(d));
        }
    }

    #[test]
    fn fingerprint_width_bound() {
        for d in (6..50_000).step_by(997) {
            let l = first_primes(d).unwrap().width();
            let df = d as f64;
            let bound = df.log2().ceil() + (df.ln() + df.ln().ln()).log2().ceil() + 2.0;
            assert!(l as f64 <= bound, "d={d} l={l} bound={bound}");
        }
    }

    #[test]
    fn mod_fingerprint_examples() {
        assert_eq!(mod_fingerprint(&bs("101"), 3, 2).unwrap().bits(), &bs("10"));
        for m in [1, 7, 80, 300] {
            let zero = BitString::zeros(m).unwrap();
            for p in [2, 3, 97, 65_521] {
                let fp = mod_fingerprint(&zero, p, 20).unwrap();
                assert_eq!(fp.bits(), &BitString::zeros(20).unwrap());
            }
        }
    }

    #[test]
    fn mod_fingerprint_rejects_narrow_width() {
        assert!(mod_fingerprint(&bs("101"), 5, 2).is_err());
        assert!(mod_fingerprint(&bs("101"), 1, 2).is_err());
    }

    #[test]
    fn horner_matches_numeric_value_exhaustively() {
        let primes = first_primes(30).unwrap();
        for m in 1..=12 {
            for a in 0..1u64 << m {
                let w = BitString::from_value(a, m).unwrap();
                for &p in primes.primes() {
                    assert_eq!(residue(&w, p), a % p);
                }
            }
        }
    }

    #[test]
    fn horner_handles_words_wider_than_u64() {
        // An 80-bit word: its low 62 bits agree with a(w) mod 2^62, and the
        // high part contributes (high * 2^62) mod p.
        let mut bits = vec![0u8; 80];
        for (i, b) in bits.iter_mut().enumerate() {
            *b = ((i * 7 + 3) % 5 % 2) as u8;
        }
        let w = BitString::from_bits(bits.clone()).unwrap();
        let high = BitString::from_bits(bits[..18].to_vec())
            .unwrap()
            .numeric_value()
            .unwrap();
        let low = BitString::from_bits(bits[18..].to_vec())
            .unwrap()
            .numeric_value()
            .unwrap();
        let p = 97u64;
        let pow = (0..62).fold(1u64, |acc, _| acc * 2 % p);
        assert_eq!(residue(&w, p), (high % p * pow + low % p) % p);
    }

    #[test]
    fn freivalds_family_examples() {
        let f = freivalds_family(3, 3, 2).unwrap();
        assert_eq!(f.size(), 18);
        assert_eq!(f.primes().largest(), 61);
        assert_eq!(f.width(), 6);

        let f = freivalds_family(3, 1, 1).unwrap();
        assert_eq!(f.primes().primes(), [2, 3, 5]);
        assert_eq!(f.width(), 3);

        assert_eq!(freivalds_family(4, 2, 3).unwrap().size(), 24);
        assert!(freivalds_family(2, 2, 3).is_err());
    }

    #[test]
    fn hashed_vocabulary_examples() {
        let v = build_vocabulary(&bs("0011"), 2).unwrap();
        let f = freivalds_family(3, 3, 2).unwrap();
        let j3 = f.primes().primes().iter().position(|&p| p == 3).unwrap();
        let j5 = f.primes().primes().iter().position(|&p| p == 5).unwrap();
        let res = |words: Vec<FingerprintWord>| -> Vec<u64> {
            words.iter().map(|w| w.bits().numeric_value().unwrap()).collect()
        };
        assert_eq!(res(hashed_vocabulary(&v, &f, j3).unwrap()), [0, 1, 0]);
        assert_eq!(res(hashed_vocabulary(&v, &f, j5).unwrap()), [0, 1, 3]);
        assert!(matches!(
            hashed_vocabulary(&v, &f, 18),
            Err(Error::IndexOutOfRange { index: 18, bound: 18 })
        ));

        let single = build_vocabulary(&bs("01"), 2).unwrap();
        assert_eq!(hashed_vocabulary(&single, &f, 0).unwrap().len(), 1);
    }

    #[test]
    fn census_examples() {
        let v = build_vocabulary(&bs("0011"), 2).unwrap();
        let primes = first_primes(18).unwrap();
        let bad = bad_prime_census(&v, &bs("01"), &primes).unwrap();
        assert_eq!(bad.into_iter().collect::<Vec<_>>(), [2]);
        let report = CensusReport::compute(&v, &bs("01"), &primes).unwrap();
        assert!((report.mass - 1.0 / 18.0).abs() < 1e-15);

        let single = build_vocabulary(&bs("01"), 2).unwrap();
        assert!(bad_prime_census(&single, &bs("01"), &primes).unwrap().is_empty());
        assert!(bad_prime_census(&single, &bs("011"), &primes).is_err());
    }

    /// Census via factoring `|a(w) - a(v)|`, independent of residue comparison.
    fn census_by_divisors(v: &Vocabulary, w: &BitString, primes: &[u64]) -> BTreeSet<u64> {
        let aw = w.numeric_value().unwrap() as i64;
        let diffs: Vec<u64> = v
            .windows()
            .iter()
            .map(|x| x.numeric_value().unwrap() as i64)
            .filter(|&a| a != aw)
            .map(|a| (a - aw).unsigned_abs())
            .collect();
        primes
            .iter()
            .copied()
            .filter(|p| diffs.iter().any(|d| d % p == 0))
            .collect()
    }

    proptest! {
        #[test]
        fn census_matches_divisor_oracle_and_union_bound(
            bits in prop::collection::vec(0u8..=1, 2..=19),
            m in 1usize..=12,
            pick in any::<prop::sample::Index>(),
        ) {
            prop_assume!(m <= bits.len() && bits.len() - m < 8);
            let text = BitString::from_bits(bits).unwrap();
            let v = build_vocabulary(&text, m).unwrap();
            let w = v.windows()[pick.index(v.n())].clone();
            let primes = first_primes(3 * v.n() * m).unwrap();
            let census = bad_prime_census(&v, &w, &primes).unwrap();
            prop_assert_eq!(&census, &census_by_divisors(&v, &w, primes.primes()));
            prop_assert!(census.len() <= v.n() * m);
        }

        #[test]
        fn horner_matches_numeric_value_random(m in 13usize..=62, raw in any::<u64>(), j in 0usize..500) {
            let a = raw >> (64 - m);
            let w = BitString::from_value(a, m).unwrap();
            let p = first_primes(500).unwrap().primes()[j];
            prop_assert_eq!(residue(&w, p), a % p);
        }
    }

    #[test]
    fn universality_freivalds_small_exhaustive() {
        let f = freivalds_family(3, 2, 3).unwrap();
        let report = verify_strong_universality(&f, 2, 1.0 / 3.0, 3, Default::default()).unwrap();
        assert!(report.exhaustive);
        assert_eq!(report.tested, 8 * 21);
        assert!(report.holds(), "{report:?}");
        assert!(report.witness.is_none());
    }

    #[test]
    fn universality_constant_family_is_violated() {
        let f = ConstantFamily { size: 1, width: 2 };
        let report = verify_strong_universality(&f, 1, 0.5, 3, Default::default()).unwrap();
        assert_eq!(report.max_ratio, 1.0);
        let witness = report.witness.expect("violation must carry a witness");
        assert_ne!(witness.set[0], witness.word);
        assert_eq!(witness.colliding_functions, 1);
    }

    #[test]
    fn universality_identity_family_never_collides() {
        let f = IdentityFamily { m: 4 };
        let report = verify_strong_universality(&f, 3, 0.0, 4, Default::default()).unwrap();
        assert!(report.exhaustive);
        assert_eq!(report.max_ratio, 0.0);
        assert!(report.holds());
    }

    #[test]
    fn universality_samples_over_budget() {
        let f = freivalds_family(3, 4, 10).unwrap();
        let budget = UniversalityBudget {
            exhaustive_limit: 1000,
            samples: 300,
            seed: 7,
        };
        let report = verify_strong_universality(&f, 4, 1.0 / 3.0, 10, budget).unwrap();
        assert!(!report.exhaustive);
        assert_eq!(report.tested, 300);
        assert!(report.coverage > 0.0 && report.coverage < 1.0);
        assert!(report.holds());
        let again = verify_strong_universality(&f, 4, 1.0 / 3.0, 10, budget).unwrap();
        assert_eq!(report, again);
    }

    #[test]
    fn universality_rejects_impossible_subsets() {
        let f = IdentityFamily { m: 1 };
        assert!(verify_strong_universality(&f, 2, 0.0, 1, Default::default()).is_err());
    }
}
