//! Deterministic internal consistency checks, run by `fingergrover selftest`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{build_vocabulary, BitString};
use crate::error::Result;
use crate::fingerprint::{
    bad_prime_census, first_primes, freivalds_family, verify_strong_universality, FingerprintWord,
    UniversalityBudget,
};
use crate::grover::{
    closed_form_amplitudes, diffusion_with_projector_scale, gate_level_oracle_check_with, init_uniform,
    iteration_count, oracle_phase_flip, recurrence_step, OracleSpec, OracleWiring,
};

/// Fault injection for negative-control runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SelftestHooks {
    /// Scale the diffusion projector by `1 / log2 n` instead of `1 / n`.
    pub corrupt_diffusion: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelftestReport {
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }

    /// One line per check plus a summary line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for check in &self.checks {
            let status = if check.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{status} {}: {}", check.name, check.detail);
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(out, "selftest: {passed}/{} checks passed", self.checks.len());
        out
    }
}

type Check = fn(SelftestHooks) -> Result<std::result::Result<String, String>>;

pub fn run_selftest(hooks: SelftestHooks) -> SelftestReport {
    let checks: [(&'static str, Check); 7] = [
        ("grover_equivalence", grover_equivalence),
        ("failure_bound", failure_bound),
        ("gate_level_oracle", gate_level_oracle),
        ("gate_level_negative_control", gate_level_negative_control),
        ("pairwise_divisor_bound", pairwise_divisor_bound),
        ("census_mass", census_mass),
        ("freivalds_universality", freivalds_universality),
    ];
    let checks = checks
        .into_iter()
        .map(|(name, check)| {
            let (passed, detail) = match check(hooks) {
                Ok(Ok(detail)) => (true, detail),
                Ok(Err(detail)) => (false, detail),
                Err(e) => (false, format!("error: {e}")),
            };
            CheckResult { name, passed, detail }
        })
        .collect();
    SelftestReport { checks }
}

fn grover_equivalence(hooks: SelftestHooks) -> Result<std::result::Result<String, String>> {
    let mut cases = 0;
    for n in 2..=64usize {
        let scale = if hooks.corrupt_diffusion {
            1.0 / (n as f64).log2()
        } else {
            1.0 / n as f64
        };
        for t in 1..=4.min(n - 1) {
            let oracle = OracleSpec::new((0..t).map(|i| (i * n / t + 1) % n).collect(), n)?;
            let mut state = init_uniform(n)?;
            let start = 1.0 / (n as f64).sqrt();
            let (mut alpha, mut beta) = (start, start);
            for j in 0..=(2.0 * (n as f64).sqrt()) as usize {
                let (ca, cb) = closed_form_amplitudes(n, t, j)?;
                if (ca - alpha).abs() > 1e-9 || (cb - beta).abs() > 1e-9 {
                    return Ok(Err(format!("recurrence diverges at n={n} t={t} j={j}")));
                }
                for (k, &a) in state.amplitudes().iter().enumerate() {
                    let want = if oracle.marked().contains(&k) { ca } else { cb };
                    if (a - want).abs() > 1e-9 {
                        return Ok(Err(format!("simulation diverges at n={n} t={t} j={j} k={k}")));
                    }
                }
                oracle_phase_flip(&mut state, &oracle)?;
                diffusion_with_projector_scale(&mut state, scale);
                (alpha, beta) = recurrence_step(n, t, alpha, beta)?;
                cases += 1;
            }
        }
    }
    Ok(Ok(format!("{cases} (n, t, j) cases agree within 1e-9")))
}

fn failure_bound(_: SelftestHooks) -> Result<std::result::Result<String, String>> {
    for n in 2..=4096usize {
        let s = iteration_count(n, 1)?;
        let failure = 1.0 - ((2 * s.iterations + 1) as f64 * s.theta).sin().powi(2);
        if failure > 1.0 / n as f64 + 1e-12 {
            return Ok(Err(format!("n={n}: failure {failure} exceeds 1/n")));
        }
    }
    Ok(Ok("1 - sin^2((2r+1)θ) ≤ 1/n for n = 2..4096".into()))
}

fn random_map(
    rng: &mut ChaCha8Rng,
    index_qubits: usize,
    l: usize,
) -> Result<(FingerprintWord, Vec<FingerprintWord>)> {
    let map = (0..1usize << index_qubits)
        .map(|_| FingerprintWord::from_residue(rng.gen_range(0..1u64 << l), l))
        .collect::<Result<Vec<_>>>()?;
    let target = if rng.gen_bool(0.8) {
        map[rng.gen_range(0..map.len())].clone()
    } else {
        FingerprintWord::from_residue(rng.gen_range(0..1u64 << l), l)?
    };
    Ok((target, map))
}

const GATE_SHAPES: [(usize, usize); 3] = [(5, 4), (6, 4), (6, 5)];

fn gate_level_oracle(_: SelftestHooks) -> Result<std::result::Result<String, String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f);
    for (index_qubits, l) in GATE_SHAPES {
        for case in 0..4 {
            let (target, map) = random_map(&mut rng, index_qubits, l)?;
            if !gate_level_oracle_check_with(index_qubits, l, &target, &map, OracleWiring::Standard)? {
                return Ok(Err(format!("{} qubits, case {case}", index_qubits + l + 1)));
            }
        }
    }
    Ok(Ok(
        "H·U_f·H equals phase flip with ancilla |1> at 10, 11, 12 qubits".into(),
    ))
}

fn gate_level_negative_control(_: SelftestHooks) -> Result<std::result::Result<String, String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xbad);
    for (index_qubits, l) in GATE_SHAPES {
        let (target, map) = random_map(&mut rng, index_qubits, l)?;
        if gate_level_oracle_check_with(index_qubits, l, &target, &map, OracleWiring::Complemented)? {
            return Ok(Err(format!(
                "miswired oracle accepted at {} qubits",
                index_qubits + l + 1
            )));
        }
    }
    Ok(Ok("miswired U_f rejected".into()))
}

fn pairwise_divisor_bound(_: SelftestHooks) -> Result<std::result::Result<String, String>> {
    // Residues of a1 and a2 agree exactly when p divides a1 - a2, so every
    // pair reduces to its difference.
    let primes = first_primes(1000)?;
    for m in 1..=12u32 {
        for delta in 1..1u64 << m {
            let count = primes.primes().iter().filter(|&&p| delta % p == 0).count();
            if count > m as usize {
                return Ok(Err(format!("m={m} δ={delta}: {count} primes")));
            }
        }
    }
    Ok(Ok("|P_{a1,a2}| ≤ m for all differences below 2^12".into()))
}

fn census_mass(_: SelftestHooks) -> Result<std::result::Result<String, String>> {
    let (len, m) = (9usize, 3usize);
    let mut instances = 0;
    for c in [3usize, 5, 10] {
        let primes = first_primes(c * (len - m + 1) * m)?;
        for value in 0..1u64 << len {
            let text = BitString::from_value(value, len)?;
            let v = build_vocabulary(&text, m)?;
            for w in v.windows() {
                let bad = bad_prime_census(&v, w, &primes)?;
                if bad.len() > v.n() * m || bad.len() as f64 / primes.d() as f64 > 1.0 / c as f64 {
                    return Ok(Err(format!("text {text} w {w} c={c}: {} bad primes", bad.len())));
                }
                instances += 1;
            }
        }
    }
    Ok(Ok(format!("{instances} census instances within 1/c")))
}

fn freivalds_universality(_: SelftestHooks) -> Result<std::result::Result<String, String>> {
    let family = freivalds_family(3, 2, 3)?;
    let report = verify_strong_universality(&family, 2, 1.0 / 3.0, 3, UniversalityBudget::default())?;
    if report.holds() && report.exhaustive {
        Ok(Ok(format!(
            "max ratio {} ≤ 1/3 over {} pairs",
            report.max_ratio, report.tested
        )))
    } else {
        Ok(Err(format!(
            "max ratio {} (exhaustive: {})",
            report.max_ratio, report.exhaustive
        )))
    }
}
