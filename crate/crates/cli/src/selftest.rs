//! Built-in regression suite, one check per acceptance criterion.
//!
//! Randomized parts draw from a ChaCha stream seeded by `--seed`, so a run
//! is reproducible from its seed.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use incongru::arith::{gcd, is_prime, kronecker, prime_factors};
use incongru::generators::{
    frobenius_coeffs_with, mock_nu_coeffs, mock_omega_coeffs, partition_coeffs, NuMethod,
    ThetaStrategy,
};
use incongru::scanner::{verify_congruence, Verification};
use incongru::sieve::{
    certify, corollary_conditions, exceptional_residue, prohibited_residues_eta,
    prohibited_residues_mock, two_ell_analysis, MockFlavor,
};
use incongru::{Error, FamilySpec, TruncatedSeries};

pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub outcome: Result<String, String>,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.outcome.is_ok()
    }

    pub fn detail(&self) -> &str {
        match &self.outcome {
            Ok(s) | Err(s) => s,
        }
    }

    pub fn line(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        format!(
            "criterion {:>2} {verdict}  {}: {}",
            self.id,
            self.name,
            self.detail()
        )
    }
}

type Check = std::result::Result<String, String>;

type Criterion = (u8, &'static str, Box<dyn Fn() -> Check>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn core<T>(r: incongru::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn keys(m: std::collections::BTreeMap<u64, u64>) -> BTreeSet<u64> {
    m.into_keys().collect()
}

fn set(xs: &[u64]) -> BTreeSet<u64> {
    xs.iter().copied().collect()
}

fn passes(
    coeffs: &TruncatedSeries,
    m: u64,
    t: u64,
    ell: u64,
    depth: u64,
) -> std::result::Result<(), String> {
    match core(verify_congruence(coeffs, m, t, ell, depth))? {
        Verification::Pass => Ok(()),
        Verification::Violation { n } => Err(format!("a({m}n+{t}) mod {ell} fails at n={n}")),
    }
}

fn partition_example() -> Check {
    let a = keys(core(prohibited_residues_eta(-1, 1, 5, 0))?);
    let b = keys(core(prohibited_residues_eta(-1, 1, 5, 1))?);
    ensure(a == set(&[0, 3]), || format!("t0=0 gave {a:?}"))?;
    ensure(b == set(&[1, 2]), || format!("t0=1 gave {b:?}"))?;
    let fam = FamilySpec::partition();
    let cert = core(certify(&fam, &core(fam.generate(50, None))?, 5, 5, None))?;
    ensure(cert.uncovered == [4], || {
        format!("uncovered {:?}", cert.uncovered)
    })?;
    Ok("{0,3} and {1,2}; only t=4 open".into())
}

fn frobenius_example() -> Check {
    let fam = core(FamilySpec::frobenius(3))?;
    let coeffs = core(fam.generate(120, None))?;
    let cert = core(certify(&fam, &coeffs, 10, 5, Some(&[0, 1])))?;
    let got = set(&cert.prohibited_set());
    ensure(got == set(&[0, 1, 3, 4, 5, 6, 8, 9]), || {
        format!("prohibited {got:?}")
    })?;
    let two = core(two_ell_analysis(3, 5))?;
    ensure(two.surviving == [2, 7] && two.holds, || format!("{two:?}"))?;
    Ok("prohibited {0,1,3,4,5,6,8,9}; surviving {2,7}".into())
}

fn corollary_checks() -> Check {
    let cphi3 = core(FamilySpec::frobenius(3))?;
    for ell in (5..100).filter(|&l| is_prime(l)) {
        let holds = core(corollary_conditions(&cphi3, ell))?
            .corollary("m_eq_ell")
            .map(|c| c.holds)
            .unwrap_or(false);
        ensure(holds == [3, 5, 6].contains(&(ell % 7)), || {
            format!("k=3, l={ell}")
        })?;
    }
    let flagged = |k: u32| -> std::result::Result<Vec<u64>, String> {
        let fam = core(FamilySpec::frobenius(k))?;
        let mut out = Vec::new();
        for ell in (5..1000).filter(|&l| is_prime(l)) {
            let report = core(corollary_conditions(&fam, ell))?;
            if !report
                .corollary("m_eq_2ell")
                .map(|c| c.conditions[0].holds)
                .unwrap_or(true)
            {
                out.push(ell);
            }
        }
        Ok(out)
    };
    let k4 = flagged(4)?;
    let k6 = flagged(6)?;
    ensure(k4 == [17], || format!("k=4 flags {k4:?}"))?;
    ensure(k6 == [11, 397], || format!("k=6 flags {k6:?}"))?;
    Ok("k=3 mod-7 rule for l<100; k=4 flags 17; k=6 flags 11, 397".into())
}

fn classical_congruences() -> Check {
    let p = |ell: u32, t: u64| -> std::result::Result<(), String> {
        let m = ell as u64;
        passes(
            &partition_coeffs((m * 2000 + t) as usize, Some(ell)),
            m,
            t,
            m,
            2000,
        )
    };
    p(5, 4)?;
    p(7, 5)?;
    p(11, 6)?;
    let c2 = core(FamilySpec::frobenius(2))?;
    passes(&core(c2.generate(2 * 2000 + 1, Some(2)))?, 2, 1, 2, 2000)?;
    passes(&core(c2.generate(5 * 2000 + 3, Some(5)))?, 5, 3, 5, 2000)?;
    for k in [6, 11] {
        let c = core(frobenius_coeffs_with(
            k,
            5 * 200 + 4,
            Some(5),
            ThetaStrategy::ConstantTerm,
        ))?;
        passes(&c, 5, 4, 5, 200)?;
    }
    Ok("p mod 5/7/11, c phi_2 mod 2/5 at depth 2000; c phi_6, c phi_11 (5n+4) at 200".into())
}

pub const THIRTEEN_CLASSES: [u64; 12] = [15, 25, 50, 75, 90, 100, 115, 140, 165, 175, 240, 275];

fn five_colored() -> Check {
    let fam = core(FamilySpec::frobenius(5))?;
    let coeffs = core(fam.generate(325 * 60 + 275, Some(13)))?;
    for t in THIRTEEN_CLASSES {
        passes(&coeffs, 325, t, 13, 60)?;
    }
    Ok("12 classes of 325n+t vanish mod 13 for n <= 60".into())
}

fn omega_forty() -> Check {
    let w = mock_omega_coeffs(40 * 200 + 35, Some(5));
    passes(&w, 40, 27, 5, 200)?;
    passes(&w, 40, 35, 5, 200)?;
    let exact = mock_omega_coeffs(39, None);
    let zeros: Vec<usize> = (0..=39)
        .filter(|&t| matches!(exact.coeffs().residue_at(t, 5), Ok(0)))
        .collect();
    ensure(zeros == [6, 20, 23, 24, 27, 35], || {
        format!("5 | a(t) for {zeros:?}")
    })?;
    Ok("40n+27, 40n+35 to n=200; small zeros {6,20,23,24,27,35}".into())
}

fn mock_sieve() -> Check {
    let set = core(prohibited_residues_mock(MockFlavor::Omega, 40, 12))?;
    ensure(set.get(&20) == Some(&7), || {
        format!("t=20 witness {:?}", set.get(&20))
    })?;
    match prohibited_residues_mock(MockFlavor::F, 5, 0) {
        Err(Error::PreconditionNotMet(_)) => {}
        other => return Err(format!("f, m=5, t0=0 gave {other:?}")),
    }
    Ok("omega t0=12 reaches 20 with d=7; f m=5 t0=0 rejected".into())
}

fn nu_suite() -> Check {
    let a = core(mock_nu_coeffs(2000, None, NuMethod::Defining))?;
    let b = core(mock_nu_coeffs(2000, None, NuMethod::Identity))?;
    ensure(a == b, || "defining and identity expansions differ".into())?;
    let m5 = core(mock_nu_coeffs(10 * 500 + 8, Some(5), NuMethod::Defining))?;
    passes(&m5, 10, 8, 5, 500)?;
    for (ell, want) in [(5u64, 3u64), (7, 2), (13, 4), (23, 15)] {
        let got = core(exceptional_residue(&FamilySpec::mock_nu(), ell))?;
        ensure(got == want, || format!("l={ell}: {got} != {want}"))?;
    }
    Ok("routes agree to q^2000; 10n+8 to n=500; exceptional residues".into())
}

/// Residues from every `d <= limit` coprime to `6 N m`.
fn brute_force_orbit(b: i64, level: u64, m: u64, t0: u64, limit: u64) -> BTreeSet<u64> {
    let primes = prime_factors(6 * level * m);
    (1..=limit)
        .filter(|d| primes.iter().all(|p| d % p != 0))
        .map(|d| {
            let d2 = (d as i128) * (d as i128);
            (t0 as i128 * d2 + b as i128 * ((d2 - 1) / 24)).rem_euclid(m as i128) as u64
        })
        .collect()
}

fn properties(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for k in 1..=6u32 {
        let trunc = rng.gen_range(100..=300);
        let a = core(frobenius_coeffs_with(
            k,
            trunc,
            None,
            ThetaStrategy::LatticeEnum,
        ))?;
        let b = core(frobenius_coeffs_with(
            k,
            trunc,
            None,
            ThetaStrategy::ConstantTerm,
        ))?;
        ensure(a == b, || {
            format!("theta routes differ at k={k}, T={trunc}")
        })?;
    }

    let c1 = core(frobenius_coeffs_with(
        1,
        2000,
        None,
        ThetaStrategy::ConstantTerm,
    ))?;
    ensure(c1.exact() == partition_coeffs(2000, None).exact(), || {
        "c phi_1 != p".into()
    })?;

    let families = [
        FamilySpec::partition(),
        core(FamilySpec::frobenius(rng.gen_range(2..=7)))?,
        FamilySpec::mock_f(),
        FamilySpec::mock_omega(),
        FamilySpec::mock_nu(),
    ];
    for fam in &families {
        let exact = core(fam.generate(1000, None))?;
        for ell in [5u32, 13] {
            let reduced = core(exact.reduce_mod(ell as u64))?;
            let modular = core(fam.generate(1000, Some(ell)))?;
            ensure(reduced == modular, || {
                format!("{fam} mod {ell}: reduction differs")
            })?;
        }
    }

    for d in (1..=10_000u64).filter(|&d| gcd(d, 6) == 1) {
        ensure((d * d - 1) % 24 == 0, || {
            format!("24 does not divide {d}^2 - 1")
        })?;
    }

    for _ in 0..8 {
        let m = rng.gen_range(1..=40u64);
        let level = rng.gen_range(1..=10u64);
        let b = rng.gen_range(-30..=30i64);
        let t0 = rng.gen_range(0..m);
        let fast = keys(core(prohibited_residues_eta(b, level, m, t0))?);
        let slow = brute_force_orbit(b, level, m, t0, 1_000_000);
        ensure(fast == slow, || {
            format!("d-range differs at m={m}, N={level}, B={b}, t0={t0}")
        })?;
    }

    for ell in [5u64, 7, 11, 13] {
        let b = rng.gen_range(-30..=30i64);
        for t0 in 0..ell {
            let base = kronecker(24 * t0 as i64 + b, ell as i64);
            let orbit = core(prohibited_residues_eta(b, 1, ell, t0))?;
            for &t in orbit.keys() {
                ensure(kronecker(24 * t as i64 + b, ell as i64) == base, || {
                    format!("symbol changes along orbit, l={ell}, B={b}, t0={t0}")
                })?;
            }
            if base != 0 {
                ensure(orbit.len() as u64 == (ell - 1) / 2, || {
                    format!("orbit size {} at l={ell}, B={b}, t0={t0}", orbit.len())
                })?;
            }
        }
    }
    Ok(format!(
        "seed {seed}: theta routes, c phi_1 = p, reduction, d-range, QR coherence"
    ))
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    let checks: [Criterion; 9] = [
        (1, "partition sieve example", Box::new(partition_example)),
        (2, "c phi_3 mod 10 example", Box::new(frobenius_example)),
        (3, "corollary conditions", Box::new(corollary_checks)),
        (4, "classical congruences", Box::new(classical_congruences)),
        (5, "c phi_5 mod 13", Box::new(five_colored)),
        (6, "omega mod 5", Box::new(omega_forty)),
        (7, "mock sieve example", Box::new(mock_sieve)),
        (8, "nu suite", Box::new(nu_suite)),
        (9, "property suites", Box::new(move || properties(seed))),
    ];
    checks
        .into_iter()
        .map(|(id, name, check)| CriterionResult {
            id,
            name,
            outcome: check(),
        })
        .collect()
}
