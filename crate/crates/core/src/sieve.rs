//! Incongruence certificates.
//!
//! Given a seed `t0` (an index with `l` not dividing `a(t0)` and only exact
//! zeros before it in its class mod `m`), every residue
//!
//! ```text
//! t = t0 d^2 + B (d^2 - 1)/24   (mod m),   gcd(d, 6Nm) = 1
//! ```
//!
//! supports no congruence `a(mn + t) = 0 (mod l)`. The mock theta functions
//! f and omega use the same shape with their own shifts, under a Kronecker
//! symbol precondition on `t0`.
//!
//! `t` depends only on `d mod 24m`. A class mod `24m` contains an integer
//! coprime to `6Nm` exactly when it is coprime to `rad(6m)`: primes of `N`
//! that do not divide `6m` can always be avoided by moving inside the class.
//! So the enumeration runs over `c in [1, 24m]` with `gcd(c, rad(6m)) = 1`
//! and lifts each `c` to an actual witness `d = c + 24m j`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::arith::{gcd, is_prime, kronecker, prime_factors, radical};
use crate::error::{Error, Result};
use crate::generators::{seed_scan, FamilyKind, FamilySpec, SeedOutcome};
use crate::series::TruncatedSeries;

/// Residue `t` mapped to the first witness `d` that produced it.
pub type ResidueSet = BTreeMap<u64, u64>;

/// One representative `d` per admissible class mod `24m`, each coprime to
/// `6 N m`, in increasing order of class.
pub fn admissible_witnesses(level: u64, m: u64) -> Vec<u64> {
    let period = 24 * m;
    let g = radical(6 * m);
    let full = 6 * level * m;
    (1..=period)
        .filter(|&c| gcd(c, g) == 1)
        .map(|c| {
            let mut d = c;
            while gcd(d, full) != 1 {
                d += period;
            }
            d
        })
        .collect()
}

fn check_m(m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be positive".into()));
    }
    Ok(())
}

fn orbit(m: u64, level: u64, image: impl Fn(i128) -> i128) -> ResidueSet {
    let mut out = ResidueSet::new();
    for d in admissible_witnesses(level, m) {
        let d2 = (d as i128) * (d as i128);
        let t = image(d2).rem_euclid(m as i128) as u64;
        out.entry(t).or_insert(d);
    }
    out
}

/// Residues reachable from seed `t0` for a form in `S(B, k, N, chi)`:
/// `t0 d^2 + B (d^2 - 1)/24 mod m`. `(d^2 - 1)/24` is exact because
/// `d^2 = 1 (mod 24)` whenever `gcd(d, 6) = 1`.
pub fn prohibited_residues_eta(b: i64, level: u64, m: u64, t0: u64) -> Result<ResidueSet> {
    check_m(m)?;
    if level == 0 {
        return Err(Error::InvalidParameter("level must be positive".into()));
    }
    let t0 = (t0 % m) as i128;
    let b = b as i128;
    Ok(orbit(m, level, |d2| t0 * d2 + b * ((d2 - 1) / 24)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MockFlavor {
    F,
    Omega,
}

impl MockFlavor {
    /// The integer whose Kronecker symbol at some `p | m` must be -1.
    fn precondition_value(self, t0: i64) -> i64 {
        match self {
            MockFlavor::F => 1 - 24 * t0,
            MockFlavor::Omega => -3 * t0 - 2,
        }
    }

    fn describe(self) -> &'static str {
        match self {
            MockFlavor::F => "(1 - 24 t0 | p) = -1",
            MockFlavor::Omega => "(-3 t0 - 2 | p) = -1",
        }
    }
}

/// Odd primes `p | m` at which the flavor's symbol is -1.
fn mock_precondition_primes(flavor: MockFlavor, m: u64, t0: u64) -> Vec<u64> {
    let value = flavor.precondition_value(t0 as i64);
    prime_factors(m)
        .into_iter()
        .filter(|&p| p > 2 && kronecker(value, p as i64) == -1)
        .collect()
}

/// Residues reachable from `t0 in [0, m)` for the mock theta functions:
/// `t0 d^2 + (1 - d^2)/24` for f and `t0 d^2 + 2(d^2 - 1)/3` for omega,
/// with `gcd(d, 24m) = 1`. Fails unless the flavor's Kronecker condition
/// holds at some odd prime `p | m`.
pub fn prohibited_residues_mock(flavor: MockFlavor, m: u64, t0: u64) -> Result<ResidueSet> {
    check_m(m)?;
    if t0 >= m {
        return Err(Error::InvalidParameter(format!(
            "t0 = {t0} is not in [0, {m})"
        )));
    }
    if mock_precondition_primes(flavor, m, t0).is_empty() {
        return Err(Error::PreconditionNotMet(format!(
            "no odd prime p | {m} with {} for t0 = {t0}",
            flavor.describe()
        )));
    }
    let t0 = t0 as i128;
    Ok(match flavor {
        MockFlavor::F => orbit(m, 4, |d2| t0 * d2 + (1 - d2) / 24),
        MockFlavor::Omega => orbit(m, 4, |d2| t0 * d2 + 2 * ((d2 - 1) / 3)),
    })
}

fn check_ell(ell: u64) -> Result<()> {
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if ell < 5 {
        return Err(Error::InvalidParameter(format!(
            "need a prime l >= 5, got {ell}"
        )));
    }
    Ok(())
}

/// `num (l^2 - 1) / den mod l`, with the division done on exact integers.
fn scaled_residue(num: i64, den: i128, ell: u64) -> u64 {
    let l = ell as i128;
    ((num as i128) * ((l * l - 1) / den)).rem_euclid(l) as u64
}

/// The one residue mod `l` the corollaries leave open.
pub fn exceptional_residue(family: &FamilySpec, ell: u64) -> Result<u64> {
    check_ell(ell)?;
    Ok(match &family.kind {
        FamilyKind::Partition | FamilyKind::EtaQuotient { .. } => scaled_residue(family.b, 24, ell),
        FamilyKind::Frobenius { k } => {
            if (*k as u64).is_multiple_of(ell) {
                return Err(Error::PreconditionNotMet(format!("{ell} divides k = {k}")));
            }
            // k (1 - l^2)/24
            scaled_residue(-(*k as i64), 24, ell)
        }
        FamilyKind::MockF => scaled_residue(-1, 24, ell),
        // -2 (1 - l^2)/3
        FamilyKind::MockOmega => scaled_residue(2, 3, ell),
        // (l^2 - 1)/3
        FamilyKind::MockNu => scaled_residue(1, 3, ell),
    })
}

// ---------------------------------------------------------------------------
// Corollary conditions
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorollaryCheck {
    /// `m_eq_ell` or `m_eq_2ell`.
    pub corollary: String,
    pub holds: bool,
    pub conditions: Vec<Condition>,
}

impl CorollaryCheck {
    fn new(corollary: &str, conditions: Vec<Condition>) -> Self {
        CorollaryCheck {
            corollary: corollary.to_string(),
            holds: conditions.iter().all(|c| c.holds),
            conditions,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub family: FamilySpec,
    pub ell: u64,
    pub corollaries: Vec<CorollaryCheck>,
}

impl ConditionReport {
    pub fn corollary(&self, name: &str) -> Option<&CorollaryCheck> {
        self.corollaries.iter().find(|c| c.corollary == name)
    }
}

/// Evaluates `p(k) mod l` for a polynomial given by integer coefficients,
/// highest degree first.
fn poly_mod(coeffs: &[i64], k: u64, ell: u64) -> i128 {
    let l = ell as i128;
    let k = (k as i128).rem_euclid(l);
    coeffs
        .iter()
        .fold(0i128, |acc, &c| (acc * k + c as i128).rem_euclid(l))
}

fn symbol_is_minus_one(label: &str, factors: &[i128], ell: u64) -> Condition {
    let l = ell as i128;
    let value = factors
        .iter()
        .fold(1i128, |acc, f| (acc * f.rem_euclid(l)).rem_euclid(l));
    let symbol = kronecker(value as i64, ell as i64);
    Condition {
        name: format!("({label} | {ell}) = -1"),
        holds: symbol == -1,
        detail: format!("symbol = {symbol}"),
    }
}

fn not_divisible(label: &str, residues: &[(String, i128)], ell: u64) -> Condition {
    let hit: Vec<&str> = residues
        .iter()
        .filter(|(_, r)| *r == 0)
        .map(|(n, _)| n.as_str())
        .collect();
    Condition {
        name: format!("{ell} does not divide {label}"),
        holds: hit.is_empty(),
        detail: if hit.is_empty() {
            "none divisible".to_string()
        } else {
            format!("divides {}", hit.join(", "))
        },
    }
}

fn frobenius_checks(k: u64, ell: u64) -> Vec<CorollaryCheck> {
    let kk = k as i128;
    let ell_not_k = not_divisible("k", &[("k".into(), kk.rem_euclid(ell as i128))], ell);
    let main = symbol_is_minus_one("k(k-24)", &[kk, kk - 24], ell);
    let mut out = vec![CorollaryCheck::new(
        "m_eq_ell",
        vec![ell_not_k.clone(), main.clone()],
    )];
    let two_ell = if k % 2 == 1 {
        vec![ell_not_k, main]
    } else {
        let factors = vec![
            ("k".to_string(), poly_mod(&[1, 0], k, ell)),
            ("k^2-2k+9".to_string(), poly_mod(&[1, -2, 9], k, ell)),
            (
                "k^4-6k^3+49k^2-48k+112".to_string(),
                poly_mod(&[1, -6, 49, -48, 112], k, ell),
            ),
        ];
        vec![
            not_divisible("k(k^2-2k+9)(k^4-6k^3+49k^2-48k+112)", &factors, ell),
            symbol_is_minus_one("k(k-48)", &[kk, kk - 48], ell),
            symbol_is_minus_one("(24-k)(72-k)", &[24 - kk, 72 - kk], ell),
        ]
    };
    out.push(CorollaryCheck::new("m_eq_2ell", two_ell));
    out
}

fn first_index_condition(label: &str, ell: u64, value: impl Fn(i64) -> i64) -> Condition {
    let found = (0..=5).find(|&i| kronecker(value(i), ell as i64) == -1);
    Condition {
        name: format!("({label} | {ell}) = -1 for some 0 <= i <= 5"),
        holds: found.is_some(),
        detail: match found {
            Some(i) => format!("i = {i}"),
            None => "no such i".to_string(),
        },
    }
}

/// Evaluates every corollary condition that applies to `family` at `l`.
pub fn corollary_conditions(family: &FamilySpec, ell: u64) -> Result<ConditionReport> {
    check_ell(ell)?;
    let corollaries = match &family.kind {
        FamilyKind::Partition | FamilyKind::EtaQuotient { .. } => {
            let b = family.b as i128;
            vec![CorollaryCheck::new(
                "m_eq_ell",
                vec![symbol_is_minus_one("B(B+24)", &[b, b + 24], ell)],
            )]
        }
        FamilyKind::Frobenius { k } => frobenius_checks(*k as u64, ell),
        FamilyKind::MockF => vec![CorollaryCheck::new(
            "m_eq_ell",
            vec![first_index_condition("1-24i", ell, |i| 1 - 24 * i)],
        )],
        FamilyKind::MockOmega => vec![CorollaryCheck::new(
            "m_eq_ell",
            vec![first_index_condition("-3i-2", ell, |i| -3 * i - 2)],
        )],
        FamilyKind::MockNu => {
            let r = ell % 8;
            vec![CorollaryCheck::new(
                "m_eq_ell",
                vec![Condition {
                    name: format!("{ell} = 5 or 7 (mod 8)"),
                    holds: r == 5 || r == 7,
                    detail: format!("{ell} = {r} (mod 8)"),
                }],
            )]
        }
    };
    Ok(ConditionReport {
        family: family.clone(),
        ell,
        corollaries,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoEllAnalysis {
    pub k: u32,
    pub ell: u64,
    /// The two residues mod `2l` left open, ascending.
    pub surviving: Vec<u64>,
    pub parity: &'static str,
    pub check: CorollaryCheck,
    /// Whether the incongruence guarantee for the other `2l - 2` residues holds.
    pub holds: bool,
}

/// `c phi_k (2 l n + t)`: the residues `k(1 - l^2)/24` and that plus `l`
/// mod `2l`, with the parity-appropriate hypotheses.
pub fn two_ell_analysis(k: u32, ell: u64) -> Result<TwoEllAnalysis> {
    check_ell(ell)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let l = ell as i128;
    let base = ((-(k as i128)) * ((l * l - 1) / 24)).rem_euclid(2 * l) as u64;
    let mut surviving = vec![base, (base + ell) % (2 * ell)];
    surviving.sort_unstable();
    let check = frobenius_checks(k as u64, ell)
        .into_iter()
        .find(|c| c.corollary == "m_eq_2ell")
        .expect("frobenius checks include the 2l corollary");
    Ok(TwoEllAnalysis {
        k,
        ell,
        surviving,
        parity: if k % 2 == 1 { "odd" } else { "even" },
        holds: check.holds,
        check,
    })
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeedRecord {
    pub class: u64,
    pub t0: u64,
    /// `a(t0) mod l`
    pub residue: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProhibitedResidue {
    pub t: u64,
    pub witness_d: u64,
    /// The seed `t0` whose orbit contains `t`.
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IncongruenceCertificate {
    pub family: FamilySpec,
    pub m: u64,
    pub ell: u64,
    pub seeds: Vec<SeedRecord>,
    pub prohibited: Vec<ProhibitedResidue>,
    pub exceptional: Vec<u64>,
    pub conditions: Vec<CorollaryCheck>,
    /// Residues in `[0, m)` not in `prohibited`.
    pub uncovered: Vec<u64>,
    pub diagnostics: Vec<String>,
}

impl IncongruenceCertificate {
    pub fn prohibited_set(&self) -> Vec<u64> {
        self.prohibited.iter().map(|p| p.t).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

fn mock_flavor(family: &FamilySpec) -> Option<MockFlavor> {
    match family.kind {
        FamilyKind::MockF => Some(MockFlavor::F),
        FamilyKind::MockOmega => Some(MockFlavor::Omega),
        _ => None,
    }
}

/// Seeds discovered in every class, in class order.
fn discover_seeds(
    coeffs: &TruncatedSeries,
    m: u64,
    ell: u32,
    diagnostics: &mut Vec<String>,
) -> Result<Vec<SeedRecord>> {
    let mut seeds = Vec::new();
    for class in 0..m {
        match seed_scan(coeffs, m as usize, ell, class as usize)? {
            SeedOutcome::Seed { t0, residue } => seeds.push(SeedRecord {
                class,
                t0: t0 as u64,
                residue,
            }),
            SeedOutcome::Unseedable { first_nonzero } => diagnostics.push(format!(
                "class {class}: first nonzero a({first_nonzero}) is divisible by {ell}"
            )),
            SeedOutcome::Exhausted => diagnostics.push(format!(
                "class {class}: no nonzero coefficient up to q^{}",
                coeffs.trunc()
            )),
        }
    }
    Ok(seeds)
}

/// Checks caller-pinned seeds with the same predicate seed discovery uses.
fn validate_seeds(
    coeffs: &TruncatedSeries,
    m: u64,
    ell: u32,
    pinned: &[u64],
) -> Result<Vec<SeedRecord>> {
    let mut out = Vec::new();
    for &t0 in pinned {
        if t0 as usize > coeffs.trunc() {
            return Err(Error::TruncationTooShallow {
                needed: t0 as usize,
                have: coeffs.trunc(),
            });
        }
        let class = t0 % m;
        match seed_scan(coeffs, m as usize, ell, class as usize)? {
            SeedOutcome::Seed { t0: found, residue } if found as u64 == t0 => {
                out.push(SeedRecord { class, t0, residue })
            }
            other => {
                return Err(Error::PreconditionNotMet(format!(
                    "t0 = {t0} is not a seed mod {m} for l = {ell} ({other:?})"
                )))
            }
        }
    }
    Ok(out)
}

/// Builds the certificate for `(family, m, l)`. Seeds are discovered per
/// class unless `pinned` supplies them; each seed's orbit is unioned, the
/// first witness per residue kept.
pub fn certify(
    family: &FamilySpec,
    coeffs: &TruncatedSeries,
    m: u64,
    ell: u64,
    pinned: Option<&[u64]>,
) -> Result<IncongruenceCertificate> {
    check_m(m)?;
    if coeffs.exact().is_none() {
        return Err(Error::RequiresExact);
    }
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    let ell32 = u32::try_from(ell).map_err(|_| Error::ModulusTooLarge(ell))?;
    let mut diagnostics = Vec::new();

    let seeds = match pinned {
        Some(list) => validate_seeds(coeffs, m, ell32, list)?,
        None => discover_seeds(coeffs, m, ell32, &mut diagnostics)?,
    };

    let mut prohibited: BTreeMap<u64, ProhibitedResidue> = BTreeMap::new();
    let mut used_seeds = Vec::new();
    let mut absorb = |set: ResidueSet, seed: u64| {
        for (t, d) in set {
            prohibited.entry(t).or_insert(ProhibitedResidue {
                t,
                witness_d: d,
                seed,
            });
        }
    };

    match (&family.kind, mock_flavor(family)) {
        (FamilyKind::MockNu, _) => {
            diagnostics.push("nu has no direct seed sieve; see conditions and exceptional".into());
        }
        (_, Some(flavor)) => {
            if ell < 5 {
                return Err(Error::PreconditionNotMet(format!(
                    "the mock theta sieve needs l >= 5, got {ell}"
                )));
            }
            for seed in seeds {
                if seed.t0 != seed.class {
                    let msg = format!(
                        "class {}: seed {} lies beyond [0, m); mock sieve needs t0 < m",
                        seed.class, seed.t0
                    );
                    if pinned.is_some() {
                        return Err(Error::PreconditionNotMet(msg));
                    }
                    diagnostics.push(msg);
                    continue;
                }
                match prohibited_residues_mock(flavor, m, seed.t0) {
                    Ok(set) => {
                        absorb(set, seed.t0);
                        used_seeds.push(seed);
                    }
                    Err(e @ Error::PreconditionNotMet(_)) => {
                        if pinned.is_some() {
                            return Err(e);
                        }
                        diagnostics.push(format!("class {}: {e}", seed.class));
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        _ => {
            for seed in seeds {
                absorb(
                    prohibited_residues_eta(family.b, family.level, m, seed.t0)?,
                    seed.t0,
                );
                used_seeds.push(seed);
            }
        }
    }
    if used_seeds.is_empty() {
        diagnostics.push("no class produced a usable seed".into());
    }

    let exceptional = if is_prime(ell) && ell >= 5 {
        match (&family.kind, m) {
            (FamilyKind::Frobenius { k }, m) if m == 2 * ell => {
                two_ell_analysis(*k, ell)?.surviving
            }
            (_, m) if m == ell => exceptional_residue(family, ell)
                .map(|r| vec![r])
                .unwrap_or_default(),
            _ => vec![],
        }
    } else {
        vec![]
    };
    let conditions = if ell >= 5 {
        corollary_conditions(family, ell)?.corollaries
    } else {
        vec![]
    };
    let uncovered = (0..m).filter(|t| !prohibited.contains_key(t)).collect();

    Ok(IncongruenceCertificate {
        family: family.clone(),
        m,
        ell,
        seeds: used_seeds,
        prohibited: prohibited.into_values().collect(),
        exceptional,
        conditions,
        uncovered,
        diagnostics,
    })
}
