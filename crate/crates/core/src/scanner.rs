//! Brute-force progression scans, congruence verification and
//! reconciliation of scans against certificates.
//!
//! A scan never claims a congruence. A class with no nonzero coefficient up
//! to depth `D` is only a candidate at that depth.

use std::fmt::Write as _;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::generators::FamilySpec;
use crate::series::TruncatedSeries;
use crate::sieve::IncongruenceCertificate;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// `a(m n + t) != 0 (mod l)` at this `n`.
    WitnessedNonzero(u64),
    /// Every `a(m n + t)` with `n <= D` vanishes mod `l`.
    Candidate(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassStatus {
    pub t: u64,
    pub status: Status,
}

impl Serialize for ClassStatus {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("t", &self.t)?;
        match self.status {
            Status::WitnessedNonzero(n) => {
                map.serialize_entry("status", "witnessed_nonzero")?;
                map.serialize_entry("witness_n", &n)?;
            }
            Status::Candidate(_) => map.serialize_entry("status", "candidate")?,
        }
        map.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub family: FamilySpec,
    pub m: u64,
    pub ell: u64,
    pub depth: u64,
    /// One entry per `t in [0, m)`, ascending.
    pub statuses: Vec<ClassStatus>,
}

impl ScanReport {
    pub fn status(&self, t: u64) -> Option<Status> {
        self.statuses.get(t as usize).map(|c| c.status)
    }

    pub fn candidates(&self) -> Vec<u64> {
        self.statuses
            .iter()
            .filter(|c| matches!(c.status, Status::Candidate(_)))
            .map(|c| c.t)
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("t\tstatus\twitness_n\n");
        for c in &self.statuses {
            match c.status {
                Status::WitnessedNonzero(n) => writeln!(out, "{}\twitnessed_nonzero\t{n}", c.t),
                Status::Candidate(_) => writeln!(out, "{}\tcandidate\t", c.t),
            }
            .expect("writing to a string");
        }
        out
    }
}

fn check_args(coeffs: &TruncatedSeries, m: u64, ell: u64, needed: u64) -> Result<u32> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be positive".into()));
    }
    if !crate::arith::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    let ell = u32::try_from(ell).map_err(|_| Error::ModulusTooLarge(ell))?;
    if needed > coeffs.trunc() as u64 {
        return Err(Error::TruncationTooShallow {
            needed: needed as usize,
            have: coeffs.trunc(),
        });
    }
    Ok(ell)
}

/// Least `n <= depth` with `a(m n + t) != 0 (mod l)`.
fn first_nonzero(
    coeffs: &TruncatedSeries,
    m: u64,
    t: u64,
    ell: u32,
    depth: u64,
) -> Result<Option<u64>> {
    let c = coeffs.coeffs();
    for n in 0..=depth {
        if c.residue_at((m * n + t) as usize, ell)? != 0 {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Scans every class `t in [0, m)` for `n <= depth`. Needs coefficients up
/// to `m depth + m - 1`.
pub fn scan(
    family: &FamilySpec,
    coeffs: &TruncatedSeries,
    m: u64,
    ell: u64,
    depth: u64,
) -> Result<ScanReport> {
    let ell32 = check_args(coeffs, m, ell, m * depth + m - 1)?;
    let statuses = (0..m)
        .map(|t| {
            let status = match first_nonzero(coeffs, m, t, ell32, depth)? {
                Some(n) => Status::WitnessedNonzero(n),
                None => Status::Candidate(depth),
            };
            Ok(ClassStatus { t, status })
        })
        .collect::<Result<_>>()?;
    Ok(ScanReport {
        family: family.clone(),
        m,
        ell,
        depth,
        statuses,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Verification {
    Pass,
    Violation { n: u64 },
}

/// Checks `a(m n + t) = 0 (mod l)` for all `n <= depth`. Needs coefficients
/// up to `m depth + t`.
pub fn verify_congruence(
    coeffs: &TruncatedSeries,
    m: u64,
    t: u64,
    ell: u64,
    depth: u64,
) -> Result<Verification> {
    if t >= m {
        return Err(Error::InvalidParameter(format!(
            "t = {t} is not in [0, {m})"
        )));
    }
    let ell32 = check_args(coeffs, m, ell, m * depth + t)?;
    Ok(match first_nonzero(coeffs, m, t, ell32, depth)? {
        Some(n) => Verification::Violation { n },
        None => Verification::Pass,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Ok,
    Warn,
    Contradiction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reconciliation {
    pub verdict: Verdict,
    /// Prohibited classes the caller marked as verified congruences.
    pub contradictions: Vec<u64>,
    /// Prohibited classes still without a witness at the scan depth.
    pub unwitnessed: Vec<u64>,
}

/// Cross-checks a scan against a certificate for the same `(family, m, l)`.
/// `verified` lists classes the caller has verified as congruences.
pub fn reconcile(
    report: &ScanReport,
    cert: &IncongruenceCertificate,
    verified: &[u64],
) -> Result<Reconciliation> {
    if report.family != cert.family || report.m != cert.m || report.ell != cert.ell {
        return Err(Error::InvalidParameter(format!(
            "report ({}, m={}, l={}) and certificate ({}, m={}, l={}) differ",
            report.family, report.m, report.ell, cert.family, cert.m, cert.ell
        )));
    }
    let prohibited = cert.prohibited_set();
    let contradictions: Vec<u64> = prohibited
        .iter()
        .copied()
        .filter(|t| verified.contains(t))
        .collect();
    let unwitnessed: Vec<u64> = prohibited
        .iter()
        .copied()
        .filter(|&t| matches!(report.status(t), Some(Status::Candidate(_))))
        .collect();
    let verdict = if !contradictions.is_empty() {
        Verdict::Contradiction
    } else if !unwitnessed.is_empty() {
        Verdict::Warn
    } else {
        Verdict::Ok
    };
    Ok(Reconciliation {
        verdict,
        contradictions,
        unwitnessed,
    })
}
