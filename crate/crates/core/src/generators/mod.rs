//! Coefficient generators for every supported family, plus seed discovery.

mod family;
mod mock;
mod theta;

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub use family::{FamilyKind, FamilySpec};
pub use mock::{mock_f_coeffs, mock_nu_coeffs, mock_omega_coeffs, NuMethod};
pub use theta::{frobenius_theta, ThetaStrategy};

use crate::error::{Error, Result};
use crate::series::{euler_product, reduce_big, Coeffs, Residues, Ring, TruncatedSeries};

/// `p(0..=trunc)` by Euler's pentagonal recurrence
/// `p(n) = sum_{j>=1} (-1)^(j+1) [p(n - j(3j-1)/2) + p(n - j(3j+1)/2)]`.
pub fn partition_coeffs(trunc: usize, modulus: Option<u32>) -> TruncatedSeries {
    fn run<R: Ring>(ring: &R, trunc: usize) -> Vec<R::E> {
        let mut p: Vec<R::E> = Vec::with_capacity(trunc + 1);
        p.push(ring.one());
        for n in 1..=trunc {
            let mut acc = ring.zero();
            for j in 1usize.. {
                let g1 = j * (3 * j - 1) / 2;
                if g1 > n {
                    break;
                }
                let g2 = g1 + j;
                if j % 2 == 1 {
                    ring.add_assign(&mut acc, &p[n - g1]);
                    if g2 <= n {
                        ring.add_assign(&mut acc, &p[n - g2]);
                    }
                } else {
                    ring.sub_assign(&mut acc, &p[n - g1]);
                    if g2 <= n {
                        ring.sub_assign(&mut acc, &p[n - g2]);
                    }
                }
            }
            p.push(acc);
        }
        p
    }
    let coeffs = match modulus {
        None => Coeffs::Exact(run(&crate::series::Integers, trunc)),
        Some(m) => Coeffs::Residues {
            modulus: m,
            values: run(&Residues(m), trunc),
        },
    };
    TruncatedSeries::from_coeffs(-1, coeffs)
}

/// Picks the theta route: direct enumeration for small `k` and `T`,
/// constant-term elsewhere.
fn auto_strategy(k: u32, trunc: usize) -> ThetaStrategy {
    if k >= 4 || trunc >= 1000 {
        ThetaStrategy::ConstantTerm
    } else {
        ThetaStrategy::LatticeEnum
    }
}

/// `c phi_k(0..=trunc)`: the theta series divided by `(q;q)^k`.
pub fn frobenius_coeffs(k: u32, trunc: usize, modulus: Option<u32>) -> Result<TruncatedSeries> {
    frobenius_coeffs_with(k, trunc, modulus, auto_strategy(k, trunc))
}

pub fn frobenius_coeffs_with(
    k: u32,
    trunc: usize,
    modulus: Option<u32>,
    strategy: ThetaStrategy,
) -> Result<TruncatedSeries> {
    let mut series = frobenius_theta(k, trunc, modulus, strategy)?;
    let euler = euler_product(1, trunc, modulus)?;
    for _ in 0..k {
        series = series.div(&euler)?;
    }
    Ok(series.with_offset24(-(k as i64)))
}

/// Result of looking for a seed `t0` in one residue class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeedOutcome {
    /// `t0` is the first nonzero index of the class and `l` does not divide it.
    Seed { t0: usize, residue: u32 },
    /// The first nonzero entry of the class is divisible by `l`.
    Unseedable { first_nonzero: usize },
    /// Every entry of the class up to the truncation is zero.
    Exhausted,
}

/// Smallest `t0 = class (mod m)` with `a(t0) != 0`, accepted as a seed when
/// `ell` does not divide `a(t0)`. Zeros below `t0` must be exact zeros, so
/// the series must carry exact coefficients.
pub fn seed_scan(
    coeffs: &TruncatedSeries,
    m: usize,
    ell: u32,
    class: usize,
) -> Result<SeedOutcome> {
    let exact = coeffs.exact().ok_or(Error::RequiresExact)?;
    if m == 0 || class >= m {
        return Err(Error::InvalidParameter(format!(
            "class {class} is not in [0, {m})"
        )));
    }
    if ell < 2 {
        return Err(Error::NotPrime(ell as u64));
    }
    let first = (class..exact.len())
        .step_by(m)
        .find(|&n| !exact[n].is_zero());
    Ok(match first {
        None => SeedOutcome::Exhausted,
        Some(t0) => {
            let residue = reduce_big(&exact[t0], ell);
            if residue == 0 {
                SeedOutcome::Unseedable { first_nonzero: t0 }
            } else {
                SeedOutcome::Seed { t0, residue }
            }
        }
    })
}

/// Closed forms for `c phi_k(0..=3)`:
/// `1, k^2, k^2(k^2-2k+9)/4, k^2(k^4-6k^3+49k^2-48k+112)/36`.
pub fn frobenius_closed_forms(k: i64) -> [BigInt; 4] {
    let k = BigInt::from(k);
    let k2 = &k * &k;
    let c2 = &k2 * (&k2 - BigInt::from(2) * &k + BigInt::from(9)) / BigInt::from(4);
    let k3 = &k2 * &k;
    let k4 = &k2 * &k2;
    let c3 = &k2
        * (&k4 - BigInt::from(6) * &k3 + BigInt::from(49) * &k2 - BigInt::from(48) * &k
            + BigInt::from(112))
        / BigInt::from(36);
    [BigInt::one(), k2.clone(), c2, c3]
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn ints(s: &TruncatedSeries) -> Vec<i64> {
        s.exact()
            .unwrap()
            .iter()
            .map(|c| c.to_i64().unwrap())
            .collect()
    }

    #[test]
    fn partition_examples() {
        let p = ints(&partition_coeffs(12, None));
        assert_eq!(p[0], 1);
        assert_eq!(p[4], 5);
        assert_eq!(p[..=12], [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77]);
        assert_eq!(partition_coeffs(12, Some(5)).residues().unwrap()[9], 0);
        assert_eq!(partition_coeffs(0, None).trunc(), 0);
        assert_eq!(partition_coeffs(5, None).offset24(), -1);
    }

    #[test]
    fn frobenius_examples() {
        for k in 1..=8u32 {
            let c = frobenius_coeffs(k, 6, None).unwrap();
            assert_eq!(ints(&c)[1], (k * k) as i64);
            assert_eq!(c.offset24(), -(k as i64));
        }
        let c1 = frobenius_coeffs(1, 200, None).unwrap();
        assert_eq!(c1.exact(), partition_coeffs(200, None).exact());
        let c2 = frobenius_coeffs(2, 10, Some(5)).unwrap();
        assert_eq!(c2.residues().unwrap()[3], 0);
        assert_eq!(ints(&frobenius_coeffs(4, 3, None).unwrap())[2], 68);
    }

    #[test]
    fn frobenius_strategies_agree() {
        for k in 1..=6u32 {
            let a = frobenius_coeffs_with(k, 80, None, ThetaStrategy::LatticeEnum).unwrap();
            let b = frobenius_coeffs_with(k, 80, None, ThetaStrategy::ConstantTerm).unwrap();
            assert_eq!(a, b, "k={k}");
        }
    }

    #[test]
    fn closed_forms_match_generated_values() {
        for k in 1..=10i64 {
            let forms = frobenius_closed_forms(k);
            let c = frobenius_coeffs(k as u32, 3, None).unwrap();
            assert_eq!(c.exact().unwrap(), &forms[..], "k={k}");
        }
        assert_eq!(frobenius_closed_forms(4)[2].to_i64(), Some(68));
    }

    #[test]
    fn seed_scan_examples() {
        let p = partition_coeffs(30, None);
        assert_eq!(
            seed_scan(&p, 5, 5, 0).unwrap(),
            SeedOutcome::Seed { t0: 0, residue: 1 }
        );
        assert_eq!(
            seed_scan(&p, 5, 5, 4).unwrap(),
            SeedOutcome::Unseedable { first_nonzero: 4 }
        );
        let zeros = TruncatedSeries::from_i64(0, &[1, 0, 0, 0, 0, 0], None);
        assert_eq!(seed_scan(&zeros, 3, 5, 1).unwrap(), SeedOutcome::Exhausted);
        // zeros before the seed are skipped
        let gap = TruncatedSeries::from_i64(0, &[1, 0, 0, 0, 7, 0], None);
        assert_eq!(
            seed_scan(&gap, 2, 5, 0).unwrap(),
            SeedOutcome::Seed { t0: 0, residue: 1 }
        );
        let gap = TruncatedSeries::from_i64(0, &[0, 0, 0, 0, 7, 0], None);
        assert_eq!(
            seed_scan(&gap, 2, 5, 0).unwrap(),
            SeedOutcome::Seed { t0: 4, residue: 2 }
        );
    }

    #[test]
    fn seed_scan_needs_exact_input() {
        let p = partition_coeffs(10, Some(5));
        assert!(matches!(seed_scan(&p, 5, 5, 0), Err(Error::RequiresExact)));
        let p = partition_coeffs(10, None);
        assert!(seed_scan(&p, 5, 5, 5).is_err());
    }

    #[test]
    fn generators_commute_with_reduction() {
        let families = [
            FamilySpec::partition(),
            FamilySpec::frobenius(3).unwrap(),
            FamilySpec::frobenius(5).unwrap(),
            FamilySpec::mock_f(),
            FamilySpec::mock_omega(),
            FamilySpec::mock_nu(),
            "eta:1^2,2^-1@N=2".parse().unwrap(),
        ];
        for fam in &families {
            let exact = fam.generate(250, None).unwrap();
            for ell in [5u32, 13] {
                let modular = fam.generate(250, Some(ell)).unwrap();
                assert_eq!(exact.reduce_mod(ell as u64).unwrap(), modular, "{fam}");
            }
        }
    }
}
