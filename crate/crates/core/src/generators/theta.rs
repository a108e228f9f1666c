//! The lattice theta series `sum_{m in Z^(k-1)} q^Q(m)` with
//! `Q(m) = sum m_i^2 + sum_{i<j} m_i m_j`, by two independent routes.
//!
//! Both work in doubled units: `2Q(m) = sum m_i^2 + (sum m_i)^2`.
//!
//! * [`ThetaStrategy::LatticeEnum`] walks every lattice vector with
//!   `Q(m) <= T`, pruning on the partial norm.
//! * [`ThetaStrategy::ConstantTerm`] takes the `z^0` coefficient of
//!   `(sum_j z^j q^(j^2/2))^k`. After `i` factors a monomial `z^D q^(E/2)`
//!   survives only if `E + D^2/(k-i) <= 2T`, since closing `D` back to zero
//!   with the remaining factors costs at least `D^2/(k-i)`.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::series::{Coeffs, TruncatedSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaStrategy {
    LatticeEnum,
    ConstantTerm,
}

pub fn frobenius_theta(
    k: u32,
    trunc: usize,
    modulus: Option<u32>,
    strategy: ThetaStrategy,
) -> Result<TruncatedSeries> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let coeffs = match (strategy, modulus) {
        (ThetaStrategy::LatticeEnum, None) => Coeffs::Exact(
            lattice_counts(k, trunc)?
                .into_iter()
                .map(BigInt::from)
                .collect(),
        ),
        (ThetaStrategy::LatticeEnum, Some(p)) => Coeffs::Residues {
            modulus: p,
            values: lattice_counts(k, trunc)?
                .into_iter()
                .map(|c| (c % p as u64) as u32)
                .collect(),
        },
        (ThetaStrategy::ConstantTerm, None) => {
            let counts = constant_term(k as usize, trunc, 1u128, |a, b| a.saturating_add(b));
            if counts.contains(&u128::MAX) {
                return Err(Error::Overflow("constant-term theta"));
            }
            Coeffs::Exact(counts.into_iter().map(BigInt::from).collect())
        }
        (ThetaStrategy::ConstantTerm, Some(p)) => Coeffs::Residues {
            modulus: p,
            values: constant_term(k as usize, trunc, 1 % p, move |a, b| {
                // a, b < p < 2^31, so the sum cannot wrap
                let s = a + b;
                s.min(s.wrapping_sub(p))
            }),
        },
    };
    Ok(TruncatedSeries::from_coeffs(0, coeffs))
}

// ---------------------------------------------------------------------------
// Direct enumeration
// ---------------------------------------------------------------------------

fn lattice_counts(k: u32, trunc: usize) -> Result<Vec<u64>> {
    let dims = k as usize - 1;
    let mut counts = vec![0u64; trunc + 1];
    let budget = 2 * trunc as i64;
    walk(dims, 0, 0, budget, &mut counts)?;
    Ok(counts)
}

/// `rem` coordinates left to choose, `sq` = sum of squares so far,
/// `sum` = coordinate sum so far.
fn walk(rem: usize, sq: i64, sum: i64, budget: i64, counts: &mut [u64]) -> Result<()> {
    if rem == 0 {
        let twice_q = sq + sum * sum;
        let slot = &mut counts[(twice_q / 2) as usize];
        *slot = slot
            .checked_add(1)
            .ok_or(Error::Overflow("lattice enumeration"))?;
        return Ok(());
    }
    // After choosing x, `rem - 1` coordinates remain and the cheapest
    // completion has 2Q = sq' + sum'^2 / rem.
    let r = rem as i64;
    let feasible = |x: i64| {
        let sq2 = sq + x * x;
        let sum2 = sum + x;
        sq2 * r + sum2 * sum2 <= budget * r
    };
    // (r+1) x^2 + 2 sum x + (r sq + sum^2 - r budget) <= 0
    let c = r * sq + sum * sum - r * budget;
    let disc = sum * sum - (r + 1) * c;
    if disc < 0 {
        return Ok(());
    }
    let root = (disc as f64).sqrt();
    let lo = ((-sum as f64 - root) / (r + 1) as f64).floor() as i64 - 1;
    let hi = ((-sum as f64 + root) / (r + 1) as f64).ceil() as i64 + 1;
    for x in lo..=hi {
        if feasible(x) {
            walk(rem - 1, sq + x * x, sum + x, budget, counts)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Constant term of the k-th power of the Jacobi theta function
// ---------------------------------------------------------------------------

/// Monomials `z^z q^(E/2)` with fixed `z`; entries are `E = lo + 2 idx`.
struct Row<C> {
    lo: usize,
    cells: Vec<C>,
}

fn isqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Admissible exponent window `[lo, hi]` (same parity as `z`) for a
/// monomial with z-degree `z` after `used` of `k` factors.
fn window(z: i64, used: usize, k: usize, budget: usize) -> Option<(usize, usize)> {
    let z2 = (z * z) as usize;
    let mut lo = if used == 0 {
        if z != 0 {
            return None;
        }
        0
    } else {
        z2.div_ceil(used)
    };
    let left = k - used;
    let need = if left == 0 {
        if z != 0 {
            return None;
        }
        0
    } else {
        z2.div_ceil(left)
    };
    if need > budget {
        return None;
    }
    let mut hi = budget - need;
    let parity = z.rem_euclid(2) as usize;
    if lo % 2 != parity {
        lo += 1;
    }
    if hi % 2 != parity {
        if hi == 0 {
            return None;
        }
        hi -= 1;
    }
    (lo <= hi).then_some((lo, hi))
}

fn constant_term<C, F>(k: usize, trunc: usize, one: C, add: F) -> Vec<C>
where
    C: Copy + Default,
    F: Fn(C, C) -> C,
{
    let budget = 2 * trunc;
    let jmax = isqrt(budget) as i64;
    // rows[z + zmax]
    let zmax = jmax * k as i64;
    let width = (2 * zmax + 1) as usize;
    let empty = || -> Vec<Option<Row<C>>> { (0..width).map(|_| None).collect() };

    let mut rows = empty();
    rows[zmax as usize] = Some(Row {
        lo: 0,
        cells: vec![one],
    });

    for used in 1..=k {
        let mut next = empty();
        for (zi, row) in rows.iter().enumerate() {
            let Some(row) = row else { continue };
            let z = zi as i64 - zmax;
            let src_hi = row.lo + 2 * (row.cells.len() - 1);
            let js: Box<dyn Iterator<Item = i64>> = if used == k {
                Box::new(std::iter::once(-z))
            } else {
                Box::new(-jmax..=jmax)
            };
            for j in js {
                let j2 = (j * j) as usize;
                if j2 > budget {
                    continue;
                }
                let z_next = z + j;
                let Some((lo, hi)) = window(z_next, used, k, budget) else {
                    continue;
                };
                // source exponents E with lo <= E + j^2 <= hi
                let e_lo = row.lo.max(lo.saturating_sub(j2));
                let e_hi = src_hi.min(match hi.checked_sub(j2) {
                    Some(h) => h,
                    None => continue,
                });
                if e_lo > e_hi {
                    continue;
                }
                let slot = &mut next[(z_next + zmax) as usize];
                let dst = slot.get_or_insert_with(|| Row {
                    lo,
                    cells: vec![C::default(); (hi - lo) / 2 + 1],
                });
                let src_from = (e_lo - row.lo) / 2;
                let src_to = (e_hi - row.lo) / 2;
                let dst_from = (e_lo + j2 - dst.lo) / 2;
                let count = src_to - src_from + 1;
                let src = &row.cells[src_from..src_from + count];
                let out = &mut dst.cells[dst_from..dst_from + count];
                for (o, &s) in out.iter_mut().zip(src) {
                    *o = add(*o, s);
                }
            }
        }
        rows = next;
    }

    let mut out = vec![C::default(); trunc + 1];
    if let Some(row) = rows[zmax as usize].take() {
        // z = 0 row holds even exponents E = 2n starting at lo = 0
        debug_assert_eq!(row.lo, 0);
        for (n, c) in row.cells.into_iter().enumerate().take(trunc + 1) {
            out[n] = c;
        }
    }
    out
}
