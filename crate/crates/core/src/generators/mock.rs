//! Third-order mock theta functions f, omega and nu.
//!
//! Each sum is accumulated term by term. The running denominator is carried
//! as a series and updated by one binomial division per step, so a step
//! costs `O(T)` and the whole expansion `O(T^1.5)`.
//!
//! omega uses the standard normalization
//! `sum_{n>=0} q^(2n^2+2n) / ((1-q)(1-q^3)...(1-q^(2n+1)))^2`;
//! with that form `{t <= 39 : 5 | a(t)} = {6, 20, 23, 24, 27, 35}`.

use crate::error::Result;
use crate::series::TruncatedSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NuMethod {
    /// `sum q^(n^2+n) / (-q; q^2)_(n+1)`
    Defining,
    /// `-q omega(q^2) + (-q^2; q^2)^3 (q^2; q^2)`, i.e. the classical
    /// identity for `nu(-q)` with `q -> -q`.
    Identity,
}

fn binomial(k: usize, sign: i64, trunc: usize, modulus: Option<u32>) -> TruncatedSeries {
    let mut c = vec![0i64; trunc + 1];
    c[0] = 1;
    if k <= trunc {
        c[k] += sign;
    }
    TruncatedSeries::from_i64(0, &c, modulus)
}

/// `sum_n q^(e(n)) * base_n`, where `base_n = base_(n-1) / d(n)` and
/// `e` is increasing. Terms stop once `e(n) > trunc`.
fn accumulate(
    trunc: usize,
    modulus: Option<u32>,
    exponent: impl Fn(usize) -> usize,
    denominators: impl Fn(usize) -> Vec<TruncatedSeries>,
) -> TruncatedSeries {
    let mut sum = TruncatedSeries::zero(trunc, modulus);
    let mut base = TruncatedSeries::one(trunc, modulus);
    for n in 0.. {
        let e = exponent(n);
        if e > trunc {
            break;
        }
        for d in denominators(n) {
            base = base
                .truncate(trunc - e)
                .div(&d.truncate(trunc - e))
                .expect("monic divisor");
        }
        sum.add_shifted(&base, e);
    }
    sum
}

/// Coefficients of `f(q) = sum q^(n^2) / ((1+q)(1+q^2)...(1+q^n))^2`.
pub fn mock_f_coeffs(trunc: usize, modulus: Option<u32>) -> TruncatedSeries {
    accumulate(
        trunc,
        modulus,
        |n| n * n,
        |n| {
            if n == 0 {
                vec![]
            } else {
                let d = binomial(n, 1, trunc, modulus);
                vec![d.clone(), d]
            }
        },
    )
    .with_offset24(-1)
}

/// Coefficients of omega(q); see the module docs for the normalization.
pub fn mock_omega_coeffs(trunc: usize, modulus: Option<u32>) -> TruncatedSeries {
    accumulate(
        trunc,
        modulus,
        |n| 2 * n * n + 2 * n,
        |n| {
            let d = binomial(2 * n + 1, -1, trunc, modulus);
            vec![d.clone(), d]
        },
    )
    .with_offset24(16)
}

pub fn mock_nu_coeffs(
    trunc: usize,
    modulus: Option<u32>,
    method: NuMethod,
) -> Result<TruncatedSeries> {
    match method {
        NuMethod::Defining => Ok(accumulate(
            trunc,
            modulus,
            |n| n * n + n,
            |n| vec![binomial(2 * n + 1, 1, trunc, modulus)],
        )),
        NuMethod::Identity => {
            // The identity holds for nu(-q); substituting back flips the
            // sign of the odd part, which is exactly q omega(q^2).
            let omega = mock_omega_coeffs(trunc.div_ceil(2), modulus);
            let q_omega = omega.dilate(2, trunc)?.shift(1).with_offset24(0);
            let odd_part = TruncatedSeries::zero(trunc, modulus).sub(&q_omega)?;
            // (-q^2; q^2)^3 (q^2; q^2), one binomial factor at a time
            let mut even_part = TruncatedSeries::one(trunc, modulus);
            for n in (2..=trunc).step_by(2) {
                let plus = binomial(n, 1, trunc, modulus);
                even_part = even_part.mul(&plus)?.mul(&plus)?.mul(&plus)?;
                even_part = even_part.mul(&binomial(n, -1, trunc, modulus))?;
            }
            odd_part.add(&even_part)
        }
    }
}
