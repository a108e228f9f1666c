//! Truncated q-expansions with exact or modular coefficients.
//!
//! A [`TruncatedSeries`] stands for `q^(offset24/24) * sum_{n=0..T} c(n) q^n`.
//! Coefficients are either arbitrary-precision integers or residues in
//! `[0, l)` for a prime `l < 2^31`. All operations are pure; truncation of a
//! binary operation is the smaller of the two operand truncations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::is_prime;
use crate::error::{Error, Result};

/// Coefficient storage, shared by series and progressions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coeffs {
    Exact(Vec<BigInt>),
    Residues { modulus: u32, values: Vec<u32> },
}

impl Coeffs {
    pub fn len(&self) -> usize {
        match self {
            Coeffs::Exact(v) => v.len(),
            Coeffs::Residues { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn modulus(&self) -> Option<u32> {
        match self {
            Coeffs::Exact(_) => None,
            Coeffs::Residues { modulus, .. } => Some(*modulus),
        }
    }

    pub fn is_zero_at(&self, n: usize) -> bool {
        match self {
            Coeffs::Exact(v) => v[n].is_zero(),
            Coeffs::Residues { values, .. } => values[n] == 0,
        }
    }

    /// Coefficient `n` reduced into `[0, ell)`. For residue storage `ell`
    /// must equal the stored modulus.
    pub fn residue_at(&self, n: usize, ell: u32) -> Result<u32> {
        match self {
            Coeffs::Exact(v) => Ok(reduce_big(&v[n], ell)),
            Coeffs::Residues { modulus, values } => {
                if *modulus != ell {
                    return Err(Error::ModulusMismatch {
                        left: Some(*modulus),
                        right: Some(ell),
                    });
                }
                Ok(values[n])
            }
        }
    }

    /// Coefficient `n` as a signed decimal string.
    pub fn display_at(&self, n: usize) -> String {
        match self {
            Coeffs::Exact(v) => v[n].to_string(),
            Coeffs::Residues { values, .. } => values[n].to_string(),
        }
    }

    fn select(&self, indices: impl Iterator<Item = usize>) -> Coeffs {
        match self {
            Coeffs::Exact(v) => Coeffs::Exact(indices.map(|i| v[i].clone()).collect()),
            Coeffs::Residues { modulus, values } => Coeffs::Residues {
                modulus: *modulus,
                values: indices.map(|i| values[i]).collect(),
            },
        }
    }
}

pub(crate) fn reduce_big(x: &BigInt, ell: u32) -> u32 {
    x.mod_floor(&BigInt::from(ell))
        .to_u32()
        .expect("residue fits in u32")
}

/// Validates a coefficient modulus: prime and below 2^31.
pub fn check_modulus(ell: u64) -> Result<u32> {
    if ell >= 1 << 31 {
        return Err(Error::ModulusTooLarge(ell));
    }
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    Ok(ell as u32)
}

// ---------------------------------------------------------------------------
// Coefficient rings and the kernels generic over them
// ---------------------------------------------------------------------------

pub(crate) trait Ring {
    type E: Clone;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn is_zero(&self, x: &Self::E) -> bool;
    fn add_assign(&self, acc: &mut Self::E, x: &Self::E);
    fn sub_assign(&self, acc: &mut Self::E, x: &Self::E);
    fn mul(&self, x: &Self::E, y: &Self::E) -> Self::E;
    /// `acc += x * y`
    fn mul_add(&self, acc: &mut Self::E, x: &Self::E, y: &Self::E);
    /// `acc -= x * y`
    fn mul_sub(&self, acc: &mut Self::E, x: &Self::E, y: &Self::E);
    fn unit_inverse(&self, x: &Self::E) -> Option<Self::E>;
}

pub(crate) struct Integers;

impl Ring for Integers {
    type E = BigInt;
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn is_zero(&self, x: &BigInt) -> bool {
        x.is_zero()
    }
    fn add_assign(&self, acc: &mut BigInt, x: &BigInt) {
        *acc += x;
    }
    fn sub_assign(&self, acc: &mut BigInt, x: &BigInt) {
        *acc -= x;
    }
    fn mul(&self, x: &BigInt, y: &BigInt) -> BigInt {
        x * y
    }
    fn mul_add(&self, acc: &mut BigInt, x: &BigInt, y: &BigInt) {
        if x.is_one() {
            *acc += y;
        } else if (-x).is_one() {
            *acc -= y;
        } else {
            *acc += x * y;
        }
    }
    fn mul_sub(&self, acc: &mut BigInt, x: &BigInt, y: &BigInt) {
        if x.is_one() {
            *acc -= y;
        } else if (-x).is_one() {
            *acc += y;
        } else {
            *acc -= x * y;
        }
    }
    fn unit_inverse(&self, x: &BigInt) -> Option<BigInt> {
        if x.abs().is_one() {
            Some(x.clone())
        } else {
            None
        }
    }
}

pub(crate) struct Residues(pub u32);

impl Residues {
    fn p(&self) -> u64 {
        self.0 as u64
    }
}

impl Ring for Residues {
    type E = u32;
    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1 % self.0
    }
    fn is_zero(&self, x: &u32) -> bool {
        *x == 0
    }
    fn add_assign(&self, acc: &mut u32, x: &u32) {
        let s = *acc as u64 + *x as u64;
        *acc = (if s >= self.p() { s - self.p() } else { s }) as u32;
    }
    fn sub_assign(&self, acc: &mut u32, x: &u32) {
        let s = *acc as u64 + self.p() - *x as u64;
        *acc = (if s >= self.p() { s - self.p() } else { s }) as u32;
    }
    fn mul(&self, x: &u32, y: &u32) -> u32 {
        (*x as u64 * *y as u64 % self.p()) as u32
    }
    fn mul_add(&self, acc: &mut u32, x: &u32, y: &u32) {
        *acc = ((*acc as u64 + *x as u64 * *y as u64) % self.p()) as u32;
    }
    fn mul_sub(&self, acc: &mut u32, x: &u32, y: &u32) {
        let prod = *x as u64 * *y as u64 % self.p();
        *acc = ((*acc as u64 + self.p() - prod) % self.p()) as u32;
    }
    fn unit_inverse(&self, x: &u32) -> Option<u32> {
        if *x == 0 {
            return None;
        }
        // Fermat: the modulus is prime.
        let p = self.p();
        let (mut base, mut e, mut r) = (*x as u64, p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                r = r * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        Some(r as u32)
    }
}

fn nonzeros<R: Ring>(ring: &R, a: &[R::E]) -> Vec<(usize, R::E)> {
    a.iter()
        .enumerate()
        .filter(|(_, x)| !ring.is_zero(x))
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

/// Cauchy product truncated to `len` terms. Iterates over the nonzero
/// entries of the sparser operand, which makes products with pentagonal
/// series linear in `len` per nonzero term.
pub(crate) fn mul_kernel<R: Ring>(ring: &R, a: &[R::E], b: &[R::E], len: usize) -> Vec<R::E> {
    let (a, b) = (&a[..len], &b[..len]);
    let na = nonzeros(ring, a);
    let nb = nonzeros(ring, b);
    let (sparse, dense) = if na.len() <= nb.len() {
        (na, b)
    } else {
        (nb, a)
    };
    let mut out = vec![ring.zero(); len];
    for (i, s) in &sparse {
        for (j, d) in dense[..len - i].iter().enumerate() {
            ring.mul_add(&mut out[i + j], s, d);
        }
    }
    out
}

/// Solves `b * c = a` for `c` up to `len` terms, via the recurrence over
/// the nonzero entries of `b`.
pub(crate) fn div_kernel<R: Ring>(
    ring: &R,
    a: &[R::E],
    b: &[R::E],
    len: usize,
) -> Result<Vec<R::E>> {
    let inv0 = ring.unit_inverse(&b[0]).ok_or(Error::NonUnit)?;
    let tail: Vec<(usize, R::E)> = nonzeros(ring, &b[..len])
        .into_iter()
        .filter(|(i, _)| *i > 0)
        .collect();
    let mut c: Vec<R::E> = Vec::with_capacity(len);
    for n in 0..len {
        let mut acc = a[n].clone();
        for (i, bi) in &tail {
            if *i > n {
                break;
            }
            ring.mul_sub(&mut acc, bi, &c[n - i]);
        }
        c.push(ring.mul(&acc, &inv0));
    }
    Ok(c)
}

// ---------------------------------------------------------------------------
// TruncatedSeries
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    offset24: i64,
    coeffs: Coeffs,
}

/// Dispatches a kernel on the coefficient mode of one or more series.
macro_rules! with_ring {
    ($coeffs:expr, |$ring:ident, $v:ident| $exact:expr) => {
        match $coeffs {
            Coeffs::Exact($v) => {
                let $ring = &Integers;
                Coeffs::Exact($exact)
            }
            Coeffs::Residues {
                modulus,
                values: $v,
            } => {
                let $ring = &Residues(*modulus);
                // the body is shared with the BigInt arm, where clones are needed
                #[allow(clippy::clone_on_copy)]
                Coeffs::Residues {
                    modulus: *modulus,
                    values: $exact,
                }
            }
        }
    };
}

macro_rules! with_ring2 {
    ($a:expr, $b:expr, |$ring:ident, $x:ident, $y:ident| $body:expr) => {
        match ($a, $b) {
            (Coeffs::Exact($x), Coeffs::Exact($y)) => {
                let $ring = &Integers;
                Coeffs::Exact($body)
            }
            (
                Coeffs::Residues {
                    modulus,
                    values: $x,
                },
                Coeffs::Residues { values: $y, .. },
            ) => {
                let $ring = &Residues(*modulus);
                // the body is shared with the BigInt arm, where clones are needed
                #[allow(clippy::clone_on_copy)]
                Coeffs::Residues {
                    modulus: *modulus,
                    values: $body,
                }
            }
            _ => unreachable!("modulus checked by caller"),
        }
    };
}

impl TruncatedSeries {
    /// Builds a series from exact coefficients; `coeffs` must be nonempty.
    pub fn from_exact(offset24: i64, coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "a series holds at least c(0)");
        TruncatedSeries {
            offset24,
            coeffs: Coeffs::Exact(coeffs),
        }
    }

    /// Builds a series of residues; values are reduced into `[0, modulus)`.
    pub fn from_residues(offset24: i64, modulus: u32, values: Vec<u32>) -> Self {
        assert!(!values.is_empty(), "a series holds at least c(0)");
        let values = values.into_iter().map(|v| v % modulus).collect();
        TruncatedSeries {
            offset24,
            coeffs: Coeffs::Residues { modulus, values },
        }
    }

    pub(crate) fn from_coeffs(offset24: i64, coeffs: Coeffs) -> Self {
        assert!(!coeffs.is_empty());
        TruncatedSeries { offset24, coeffs }
    }

    /// Exact coefficients given as `i64`; convenient for small literals.
    pub fn from_i64(offset24: i64, coeffs: &[i64], modulus: Option<u32>) -> Self {
        let exact = TruncatedSeries::from_exact(
            offset24,
            coeffs.iter().map(|&c| BigInt::from(c)).collect(),
        );
        match modulus {
            Some(ell) => exact.reduce_mod(ell as u64).expect("valid modulus"),
            None => exact,
        }
    }

    pub fn zero(trunc: usize, modulus: Option<u32>) -> Self {
        let coeffs = match modulus {
            None => Coeffs::Exact(vec![BigInt::zero(); trunc + 1]),
            Some(m) => Coeffs::Residues {
                modulus: m,
                values: vec![0; trunc + 1],
            },
        };
        TruncatedSeries {
            offset24: 0,
            coeffs,
        }
    }

    pub fn one(trunc: usize, modulus: Option<u32>) -> Self {
        Self::monomial(0, trunc, modulus)
    }

    /// `q^k`, or zero when `k > trunc`.
    pub fn monomial(k: usize, trunc: usize, modulus: Option<u32>) -> Self {
        let mut s = Self::zero(trunc, modulus);
        if k <= trunc {
            match &mut s.coeffs {
                Coeffs::Exact(v) => v[k] = BigInt::one(),
                Coeffs::Residues { modulus, values } => values[k] = 1 % *modulus,
            }
        }
        s
    }

    pub fn offset24(&self) -> i64 {
        self.offset24
    }

    pub fn with_offset24(mut self, offset24: i64) -> Self {
        self.offset24 = offset24;
        self
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn modulus(&self) -> Option<u32> {
        self.coeffs.modulus()
    }

    pub fn coeffs(&self) -> &Coeffs {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Coeffs {
        self.coeffs
    }

    pub fn exact(&self) -> Option<&[BigInt]> {
        match &self.coeffs {
            Coeffs::Exact(v) => Some(v),
            _ => None,
        }
    }

    pub fn residues(&self) -> Option<&[u32]> {
        match &self.coeffs {
            Coeffs::Residues { values, .. } => Some(values),
            _ => None,
        }
    }

    /// Restricts to `trunc` (never extends).
    pub fn truncate(&self, trunc: usize) -> Self {
        let t = trunc.min(self.trunc());
        TruncatedSeries {
            offset24: self.offset24,
            coeffs: self.coeffs.select(0..=t),
        }
    }

    fn same_modulus(&self, other: &Self) -> Result<()> {
        if self.modulus() != other.modulus() {
            return Err(Error::ModulusMismatch {
                left: self.modulus(),
                right: other.modulus(),
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_modulus(other)?;
        let len = self.trunc().min(other.trunc()) + 1;
        let coeffs = with_ring2!(&self.coeffs, &other.coeffs, |r, x, y| mul_kernel(
            r, x, y, len
        ));
        Ok(TruncatedSeries {
            offset24: self.offset24 + other.offset24,
            coeffs,
        })
    }

    /// `self / other`, truncated at the smaller truncation.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same_modulus(other)?;
        let len = self.trunc().min(other.trunc()) + 1;
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (Coeffs::Exact(x), Coeffs::Exact(y)) => {
                Coeffs::Exact(div_kernel(&Integers, x, y, len)?)
            }
            (Coeffs::Residues { modulus, values: x }, Coeffs::Residues { values: y, .. }) => {
                Coeffs::Residues {
                    modulus: *modulus,
                    values: div_kernel(&Residues(*modulus), x, y, len)?,
                }
            }
            _ => unreachable!(),
        };
        Ok(TruncatedSeries {
            offset24: self.offset24 - other.offset24,
            coeffs,
        })
    }

    pub fn invert(&self) -> Result<Self> {
        Self::one(self.trunc(), self.modulus()).div(self)
    }

    /// Binary exponentiation; negative exponents go through [`invert`](Self::invert).
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.invert()?.pow(-e);
        }
        let mut result = Self::one(self.trunc(), self.modulus());
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_modulus(other)?;
        let len = self.trunc().min(other.trunc()) + 1;
        let coeffs = with_ring2!(&self.coeffs, &other.coeffs, |r, x, y| {
            x[..len]
                .iter()
                .zip(&y[..len])
                .map(|(a, b)| {
                    let mut s = a.clone();
                    r.add_assign(&mut s, b);
                    s
                })
                .collect()
        });
        Ok(TruncatedSeries {
            offset24: self.offset24,
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_modulus(other)?;
        let len = self.trunc().min(other.trunc()) + 1;
        let coeffs = with_ring2!(&self.coeffs, &other.coeffs, |r, x, y| {
            x[..len]
                .iter()
                .zip(&y[..len])
                .map(|(a, b)| {
                    let mut s = a.clone();
                    r.sub_assign(&mut s, b);
                    s
                })
                .collect()
        });
        Ok(TruncatedSeries {
            offset24: self.offset24,
            coeffs,
        })
    }

    /// `self += q^k * other`, as far as `self` reaches.
    pub(crate) fn add_shifted(&mut self, other: &Self, k: usize) {
        let end = self.trunc().min(k.saturating_add(other.trunc()));
        match (&mut self.coeffs, &other.coeffs) {
            (Coeffs::Exact(x), Coeffs::Exact(y)) => {
                for n in k..=end {
                    x[n] += &y[n - k];
                }
            }
            (Coeffs::Residues { modulus, values: x }, Coeffs::Residues { values: y, .. }) => {
                let ring = Residues(*modulus);
                for n in k..=end {
                    ring.add_assign(&mut x[n], &y[n - k]);
                }
            }
            _ => panic!("add_shifted on mixed coefficient modes"),
        }
    }

    /// Multiplies by `q^k` keeping the truncation; the offset is untouched.
    pub fn shift(&self, k: usize) -> Self {
        let t = self.trunc();
        let coeffs = with_ring!(&self.coeffs, |r, v| {
            (0..=t)
                .map(|n| if n >= k { v[n - k].clone() } else { r.zero() })
                .collect()
        });
        TruncatedSeries {
            offset24: self.offset24,
            coeffs,
        }
    }

    /// Substitutes `q -> q^k` and truncates at `trunc`. Requires
    /// `self.trunc() * k >= trunc` so no coefficient is invented.
    pub fn dilate(&self, k: usize, trunc: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter(
                "dilation factor must be positive".into(),
            ));
        }
        if self.trunc() * k < trunc {
            return Err(Error::TruncationTooShallow {
                needed: trunc.div_ceil(k),
                have: self.trunc(),
            });
        }
        let coeffs = with_ring!(&self.coeffs, |r, v| {
            (0..=trunc)
                .map(|n| {
                    if n % k == 0 {
                        v[n / k].clone()
                    } else {
                        r.zero()
                    }
                })
                .collect()
        });
        Ok(TruncatedSeries {
            offset24: self.offset24 * k as i64,
            coeffs,
        })
    }

    pub fn reduce_mod(&self, ell: u64) -> Result<Self> {
        let ell = check_modulus(ell)?;
        match &self.coeffs {
            Coeffs::Exact(v) => Ok(TruncatedSeries {
                offset24: self.offset24,
                coeffs: Coeffs::Residues {
                    modulus: ell,
                    values: v.iter().map(|x| reduce_big(x, ell)).collect(),
                },
            }),
            Coeffs::Residues { .. } => Err(Error::RequiresExact),
        }
    }

    /// `b(n) = c(m n + t)` for `0 <= n <= (trunc - t) / m`.
    pub fn extract_progression(&self, m: usize, t: usize) -> Result<Progression> {
        if m == 0 || t >= m {
            return Err(Error::InvalidParameter(format!(
                "residue {t} is not in [0, {m})"
            )));
        }
        let trunc = self.trunc();
        let count = if t > trunc { 0 } else { (trunc - t) / m + 1 };
        let num = 24 * t as i64 + self.offset24;
        let den = 24 * m as i64;
        let g = num.gcd(&den).max(1);
        Ok(Progression {
            m,
            t,
            exponent: (num / g, den / g),
            coeffs: self.coeffs.select((0..count).map(|n| m * n + t)),
        })
    }
}

/// Coefficients `c(m n + t)` with the leading exponent `(t + offset24/24)/m`
/// kept as metadata.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Progression {
    pub m: usize,
    pub t: usize,
    /// Reduced fraction `(24 t + offset24) / (24 m)`.
    pub exponent: (i64, i64),
    pub coeffs: Coeffs,
}

/// Coefficient part of `prod_{n>=1} (1 - q^(delta n))`, built from the
/// pentagonal number theorem: exponents `delta j(3j -+ 1)/2` with sign `(-1)^j`.
pub fn euler_product(delta: usize, trunc: usize, modulus: Option<u32>) -> Result<TruncatedSeries> {
    if delta == 0 {
        return Err(Error::InvalidParameter(
            "eta factor delta must be positive".into(),
        ));
    }
    let mut exact = vec![0i8; trunc + 1];
    exact[0] = 1;
    for j in 1usize.. {
        let lo = delta * (j * (3 * j - 1) / 2);
        if lo > trunc {
            break;
        }
        let sign = if j % 2 == 0 { 1 } else { -1 };
        exact[lo] = sign;
        let hi = delta * (j * (3 * j + 1) / 2);
        if hi <= trunc {
            exact[hi] = sign;
        }
    }
    let coeffs = match modulus {
        None => Coeffs::Exact(exact.iter().map(|&c| BigInt::from(c)).collect()),
        Some(m) => Coeffs::Residues {
            modulus: m,
            values: exact
                .iter()
                .map(|&c| (c as i64).rem_euclid(m as i64) as u32)
                .collect(),
        },
    };
    Ok(TruncatedSeries::from_coeffs(0, coeffs))
}

/// `prod_delta eta(delta tau)^(r_delta)` truncated at `trunc`.
///
/// Each factor is applied by repeated multiplication or division by the
/// sparse pentagonal series, so the cost is `O(trunc * sqrt(trunc) * sum |r|)`.
pub fn eta_quotient(
    factors: &[(i64, i64)],
    trunc: usize,
    modulus: Option<u32>,
) -> Result<TruncatedSeries> {
    let mut result = TruncatedSeries::one(trunc, modulus);
    let mut offset24 = 0i64;
    for &(delta, r) in factors {
        if delta <= 0 {
            return Err(Error::InvalidParameter(format!(
                "eta factor delta must be positive, got {delta}"
            )));
        }
        let base = euler_product(delta as usize, trunc, modulus)?;
        for _ in 0..r.unsigned_abs() {
            result = if r > 0 {
                result.mul(&base)?
            } else {
                result.div(&base)?
            };
        }
        offset24 += delta * r;
    }
    Ok(result.with_offset24(offset24))
}
