//! Small integer helpers: gcd, primality, prime factors and the Kronecker symbol.

use num_integer::Integer;

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Trial division. All moduli in play are tiny.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Distinct prime divisors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Product of the distinct primes dividing `n`.
pub fn radical(n: u64) -> u64 {
    prime_factors(n).into_iter().product()
}

/// Jacobi symbol (a | n) for odd positive n.
fn jacobi(a: i64, n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut acc = 1i8;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                acc = -acc;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            acc = -acc;
        }
        a %= n;
    }
    if n == 1 {
        acc
    } else {
        0
    }
}

/// Kronecker symbol (a | n), the full multiplicative extension of the
/// Legendre symbol to every integer bottom.
pub fn kronecker(a: i64, n: i64) -> i8 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut acc = 1i8;
    let mut n_abs = n.unsigned_abs();
    if n < 0 && a < 0 {
        acc = -acc;
    }
    let twos = n_abs.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        // (a | 2) = 1 for a = ±1 (mod 8), -1 for a = ±3 (mod 8)
        let r = a.rem_euclid(8);
        if (r == 3 || r == 5) && twos % 2 == 1 {
            acc = -acc;
        }
        n_abs >>= twos;
    }
    if n_abs == 1 {
        return acc;
    }
    acc * jacobi(a, n_abs)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Euler's criterion, for cross-checking at odd primes.
    fn euler(a: i64, p: u64) -> i8 {
        let a = a.rem_euclid(p as i64) as u64;
        if a == 0 {
            return 0;
        }
        let mut base = a;
        let mut e = (p - 1) / 2;
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = r * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        if r == 1 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn small_examples() {
        for p in [3i64, 5, 7, 11, 13, 101] {
            assert_eq!(kronecker(1, p), 1);
        }
        assert_eq!(kronecker(2, 5), -1);
        assert_eq!(kronecker(-23, 5), -1);
        assert_eq!(kronecker(-23, 5), kronecker(2, 5));
        assert_eq!(kronecker(0, 5), 0);
        assert_eq!(kronecker(10, 5), 0);
    }

    #[test]
    fn agrees_with_euler_criterion() {
        for p in (3..200u64).filter(|&p| is_prime(p)) {
            for a in -300i64..300 {
                assert_eq!(kronecker(a, p as i64), euler(a, p), "({a} | {p})");
            }
        }
    }

    #[test]
    fn kronecker_at_two_and_negatives() {
        assert_eq!(kronecker(1, 2), 1);
        assert_eq!(kronecker(7, 2), 1);
        assert_eq!(kronecker(3, 2), -1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(4, 2), 0);
        assert_eq!(kronecker(-1, -1), -1);
        assert_eq!(kronecker(5, -1), 1);
        // multiplicative in the bottom
        for a in -50i64..50 {
            for (m, n) in [(3i64, 5i64), (4, 7), (8, 9), (2, 15)] {
                assert_eq!(kronecker(a, m * n), kronecker(a, m) * kronecker(a, n));
            }
        }
    }

    #[test]
    fn primes_and_factors() {
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(prime_factors(360), vec![2, 3, 5]);
        assert_eq!(prime_factors(1), Vec::<u64>::new());
        assert_eq!(radical(240), 30);
        assert_eq!(radical(397), 397);
    }
}
