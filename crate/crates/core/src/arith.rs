//! Small integer helpers: primality, prime enumeration, factorization and
//! p-adic valuations.

use num_rational::Ratio;

pub type Rational = Ratio<i128>;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// The `i`-th prime, zero-indexed (`nth_prime(0) == 2`).
pub fn nth_prime(i: usize) -> u64 {
    let mut count = 0;
    let mut n = 1;
    loop {
        n += 1;
        if is_prime(n) {
            if count == i {
                return n;
            }
            count += 1;
        }
    }
}

/// Zero-based position of `p` among the primes. `p` must be prime.
pub fn prime_index(p: u64) -> usize {
    debug_assert!(is_prime(p));
    (2..p).filter(|&n| is_prime(n)).count()
}

pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&n| is_prime(n)).collect()
}

/// Prime factorization as `(prime, exponent)` pairs in increasing prime order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Exponent of `p` in the nonzero integer `n`.
pub fn valuation(n: u128, p: u64) -> u32 {
    debug_assert!(n != 0);
    let p = p as u128;
    let mut n = n;
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// p-adic valuation of a nonzero rational.
pub fn rational_valuation(q: &Rational, p: u64) -> i64 {
    assert!(*q.numer() != 0, "valuation of zero");
    valuation(q.numer().unsigned_abs(), p) as i64 - valuation(q.denom().unsigned_abs(), p) as i64
}

pub fn pow(base: u64, exp: u32) -> i128 {
    (base as i128).pow(exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(nth_prime(0), 2);
        assert_eq!(nth_prime(3), 7);
        assert_eq!(prime_index(7), 3);
    }

    #[test]
    fn factor_and_valuation() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(1), vec![]);
        assert_eq!(valuation(8, 2), 3);
        assert_eq!(rational_valuation(&Rational::new(5, 24), 2), -3);
        assert_eq!(rational_valuation(&Rational::new(12, 5), 2), 2);
    }
}
