//! Integer arithmetic: primality, factorization and quadratic symbols.
//!
//! Primality is Miller-Rabin with a witness set that is deterministic for
//! all 64-bit inputs; factorization is trial division followed by Pollard
//! rho with Brent's cycle detection. Inputs go up to 128 bits.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(i128),
    #[error("cannot factor zero")]
    Zero,
}

/// Signed integer with its prime factorization. Primes are strictly
/// increasing and the product of `p^e` equals `|value|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub value: i128,
    pub factors: Vec<(u128, u32)>,
}

impl Factorization {
    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn primes(&self) -> impl Iterator<Item = u128> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }
}

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
const TRIAL_BOUND: u64 = 1 << 12;

#[inline]
fn mul_mod64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod64(acc, base, m);
        }
        base = mul_mod64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// `a * b mod m` for full 128-bit operands (shift-and-add).
fn mul_mod128(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return (a % m) * (b % m) % m;
    }
    let (mut a, mut b) = (a % m, b % m);
    let mut acc: u128 = 0;
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod128(acc, a, m);
        }
        a = add_mod128(a, a, m);
        b >>= 1;
    }
    acc
}

#[inline]
fn add_mod128(a: u128, b: u128, m: u128) -> u128 {
    // a, b < m
    if a >= m - b {
        a - (m - b)
    } else {
        a + b
    }
}

fn pow_mod128(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod128(acc, base, m);
        }
        base = mul_mod128(base, base, m);
        exp >>= 1;
    }
    acc
}

fn miller_rabin64(n: u64, witness: u64) -> bool {
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    let mut x = pow_mod64(witness, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod64(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality test for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    SMALL_PRIMES.iter().all(|&a| miller_rabin64(n, a))
}

/// Primality for 128-bit integers. Deterministic below 2^64; above that
/// the first twenty prime bases are used.
pub fn is_prime_u128(n: u128) -> bool {
    if n <= u64::MAX as u128 {
        return is_prime(n as u64);
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    const BASES: [u128; 20] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    ];
    'witness: for &a in &BASES {
        if n.is_multiple_of(a) {
            return false;
        }
        let mut x = pow_mod128(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod128(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// One nontrivial factor of the odd composite `n`, via Brent's variant of
/// Pollard rho. Retries with a new polynomial constant on failure.
fn pollard_brent(n: u128) -> u128 {
    const BATCH: u64 = 128;
    let step = |y: u128, c: u128| add_mod128(mul_mod128(y, y, n), c, n);
    for c in 1u128.. {
        let mut y: u128 = 2;
        let mut x = y;
        let mut ys = y;
        let mut q: u128 = 1;
        let mut g: u128 = 1;
        let mut r: u64 = 1;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = step(y, c);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = step(y, c);
                    q = mul_mod128(q, x.abs_diff(y), n);
                }
                g = gcd_u128(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            // Batch overshot: replay one step at a time.
            loop {
                ys = step(ys, c);
                g = gcd_u128(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("polynomial constants exhausted")
}

fn factor_into(n: u128, out: &mut Vec<u128>) {
    if n == 1 {
        return;
    }
    if is_prime_u128(n) {
        out.push(n);
        return;
    }
    // Perfect squares defeat nothing here, but Pollard rho can spin on
    // prime powers with tiny cycles; peel those off first.
    let r = isqrt_u128(n);
    if r * r == n {
        factor_into(r, out);
        factor_into(r, out);
        return;
    }
    let d = pollard_brent(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

/// Complete factorization of a nonzero integer.
pub fn factor(m: i128) -> Result<Factorization, ArithError> {
    if m == 0 {
        return Err(ArithError::Zero);
    }
    let mut n = m.unsigned_abs();
    let mut primes: Vec<u128> = Vec::new();
    let mut p: u128 = 2;
    while p <= TRIAL_BOUND as u128 && p * p <= n {
        while n.is_multiple_of(p) {
            primes.push(p);
            n /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        if n < (TRIAL_BOUND as u128).pow(2) {
            primes.push(n);
        } else {
            factor_into(n, &mut primes);
        }
    }
    primes.sort_unstable();
    let mut factors: Vec<(u128, u32)> = Vec::new();
    for q in primes {
        match factors.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => factors.push((q, 1)),
        }
    }
    Ok(Factorization { value: m, factors })
}

pub fn is_squarefree(m: i128) -> bool {
    m != 0 && factor(m).map(|f| f.is_squarefree()).unwrap_or(false)
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
pub fn jacobi(a: i128, n: u128) -> i8 {
    assert!(n % 2 == 1, "jacobi symbol needs an odd modulus");
    let mut a = a.rem_euclid(n as i128) as u128;
    let mut n = n;
    let mut result = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            result = -result;
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

fn check_odd_prime(p: i128) -> Result<u128, ArithError> {
    if p > 2 && p % 2 == 1 && is_prime_u128(p as u128) {
        Ok(p as u128)
    } else {
        Err(ArithError::NotOddPrime(p))
    }
}

/// Legendre symbol `(a / p)` as +1, 0 or -1.
pub fn legendre(a: i128, p: i128) -> Result<i8, ArithError> {
    let p = check_odd_prime(p)?;
    Ok(jacobi(a, p))
}

/// Kronecker symbol `(a / m)`, multiplicative in both arguments.
pub fn kronecker(a: i128, m: i128) -> i8 {
    if m == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i8;
    let mut m = m;
    if m < 0 {
        m = -m;
        if a < 0 {
            result = -result;
        }
    }
    let mut m = m as u128;
    let tz = m.trailing_zeros();
    if tz > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if tz % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        m >>= tz;
    }
    if m == 1 {
        return result;
    }
    result * jacobi(a, m)
}

/// `p* = (-1)^((p-1)/2) p`, the signed prime congruent to 1 mod 4.
pub fn p_star(p: i128) -> Result<i128, ArithError> {
    let p = check_odd_prime(p)? as i128;
    Ok(if p % 4 == 1 { p } else { -p })
}

/// `p*` without the primality check, for callers that already factored.
pub(crate) fn star_of(p: u128) -> i128 {
    let p = p as i128;
    if p % 4 == 1 {
        p
    } else {
        -p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sieve(limit: usize) -> Vec<u64> {
        let mut comp = vec![false; limit + 1];
        let mut out = Vec::new();
        for i in 2..=limit {
            if !comp[i] {
                out.push(i as u64);
                for j in (i * i..=limit).step_by(i) {
                    comp[j] = true;
                }
            }
        }
        out
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(2));
        assert!(!is_prime(1));
        assert!(!is_prime(0));
        assert!(is_prime(3847));
        // Strong pseudoprime to bases 2..=37 would be needed to fool this;
        // 3215031751 is one for 2, 3, 5, 7.
        assert!(!is_prime(3_215_031_751));
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(18_446_744_073_709_551_559));
    }

    #[test]
    fn primality_matches_sieve() {
        let primes = sieve(100_000);
        let mut it = primes.iter().peekable();
        for n in 0..=100_000u64 {
            let expected = it.peek() == Some(&&n);
            if expected {
                it.next();
            }
            assert_eq!(is_prime(n), expected, "{n}");
        }
    }

    #[test]
    fn factor_examples() {
        assert_eq!(
            factor(1365).unwrap().factors,
            vec![(3, 1), (5, 1), (7, 1), (13, 1)]
        );
        assert_eq!(factor(4).unwrap().factors, vec![(2, 2)]);
        assert_eq!(factor(-1).unwrap().factors, vec![]);
        // 5 * 29 * 109 * 281 * 349 * 47
        let k1: i128 = 5 * 29 * 109 * 281 * 349 * 47;
        assert_eq!(k1, 72_849_085_615);
        assert_eq!(
            factor(k1).unwrap().factors,
            vec![(5, 1), (29, 1), (47, 1), (109, 1), (281, 1), (349, 1)]
        );
        assert_eq!(factor(0), Err(ArithError::Zero));
    }

    #[test]
    fn factor_large_inputs() {
        // Two 40-bit primes and a 60-bit prime.
        let p: u128 = 1_099_511_627_791;
        let q: u128 = 1_099_511_628_401;
        assert!(is_prime(p as u64) && is_prime(q as u64));
        let f = factor((p * q) as i128).unwrap();
        assert_eq!(f.factors, vec![(p, 1), (q, 1)]);

        let r: u128 = 1_152_921_504_606_846_883; // 2^60 - 93
        assert!(is_prime(r as u64));
        let f = factor(-((r * p) as i128)).unwrap();
        assert_eq!(f.factors, vec![(p, 1), (r, 1)]);

        let big: i128 = 5 * 29 * 109 * 281 * 349 * 1601 * 1889 * 5581 * 3847;
        let f = factor(-big).unwrap();
        assert_eq!(
            f.primes().collect::<Vec<_>>(),
            vec![5, 29, 109, 281, 349, 1601, 1889, 3847, 5581]
        );
        assert!(f.is_squarefree());

        let f = factor((q * q * 9) as i128).unwrap();
        assert_eq!(f.factors, vec![(3, 2), (q, 2)]);
    }

    #[test]
    fn factor_inverts_multiplication() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let primes = sieve(1 << 16);
        for _ in 0..10_000 {
            let mut chosen: Vec<u64> = Vec::new();
            let mut prod: u128 = 1;
            loop {
                let p = primes[rng.gen_range(0..primes.len())];
                if chosen.contains(&p) || prod * p as u128 > u64::MAX as u128 {
                    break;
                }
                chosen.push(p);
                prod *= p as u128;
            }
            chosen.sort_unstable();
            let f = factor(prod as i128).unwrap();
            let got: Vec<u64> = f.primes().map(|p| p as u64).collect();
            assert_eq!(got, chosen);
            assert!(f.is_squarefree());
        }
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(4, 7).unwrap(), 1);
        assert_eq!(legendre(-3, 5).unwrap(), -1);
        assert_eq!(legendre(13, 13).unwrap(), 0);
        assert_eq!(legendre(3, 9), Err(ArithError::NotOddPrime(9)));
        assert_eq!(legendre(3, 2), Err(ArithError::NotOddPrime(2)));
    }

    #[test]
    fn legendre_matches_euler_criterion() {
        for &p in sieve(400).iter().skip(1) {
            for a in -50i128..50 {
                let euler = pow_mod64(a.rem_euclid(p as i128) as u64, (p - 1) / 2, p);
                let expected = match euler {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                };
                assert_eq!(legendre(a, p as i128).unwrap(), expected, "({a}/{p})");
            }
        }
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(7, 2), 1);
        assert_eq!(kronecker(3, 2), -1);
        assert_eq!(kronecker(4, 2), 0);
        assert_eq!(kronecker(5, 1), 1);
        assert_eq!(kronecker(-1, -1), -1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let primes = sieve(10_000);
        for _ in 0..200 {
            let p = primes[rng.gen_range(1..primes.len())] as i128;
            let a: i128 = rng.gen_range(-1_000_000..1_000_000);
            assert_eq!(kronecker(a, p), legendre(a, p).unwrap());
        }
    }

    #[test]
    fn kronecker_is_multiplicative() {
        for a in -40i128..40 {
            for m in 1i128..40 {
                for k in 1i128..12 {
                    assert_eq!(kronecker(a, m * k), kronecker(a, m) * kronecker(a, k));
                }
                for b in -10i128..10 {
                    assert_eq!(kronecker(a * b, m), kronecker(a, m) * kronecker(b, m));
                }
            }
        }
    }

    #[test]
    fn p_star_examples() {
        assert_eq!(p_star(5).unwrap(), 5);
        assert_eq!(p_star(3).unwrap(), -3);
        assert_eq!(p_star(13).unwrap(), 13);
        assert!(p_star(15).is_err());
        for &p in sieve(1000).iter().skip(1) {
            assert_eq!(p_star(p as i128).unwrap().rem_euclid(4), 1);
        }
    }

    #[test]
    fn reciprocity_with_stars() {
        let primes = sieve(500);
        for &p in primes.iter().skip(1) {
            for &q in primes.iter().skip(1) {
                if p != q {
                    let (p, q) = (p as i128, q as i128);
                    assert_eq!(
                        legendre(p_star(p).unwrap(), q).unwrap(),
                        legendre(q, p).unwrap()
                    );
                }
            }
        }
    }
}
