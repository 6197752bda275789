//! Integer arithmetic shared by the field, group and family modules.

use serde::Serialize;

use crate::{Error, Result};

/// `a * b mod m` without overflow for any 64-bit operands.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u128, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Deterministic Miller–Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d as u128, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn require_prime(n: u64) -> Result<u64> {
    if is_prime(n) {
        Ok(n)
    } else {
        Err(Error::NotPrime(n as u128))
    }
}

/// Prime factorisation by trial division, ascending primes with multiplicity.
pub fn factorize(mut n: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut q: u128 = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            let mut e = 0;
            while n.is_multiple_of(q) {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u128) -> Vec<u128> {
    factorize(n).into_iter().map(|(q, _)| q).collect()
}

/// The exact power of a prime dividing a positive integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Valuation {
    pub base: u64,
    pub exponent: u32,
}

impl Valuation {
    /// `base^exponent`.
    pub fn part(&self) -> u128 {
        (self.base as u128).pow(self.exponent)
    }
}

/// `v_ell(n)`: the largest `e` with `ell^e | n`.
pub fn v_adic(n: u128, ell: u64) -> Result<Valuation> {
    if n == 0 {
        return Err(Error::InvalidArgument("valuation of 0 is undefined".into()));
    }
    require_prime(ell)?;
    let mut m = n;
    let mut e = 0;
    while m.is_multiple_of(ell as u128) {
        m /= ell as u128;
        e += 1;
    }
    Ok(Valuation {
        base: ell,
        exponent: e,
    })
}

/// Shorthand for `v_2(n)` on a positive integer.
pub fn v2(n: u128) -> u32 {
    debug_assert!(n > 0);
    n.trailing_zeros()
}

/// `n` with every factor of `ell` removed.
pub fn strip(mut n: u128, ell: u64) -> u128 {
    debug_assert!(n > 0 && ell > 1);
    while n.is_multiple_of(ell as u128) {
        n /= ell as u128;
    }
    n
}
