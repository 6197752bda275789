//! Exact arithmetic in `F_p` and in `F_p(i) = F_p[x]/(x^2 + 1)` for `p ≡ 3 (mod 4)`.
//!
//! Elements carry their modulus. The `std::ops` impls assume both operands
//! come from the same field and panic otherwise; the `try_*` methods report a
//! [`Error::ModulusMismatch`] instead.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::arith::{self, mul_mod, pow_mod, v2};
use crate::{Error, Result};

/// The prime field `F_p`; construction checks primality once.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        arith::require_prime(p)?;
        Ok(Self { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn elem(&self, value: u64) -> FpElement {
        FpElement {
            value: value % self.p,
            modulus: self.p,
        }
    }

    pub fn zero(&self) -> FpElement {
        self.elem(0)
    }

    pub fn one(&self) -> FpElement {
        self.elem(1)
    }

    /// `-1` in this field.
    pub fn minus_one(&self) -> FpElement {
        self.elem(self.p - 1)
    }

    pub fn units(&self) -> impl Iterator<Item = FpElement> + '_ {
        (1..self.p).map(move |v| self.elem(v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FpElement {
    value: u64,
    modulus: u64,
}

impl FpElement {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn is_one(&self) -> bool {
        self.value == 1
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.modulus == other.modulus {
            Ok(())
        } else {
            Err(Error::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            })
        }
    }

    fn with(&self, value: u64) -> Self {
        Self {
            value,
            modulus: self.modulus,
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with((self.value + other.value) % self.modulus))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with((self.value + self.modulus - other.value) % self.modulus))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(mul_mod(self.value, other.value, self.modulus)))
    }

    pub fn pow(&self, exp: u128) -> Self {
        self.with(pow_mod(self.value, exp, self.modulus))
    }

    /// Inverse by Fermat's little theorem.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(self.modulus as u128 - 2))
    }

    /// Least `n ≥ 1` with `x^n = 1`; divides `p - 1`.
    pub fn mult_order(&self) -> Result<u128> {
        if self.is_zero() {
            return Err(Error::ZeroOrder);
        }
        let n = self.modulus as u128 - 1;
        Ok(order_dividing(n, &arith::factorize(n), |e| {
            self.pow(e).is_one()
        }))
    }
}

impl fmt::Display for FpElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FpElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).expect("operands from different fields")
    }
}

impl Sub for FpElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(&rhs).expect("operands from different fields")
    }
}

impl Mul for FpElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(&rhs).expect("operands from different fields")
    }
}

impl Neg for FpElement {
    type Output = Self;
    fn neg(self) -> Self {
        self.with((self.modulus - self.value) % self.modulus)
    }
}

/// Shrinks the exponent `n` (a multiple of the order) one prime at a time.
fn order_dividing(n: u128, factors: &[(u128, u32)], is_identity: impl Fn(u128) -> bool) -> u128 {
    let mut order = n;
    for &(q, _) in factors {
        while order.is_multiple_of(q) && is_identity(order / q) {
            order /= q;
        }
    }
    order
}

/// The field `F_p(i)` with `i^2 = -1`, available exactly when `p ≡ 3 (mod 4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GaussianField {
    p: u64,
}

impl GaussianField {
    pub fn new(p: u64) -> Result<Self> {
        arith::require_prime(p)?;
        if p % 4 != 3 {
            return Err(Error::NotThreeModFour(p));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn base(&self) -> PrimeField {
        PrimeField { p: self.p }
    }

    pub fn elem(&self, a: u64, b: u64) -> FqElement {
        FqElement {
            a: a % self.p,
            b: b % self.p,
            modulus: self.p,
        }
    }

    pub fn one(&self) -> FqElement {
        self.elem(1, 0)
    }

    pub fn i(&self) -> FqElement {
        self.elem(0, 1)
    }

    /// `|F_p(i)^*| = p^2 - 1`.
    pub fn units_order(&self) -> u128 {
        let p = self.p as u128;
        p * p - 1
    }

    /// Factorisation of `p^2 - 1`, assembled from `p - 1` and `p + 1`.
    pub fn units_order_factors(&self) -> Vec<(u128, u32)> {
        let p = self.p as u128;
        let mut merged: Vec<(u128, u32)> = Vec::new();
        for (q, e) in arith::factorize(p - 1)
            .into_iter()
            .chain(arith::factorize(p + 1))
        {
            match merged.iter_mut().find(|(r, _)| *r == q) {
                Some(slot) => slot.1 += e,
                None => merged.push((q, e)),
            }
        }
        merged.sort_unstable();
        merged
    }

    /// Every nonzero element, in `(a, b)` lexicographic order.
    pub fn units(&self) -> impl Iterator<Item = FqElement> + '_ {
        let p = self.p;
        (0..p)
            .flat_map(move |a| (0..p).map(move |b| (a, b)))
            .filter(|&(a, b)| a != 0 || b != 0)
            .map(move |(a, b)| self.elem(a, b))
    }

    /// A generator of the cyclic group `F_p(i)^*`.
    ///
    /// Candidates `a + bi` with `a, b ≥ 1` are tried by increasing `a + b`,
    /// larger `a` first: `1+i, 2+i, 1+2i, 3+i, 2+2i, ...`.
    pub fn primitive_element(&self) -> FqElement {
        let n = self.units_order();
        let factors = self.units_order_factors();
        let p = self.p;
        for s in 2..2 * p {
            for a in (1..s).rev() {
                let b = s - a;
                if a >= p || b >= p {
                    continue;
                }
                let x = self.elem(a, b);
                if factors.iter().all(|&(q, _)| !x.pow(n / q).is_one()) {
                    return x;
                }
            }
        }
        unreachable!("F_{p}(i)^* is cyclic and has a generator")
    }

    /// Exponent `m` with `2^m = |2-part of F_p(i)^*|`, i.e. `v_2(p-1) + v_2(p+1)`.
    pub fn two_part_exponent(&self) -> u32 {
        v2(self.units_order())
    }

    /// A generator of the 2-Sylow subgroup of `F_p(i)^*`: the primitive
    /// element raised to the odd part of `p^2 - 1`.
    pub fn two_part_generator(&self) -> FqElement {
        let n = self.units_order();
        self.primitive_element().pow(n >> n.trailing_zeros())
    }

    /// All 2-elements `g^0, g^1, ..., g^(2^m - 1)` for the 2-part generator `g`.
    pub fn two_elements(&self) -> Vec<FqElement> {
        let g = self.two_part_generator();
        let size = 1u128 << self.two_part_exponent();
        let mut out = Vec::with_capacity(size as usize);
        let mut x = self.one();
        for _ in 0..size {
            out.push(x);
            x = x * g;
        }
        out
    }
}

/// `a + bi` in `F_p(i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FqElement {
    a: u64,
    b: u64,
    modulus: u64,
}

impl FqElement {
    pub fn re(&self) -> FpElement {
        FpElement {
            value: self.a,
            modulus: self.modulus,
        }
    }

    pub fn im(&self) -> FpElement {
        FpElement {
            value: self.b,
            modulus: self.modulus,
        }
    }

    pub fn parts(&self) -> (u64, u64) {
        (self.a, self.b)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn is_one(&self) -> bool {
        self.a == 1 && self.b == 0
    }

    fn with(&self, a: u64, b: u64) -> Self {
        Self {
            a,
            b,
            modulus: self.modulus,
        }
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.modulus == other.modulus {
            Ok(())
        } else {
            Err(Error::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let p = self.modulus;
        Ok(self.with((self.a + other.a) % p, (self.b + other.b) % p))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let p = self.modulus;
        Ok(self.with((self.a + p - other.a) % p, (self.b + p - other.b) % p))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let p = self.modulus;
        // (a + bi)(c + di) = (ac - bd) + (ad + bc)i
        let ac = mul_mod(self.a, other.a, p);
        let bd = mul_mod(self.b, other.b, p);
        let ad = mul_mod(self.a, other.b, p);
        let bc = mul_mod(self.b, other.a, p);
        Ok(self.with((ac + p - bd) % p, (ad + bc) % p))
    }

    /// `a - bi`.
    pub fn conj(&self) -> Self {
        self.with(self.a, (self.modulus - self.b) % self.modulus)
    }

    /// `N(a + bi) = (a + bi)(a - bi) = a^2 + b^2`.
    pub fn norm(&self) -> FpElement {
        let p = self.modulus;
        FpElement {
            value: (mul_mod(self.a, self.a, p) + mul_mod(self.b, self.b, p)) % p,
            modulus: p,
        }
    }

    /// The norm computed as `x^(p+1)`, landing in the base field.
    pub fn norm_by_power(&self) -> Result<FpElement> {
        let y = self.pow(self.modulus as u128 + 1);
        if y.b != 0 {
            return Err(Error::InvariantViolation(format!(
                "{self}^(p+1) = {y} is not in F_p"
            )));
        }
        Ok(y.re())
    }

    pub fn pow(&self, mut exp: u128) -> Self {
        let mut acc = self.with(1, 0);
        let mut base = *self;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }

    /// `x^-1 = conj(x) / N(x)`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let n_inv = self.norm().inv()?;
        let c = self.conj();
        let p = self.modulus;
        Ok(self.with(mul_mod(c.a, n_inv.value, p), mul_mod(c.b, n_inv.value, p)))
    }

    /// Least `n ≥ 1` with `x^n = 1`; divides `p^2 - 1`.
    pub fn mult_order(&self) -> Result<u128> {
        if self.is_zero() {
            return Err(Error::ZeroOrder);
        }
        let field = GaussianField { p: self.modulus };
        Ok(order_dividing(
            field.units_order(),
            &field.units_order_factors(),
            |e| self.pow(e).is_one(),
        ))
    }
}

impl fmt::Display for FqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}i", self.a, self.b)
    }
}

impl Add for FqElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).expect("operands from different fields")
    }
}

impl Sub for FqElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(&rhs).expect("operands from different fields")
    }
}

impl Mul for FqElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(&rhs).expect("operands from different fields")
    }
}

impl Neg for FqElement {
    type Output = Self;
    fn neg(self) -> Self {
        let p = self.modulus;
        self.with((p - self.a) % p, (p - self.b) % p)
    }
}

/// A generator of the 2-part of `F_p(i)^*`, of order `2^(v_2(p-1) + v_2(p+1))`.
pub fn two_part_generator(p: u64) -> Result<FqElement> {
    Ok(GaussianField::new(p)?.two_part_generator())
}
