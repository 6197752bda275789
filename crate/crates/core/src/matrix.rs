//! The group `GL2(F_p)`.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::ops::Mul;

use serde::Serialize;

use crate::arith::{self, pow_mod};
use crate::field::{FpElement, FqElement, PrimeField};
use crate::{Error, Result};

/// Largest group order that [`Gl2::enumerate`] will materialise by default.
pub const DEFAULT_ENUMERATION_BOUND: u128 = 2_000_000;

/// An invertible 2×2 matrix over `F_p`, entries row-major.
///
/// The derived ordering compares the entry 4-tuple first, which is the
/// canonical order used for every sorted element list in this crate.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Mat2 {
    e: [u32; 4],
    p: u32,
}

impl Mat2 {
    /// Checked constructor: `p` prime, entries reduced, determinant nonzero.
    pub fn new(entries: [u64; 4], p: u64) -> Result<Self> {
        arith::require_prime(p)?;
        if p > u32::MAX as u64 {
            return Err(Error::InvalidArgument(format!(
                "p = {p} is too large for matrix arithmetic"
            )));
        }
        let e = entries.map(|x| (x % p) as u32);
        let m = Self { e, p: p as u32 };
        if m.det_raw() == 0 {
            return Err(Error::Singular(p));
        }
        Ok(m)
    }

    /// Signed-entry convenience, so `-1` can be written directly.
    pub fn from_signed(entries: [i64; 4], p: u64) -> Result<Self> {
        Self::new(entries.map(|x| x.rem_euclid(p as i64) as u64), p)
    }

    /// Caller guarantees `p` prime, entries reduced and det ≠ 0.
    pub(crate) fn from_raw(e: [u32; 4], p: u32) -> Self {
        Self { e, p }
    }

    pub fn identity(p: u64) -> Result<Self> {
        Self::new([1, 0, 0, 1], p)
    }

    pub fn p(&self) -> u64 {
        self.p as u64
    }

    pub fn entries(&self) -> [u64; 4] {
        self.e.map(|x| x as u64)
    }

    /// Dense integer key, monotone in the canonical order.
    pub fn key(&self) -> u64 {
        let p = self.p as u64;
        self.e.iter().fold(0u64, |acc, &x| acc * p + x as u64)
    }

    fn det_raw(&self) -> u32 {
        let p = self.p as u64;
        let [a, b, c, d] = self.e.map(|x| x as u64);
        ((a * d % p + p - b * c % p) % p) as u32
    }

    pub fn det(&self) -> FpElement {
        PrimeField::new(self.p as u64)
            .expect("Mat2 modulus is prime")
            .elem(self.det_raw() as u64)
    }

    pub fn is_identity(&self) -> bool {
        self.e == [1, 0, 0, 1]
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.p != rhs.p {
            return Err(Error::ModulusMismatch {
                left: self.p as u64,
                right: rhs.p as u64,
            });
        }
        Ok(self.mul_unchecked(rhs))
    }

    #[inline]
    fn mul_unchecked(&self, rhs: &Self) -> Self {
        let p = self.p as u64;
        let [a, b, c, d] = self.e.map(|x| x as u64);
        let [w, x, y, z] = rhs.e.map(|x| x as u64);
        Self {
            e: [
                ((a * w + b * y) % p) as u32,
                ((a * x + b * z) % p) as u32,
                ((c * w + d * y) % p) as u32,
                ((c * x + d * z) % p) as u32,
            ],
            p: self.p,
        }
    }

    pub fn inv(&self) -> Self {
        let p = self.p as u64;
        let di = pow_mod(self.det_raw() as u64, p as u128 - 2, p);
        let [a, b, c, d] = self.e.map(|x| x as u64);
        let s = |v: u64| (v * di % p) as u32;
        Self {
            e: [s(d), s((p - b) % p), s((p - c) % p), s(a)],
            p: self.p,
        }
    }

    pub fn pow(&self, mut exp: u128) -> Self {
        let mut acc = Self {
            e: [1, 0, 0, 1],
            p: self.p,
        };
        let mut base = *self;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            exp >>= 1;
        }
        acc
    }

    /// `g^-1 · self · g`.
    pub fn conjugate_by(&self, g: &Self) -> Self {
        g.inv().mul_unchecked(self).mul_unchecked(g)
    }

    /// Least `n ≥ 1` with `M^n = I`.
    pub fn order(&self) -> u128 {
        let n = gl2_order(self.p as u64).expect("Mat2 modulus is prime");
        let mut order = n;
        for q in arith::prime_divisors(n) {
            while order.is_multiple_of(q) && self.pow(order / q).is_identity() {
                order /= q;
            }
        }
        order
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        assert_eq!(self.p, rhs.p, "matrices over different fields");
        self.mul_unchecked(&rhs)
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: &Mat2) -> Mat2 {
        assert_eq!(self.p, rhs.p, "matrices over different fields");
        self.mul_unchecked(rhs)
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.e;
        write!(f, "[[{a},{b}],[{c},{d}]]/F{}", self.p)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.e;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

/// `|GL2(F_p)| = (p^2 - 1)(p^2 - p)`.
pub fn gl2_order(p: u64) -> Result<u128> {
    arith::require_prime(p)?;
    let p = p as u128;
    Ok((p * p - 1) * (p * p - p))
}

/// `GL2(F_p)` with every element materialised in canonical order.
#[derive(Clone, Debug)]
pub struct Gl2 {
    p: u64,
    elements: Vec<Mat2>,
}

impl Gl2 {
    pub fn enumerate(p: u64) -> Result<Self> {
        Self::enumerate_with_bound(p, DEFAULT_ENUMERATION_BOUND)
    }

    pub fn enumerate_with_bound(p: u64, bound: u128) -> Result<Self> {
        let order = gl2_order(p)?;
        if order > bound {
            return Err(Error::EnumerationBound { p, order, bound });
        }
        let q = p as u32;
        let mut elements = Vec::with_capacity(order as usize);
        // Nested loops in entry order already produce the canonical order.
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    for d in 0..q {
                        let m = Mat2::from_raw([a, b, c, d], q);
                        if m.det_raw() != 0 {
                            elements.push(m);
                        }
                    }
                }
            }
        }
        if elements.len() as u128 != order {
            return Err(Error::InvariantViolation(format!(
                "enumerated {} elements of GL2(F_{p}), expected {order}",
                elements.len()
            )));
        }
        Ok(Self { p, elements })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Mat2] {
        &self.elements
    }

    pub fn identity(&self) -> Mat2 {
        Mat2::from_raw([1, 0, 0, 1], self.p as u32)
    }

    /// Elements whose order is a power of `ell`.
    pub fn ell_elements(&self, ell: u64) -> Vec<Mat2> {
        let n = self.elements.len() as u128;
        let ell_part = n / arith::strip(n, ell);
        self.elements
            .iter()
            .filter(|m| m.pow(ell_part).is_identity())
            .copied()
            .collect()
    }
}

/// A finite subgroup: its generators and its canonically sorted elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SubgroupHandle {
    generators: Vec<Mat2>,
    elements: Vec<Mat2>,
    ambient_prime: u64,
}

impl SubgroupHandle {
    /// Caller guarantees `elements` is a subgroup containing `generators`.
    pub(crate) fn from_parts(
        generators: Vec<Mat2>,
        mut elements: Vec<Mat2>,
        ambient_prime: u64,
    ) -> Self {
        elements.sort_unstable();
        Self {
            generators,
            elements,
            ambient_prime,
        }
    }

    pub fn trivial(p: u64) -> Result<Self> {
        Ok(Self::from_parts(Vec::new(), vec![Mat2::identity(p)?], p))
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    pub fn elements(&self) -> &[Mat2] {
        &self.elements
    }

    pub fn ambient_prime(&self) -> u64 {
        self.ambient_prime
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, m: &Mat2) -> bool {
        self.elements.binary_search(m).is_ok()
    }

    /// Identity key: the canonical element list.
    pub fn key(&self) -> Vec<u64> {
        self.elements.iter().map(Mat2::key).collect()
    }

    /// `g^-1 H g`, with the generators conjugated alongside.
    pub fn conjugate_by(&self, g: &Mat2) -> Self {
        let gi = g.inv();
        let conj = |m: &Mat2| gi.mul_unchecked(m).mul_unchecked(g);
        Self::from_parts(
            self.generators.iter().map(conj).collect(),
            self.elements.iter().map(conj).collect(),
            self.ambient_prime,
        )
    }

    /// True when `g` normalises this subgroup; checks generators only.
    pub fn is_normalized_by(&self, g: &Mat2) -> bool {
        let gi = g.inv();
        self.generators
            .iter()
            .all(|h| self.contains(&gi.mul_unchecked(h).mul_unchecked(g)))
    }

    /// Direct check of the subgroup axioms on the element list.
    pub fn verify_closed(&self) -> bool {
        let has_identity = self.elements.iter().any(Mat2::is_identity);
        let gens_inside = self.generators.iter().all(|g| self.contains(g));
        let no_dups = self.elements.windows(2).all(|w| w[0] < w[1]);
        let closed = self.elements.iter().all(|x| {
            self.contains(&x.inv())
                && self
                    .elements
                    .iter()
                    .all(|y| self.contains(&x.mul_unchecked(y)))
        });
        has_identity && gens_inside && no_dups && closed
    }
}

/// The subgroup generated by `gens` inside `GL2(F_p)`, if it has at most `cap` elements.
pub fn closure(p: u64, gens: &[Mat2], cap: usize) -> Result<SubgroupHandle> {
    let id = Mat2::identity(p)?;
    if let Some(g) = gens.iter().find(|g| g.p() != p) {
        return Err(Error::ModulusMismatch {
            left: p,
            right: g.p(),
        });
    }
    let mut seen: HashSet<Mat2> = HashSet::from([id]);
    let mut elements = vec![id];
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul_unchecked(g);
            if seen.insert(y) {
                if seen.len() > cap {
                    return Err(Error::CapExceeded {
                        cap,
                        reached: seen.len(),
                    });
                }
                elements.push(y);
                queue.push_back(y);
            }
        }
    }
    Ok(SubgroupHandle::from_parts(gens.to_vec(), elements, p))
}

/// `a + bi ↦ [[a, -b], [b, a]]`: the non-split torus `F_p(i)^* ⊂ GL2(F_p)`.
pub fn embed_torus(x: &FqElement) -> Result<Mat2> {
    if x.is_zero() {
        return Err(Error::ZeroInverse);
    }
    let p = x.modulus();
    let (a, b) = x.parts();
    Mat2::new([a, (p - b) % p, b, a], p)
}
