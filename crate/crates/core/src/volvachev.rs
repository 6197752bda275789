//! Vol'vachev's conditions for `GL2(K)`, `p = 2`, `char K ≠ 2`:
//!
//! - **V1**: `-1` is a sum of two squares in `K`;
//! - **V2**: `K` has no element of multiplicative order 4;
//! - **V3**: every 2-element `a + bi` of `K(i)` has norm `(a + bi)(a - bi) = 1`.
//!
//! Sylow 2-subgroups of `GL2(K)` fail to be conjugate exactly when all three
//! hold. Over a finite field V2 and V3 never hold together; this module checks
//! that at each prime and then decides the conditions for the ultraproduct
//! over a family from the 2-adic profile of `p^2 - 1`.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, v2};
use crate::families::FamilySpec;
use crate::field::{FqElement, GaussianField, PrimeField};
use crate::harness::{sylow_bound_detect, tail_constant, tail_len, SylowBound, SylowBoundReport};
use crate::{Error, Result};

fn require_odd_prime(p: u64) -> Result<()> {
    if p == 2 {
        return Err(Error::CharacteristicTwo);
    }
    arith::require_prime(p).map(|_| ())
}

/// V1 witness `(a, b)` with `a^2 + b^2 ≡ -1 (mod p)`, first in `(a, b)` scan order.
pub fn check_v1(p: u64) -> Result<(u64, u64)> {
    require_odd_prime(p)?;
    let f = PrimeField::new(p)?;
    let target = f.minus_one();
    for a in 0..p {
        let a2 = f.elem(a).pow(2);
        for b in 0..p {
            if a2 + f.elem(b).pow(2) == target {
                return Ok((a, b));
            }
        }
    }
    Err(Error::InvariantViolation(format!(
        "-1 is not a sum of two squares in F_{p}"
    )))
}

/// V2 by scanning element orders, cross-checked against `p ≡ 3 (mod 4)`.
pub fn check_v2(p: u64) -> Result<bool> {
    require_odd_prime(p)?;
    let f = PrimeField::new(p)?;
    let mut by_scan = true;
    for x in f.units() {
        if x.mult_order()? == 4 {
            by_scan = false;
            break;
        }
    }
    let by_congruence = p % 4 == 3;
    if by_scan != by_congruence {
        return Err(Error::InvariantViolation(format!(
            "V2 at p = {p}: order scan gives {by_scan}, congruence gives {by_congruence}"
        )));
    }
    Ok(by_scan)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct V3Witness {
    pub element: FqElement,
    pub order: u128,
    /// Residue of the norm in `[0, p)`.
    pub norm: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct V3Finite {
    pub p: u64,
    pub holds: bool,
    /// `2^(v_2(p-1) + v_2(p+1))`.
    pub two_part_order: u128,
    /// A 2-element of least order with norm ≠ 1 (ties broken by `(a, b)`).
    pub counterexample: Option<V3Witness>,
}

/// V3 for `F_p(i)`, over the whole cyclic 2-part of `F_p(i)^*`.
pub fn check_v3_finite(p: u64) -> Result<V3Finite> {
    let field = GaussianField::new(p)?;
    let elements = field.two_elements();
    let mut counterexample: Option<V3Witness> = None;
    for x in elements.iter() {
        let norm = x.norm();
        if norm.is_one() {
            continue;
        }
        if norm != field.base().minus_one() {
            return Err(Error::InvariantViolation(format!(
                "2-element {x} of F_{p}(i) has norm {norm} ∉ {{±1}}"
            )));
        }
        let w = V3Witness {
            element: *x,
            order: x.mult_order()?,
            norm: norm.value(),
        };
        let better = match &counterexample {
            None => true,
            Some(c) => (w.order, w.element) < (c.order, c.element),
        };
        if better {
            counterexample = Some(w);
        }
    }
    Ok(V3Finite {
        p,
        holds: counterexample.is_none(),
        two_part_order: elements.len() as u128,
        counterexample,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerdictContext {
    Finite { p: u64 },
    Limit { family: String, sample_bound: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct VolvachevVerdict {
    pub context: VerdictContext,
    pub v1: bool,
    pub v1_witness: Option<(u64, u64)>,
    pub v2: bool,
    /// Absent when `p ≡ 1 (mod 4)`: then `i ∈ F_p` and `F_p(i)` is not a quadratic extension.
    pub v3: Option<V3Finite>,
}

/// V1, V2 and (when defined) V3 for the finite field `F_p`.
pub fn volvachev_finite(p: u64) -> Result<VolvachevVerdict> {
    let witness = check_v1(p)?;
    let v2 = check_v2(p)?;
    let v3 = if p % 4 == 3 {
        Some(check_v3_finite(p)?)
    } else {
        None
    };
    Ok(VolvachevVerdict {
        context: VerdictContext::Finite { p },
        v1: true,
        v1_witness: Some(witness),
        v2,
        v3,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct V3LimitRow {
    pub p: u64,
    pub v2_p_minus_1: u32,
    pub v2_p_plus_1: u32,
    /// `m` with `2^m` the order of the 2-part of `F_p(i)^*`.
    pub two_part_exponent: u32,
    pub forced_v2_p_plus_1: u32,
    pub v3_finite: bool,
    pub witness_order: Option<u128>,
    pub witness_norm_is_minus_one: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum V3Limit {
    /// A norm `-1` element of order `2^level` exists at every tail prime.
    Fails {
        level: u32,
    },
    /// The 2-part grows without bound along the family.
    Holds,
    Undecided,
}

impl fmt::Display for V3Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            V3Limit::Fails { level } => write!(f, "FAILS(order 2^{level})"),
            V3Limit::Holds => write!(f, "HOLDS"),
            V3Limit::Undecided => write!(f, "UNDECIDED"),
        }
    }
}

/// Growth needed before a profile counts as unbounded.
pub const MIN_GROWTH_STEPS: usize = 3;

#[derive(Clone, Debug, Serialize)]
pub struct V3LimitReport {
    pub family: String,
    pub sample_bound: u64,
    pub tail_len: usize,
    pub running_max_increases: usize,
    pub forced_floor_increases: usize,
    pub rows: Vec<V3LimitRow>,
    pub verdict: V3Limit,
}

fn strict_increases(values: impl IntoIterator<Item = u32>) -> usize {
    let mut it = values.into_iter();
    let Some(mut max) = it.next() else { return 0 };
    let mut count = 0;
    for v in it {
        if v > max {
            max = v;
            count += 1;
        }
    }
    count
}

/// V3 for the ultraproduct of `F_p(i)` over the family, from the sample `≤ sample_bound`.
///
/// Eventually constant `v_2(p^2 - 1) = m`: the order-`2^m` norm `-1`
/// element is a first-order witness present at every tail prime, so V3 fails.
/// Unbounded growth (the running maximum and the family's forced lower bound on
/// `v_2(p + 1)` each rise at least [`MIN_GROWTH_STEPS`] times): every fixed
/// 2-power order eventually sits strictly below the maximal one, where all
/// norms are 1, so V3 holds.
pub fn check_v3_limit(family: &FamilySpec, sample_bound: u64) -> Result<V3LimitReport> {
    let members = family.members(sample_bound)?;
    if members.is_empty() {
        return Err(Error::EmptySample(format!(
            "family {family} has no members ≤ {sample_bound}"
        )));
    }
    if let Some(m) = members.iter().find(|m| m.p % 4 != 3) {
        return Err(Error::InvalidArgument(format!(
            "V3 limit needs every member ≡ 3 (mod 4); {} is not",
            m.p
        )));
    }
    let rows = members
        .par_iter()
        .map(|m| {
            let v3 = check_v3_finite(m.p)?;
            let p = m.p as u128;
            let row = V3LimitRow {
                p: m.p,
                v2_p_minus_1: v2(p - 1),
                v2_p_plus_1: v2(p + 1),
                two_part_exponent: v2(p * p - 1),
                forced_v2_p_plus_1: m.forced_v2_p_plus_1,
                v3_finite: v3.holds,
                witness_order: v3.counterexample.map(|w| w.order),
                witness_norm_is_minus_one: v3.counterexample.is_some_and(|w| w.norm == m.p - 1),
            };
            // Norm -1 occurs exactly at the maximal 2-order.
            if row.witness_order != Some(v3.two_part_order) || !row.witness_norm_is_minus_one {
                return Err(Error::InvariantViolation(format!(
                    "p = {}: least-order norm ≠ 1 element is not of maximal 2-order",
                    m.p
                )));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let exponents: Vec<u32> = rows.iter().map(|r| r.two_part_exponent).collect();
    let running_max_increases = strict_increases(exponents.iter().copied());
    let forced_floor_increases = strict_increases(rows.iter().map(|r| r.forced_v2_p_plus_1));
    let verdict = if let Some(level) = tail_constant(&exponents) {
        V3Limit::Fails { level }
    } else if running_max_increases >= MIN_GROWTH_STEPS
        && forced_floor_increases >= MIN_GROWTH_STEPS
    {
        V3Limit::Holds
    } else {
        V3Limit::Undecided
    };
    Ok(V3LimitReport {
        family: family.to_string(),
        sample_bound,
        tail_len: tail_len(rows.len()),
        running_max_increases,
        forced_floor_increases,
        rows,
        verdict,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConjugacyClassification {
    ConjugateFinite { order: u128 },
    NonconjugateVolvachev,
    Inconclusive,
}

impl fmt::Display for ConjugacyClassification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConjugacyClassification::ConjugateFinite { order } => {
                write!(f, "CONJUGATE_FINITE({order})")
            }
            ConjugacyClassification::NonconjugateVolvachev => write!(f, "NONCONJUGATE_VOLVACHEV"),
            ConjugacyClassification::Inconclusive => write!(f, "INCONCLUSIVE"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationRow {
    pub p: u64,
    pub v2_p_minus_1: u32,
    pub v2_p_plus_1: u32,
    pub sylow2_order: u128,
    pub v1: bool,
    pub v2: bool,
    pub v3_finite: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub family: String,
    pub sample_bound: u64,
    pub verdict: ConjugacyClassification,
    pub rule: String,
    pub note: String,
    pub rows: Vec<ClassificationRow>,
    pub sylow_bound: SylowBoundReport,
    pub v3_limit: Option<V3LimitReport>,
}

/// Sylow 2-conjugacy in `GL2` over the family's pseudofinite field.
///
/// Constant Sylow 2-order `2^k` on the sample tail gives finite, conjugate
/// Sylow 2-subgroups. Otherwise, V1 and V2 at every sampled prime together
/// with V3 holding in the limit give non-conjugate ones.
pub fn classify_conjugacy(family: &FamilySpec, sample_bound: u64) -> Result<ClassificationReport> {
    let sylow_bound = sylow_bound_detect(family, 2, sample_bound)?;
    let rows = sylow_bound
        .profile
        .par_iter()
        .map(|s| {
            let p = s.p as u128;
            let odd = s.p != 2;
            Ok(ClassificationRow {
                p: s.p,
                v2_p_minus_1: if p > 1 { v2(p - 1) } else { 0 },
                v2_p_plus_1: v2(p + 1),
                sylow2_order: s.sylow_order,
                v1: odd && check_v1(s.p).is_ok(),
                v2: odd && check_v2(s.p)?,
                v3_finite: if s.p % 4 == 3 {
                    Some(check_v3_finite(s.p)?.holds)
                } else {
                    None
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let v1_v2_everywhere = rows.iter().all(|r| r.v1 && r.v2);
    let v3_limit = if v1_v2_everywhere {
        Some(check_v3_limit(family, sample_bound)?)
    } else {
        None
    };
    let (verdict, rule) = match (&sylow_bound.verdict, &v3_limit) {
        (SylowBound::Bounded { order }, _) => (
            ConjugacyClassification::ConjugateFinite { order: *order },
            format!(
                "Sylow 2-order constant = {order} on the last {} sampled primes",
                sylow_bound.tail_len
            ),
        ),
        (SylowBound::GrowingEvidence, Some(l)) if l.verdict == V3Limit::Holds => (
            ConjugacyClassification::NonconjugateVolvachev,
            "V1 and V2 at every sampled prime; V3 holds in the limit (unbounded 2-part)"
                .to_string(),
        ),
        _ => (
            ConjugacyClassification::Inconclusive,
            "neither a constant Sylow 2-order nor V1, V2 and V3 in the limit".to_string(),
        ),
    };
    Ok(ClassificationReport {
        family: family.to_string(),
        sample_bound,
        verdict,
        rule,
        note: format!("finite-sample evidence up to {sample_bound}; the verdict extrapolates by the stated tail rule"),
        rows,
        sylow_bound,
        v3_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::primes_in_ap;

    #[test]
    fn v1_examples() {
        assert_eq!(check_v1(3).unwrap(), (1, 1));
        for p in [5, 7, 11, 13, 101] {
            let (a, b) = check_v1(p).unwrap();
            assert_eq!((a * a + b * b) % p, p - 1);
        }
        assert!(matches!(check_v1(2), Err(Error::CharacteristicTwo)));
        assert!(check_v1(9).is_err());
    }

    #[test]
    fn v2_examples() {
        assert!(!check_v2(5).unwrap());
        assert!(check_v2(3).unwrap());
        assert!(check_v2(11).unwrap());
        assert!(check_v2(2).is_err());
        for p in crate::families::sieve(2000).into_iter().skip(1) {
            assert_eq!(check_v2(p).unwrap(), p % 4 == 3);
        }
    }

    #[test]
    fn v3_finite_examples() {
        let r = check_v3_finite(3).unwrap();
        assert!(!r.holds);
        let w = r.counterexample.unwrap();
        assert_eq!(w.order, 8);
        assert_eq!(w.norm, 2);
        assert_eq!(w.element.parts(), (1, 1));
        let r = check_v3_finite(11).unwrap();
        assert_eq!(r.counterexample.unwrap().order, 8);
        let r = check_v3_finite(31).unwrap();
        assert_eq!(r.counterexample.unwrap().order, 64);
        assert!(matches!(check_v3_finite(5), Err(Error::NotThreeModFour(5))));
    }

    #[test]
    fn finite_verdict_shape() {
        let v = volvachev_finite(7).unwrap();
        assert!(v.v1 && v.v2);
        assert!(!v.v3.unwrap().holds);
        let v = volvachev_finite(13).unwrap();
        assert!(!v.v2 && v.v3.is_none());
    }

    #[test]
    fn limit_verdicts() {
        let i = check_v3_limit(&FamilySpec::family_i(), 500).unwrap();
        assert_eq!(i.verdict, V3Limit::Fails { level: 3 });
        let s = check_v3_limit(&FamilySpec::staircase(), 5000).unwrap();
        assert_eq!(s.verdict, V3Limit::Holds);
        let constant = FamilySpec::explicit("eleven", vec![11; 6]).unwrap();
        let c = check_v3_limit(&constant, 100).unwrap();
        assert_eq!(c.verdict, V3Limit::Fails { level: 3 });
        assert_eq!(
            c.rows[0].witness_order,
            check_v3_finite(11).unwrap().counterexample.map(|w| w.order)
        );
        assert!(check_v3_limit(&FamilySpec::progression(1, 4).unwrap(), 100).is_err());
        assert!(check_v3_limit(&FamilySpec::family_i(), 2).is_err());
    }

    #[test]
    fn classifications() {
        let i = classify_conjugacy(&FamilySpec::family_i(), 500).unwrap();
        assert_eq!(
            i.verdict,
            ConjugacyClassification::ConjugateFinite { order: 16 }
        );
        let s = classify_conjugacy(&FamilySpec::staircase(), 5000).unwrap();
        assert_eq!(s.verdict, ConjugacyClassification::NonconjugateVolvachev);
        let one = classify_conjugacy(&FamilySpec::progression(1, 4).unwrap(), 500).unwrap();
        assert_eq!(one.verdict, ConjugacyClassification::Inconclusive);
        let j = classify_conjugacy(&FamilySpec::family_j(4).unwrap(), 5000).unwrap();
        assert_eq!(j.verdict, ConjugacyClassification::Inconclusive);
    }

    #[test]
    fn verdicts_stable_from_fifth_member() {
        let fifth_i = primes_in_ap(3, 8, 1000).unwrap()[4];
        for bound in (fifth_i..=3000).step_by(97) {
            let r = classify_conjugacy(&FamilySpec::family_i(), bound).unwrap();
            assert_eq!(
                r.verdict,
                ConjugacyClassification::ConjugateFinite { order: 16 },
                "bound {bound}"
            );
        }
        let fifth_s = crate::families::staircase_family(1 << 20).unwrap()[4];
        for bound in [fifth_s, fifth_s + 1, 5000, 20_000, 100_000] {
            let r = classify_conjugacy(&FamilySpec::staircase(), bound).unwrap();
            assert_eq!(
                r.verdict,
                ConjugacyClassification::NonconjugateVolvachev,
                "bound {bound}"
            );
        }
    }
}
