//! Per-index evaluation over a prime family and the aggregation of the
//! results into cofinite / mixed verdicts.
//!
//! A finite sample cannot decide membership in a non-principal ultrafilter.
//! The verdicts only say what the sample supports:
//!
//! - `TRUE_COFINITE` / `FALSE_COFINITE`: the tail of the sample is constant
//!   and the few exceptions all precede it;
//! - `MIXED`: both values recur, so truth in the limit depends on the ultrafilter;
//! - `INCONCLUSIVE`: anything else.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::arith::{self, v_adic};
use crate::cache::ResultCache;
use crate::families::FamilySpec;
use crate::matrix::gl2_order;
use crate::{Error, Result};

/// Minimum tail length, and one more than the largest exception set a
/// cofinite verdict tolerates.
pub const MIN_TAIL: usize = 5;

/// `max(5, ⌈n/5⌉)`, capped at `n`.
pub fn tail_len(n: usize) -> usize {
    MIN_TAIL.max(n.div_ceil(5)).min(n)
}

/// The common value of the last [`tail_len`] entries, if they agree.
pub fn tail_constant<T: PartialEq + Copy>(values: &[T]) -> Option<T> {
    let tail = &values[values.len() - tail_len(values.len())..];
    let first = *tail.first()?;
    tail.iter().all(|v| *v == first).then_some(first)
}

/// A per-prime yes/no property with a stable identifier.
pub trait PrimeProperty: Sync {
    fn id(&self) -> String;
    fn eval(&self, p: u64) -> Result<bool>;
}

/// Wraps a closure as a [`PrimeProperty`].
pub struct FnProperty<F> {
    id: String,
    f: F,
}

impl<F: Fn(u64) -> Result<bool> + Sync> FnProperty<F> {
    pub fn new(id: impl Into<String>, f: F) -> Self {
        Self { id: id.into(), f }
    }
}

impl<F: Fn(u64) -> Result<bool> + Sync> PrimeProperty for FnProperty<F> {
    fn id(&self) -> String {
        self.id.clone()
    }

    fn eval(&self, p: u64) -> Result<bool> {
        (self.f)(p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    Fails,
    Error(String),
}

impl Outcome {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Outcome::Holds => Some(true),
            Outcome::Fails => Some(false),
            Outcome::Error(_) => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Holds => write!(f, "true"),
            Outcome::Fails => write!(f, "false"),
            Outcome::Error(e) => write!(f, "error: {e}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LosKind {
    TrueCofinite,
    FalseCofinite,
    Mixed,
    Inconclusive,
}

impl fmt::Display for LosKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LosKind::TrueCofinite => "TRUE_COFINITE",
            LosKind::FalseCofinite => "FALSE_COFINITE",
            LosKind::Mixed => "MIXED",
            LosKind::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LosVerdict {
    pub kind: LosKind,
    /// Indices disagreeing with a cofinite verdict; empty otherwise.
    pub exceptions: Vec<u64>,
    /// First prime after the last exception, for cofinite verdicts.
    pub threshold: Option<u64>,
}

impl LosVerdict {
    fn plain(kind: LosKind) -> Self {
        Self {
            kind,
            exceptions: Vec::new(),
            threshold: None,
        }
    }
}

/// Aggregates evaluated `(p, value)` pairs, in sample order.
pub fn los_verdict(values: &[(u64, bool)]) -> Result<LosVerdict> {
    if values.is_empty() {
        return Err(Error::EmptySample("no evaluated indices".into()));
    }
    let n = values.len();
    if n < MIN_TAIL {
        return Ok(LosVerdict::plain(LosKind::Inconclusive));
    }
    let alternations = values.windows(2).filter(|w| w[0].1 != w[1].1).count();
    let trues = values.iter().filter(|v| v.1).count();
    let minority = trues.min(n - trues);
    if alternations >= 3 && minority * 5 >= n {
        return Ok(LosVerdict::plain(LosKind::Mixed));
    }
    let bools: Vec<bool> = values.iter().map(|v| v.1).collect();
    if let Some(b) = tail_constant(&bools) {
        let tail_start = n - tail_len(n);
        let exception_idx: Vec<usize> = (0..n).filter(|&i| values[i].1 != b).collect();
        let before_tail = exception_idx.iter().all(|&i| i < tail_start);
        if before_tail && exception_idx.len() < MIN_TAIL {
            let after = exception_idx.last().map_or(0, |&i| i + 1);
            return Ok(LosVerdict {
                kind: if b {
                    LosKind::TrueCofinite
                } else {
                    LosKind::FalseCofinite
                },
                exceptions: exception_idx.iter().map(|&i| values[i].0).collect(),
                threshold: Some(values[after].0),
            });
        }
    }
    Ok(LosVerdict::plain(LosKind::Inconclusive))
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexResult {
    pub p: u64,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvidenceReport {
    pub family: FamilySpec,
    pub property_id: String,
    pub sample_bound: u64,
    pub per_index: Vec<IndexResult>,
    pub holds_count: usize,
    pub fails_count: usize,
    pub error_count: usize,
    pub verdict: LosVerdict,
}

const EVIDENCE: &str = "evidence";

fn eval_cached(
    property: &dyn PrimeProperty,
    id: &str,
    p: u64,
    cache: Option<&ResultCache>,
) -> Result<Outcome> {
    if let Some(hit) = cache.and_then(|c| c.get(p, EVIDENCE, id)) {
        if let Some(b) = hit.get("holds").and_then(|v| v.as_bool()) {
            return Ok(if b { Outcome::Holds } else { Outcome::Fails });
        }
    }
    match property.eval(p) {
        Ok(b) => {
            if let Some(c) = cache {
                c.put(p, EVIDENCE, id, json!({ "holds": b }))?;
            }
            Ok(if b { Outcome::Holds } else { Outcome::Fails })
        }
        // Failures are recorded per index, never cached.
        Err(e) => Ok(Outcome::Error(e.to_string())),
    }
}

/// Evaluates `property` on every family member `≤ sample_bound`.
pub fn evaluate_family(
    family: &FamilySpec,
    property: &dyn PrimeProperty,
    sample_bound: u64,
    cache: Option<&ResultCache>,
) -> Result<EvidenceReport> {
    let primes = family.primes(sample_bound)?;
    if primes.is_empty() {
        return Err(Error::EmptySample(format!(
            "family {family} has no members ≤ {sample_bound}"
        )));
    }
    let id = property.id();
    let per_index = primes
        .par_iter()
        .map(|&p| {
            Ok(IndexResult {
                p,
                outcome: eval_cached(property, &id, p, cache)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let evaluated: Vec<(u64, bool)> = per_index
        .iter()
        .filter_map(|r| r.outcome.as_bool().map(|b| (r.p, b)))
        .collect();
    let holds_count = evaluated.iter().filter(|v| v.1).count();
    let fails_count = evaluated.len() - holds_count;
    let error_count = per_index.len() - evaluated.len();
    let verdict = if evaluated.is_empty() {
        LosVerdict::plain(LosKind::Inconclusive)
    } else {
        los_verdict(&evaluated)?
    };
    Ok(EvidenceReport {
        family: family.clone(),
        property_id: id,
        sample_bound,
        per_index,
        holds_count,
        fails_count,
        error_count,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SylowBound {
    /// Constant Sylow order `ell^k` on the sample tail.
    Bounded {
        order: u128,
    },
    GrowingEvidence,
}

#[derive(Clone, Debug, Serialize)]
pub struct SylowProfileRow {
    pub p: u64,
    pub exponent: u32,
    pub sylow_order: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct SylowBoundReport {
    pub ell: u64,
    pub sample_bound: u64,
    pub tail_len: usize,
    pub profile: Vec<SylowProfileRow>,
    pub verdict: SylowBound,
}

/// Sylow `ell`-orders of `GL2(F_p)` along the family, from the order formula.
pub fn sylow_bound_detect(
    family: &FamilySpec,
    ell: u64,
    sample_bound: u64,
) -> Result<SylowBoundReport> {
    arith::require_prime(ell)?;
    let primes = family.primes(sample_bound)?;
    if primes.is_empty() {
        return Err(Error::EmptySample(format!(
            "family {family} has no members ≤ {sample_bound}"
        )));
    }
    let profile = primes
        .iter()
        .map(|&p| {
            let v = v_adic(gl2_order(p)?, ell)?;
            Ok(SylowProfileRow {
                p,
                exponent: v.exponent,
                sylow_order: v.part(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let orders: Vec<u128> = profile.iter().map(|r| r.sylow_order).collect();
    let verdict = match tail_constant(&orders) {
        Some(order) => SylowBound::Bounded { order },
        None => SylowBound::GrowingEvidence,
    };
    Ok(SylowBoundReport {
        ell,
        sample_bound,
        tail_len: tail_len(orders.len()),
        profile,
        verdict,
    })
}

/// Largest cyclic group `C_{p^i}` that [`prufer_check`] enumerates.
pub const PRUFER_ENUMERATION_LIMIT: u128 = 50_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct PruferRow {
    /// The cyclic group is `C_{p^level}`.
    pub level: u32,
    /// Counting elements of order `p^j`.
    pub j: u32,
    pub count: u128,
    pub expected: u128,
    /// Elements whose order divides `p^j`: the size of the unique subgroup of that order.
    pub dividing_count: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct PruferReport {
    pub p: u64,
    pub max_level: u32,
    pub rows: Vec<PruferRow>,
    pub counts_match: bool,
    pub embeddings_ok: bool,
}

/// Element order in `Z/p^i`, as an exponent of `p`.
fn cyclic_order_exponent(x: u128, level: u32, p: u128) -> u32 {
    if x == 0 {
        return 0;
    }
    let mut v = 0;
    let mut y = x;
    while y.is_multiple_of(p) {
        y /= p;
        v += 1;
    }
    level - v
}

/// Order statistics of `C_{p^i}` for `1 ≤ i ≤ max_level`, plus the chain of
/// embeddings `C_{p^j} → C_{p^(j+1)}`, `x ↦ p·x`.
pub fn prufer_check(p: u64, max_level: u32) -> Result<PruferReport> {
    arith::require_prime(p)?;
    if max_level == 0 {
        return Err(Error::InvalidArgument(
            "max_level must be at least 1".into(),
        ));
    }
    let q = p as u128;
    q.checked_pow(max_level)
        .filter(|&n| n <= PRUFER_ENUMERATION_LIMIT)
        .ok_or_else(|| {
            Error::BudgetExceeded(format!(
                "C_{{{p}^{max_level}}} exceeds {PRUFER_ENUMERATION_LIMIT} elements"
            ))
        })?;
    let mut rows = Vec::new();
    for level in 1..=max_level {
        let size = q.pow(level);
        let mut counts = vec![0u128; level as usize + 1];
        for x in 0..size {
            counts[cyclic_order_exponent(x, level, q) as usize] += 1;
        }
        let mut dividing = 0;
        for (j, &count) in counts.iter().enumerate() {
            let j = j as u32;
            let expected = if j == 0 { 1 } else { q.pow(j) - q.pow(j - 1) };
            dividing += count;
            rows.push(PruferRow {
                level,
                j,
                count,
                expected,
                dividing_count: dividing,
            });
        }
    }
    let counts_match = rows
        .iter()
        .all(|r| r.count == r.expected && r.dividing_count == q.pow(r.j));
    let embeddings_ok = (1..max_level).all(|j| {
        let (small, big) = (q.pow(j), q.pow(j + 1));
        let mut image = vec![false; big as usize];
        (0..small).all(|x| {
            let y = (q * x) % big;
            let fresh = !std::mem::replace(&mut image[y as usize], true);
            fresh && cyclic_order_exponent(y, j + 1, q) == cyclic_order_exponent(x, j, q)
        })
    });
    Ok(PruferReport {
        p,
        max_level,
        rows,
        counts_match,
        embeddings_ok,
    })
}
