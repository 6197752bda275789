//! Families of primes: arithmetic progressions, the `2^N | p + 1` family and
//! the staircase family with unbounded `v_2(p + 1)`.

use std::fmt;

use serde::Serialize;

use crate::arith::{gcd, is_prime, v2};
use crate::{Error, Result};

/// Sieve of Eratosthenes: all primes `≤ limit`, ascending.
pub fn sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n)
        .filter(|&k| !composite[k])
        .map(|k| k as u64)
        .collect()
}

/// Primes `p ≤ limit` with `p ≡ residue (mod modulus)`.
pub fn primes_in_ap(residue: u64, modulus: u64, limit: u64) -> Result<Vec<u64>> {
    if modulus == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    if gcd(residue as u128, modulus as u128) != 1 {
        return Err(Error::InvalidArgument(format!(
            "gcd({residue}, {modulus}) ≠ 1: the progression holds at most one prime"
        )));
    }
    let r = residue % modulus;
    Ok(sieve(limit)
        .into_iter()
        .filter(|p| p % modulus == r)
        .collect())
}

/// Primes `p ≤ limit` with `p ≡ 3 (mod 4)` and `2^n | p + 1`.
pub fn family_j(n: u32, limit: u64) -> Result<Vec<u64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "N = {n} < 2 is inconsistent with p ≡ 3 (mod 4)"
        )));
    }
    if n > 62 {
        return Err(Error::InvalidArgument(format!("N = {n} is too large")));
    }
    let by_valuation: Vec<u64> = sieve(limit)
        .into_iter()
        .filter(|&p| p % 4 == 3 && v2(p as u128 + 1) >= n)
        .collect();
    let m = 1u64 << n;
    let by_congruence = primes_in_ap(m - 1, m, limit)?;
    if by_valuation != by_congruence {
        return Err(Error::InvariantViolation(format!(
            "family J(N = {n}) characterisations disagree below {limit}"
        )));
    }
    Ok(by_valuation)
}

/// One member of the staircase family with the step `N` that selected it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StaircaseStep {
    pub p: u64,
    pub n: u32,
}

/// Staircase members with their steps: starting at `N = 2`, take the least
/// prime with `v_2(p + 1) ≥ N`, then continue from one above the largest
/// valuation seen so far.
pub fn staircase_steps(limit: u64) -> Result<Vec<StaircaseStep>> {
    if limit < 3 {
        return Err(Error::InvalidArgument(format!(
            "staircase limit {limit} < 3"
        )));
    }
    let mut steps = Vec::new();
    let mut n = 2u32;
    while n < 63 {
        let m = 1u64 << n;
        if m - 1 > limit {
            break;
        }
        let mut candidate = m - 1;
        let found = loop {
            if candidate > limit {
                break None;
            }
            if is_prime(candidate) {
                break Some(candidate);
            }
            candidate = match candidate.checked_add(m) {
                Some(c) => c,
                None => break None,
            };
        };
        let Some(p) = found else { break };
        steps.push(StaircaseStep { p, n });
        n = v2(p as u128 + 1) + 1;
    }
    if steps.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "limit {limit} leaves fewer than 3 staircase members"
        )));
    }
    Ok(steps)
}

pub fn staircase_family(limit: u64) -> Result<Vec<u64>> {
    Ok(staircase_steps(limit)?.into_iter().map(|s| s.p).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    Progression { residue: u64, modulus: u64 },
    Staircase,
    Explicit { primes: Vec<u64> },
}

/// A family of primes indexing the factors of an ultraproduct.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilySpec {
    pub label: String,
    pub kind: FamilyKind,
    pub min_two_valuation_of_p_plus_1: Option<u32>,
}

/// A sampled family member with the lower bound on `v_2(p + 1)` that the
/// family's definition forces at that position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Member {
    pub p: u64,
    pub forced_v2_p_plus_1: u32,
}

impl FamilySpec {
    pub fn progression(residue: u64, modulus: u64) -> Result<Self> {
        if modulus == 0 || gcd(residue as u128, modulus as u128) != 1 {
            return Err(Error::InvalidArgument(format!(
                "progression {residue} mod {modulus} needs gcd(residue, modulus) = 1"
            )));
        }
        Ok(Self {
            label: format!("p ≡ {} mod {modulus}", residue % modulus),
            kind: FamilyKind::Progression {
                residue: residue % modulus,
                modulus,
            },
            min_two_valuation_of_p_plus_1: None,
        })
    }

    /// Primes `p ≡ 3 (mod 8)`.
    pub fn family_i() -> Self {
        Self {
            label: "I".into(),
            kind: FamilyKind::Progression {
                residue: 3,
                modulus: 8,
            },
            min_two_valuation_of_p_plus_1: None,
        }
    }

    /// Primes `p ≡ 3 (mod 4)` with `2^n | p + 1`.
    pub fn family_j(n: u32) -> Result<Self> {
        if !(2..=62).contains(&n) {
            return Err(Error::InvalidArgument(format!(
                "N = {n} must lie in 2..=62"
            )));
        }
        let m = 1u64 << n;
        Ok(Self {
            label: format!("J(N={n})"),
            kind: FamilyKind::Progression {
                residue: m - 1,
                modulus: m,
            },
            min_two_valuation_of_p_plus_1: Some(n),
        })
    }

    pub fn staircase() -> Self {
        Self {
            label: "staircase".into(),
            kind: FamilyKind::Staircase,
            min_two_valuation_of_p_plus_1: None,
        }
    }

    pub fn explicit(label: impl Into<String>, primes: Vec<u64>) -> Result<Self> {
        if let Some(&q) = primes.iter().find(|&&q| !is_prime(q)) {
            return Err(Error::NotPrime(q as u128));
        }
        Ok(Self {
            label: label.into(),
            kind: FamilyKind::Explicit { primes },
            min_two_valuation_of_p_plus_1: None,
        })
    }

    /// Parses `I`, `J:<N>`, `staircase`, `ap:<r>:<m>` or `primes:<p>,<p>,...`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let bad = || Error::InvalidArgument(format!("unknown family `{t}`"));
        let num = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
        match t {
            "I" | "i" => return Ok(Self::family_i()),
            "staircase" => return Ok(Self::staircase()),
            _ => {}
        }
        if let Some(n) = t.strip_prefix("J:").or_else(|| t.strip_prefix("j:")) {
            return Self::family_j(num(n)? as u32);
        }
        if let Some(rest) = t.strip_prefix("ap:") {
            let (r, m) = rest.split_once(':').ok_or_else(bad)?;
            return Self::progression(num(r)?, num(m)?);
        }
        if let Some(rest) = t.strip_prefix("primes:") {
            let primes = rest.split(',').map(num).collect::<Result<Vec<_>>>()?;
            return Self::explicit(t, primes);
        }
        Err(bad())
    }

    /// Members `≤ limit` in family order (ascending, except for explicit lists).
    pub fn members(&self, limit: u64) -> Result<Vec<Member>> {
        match &self.kind {
            FamilyKind::Progression { residue, modulus } => {
                let primes = match self.min_two_valuation_of_p_plus_1 {
                    Some(n) => family_j(n, limit)?,
                    None => primes_in_ap(*residue, *modulus, limit)?,
                };
                let floor = self.progression_floor(*residue, *modulus);
                Ok(primes
                    .into_iter()
                    .map(|p| Member {
                        p,
                        forced_v2_p_plus_1: floor,
                    })
                    .collect())
            }
            FamilyKind::Staircase => Ok(staircase_steps(limit)?
                .into_iter()
                .map(|s| Member {
                    p: s.p,
                    forced_v2_p_plus_1: s.n,
                })
                .collect()),
            FamilyKind::Explicit { primes } => Ok(primes
                .iter()
                .filter(|&&p| p <= limit)
                .map(|&p| Member {
                    p,
                    forced_v2_p_plus_1: 0,
                })
                .collect()),
        }
    }

    pub fn primes(&self, limit: u64) -> Result<Vec<u64>> {
        Ok(self.members(limit)?.into_iter().map(|m| m.p).collect())
    }

    /// `v_2(p + 1)` lower bound implied by `p ≡ r (mod m)`.
    fn progression_floor(&self, residue: u64, modulus: u64) -> u32 {
        let s = modulus.trailing_zeros();
        let two_s = 1u64 << s;
        let t = (residue % two_s + 1) % two_s;
        let derived = if t == 0 { s } else { t.trailing_zeros() };
        derived.max(self.min_two_valuation_of_p_plus_1.unwrap_or(0))
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FamilyKind::Progression { residue, modulus } => {
                write!(f, "{} (p ≡ {residue} mod {modulus})", self.label)
            }
            _ => write!(f, "{}", self.label),
        }
    }
}
