//! Sylow subgroups of enumerated `GL2(F_q)`.
//!
//! Everything here works on a fully materialised [`Gl2`]; normalizers are
//! computed by scanning the ambient group.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, v_adic};
use crate::matrix::{closure, Gl2, Mat2, SubgroupHandle};
use crate::{Error, Result};

/// `ell^(v_ell(group_order))`.
pub fn sylow_order(group_order: u128, ell: u64) -> Result<u128> {
    Ok(v_adic(group_order, ell)?.part())
}

/// Limits for the `ell`-subgroup lattice search behind the sentence checks.
#[derive(Clone, Copy, Debug)]
pub struct SentenceBudget {
    /// Total subgroups materialised across all layers.
    pub max_subgroups: usize,
}

impl Default for SentenceBudget {
    fn default() -> Self {
        Self {
            max_subgroups: 250_000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SylowReport {
    pub prime_p: u64,
    pub ambient_prime: u64,
    pub sylow_order: u128,
    pub subgroup: SubgroupHandle,
    pub n_p: Option<u128>,
    pub maximality_checked: bool,
}

/// Replaces `g` by its last power outside `h`, so that `g^ell ∈ h`.
fn reduce_into_next_layer(h: &SubgroupHandle, mut g: Mat2, ell: u64) -> Mat2 {
    loop {
        let next = g.pow(ell as u128);
        if h.contains(&next) {
            return g;
        }
        g = next;
    }
}

/// `<h, g>` for `g` normalising `h` with `g ∉ h`, `g^ell ∈ h`: the cosets `h g^t`.
fn extend_by(h: &SubgroupHandle, g: Mat2, ell: u64) -> SubgroupHandle {
    let mut elements = Vec::with_capacity(h.order() * ell as usize);
    let mut gt = g.pow(0);
    for _ in 0..ell {
        elements.extend(h.elements().iter().map(|x| x * &gt));
        gt = gt * g;
    }
    let mut gens = h.generators().to_vec();
    gens.push(g);
    SubgroupHandle::from_parts(gens, elements, h.ambient_prime())
}

/// All `ell`-subgroups containing `h` with index `ell`.
fn index_ell_overgroups(
    h: &SubgroupHandle,
    ell: u64,
    ell_elements: &[Mat2],
) -> Vec<SubgroupHandle> {
    let mut covered: HashSet<Mat2> = h.elements().iter().copied().collect();
    let mut out = Vec::new();
    for g in ell_elements {
        if covered.contains(g) || !h.is_normalized_by(g) {
            continue;
        }
        let k = extend_by(h, reduce_into_next_layer(h, *g, ell), ell);
        covered.insert(*g);
        covered.extend(k.elements().iter().copied());
        out.push(k);
    }
    out
}

fn has_ell_normalizer_outside(h: &SubgroupHandle, ell_elements: &[Mat2]) -> bool {
    ell_elements
        .par_iter()
        .any(|g| !h.contains(g) && h.is_normalized_by(g))
}

/// Layers `0..=top` of the `ell`-subgroup lattice: layer `j` holds every
/// subgroup of order `ell^j`, deduplicated by canonical element list.
///
/// Layer `j + 1` is built from layer `j` by adjoining one `ell`-element of the
/// normalizer; every `ell`-group of order `ell^(j+1)` arises this way because
/// its index-`ell` subgroups are normal.
pub fn ell_subgroup_layers(
    ambient: &Gl2,
    ell: u64,
    top: u32,
    budget: SentenceBudget,
) -> Result<Vec<Vec<SubgroupHandle>>> {
    arith::require_prime(ell)?;
    let ell_elements = ambient.ell_elements(ell);
    let mut layers = vec![vec![SubgroupHandle::trivial(ambient.p())?]];
    let mut total = 1usize;
    for _ in 0..top {
        let prev = layers.last().expect("layer 0 exists");
        let candidates: Vec<Vec<SubgroupHandle>> = prev
            .par_iter()
            .map(|h| index_ell_overgroups(h, ell, &ell_elements))
            .collect();
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        let mut next = Vec::new();
        for k in candidates.into_iter().flatten() {
            if seen.insert(k.key()) {
                total += 1;
                if total > budget.max_subgroups {
                    return Err(Error::BudgetExceeded(format!(
                        "more than {} {ell}-subgroups of GL2(F_{})",
                        budget.max_subgroups,
                        ambient.p()
                    )));
                }
                next.push(k);
            }
        }
        next.sort_by(|a, b| a.elements().cmp(b.elements()));
        let done = next.is_empty();
        layers.push(next);
        if done {
            break;
        }
    }
    while layers.len() <= top as usize {
        layers.push(Vec::new());
    }
    Ok(layers)
}

/// Elements of `ambient` normalising `h`, in canonical order.
pub fn normalizer(h: &SubgroupHandle, ambient: &Gl2) -> Vec<Mat2> {
    ambient
        .elements()
        .par_iter()
        .filter(|g| h.is_normalized_by(g))
        .copied()
        .collect()
}

/// Builds a Sylow `ell`-subgroup by normalizer ascent.
///
/// The seed element is a uniformly random group element raised to the
/// `ell'`-part of `|G|`; each ascent step adjoins a randomly chosen
/// `ell`-element of `N(P) \ P`. Both choices are driven by `seed`.
pub fn find_sylow(ell: u64, ambient: &Gl2, seed: u64) -> Result<SubgroupHandle> {
    arith::require_prime(ell)?;
    let n = ambient.order() as u128;
    let target = sylow_order(n, ell)? as usize;
    if target == 1 {
        return SubgroupHandle::trivial(ambient.p());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cofactor = arith::strip(n, ell);
    let x = loop {
        let r = ambient.elements()[rng.gen_range(0..ambient.order())];
        let x = r.pow(cofactor);
        if !x.is_identity() {
            break x;
        }
    };
    let mut p_sub = closure(ambient.p(), &[x], target)?;
    let ell_elements = ambient.ell_elements(ell);
    while p_sub.order() < target {
        let candidates: Vec<Mat2> = ell_elements
            .par_iter()
            .filter(|g| !p_sub.contains(g) && p_sub.is_normalized_by(g))
            .copied()
            .collect();
        if candidates.is_empty() {
            return Err(Error::InvariantViolation(format!(
                "normalizer ascent stalled at order {} < {target}",
                p_sub.order()
            )));
        }
        let g = candidates[rng.gen_range(0..candidates.len())];
        p_sub = extend_by(&p_sub, reduce_into_next_layer(&p_sub, g, ell), ell);
    }
    Ok(p_sub)
}

/// The canonically first `g` with `g^-1 P g = Q`, if any.
pub fn conjugacy_witness(
    p_sub: &SubgroupHandle,
    q_sub: &SubgroupHandle,
    ambient: &Gl2,
) -> Result<Option<Mat2>> {
    if p_sub.order() != q_sub.order() {
        return Err(Error::OrderMismatch {
            left: p_sub.order(),
            right: q_sub.order(),
        });
    }
    for s in [p_sub, q_sub] {
        if s.ambient_prime() != ambient.p() {
            return Err(Error::AmbientMismatch {
                left: s.ambient_prime(),
                right: ambient.p(),
            });
        }
    }
    Ok(ambient
        .elements()
        .par_iter()
        .find_first(|g| {
            let gi = g.inv();
            p_sub
                .generators()
                .iter()
                .all(|h| q_sub.contains(&(&(&gi * h) * g)))
        })
        .copied())
}

fn check_sylow_count(n_p: u128, group_order: u128, ell: u64) -> Result<()> {
    let cofactor = arith::strip(group_order, ell);
    if n_p % ell as u128 != 1 % ell as u128 || !cofactor.is_multiple_of(n_p) {
        return Err(Error::InvariantViolation(format!(
            "n_{ell} = {n_p} violates n ≡ 1 (mod {ell}) or n | {cofactor}"
        )));
    }
    Ok(())
}

/// `n_ell = [G : N_G(P)]`, checked against the Sylow congruences.
pub fn count_sylow(ell: u64, ambient: &Gl2) -> Result<u128> {
    let p_sub = find_sylow(ell, ambient, 0)?;
    let n = ambient.order() as u128;
    let n_p = n / normalizer(&p_sub, ambient).len() as u128;
    check_sylow_count(n_p, n, ell)?;
    Ok(n_p)
}

/// Sylow subgroup for `seed`, its count, and a check that no `ell`-element
/// of its normalizer lies outside it.
pub fn sylow_report(ell: u64, ambient: &Gl2, seed: u64) -> Result<SylowReport> {
    let subgroup = find_sylow(ell, ambient, seed)?;
    let n = ambient.order() as u128;
    let sylow_order = sylow_order(n, ell)?;
    if subgroup.order() as u128 != sylow_order {
        return Err(Error::InvariantViolation(format!(
            "constructed subgroup has order {}, expected {sylow_order}",
            subgroup.order()
        )));
    }
    let n_p = n / normalizer(&subgroup, ambient).len() as u128;
    check_sylow_count(n_p, n, ell)?;
    let maximality_checked = !has_ell_normalizer_outside(&subgroup, &ambient.ell_elements(ell));
    Ok(SylowReport {
        prime_p: ell,
        ambient_prime: ambient.p(),
        sylow_order,
        subgroup,
        n_p: Some(n_p),
        maximality_checked,
    })
}

/// "There is a subgroup of order `ell^k` not contained in a subgroup of order `ell^(k+1)`."
pub fn sentence_unextendable(
    ambient: &Gl2,
    ell: u64,
    k: u32,
    budget: SentenceBudget,
) -> Result<bool> {
    let layers = ell_subgroup_layers(ambient, ell, k, budget)?;
    let ell_elements = ambient.ell_elements(ell);
    Ok(layers[k as usize]
        .iter()
        .any(|h| !has_ell_normalizer_outside(h, &ell_elements)))
}

/// "Any two subgroups of order `ell^k` are conjugate."
pub fn sentence_all_conjugate(
    ambient: &Gl2,
    ell: u64,
    k: u32,
    budget: SentenceBudget,
) -> Result<bool> {
    let layers = ell_subgroup_layers(ambient, ell, k, budget)?;
    let layer = &layers[k as usize];
    let Some(first) = layer.first() else {
        return Ok(true);
    };
    if layer.len() == 1 {
        return Ok(true);
    }
    let class: HashSet<Vec<u64>> = ambient
        .elements()
        .par_iter()
        .map(|g| first.conjugate_by(g).key())
        .collect();
    Ok(layer.iter().all(|h| class.contains(&h.key())))
}
