//! Independent oracles shared by the integration and acceptance targets.
//! Nothing here calls into the library's algorithms.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use rand::Rng;
use sylowlab::dsl::{Cmp, Condition, Expr, Statement};

/// Row-major `[[a, b], [c, d]]` over `F_p`.
pub type Raw = [u64; 4];

pub fn raw_mul(x: &Raw, y: &Raw, p: u64) -> Raw {
    [
        (x[0] * y[0] + x[1] * y[2]) % p,
        (x[0] * y[1] + x[1] * y[3]) % p,
        (x[2] * y[0] + x[3] * y[2]) % p,
        (x[2] * y[1] + x[3] * y[3]) % p,
    ]
}

pub fn raw_det(x: &Raw, p: u64) -> u64 {
    (x[0] * x[3] % p + p - x[1] * x[2] % p) % p
}

pub fn raw_inv(x: &Raw, p: u64) -> Raw {
    let d = raw_det(x, p);
    let dinv = (1..p).find(|t| t * d % p == 1).expect("invertible");
    [
        x[3] * dinv % p,
        (p - x[1]) % p * dinv % p,
        (p - x[2]) % p * dinv % p,
        x[0] * dinv % p,
    ]
}

pub fn all_gl2(p: u64) -> Vec<Raw> {
    let mut out = Vec::new();
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    if raw_det(&[a, b, c, d], p) != 0 {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

pub type RawGroup = BTreeSet<Raw>;

/// Closure under multiplication, which in a finite group is the generated subgroup.
pub fn raw_closure(gens: &[Raw], p: u64) -> RawGroup {
    let mut set: RawGroup = BTreeSet::new();
    set.insert([1, 0, 0, 1]);
    let mut frontier: Vec<Raw> = vec![[1, 0, 0, 1]];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = raw_mul(&x, g, p);
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    set
}

pub fn raw_conjugate(h: &RawGroup, g: &Raw, p: u64) -> RawGroup {
    let gi = raw_inv(g, p);
    h.iter()
        .map(|x| raw_mul(&raw_mul(&gi, x, p), g, p))
        .collect()
}

/// Every subgroup generated by at most three elements, each listed once.
pub fn subgroups_upto3(p: u64) -> Vec<RawGroup> {
    let group = all_gl2(p);
    let mut seen: HashSet<RawGroup> = HashSet::new();
    let mut layer: Vec<RawGroup> = Vec::new();
    for g in &group {
        let h = raw_closure(&[*g], p);
        if seen.insert(h.clone()) {
            layer.push(h);
        }
    }
    for _ in 0..2 {
        let mut next = Vec::new();
        for h in &layer {
            for g in &group {
                if h.contains(g) {
                    continue;
                }
                let mut gens: Vec<Raw> = h.iter().copied().collect();
                gens.push(*g);
                let k = raw_closure(&gens, p);
                if seen.insert(k.clone()) {
                    next.push(k);
                }
            }
        }
        layer = next;
    }
    let mut all: Vec<RawGroup> = seen.into_iter().collect();
    all.sort();
    all
}

/// `ell`-part of `n` by repeated division.
pub fn ell_part(mut n: u128, ell: u128) -> u128 {
    let mut part = 1;
    while n.is_multiple_of(ell) {
        n /= ell;
        part *= ell;
    }
    part
}

pub fn valuation(mut n: u128, ell: u128) -> u32 {
    let mut k = 0;
    while n.is_multiple_of(ell) {
        n /= ell;
        k += 1;
    }
    k
}

pub fn trial_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

/// Subgroups of order `ell^k`.
pub fn of_order(subgroups: &[RawGroup], order: usize) -> Vec<&RawGroup> {
    subgroups.iter().filter(|h| h.len() == order).collect()
}

/// "Some subgroup of order `ell^k` lies in no subgroup of order `ell^(k+1)`."
pub fn oracle_unextendable(subgroups: &[RawGroup], ell: usize, k: u32) -> bool {
    let small = ell.pow(k);
    let big = of_order(subgroups, small * ell);
    of_order(subgroups, small)
        .iter()
        .any(|h| !big.iter().any(|b| h.is_subset(b)))
}

/// "Any two subgroups of order `ell^k` are conjugate."
pub fn oracle_all_conjugate(subgroups: &[RawGroup], ell: usize, k: u32, p: u64) -> bool {
    let layer = of_order(subgroups, ell.pow(k));
    let Some(first) = layer.first() else {
        return true;
    };
    let class: HashSet<RawGroup> = all_gl2(p)
        .iter()
        .map(|g| raw_conjugate(first, g, p))
        .collect();
    layer.iter().all(|h| class.contains(*h))
}

pub fn random_expr(rng: &mut impl Rng, depth: u32) -> Expr {
    let leaf = depth == 0 || rng.gen_bool(0.35);
    if leaf {
        return match rng.gen_range(0..3) {
            0 => Expr::P,
            1 => Expr::Int(rng.gen_range(0..50)),
            _ => Expr::GroupOrder,
        };
    }
    let a = Box::new(random_expr(rng, depth - 1));
    match rng.gen_range(0..4) {
        0 => Expr::Add(a, Box::new(random_expr(rng, depth - 1))),
        1 => Expr::Sub(a, Box::new(random_expr(rng, depth - 1))),
        2 => Expr::Mul(a, Box::new(random_expr(rng, depth - 1))),
        _ => Expr::Pow(a, rng.gen_range(0..4)),
    }
}

pub fn random_leaf(rng: &mut impl Rng) -> Statement {
    match rng.gen_range(0..6) {
        0 => Statement::Congruence {
            lhs: random_expr(rng, 2),
            residue: rng.gen_range(0..20),
            modulus: rng.gen_range(1..20),
        },
        1 => Statement::ValuationCmp {
            expr: random_expr(rng, 2),
            base: [2, 3, 5][rng.gen_range(0..3)],
            cmp: if rng.gen_bool(0.5) { Cmp::Ge } else { Cmp::Eq },
            bound: rng.gen_range(0..6),
        },
        2 => Statement::SylowOrderEq {
            value: 1 << rng.gen_range(0..8),
        },
        3 => {
            Statement::Volvachev([Condition::V1, Condition::V2, Condition::V3][rng.gen_range(0..3)])
        }
        4 => Statement::Unextendable {
            ell: [2, 3][rng.gen_range(0..2)],
            k: rng.gen_range(0..5),
        },
        _ => Statement::AllConjugate {
            ell: [2, 3][rng.gen_range(0..2)],
            k: rng.gen_range(0..5),
        },
    }
}

pub fn random_statement(rng: &mut impl Rng, depth: u32) -> Statement {
    if depth == 0 || rng.gen_bool(0.3) {
        return random_leaf(rng);
    }
    match rng.gen_range(0..3) {
        0 => Statement::and(
            random_statement(rng, depth - 1),
            random_statement(rng, depth - 1),
        ),
        1 => Statement::or(
            random_statement(rng, depth - 1),
            random_statement(rng, depth - 1),
        ),
        _ => Statement::negate(random_statement(rng, depth - 1)),
    }
}

/// Evaluates an expression with plain `i128` arithmetic; `None` on overflow.
pub fn oracle_expr(e: &Expr, p: u64) -> Option<i128> {
    let p = p as i128;
    Some(match e {
        Expr::P => p,
        Expr::Int(n) => *n as i128,
        Expr::GroupOrder => (p * p - 1) * (p * p - p),
        Expr::Add(a, b) => oracle_expr(a, p as u64)?.checked_add(oracle_expr(b, p as u64)?)?,
        Expr::Sub(a, b) => oracle_expr(a, p as u64)?.checked_sub(oracle_expr(b, p as u64)?)?,
        Expr::Mul(a, b) => oracle_expr(a, p as u64)?.checked_mul(oracle_expr(b, p as u64)?)?,
        Expr::Pow(a, k) => oracle_expr(a, p as u64)?.checked_pow(*k)?,
    })
}
