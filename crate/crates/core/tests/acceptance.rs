//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use sylowlab::dsl::{parse, Condition, Evaluator, Statement};
use sylowlab::families::FamilySpec;
use sylowlab::field::GaussianField;
use sylowlab::harness::prufer_check;
use sylowlab::matrix::{embed_torus, gl2_order, Gl2, Mat2};
use sylowlab::sylow::{
    conjugacy_witness, count_sylow, find_sylow, sentence_all_conjugate, sentence_unextendable,
    sylow_order, SentenceBudget,
};
use sylowlab::volvachev::{
    check_v1, check_v2, check_v3_finite, classify_conjugacy, ConjugacyClassification,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || {
        format!("{what} took {t:.2?}, limit {limit:?}")
    })
}

fn c1_family_i_order() -> Outcome {
    let start = Instant::now();
    let primes: Vec<u64> = (3..=1000u64)
        .filter(|&p| p % 8 == 3 && trial_prime(p))
        .collect();
    let family = FamilySpec::family_i()
        .primes(1000)
        .map_err(|e| e.to_string())?;
    ensure(family == primes, || {
        "family I members differ from trial division".into()
    })?;
    for &p in &primes {
        let q = p as u128;
        let oracle = ell_part((q * q - 1) * (q * q - q), 2);
        let got =
            sylow_order(gl2_order(p).map_err(|e| e.to_string())?, 2).map_err(|e| e.to_string())?;
        ensure(got == 16 && oracle == 16, || {
            format!("p = {p}: library {got}, oracle {oracle}")
        })?;
    }
    within(start, Duration::from_secs(1), "family I scan")?;
    Ok(format!(
        "{} primes, all 16 (tolerance: exact)",
        primes.len()
    ))
}

fn c2_constructed_sylow() -> Outcome {
    let mut notes = Vec::new();
    for p in [3u64, 11, 19] {
        let start = Instant::now();
        let g = Gl2::enumerate(p).map_err(|e| e.to_string())?;
        let q = p as usize;
        ensure(g.order() == (q * q - 1) * (q * q - q), || {
            format!("|GL2(F_{p})| wrong")
        })?;
        let seeds: Vec<_> = (0..5u64)
            .map(|s| find_sylow(2, &g, s).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        for s in &seeds {
            ensure(s.verify_closed() && s.order() == 16, || {
                format!("p = {p}: subgroup of order {} or not closed", s.order())
            })?;
            ensure(
                s.elements().iter().all(|x| x.order().is_power_of_two()),
                || format!("p = {p}: non-2-element"),
            )?;
        }
        for a in &seeds {
            for b in &seeds {
                let w = conjugacy_witness(a, b, &g).map_err(|e| e.to_string())?;
                let w = w.ok_or_else(|| format!("p = {p}: no conjugating element"))?;
                ensure(a.conjugate_by(&w).key() == b.key(), || {
                    format!("p = {p}: witness does not conjugate")
                })?;
            }
        }
        let budget = SentenceBudget::default();
        let k4 = sentence_unextendable(&g, 2, 4, budget).map_err(|e| e.to_string())?;
        let k3 = sentence_unextendable(&g, 2, 3, budget).map_err(|e| e.to_string())?;
        ensure(k4 && !k3, || {
            format!("p = {p}: unextendable k=4 {k4}, k=3 {k3}")
        })?;
        within(start, Duration::from_secs(300), &format!("p = {p}"))?;
        notes.push(format!("p={p} {:.1?}", start.elapsed()));
    }
    Ok(format!(
        "{} (tolerance: exact; limit 300s each)",
        notes.join(", ")
    ))
}

fn c3_oracle(p: u64) -> Result<(), String> {
    let subgroups = subgroups_upto3(p);
    let g = Gl2::enumerate(p).map_err(|e| e.to_string())?;
    let to_raw = |m: &Mat2| m.entries();
    for ell in [2u64, 3] {
        let order = g.order() as u128;
        let so = sylow_order(order, ell).map_err(|e| e.to_string())?;
        ensure(so == ell_part(order, ell as u128), || {
            format!("p={p} ell={ell}: order")
        })?;
        let sylows = of_order(&subgroups, so as usize);
        let n = count_sylow(ell, &g).map_err(|e| e.to_string())?;
        ensure(n as usize == sylows.len(), || {
            format!("p={p} ell={ell}: n_p {n} vs {}", sylows.len())
        })?;
        let mut found = Vec::new();
        for seed in 0..5 {
            let s = find_sylow(ell, &g, seed).map_err(|e| e.to_string())?;
            let raw: RawGroup = s.elements().iter().map(to_raw).collect();
            ensure(sylows.contains(&&raw), || {
                format!("p={p} ell={ell}: constructed subgroup not in oracle list")
            })?;
            found.push(s);
        }
        let brute_conj =
            oracle_all_conjugate(&subgroups, ell as usize, valuation(order, ell as u128), p);
        for a in &found {
            for b in &found {
                let w = conjugacy_witness(a, b, &g).map_err(|e| e.to_string())?;
                ensure(w.is_some() == brute_conj, || {
                    format!("p={p} ell={ell}: conjugacy disagrees")
                })?;
            }
        }
        for k in 0..=valuation(order, ell as u128) + 1 {
            let budget = SentenceBudget::default();
            let u = sentence_unextendable(&g, ell, k, budget).map_err(|e| e.to_string())?;
            let c = sentence_all_conjugate(&g, ell, k, budget).map_err(|e| e.to_string())?;
            ensure(
                u == oracle_unextendable(&subgroups, ell as usize, k),
                || format!("p={p} ell={ell} k={k}: unextendable"),
            )?;
            ensure(
                c == oracle_all_conjugate(&subgroups, ell as usize, k, p),
                || format!("p={p} ell={ell} k={k}: allconj"),
            )?;
        }
    }
    Ok(())
}

fn c3_exhaustive_oracle() -> Outcome {
    c3_oracle(2)?;
    c3_oracle(3)?;
    Ok("GL2(F_2), GL2(F_3), ell in {2, 3}: orders, n_p, conjugacy, sentences agree (tolerance: exact)".into())
}

fn c4_volvachev_finite() -> Outcome {
    let primes = FamilySpec::family_i()
        .primes(2000)
        .map_err(|e| e.to_string())?;
    let primes = &primes[..20];
    for &p in primes {
        let (a, b) = check_v1(p).map_err(|e| e.to_string())?;
        ensure((a * a + b * b) % p == p - 1, || {
            format!("p={p}: V1 witness {a},{b}")
        })?;
        ensure(check_v2(p).map_err(|e| e.to_string())?, || {
            format!("p={p}: V2 false")
        })?;
        let v3 = check_v3_finite(p).map_err(|e| e.to_string())?;
        ensure(!v3.holds, || format!("p={p}: V3 holds"))?;
        let w = v3
            .counterexample
            .ok_or_else(|| format!("p={p}: no witness"))?;
        ensure(w.order == 8 && w.norm == p - 1, || {
            format!("p={p}: witness order {} norm {}", w.order, w.norm)
        })?;
        let x = w.element;
        let (xa, xb) = x.parts();
        let naive_norm = (xa * xa + xb * xb) % p;
        let k = (p as u128 + 1 - 4) / 8;
        let lhs = x.pow(p as u128 + 1);
        let rhs = x.pow(4).try_mul(&x.pow(8 * k)).map_err(|e| e.to_string())?;
        ensure(
            lhs == rhs && lhs.parts() == (naive_norm, 0) && x.pow(4).parts() == (p - 1, 0),
            || format!("p={p}: x^(p+1) = {lhs}, x^4·x^(8k) = {rhs}, norm {naive_norm}"),
        )?;
    }
    Ok(format!(
        "primes {}..{} (tolerance: exact)",
        primes[0], primes[19]
    ))
}

fn c5_limit_classification() -> Outcome {
    let i = classify_conjugacy(&FamilySpec::family_i(), 500).map_err(|e| e.to_string())?;
    let s = classify_conjugacy(&FamilySpec::staircase(), 5000).map_err(|e| e.to_string())?;
    ensure(
        i.verdict == ConjugacyClassification::ConjugateFinite { order: 16 },
        || format!("family I: {}", i.verdict),
    )?;
    ensure(
        s.verdict == ConjugacyClassification::NonconjugateVolvachev,
        || format!("staircase: {}", s.verdict),
    )?;
    Ok(format!(
        "I@500 {}, staircase@5000 {} (tolerance: exact)",
        i.verdict, s.verdict
    ))
}

fn c6_prufer() -> Outcome {
    let mut rows = 0;
    for p in [2u64, 3] {
        let r = prufer_check(p, 10).map_err(|e| e.to_string())?;
        ensure(r.counts_match && r.embeddings_ok, || {
            format!("p={p}: flags")
        })?;
        let q = p as u128;
        for i in 1..=10u32 {
            for j in 0..=i {
                let expected = if j == 0 { 1 } else { q.pow(j) - q.pow(j - 1) };
                let row = r
                    .rows
                    .iter()
                    .find(|row| row.level == i && row.j == j)
                    .ok_or_else(|| format!("p={p}: missing row i={i} j={j}"))?;
                ensure(row.count == expected, || {
                    format!("p={p} i={i} j={j}: {} vs {expected}", row.count)
                })?;
                rows += 1;
            }
        }
    }
    Ok(format!("{rows} (i, j) counts (tolerance: exact)"))
}

fn c7_field_properties() -> Outcome {
    let mut checked = 0usize;
    for p in [3u64, 7, 11] {
        let f = GaussianField::new(p).map_err(|e| e.to_string())?;
        let units: Vec<_> = f.units().collect();
        ensure(units.len() as u64 == p * p - 1, || {
            format!("p={p}: unit count")
        })?;
        let m = valuation((p as u128) * (p as u128) - 1, 2);
        for x in &units {
            for y in &units {
                let xy = x.try_mul(y).map_err(|e| e.to_string())?;
                ensure(
                    xy.norm() == x.norm().try_mul(&y.norm()).map_err(|e| e.to_string())?,
                    || format!("p={p}: N({x}·{y})"),
                )?;
                checked += 1;
            }
            ensure(x.pow(p as u128) == x.conj(), || {
                format!("p={p}: Frobenius at {x}")
            })?;
            let m2 = embed_torus(x).map_err(|e| e.to_string())?;
            ensure(m2.det() == x.norm(), || format!("p={p}: det(embed({x}))"))?;
            let ord = x.mult_order().map_err(|e| e.to_string())?;
            if ord.is_power_of_two() {
                let minus_one = x.norm().value() == p - 1;
                ensure(minus_one == (ord == 1u128 << m), || {
                    format!("p={p}: dichotomy at {x} (order {ord})")
                })?;
                ensure(minus_one || x.norm().is_one(), || {
                    format!("p={p}: 2-element norm not ±1")
                })?;
            }
            checked += 3;
        }
    }
    Ok(format!(
        "{checked} exhaustive checks over p in {{3, 7, 11}} (tolerance: exact)"
    ))
}

/// Direct API answer for a leaf, or `None` when the API reports an error.
fn api_leaf(leaf: &Statement, p: u64) -> Option<bool> {
    match leaf {
        Statement::Congruence {
            lhs,
            residue,
            modulus,
        } => {
            let m = *modulus as i128;
            Some(oracle_expr(lhs, p)?.rem_euclid(m) == (*residue as i128).rem_euclid(m))
        }
        Statement::ValuationCmp {
            expr,
            base,
            cmp,
            bound,
        } => {
            let v = oracle_expr(expr, p)?;
            if v == 0 {
                return None;
            }
            let k = valuation(v.unsigned_abs(), *base as u128);
            Some(match cmp {
                sylowlab::dsl::Cmp::Ge => k >= *bound,
                sylowlab::dsl::Cmp::Eq => k == *bound,
            })
        }
        Statement::SylowOrderEq { value } => {
            Some(sylow_order(gl2_order(p).ok()?, 2).ok()? == *value)
        }
        Statement::Volvachev(Condition::V1) => check_v1(p).ok().map(|_| true),
        Statement::Volvachev(Condition::V2) => check_v2(p).ok(),
        Statement::Volvachev(Condition::V3) => check_v3_finite(p).ok().map(|v| v.holds),
        Statement::Unextendable { ell, k } => sentence_unextendable(
            &Gl2::enumerate(p).ok()?,
            *ell,
            *k,
            SentenceBudget::default(),
        )
        .ok(),
        Statement::AllConjugate { ell, k } => sentence_all_conjugate(
            &Gl2::enumerate(p).ok()?,
            *ell,
            *k,
            SentenceBudget::default(),
        )
        .ok(),
        _ => unreachable!("leaves only"),
    }
}

fn golden(bin: &str, args: &[&str], file: &str) -> Result<(), String> {
    let run = || {
        let out = Command::new(bin)
            .args(args)
            .env_remove("SYLOWLAB_CACHE")
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || {
            format!("{args:?} exited {:?}", out.status.code())
        })?;
        Ok::<_, String>(out.stdout)
    };
    let first = run()?;
    let second = run()?;
    ensure(first == second, || format!("{args:?}: runs differ"))?;
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(file);
    let expected = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    ensure(first == expected, || {
        format!("{args:?}: output differs from {file}")
    })
}

fn c8_dsl() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut round_trips = 0;
    while round_trips < 25 {
        let s = random_statement(&mut rng, 3);
        let text = s.to_string();
        let back = parse(&text).map_err(|e| format!("{text}: {e}"))?;
        ensure(back == s, || format!("round trip changed {text}"))?;
        ensure(back.to_string() == text, || {
            format!("print not idempotent on {text}")
        })?;
        round_trips += 1;
    }

    let primes = [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 43, 47, 59, 83, 127];
    let evaluator = Evaluator::default();
    let mut agree = 0;
    let mut both_error = 0;
    for _ in 0..50 {
        let leaf = random_leaf(&mut rng);
        let p = match leaf {
            Statement::Unextendable { .. } | Statement::AllConjugate { .. } => {
                [3u64, 5, 7][rng.gen_range(0..3)]
            }
            _ => primes[rng.gen_range(0..primes.len())],
        };
        let via_dsl = evaluator.eval(&leaf, p).ok();
        let via_api = api_leaf(&leaf, p);
        ensure(via_dsl == via_api, || {
            format!("{leaf} at p={p}: dsl {via_dsl:?}, api {via_api:?}")
        })?;
        agree += 1;
        both_error += usize::from(via_dsl.is_none());
    }
    ensure(both_error * 5 < agree, || {
        format!("{both_error} of {agree} pairs agree only by erroring")
    })?;

    let bin = env!("CARGO_BIN_EXE_sylowlab");
    golden(
        bin,
        &["conjugacy", "--family", "I", "--limit", "500"],
        "conjugacy_I_500.txt",
    )?;
    golden(
        bin,
        &["conjugacy", "--family", "staircase", "--limit", "5000"],
        "conjugacy_staircase_5000.txt",
    )?;
    golden(
        bin,
        &[
            "evidence",
            "--family",
            "I",
            "--stmt",
            "volvachev(V3)",
            "--limit",
            "500",
        ],
        "evidence_I_v3_500.txt",
    )?;
    Ok(format!("{round_trips} round trips, {agree} eval/API pairs ({both_error} both erroring), 3 golden transcripts stable (tolerance: exact)"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "1",
            "family I Sylow 2-order is 16 for p ≡ 3 mod 8, p ≤ 1000",
            c1_family_i_order,
        ),
        (
            "2",
            "constructed Sylow 2-subgroups for p in {3, 11, 19}",
            c2_constructed_sylow,
        ),
        (
            "3",
            "Sylow engine vs brute-force subgroup enumeration",
            c3_exhaustive_oracle,
        ),
        (
            "4",
            "V1/V2/V3 on 20 primes of family I",
            c4_volvachev_finite,
        ),
        (
            "5",
            "limit classification of family I and the staircase",
            c5_limit_classification,
        ),
        (
            "6",
            "element-order counts in C_{p^i}, p in {2, 3}, i ≤ 10",
            c6_prufer,
        ),
        (
            "7",
            "F_p(i) property suites for p in {3, 7, 11}",
            c7_field_properties,
        ),
        (
            "8",
            "statement language round trip, agreement, golden transcripts",
            c8_dsl,
        ),
    ];
    let mut failed = 0;
    for (id, title, check) in criteria {
        let start = Instant::now();
        let result =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match result {
            Ok(detail) => println!("PASS criterion {id}: {title}: {detail} [{t:.2?}]"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {id}: {title}: {why} [{t:.2?}]");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
