use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::ast::{Cmp, Condition, Expr, Statement};
use crate::arith::{require_prime, v_adic};
use crate::harness::PrimeProperty;
use crate::matrix::{gl2_order, Gl2, DEFAULT_ENUMERATION_BOUND};
use crate::sylow::{sentence_all_conjugate, sentence_unextendable, sylow_order, SentenceBudget};
use crate::volvachev::{check_v1, check_v2, check_v3_finite};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct EvalBudget {
    /// Largest `|GL2(F_p)|` a sentence leaf may enumerate.
    pub enumeration_bound: u128,
    pub sentence: SentenceBudget,
}

impl Default for EvalBudget {
    fn default() -> Self {
        Self {
            enumeration_bound: DEFAULT_ENUMERATION_BOUND,
            sentence: SentenceBudget::default(),
        }
    }
}

/// Evaluates statements at a prime, keeping enumerated groups around.
#[derive(Default)]
pub struct Evaluator {
    budget: EvalBudget,
    groups: Mutex<HashMap<u64, Arc<Gl2>>>,
}

impl Evaluator {
    pub fn new(budget: EvalBudget) -> Self {
        Self {
            budget,
            groups: Mutex::new(HashMap::new()),
        }
    }

    pub fn budget(&self) -> EvalBudget {
        self.budget
    }

    fn group(&self, p: u64) -> Result<Arc<Gl2>> {
        if let Some(g) = self.groups.lock().expect("group cache lock").get(&p) {
            return Ok(g.clone());
        }
        let g = Arc::new(Gl2::enumerate_with_bound(p, self.budget.enumeration_bound)?);
        self.groups
            .lock()
            .expect("group cache lock")
            .entry(p)
            .or_insert_with(|| g.clone());
        Ok(g)
    }

    pub fn eval(&self, statement: &Statement, p: u64) -> Result<bool> {
        require_prime(p)?;
        self.eval_at(statement, p)
    }

    fn eval_at(&self, statement: &Statement, p: u64) -> Result<bool> {
        Ok(match statement {
            Statement::Congruence {
                lhs,
                residue,
                modulus,
            } => {
                let m = *modulus as i128;
                value(lhs, p)?.rem_euclid(m) == (*residue as i128).rem_euclid(m)
            }
            Statement::ValuationCmp {
                expr,
                base,
                cmp,
                bound,
            } => {
                let v = value(expr, p)?;
                if v == 0 {
                    return Err(Error::Eval {
                        p,
                        reason: format!("{expr} is zero, valuation undefined"),
                    });
                }
                let k = v_adic(v.unsigned_abs(), *base)?.exponent;
                match cmp {
                    Cmp::Ge => k >= *bound,
                    Cmp::Eq => k == *bound,
                }
            }
            Statement::SylowOrderEq { value } => sylow_order(gl2_order(p)?, 2)? == *value,
            Statement::Volvachev(Condition::V1) => {
                check_v1(p)?;
                true
            }
            Statement::Volvachev(Condition::V2) => check_v2(p)?,
            Statement::Volvachev(Condition::V3) => check_v3_finite(p)?.holds,
            Statement::Unextendable { ell, k } => {
                sentence_unextendable(&*self.group(p)?, *ell, *k, self.budget.sentence)?
            }
            Statement::AllConjugate { ell, k } => {
                sentence_all_conjugate(&*self.group(p)?, *ell, *k, self.budget.sentence)?
            }
            Statement::And(a, b) => self.eval_at(a, p)? && self.eval_at(b, p)?,
            Statement::Or(a, b) => self.eval_at(a, p)? || self.eval_at(b, p)?,
            Statement::Not(a) => !self.eval_at(a, p)?,
        })
    }
}

fn value(expr: &Expr, p: u64) -> Result<i128> {
    let overflow = || Error::Eval {
        p,
        reason: format!("{expr} overflows"),
    };
    Ok(match expr {
        Expr::P => p as i128,
        Expr::Int(n) => *n as i128,
        Expr::GroupOrder => i128::try_from(gl2_order(p)?).map_err(|_| overflow())?,
        Expr::Add(a, b) => value(a, p)?
            .checked_add(value(b, p)?)
            .ok_or_else(overflow)?,
        Expr::Sub(a, b) => value(a, p)?
            .checked_sub(value(b, p)?)
            .ok_or_else(overflow)?,
        Expr::Mul(a, b) => value(a, p)?
            .checked_mul(value(b, p)?)
            .ok_or_else(overflow)?,
        Expr::Pow(a, k) => value(a, p)?.checked_pow(*k).ok_or_else(overflow)?,
    })
}

/// A parsed statement viewed as a property of primes.
pub struct StatementProperty {
    statement: Statement,
    evaluator: Evaluator,
}

impl StatementProperty {
    pub fn new(statement: Statement, budget: EvalBudget) -> Self {
        Self {
            statement,
            evaluator: Evaluator::new(budget),
        }
    }

    pub fn statement(&self) -> &Statement {
        &self.statement
    }
}

impl PrimeProperty for StatementProperty {
    fn id(&self) -> String {
        self.statement.to_string()
    }

    fn eval(&self, p: u64) -> Result<bool> {
        self.evaluator.eval(&self.statement, p)
    }
}
