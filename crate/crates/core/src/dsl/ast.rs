use std::fmt;

/// Integer expressions in the single variable `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    P,
    Int(u64),
    /// `|GL2(F_p)|`.
    GroupOrder,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cmp {
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    V1,
    V2,
    V3,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Statement {
    Congruence {
        lhs: Expr,
        residue: u64,
        modulus: u64,
    },
    ValuationCmp {
        expr: Expr,
        base: u64,
        cmp: Cmp,
        bound: u32,
    },
    /// Sylow 2-order of `GL2(F_p)` equals `value`.
    SylowOrderEq {
        value: u128,
    },
    Volvachev(Condition),
    Unextendable {
        ell: u64,
        k: u32,
    },
    AllConjugate {
        ell: u64,
        k: u32,
    },
    And(Box<Statement>, Box<Statement>),
    Or(Box<Statement>, Box<Statement>),
    Not(Box<Statement>),
}

impl Statement {
    pub fn and(a: Statement, b: Statement) -> Self {
        Statement::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Statement, b: Statement) -> Self {
        Statement::Or(Box::new(a), Box::new(b))
    }

    pub fn negate(a: Statement) -> Self {
        Statement::Not(Box::new(a))
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&Statement> {
        match self {
            Statement::And(a, b) | Statement::Or(a, b) => {
                let mut v = a.leaves();
                v.extend(b.leaves());
                v
            }
            Statement::Not(a) => a.leaves(),
            leaf => vec![leaf],
        }
    }
}

impl Expr {
    fn is_atom(&self) -> bool {
        matches!(self, Expr::P | Expr::Int(_) | Expr::GroupOrder)
    }

    fn fmt_nested(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Add(..) | Expr::Sub(..) | Expr::Mul(..) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binary = |f: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr| {
            a.fmt_nested(f)?;
            write!(f, " {op} ")?;
            b.fmt_nested(f)
        };
        match self {
            Expr::P => write!(f, "p"),
            Expr::Int(n) => write!(f, "{n}"),
            Expr::GroupOrder => write!(f, "|GL2|"),
            Expr::Add(a, b) => binary(f, a, "+", b),
            Expr::Sub(a, b) => binary(f, a, "-", b),
            Expr::Mul(a, b) => binary(f, a, "*", b),
            Expr::Pow(base, k) if base.is_atom() => write!(f, "{base}^{k}"),
            Expr::Pow(base, k) => write!(f, "({base})^{k}"),
        }
    }
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cmp::Ge => ">=",
            Cmp::Eq => "==",
        })
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::V1 => "V1",
            Condition::V2 => "V2",
            Condition::V3 => "V3",
        })
    }
}

/// Canonical text: single spaces, every `&` and `|` node parenthesised.
impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Congruence {
                lhs,
                residue,
                modulus,
            } => write!(f, "cong({lhs}, {residue}, {modulus})"),
            Statement::ValuationCmp {
                expr,
                base,
                cmp,
                bound,
            } => write!(f, "v{base}({expr}) {cmp} {bound}"),
            Statement::SylowOrderEq { value } => write!(f, "sylow2(GL2) == {value}"),
            Statement::Volvachev(c) => write!(f, "volvachev({c})"),
            Statement::Unextendable { ell, k } => write!(f, "unextendable(p={ell}, k={k})"),
            Statement::AllConjugate { ell, k } => write!(f, "allconj(p={ell}, k={k})"),
            Statement::And(a, b) => write!(f, "({a} & {b})"),
            Statement::Or(a, b) => write!(f, "({a} | {b})"),
            Statement::Not(a) => write!(f, "!{a}"),
        }
    }
}
