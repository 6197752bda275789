use std::fmt;

use thiserror::Error;

use super::ast::{Cmp, Condition, Expr, Statement};
use crate::arith::is_prime;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax {
        expected: Vec<String>,
        found: String,
    },
    UnknownIdentifier(String),
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    InvalidArgument(String),
}

/// A parse failure at a 0-based character offset.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at position {}: ", self.position)?;
        match &self.kind {
            ParseErrorKind::Syntax { expected, found } => {
                write!(
                    f,
                    "expected one of {{{}}}, found {found}",
                    expected.join(", ")
                )
            }
            ParseErrorKind::UnknownIdentifier(name) => write!(f, "unknown identifier `{name}`"),
            ParseErrorKind::Arity {
                name,
                expected,
                found,
            } => {
                write!(f, "`{name}` takes {expected} argument(s), found {found}")
            }
            ParseErrorKind::InvalidArgument(msg) => write!(f, "{msg}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u128),
    LParen,
    RParen,
    Comma,
    Amp,
    Pipe,
    Bang,
    Ge,
    EqEq,
    Assign,
    Plus,
    Minus,
    Star,
    Caret,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            Tok::Bang => "!",
            Tok::Ge => ">=",
            Tok::EqEq => "==",
            Tok::Assign => "=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Caret => "^",
            Tok::Ident(_) => "identifier",
            Tok::Int(_) => "integer",
            Tok::Eof => "end of input",
        }
    }
}

fn syntax(position: usize, expected: &[&str], found: &Tok) -> ParseError {
    ParseError {
        position,
        kind: ParseErrorKind::Syntax {
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: found.describe(),
        },
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Pipe),
            '!' => Some(Tok::Bang),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, start));
            i += 1;
        } else if c == '>' && chars.get(i + 1) == Some(&'=') {
            out.push((Tok::Ge, start));
            i += 2;
        } else if c == '=' {
            if chars.get(i + 1) == Some(&'=') {
                out.push((Tok::EqEq, start));
                i += 2;
            } else {
                out.push((Tok::Assign, start));
                i += 1;
            }
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits.parse::<u128>().map_err(|_| ParseError {
                position: start,
                kind: ParseErrorKind::InvalidArgument(format!(
                    "integer literal {digits} is too large"
                )),
            })?;
            out.push((Tok::Int(n), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else {
            return Err(ParseError {
                position: start,
                kind: ParseErrorKind::Syntax {
                    expected: vec!["token".into()],
                    found: format!("`{c}`"),
                },
            });
        }
    }
    out.push((Tok::Eof, chars.len()));
    Ok(out)
}

enum Arg {
    Expr(Expr, usize),
    Ident(String, usize),
    Named(String, Expr, usize),
}

impl Arg {
    fn position(&self) -> usize {
        match self {
            Arg::Expr(_, p) | Arg::Ident(_, p) | Arg::Named(_, _, p) => *p,
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
}

type PResult<T> = Result<T, ParseError>;

fn invalid(position: usize, msg: impl Into<String>) -> ParseError {
    ParseError {
        position,
        kind: ParseErrorKind::InvalidArgument(msg.into()),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> PResult<usize> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(syntax(self.pos(), &[tok.symbol()], self.peek()))
        }
    }

    fn statement(&mut self) -> PResult<Statement> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            lhs = Statement::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<Statement> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = Statement::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Statement> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Statement::negate(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let s = self.statement()?;
                self.expect(Tok::RParen)?;
                Ok(s)
            }
            Tok::Ident(name) => {
                let at = self.bump().1;
                self.leaf(&name, at)
            }
            other => Err(syntax(self.pos(), &["(", "!", "identifier"], &other)),
        }
    }

    fn integer(&mut self) -> PResult<(u128, usize)> {
        match self.peek().clone() {
            Tok::Int(n) => Ok((n, self.bump().1)),
            other => Err(syntax(self.pos(), &["integer"], &other)),
        }
    }

    fn small_int<T: TryFrom<u128>>(&mut self) -> PResult<T> {
        let (n, at) = self.integer()?;
        T::try_from(n).map_err(|_| invalid(at, format!("integer {n} is out of range")))
    }

    fn args(&mut self) -> PResult<Vec<Arg>> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if *self.peek() == Tok::RParen {
            self.bump();
            return Ok(args);
        }
        loop {
            args.push(self.arg()?);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RParen => {
                    self.bump();
                    return Ok(args);
                }
                other => return Err(syntax(self.pos(), &[",", ")"], &other.clone())),
            }
        }
    }

    fn arg(&mut self) -> PResult<Arg> {
        let at = self.pos();
        if let Tok::Ident(name) = self.peek().clone() {
            if *self.peek_at(1) == Tok::Assign {
                self.bump();
                self.bump();
                return Ok(Arg::Named(name, self.expr()?, at));
            }
            if name != "p" {
                self.bump();
                return Ok(Arg::Ident(name, at));
            }
        }
        Ok(Arg::Expr(self.expr()?, at))
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.power()?;
        while *self.peek() == Tok::Star {
            self.bump();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
        }
        Ok(lhs)
    }

    fn power(&mut self) -> PResult<Expr> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let k = self.small_int::<u32>()?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Ident(name) if name == "p" => {
                self.bump();
                Ok(Expr::P)
            }
            Tok::Int(n) => {
                let at = self.bump().1;
                u64::try_from(n)
                    .map(Expr::Int)
                    .map_err(|_| invalid(at, format!("integer {n} is out of range")))
            }
            Tok::Pipe => {
                self.bump();
                match self.peek().clone() {
                    Tok::Ident(g) if g == "GL2" => {
                        self.bump();
                    }
                    other => return Err(syntax(self.pos(), &["GL2"], &other)),
                }
                self.expect(Tok::Pipe)?;
                Ok(Expr::GroupOrder)
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => Err(ParseError {
                position: self.pos(),
                kind: ParseErrorKind::UnknownIdentifier(name),
            }),
            other => Err(syntax(self.pos(), &["p", "integer", "|GL2|", "("], &other)),
        }
    }

    fn leaf(&mut self, name: &str, at: usize) -> PResult<Statement> {
        if let Some(base) = valuation_base(name) {
            let args = self.args()?;
            let [arg] = arity::<1>(name, args, at)?;
            let expr = as_expr(arg)?;
            let cmp = match self.peek() {
                Tok::Ge => Cmp::Ge,
                Tok::EqEq => Cmp::Eq,
                other => return Err(syntax(self.pos(), &[">=", "=="], &other.clone())),
            };
            self.bump();
            let bound = self.small_int::<u32>()?;
            return Ok(Statement::ValuationCmp {
                expr,
                base,
                cmp,
                bound,
            });
        }
        match name {
            "cong" => {
                let args = self.args()?;
                let [lhs, r, m] = arity::<3>(name, args, at)?;
                let lhs = as_expr(lhs)?;
                let residue = as_int(r)?;
                let m_at = m.position();
                let modulus = as_int(m)?;
                if modulus == 0 {
                    return Err(invalid(m_at, "modulus must be positive"));
                }
                Ok(Statement::Congruence {
                    lhs,
                    residue,
                    modulus,
                })
            }
            "sylow2" => {
                let args = self.args()?;
                let [g] = arity::<1>(name, args, at)?;
                match g {
                    Arg::Ident(ref s, _) if s == "GL2" => {}
                    other => return Err(invalid(other.position(), "sylow2 takes the group GL2")),
                }
                self.expect(Tok::EqEq)?;
                let (value, _) = self.integer()?;
                Ok(Statement::SylowOrderEq { value })
            }
            "volvachev" => {
                let args = self.args()?;
                let [c] = arity::<1>(name, args, at)?;
                let cond = match &c {
                    Arg::Ident(s, _) if s == "V1" => Condition::V1,
                    Arg::Ident(s, _) if s == "V2" => Condition::V2,
                    Arg::Ident(s, _) if s == "V3" => Condition::V3,
                    other => return Err(invalid(other.position(), "expected V1, V2 or V3")),
                };
                Ok(Statement::Volvachev(cond))
            }
            "unextendable" | "allconj" => {
                let args = self.args()?;
                let [a, b] = arity::<2>(name, args, at)?;
                let ell_at = a.position();
                let ell = named_int(a, "p")?;
                if !is_prime(ell) {
                    return Err(invalid(ell_at, format!("p={ell} is not prime")));
                }
                let k_at = b.position();
                let k = u32::try_from(named_int(b, "k")?)
                    .map_err(|_| invalid(k_at, "k is out of range"))?;
                Ok(if name == "unextendable" {
                    Statement::Unextendable { ell, k }
                } else {
                    Statement::AllConjugate { ell, k }
                })
            }
            _ => Err(ParseError {
                position: at,
                kind: ParseErrorKind::UnknownIdentifier(name.to_string()),
            }),
        }
    }
}

/// `v<prime>` names a valuation.
fn valuation_base(name: &str) -> Option<u64> {
    let digits = name.strip_prefix('v')?;
    let base: u64 = digits.parse().ok()?;
    is_prime(base).then_some(base)
}

fn arity<const N: usize>(name: &str, args: Vec<Arg>, at: usize) -> PResult<[Arg; N]> {
    let found = args.len();
    args.try_into().map_err(|_| ParseError {
        position: at,
        kind: ParseErrorKind::Arity {
            name: name.to_string(),
            expected: N,
            found,
        },
    })
}

fn as_expr(arg: Arg) -> PResult<Expr> {
    match arg {
        Arg::Expr(e, _) => Ok(e),
        Arg::Ident(name, at) => Err(ParseError {
            position: at,
            kind: ParseErrorKind::UnknownIdentifier(name),
        }),
        Arg::Named(_, _, at) => Err(invalid(
            at,
            "expected an expression, found a named argument",
        )),
    }
}

fn as_int(arg: Arg) -> PResult<u64> {
    match arg {
        Arg::Expr(Expr::Int(n), _) => Ok(n),
        other => Err(invalid(other.position(), "expected an integer literal")),
    }
}

fn named_int(arg: Arg, key: &str) -> PResult<u64> {
    match arg {
        Arg::Named(k, Expr::Int(n), _) if k == key => Ok(n),
        other => Err(invalid(
            other.position(),
            format!("expected {key}=<integer>"),
        )),
    }
}

/// Parses one statement; trailing input is an error.
pub fn parse(text: &str) -> Result<Statement, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        i: 0,
    };
    let s = p.statement()?;
    if *p.peek() != Tok::Eof {
        return Err(syntax(p.pos(), &["&", "|", "end of input"], p.peek()));
    }
    Ok(s)
}
