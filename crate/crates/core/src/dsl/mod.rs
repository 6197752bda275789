//! A small statement language for family-level claims.
//!
//! ```text
//! stmt  := or
//! or    := and ('|' and)*
//! and   := unary ('&' unary)*
//! unary := '!' unary | '(' stmt ')' | leaf
//! leaf  := cong(expr, INT, INT)
//!        | v2(expr) ('>=' | '==') INT
//!        | sylow2(GL2) == INT
//!        | volvachev(V1 | V2 | V3)
//!        | unextendable(p=INT, k=INT)
//!        | allconj(p=INT, k=INT)
//! expr  := term (('+' | '-') term)*
//! term  := power ('*' power)*
//! power := atom ('^' INT)?
//! atom  := 'p' | INT | '|GL2|' | '(' expr ')'
//! ```
//!
//! Any prime `ℓ` may replace 2 in `v2`. Whitespace is insignificant.

mod ast;
mod eval;
mod parser;

pub use ast::{Cmp, Condition, Expr, Statement};
pub use eval::{EvalBudget, Evaluator, StatementProperty};
pub use parser::{parse, ParseError, ParseErrorKind};
