//! Small real expression language in one variable `t`.

mod ast;
mod deriv;
mod parser;
mod zeros;

pub use ast::{BinaryOp, DomainKind, EvalError, Expr, UnaryOp};
pub use deriv::differentiate;
pub use parser::{parse, ParseError};
pub use zeros::{find_zeros, Zero, ZeroInterval, ZeroKind, ZeroScan, ZeroSet};
