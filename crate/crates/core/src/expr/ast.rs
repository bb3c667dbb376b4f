use std::fmt;

use thiserror::Error;

/// Expression tree over the single real variable `t`.
///
/// Numeric literals are kept non-negative; a negative constant is
/// represented as `Neg(Num(..))`. That keeps the canonical serialization
/// (see the `Display` impl) parseable back into a structurally identical
/// tree. Use [`Expr::num`] rather than building `Num` by hand.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Var,
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Log,
    Abs,
    Sqrt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    /// Exponent must be a constant subtree.
    Pow,
}

impl UnaryOp {
    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "neg",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Abs => "abs",
            UnaryOp::Sqrt => "sqrt",
        }
    }

    pub fn from_function_name(name: &str) -> Option<UnaryOp> {
        Some(match name {
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "exp" => UnaryOp::Exp,
            "log" => UnaryOp::Log,
            "abs" => UnaryOp::Abs,
            "sqrt" => UnaryOp::Sqrt,
            _ => return None,
        })
    }
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainKind {
    LogNonPositive,
    SqrtNegative,
    DivisionByZero,
    /// Negative base raised to a non-integer power, or zero to a negative one.
    PowDomain,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainKind::LogNonPositive => "log of a non-positive value",
            DomainKind::SqrtNegative => "sqrt of a negative value",
            DomainKind::DivisionByZero => "division by zero",
            DomainKind::PowDomain => "power outside its real domain",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
#[error("{kind} in `{node}` at t = {t}")]
pub struct EvalError {
    pub kind: DomainKind,
    /// Canonical serialization of the offending node.
    pub node: String,
    pub t: f64,
}

impl Expr {
    /// Constant with the non-negative-literal invariant applied.
    pub fn num(v: f64) -> Expr {
        if v < 0.0 {
            Expr::Unary(UnaryOp::Neg, Box::new(Expr::Num(-v)))
        } else {
            // normalizes -0.0
            Expr::Num(v + 0.0)
        }
    }

    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn unary(op: UnaryOp, e: Expr) -> Expr {
        Expr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinaryOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    /// True when the tree does not mention `t`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi => true,
            Expr::Var => false,
            Expr::Unary(_, e) => e.is_constant(),
            Expr::Binary(_, l, r) => l.is_constant() && r.is_constant(),
        }
    }

    pub fn contains_unary(&self, op: UnaryOp) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi | Expr::Var => false,
            Expr::Unary(o, e) => *o == op || e.contains_unary(op),
            Expr::Binary(_, l, r) => l.contains_unary(op) || r.contains_unary(op),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Pi | Expr::Var => 1,
            Expr::Unary(_, e) => 1 + e.node_count(),
            Expr::Binary(_, l, r) => 1 + l.node_count() + r.node_count(),
        }
    }

    /// Replaces every occurrence of `t` with `inner`.
    pub fn substitute(&self, inner: &Expr) -> Expr {
        match self {
            Expr::Var => inner.clone(),
            Expr::Num(_) | Expr::Pi => self.clone(),
            Expr::Unary(op, e) => Expr::unary(*op, e.substitute(inner)),
            Expr::Binary(op, l, r) => Expr::binary(*op, l.substitute(inner), r.substitute(inner)),
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64, EvalError> {
        let fail = |kind, node: &Expr| EvalError {
            kind,
            node: node.to_string(),
            t,
        };
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Pi => std::f64::consts::PI,
            Expr::Var => t,
            Expr::Unary(op, e) => {
                let x = e.eval(t)?;
                match op {
                    UnaryOp::Neg => -x,
                    UnaryOp::Sin => x.sin(),
                    UnaryOp::Cos => x.cos(),
                    UnaryOp::Exp => x.exp(),
                    UnaryOp::Abs => x.abs(),
                    UnaryOp::Log => {
                        if x <= 0.0 {
                            return Err(fail(DomainKind::LogNonPositive, self));
                        }
                        x.ln()
                    }
                    UnaryOp::Sqrt => {
                        if x < 0.0 {
                            return Err(fail(DomainKind::SqrtNegative, self));
                        }
                        x.sqrt()
                    }
                }
            }
            Expr::Binary(op, l, r) => {
                let x = l.eval(t)?;
                let y = r.eval(t)?;
                match op {
                    BinaryOp::Add => x + y,
                    BinaryOp::Sub => x - y,
                    BinaryOp::Mul => x * y,
                    BinaryOp::Div => {
                        if y == 0.0 {
                            return Err(fail(DomainKind::DivisionByZero, self));
                        }
                        x / y
                    }
                    BinaryOp::Pow => {
                        if (x < 0.0 && y.fract() != 0.0) || (x == 0.0 && y < 0.0) {
                            return Err(fail(DomainKind::PowDomain, self));
                        }
                        x.powf(y)
                    }
                }
            }
        })
    }
}

/// Canonical serialization: fully parenthesized infix, lowercase function
/// names, `pi` for the constant.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 => write!(f, "(-{})", -v),
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Pi => f.write_str("pi"),
            Expr::Var => f.write_str("t"),
            Expr::Unary(UnaryOp::Neg, e) => write!(f, "(-{e})"),
            Expr::Unary(op, e) => write!(f, "{}({e})", op.name()),
            Expr::Binary(op, l, r) => write!(f, "({l}{}{r})", op.symbol()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_constants_stay_in_literal_form() {
        assert_eq!(
            Expr::num(-2.5),
            Expr::unary(UnaryOp::Neg, Expr::Num(2.5))
        );
        assert_eq!(Expr::num(-0.0), Expr::Num(0.0));
        assert_eq!(Expr::num(-2.5).to_string(), "(-2.5)");
    }

    #[test]
    fn domain_errors_name_the_node() {
        let e = Expr::unary(UnaryOp::Log, Expr::binary(BinaryOp::Sub, Expr::Var, Expr::Num(1.0)));
        let err = e.eval(0.5).unwrap_err();
        assert_eq!(err.kind, DomainKind::LogNonPositive);
        assert_eq!(err.node, "log((t-1))");

        let d = Expr::binary(BinaryOp::Div, Expr::Num(1.0), Expr::Var);
        assert_eq!(d.eval(0.0).unwrap_err().kind, DomainKind::DivisionByZero);
        let s = Expr::unary(UnaryOp::Sqrt, Expr::unary(UnaryOp::Neg, Expr::Var));
        assert_eq!(s.eval(1.0).unwrap_err().kind, DomainKind::SqrtNegative);
        let p = Expr::binary(BinaryOp::Pow, Expr::unary(UnaryOp::Neg, Expr::Var), Expr::Num(0.5));
        assert_eq!(p.eval(1.0).unwrap_err().kind, DomainKind::PowDomain);
    }

    #[test]
    fn substitution_composes() {
        // t^2 composed with (t+1)
        let sq = Expr::binary(BinaryOp::Pow, Expr::Var, Expr::Num(2.0));
        let shift = Expr::binary(BinaryOp::Add, Expr::Var, Expr::Num(1.0));
        assert_eq!(sq.substitute(&shift).eval(2.0).unwrap(), 9.0);
    }
}
