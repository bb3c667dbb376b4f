//! Real functions on the circle built from expressions and a shift:
//! compositions with iterates, orbit products, derivative factors.

use crate::circle::{wrap, Shift, ShiftError};
use crate::expr::Expr;

#[derive(Clone, Debug)]
pub enum CircleFn {
    Expr(Expr),
    Product(Vec<CircleFn>),
    /// `f(α_k(t))`
    Compose {
        f: Box<CircleFn>,
        shift: Shift,
        k: i64,
    },
    /// `|(α_k)'(t)|`
    AbsDerivative { shift: Shift, k: i64 },
    /// `f_m(t) = ∏_{i<m} f(α_i(t))`
    OrbitProduct {
        f: Box<CircleFn>,
        shift: Shift,
        m: usize,
    },
}

impl From<Expr> for CircleFn {
    fn from(e: Expr) -> Self {
        CircleFn::Expr(e)
    }
}

impl CircleFn {
    pub fn constant(v: f64) -> CircleFn {
        CircleFn::Expr(Expr::num(v))
    }

    pub fn compose(self, shift: &Shift, k: i64) -> CircleFn {
        if k == 0 {
            return self;
        }
        CircleFn::Compose {
            f: Box::new(self),
            shift: shift.clone(),
            k,
        }
    }

    pub fn orbit_product(self, shift: &Shift, m: usize) -> CircleFn {
        if m == 1 {
            return self;
        }
        CircleFn::OrbitProduct {
            f: Box::new(self),
            shift: shift.clone(),
            m,
        }
    }

    pub fn as_expr(&self) -> Option<&Expr> {
        match self {
            CircleFn::Expr(e) => Some(e),
            _ => None,
        }
    }

    /// Evaluates at `t` reduced to `[0, 1)`.
    pub fn eval(&self, t: f64) -> Result<f64, ShiftError> {
        let t = wrap(t);
        Ok(match self {
            CircleFn::Expr(e) => e.eval(t)?,
            CircleFn::Product(fs) => {
                let mut p = 1.0;
                for f in fs {
                    p *= f.eval(t)?;
                }
                p
            }
            CircleFn::Compose { f, shift, k } => f.eval(shift.apply(t, *k)?)?,
            CircleFn::AbsDerivative { shift, k } => shift.iterate_derivative(t, *k)?.abs(),
            CircleFn::OrbitProduct { f, shift, m } => {
                let mut x = t;
                let mut p = 1.0;
                for i in 0..*m {
                    if i > 0 {
                        x = shift.apply(x, 1)?;
                    }
                    p *= f.eval(x)?;
                }
                p
            }
        })
    }

    pub fn describe(&self) -> String {
        match self {
            CircleFn::Expr(e) => e.to_string(),
            CircleFn::Product(fs) => fs.iter().map(|f| f.describe()).collect::<Vec<_>>().join(" * "),
            CircleFn::Compose { f, k, .. } => format!("({})∘α_{k}", f.describe()),
            CircleFn::AbsDerivative { k, .. } => format!("|α_{k}'|"),
            CircleFn::OrbitProduct { f, m, .. } => format!("prod_{{i<{m}}} ({})∘α_i", f.describe()),
        }
    }

    /// Largest `|f(0) - f(1⁻)|` relative defect over the expression leaves.
    /// Non-expression nodes are periodic by construction.
    pub fn periodicity_defect(&self) -> Result<f64, ShiftError> {
        Ok(match self {
            CircleFn::Expr(e) => {
                let f0 = e.eval(0.0)?;
                let f1 = e.eval(1.0)?;
                (f0 - f1).abs() / (1.0 + f0.abs())
            }
            CircleFn::Product(fs) => {
                let mut worst = 0.0f64;
                for f in fs {
                    worst = worst.max(f.periodicity_defect()?);
                }
                worst
            }
            CircleFn::Compose { f, .. } | CircleFn::OrbitProduct { f, .. } => f.periodicity_defect()?,
            CircleFn::AbsDerivative { .. } => 0.0,
        })
    }
}
