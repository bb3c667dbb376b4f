use super::ast::{BinaryOp, Expr, UnaryOp};

/// Symbolic d/dt.
///
/// `abs` differentiates to `u'·u/abs(u)`, which is undefined at zeros of
/// `u`; callers must not evaluate it there. Constants are folded only where
/// the fold is exact (`0+x`, `1*x`, `0*x`, literal arithmetic).
pub fn differentiate(e: &Expr) -> Expr {
    use BinaryOp::*;
    use UnaryOp::*;
    match e {
        Expr::Num(_) | Expr::Pi => zero(),
        Expr::Var => one(),
        Expr::Unary(op, u) => {
            let du = differentiate(u);
            let u = (**u).clone();
            match op {
                Neg => neg(du),
                Sin => mul(Expr::unary(Cos, u), du),
                Cos => neg(mul(Expr::unary(Sin, u), du)),
                Exp => mul(Expr::unary(Exp, u), du),
                Log => div(du, u),
                Abs => div(mul(du, u.clone()), Expr::unary(Abs, u)),
                Sqrt => div(du, mul(Expr::Num(2.0), Expr::unary(Sqrt, u))),
            }
        }
        Expr::Binary(op, l, r) => {
            let dl = differentiate(l);
            let (l, r) = ((**l).clone(), (**r).clone());
            match op {
                Add => add(dl, differentiate(&r)),
                Sub => sub(dl, differentiate(&r)),
                Mul => {
                    let dr = differentiate(&r);
                    add(mul(dl, r), mul(l, dr))
                }
                Div => {
                    let dr = differentiate(&r);
                    div(sub(mul(dl, r.clone()), mul(l, dr)), mul(r.clone(), r))
                }
                Pow => {
                    // exponent is constant by construction
                    let c = r;
                    let c1 = sub(c.clone(), one());
                    mul(mul(c, pow(l, c1)), dl)
                }
            }
        }
    }
}

fn zero() -> Expr {
    Expr::Num(0.0)
}

fn one() -> Expr {
    Expr::Num(1.0)
}

fn lit(e: &Expr) -> Option<f64> {
    match e {
        Expr::Num(v) => Some(*v),
        Expr::Unary(UnaryOp::Neg, inner) => match **inner {
            Expr::Num(v) => Some(-v),
            _ => None,
        },
        _ => None,
    }
}

fn is(e: &Expr, v: f64) -> bool {
    lit(e) == Some(v)
}

fn neg(e: Expr) -> Expr {
    if let Some(v) = lit(&e) {
        return Expr::num(-v);
    }
    if let Expr::Unary(UnaryOp::Neg, inner) = e {
        return *inner;
    }
    Expr::unary(UnaryOp::Neg, e)
}

fn add(l: Expr, r: Expr) -> Expr {
    match (lit(&l), lit(&r)) {
        (Some(a), Some(b)) => Expr::num(a + b),
        (Some(a), _) if a == 0.0 => r,
        (_, Some(b)) if b == 0.0 => l,
        _ => Expr::binary(BinaryOp::Add, l, r),
    }
}

fn sub(l: Expr, r: Expr) -> Expr {
    match (lit(&l), lit(&r)) {
        (Some(a), Some(b)) => Expr::num(a - b),
        (Some(a), _) if a == 0.0 => neg(r),
        (_, Some(b)) if b == 0.0 => l,
        _ => Expr::binary(BinaryOp::Sub, l, r),
    }
}

fn mul(l: Expr, r: Expr) -> Expr {
    if is(&l, 0.0) || is(&r, 0.0) {
        return zero();
    }
    match (lit(&l), lit(&r)) {
        (Some(a), Some(b)) => Expr::num(a * b),
        (Some(a), _) if a == 1.0 => r,
        (_, Some(b)) if b == 1.0 => l,
        _ => Expr::binary(BinaryOp::Mul, l, r),
    }
}

fn div(l: Expr, r: Expr) -> Expr {
    if is(&l, 0.0) {
        return zero();
    }
    if is(&r, 1.0) {
        return l;
    }
    Expr::binary(BinaryOp::Div, l, r)
}

fn pow(base: Expr, c: Expr) -> Expr {
    if is(&c, 1.0) {
        return base;
    }
    if is(&c, 0.0) {
        return one();
    }
    Expr::binary(BinaryOp::Pow, base, c)
}
