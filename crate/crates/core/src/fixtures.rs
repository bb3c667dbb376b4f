//! The shipped fixture suite and random generators used by tests and the
//! acceptance harness.

use rand::Rng;

use crate::analysis::{OperatorSpec, Tolerances, Verdict};
use crate::circle::Shift;
use crate::expr::{parse, BinaryOp, Expr, UnaryOp};
use crate::indices::SpaceIndices;

/// Lift of the two-fixed-point shift used throughout: fixed points 0 and
/// 0.5 with `α'(0) = 1 + 0.2π` and `α'(0.5) = 1 - 0.2π`.
pub const S1: &str = "t+0.1*sin(2*pi*t)";

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub lift: String,
    pub a: String,
    pub b: String,
    pub expected: Verdict,
    pub note: &'static str,
}

impl Fixture {
    fn new(name: &str, lift: &str, a: &str, b: &str, expected: Verdict, note: &'static str) -> Fixture {
        Fixture {
            name: name.into(),
            lift: lift.into(),
            a: a.into(),
            b: b.into(),
            expected,
            note,
        }
    }

    pub fn shift(&self) -> Shift {
        Shift::from_lift(parse(&self.lift).expect("fixture lift parses"), None).expect("fixture lift is a shift")
    }

    /// The operator on the space with indices `(1/3, 1/2)`.
    pub fn spec(&self) -> OperatorSpec {
        self.spec_on(default_space())
    }

    pub fn spec_on(&self, space: SpaceIndices) -> OperatorSpec {
        OperatorSpec::new(
            parse(&self.a).expect("fixture coefficient parses"),
            parse(&self.b).expect("fixture coefficient parses"),
            self.shift(),
            space,
            Tolerances::default(),
        )
        .expect("fixture operator is well formed")
    }
}

pub fn default_space() -> SpaceIndices {
    SpaceIndices::new(1.0 / 3.0, 0.5, true).expect("valid indices")
}

/// The eight-operator verdict suite.
pub fn suite() -> Vec<Fixture> {
    use Verdict::*;
    let bump = "2-1.9*sin(pi*t)";
    vec![
        Fixture::new("F1", S1, "2", "1", TwoSided, "dominant a: Γ₂ everywhere"),
        Fixture::new("F2", S1, "0.1", "1", TwoSided, "dominant b: Γ₃ everywhere"),
        Fixture::new("F4", S1, bump, "1", RightOnly, "both γ arcs in Γ₄, R vacuous"),
        Fixture::new("F5", S1, "1", bump, LeftOnly, "both γ arcs in Γ₅, L vacuous"),
        Fixture::new(
            "F6",
            S1,
            "(2-1.9*sin(pi*t))*cos(2*pi*t)",
            "cos(2*pi*t)",
            Neither,
            "shared zero of a and b at 0.25 breaks R",
        ),
        Fixture::new("F7", "1-t", "sin(2*pi*t)+0.5", "0.5", Neither, "reflection; σ_A = -sin²(2πt)"),
        Fixture::new("F8", "t", "2+cos(2*pi*t)", "0.5", TwoSided, "identity shift; σ_A = a - b"),
        Fixture::new("F9", "t+0.5", "2", "1", TwoSided, "half-turn rotation, m = 2"),
    ]
}

pub fn by_name(name: &str) -> Option<Fixture> {
    suite().into_iter().chain(extras()).find(|f| f.name == name)
}

/// Further operators exercising code paths the suite does not: m = 2 with
/// non-Carleman arcs, a flat fixed-point arc, R holding with zeros present,
/// and an L failure with `n > 0`.
pub fn extras() -> Vec<Fixture> {
    use Verdict::*;
    let m2 = "t+0.5+0.05*sin(4*pi*t)";
    let bump = "t+0.01*(sin(pi*(1-t)/0.75)+abs(sin(pi*(1-t)/0.75)))^2";
    vec![
        Fixture::new("M2", m2, "2", "1", TwoSided, "period-two points 0, 0.5 and 0.25, 0.75"),
        Fixture::new("ARC", bump, "3", "1", TwoSided, "fixed arc [0, 0.25]"),
        Fixture::new(
            "RZ",
            S1,
            "sin(2*pi*(t-0.3))*(1.05-sin(pi*t))",
            "0.3*sin(2*pi*(t-0.1))",
            RightOnly,
            "zeros of a precede zeros of b on every orbit",
        ),
    ]
}

/// Random smooth, 1-periodic coefficient built from trigonometric terms.
pub fn random_periodic_coeff<R: Rng>(rng: &mut R) -> String {
    let k = rng.gen_range(1..=2);
    let c0: f64 = rng.gen_range(-1.5..1.5);
    let c1: f64 = rng.gen_range(-1.5..1.5);
    let ph: f64 = rng.gen_range(0.0..1.0);
    format!("{c0:.3}+{c1:.3}*sin(2*pi*({k}*t-{ph:.3}))")
}

/// Random expression in `t` that is smooth and finite on `[0, 1]`: divisors
/// and logarithm arguments are kept away from zero, bases of non-integer
/// powers positive.
pub fn random_smooth_expr<R: Rng>(rng: &mut R, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..4) {
            0 => Expr::num((rng.gen_range(-3.0f64..3.0) * 10.0).round() / 10.0),
            1 => Expr::num(rng.gen_range(1..=9) as f64 / 4.0),
            2 => Expr::Pi,
            _ => Expr::var(),
        };
    }
    let sub = |rng: &mut R| random_smooth_expr(rng, depth - 1);
    // c + sin(...) with c >= 1.5 never vanishes
    let positive = |rng: &mut R| {
        let c = rng.gen_range(3..=8) as f64 / 2.0;
        Expr::binary(BinaryOp::Add, Expr::num(c), Expr::unary(UnaryOp::Sin, random_smooth_expr(rng, depth - 1)))
    };
    match rng.gen_range(0..10) {
        0 => Expr::binary(BinaryOp::Add, sub(rng), sub(rng)),
        1 => Expr::binary(BinaryOp::Sub, sub(rng), sub(rng)),
        2 => Expr::binary(BinaryOp::Mul, sub(rng), sub(rng)),
        3 => Expr::binary(BinaryOp::Div, sub(rng), positive(rng)),
        4 => Expr::unary(UnaryOp::Sin, sub(rng)),
        5 => Expr::unary(UnaryOp::Cos, sub(rng)),
        6 => Expr::unary(UnaryOp::Exp, Expr::unary(UnaryOp::Sin, sub(rng))),
        7 => Expr::unary(UnaryOp::Log, positive(rng)),
        8 => Expr::unary(UnaryOp::Sqrt, positive(rng)),
        _ => {
            let exps: [f64; 5] = [2.0, 3.0, 0.5, -1.0, 1.5];
            let e = exps[rng.gen_range(0..exps.len())];
            let base = if e.fract() == 0.0 && e > 0.0 { sub(rng) } else { positive(rng) };
            Expr::binary(BinaryOp::Pow, base, Expr::num(e))
        }
    }
}
