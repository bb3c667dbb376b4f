use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::wrap;
use crate::expr::{differentiate, EvalError, Expr};

/// Largest |k| accepted by [`Shift::apply`].
pub const ORBIT_GUARD: i64 = 1_000_000;

const CHECK_GRID: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Preserving,
    Reversing,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Preserving => 1.0,
            Orientation::Reversing => -1.0,
        }
    }

    fn pow(self, k: i64) -> Orientation {
        if self == Orientation::Reversing && k.rem_euclid(2) == 1 {
            Orientation::Reversing
        } else {
            Orientation::Preserving
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShiftError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("lift is not a degree ±1 map: L(1) - L(0) = {0}")]
    Degree(f64),
    #[error("lift is not strictly monotone near t = {0}")]
    NotMonotone(f64),
    #[error("lift derivative vanishes or changes sign near t = {0}")]
    Derivative(f64),
    #[error("declared orientation {declared:?} contradicts the lift")]
    OrientationMismatch { declared: Orientation },
    #[error("inverse of the lift did not converge at y = {0}")]
    InverseFailed(f64),
    #[error("iterate index {0} exceeds the orbit guard")]
    Guard(i64),
}

/// Circle diffeomorphism `α`, cheap to clone and shareable across threads.
#[derive(Clone)]
pub struct Shift(Arc<Repr>);

enum Repr {
    Lift {
        lift: Expr,
        derivative: Expr,
        orientation: Orientation,
        l0: f64,
    },
    /// `base` iterated `power` times (negative = inverse).
    Iterate { base: Shift, power: i64 },
}

impl fmt::Debug for Shift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

impl Shift {
    /// Builds a shift from the lift `L` on `[0, 1]`, extended by
    /// `L(t+1) = L(t) + σ`. Checks degree, strict monotonicity and a
    /// nonvanishing derivative on a 4096-point grid.
    pub fn from_lift(lift: Expr, declared: Option<Orientation>) -> Result<Shift, ShiftError> {
        let l0 = lift.eval(0.0)?;
        let l1 = lift.eval(1.0)?;
        let step = l1 - l0;
        if ((step.abs()) - 1.0).abs() > 1e-9 {
            return Err(ShiftError::Degree(step));
        }
        let orientation = if step > 0.0 {
            Orientation::Preserving
        } else {
            Orientation::Reversing
        };
        if let Some(d) = declared {
            if d != orientation {
                return Err(ShiftError::OrientationMismatch { declared: d });
            }
        }
        let sigma = orientation.sign();
        let derivative = differentiate(&lift);
        let mut prev = l0;
        for i in 1..=CHECK_GRID {
            let t = i as f64 / CHECK_GRID as f64;
            let v = lift.eval(t)?;
            if (v - prev) * sigma <= 0.0 {
                return Err(ShiftError::NotMonotone(t));
            }
            prev = v;
        }
        // t = 1 is the seam and is covered by t = 0.
        for i in 0..CHECK_GRID {
            let t = i as f64 / CHECK_GRID as f64;
            let d = derivative.eval(t)?;
            if !(d * sigma > 0.0) {
                return Err(ShiftError::Derivative(t));
            }
        }
        Ok(Shift(Arc::new(Repr::Lift {
            lift,
            derivative,
            orientation,
            l0,
        })))
    }

    pub fn identity() -> Shift {
        Shift::from_lift(Expr::Var, None).expect("identity lift is valid")
    }

    pub fn orientation(&self) -> Orientation {
        match &*self.0 {
            Repr::Lift { orientation, .. } => *orientation,
            Repr::Iterate { base, power } => base.orientation().pow(*power),
        }
    }

    /// The lift expression and its derivative, when this shift is a plain lift.
    pub fn lift_expr(&self) -> Option<(&Expr, &Expr)> {
        match &*self.0 {
            Repr::Lift {
                lift, derivative, ..
            } => Some((lift, derivative)),
            Repr::Iterate { .. } => None,
        }
    }

    pub fn describe(&self) -> String {
        match &*self.0 {
            Repr::Lift { lift, .. } => format!("lift {lift}"),
            Repr::Iterate { base, power } => format!("({})^{power}", base.describe()),
        }
    }

    /// Lift on the whole real line.
    pub fn lift_value(&self, x: f64) -> Result<f64, ShiftError> {
        match &*self.0 {
            Repr::Lift {
                lift, orientation, ..
            } => {
                let n = x.floor();
                Ok(lift.eval(x - n)? + orientation.sign() * n)
            }
            Repr::Iterate { base, power } => {
                let mut y = x;
                for _ in 0..power.unsigned_abs() {
                    y = if *power > 0 {
                        base.lift_value(y)?
                    } else {
                        base.lift_inverse(y)?
                    };
                }
                Ok(y)
            }
        }
    }

    /// Inverse of [`lift_value`](Self::lift_value) on the real line.
    pub fn lift_inverse(&self, y: f64) -> Result<f64, ShiftError> {
        match &*self.0 {
            Repr::Lift {
                lift,
                derivative,
                orientation,
                l0,
            } => {
                let (n, target) = match orientation {
                    Orientation::Preserving => {
                        let n = (y - l0).floor();
                        (n, y - n)
                    }
                    Orientation::Reversing => {
                        let n = (l0 - y).floor();
                        (n, y + n)
                    }
                };
                let x = solve_monotone(lift, derivative, *orientation, target)?;
                Ok(x + n)
            }
            Repr::Iterate { base, power } => {
                let mut x = y;
                for _ in 0..power.unsigned_abs() {
                    x = if *power > 0 {
                        base.lift_inverse(x)?
                    } else {
                        base.lift_value(x)?
                    };
                }
                Ok(x)
            }
        }
    }

    fn step(&self, t: f64) -> Result<f64, ShiftError> {
        match &*self.0 {
            Repr::Lift { lift, .. } => Ok(wrap(lift.eval(t)?)),
            Repr::Iterate { base, power } => base.apply(t, *power),
        }
    }

    fn step_back(&self, t: f64) -> Result<f64, ShiftError> {
        match &*self.0 {
            Repr::Lift { .. } => Ok(wrap(self.lift_inverse(t)?)),
            Repr::Iterate { base, power } => base.apply(t, -*power),
        }
    }

    /// `α_k(t)`; `α_0(t) = t` exactly.
    pub fn apply(&self, t: f64, k: i64) -> Result<f64, ShiftError> {
        if k.abs() > ORBIT_GUARD {
            return Err(ShiftError::Guard(k));
        }
        let mut x = wrap(t);
        if k >= 0 {
            for _ in 0..k {
                x = self.step(x)?;
            }
        } else {
            for _ in 0..(-k) {
                x = self.step_back(x)?;
            }
        }
        Ok(x)
    }

    /// `α'(t)`.
    pub fn derivative(&self, t: f64) -> Result<f64, ShiftError> {
        match &*self.0 {
            Repr::Lift { derivative, .. } => Ok(derivative.eval(wrap(t))?),
            Repr::Iterate { base, power } => base.iterate_derivative(t, *power),
        }
    }

    /// `(α_k)'(t)` by the chain rule.
    pub fn iterate_derivative(&self, t: f64, k: i64) -> Result<f64, ShiftError> {
        if k.abs() > ORBIT_GUARD {
            return Err(ShiftError::Guard(k));
        }
        if k < 0 {
            let s = self.apply(t, k)?;
            return Ok(1.0 / self.iterate_derivative(s, -k)?);
        }
        let mut x = wrap(t);
        let mut d = 1.0;
        for _ in 0..k {
            d *= self.derivative(x)?;
            x = self.step(x)?;
        }
        Ok(d)
    }

    /// `α_k` as a shift in its own right.
    pub fn iterate(&self, k: i64) -> Shift {
        if k == 1 {
            return self.clone();
        }
        if let Repr::Iterate { base, power } = &*self.0 {
            return Shift(Arc::new(Repr::Iterate {
                base: base.clone(),
                power: power * k,
            }));
        }
        Shift(Arc::new(Repr::Iterate {
            base: self.clone(),
            power: k,
        }))
    }

    pub fn inverse(&self) -> Shift {
        self.iterate(-1)
    }

    pub fn is_identity_power(&self) -> bool {
        matches!(&*self.0, Repr::Iterate { power: 0, .. })
    }
}

/// Solves `L(x) = target` for `x ∈ [0, 1]`, safeguarded Newton with a
/// bisection fallback.
fn solve_monotone(
    lift: &Expr,
    derivative: &Expr,
    orientation: Orientation,
    target: f64,
) -> Result<f64, ShiftError> {
    let sigma = orientation.sign();
    // g is increasing in x after multiplying by sigma
    let g = |x: f64| -> Result<f64, ShiftError> { Ok(sigma * (lift.eval(x)? - target)) };
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let (ga, gb) = (g(a)?, g(b)?);
    if ga >= 0.0 {
        return if ga <= 1e-9 {
            Ok(0.0)
        } else {
            Err(ShiftError::InverseFailed(target))
        };
    }
    if gb <= 0.0 {
        return if gb >= -1e-9 {
            Ok(1.0)
        } else {
            Err(ShiftError::InverseFailed(target))
        };
    }
    let mut x = a + (-ga) / (gb - ga);
    for _ in 0..200 {
        let gx = g(x)?;
        if gx == 0.0 {
            return Ok(x);
        }
        if gx < 0.0 {
            a = x;
        } else {
            b = x;
        }
        if b - a <= 1e-15 {
            return Ok(0.5 * (a + b));
        }
        let d = sigma * derivative.eval(x)?;
        let newton = x - gx / d;
        let next = if d > 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if (next - x).abs() <= 1e-15 {
            return Ok(next);
        }
        x = next;
    }
    if b - a <= 1e-13 {
        Ok(0.5 * (a + b))
    } else {
        Err(ShiftError::InverseFailed(target))
    }
}
