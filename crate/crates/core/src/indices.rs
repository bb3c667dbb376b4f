//! Boyd indices of the target space, and index estimates for
//! submultiplicative functions on `(0, ∞)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalError, Expr};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndexError {
    #[error("indices must satisfy 0 < alpha <= beta < 1, got ({alpha}, {beta})")]
    Range { alpha: f64, beta: f64 },
    #[error("Lebesgue exponent must satisfy 1 < p < inf, got {0}")]
    Exponent(f64),
    #[error("function must be positive, got {value} at x = {x}")]
    NonPositive { x: f64, value: f64 },
    #[error("sample range must satisfy 0 < x_min < 1 < x_max, got ({0}, {1})")]
    SampleRange(f64, f64),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Boyd indices `(α_X, β_X)`; `fundamental_type` asserts that the Zippin
/// indices coincide with them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceIndices {
    pub alpha: f64,
    pub beta: f64,
    pub fundamental_type: bool,
}

impl SpaceIndices {
    pub fn new(alpha: f64, beta: f64, fundamental_type: bool) -> Result<Self, IndexError> {
        if !(alpha > 0.0 && alpha <= beta && beta < 1.0) {
            return Err(IndexError::Range { alpha, beta });
        }
        Ok(SpaceIndices {
            alpha,
            beta,
            fundamental_type,
        })
    }

    /// `L^p`: both indices equal `1/p`.
    pub fn lebesgue(p: f64) -> Result<Self, IndexError> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(IndexError::Exponent(p));
        }
        SpaceIndices::new(1.0 / p, 1.0 / p, true)
    }

    /// Indices of the associate space: `α_X' = 1 - β_X`, `β_X' = 1 - α_X`.
    pub fn associate(&self) -> Self {
        SpaceIndices {
            alpha: 1.0 - self.beta,
            beta: 1.0 - self.alpha,
            fundamental_type: self.fundamental_type,
        }
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if !self.fundamental_type {
            w.push(
                "space is not of fundamental type; the one-sided criteria are only established \
                 when the Zippin and Boyd indices coincide"
                    .to_string(),
            );
        }
        w
    }

    /// `min{x^{-α}, x^{-β}}` for a dilation factor `x > 0`.
    pub fn dilation_min(&self, x: f64) -> f64 {
        x.powf(-self.alpha).min(x.powf(-self.beta))
    }

    /// `max{x^{-α}, x^{-β}}`.
    pub fn dilation_max(&self, x: f64) -> f64 {
        x.powf(-self.alpha).max(x.powf(-self.beta))
    }
}

pub fn space_indices(alpha: f64, beta: f64, fundamental_type: bool) -> Result<SpaceIndices, IndexError> {
    SpaceIndices::new(alpha, beta, fundamental_type)
}

pub fn associate_indices(x: &SpaceIndices) -> SpaceIndices {
    x.associate()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexEstimate {
    pub lower: f64,
    pub upper: f64,
    /// Grid points where the sup / inf were attained.
    pub lower_at: f64,
    pub upper_at: f64,
    pub pairs_checked: usize,
    pub submultiplicativity_violations: usize,
    pub warnings: Vec<String>,
}

const PER_DECADE: f64 = 512.0;
const PAIRS: usize = 256;

/// Estimates `lower = sup_{x<1} log f(x)/log x` and
/// `upper = inf_{x>1} log f(x)/log x` on a geometric grid over
/// `[x_min, x_max]`. This is an estimate at finite range, never an input
/// to invertibility verdicts.
pub fn submultiplicative_indices<F>(f: F, x_min: f64, x_max: f64) -> Result<IndexEstimate, IndexError>
where
    F: Fn(f64) -> Result<f64, IndexError>,
{
    if !(x_min > 0.0 && x_min < 1.0 && x_max > 1.0 && x_max.is_finite()) {
        return Err(IndexError::SampleRange(x_min, x_max));
    }
    let pos = |x: f64| -> Result<f64, IndexError> {
        let v = f(x)?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(IndexError::NonPositive { x, value: v })
        }
    };
    let k_lo = (x_min.log10() * PER_DECADE).ceil() as i64;
    let k_hi = (x_max.log10() * PER_DECADE).floor() as i64;
    let (mut lower, mut lower_at) = (f64::NEG_INFINITY, f64::NAN);
    let (mut upper, mut upper_at) = (f64::INFINITY, f64::NAN);
    for k in k_lo..=k_hi {
        if k == 0 {
            continue;
        }
        let x = 10f64.powf(k as f64 / PER_DECADE);
        let r = pos(x)?.ln() / x.ln();
        if k < 0 && r > lower {
            lower = r;
            lower_at = x;
        }
        if k > 0 && r < upper {
            upper = r;
            upper_at = x;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let (lmin, lmax) = (x_min.ln(), x_max.ln());
    let mut violations = 0;
    for _ in 0..PAIRS {
        let a = rng.gen_range(lmin..lmax);
        let b = rng.gen_range((lmin - a).max(lmin)..(lmax - a).min(lmax));
        let (x, y) = (a.exp(), b.exp());
        if pos(x * y)? > pos(x)? * pos(y)? * (1.0 + 1e-12) {
            violations += 1;
        }
    }

    let mut warnings = Vec::new();
    if violations > 0 {
        warnings.push(format!(
            "submultiplicativity failed on {violations} of {PAIRS} sampled pairs"
        ));
    }
    if lower > upper {
        warnings.push(format!("lower estimate {lower} exceeds upper estimate {upper}"));
    }
    Ok(IndexEstimate {
        lower,
        upper,
        lower_at,
        upper_at,
        pairs_checked: PAIRS,
        submultiplicativity_violations: violations,
        warnings,
    })
}

/// [`submultiplicative_indices`] for an expression in `t` standing for `x`.
pub fn submultiplicative_indices_expr(e: &Expr, x_min: f64, x_max: f64) -> Result<IndexEstimate, IndexError> {
    submultiplicative_indices(|x| Ok(e.eval(x)?), x_min, x_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn constructors() {
        assert_eq!(SpaceIndices::lebesgue(2.0).unwrap(), SpaceIndices::new(0.5, 0.5, true).unwrap());
        assert!(space_indices(1.0 / 3.0, 0.5, true).is_ok());
        assert!(space_indices(0.0, 0.5, true).is_err());
        assert!(space_indices(0.6, 0.5, true).is_err());
        assert!(space_indices(0.5, 1.0, true).is_err());
        assert!(SpaceIndices::lebesgue(1.0).is_err());
        assert!(SpaceIndices::new(0.3, 0.4, false).unwrap().warnings().len() == 1);
    }

    #[test]
    fn associate_examples() {
        let x = SpaceIndices::new(1.0 / 3.0, 0.5, true).unwrap();
        let y = associate_indices(&x);
        assert!((y.alpha - 0.5).abs() < 1e-15 && (y.beta - 2.0 / 3.0).abs() < 1e-15);
        let l2 = SpaceIndices::lebesgue(2.0).unwrap();
        assert_eq!(l2.associate(), l2);
        assert!((y.associate().alpha - x.alpha).abs() < 1e-15);
    }

    #[test]
    fn estimates_for_known_functions() {
        let est = |s: &str| submultiplicative_indices_expr(&parse(s).unwrap(), 1e-6, 1e6).unwrap();
        let p = est("t^0.37");
        assert!((p.lower - 0.37).abs() < 1e-12 && (p.upper - 0.37).abs() < 1e-12);
        assert_eq!(p.submultiplicativity_violations, 0);
        // max(x^{1/3}, x^{1/2}) written with abs
        let m = est("(t^(1/3) + t^0.5 + abs(t^(1/3) - t^0.5))/2");
        assert!((m.lower - 1.0 / 3.0).abs() < 1e-9, "{m:?}");
        assert!((m.upper - 0.5).abs() < 1e-9);
        let one = est("(1 + t + abs(1 - t))/2");
        assert!(one.lower.abs() < 1e-9 && (one.upper - 1.0).abs() < 1e-9);
    }

    #[test]
    fn nonpositive_function_is_rejected() {
        let r = submultiplicative_indices_expr(&parse("t - 1").unwrap(), 1e-3, 1e3);
        assert!(matches!(r, Err(IndexError::NonPositive { .. })));
    }
}
