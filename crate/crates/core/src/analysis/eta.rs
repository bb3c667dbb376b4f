use serde::Serialize;

use super::{AnalysisError, OperatorSpec};
use crate::circle::Location;

/// `(η₀(t), η₁(t))`:
/// `η₀ = |a_m| - |b_m|·min{|α_m'|^{-α}, |α_m'|^{-β}}`, `η₁` with max.
/// So `η₁ <= η₀` everywhere.
pub fn eta_values(op: &OperatorSpec, t: f64) -> Result<(f64, f64), AnalysisError> {
    let am = op.a_m().eval(t)?.abs();
    let bm = op.b_m().eval(t)?.abs();
    let x = op.dilation().eval(t)?;
    Ok((am - bm * op.space.dilation_min(x), am - bm * op.space.dilation_max(x)))
}

/// Orbit limits of η along `α_{mn}(t)`: `-` for `n → -∞`, `+` for `n → +∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EtaLimits {
    pub eta0_minus: f64,
    pub eta0_plus: f64,
    pub eta1_minus: f64,
    pub eta1_plus: f64,
}

impl EtaLimits {
    pub fn at_point(eta0: f64, eta1: f64) -> EtaLimits {
        EtaLimits {
            eta0_minus: eta0,
            eta0_plus: eta0,
            eta1_minus: eta1,
            eta1_plus: eta1,
        }
    }

    pub fn max_abs_diff(&self, other: &EtaLimits) -> f64 {
        [
            self.eta0_minus - other.eta0_minus,
            self.eta0_plus - other.eta0_plus,
            self.eta1_minus - other.eta1_minus,
            self.eta1_plus - other.eta1_plus,
        ]
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()))
    }
}

/// Limits by endpoint lookup: η is continuous and orbits in a γ arc
/// converge to its endpoints, so the limits are η at `τ₋` and `τ₊`.
pub fn eta_limits(op: &OperatorSpec, t: f64) -> Result<EtaLimits, AnalysisError> {
    let (rep, att) = op.structure.orbit_limit_endpoints(t)?;
    let (e0m, e1m) = eta_values(op, rep)?;
    let (e0p, e1p) = if att == rep { (e0m, e1m) } else { eta_values(op, att)? };
    Ok(EtaLimits {
        eta0_minus: e0m,
        eta0_plus: e0p,
        eta1_minus: e1m,
        eta1_plus: e1p,
    })
}

/// Cross-check of [`eta_limits`]: η at `α_{±m·steps}(t)`.
pub fn eta_limits_by_iteration(op: &OperatorSpec, t: f64, steps: i64) -> Result<EtaLimits, AnalysisError> {
    let k = op.m() as i64 * steps;
    let fwd = op.shift.apply(t, k)?;
    let back = op.shift.apply(t, -k)?;
    let (e0p, e1p) = eta_values(op, fwd)?;
    let (e0m, e1m) = eta_values(op, back)?;
    Ok(EtaLimits {
        eta0_minus: e0m,
        eta0_plus: e0p,
        eta1_minus: e1m,
        eta1_plus: e1p,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PointEta {
    pub t: f64,
    pub eta0: f64,
    pub eta1: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArcEta {
    pub gamma_index: usize,
    pub repelling: f64,
    pub attracting: f64,
    pub limits: EtaLimits,
}

/// η at every boundary point and the limit table for every γ arc.
#[derive(Clone, Debug, Serialize)]
pub struct EtaProfile {
    pub points: Vec<PointEta>,
    pub arcs: Vec<ArcEta>,
}

impl EtaProfile {
    pub fn limits_at(&self, op: &OperatorSpec, t: f64) -> Result<EtaLimits, AnalysisError> {
        match op.structure.locate(t)? {
            Location::Gamma(i) => Ok(self.arcs[i].limits),
            _ => {
                let (e0, e1) = eta_values(op, t)?;
                Ok(EtaLimits::at_point(e0, e1))
            }
        }
    }
}

pub fn eta_profile(op: &OperatorSpec) -> Result<EtaProfile, AnalysisError> {
    let mut points = Vec::new();
    for &t in op.structure.y.iter().chain(&op.structure.y_prime) {
        let (eta0, eta1) = eta_values(op, t)?;
        points.push(PointEta { t, eta0, eta1 });
    }
    let mut arcs = Vec::new();
    for (i, g) in op.structure.gamma.iter().enumerate() {
        arcs.push(ArcEta {
            gamma_index: i,
            repelling: g.repelling,
            attracting: g.attracting,
            limits: eta_limits(op, g.arc.midpoint())?,
        });
    }
    Ok(EtaProfile { points, arcs })
}
