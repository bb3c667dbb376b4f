//! The decision core: η functions, the Γ partition, σ_A, the orbit
//! conditions R/L, and one- and two-sided invertibility verdicts for
//! `A = aI - bW`.

mod decide;
mod eta;
mod orbits;
mod partition;
mod transform;

use serde::Serialize;
use thiserror::Error;

use crate::circle::{
    compute_periodic_structure, CircleArc, PeriodicStructure, Shift, ShiftError, StructureError,
    StructureOptions, POINT_TOL,
};
use crate::coeff::CircleFn;
use crate::expr::{Expr, ZeroScan, ZeroSet};
use crate::indices::SpaceIndices;

pub use decide::{decide, Conditions, InvertibilityReport, SigmaExtrema, Verdict, Witness};
pub use eta::{eta_limits, eta_limits_by_iteration, eta_profile, eta_values, EtaLimits, EtaProfile};
pub use orbits::{check_l, check_r, OrbitCheck, OrbitPair};
pub use partition::{build_partition, classify_limits, sigma_a, GammaPartition, Region};
pub use transform::{adjoint_spec, reduce_to_fixed, Reduction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("coefficient `{name}` is not 1-periodic: |f(0) - f(1)| / (1 + |f(0)|) = {defect:e}")]
    NotPeriodic { name: &'static str, defect: f64 },
    #[error("classification degenerate at t = {0}")]
    Degenerate(f64),
}

impl From<crate::expr::EvalError> for AnalysisError {
    fn from(e: crate::expr::EvalError) -> Self {
        AnalysisError::Shift(e.into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// |f| at or below this is a zero.
    pub zero: f64,
    /// Half-width of the band in which η signs count as undetermined.
    pub band: f64,
    /// Band for detecting zero intervals.
    pub flat: f64,
    /// Grid cells for zero scans.
    pub cells: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            zero: 1e-12,
            band: 1e-10,
            flat: 1e-11,
            cells: 4096,
        }
    }
}

impl Tolerances {
    pub fn structure_options(&self) -> StructureOptions {
        StructureOptions {
            cells: self.cells,
            zero_tol: self.zero,
            flat_tol: self.flat,
            ..Default::default()
        }
    }
}

/// Full description of `A = aI - bW` on `X(Γ)`.
#[derive(Clone, Debug)]
pub struct OperatorSpec {
    pub a: CircleFn,
    pub b: CircleFn,
    pub shift: Shift,
    pub structure: PeriodicStructure,
    pub space: SpaceIndices,
    pub tol: Tolerances,
}

/// Relative tolerance of the numerical periodicity check on coefficients.
pub const PERIODICITY_TOL: f64 = 1e-9;

impl OperatorSpec {
    /// Builds the operator and detects the periodic structure of the shift.
    pub fn new(a: Expr, b: Expr, shift: Shift, space: SpaceIndices, tol: Tolerances) -> Result<Self, AnalysisError> {
        let structure = compute_periodic_structure(&shift, &tol.structure_options())?;
        OperatorSpec::with_structure(a.into(), b.into(), shift, structure, space, tol)
    }

    pub fn with_structure(
        a: CircleFn,
        b: CircleFn,
        shift: Shift,
        structure: PeriodicStructure,
        space: SpaceIndices,
        tol: Tolerances,
    ) -> Result<Self, AnalysisError> {
        for (name, f) in [("a", &a), ("b", &b)] {
            let defect = f.periodicity_defect()?;
            if defect > PERIODICITY_TOL {
                return Err(AnalysisError::NotPeriodic { name, defect });
            }
        }
        Ok(OperatorSpec {
            a,
            b,
            shift,
            structure,
            space,
            tol,
        })
    }

    pub fn m(&self) -> usize {
        self.structure.m
    }

    /// `a_m = ∏_{i<m} a∘α_i`.
    pub fn a_m(&self) -> CircleFn {
        self.a.clone().orbit_product(&self.shift, self.m())
    }

    pub fn b_m(&self) -> CircleFn {
        self.b.clone().orbit_product(&self.shift, self.m())
    }

    /// `|α_m'|`.
    pub fn dilation(&self) -> CircleFn {
        CircleFn::AbsDerivative {
            shift: self.shift.clone(),
            k: self.m() as i64,
        }
    }

    pub(crate) fn scan(&self, arc_len: f64, periodic: bool) -> ZeroScan {
        ZeroScan {
            cells: self.tol.cells,
            x_tol: (1e-13 / arc_len.max(1e-300)).min(1e-6),
            f_tol: self.tol.zero,
            flat_tol: self.tol.flat,
            periodic,
        }
    }
}

/// Three-valued truth used while assembling verdicts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    pub fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }

    pub fn from_bool(b: bool) -> Truth {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }
}

/// Zeros of `f` on an arc, reported in circle coordinates. Zeros at the
/// endpoints of an open arc are dropped (they belong to the boundary).
pub(crate) fn arc_zeros<F>(op: &OperatorSpec, arc: &CircleArc, f: F) -> Result<ZeroSet, ShiftError>
where
    F: Fn(f64) -> Result<f64, ShiftError>,
{
    let full = arc.len() >= 1.0;
    let scan = op.scan(arc.len(), full);
    let zs = scan.scan(|s| f(arc.point_at(s)), 0.0, 1.0)?;
    let keep = |s: f64| arc.is_closed() || full || (s * arc.len() > POINT_TOL && (1.0 - s) * arc.len() > POINT_TOL);
    let mut out = ZeroSet::default();
    for z in zs.points {
        if keep(z.t) {
            out.points.push(crate::expr::Zero {
                t: arc.point_at(z.t),
                kind: z.kind,
            });
        }
    }
    for iv in zs.intervals {
        out.intervals.push(crate::expr::ZeroInterval {
            start: if iv.full { arc.start() } else { arc.point_at(iv.start) },
            end: if iv.full { arc.end() } else { arc.point_at(iv.end) },
            full: iv.full && full,
        });
    }
    Ok(out)
}
