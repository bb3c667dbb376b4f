use super::{AnalysisError, OperatorSpec, Truth};
use crate::coeff::CircleFn;

/// Adjoint `A* = aI - b*W*` on the dual space, where
/// `W*g = g∘α₋₁` and `b* = (b∘α₋₁)·|α₋₁'|`.
///
/// The periodic structure of `α₋₁` is that of `α` with every γ arc
/// traversed the other way, so it is derived rather than recomputed.
pub fn adjoint_spec(op: &OperatorSpec) -> Result<OperatorSpec, AnalysisError> {
    let inv = op.shift.inverse();
    let b_star = CircleFn::Product(vec![
        op.b.clone().compose(&op.shift, -1),
        CircleFn::AbsDerivative {
            shift: op.shift.clone(),
            k: -1,
        },
    ]);
    OperatorSpec::with_structure(
        op.a.clone(),
        b_star,
        inv,
        op.structure.reversed(),
        op.space.associate(),
        op.tol,
    )
}

#[derive(Clone, Debug)]
pub struct Reduction {
    /// `A_m = a_m I - (b_m∘α_{m-1}) W^m`.
    pub op_m: OperatorSpec,
    /// Whether the reduction is faithful: on the Γ₄ arcs no intermediate
    /// `a_i` (`0 < i < m`) vanishes at a point where `b∘α_{i-1}` does.
    pub cond: Truth,
}

/// Passes from `α` with `m > 1` to the fixed-point shift `α_m`. The
/// periodic structure carries over unchanged except that every point of Λ
/// is now fixed. For `m = 1` this is the identity with `cond` true.
pub fn reduce_to_fixed(op: &OperatorSpec) -> Result<Reduction, AnalysisError> {
    let m = op.m();
    if m == 1 {
        return Ok(Reduction {
            op_m: op.clone(),
            cond: Truth::True,
        });
    }
    let partition = super::build_partition(op)?;
    let gamma4: Vec<usize> = partition
        .gamma
        .iter()
        .filter(|g| g.region == super::Region::Gamma4)
        .map(|g| g.gamma_index)
        .collect();
    let op_m = OperatorSpec::with_structure(
        op.a_m(),
        op.b_m().compose(&op.shift, m as i64 - 1),
        op.shift.iterate(m as i64),
        op.structure.as_fixed(),
        op.space,
        op.tol,
    )?;
    let mut cond = Truth::True;
    for &gi in &gamma4 {
        let arc = op.structure.gamma[gi].arc;
        for i in 1..m {
            let ai = op.a.clone().orbit_product(&op.shift, i);
            let zs = super::arc_zeros(op, &arc, |t| ai.eval(t))?;
            for z in &zs.points {
                let bv = op.b.eval(op.shift.apply(z.t, i as i64 - 1)?)?;
                if bv.abs() <= 1e-9 {
                    cond = Truth::False;
                }
            }
            if !zs.intervals.is_empty() {
                cond = cond.and(Truth::Unknown);
            }
        }
    }
    Ok(Reduction { op_m, cond })
}
