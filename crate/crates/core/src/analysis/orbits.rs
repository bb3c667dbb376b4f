//! Conditions R and L on the control regions Γ₄ / Γ₅.
//!
//! R asks, for every orbit `{α_k(t)}`, for a switch index `k₀` with
//! `a(α_k t) ≠ 0` for `k < k₀` and `b(α_k t) ≠ 0` for `k >= k₀`. With
//! `K_a`, `K_b` the orbit indices where `a`, `b` vanish, such `k₀` exists iff
//! `max K_b < min K_a`. So R fails exactly when some zero `p` of `a` and
//! some zero `q` of `b` satisfy `q = α_n(p)` with `n >= 0` (a shared zero is
//! already a failure). L swaps the roles and relaxes one inequality
//! (`a ≠ 0` for `k > k₀`, `b ≠ 0` for `k < k₀`): it fails iff a zero `p` of
//! `b` reaches a zero `q` of `a` with `n >= 1`.
//!
//! On a γ arc `α_m` moves points monotonically from the repelling to the
//! attracting end, so the forward orbit of `p` can be followed in the
//! "progress" coordinate of the arc until it passes `q`.

use serde::Serialize;

use super::{arc_zeros, AnalysisError, OperatorSpec, Truth};
use crate::circle::{circle_dist, Location, ORBIT_MATCH_TOL};
use crate::coeff::CircleFn;
use crate::expr::ZeroKind;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrbitPair {
    pub p: f64,
    pub q: f64,
    pub n: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitCheck {
    pub holds: Truth,
    pub witness: Option<OrbitPair>,
    /// Tangential zeros of `a` or `b` on the region; they make the check
    /// undecidable.
    pub suspect: Vec<f64>,
    pub zeros_a: Vec<f64>,
    pub zeros_b: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
struct Piece {
    gamma: usize,
    /// Progress coordinates (repelling = 0, attracting = 1).
    lo: f64,
    hi: f64,
    /// Set when the piece is a periodic endpoint of the arc.
    endpoint: Option<f64>,
}

#[derive(Clone, Copy, PartialEq)]
enum Cond {
    R,
    L,
}

/// Condition R on the given γ arcs (normally the Γ₄ arcs).
pub fn check_r(op: &OperatorSpec, arcs: &[usize]) -> Result<OrbitCheck, AnalysisError> {
    check(op, arcs, Cond::R)
}

/// Condition L on the given γ arcs (normally the Γ₅ arcs).
pub fn check_l(op: &OperatorSpec, arcs: &[usize]) -> Result<OrbitCheck, AnalysisError> {
    check(op, arcs, Cond::L)
}

fn zero_pieces(
    op: &OperatorSpec,
    f: &CircleFn,
    arcs: &[usize],
    suspect: &mut Vec<f64>,
    located: &mut Vec<f64>,
) -> Result<Vec<Piece>, AnalysisError> {
    let mut out = Vec::new();
    for &gi in arcs {
        let g = op.structure.gamma[gi];
        let zs = arc_zeros(op, &g.arc, |t| f.eval(t))?;
        for z in &zs.points {
            if z.kind == ZeroKind::Tangential {
                suspect.push(z.t);
            }
            located.push(z.t);
            let p = g.progress(z.t);
            out.push(Piece {
                gamma: gi,
                lo: p,
                hi: p,
                endpoint: None,
            });
        }
        for iv in &zs.intervals {
            located.push(iv.start);
            let (p0, p1) = if iv.full {
                (0.0, 1.0)
            } else {
                (g.progress(iv.start), g.progress(iv.end))
            };
            out.push(Piece {
                gamma: gi,
                lo: p0.min(p1),
                hi: p0.max(p1),
                endpoint: None,
            });
        }
        // closure: the periodic endpoints
        for e in [g.repelling, g.attracting] {
            if f.eval(e)?.abs() <= op.tol.zero && !out.iter().any(|q: &Piece| q.endpoint == Some(e)) {
                located.push(e);
                out.push(Piece {
                    gamma: gi,
                    lo: 0.0,
                    hi: 0.0,
                    endpoint: Some(e),
                });
            }
        }
    }
    Ok(out)
}

fn check(op: &OperatorSpec, arcs: &[usize], cond: Cond) -> Result<OrbitCheck, AnalysisError> {
    let mut suspect = Vec::new();
    let (mut zeros_a, mut zeros_b) = (Vec::new(), Vec::new());
    let za = zero_pieces(op, &op.a, arcs, &mut suspect, &mut zeros_a)?;
    let zb = zero_pieces(op, &op.b, arcs, &mut suspect, &mut zeros_b)?;
    let (from, to) = match cond {
        Cond::R => (&za, &zb),
        Cond::L => (&zb, &za),
    };
    let min_n: u64 = if cond == Cond::L { 1 } else { 0 };
    let m = op.m();

    // image of each arc under α_n, n < m
    let mut image = std::collections::HashMap::new();
    for &gi in arcs {
        let mid = op.structure.gamma[gi].arc.midpoint();
        for n in 0..m {
            if let Location::Gamma(j) = op.structure.locate(op.shift.apply(mid, n as i64)?)? {
                image.insert((gi, j), n);
            }
        }
    }

    let mut witness: Option<OrbitPair> = None;
    let mut consider = |pair: OrbitPair| {
        if witness.map_or(true, |w| (pair.p, pair.q, pair.n) < (w.p, w.q, w.n)) {
            witness = Some(pair);
        }
    };

    for p in from {
        for q in to {
            let gp = op.structure.gamma[p.gamma];
            let gq = op.structure.gamma[q.gamma];
            match (p.endpoint, q.endpoint) {
                (Some(tp), Some(tq)) => {
                    let mut x = tp;
                    for n in 0..=(m as u64) {
                        if n >= min_n && circle_dist(x, tq) <= ORBIT_MATCH_TOL {
                            consider(OrbitPair { p: tp, q: tq, n });
                            break;
                        }
                        x = op.shift.apply(x, 1)?;
                    }
                }
                // periodic orbits and orbits inside an arc never meet
                (Some(_), None) | (None, Some(_)) => {}
                (None, None) => {
                    let Some(&n0) = image.get(&(p.gamma, q.gamma)) else {
                        continue;
                    };
                    if let Some(n) = orbit_hit(op, p, q, n0 as u64, min_n)? {
                        consider(OrbitPair {
                            p: gp.at_progress(p.lo),
                            q: gq.at_progress(q.lo),
                            n,
                        });
                    }
                }
            }
        }
    }

    suspect.sort_by(f64::total_cmp);
    let holds = if witness.is_some() {
        Truth::False
    } else if !suspect.is_empty() {
        Truth::Unknown
    } else {
        Truth::True
    };
    Ok(OrbitCheck {
        holds,
        witness,
        suspect,
        zeros_a,
        zeros_b,
    })
}

/// Smallest `n >= min_n`, `n ≡ n0 (mod m)`, with `α_n(P) ∩ Q ≠ ∅`.
fn orbit_hit(op: &OperatorSpec, p: &Piece, q: &Piece, n0: u64, min_n: u64) -> Result<Option<u64>, AnalysisError> {
    let m = op.m() as u64;
    let gp = op.structure.gamma[p.gamma];
    let gq = op.structure.gamma[q.gamma];
    let tol = ORBIT_MATCH_TOL / gq.arc.len();
    let sm = op.shift.iterate(m as i64);
    let mut lo = op.shift.apply(gp.at_progress(p.lo), n0 as i64)?;
    let mut hi = op.shift.apply(gp.at_progress(p.hi), n0 as i64)?;
    let mut n = n0;
    let guard = crate::circle::ORBIT_GUARD as u64;
    let mut last = f64::NEG_INFINITY;
    while n <= guard {
        let (a, b) = {
            let (x, y) = (gq.progress(lo), gq.progress(hi));
            (x.min(y), x.max(y))
        };
        if n >= min_n && a <= q.hi + tol && b >= q.lo - tol {
            return Ok(Some(n));
        }
        if a > q.hi + tol {
            return Ok(None);
        }
        // converged onto the attracting end without reaching q
        if a - last <= 1e-15 && n >= min_n {
            return Ok(None);
        }
        last = a;
        lo = sm.apply(lo, 1)?;
        hi = sm.apply(hi, 1)?;
        n += m;
    }
    Ok(None)
}
