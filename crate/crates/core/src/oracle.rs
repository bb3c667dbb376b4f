//! Numerical corroboration: `aI - bW` collocated on the grid `t_i = i/N`,
//! with `W` replaced by 4-point periodic Lagrange interpolation at `α(t_i)`.
//!
//! Everything here is evidence, not proof. The grid matrix of a composition
//! operator has spectral radius at most about 1 whatever the shift does,
//! so operator-level quantities (radii, one-sidedness) only show up as
//! transients or trends across grid sizes.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{eta_values, AnalysisError, OperatorSpec};
use crate::circle::{wrap, Shift, ShiftError};
use crate::coeff::CircleFn;
use crate::expr::Expr;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("grid size must be a power of two >= 64, got {0}")]
    GridSize(usize),
    #[error("norm exponent must satisfy 1 < p < inf, got {0}")]
    Exponent(f64),
    #[error("grid ladder must be ascending with at least 3 rungs, got {0:?}")]
    Ladder(Vec<usize>),
    #[error("at least {min} iterations are required, got {got}")]
    Iterations { min: usize, got: usize },
    #[error("Neumann form not available: neither eta1 > 0 nor eta0 < 0 holds on the whole circle")]
    NeumannUnavailable,
}

impl From<crate::expr::EvalError> for OracleError {
    fn from(e: crate::expr::EvalError) -> Self {
        OracleError::Shift(e.into())
    }
}

/// Sparse interpolation matrix: row `i` evaluates the cubic through the
/// four nodes around `x_i`.
#[derive(Clone, Debug)]
pub struct Interpolation {
    rows: Vec<[(usize, f64); 4]>,
}

impl Interpolation {
    /// Row `i` interpolates at `points[i]` on the periodic grid of size `n`.
    pub fn at(points: &[f64], n: usize) -> Interpolation {
        let rows = points
            .iter()
            .map(|&x| {
                let y = wrap(x) * n as f64;
                let mut j = y.floor();
                let mut u = y - j;
                if u > 1.0 - 1e-12 {
                    j += 1.0;
                    u = 0.0;
                }
                let j = j as i64;
                let w = [
                    -u * (u - 1.0) * (u - 2.0) / 6.0,
                    (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0,
                    -(u + 1.0) * u * (u - 2.0) / 2.0,
                    (u + 1.0) * u * (u - 1.0) / 6.0,
                ];
                let idx = |o: i64| (j + o).rem_euclid(n as i64) as usize;
                [(idx(-1), w[0]), (idx(0), w[1]), (idx(1), w[2]), (idx(2), w[3])]
            })
            .collect();
        Interpolation { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.rows.len(),
            self.rows.iter().map(|r| r.iter().map(|&(j, w)| w * v[j]).sum::<f64>()),
        )
    }

    pub fn apply_transpose(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, w) in r {
                out[j] += w * v[i];
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.rows.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, w) in r {
                m[(i, j)] += w;
            }
        }
        m
    }
}

/// `diag(a) - diag(b)·P` on `N` nodes, measured in the weighted discrete
/// `p`-norm `(Σ|v_i|^p / N)^{1/p}`.
#[derive(Clone, Debug)]
pub struct GridOperator {
    pub n: usize,
    pub p: f64,
    pub nodes: Vec<f64>,
    pub a: DVector<f64>,
    pub b: DVector<f64>,
    pub comp: Interpolation,
}

impl GridOperator {
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        self.a.component_mul(v) - self.b.component_mul(&self.comp.apply(v))
    }

    pub fn apply_transpose(&self, v: &DVector<f64>) -> DVector<f64> {
        self.a.component_mul(v) - self.comp.apply_transpose(&self.b.component_mul(v))
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let mut m = -DMatrix::from_diagonal(&self.b) * self.comp.to_dense();
        for i in 0..self.n {
            m[(i, i)] += self.a[i];
        }
        m
    }

    pub fn norm(&self, v: &DVector<f64>) -> f64 {
        p_norm(v, self.p)
    }

    pub fn sample(&self, f: &Expr) -> Result<DVector<f64>, OracleError> {
        let vals = self.nodes.iter().map(|&t| f.eval(t)).collect::<Result<Vec<_>, _>>()?;
        Ok(DVector::from_vec(vals))
    }
}

pub fn p_norm(v: &DVector<f64>, p: f64) -> f64 {
    let n = v.len() as f64;
    (v.iter().map(|x| x.abs().powf(p)).sum::<f64>() / n).powf(1.0 / p)
}

fn check_grid(n: usize, p: f64) -> Result<(), OracleError> {
    if n < 64 || !n.is_power_of_two() {
        return Err(OracleError::GridSize(n));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(OracleError::Exponent(p));
    }
    Ok(())
}

fn nodes(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / n as f64).collect()
}

fn sample_fn(f: &CircleFn, nodes: &[f64]) -> Result<DVector<f64>, OracleError> {
    let v = nodes.iter().map(|&t| f.eval(t)).collect::<Result<Vec<_>, _>>()?;
    Ok(DVector::from_vec(v))
}

/// Interpolation at `α_k(t_i)`.
pub fn composition(shift: &Shift, n: usize, k: i64) -> Result<Interpolation, OracleError> {
    let pts = nodes(n)
        .into_iter()
        .map(|t| shift.apply(t, k))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Interpolation::at(&pts, n))
}

pub fn discretize(op: &OperatorSpec, n: usize, p: f64) -> Result<GridOperator, OracleError> {
    check_grid(n, p)?;
    let nodes = nodes(n);
    Ok(GridOperator {
        n,
        p,
        a: sample_fn(&op.a, &nodes)?,
        b: sample_fn(&op.b, &nodes)?,
        comp: composition(&op.shift, n, 1)?,
        nodes,
    })
}

/// The weighted shift `gW` as a grid operator (`a = 0`, `b = -g`).
pub fn discretize_weighted_shift(g: &Expr, shift: &Shift, n: usize, p: f64) -> Result<GridOperator, OracleError> {
    check_grid(n, p)?;
    let nodes = nodes(n);
    let gv = nodes.iter().map(|&t| g.eval(t).map(|v| -v)).collect::<Result<Vec<_>, _>>()?;
    Ok(GridOperator {
        n,
        p,
        a: DVector::zeros(n),
        b: DVector::from_vec(gv),
        comp: composition(shift, n, 1)?,
        nodes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RadiusEstimate {
    /// `‖M^n v‖_p^{1/n}` for a random unit vector `v`, `n = iters`.
    pub value: f64,
    /// Max minus min of the running estimate over the last 10 steps.
    pub spread: f64,
    pub iters: usize,
}

/// Gelfand estimate of the spectral radius by normalized power iteration
/// on a seeded random vector.
pub fn estimate_radius_numeric(g: &GridOperator, iters: usize, seed: u64) -> Result<RadiusEstimate, OracleError> {
    if iters < 50 {
        return Err(OracleError::Iterations { min: 50, got: iters });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = DVector::from_fn(g.n, |_, _| rng.gen_range(-1.0..1.0));
    v /= g.norm(&v);
    let mut log_sum = 0.0;
    let mut tail = Vec::new();
    for k in 1..=iters {
        v = g.apply(&v);
        let r = g.norm(&v);
        if r == 0.0 {
            return Ok(RadiusEstimate {
                value: 0.0,
                spread: 0.0,
                iters,
            });
        }
        v /= r;
        log_sum += r.ln();
        if k + 10 > iters {
            tail.push((log_sum / k as f64).exp());
        }
    }
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(RadiusEstimate {
        value: (log_sum / iters as f64).exp(),
        spread: hi - lo,
        iters,
    })
}

/// `‖M^n‖_2^{1/n}` for several `n`, by power iteration on `(M^n)ᵀM^n`.
/// Unlike a single random vector this sees the transient growth of the
/// grid operator before it saturates at the grid's own spectral radius.
pub fn matrix_power_norms(g: &GridOperator, powers: &[usize]) -> Vec<(usize, f64)> {
    powers
        .par_iter()
        .map(|&n| {
            let n = n.max(1);
            let mut v = DVector::from_element(g.n, 1.0);
            // a fixed non-smooth perturbation avoids symmetric stalls
            for i in 0..g.n {
                v[i] += ((i * 7919) % 13) as f64 / 13.0;
            }
            v /= v.norm();
            let mut sigma = 0.0;
            for _ in 0..60 {
                let mut w = v.clone();
                for _ in 0..n {
                    w = g.apply(&w);
                }
                let nw = w.norm();
                if nw == 0.0 {
                    sigma = 0.0;
                    break;
                }
                for _ in 0..n {
                    w = g.apply_transpose(&w);
                }
                sigma = nw;
                let nt = w.norm();
                if nt == 0.0 {
                    break;
                }
                v = w / nt;
            }
            (n, sigma.powf(1.0 / n as f64))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    /// Last/first ratio within `[0.5, 2]`.
    Stable,
    /// Strictly decreasing, by at least a factor 2 overall.
    Decaying,
    /// Numerically singular on every rung.
    Singular,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct Rung {
    pub n: usize,
    /// `s_min(A_N)`.
    pub s_min: f64,
    /// `s_min(A_Nᵀ)`. The grid matrix is square, so this is always `s_min`;
    /// one-sidedness shows up in the residuals instead.
    pub s_min_adjoint: f64,
    /// `s_min(I - diag(a/b)·Q)` with `Q` interpolating at `α₋₁(t_i)`;
    /// present when `b` does not vanish on the grid.
    pub s_min_factored: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvidenceRecord {
    pub p: f64,
    pub rungs: Vec<Rung>,
    pub direct: Trend,
    pub factored: Option<Trend>,
    /// `Stable` if some route is stable; `Decaying` if none is and the
    /// direct route decays or is singular.
    pub overall: Trend,
    /// Relative least-squares residuals of seeded random right-hand sides
    /// for `A_N` and `A_Nᵀ` on the first rung, after discarding singular
    /// values below `1e-8·s_max`.
    pub residual_right: f64,
    pub residual_left: f64,
    pub label: &'static str,
}

impl EvidenceRecord {
    /// Whether the trend is compatible with a verdict name
    /// (`two_sided` ⇒ stable, `neither` ⇒ decaying; others are unconstrained).
    pub fn consistent_with(&self, verdict: crate::analysis::Verdict) -> bool {
        use crate::analysis::Verdict::*;
        match verdict {
            TwoSided => self.overall == Trend::Stable,
            Neither => self.overall == Trend::Decaying,
            RightOnly | LeftOnly | Undecidable => true,
        }
    }
}

const SINGULAR_REL: f64 = 1e-12;

fn trend(values: &[f64], scales: &[f64]) -> Trend {
    if values.iter().zip(scales).all(|(v, s)| *v <= SINGULAR_REL * s) {
        return Trend::Singular;
    }
    let first = values[0];
    let last = *values.last().unwrap();
    if first > 0.0 && (0.5..=2.0).contains(&(last / first)) {
        return Trend::Stable;
    }
    if values.windows(2).all(|w| w[1] < w[0]) && last * 2.0 <= first {
        return Trend::Decaying;
    }
    Trend::Inconclusive
}

fn s_extremes(m: &DMatrix<f64>) -> (f64, f64) {
    let sv = m.singular_values();
    let hi = sv.iter().copied().fold(0.0, f64::max);
    let lo = sv.iter().copied().fold(f64::INFINITY, f64::min);
    (lo, hi)
}

fn lstsq_residual(m: &DMatrix<f64>, y: &DVector<f64>) -> f64 {
    let svd = m.clone().svd(true, false);
    let u = svd.u.as_ref().expect("requested U");
    let s_max = svd.singular_values.max();
    let mut kept = 0.0;
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > 1e-8 * s_max {
            kept += u.column(k).dot(y).powi(2);
        }
    }
    ((y.norm_squared() - kept).max(0.0)).sqrt() / y.norm()
}

/// Smallest singular values along a grid ladder, by two routes: the direct
/// collocation matrix, and the `b`-factored form `A = b(diag(a/b) - W)` in
/// which `W⁻¹` is interpolated instead of `W`. Dominant-`b` operators are
/// only well conditioned in the second form.
pub fn invertibility_evidence(op: &OperatorSpec, ladder: &[usize], p: f64, seed: u64) -> Result<EvidenceRecord, OracleError> {
    if ladder.len() < 3 || ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(OracleError::Ladder(ladder.to_vec()));
    }
    for &n in ladder {
        check_grid(n, p)?;
    }
    let rungs: Vec<(Rung, f64, Option<f64>)> = ladder
        .par_iter()
        .map(|&n| -> Result<_, OracleError> {
            let g = discretize(op, n, p)?;
            let m = g.matrix();
            let (lo, hi) = s_extremes(&m);
            let b_min = g.b.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
            let (fac, fac_scale) = if b_min > 1e-6 {
                let q = composition(&op.shift, n, -1)?.to_dense();
                let ratio = g.a.component_div(&g.b);
                let f = DMatrix::identity(n, n) - DMatrix::from_diagonal(&ratio) * q;
                let (flo, fhi) = s_extremes(&f);
                (Some(flo), Some(fhi))
            } else {
                (None, None)
            };
            Ok((
                Rung {
                    n,
                    s_min: lo,
                    s_min_adjoint: lo,
                    s_min_factored: fac,
                },
                hi,
                fac_scale,
            ))
        })
        .collect::<Result<_, _>>()?;

    let direct_vals: Vec<f64> = rungs.iter().map(|r| r.0.s_min).collect();
    let direct_scales: Vec<f64> = rungs.iter().map(|r| r.1).collect();
    let direct = trend(&direct_vals, &direct_scales);
    let factored = if rungs.iter().all(|r| r.0.s_min_factored.is_some()) {
        let v: Vec<f64> = rungs.iter().map(|r| r.0.s_min_factored.unwrap()).collect();
        let s: Vec<f64> = rungs.iter().map(|r| r.2.unwrap()).collect();
        Some(trend(&v, &s))
    } else {
        None
    };
    let overall = if direct == Trend::Stable || factored == Some(Trend::Stable) {
        Trend::Stable
    } else if matches!(direct, Trend::Decaying | Trend::Singular) {
        Trend::Decaying
    } else {
        Trend::Inconclusive
    };

    let g0 = discretize(op, ladder[0], p)?;
    let m0 = g0.matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y = DVector::from_fn(g0.n, |_, _| rng.gen_range(-1.0..1.0));
    let residual_right = lstsq_residual(&m0, &y);
    let residual_left = lstsq_residual(&m0.transpose(), &y);

    Ok(EvidenceRecord {
        p,
        rungs: rungs.into_iter().map(|r| r.0).collect(),
        direct,
        factored,
        overall,
        residual_right,
        residual_left,
        label: "EVIDENCE (numerical heuristic, not a proof)",
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NeumannBranch {
    /// `η₁ > 0`: `A⁻¹ = Σ (a⁻¹bW)ⁿ a⁻¹`.
    DominantA,
    /// `η₀ < 0`: `A⁻¹ = -W⁻¹ Σ (b⁻¹aW⁻¹)ⁿ b⁻¹`.
    DominantB,
}

#[derive(Clone, Debug, Serialize)]
pub struct NeumannReport {
    pub branch: NeumannBranch,
    /// `‖A_N S_K f - f‖_p / ‖f‖_p` for `K = 1..=terms` terms.
    pub residuals: Vec<f64>,
    /// Residual of the factored equation the series actually inverts,
    /// `‖d·(wJ)^K (f/d)‖_p / ‖f‖_p` (`d, w, J = a, b/a, P` or `b, a/b, Q`).
    /// For the dominant-`b` branch `QP ≠ I` on the grid, so `residuals`
    /// levels off at the interpolation error while this keeps decaying.
    pub series_residuals: Vec<f64>,
    /// Geometric decay ratio of `series_residuals` over the second half of
    /// the terms.
    pub ratio: f64,
    /// Closed-form bound on the spectral radius of the iterated operator.
    pub radius_bound: f64,
}

impl NeumannReport {
    pub fn final_residual(&self) -> f64 {
        *self.residuals.last().unwrap_or(&f64::NAN)
    }
}

/// Applies the truncated Neumann inverse of `A` to `f` on the grid.
pub fn neumann_apply(op: &OperatorSpec, f: &Expr, n: usize, p: f64, terms: usize) -> Result<NeumannReport, OracleError> {
    if terms < 2 {
        return Err(OracleError::Iterations { min: 2, got: terms });
    }
    let g = discretize(op, n, p)?;
    let branch = neumann_branch(op, &g.nodes)?;
    let fv = g.sample(f)?;
    let f_norm = g.norm(&fv);

    let (d, w, jump, radius_bound) = match branch {
        NeumannBranch::DominantA => (
            g.a.clone(),
            g.b.component_div(&g.a),
            g.comp.clone(),
            weighted_radius_bound(op, |t| Ok(op.b.eval(t)? / op.a.eval(t)?), 1)?,
        ),
        NeumannBranch::DominantB => (
            g.b.clone(),
            g.a.component_div(&g.b),
            composition(&op.shift, n, -1)?,
            weighted_radius_bound(op, |t| Ok(op.a.eval(t)? / op.b.eval(t)?), -1)?,
        ),
    };
    let mut term = fv.component_div(&d);
    let mut sum = DVector::zeros(g.n);
    let mut residuals = Vec::with_capacity(terms);
    let mut series_residuals = Vec::with_capacity(terms);
    for _ in 0..terms {
        sum += &term;
        term = w.component_mul(&jump.apply(&term));
        let x = match branch {
            NeumannBranch::DominantA => sum.clone(),
            NeumannBranch::DominantB => -jump.apply(&sum),
        };
        residuals.push(g.norm(&(g.apply(&x) - &fv)) / f_norm);
        series_residuals.push(g.norm(&d.component_mul(&term)) / f_norm);
    }
    let half = terms / 2;
    let (r1, r0) = (series_residuals[terms - 1], series_residuals[half - 1]);
    let ratio = if r0 > 0.0 && r1 > 0.0 {
        (r1 / r0).powf(1.0 / (terms - half) as f64)
    } else {
        0.0
    };
    Ok(NeumannReport {
        branch,
        residuals,
        series_residuals,
        ratio,
        radius_bound,
    })
}

fn neumann_branch(op: &OperatorSpec, nodes: &[f64]) -> Result<NeumannBranch, OracleError> {
    let mut eta1_pos = true;
    let mut eta0_neg = true;
    for &t in nodes {
        let (e0, e1) = eta_values(op, t)?;
        eta1_pos &= e1 > 0.0;
        eta0_neg &= e0 < 0.0;
    }
    if eta1_pos {
        Ok(NeumannBranch::DominantA)
    } else if eta0_neg {
        Ok(NeumannBranch::DominantB)
    } else {
        Err(OracleError::NeumannUnavailable)
    }
}

/// `max_{τ∈Λ} |w(τ)|·max{|α_k'(τ)|^{-α_X}, |α_k'(τ)|^{-β_X}}` for `wW^k`, `k = ±1`.
fn weighted_radius_bound<F>(op: &OperatorSpec, w: F, k: i64) -> Result<f64, OracleError>
where
    F: Fn(f64) -> Result<f64, ShiftError>,
{
    let mut r = 0.0f64;
    for t in op.structure.lambda_sample(257) {
        let d = op.shift.iterate_derivative(t, k)?.abs();
        r = r.max(w(t)?.abs() * op.space.dilation_max(d));
    }
    Ok(r)
}
