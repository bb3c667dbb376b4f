use serde::Serialize;
use thiserror::Error;

use super::shift::{Orientation, Shift, ShiftError};
use super::{ccw, circle_dist, CircleArc, POINT_TOL};
use crate::expr::{ZeroKind, ZeroScan};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error("no periodic structure with multiplicity <= {0}")]
    NoPeriodicPoints(usize),
    #[error("t = {t} lies in no component (nearest boundary point {nearest})")]
    Unlocated { t: f64, nearest: f64 },
    #[error("declared periodic point {t} is not fixed by the m-th iterate (moves by {moved:e})")]
    NotFixed { t: f64, moved: f64 },
    #[error("declared structure has no periodic points")]
    Empty,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructureOptions {
    pub m_max: usize,
    pub cells: usize,
    pub zero_tol: f64,
    pub flat_tol: f64,
}

impl Default for StructureOptions {
    fn default() -> Self {
        StructureOptions {
            m_max: 16,
            cells: 4096,
            zero_tol: 1e-12,
            flat_tol: 1e-11,
        }
    }
}

/// Connected component of the set of fixed points of `α_m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LambdaComponent {
    Point { t: f64 },
    Arc { arc: CircleArc },
}

impl LambdaComponent {
    fn start(&self) -> f64 {
        match self {
            LambdaComponent::Point { t } => *t,
            LambdaComponent::Arc { arc } => arc.start(),
        }
    }

    fn end(&self) -> f64 {
        match self {
            LambdaComponent::Point { t } => *t,
            LambdaComponent::Arc { arc } => arc.end(),
        }
    }
}

/// Component of `Φ \ Λ` with the fixed points its `α_m`-orbits leave
/// (`repelling`) and approach (`attracting`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaArc {
    pub arc: CircleArc,
    pub repelling: f64,
    pub attracting: f64,
    /// `α_m` moves points in the positive direction along the arc.
    pub forward: bool,
}

impl GammaArc {
    /// Position in `[0, 1]` measured from the repelling end toward the
    /// attracting end.
    pub fn progress(&self, t: f64) -> f64 {
        let p = self.arc.progress(t);
        if self.forward {
            p
        } else {
            1.0 - p
        }
    }

    /// Inverse of [`progress`](Self::progress).
    pub fn at_progress(&self, p: f64) -> f64 {
        self.arc.point_at(if self.forward { p } else { 1.0 - p })
    }

    /// The same arc with the direction of motion reversed, as for `α_{-1}`.
    pub fn reversed(&self) -> GammaArc {
        GammaArc {
            arc: self.arc,
            repelling: self.attracting,
            attracting: self.repelling,
            forward: !self.forward,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureOrigin {
    Detected,
    Declared,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Location {
    /// A boundary point of the periodic set.
    Y(f64),
    Omega(usize),
    Gamma(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodicStructure {
    pub orientation: Orientation,
    pub m: usize,
    pub lambda: Vec<LambdaComponent>,
    pub y: Vec<f64>,
    pub y_prime: Vec<f64>,
    pub omega: Vec<CircleArc>,
    pub gamma: Vec<GammaArc>,
    /// Tangential (uncertain) fixed points; a nonempty list makes every
    /// downstream verdict undecidable.
    pub suspect: Vec<f64>,
    pub origin: StructureOrigin,
}

impl PeriodicStructure {
    pub fn is_uncertain(&self) -> bool {
        !self.suspect.is_empty()
    }

    /// `Φ = ∅`: `α_m` is the identity.
    pub fn is_carleman(&self) -> bool {
        self.omega.iter().any(|a| a.is_full())
    }

    pub fn locate(&self, t: f64) -> Result<Location, StructureError> {
        let t = super::wrap(t);
        if let Some(&y) = self.y.iter().find(|&&y| circle_dist(y, t) <= POINT_TOL) {
            return Ok(Location::Y(y));
        }
        if let Some(i) = self.omega.iter().position(|a| a.contains(t)) {
            return Ok(Location::Omega(i));
        }
        if let Some(i) = self.gamma.iter().position(|g| g.arc.contains(t)) {
            return Ok(Location::Gamma(i));
        }
        let nearest = self
            .y
            .iter()
            .copied()
            .min_by(|a, b| circle_dist(*a, t).total_cmp(&circle_dist(*b, t)))
            .unwrap_or(t);
        Err(StructureError::Unlocated { t, nearest })
    }

    /// `(τ₋, τ₊)` of the component containing `t`; `(t, t)` on `Λ`.
    pub fn orbit_limit_endpoints(&self, t: f64) -> Result<(f64, f64), StructureError> {
        let t = super::wrap(t);
        Ok(match self.locate(t)? {
            Location::Y(_) | Location::Omega(_) => (t, t),
            Location::Gamma(i) => (self.gamma[i].repelling, self.gamma[i].attracting),
        })
    }

    /// Finite sample of `Λ`: every isolated point plus `per_arc` points of
    /// each arc component.
    pub fn lambda_sample(&self, per_arc: usize) -> Vec<f64> {
        let mut out = Vec::new();
        for c in &self.lambda {
            match c {
                LambdaComponent::Point { t } => out.push(*t),
                LambdaComponent::Arc { arc } => out.extend(arc.sample(per_arc)),
            }
        }
        out
    }

    /// Sample of `Λ ∩ γ̄` for the closure of the given γ arc.
    pub fn lambda_in_gamma_closure(&self, gamma: &GammaArc) -> Vec<f64> {
        let mut pts = vec![gamma.arc.start()];
        if circle_dist(gamma.arc.start(), gamma.arc.end()) > POINT_TOL {
            pts.push(gamma.arc.end());
        }
        pts
    }

    /// Structure of `α_{-1}`: same sets, every γ arc traversed backwards.
    pub fn reversed(&self) -> PeriodicStructure {
        PeriodicStructure {
            gamma: self.gamma.iter().map(GammaArc::reversed).collect(),
            ..self.clone()
        }
    }

    /// Structure of `α_m` viewed as a shift with fixed points (`m = 1`).
    pub fn as_fixed(&self) -> PeriodicStructure {
        PeriodicStructure {
            orientation: Orientation::Preserving,
            m: 1,
            ..self.clone()
        }
    }

    /// User-declared structure. `lambda` must consist of fixed points of
    /// `α_m`; `y_prime` lists accumulation points of an infinite boundary,
    /// which the detector never produces.
    pub fn from_parts(
        shift: &Shift,
        m: usize,
        lambda: Vec<LambdaComponent>,
        y_prime: Vec<f64>,
    ) -> Result<PeriodicStructure, StructureError> {
        let sm = shift.iterate(m as i64);
        for c in &lambda {
            let pts: Vec<f64> = match c {
                LambdaComponent::Point { t } => vec![*t],
                LambdaComponent::Arc { arc } => arc.sample(17),
            };
            for t in pts {
                let moved = circle_dist(sm.apply(t, 1)?, t);
                if moved > 1e-9 {
                    return Err(StructureError::NotFixed { t, moved });
                }
            }
        }
        assemble(shift, m, lambda, y_prime, Vec::new(), StructureOrigin::Declared)
    }
}

/// Orientation and multiplicity `m`.
///
/// Reversing shifts get `m = 2`. For preserving shifts `m` is the least
/// `j` such that `L_j(x) - x` attains an integer value, i.e. `α_j` has a
/// fixed point.
pub fn detect_orientation_and_multiplicity(
    shift: &Shift,
    m_max: usize,
) -> Result<(Orientation, usize), StructureError> {
    detect_with(shift, &StructureOptions {
        m_max,
        ..Default::default()
    })
}

fn detect_with(shift: &Shift, opts: &StructureOptions) -> Result<(Orientation, usize), StructureError> {
    let sigma = shift.orientation();
    if sigma == Orientation::Reversing {
        return Ok((sigma, 2));
    }
    for j in 1..=opts.m_max.max(1) {
        let sj = shift.iterate(j as i64);
        let (lo, hi) = displacement_range(&sj, opts)?;
        if !integers_in(lo, hi, opts.flat_tol).is_empty() {
            return Ok((sigma, j));
        }
    }
    Err(StructureError::NoPeriodicPoints(opts.m_max))
}

/// Range of `L(x) - x` over one period, grid extremes refined by golden
/// section so tangential touches are not missed.
fn displacement_range(s: &Shift, opts: &StructureOptions) -> Result<(f64, f64), StructureError> {
    let n = opts.cells.max(16);
    let h = 1.0 / n as f64;
    let g = |x: f64| -> Result<f64, StructureError> { Ok(s.lift_value(x)? - x) };
    let vals: Vec<f64> = (0..n).map(|i| g(i as f64 * h)).collect::<Result<_, _>>()?;
    let imin = (0..n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    let imax = (0..n).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    let lo = golden(&g, (imin as f64 - 1.0) * h, (imin as f64 + 1.0) * h, 1.0)?.min(vals[imin]);
    let hi = golden(&g, (imax as f64 - 1.0) * h, (imax as f64 + 1.0) * h, -1.0)?.max(vals[imax]);
    Ok((lo, hi))
}

/// Minimizes `sign * g` on `[a, b]`, returns `g` at the minimizer.
fn golden(
    g: &dyn Fn(f64) -> Result<f64, StructureError>,
    mut a: f64,
    mut b: f64,
    sign: f64,
) -> Result<f64, StructureError> {
    const R: f64 = 0.618_033_988_749_894_9;
    let mut c = b - R * (b - a);
    let mut d = a + R * (b - a);
    let (mut fc, mut fd) = (sign * g(c)?, sign * g(d)?);
    while b - a > 1e-13 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - R * (b - a);
            fc = sign * g(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + R * (b - a);
            fd = sign * g(d)?;
        }
    }
    Ok(sign * fc.min(fd))
}

fn integers_in(lo: f64, hi: f64, tol: f64) -> Vec<i64> {
    let first = (lo - tol).ceil() as i64;
    let last = (hi + tol).floor() as i64;
    (first..=last).collect()
}

/// Detects `m`, `Λ`, `Y`, and the ω/γ decomposition of the circle.
pub fn compute_periodic_structure(
    shift: &Shift,
    opts: &StructureOptions,
) -> Result<PeriodicStructure, StructureError> {
    let (_, m) = detect_with(shift, opts)?;
    let sm = shift.iterate(m as i64);
    let (lo, hi) = displacement_range(&sm, opts)?;
    let scan = ZeroScan {
        cells: opts.cells,
        x_tol: 1e-13,
        f_tol: opts.zero_tol,
        flat_tol: opts.flat_tol,
        periodic: true,
    };
    let mut lambda = Vec::new();
    let mut suspect = Vec::new();
    for k in integers_in(lo, hi, opts.flat_tol) {
        let zs = scan.scan(|x| -> Result<f64, ShiftError> { Ok(sm.lift_value(x)? - x - k as f64) }, 0.0, 1.0)?;
        for iv in zs.intervals {
            let arc = if iv.full {
                CircleArc::full()
            } else {
                CircleArc::closed(iv.start, iv.end)
            };
            lambda.push(LambdaComponent::Arc { arc });
        }
        for z in zs.points {
            if z.kind == ZeroKind::Tangential {
                suspect.push(z.t);
            }
            lambda.push(LambdaComponent::Point { t: z.t });
        }
    }
    assemble(shift, m, lambda, Vec::new(), suspect, StructureOrigin::Detected)
}

fn assemble(
    shift: &Shift,
    m: usize,
    mut lambda: Vec<LambdaComponent>,
    mut y_prime: Vec<f64>,
    suspect: Vec<f64>,
    origin: StructureOrigin,
) -> Result<PeriodicStructure, StructureError> {
    if lambda.is_empty() {
        return Err(StructureError::Empty);
    }
    let orientation = shift.orientation();
    y_prime.sort_by(f64::total_cmp);
    if lambda
        .iter()
        .any(|c| matches!(c, LambdaComponent::Arc { arc } if arc.is_full()))
    {
        return Ok(PeriodicStructure {
            orientation,
            m,
            lambda: vec![LambdaComponent::Arc {
                arc: CircleArc::full(),
            }],
            y: Vec::new(),
            y_prime,
            omega: vec![CircleArc::full()],
            gamma: Vec::new(),
            suspect,
            origin,
        });
    }
    lambda.sort_by(|a, b| a.start().total_cmp(&b.start()));

    let mut y: Vec<f64> = Vec::new();
    let mut omega = Vec::new();
    for c in &lambda {
        match c {
            LambdaComponent::Point { t } => y.push(*t),
            LambdaComponent::Arc { arc } => {
                y.push(arc.start());
                y.push(arc.end());
                omega.push(CircleArc::open(arc.start(), arc.end()));
            }
        }
    }
    y.sort_by(f64::total_cmp);
    y.dedup_by(|a, b| circle_dist(*a, *b) <= POINT_TOL);

    let sm = shift.iterate(m as i64);
    let mut gamma = Vec::new();
    let n = lambda.len();
    for i in 0..n {
        let from = lambda[i].end();
        let to = lambda[(i + 1) % n].start();
        if n > 1 && ccw(from, to) <= POINT_TOL {
            continue;
        }
        let arc = CircleArc::open(from, to);
        let mid = arc.midpoint();
        let moved = sm.apply(mid, 1)?;
        let forward = arc.progress(moved) > arc.progress(mid);
        let (repelling, attracting) = if forward {
            (arc.start(), arc.end())
        } else {
            (arc.end(), arc.start())
        };
        gamma.push(GammaArc {
            arc,
            repelling,
            attracting,
            forward,
        });
    }

    Ok(PeriodicStructure {
        orientation,
        m,
        lambda,
        y,
        y_prime,
        omega,
        gamma,
        suspect,
        origin,
    })
}

/// The ω arcs (components of `Γ \ Φ`) and γ arcs (components of `Φ \ Λ`).
pub fn decompose_components(ps: &PeriodicStructure) -> (Vec<CircleArc>, Vec<GammaArc>) {
    (ps.omega.clone(), ps.gamma.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn shift(s: &str) -> Shift {
        Shift::from_lift(parse(s).unwrap(), None).unwrap()
    }

    fn structure(s: &str) -> PeriodicStructure {
        compute_periodic_structure(&shift(s), &StructureOptions::default()).unwrap()
    }

    #[test]
    fn multiplicities() {
        let d = |s: &str| detect_orientation_and_multiplicity(&shift(s), 16).unwrap();
        assert_eq!(d("t+0.1*sin(2*pi*t)"), (Orientation::Preserving, 1));
        assert_eq!(d("t+0.5"), (Orientation::Preserving, 2));
        assert_eq!(d("-t"), (Orientation::Reversing, 2));
        assert_eq!(d("t+1/3"), (Orientation::Preserving, 3));
        assert!(matches!(
            detect_orientation_and_multiplicity(&shift("t+0.5"), 1),
            Err(StructureError::NoPeriodicPoints(1))
        ));
    }

    #[test]
    fn s1_structure() {
        let ps = structure("t+0.1*sin(2*pi*t)");
        assert_eq!(ps.m, 1);
        assert_eq!(ps.y.len(), 2);
        assert!(ps.y[0].abs() < 1e-12 && (ps.y[1] - 0.5).abs() < 1e-12);
        assert!(ps.omega.is_empty());
        assert_eq!(ps.gamma.len(), 2);
        let g0 = ps.gamma[0];
        assert!((g0.arc.start() - 0.0).abs() < 1e-12 && (g0.arc.end() - 0.5).abs() < 1e-12);
        assert!((g0.attracting - 0.5).abs() < 1e-12 && g0.repelling.abs() < 1e-12);
        let g1 = ps.gamma[1];
        assert!((g1.attracting - 0.5).abs() < 1e-12 && circle_dist(g1.repelling, 0.0) < 1e-12);
        assert!(!ps.is_uncertain());

        let (r, a) = ps.orbit_limit_endpoints(0.25).unwrap();
        assert!(r.abs() < 1e-12 && (a - 0.5).abs() < 1e-12);
        let (r, a) = ps.orbit_limit_endpoints(0.75).unwrap();
        assert!(circle_dist(r, 0.0) < 1e-12 && (a - 0.5).abs() < 1e-12);
        assert_eq!(ps.orbit_limit_endpoints(0.5).unwrap(), (0.5, 0.5));
    }

    #[test]
    fn carleman_structures() {
        for s in ["t", "t+0.5", "1-t"] {
            let ps = structure(s);
            assert!(ps.is_carleman(), "{s}");
            assert!(ps.y.is_empty() && ps.gamma.is_empty());
            let (om, ga) = decompose_components(&ps);
            assert_eq!(om.len(), 1);
            assert!(ga.is_empty());
        }
        assert_eq!(structure("t+0.5").m, 2);
    }

    #[test]
    fn bump_fixture_has_omega_and_gamma() {
        let ps = structure("t+0.01*(sin(pi*(1-t)/0.75)+abs(sin(pi*(1-t)/0.75)))^2");
        assert_eq!(ps.m, 1);
        assert_eq!(ps.omega.len(), 1, "{ps:?}");
        assert_eq!(ps.gamma.len(), 1);
        let w = ps.omega[0];
        assert!(circle_dist(w.start(), 0.0) < 1e-5 && (w.end() - 0.25).abs() < 1e-5, "{w:?}");
        let g = ps.gamma[0];
        assert!((g.arc.start() - 0.25).abs() < 1e-5 && circle_dist(g.arc.end(), 0.0) < 1e-5);
        // α(t) >= t, so orbits move forward toward 1 ≡ 0
        assert!(circle_dist(g.attracting, 0.0) < 1e-5);
        assert_eq!(ps.y.len(), 2);
    }

    #[test]
    fn period_two_orbits() {
        let ps = structure("t+0.5+0.05*sin(4*pi*t)");
        assert_eq!(ps.m, 2);
        assert_eq!(ps.y.len(), 4);
        for (y, w) in ps.y.iter().zip([0.0, 0.25, 0.5, 0.75]) {
            assert!((y - w).abs() < 1e-12);
        }
        // 0.25 and 0.75 attract under α_2
        for g in &ps.gamma {
            assert!(
                (g.attracting - 0.25).abs() < 1e-12 || (g.attracting - 0.75).abs() < 1e-12,
                "{g:?}"
            );
        }
    }

    #[test]
    fn tangential_fixed_point_is_suspect() {
        let ps = structure("t+0.05*(1-cos(2*pi*t))");
        assert!(ps.is_uncertain());
        assert_eq!(ps.gamma.len(), 1);
    }

    #[test]
    fn declared_structure_with_limit_points() {
        let s = shift("t+0.1*sin(2*pi*t)");
        let ps = PeriodicStructure::from_parts(
            &s,
            1,
            vec![LambdaComponent::Point { t: 0.5 }, LambdaComponent::Point { t: 0.0 }],
            vec![0.5],
        )
        .unwrap();
        assert_eq!(ps.origin, StructureOrigin::Declared);
        assert_eq!(ps.gamma.len(), 2);
        assert_eq!(ps.y_prime, vec![0.5]);
        assert!(matches!(
            PeriodicStructure::from_parts(&s, 1, vec![LambdaComponent::Point { t: 0.3 }], vec![]),
            Err(StructureError::NotFixed { .. })
        ));
    }
}
