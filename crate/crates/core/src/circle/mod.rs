//! The unit circle `[0, 1)`, shifts given by monotone lifts, and the
//! periodic-point structure of a shift.

mod shift;
mod structure;

use serde::{Serialize, Serializer};

pub use shift::{Orientation, Shift, ShiftError, ORBIT_GUARD};
pub use structure::{
    compute_periodic_structure, decompose_components, detect_orientation_and_multiplicity,
    GammaArc, LambdaComponent, Location, PeriodicStructure, StructureError, StructureOptions,
    StructureOrigin,
};

/// Tolerance for identifying two circle points.
pub const POINT_TOL: f64 = 1e-12;

/// Tolerance for deciding that an orbit lands on a given point.
pub const ORBIT_MATCH_TOL: f64 = 1e-9;

/// Reduces `t` to `[0, 1)`.
pub fn wrap(t: f64) -> f64 {
    let y = t.rem_euclid(1.0);
    // rem_euclid can round up to exactly 1.0 for tiny negative inputs
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

/// Wraparound distance `min(|s-t|, 1-|s-t|)`.
pub fn circle_dist(s: f64, t: f64) -> f64 {
    let d = wrap(s - t);
    d.min(1.0 - d)
}

/// Counter-clockwise distance from `from` to `to`, in `[0, 1)`.
pub fn ccw(from: f64, to: f64) -> f64 {
    wrap(to - from)
}

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct CirclePoint(f64);

impl CirclePoint {
    pub fn new(t: f64) -> Self {
        CirclePoint(wrap(t))
    }

    pub fn t(self) -> f64 {
        self.0
    }

    pub fn approx_eq(self, other: CirclePoint) -> bool {
        circle_dist(self.0, other.0) <= POINT_TOL
    }
}

impl Serialize for CirclePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

/// Arc traversed in the positive direction from `start` for `len`.
///
/// `len == 1` is the full circle; for an open arc with `len == 1` that is
/// the circle punctured at `start`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleArc {
    start: f64,
    len: f64,
    closed: bool,
}

impl CircleArc {
    /// Open arc from `start` to `end`; equal endpoints give the punctured circle.
    pub fn open(start: f64, end: f64) -> Self {
        let len = ccw(start, end);
        CircleArc {
            start: wrap(start),
            len: if len == 0.0 { 1.0 } else { len },
            closed: false,
        }
    }

    /// Closed arc from `start` to `end`; equal endpoints give a single point.
    pub fn closed(start: f64, end: f64) -> Self {
        CircleArc {
            start: wrap(start),
            len: ccw(start, end),
            closed: true,
        }
    }

    pub fn full() -> Self {
        CircleArc {
            start: 0.0,
            len: 1.0,
            closed: true,
        }
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        wrap(self.start + self.len)
    }

    pub fn len(&self) -> f64 {
        self.len
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn is_full(&self) -> bool {
        self.closed && self.len >= 1.0
    }

    /// Membership with endpoint tolerance [`POINT_TOL`]: open arcs exclude a
    /// tolerance neighbourhood of their endpoints, closed arcs include it.
    pub fn contains(&self, t: f64) -> bool {
        if self.is_full() {
            return true;
        }
        let d = ccw(self.start, t);
        let near_start = d <= POINT_TOL || 1.0 - d <= POINT_TOL;
        let near_end = (d - self.len).abs() <= POINT_TOL;
        if near_start || near_end {
            return self.closed;
        }
        d < self.len
    }

    /// Fraction of the arc traversed from `start` to `t` (t assumed inside).
    pub fn progress(&self, t: f64) -> f64 {
        ccw(self.start, t) / self.len
    }

    pub fn point_at(&self, fraction: f64) -> f64 {
        wrap(self.start + fraction * self.len)
    }

    pub fn midpoint(&self) -> f64 {
        self.point_at(0.5)
    }

    /// `n` evenly spaced points; interior only for open arcs.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        let n = n.max(1);
        if self.closed && !self.is_full() {
            if n == 1 {
                return vec![self.start];
            }
            (0..n).map(|i| self.point_at(i as f64 / (n - 1) as f64)).collect()
        } else if self.closed {
            (0..n).map(|i| self.point_at(i as f64 / n as f64)).collect()
        } else {
            (0..n).map(|i| self.point_at((i as f64 + 0.5) / n as f64)).collect()
        }
    }
}

impl Serialize for CircleArc {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Arc", 4)?;
        st.serialize_field("start", &self.start)?;
        st.serialize_field("end", &self.end())?;
        st.serialize_field("length", &self.len)?;
        st.serialize_field("kind", if self.closed { "closed" } else { "open" })?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_and_distance() {
        assert_eq!(wrap(1.0), 0.0);
        assert_eq!(wrap(-0.25), 0.75);
        assert_eq!(wrap(-1e-18), 0.0);
        assert!((circle_dist(0.95, 0.05) - 0.1).abs() < 1e-15);
        assert!(CirclePoint::new(1.0 - 1e-13).approx_eq(CirclePoint::new(0.0)));
    }

    #[test]
    fn arc_membership_wraps() {
        let a = CircleArc::open(0.5, 1.0);
        assert!(a.contains(0.75));
        assert!(!a.contains(0.5));
        assert!(!a.contains(0.0));
        assert!(!a.contains(0.25));
        let w = CircleArc::closed(0.9, 0.1);
        assert!(w.contains(0.0) && w.contains(0.9) && w.contains(0.1));
        assert!(!w.contains(0.5));
        assert!((w.len() - 0.2).abs() < 1e-15);
        assert!((w.midpoint() - 0.0).abs() < 1e-15 || (w.midpoint() - 1.0).abs() < 1e-15);
        let punctured = CircleArc::open(0.3, 0.3);
        assert_eq!(punctured.len(), 1.0);
        assert!(punctured.contains(0.8) && !punctured.contains(0.3));
    }
}
