use serde::Serialize;

use super::ast::{EvalError, Expr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    /// Sign change, located by bisection.
    Simple,
    /// |f| dipped below tolerance without a sign change. Flagged as suspect:
    /// it may be a genuine double root or a near miss.
    Tangential,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Zero {
    pub t: f64,
    pub kind: ZeroKind,
}

/// Maximal run on which |f| stays inside the flat band. In periodic mode
/// `start > end` means the interval wraps through `lo`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZeroInterval {
    pub start: f64,
    pub end: f64,
    pub full: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ZeroSet {
    pub points: Vec<Zero>,
    pub intervals: Vec<ZeroInterval>,
}

impl ZeroSet {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.intervals.is_empty()
    }

    pub fn has_suspect(&self) -> bool {
        self.points.iter().any(|z| z.kind == ZeroKind::Tangential)
    }

    pub fn locations(&self) -> Vec<f64> {
        self.points.iter().map(|z| z.t).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroScan {
    pub cells: usize,
    /// Bisection / golden-section stopping width.
    pub x_tol: f64,
    /// |f| at or below this counts as zero.
    pub f_tol: f64,
    /// Band used to detect zero intervals (runs of at least two cells).
    pub flat_tol: f64,
    /// Treat `[lo, hi)` as a circle: `hi` is identified with `lo`.
    pub periodic: bool,
}

impl Default for ZeroScan {
    fn default() -> Self {
        ZeroScan {
            cells: 4096,
            x_tol: 1e-12,
            f_tol: 1e-12,
            flat_tol: 1e-12,
            periodic: false,
        }
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

impl ZeroScan {
    pub fn with_tol(tol: f64) -> Self {
        ZeroScan {
            x_tol: tol,
            f_tol: tol,
            flat_tol: tol,
            ..Default::default()
        }
    }

    pub fn scan<F, E>(&self, f: F, lo: f64, hi: f64) -> Result<ZeroSet, E>
    where
        F: Fn(f64) -> Result<f64, E>,
    {
        assert!(lo < hi, "zero scan needs lo < hi");
        let n = self.cells.max(4);
        let h = (hi - lo) / n as f64;
        let xs: Vec<f64> = (0..=n).map(|i| lo + i as f64 * h).collect();
        let mut vs = Vec::with_capacity(n + 1);
        for (i, &x) in xs.iter().enumerate() {
            if self.periodic && i == n {
                vs.push(vs[0]);
            } else {
                vs.push(f(x)?);
            }
        }
        // Number of distinct nodes; in periodic mode node n is node 0.
        let count = if self.periodic { n } else { n + 1 };
        let idx = |i: isize| -> Option<usize> {
            if self.periodic {
                Some(i.rem_euclid(count as isize) as usize)
            } else if i < 0 || i as usize >= count {
                None
            } else {
                Some(i as usize)
            }
        };
        let node_x = |i: isize| -> f64 {
            if self.periodic {
                // unwrapped coordinate so bisection brackets stay ordered
                lo + i as f64 * h
            } else {
                xs[i as usize]
            }
        };

        let flat: Vec<bool> = vs[..count].iter().map(|v| v.abs() <= self.flat_tol).collect();
        let zeroish: Vec<bool> = vs[..count].iter().map(|v| v.abs() <= self.f_tol).collect();
        let mut in_interval = vec![false; count];
        let mut out = ZeroSet::default();

        // Flat runs of >= 3 nodes become intervals.
        if flat.iter().all(|&b| b) {
            out.intervals.push(ZeroInterval {
                start: lo,
                end: hi,
                full: true,
            });
            return Ok(out);
        }
        let first_break = if self.periodic {
            flat.iter().position(|&b| !b).unwrap()
        } else {
            0
        };
        let mut k = 0usize;
        while k < count {
            let i = (first_break + k) % count;
            if !flat[i] {
                k += 1;
                continue;
            }
            let mut len = 0usize;
            while k + len < count && flat[(first_break + k + len) % count] {
                len += 1;
            }
            if len >= 3 {
                let s = (first_break + k) as isize;
                let e = s + len as isize - 1;
                for j in 0..len {
                    in_interval[(first_break + k + j) % count] = true;
                }
                let band = |x: f64| -> Result<bool, E> { Ok(f(self.wrap(x, lo, hi))?.abs() <= self.flat_tol) };
                let start = if idx(s - 1).is_some() {
                    self.refine_edge(&band, node_x(s - 1), node_x(s))?
                } else {
                    node_x(s)
                };
                let end = if idx(e + 1).is_some() {
                    self.refine_edge(&band, node_x(e + 1), node_x(e))?
                } else {
                    node_x(e)
                };
                out.intervals.push(ZeroInterval {
                    start: self.wrap(start, lo, hi),
                    end: self.wrap(end, lo, hi),
                    full: false,
                });
            }
            k += len;
        }

        let sign_at = |i: isize| -> Option<f64> { idx(i).map(|j| vs[j].signum()) };

        // Clusters of zero-ish nodes outside intervals.
        let mut i = 0usize;
        while i < count {
            if !zeroish[i] || in_interval[i] {
                i += 1;
                continue;
            }
            // periodic: skip a cluster start that continues from the end
            if self.periodic && i == 0 {
                let mut back = count - 1;
                while back > 0 && zeroish[back] && !in_interval[back] {
                    back -= 1;
                }
                if back < count - 1 {
                    i += 1;
                    continue;
                }
            }
            let mut j = i;
            while idx(j as isize + 1).is_some_and(|q| q != i && zeroish[q] && !in_interval[q]) {
                j += 1;
            }
            let best = (i..=j)
                .min_by(|&p, &q| vs[p % count].abs().total_cmp(&vs[q % count].abs()))
                .unwrap();
            let left = sign_at(i as isize - 1);
            let right = sign_at(j as isize + 1);
            let kind = match (left, right) {
                (Some(l), Some(r)) if l * r < 0.0 => ZeroKind::Simple,
                (Some(_), Some(_)) => ZeroKind::Tangential,
                _ => ZeroKind::Simple,
            };
            out.points.push(Zero {
                t: self.wrap(node_x(best as isize), lo, hi),
                kind,
            });
            if j + 1 >= count {
                break;
            }
            i = j + 1;
        }

        // Sign changes between two clearly nonzero nodes.
        let cells = if self.periodic { count } else { count - 1 };
        for c in 0..cells {
            let (p, q) = (c, (c + 1) % count.max(1));
            let q = if self.periodic { q } else { c + 1 };
            if zeroish[p] || zeroish[q] || in_interval[p] || in_interval[q] {
                continue;
            }
            if vs[p] * vs[q] < 0.0 {
                let t = self.bisect(&f, node_x(c as isize), node_x(c as isize + 1), vs[p], lo, hi)?;
                out.points.push(Zero {
                    t: self.wrap(t, lo, hi),
                    kind: ZeroKind::Simple,
                });
            }
        }

        // Interior minima of |f| that do not change sign.
        for c in 0..count {
            let c = c as isize;
            let (Some(pl), Some(pr)) = (idx(c - 1), idx(c + 1)) else {
                continue;
            };
            let pc = c as usize;
            if zeroish[pc] || zeroish[pl] || zeroish[pr] || in_interval[pc] {
                continue;
            }
            let (vl, vc, vr) = (vs[pl], vs[pc], vs[pr]);
            if vl * vc <= 0.0 || vr * vc <= 0.0 {
                continue;
            }
            if !(vc.abs() <= vl.abs() && vc.abs() < vr.abs()) {
                continue;
            }
            let (t, v) = self.golden_min(&f, node_x(c - 1), node_x(c + 1), lo, hi)?;
            if v <= self.f_tol {
                out.points.push(Zero {
                    t: self.wrap(t, lo, hi),
                    kind: ZeroKind::Tangential,
                });
            }
        }

        self.finish(&mut out, lo, hi);
        Ok(out)
    }

    fn wrap(&self, x: f64, lo: f64, hi: f64) -> f64 {
        if !self.periodic {
            return x.clamp(lo, hi);
        }
        let p = hi - lo;
        let y = lo + (x - lo).rem_euclid(p);
        if hi - y < self.x_tol.max(f64::EPSILON * p) {
            lo
        } else {
            y
        }
    }

    fn refine_edge<E>(
        &self,
        in_band: &dyn Fn(f64) -> Result<bool, E>,
        mut outside: f64,
        mut inside: f64,
    ) -> Result<f64, E> {
        for _ in 0..200 {
            if (outside - inside).abs() <= self.x_tol {
                break;
            }
            let mid = 0.5 * (outside + inside);
            if in_band(mid)? {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        Ok(0.5 * (outside + inside))
    }

    fn bisect<F, E>(&self, f: &F, mut a: f64, mut b: f64, fa: f64, lo: f64, hi: f64) -> Result<f64, E>
    where
        F: Fn(f64) -> Result<f64, E>,
    {
        let sa = fa.signum();
        for _ in 0..200 {
            if b - a <= self.x_tol {
                break;
            }
            let mid = 0.5 * (a + b);
            let fm = f(self.wrap(mid, lo, hi))?;
            if fm == 0.0 {
                return Ok(mid);
            }
            if fm.signum() == sa {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(0.5 * (a + b))
    }

    fn golden_min<F, E>(&self, f: &F, mut a: f64, mut b: f64, lo: f64, hi: f64) -> Result<(f64, f64), E>
    where
        F: Fn(f64) -> Result<f64, E>,
    {
        let g = |x: f64| -> Result<f64, E> { Ok(f(self.wrap(x, lo, hi))?.abs()) };
        let mut c = b - GOLDEN * (b - a);
        let mut d = a + GOLDEN * (b - a);
        let mut fc = g(c)?;
        let mut fd = g(d)?;
        for _ in 0..300 {
            if b - a <= self.x_tol || fc.min(fd) <= self.f_tol * 1e-3 {
                break;
            }
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - GOLDEN * (b - a);
                fc = g(c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + GOLDEN * (b - a);
                fd = g(d)?;
            }
        }
        Ok(if fc < fd { (c, fc) } else { (d, fd) })
    }

    fn finish(&self, out: &mut ZeroSet, lo: f64, hi: f64) {
        let period = hi - lo;
        let dist = |a: f64, b: f64| {
            let d = (a - b).abs();
            if self.periodic {
                d.min(period - d)
            } else {
                d
            }
        };
        let merge_tol = (10.0 * self.x_tol).max(1e-3 * period / self.cells.max(1) as f64);
        let inside_interval = |t: f64| {
            out.intervals.iter().any(|iv| {
                if iv.full {
                    return true;
                }
                let within = if iv.start <= iv.end {
                    t >= iv.start && t <= iv.end
                } else {
                    t >= iv.start || t <= iv.end
                };
                within || dist(t, iv.start) <= merge_tol || dist(t, iv.end) <= merge_tol
            })
        };
        let mut pts: Vec<Zero> = out
            .points
            .iter()
            .copied()
            .filter(|z| !inside_interval(z.t))
            .collect();
        pts.sort_by(|a, b| a.t.total_cmp(&b.t));
        let mut merged: Vec<Zero> = Vec::with_capacity(pts.len());
        for z in pts {
            if let Some(last) = merged.last_mut() {
                if dist(last.t, z.t) <= merge_tol {
                    if z.kind == ZeroKind::Tangential {
                        last.kind = ZeroKind::Tangential;
                    }
                    continue;
                }
            }
            merged.push(z);
        }
        if self.periodic && merged.len() > 1 {
            let (first, last) = (merged[0], merged[merged.len() - 1]);
            if dist(first.t, last.t) <= merge_tol {
                if last.kind == ZeroKind::Tangential {
                    merged[0].kind = ZeroKind::Tangential;
                }
                merged.pop();
            }
        }
        out.points = merged;
        out.intervals.sort_by(|a, b| a.start.total_cmp(&b.start));
    }
}

/// Zeros of `e` on `[lo, hi]`, located to `tol`.
///
/// When `e` takes the same value at both ends (relative 1e-9) the interval
/// is treated as one period and a zero at `hi` is reported as `lo`.
pub fn find_zeros(e: &Expr, lo: f64, hi: f64, tol: f64) -> Result<ZeroSet, EvalError> {
    let flo = e.eval(lo)?;
    let fhi = e.eval(hi)?;
    let scan = ZeroScan {
        periodic: (flo - fhi).abs() <= 1e-9 * (1.0 + flo.abs()),
        ..ZeroScan::with_tol(tol)
    };
    scan.scan(|t| e.eval(t), lo, hi)
}
