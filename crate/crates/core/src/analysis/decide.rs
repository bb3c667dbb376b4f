use rayon::prelude::*;
use serde::Serialize;

use super::eta::EtaLimits;
use super::orbits::{check_l, check_r, OrbitCheck};
use super::partition::{build_partition, sigma_for_region, GammaPartition, Region};
use super::{arc_zeros, AnalysisError, OperatorSpec, Truth};
use crate::circle::{CircleArc, Orientation, PeriodicStructure};
use crate::expr::ZeroKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    TwoSided,
    RightOnly,
    LeftOnly,
    Neither,
    Undecidable,
}

impl Verdict {
    pub fn from_sides(right: Truth, left: Truth) -> Verdict {
        match (right, left) {
            (Truth::True, Truth::True) => Verdict::TwoSided,
            (Truth::True, Truth::False) => Verdict::RightOnly,
            (Truth::False, Truth::True) => Verdict::LeftOnly,
            (Truth::False, Truth::False) => Verdict::Neither,
            _ => Verdict::Undecidable,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::TwoSided => "two_sided",
            Verdict::RightOnly => "right_only",
            Verdict::LeftOnly => "left_only",
            Verdict::Neither => "neither",
            Verdict::Undecidable => "undecidable",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// σ_A vanishes at `t`; `tangential` zeros have no sign change and are
    /// flagged as suspect, but still count.
    SigmaZero { t: f64, region: Region, tangential: bool },
    SigmaZeroInterval { start: f64, end: f64, region: Region },
    /// σ_A is identically zero on a whole γ arc of this region.
    SigmaVanishesOnArc { gamma_index: usize, region: Region },
    OrbitPair { condition: &'static str, p: f64, q: f64, n: u64 },
    SuspectZero { condition: &'static str, t: f64 },
    Degenerate { location: String, limits: EtaLimits },
    SuspectStructure { t: f64 },
}

/// σ_A over one piece of the partition.
#[derive(Clone, Debug, Serialize)]
pub struct SigmaExtrema {
    pub piece: String,
    pub region: Region,
    pub min: f64,
    pub max: f64,
    pub zeros: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Conditions {
    pub sigma_nonzero_off_gamma4: Truth,
    pub sigma_nonzero_off_gamma5: Truth,
    pub r_on_gamma4: Truth,
    pub l_on_gamma5: Truth,
    /// `η₀η₁ > 0` on the declared limit set Y′ (vacuous when empty).
    pub y_prime: Truth,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvertibilityReport {
    pub verdict: Verdict,
    pub right: Truth,
    pub left: Truth,
    pub m: usize,
    pub orientation: Orientation,
    pub structure: PeriodicStructure,
    pub partition: GammaPartition,
    pub conditions: Conditions,
    pub sigma: Vec<SigmaExtrema>,
    pub r_check: Option<OrbitCheck>,
    pub l_check: Option<OrbitCheck>,
    pub witnesses: Vec<Witness>,
    pub warnings: Vec<String>,
}

impl InvertibilityReport {
    /// Smallest |σ_A| seen over all pieces (zero when σ_A vanishes somewhere).
    pub fn min_abs_sigma(&self) -> f64 {
        self.sigma
            .iter()
            .map(|s| if s.zeros.is_empty() && s.min * s.max > 0.0 { s.min.abs().min(s.max.abs()) } else { 0.0 })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn has_control_regions(&self) -> bool {
        self.partition
            .regions()
            .any(|r| matches!(r, Region::Gamma4 | Region::Gamma5))
    }
}

#[derive(Clone, Debug)]
enum Piece {
    Omega(usize, CircleArc),
    Gamma(usize, CircleArc, Region),
    Point(&'static str, f64, Region),
}

struct PieceResult {
    region: Region,
    nonzero: Truth,
    extrema: SigmaExtrema,
    witnesses: Vec<Witness>,
}

const EXTREMA_SAMPLES: usize = 257;

fn examine(op: &OperatorSpec, piece: &Piece) -> Result<PieceResult, AnalysisError> {
    let mut witnesses = Vec::new();
    let (name, region, sample): (String, Region, Vec<f64>) = match piece {
        Piece::Omega(i, arc) => (format!("omega[{i}]"), Region::Gamma1, arc.sample(EXTREMA_SAMPLES)),
        Piece::Gamma(i, arc, r) => (format!("gamma[{i}]"), *r, arc.sample(EXTREMA_SAMPLES)),
        Piece::Point(kind, t, r) => (format!("{kind}({t})"), *r, vec![*t]),
    };
    if region == Region::Degenerate {
        return Ok(PieceResult {
            region,
            nonzero: Truth::Unknown,
            extrema: SigmaExtrema {
                piece: name,
                region,
                min: f64::NAN,
                max: f64::NAN,
                zeros: Vec::new(),
            },
            witnesses,
        });
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &t in &sample {
        let v = sigma_for_region(op, region, t)?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let mut zeros = Vec::new();
    let nonzero = match piece {
        Piece::Point(_, t, _) => {
            let v = sigma_for_region(op, region, *t)?;
            if v.abs() <= op.tol.zero {
                zeros.push(*t);
                witnesses.push(Witness::SigmaZero {
                    t: *t,
                    region,
                    tangential: false,
                });
                Truth::False
            } else {
                Truth::True
            }
        }
        Piece::Gamma(i, _, r) if matches!(r, Region::Gamma4 | Region::Gamma5 | Region::Outside) => {
            witnesses.push(Witness::SigmaVanishesOnArc {
                gamma_index: *i,
                region: *r,
            });
            Truth::False
        }
        Piece::Omega(_, arc) | Piece::Gamma(_, arc, _) => {
            let zs = arc_zeros(op, arc, |t| {
                sigma_for_region(op, region, t).map_err(|e| match e {
                    AnalysisError::Shift(s) => s,
                    _ => unreachable!("region is not degenerate"),
                })
            })?;
            for z in &zs.points {
                zeros.push(z.t);
                witnesses.push(Witness::SigmaZero {
                    t: z.t,
                    region,
                    tangential: z.kind == ZeroKind::Tangential,
                });
            }
            for iv in &zs.intervals {
                zeros.push(iv.start);
                witnesses.push(Witness::SigmaZeroInterval {
                    start: iv.start,
                    end: iv.end,
                    region,
                });
            }
            Truth::from_bool(zs.is_empty())
        }
    };
    Ok(PieceResult {
        region,
        nonzero,
        extrema: SigmaExtrema {
            piece: name,
            region,
            min: lo,
            max: hi,
            zeros,
        },
        witnesses,
    })
}

/// One- and two-sided invertibility of `A = aI - bW`.
///
/// Right invertible iff σ_A ≠ 0 on `Γ \ Γ₄` and R holds on Γ₄; left
/// invertible iff σ_A ≠ 0 on `Γ \ Γ₅` and L holds on Γ₅. Band-sensitive
/// classifications, tangential periodic points and tangential zeros in the
/// R/L zero sets make the corresponding side unknown, and the verdict
/// undecidable.
pub fn decide(op: &OperatorSpec) -> Result<InvertibilityReport, AnalysisError> {
    let partition = build_partition(op)?;
    let ps = &op.structure;
    let mut warnings = op.space.warnings();
    let mut witnesses = Vec::new();

    for &t in &ps.suspect {
        witnesses.push(Witness::SuspectStructure { t });
    }

    let mut pieces = Vec::new();
    for (i, arc) in ps.omega.iter().enumerate() {
        pieces.push(Piece::Omega(i, *arc));
    }
    for (i, g) in ps.gamma.iter().enumerate() {
        let r = partition.gamma[i].region;
        if r == Region::Degenerate {
            witnesses.push(Witness::Degenerate {
                location: format!("gamma[{i}]"),
                limits: partition.gamma[i].limits,
            });
        }
        pieces.push(Piece::Gamma(i, g.arc, r));
    }
    for (kind, list) in [("y", &partition.y), ("y_prime", &partition.y_prime)] {
        for p in list {
            if p.region == Region::Degenerate {
                witnesses.push(Witness::Degenerate {
                    location: format!("{kind}({})", p.t),
                    limits: EtaLimits::at_point(p.eta0, p.eta1),
                });
            }
            pieces.push(Piece::Point(kind, p.t, p.region));
        }
    }

    let results: Vec<PieceResult> = pieces
        .par_iter()
        .map(|p| examine(op, p))
        .collect::<Result<_, _>>()?;

    let mut off4 = Truth::True;
    let mut off5 = Truth::True;
    let mut sigma = Vec::with_capacity(results.len());
    for r in results {
        // a degenerate piece might belong to either control region
        if r.region != Region::Gamma4 {
            off4 = off4.and(r.nonzero);
        }
        if r.region != Region::Gamma5 {
            off5 = off5.and(r.nonzero);
        }
        for w in &r.witnesses {
            if let Witness::SigmaZero { t, tangential: true, .. } = w {
                warnings.push(format!("tangential zero of sigma_A at t = {t} counted as a zero"));
            }
        }
        witnesses.extend(r.witnesses);
        sigma.push(r.extrema);
    }

    let arcs_in = |region: Region| -> Vec<usize> {
        partition
            .gamma
            .iter()
            .enumerate()
            .filter(|(_, g)| g.region == region)
            .map(|(i, _)| i)
            .collect()
    };
    let (g4, g5) = (arcs_in(Region::Gamma4), arcs_in(Region::Gamma5));
    let r_check = if g4.is_empty() { None } else { Some(check_r(op, &g4)?) };
    let l_check = if g5.is_empty() { None } else { Some(check_l(op, &g5)?) };
    let r_holds = r_check.as_ref().map_or(Truth::True, |c| c.holds);
    let l_holds = l_check.as_ref().map_or(Truth::True, |c| c.holds);
    for (name, check) in [("R", &r_check), ("L", &l_check)] {
        if let Some(c) = check {
            if let Some(w) = c.witness {
                witnesses.push(Witness::OrbitPair {
                    condition: name,
                    p: w.p,
                    q: w.q,
                    n: w.n,
                });
            }
            for &t in &c.suspect {
                witnesses.push(Witness::SuspectZero { condition: name, t });
            }
        }
    }

    let y_prime = partition.y_prime.iter().fold(Truth::True, |acc, p| {
        acc.and(match p.region {
            Region::Degenerate => Truth::Unknown,
            _ => Truth::from_bool(p.eta0 * p.eta1 > 0.0),
        })
    });

    let mut right = off4.and(r_holds).and(y_prime);
    let mut left = off5.and(l_holds).and(y_prime);
    if ps.is_uncertain() {
        warnings.push("periodic structure has tangential fixed points; verdict withheld".into());
        right = right.and(Truth::Unknown);
        left = left.and(Truth::Unknown);
        // a definite failure elsewhere is still not trusted on an uncertain structure
        if right == Truth::False {
            right = Truth::Unknown;
        }
        if left == Truth::False {
            left = Truth::Unknown;
        }
    }

    Ok(InvertibilityReport {
        verdict: Verdict::from_sides(right, left),
        right,
        left,
        m: ps.m,
        orientation: ps.orientation,
        structure: ps.clone(),
        partition,
        conditions: Conditions {
            sigma_nonzero_off_gamma4: off4,
            sigma_nonzero_off_gamma5: off5,
            r_on_gamma4: r_holds,
            l_on_gamma5: l_holds,
            y_prime,
        },
        sigma,
        r_check,
        l_check,
        witnesses,
        warnings,
    })
}
