use serde::Serialize;

use super::eta::{eta_profile, EtaLimits, EtaProfile};
use super::{AnalysisError, OperatorSpec};
use crate::circle::Location;

/// Membership in the sets Γ₁…Γ₅.
///
/// `Outside` means the η signs are definite but satisfy none of the
/// defining inequalities (σ_A is then zero there). `Degenerate` means some
/// η value lies inside the tolerance band and the class would change with
/// its sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Gamma1,
    Gamma2,
    Gamma3,
    Gamma4,
    Gamma5,
    Outside,
    Degenerate,
}

fn region_of(s0m: i8, s0p: i8, s1m: i8, s1p: i8) -> Region {
    if s1m > 0 && s1p > 0 {
        Region::Gamma2
    } else if s0m < 0 && s0p < 0 {
        Region::Gamma3
    } else if s0p < 0 && s1m > 0 {
        Region::Gamma4
    } else if s0m < 0 && s1p > 0 {
        Region::Gamma5
    } else {
        Region::Outside
    }
}

/// Classifies a γ arc or boundary point from its η limits. Values within
/// `band` of zero may take any sign consistent with `η₁ <= η₀`; the class
/// is reported only if all such choices agree.
pub fn classify_limits(l: &EtaLimits, band: f64) -> Region {
    let options = |v: f64| -> Vec<i8> {
        if v.abs() <= band {
            vec![-1, 0, 1]
        } else if v > 0.0 {
            vec![1]
        } else {
            vec![-1]
        }
    };
    let mut seen: Option<Region> = None;
    for &s0m in &options(l.eta0_minus) {
        for &s1m in &options(l.eta1_minus) {
            if s1m > s0m {
                continue;
            }
            for &s0p in &options(l.eta0_plus) {
                for &s1p in &options(l.eta1_plus) {
                    if s1p > s0p {
                        continue;
                    }
                    let r = region_of(s0m, s0p, s1m, s1p);
                    match seen {
                        None => seen = Some(r),
                        Some(prev) if prev != r => return Region::Degenerate,
                        _ => {}
                    }
                }
            }
        }
    }
    seen.unwrap_or(Region::Degenerate)
}

#[derive(Clone, Debug, Serialize)]
pub struct PointClass {
    pub t: f64,
    pub region: Region,
    pub eta0: f64,
    pub eta1: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArcClass {
    pub gamma_index: usize,
    pub region: Region,
    pub limits: EtaLimits,
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaPartition {
    /// Every ω arc is in Γ₁; listed by index for completeness.
    pub omega: Vec<Region>,
    pub gamma: Vec<ArcClass>,
    pub y: Vec<PointClass>,
    pub y_prime: Vec<PointClass>,
    pub band: f64,
}

impl GammaPartition {
    pub fn classify(&self, op: &OperatorSpec, t: f64) -> Result<Region, AnalysisError> {
        Ok(match op.structure.locate(t)? {
            Location::Omega(_) => Region::Gamma1,
            Location::Gamma(i) => self.gamma[i].region,
            Location::Y(y) => self
                .y
                .iter()
                .find(|p| p.t == y)
                .map(|p| p.region)
                .unwrap_or(Region::Degenerate),
        })
    }

    pub fn regions(&self) -> impl Iterator<Item = Region> + '_ {
        self.omega
            .iter()
            .copied()
            .chain(self.gamma.iter().map(|g| g.region))
            .chain(self.y.iter().chain(&self.y_prime).map(|p| p.region))
    }

    pub fn has_degenerate(&self) -> bool {
        self.regions().any(|r| r == Region::Degenerate)
    }
}

pub fn build_partition(op: &OperatorSpec) -> Result<GammaPartition, AnalysisError> {
    let profile = eta_profile(op)?;
    Ok(partition_from_profile(op, &profile))
}

pub(crate) fn partition_from_profile(op: &OperatorSpec, profile: &EtaProfile) -> GammaPartition {
    let band = op.tol.band;
    let ny = op.structure.y.len();
    let point = |p: &super::eta::PointEta| PointClass {
        t: p.t,
        region: classify_limits(&EtaLimits::at_point(p.eta0, p.eta1), band),
        eta0: p.eta0,
        eta1: p.eta1,
    };
    GammaPartition {
        omega: vec![Region::Gamma1; op.structure.omega.len()],
        gamma: profile
            .arcs
            .iter()
            .map(|a| ArcClass {
                gamma_index: a.gamma_index,
                region: classify_limits(&a.limits, band),
                limits: a.limits,
            })
            .collect(),
        y: profile.points[..ny].iter().map(point).collect(),
        y_prime: profile.points[ny..].iter().map(point).collect(),
        band,
    }
}

/// `σ_A(t)`: `a_m - b_m` on Γ₁, `a_m` on Γ₂, `-b_m` on Γ₃, zero elsewhere.
pub fn sigma_a(op: &OperatorSpec, partition: &GammaPartition, t: f64) -> Result<f64, AnalysisError> {
    sigma_for_region(op, partition.classify(op, t)?, t)
}

pub(crate) fn sigma_for_region(op: &OperatorSpec, region: Region, t: f64) -> Result<f64, AnalysisError> {
    Ok(match region {
        Region::Gamma1 => op.a_m().eval(t)? - op.b_m().eval(t)?,
        Region::Gamma2 => op.a_m().eval(t)?,
        Region::Gamma3 => -op.b_m().eval(t)?,
        Region::Gamma4 | Region::Gamma5 | Region::Outside => 0.0,
        Region::Degenerate => return Err(AnalysisError::Degenerate(t)),
    })
}
