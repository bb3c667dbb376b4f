//! JSON configuration and canonical JSON output.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::analysis::{AnalysisError, OperatorSpec, Tolerances};
use crate::circle::{
    compute_periodic_structure, CircleArc, LambdaComponent, Orientation, PeriodicStructure, Shift, ShiftError,
    StructureError,
};
use crate::expr::{parse, Expr, ParseError};
use crate::indices::{IndexError, SpaceIndices};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid config at `{path}`: {message}")]
    Json { path: String, message: String },
    #[error("`{field}`: {source}")]
    Expr {
        field: &'static str,
        #[source]
        source: ParseError,
    },
    #[error("`space`: {0}")]
    Indices(#[from] IndexError),
    #[error("`shift.lift`: {0}")]
    Shift(#[from] ShiftError),
    #[error("`structure`: {0}")]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("`{field}`: {message}")]
    Invalid { field: &'static str, message: String },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationChoice {
    #[default]
    Auto,
    Preserve,
    Reverse,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftConfig {
    pub lift: String,
    #[serde(default)]
    pub orientation: OrientationChoice,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    #[serde(default = "SpaceConfig::default_alpha")]
    pub alpha: f64,
    #[serde(default = "SpaceConfig::default_beta")]
    pub beta: f64,
    #[serde(default = "SpaceConfig::default_fundamental")]
    pub fundamental_type: bool,
}

impl SpaceConfig {
    fn default_alpha() -> f64 {
        0.5
    }
    fn default_beta() -> f64 {
        0.5
    }
    fn default_fundamental() -> bool {
        true
    }
}

impl Default for SpaceConfig {
    fn default() -> Self {
        SpaceConfig {
            alpha: 0.5,
            beta: 0.5,
            fundamental_type: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    pub zero: f64,
    pub band: f64,
    pub flat: f64,
    pub cells: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        let t = Tolerances::default();
        ToleranceConfig {
            zero: t.zero,
            band: t.band,
            flat: t.flat,
            cells: t.cells,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub grids: Vec<usize>,
    pub p: f64,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            grids: vec![256, 512, 1024],
            p: 2.0,
            seed: 0x5EED,
        }
    }
}

/// A component of a declared periodic set: a point `0.25` or a closed arc
/// `[0.1, 0.3]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaEntry {
    Point(f64),
    Arc([f64; 2]),
}

/// Declared periodic structure, replacing detection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureConfig {
    pub m: usize,
    pub lambda: Vec<LambdaEntry>,
    #[serde(default)]
    pub y_prime: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub shift: ShiftConfig,
    pub a: String,
    pub b: String,
    #[serde(default)]
    pub space: SpaceConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub structure: Option<StructureConfig>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Config, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ConfigError::Json {
                path,
                message: e.into_inner().to_string(),
            }
        })
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            zero: self.tolerances.zero,
            band: self.tolerances.band,
            flat: self.tolerances.flat,
            cells: self.tolerances.cells,
        }
    }

    pub fn space(&self) -> Result<SpaceIndices, ConfigError> {
        Ok(SpaceIndices::new(self.space.alpha, self.space.beta, self.space.fundamental_type)?)
    }

    pub fn shift(&self) -> Result<Shift, ConfigError> {
        let lift = parse_field("shift.lift", &self.shift.lift)?;
        let declared = match self.shift.orientation {
            OrientationChoice::Auto => None,
            OrientationChoice::Preserve => Some(Orientation::Preserving),
            OrientationChoice::Reverse => Some(Orientation::Reversing),
        };
        Ok(Shift::from_lift(lift, declared)?)
    }

    pub fn structure(&self, shift: &Shift) -> Result<PeriodicStructure, ConfigError> {
        match &self.structure {
            None => Ok(compute_periodic_structure(shift, &self.tolerances().structure_options())?),
            Some(s) => {
                if s.m == 0 {
                    return Err(ConfigError::Invalid {
                        field: "structure.m",
                        message: "must be at least 1".into(),
                    });
                }
                let lambda = s
                    .lambda
                    .iter()
                    .map(|e| match *e {
                        LambdaEntry::Point(t) => LambdaComponent::Point { t },
                        LambdaEntry::Arc([lo, hi]) => LambdaComponent::Arc {
                            arc: CircleArc::closed(lo, hi),
                        },
                    })
                    .collect();
                Ok(PeriodicStructure::from_parts(shift, s.m, lambda, s.y_prime.clone())?)
            }
        }
    }

    /// Parses everything and detects (or validates) the periodic structure.
    pub fn operator(&self) -> Result<OperatorSpec, ConfigError> {
        let a = parse_field("a", &self.a)?;
        let b = parse_field("b", &self.b)?;
        let space = self.space()?;
        let tol = self.tolerances();
        if !(tol.zero > 0.0 && tol.band > 0.0 && tol.flat > 0.0 && tol.cells >= 16) {
            return Err(ConfigError::Invalid {
                field: "tolerances",
                message: "zero, band and flat must be positive and cells >= 16".into(),
            });
        }
        let shift = self.shift()?;
        let structure = self.structure(&shift)?;
        Ok(OperatorSpec::with_structure(a.into(), b.into(), shift, structure, space, tol)?)
    }
}

pub fn parse_field(field: &'static str, src: &str) -> Result<Expr, ConfigError> {
    parse(src).map_err(|source| ConfigError::Expr { field, source })
}

/// Rounds to 12 significant digits; non-finite values pass through.
pub fn round_sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x + 0.0;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                if let Some(x) = n.as_f64() {
                    if let Some(r) = serde_json::Number::from_f64(round_sig12(x)) {
                        *n = r;
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with sorted keys and floats rounded to 12 significant
/// digits, so equal inputs give byte-identical output.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String, serde_json::Error> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}
