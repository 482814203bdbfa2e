//! JSON run configuration and the small text formats shared by the CLI.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{PotentialKind, PotentialModel};

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitsSpec {
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub mass: f64,
}

impl Default for UnitsSpec {
    fn default() -> Self {
        UnitsSpec {
            hbar: 1.0,
            mass: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Command default when absent.
    #[serde(default)]
    pub format: Option<OutputFormat>,
    /// Write here instead of stdout.
    #[serde(default)]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    #[serde(default)]
    pub grid: Option<usize>,
    #[serde(default)]
    pub domain: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialKind,
    #[serde(default)]
    pub units: UnitsSpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub oracle: OracleSpec,
}

impl RunConfig {
    /// Parse and validate; any failure is a schema error.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        cfg.model().map_err(|e| match e {
            Error::InvalidInput(m) => Error::Schema(m),
            other => other,
        })?;
        Ok(cfg)
    }

    pub fn model(&self) -> Result<PotentialModel> {
        PotentialModel::new(self.potential.clone(), self.units.hbar, self.units.mass)
    }
}

/// `"MIN,MAX"` with `MIN < MAX`, both finite.
pub fn parse_range(text: &str) -> Result<(f64, f64)> {
    let bad = || Error::InvalidInput(format!("expected MIN,MAX, got {text:?}"));
    let (lo, hi) = text.split_once(',').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidInput(format!(
            "range must satisfy finite MIN < MAX, got {lo},{hi}"
        )));
    }
    Ok((lo, hi))
}

/// C `%.12e` formatting: `-1.234567890123e-05`.
pub fn format_sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// CSV cell for an optional number; absent values print as `nan`.
pub fn format_opt(x: Option<f64>) -> String {
    format_sci(x.unwrap_or(f64::NAN))
}
