//! Scenario files: operator symbols, order, weight and sampling overrides.
//!
//! ```json
//! {
//!   "name": "identity",
//!   "u": "const(1)", "v": "const(0)", "phi": "z",
//!   "m": 3, "alpha": 2,
//!   "precision": "double",
//!   "grid": { "depth": 1 },
//!   "tail": { "n_max": 14 },
//!   "sampler": { "count": 16 }
//! }
//! ```
//!
//! `u`, `v`, `phi`, `m` and `alpha` are required. Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::criteria::{Boundedness, Compactness, TailConfig};
use crate::error::{Error, Result};
use crate::funcspace::{make_grid, parse_fn, GridConfig};
use crate::operator::{AtomicSampler, OperatorSpec};
use crate::scalar::Precision;

fn default_name() -> String {
    "scenario".to_string()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_rings: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_angular: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_angular: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n0: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_angles: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_a_radii: Option<Vec<f64>>,
}

/// The file as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default = "default_name")]
    pub name: String,
    pub u: String,
    pub v: String,
    pub phi: String,
    pub m: u32,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<Precision>,
    #[serde(default)]
    pub grid: GridOverrides,
    #[serde(default)]
    pub tail: TailOverrides,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<AtomicSampler>,
}

/// Command-line overrides applied on top of a scenario.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub precision: Option<Precision>,
    pub grid_depth: Option<u32>,
    pub tail_depth: Option<u32>,
}

/// Everything an analysis needs besides the operator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub precision: Precision,
    pub grid: GridConfig,
    pub tail: TailConfig,
    pub sampler: AtomicSampler,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub spec: OperatorSpec,
}

impl Scenario {
    pub fn name(&self) -> &str {
        &self.file.name
    }

    /// Applies scenario settings, then `ov`, over the precision defaults.
    pub fn resolve(&self, ov: &Overrides) -> Result<Resolved> {
        let precision = ov.precision.or(self.file.precision).unwrap_or_default();
        let g = &self.file.grid;
        let base = GridConfig::default().with_floor(precision.boundary_floor());
        let grid = GridConfig {
            inner_radius: g.inner_radius.unwrap_or(base.inner_radius),
            inner_rings: g.inner_rings.unwrap_or(base.inner_rings),
            floor: g.floor.unwrap_or(base.floor),
            base_angular: g.base_angular.unwrap_or(base.base_angular),
            max_angular: g.max_angular.unwrap_or(base.max_angular),
            depth: ov.grid_depth.or(g.depth).unwrap_or(base.depth),
        };
        grid.validate()?;
        let t = &self.file.tail;
        let base = TailConfig::for_precision(precision);
        let tail = TailConfig {
            n0: t.n0.unwrap_or(base.n0),
            n_max: ov.tail_depth.or(t.n_max).unwrap_or(base.n_max),
            step: t.step.unwrap_or(base.step),
            a_angles: t.a_angles.unwrap_or(base.a_angles),
            inner_a_radii: t.inner_a_radii.clone().unwrap_or(base.inner_a_radii),
        };
        tail.validate(&make_grid(&grid)?)?;
        Ok(Resolved {
            precision,
            grid,
            tail,
            sampler: self.file.sampler.clone().unwrap_or_default(),
        })
    }
}

/// 1-based line of the first `"key":` in `src`.
fn line_of(src: &str, key: &str) -> Option<usize> {
    let quoted = format!("\"{key}\"");
    let mut from = 0;
    while let Some(i) = src[from..].find(&quoted) {
        let at = from + i;
        let after = src[at + quoted.len()..].trim_start();
        if after.starts_with(':') {
            return Some(src[..at].matches('\n').count() + 1);
        }
        from = at + quoted.len();
    }
    None
}

fn field_error(src: &str, field: &str, e: impl std::fmt::Display) -> Error {
    let msg = match line_of(src, field) {
        Some(l) => format!("line {l}: {e}"),
        None => e.to_string(),
    };
    Error::Scenario {
        field: field.to_string(),
        msg,
    }
}

fn check_name(name: &str) -> std::result::Result<(), String> {
    if name.is_empty() || name.starts_with('.') {
        return Err("must be non-empty and not start with '.'".into());
    }
    if let Some(c) = name
        .chars()
        .find(|c| !(c.is_ascii_alphanumeric() || "-_.".contains(*c)))
    {
        return Err(format!(
            "character {c:?} not allowed (use letters, digits, '-', '_', '.')"
        ));
    }
    Ok(())
}

pub fn parse_scenario(src: &str) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(src)?;
    from_file(file, src)
}

fn from_file(file: ScenarioFile, src: &str) -> Result<Scenario> {
    check_name(&file.name).map_err(|e| field_error(src, "name", e))?;
    let parse = |field: &str, text: &str| parse_fn(text).map_err(|e| field_error(src, field, e));
    let u = parse("u", &file.u)?;
    let v = parse("v", &file.v)?;
    let phi = parse("phi", &file.phi)?;
    if file.m == 0 {
        return Err(field_error(src, "m", "must be at least 1"));
    }
    if !(file.alpha > 0.0 && file.alpha.is_finite()) {
        return Err(field_error(
            src,
            "alpha",
            format!("must be positive and finite, got {}", file.alpha),
        ));
    }
    let spec = OperatorSpec::new(u, v, phi, file.m, file.alpha)?;
    Ok(Scenario { file, spec })
}

/// A bundled scenario with its expected verdicts.
#[derive(Debug, Clone)]
pub struct SuiteCase {
    pub scenario: Scenario,
    pub bounded: Boundedness,
    /// Only stated for bounded operators.
    pub compact: Option<Compactness>,
    /// `sup |phi| <= 0.9` on the disk.
    pub contractive: bool,
}

const SUITE: &[(&str, Boundedness, Option<Compactness>, bool)] = {
    use Boundedness::*;
    use Compactness::*;
    &[
        (
            r#"{"name":"identity-m4-a2","u":"const(1)","v":"const(0)","phi":"z","m":4,"alpha":2}"#,
            Bounded,
            Some(NotCompact),
            false,
        ),
        (
            r#"{"name":"identity-m4-a1","u":"const(1)","v":"const(0)","phi":"z","m":4,"alpha":1}"#,
            Unbounded,
            None,
            false,
        ),
        (
            r#"{"name":"identity-m1-a3","u":"const(1)","v":"const(0)","phi":"z","m":1,"alpha":3,"precision":"extended"}"#,
            Bounded,
            Some(Compact),
            false,
        ),
        (
            r#"{"name":"identity-m1-a2","u":"const(1)","v":"const(0)","phi":"z","m":1,"alpha":2}"#,
            Bounded,
            Some(NotCompact),
            false,
        ),
        (
            r#"{"name":"deriv-z-m1-a3","u":"const(0)","v":"z","phi":"z","m":1,"alpha":3}"#,
            Bounded,
            Some(NotCompact),
            false,
        ),
        (
            r#"{"name":"deriv-z-m1-a2","u":"const(0)","v":"z","phi":"z","m":1,"alpha":2}"#,
            Unbounded,
            None,
            false,
        ),
        (
            r#"{"name":"deriv-m2-a4","u":"const(0)","v":"const(1)","phi":"z","m":2,"alpha":4}"#,
            Bounded,
            Some(NotCompact),
            false,
        ),
        (
            r#"{"name":"deriv-m2-a3","u":"const(0)","v":"const(1)","phi":"z","m":2,"alpha":3}"#,
            Unbounded,
            None,
            false,
        ),
        (
            r#"{"name":"deriv-m4-a3","u":"const(0)","v":"const(1)","phi":"z","m":4,"alpha":3}"#,
            Unbounded,
            None,
            false,
        ),
        (
            r#"{"name":"mobius-m2-a2","u":"const(1)","v":"const(0)","phi":"sigma(0.5)","m":2,"alpha":2}"#,
            Bounded,
            Some(NotCompact),
            false,
        ),
        (
            r#"{"name":"contractive-m1","u":"poly(1,1)","v":"z","phi":"dilate(0.5,z)","m":1,"alpha":1}"#,
            Bounded,
            Some(Compact),
            true,
        ),
        (
            r#"{"name":"contractive-m2","u":"sigma(0.5i)","v":"poly(0.5,0,1)","phi":"poly(0.1,0.5)","m":2,"alpha":1.5}"#,
            Bounded,
            Some(Compact),
            true,
        ),
        (
            r#"{"name":"contractive-m4","u":"z","v":"const(2)","phi":"compose(sigma(0.3),dilate(0.6,z))","m":4,"alpha":2}"#,
            Bounded,
            Some(Compact),
            true,
        ),
        (
            r#"{"name":"zero","u":"const(0)","v":"const(0)","phi":"z","m":2,"alpha":1}"#,
            Bounded,
            Some(Compact),
            false,
        ),
    ]
};

/// Scenarios with known verdicts, covering orders 1, 2 and 4.
pub fn bundled_suite() -> Vec<SuiteCase> {
    SUITE
        .iter()
        .map(|(src, bounded, compact, contractive)| SuiteCase {
            scenario: parse_scenario(src).expect("bundled scenario parses"),
            bounded: *bounded,
            compact: *compact,
            contractive: *contractive,
        })
        .collect()
}
