//! Strict JSON parsing of curve-family specs.
//!
//! The schema mirrors [`CurveFamilySpec`]: `family` plus the optional
//! per-family parameters `R0`, `transition_lo`, `transition_hi`, `p_star`
//! and `exponent`. Unknown keys are rejected; per-family defaults and
//! applicability are enforced when the curve is built.

use serde::Deserialize;
use vaxdyn_core::{CurveFamily, CurveFamilySpec};

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCurveSpec {
    family: String,
    #[serde(rename = "R0", default)]
    r0: Option<f64>,
    #[serde(default)]
    transition_lo: Option<f64>,
    #[serde(default)]
    transition_hi: Option<f64>,
    #[serde(default)]
    p_star: Option<f64>,
    #[serde(default)]
    exponent: Option<u32>,
}

/// Parses a family name in either snake or kebab case.
pub fn parse_family(name: &str) -> Result<CurveFamily, CliError> {
    match name {
        "example1" => Ok(CurveFamily::Example1),
        "example2" => Ok(CurveFamily::Example2),
        "convex_test" | "convex-test" => Ok(CurveFamily::ConvexTest),
        "rational_glue" | "rational-glue" => Ok(CurveFamily::RationalGlue),
        other => Err(CliError::validation(format!(
            "unknown curve family `{other}` (expected example1, example2, convex-test or rational-glue)"
        ))),
    }
}

/// Parses a JSON curve-spec document. Strict: unknown keys are rejected
/// with the offending field named in the message.
pub fn parse_curve_spec(text: &str) -> Result<CurveFamilySpec, CliError> {
    let raw: RawCurveSpec = serde_json::from_str(text)
        .map_err(|e| CliError::validation(format!("curve spec: {e}")))?;
    let family = parse_family(&raw.family)?;
    Ok(CurveFamilySpec {
        family: Some(family),
        r0: raw.r0,
        transition_lo: raw.transition_lo,
        transition_hi: raw.transition_hi,
        p_star: raw.p_star,
        exponent: raw.exponent,
    })
}
