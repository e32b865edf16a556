//! The declarative reward specification an LLM responds with, and the
//! response parsing that turns raw model text into one.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::factors::FACTOR_NAMES;

/// One weighted factor declaration.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FactorWeight {
    pub name: String,
    pub weight: f64,
}

/// The reward contract: declared factors, an arithmetic expression over the
/// registry, and the model's reasoning.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RewardSpec {
    pub factors: Vec<FactorWeight>,
    pub expression: String,
    #[serde(default)]
    pub rationale: String,
}

#[derive(Debug, Error, PartialEq)]
pub enum ResponseError {
    /// No parseable JSON object anywhere in the response.
    #[error("no valid JSON object in response: {0}")]
    Json(String),
    /// JSON was found but does not match the reward-spec schema.
    #[error("response JSON does not match the expected schema: {0}")]
    Schema(String),
}

/// Extracts the first JSON object from `raw` and checks it against the
/// [`RewardSpec`] schema.
///
/// Models often wrap their JSON in prose or code fences; everything outside
/// the first balanced object is ignored.
pub fn parse_response(raw: &str) -> Result<RewardSpec, ResponseError> {
    let object_text = first_json_object(raw)
        .ok_or_else(|| ResponseError::Json("no balanced `{ ... }` object found".into()))?;
    let value: serde_json::Value = serde_json::from_str(object_text)
        .map_err(|e| ResponseError::Json(format!("object does not parse as JSON: {e}")))?;
    let spec: RewardSpec = serde_json::from_value(value)
        .map_err(|e| ResponseError::Schema(e.to_string()))?;
    validate_schema(&spec)?;
    Ok(spec)
}

fn validate_schema(spec: &RewardSpec) -> Result<(), ResponseError> {
    if spec.expression.trim().is_empty() {
        return Err(ResponseError::Schema("`expression` is empty".into()));
    }
    for f in &spec.factors {
        if !FACTOR_NAMES.contains(&f.name.as_str()) {
            return Err(ResponseError::Schema(format!(
                "factor `{}` is not in the registry ({})",
                f.name,
                FACTOR_NAMES.join(", ")
            )));
        }
        if !f.weight.is_finite() {
            return Err(ResponseError::Schema(format!(
                "factor `{}` has non-finite weight {}",
                f.name, f.weight
            )));
        }
    }
    Ok(())
}

/// Finds the first balanced `{...}` region, honoring JSON strings and escapes.
fn first_json_object(raw: &str) -> Option<&str> {
    let bytes = raw.as_bytes();
    let start = raw.find('{')?;
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (offset, &b) in bytes[start..].iter().enumerate() {
        if in_string {
            if escaped {
                escaped = false;
            } else if b == b'\\' {
                escaped = true;
            } else if b == b'"' {
                in_string = false;
            }
            continue;
        }
        match b {
            b'"' => in_string = true,
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(&raw[start..start + offset + 1]);
                }
            }
            _ => {}
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: &str = r#"{"factors":[{"name":"energy","weight":0.6},{"name":"position","weight":0.4}],"expression":"(0.6*energy + 0.4*position)*penalty","rationale":"balance spent energy against staying near pending terminals"}"#;

    #[test]
    fn reference_response_parses() {
        let spec = parse_response(REFERENCE).unwrap();
        assert_eq!(spec.factors.len(), 2);
        assert_eq!(spec.factors[0].name, "energy");
        assert_eq!(spec.factors[0].weight, 0.6);
        assert_eq!(spec.expression, "(0.6*energy + 0.4*position)*penalty");
    }

    #[test]
    fn json_inside_prose_and_fences_is_found() {
        let wrapped = format!("Here is my design:\n```json\n{REFERENCE}\n```\nHope it helps!");
        let spec = parse_response(&wrapped).unwrap();
        assert_eq!(spec.factors.len(), 2);
    }

    #[test]
    fn text_without_braces_fails_the_json_gate() {
        assert!(matches!(
            parse_response("no structure here at all"),
            Err(ResponseError::Json(_))
        ));
    }

    #[test]
    fn unbalanced_or_invalid_json_fails_the_json_gate() {
        assert!(matches!(
            parse_response("{\"factors\": ["),
            Err(ResponseError::Json(_))
        ));
        assert!(matches!(
            parse_response("{not json}"),
            Err(ResponseError::Json(_))
        ));
    }

    #[test]
    fn textual_weight_fails_the_schema_gate() {
        let raw = r#"{"factors":[{"name":"energy","weight":"high"}],"expression":"energy","rationale":""}"#;
        assert!(matches!(parse_response(raw), Err(ResponseError::Schema(_))));
    }

    #[test]
    fn unregistered_factor_name_fails_the_schema_gate() {
        let raw = r#"{"factors":[{"name":"velocity","weight":1.0}],"expression":"energy","rationale":""}"#;
        let err = parse_response(raw).unwrap_err();
        match err {
            ResponseError::Schema(msg) => assert!(msg.contains("velocity"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_expression_fails_the_schema_gate() {
        let raw = r#"{"factors":[],"rationale":"thoughts"}"#;
        assert!(matches!(parse_response(raw), Err(ResponseError::Schema(_))));
    }

    #[test]
    fn braces_inside_strings_do_not_confuse_extraction() {
        let raw = r#"{"factors":[],"expression":"energy","rationale":"uses { weird } text"}"#;
        let spec = parse_response(raw).unwrap();
        assert_eq!(spec.rationale, "uses { weird } text");
    }
}
