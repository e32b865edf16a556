//! Candidate validation: the gate chain and its probe battery.
//!
//! Gates run in a fixed order and short-circuit at the first failure:
//! response_success, json_valid, schema_valid, parse_valid,
//! return_type_numeric_finite, boundedness. A candidate is accepted iff
//! every gate passed.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::factors::{FactorValues, DEFAULT_PENALTY_MULTIPLIER};
use super::program::RewardProgram;
use super::spec::{parse_response, ResponseError, RewardSpec};
use crate::llm::ProviderError;
use crate::seed;

/// Absolute bound a candidate must respect on every probe.
pub const BOUNDEDNESS_LIMIT: f64 = 1.0e3;

/// Minimum battery size.
pub const MIN_PROBES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateStatus {
    Passed,
    Failed(String),
    /// An earlier gate failed first.
    Skipped,
}

impl GateStatus {
    pub fn passed(&self) -> bool {
        matches!(self, GateStatus::Passed)
    }
}

/// Outcome of the full gate chain for one candidate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub response_success: GateStatus,
    pub json_valid: GateStatus,
    pub schema_valid: GateStatus,
    pub parse_valid: GateStatus,
    pub return_type_numeric_finite: GateStatus,
    pub boundedness: GateStatus,
    pub accepted: bool,
}

impl ValidationReport {
    fn all_skipped() -> Self {
        Self {
            response_success: GateStatus::Skipped,
            json_valid: GateStatus::Skipped,
            schema_valid: GateStatus::Skipped,
            parse_valid: GateStatus::Skipped,
            return_type_numeric_finite: GateStatus::Skipped,
            boundedness: GateStatus::Skipped,
            accepted: false,
        }
    }

    /// Gate results in chain order, for reflection feedback and logs.
    pub fn gates(&self) -> [(&'static str, &GateStatus); 6] {
        [
            ("response_success", &self.response_success),
            ("json_valid", &self.json_valid),
            ("schema_valid", &self.schema_valid),
            ("parse_valid", &self.parse_valid),
            ("return_type_numeric_finite", &self.return_type_numeric_finite),
            ("boundedness", &self.boundedness),
        ]
    }

    /// The failing gate and its message, if any.
    pub fn failure(&self) -> Option<(&'static str, &str)> {
        self.gates().into_iter().find_map(|(name, status)| match status {
            GateStatus::Failed(msg) => Some((name, msg.as_str())),
            _ => None,
        })
    }
}

/// Deterministic battery of factor inputs: range corners under both penalty
/// levels plus seeded random interiors.
#[derive(Debug, Clone)]
pub struct ProbeBattery {
    values: Vec<FactorValues>,
}

impl ProbeBattery {
    pub fn seeded(seed: u64, penalty_multiplier: f64) -> Self {
        let mut values = Vec::with_capacity(MIN_PROBES);
        for penalty in [1.0, penalty_multiplier] {
            for level in [0.0, 1.0] {
                values.push(FactorValues {
                    energy: level,
                    position: level,
                    aoi: level,
                    throughput: level,
                    penalty,
                });
            }
        }
        let mut rng = seed::rng(seed, 0xba77e7);
        while values.len() < MIN_PROBES {
            let penalty = if rng.gen_bool(0.5) {
                1.0
            } else {
                penalty_multiplier
            };
            values.push(FactorValues {
                energy: rng.gen_range(0.0..=1.0),
                position: rng.gen_range(0.0..=1.0),
                aoi: rng.gen_range(0.0..=1.0),
                throughput: rng.gen_range(0.0..=1.0),
                penalty,
            });
        }
        Self { values }
    }

    pub fn values(&self) -> &[FactorValues] {
        &self.values
    }
}

impl Default for ProbeBattery {
    fn default() -> Self {
        Self::seeded(0x5eed, DEFAULT_PENALTY_MULTIPLIER)
    }
}

/// Runs only the numeric gates on an already-compiled program.
pub fn validate_program(program: &RewardProgram, battery: &ProbeBattery) -> ValidationReport {
    let mut report = ValidationReport {
        response_success: GateStatus::Passed,
        json_valid: GateStatus::Passed,
        schema_valid: GateStatus::Passed,
        parse_valid: GateStatus::Passed,
        return_type_numeric_finite: GateStatus::Skipped,
        boundedness: GateStatus::Skipped,
        accepted: false,
    };
    run_probe_gates(program, battery, &mut report);
    report.accepted = report.gates().iter().all(|(_, s)| s.passed());
    report
}

fn run_probe_gates(program: &RewardProgram, battery: &ProbeBattery, report: &mut ValidationReport) {
    for (idx, values) in battery.values().iter().enumerate() {
        let value = program.evaluate(values);
        if !value.is_finite() {
            report.return_type_numeric_finite = GateStatus::Failed(format!(
                "probe {idx} produced a non-finite value ({value}) on inputs {values:?}"
            ));
            return;
        }
    }
    report.return_type_numeric_finite = GateStatus::Passed;
    for (idx, values) in battery.values().iter().enumerate() {
        let value = program.evaluate(values);
        if value.abs() > BOUNDEDNESS_LIMIT {
            report.boundedness = GateStatus::Failed(format!(
                "probe {idx} produced |{value}| > {BOUNDEDNESS_LIMIT} on inputs {values:?}"
            ));
            return;
        }
    }
    report.boundedness = GateStatus::Passed;
}

/// Runs the full gate chain on one provider outcome.
///
/// Returns the compiled program when the candidate is accepted.
pub fn validate_candidate(
    response: Result<&str, &ProviderError>,
    battery: &ProbeBattery,
) -> (ValidationReport, Option<RewardSpec>, Option<RewardProgram>) {
    let mut report = ValidationReport::all_skipped();

    let raw = match response {
        Ok(text) => {
            report.response_success = GateStatus::Passed;
            text
        }
        Err(e) => {
            report.response_success = GateStatus::Failed(e.to_string());
            return (report, None, None);
        }
    };

    let spec = match parse_response(raw) {
        Ok(spec) => {
            report.json_valid = GateStatus::Passed;
            report.schema_valid = GateStatus::Passed;
            spec
        }
        Err(ResponseError::Json(msg)) => {
            report.json_valid = GateStatus::Failed(msg);
            return (report, None, None);
        }
        Err(ResponseError::Schema(msg)) => {
            report.json_valid = GateStatus::Passed;
            report.schema_valid = GateStatus::Failed(msg);
            return (report, None, None);
        }
    };

    let program = match RewardProgram::compile(&spec) {
        Ok(program) => {
            report.parse_valid = GateStatus::Passed;
            program
        }
        Err(e) => {
            report.parse_valid = GateStatus::Failed(e.to_string());
            return (report, Some(spec), None);
        }
    };

    run_probe_gates(&program, battery, &mut report);
    report.accepted = report.gates().iter().all(|(_, s)| s.passed());
    let accepted = report.accepted;
    (report, Some(spec), accepted.then_some(program))
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: &str = r#"{"factors":[{"name":"energy","weight":0.6},{"name":"position","weight":0.4}],"expression":"(0.6*energy + 0.4*position)*penalty","rationale":"r"}"#;

    #[test]
    fn battery_covers_corners_and_size() {
        let battery = ProbeBattery::default();
        assert!(battery.values().len() >= MIN_PROBES);
        let has = |energy: f64, penalty: f64| {
            battery
                .values()
                .iter()
                .any(|v| v.energy == energy && v.penalty == penalty)
        };
        assert!(has(0.0, 1.0) && has(1.0, 1.0) && has(0.0, 2.0) && has(1.0, 2.0));
        // Deterministic across constructions.
        let again = ProbeBattery::default();
        assert_eq!(battery.values(), again.values());
    }

    #[test]
    fn reference_formula_passes_every_gate() {
        let (report, spec, program) = validate_candidate(Ok(REFERENCE), &ProbeBattery::default());
        assert!(report.accepted, "{report:?}");
        assert!(spec.is_some() && program.is_some());
    }

    #[test]
    fn provider_failure_short_circuits() {
        let err = ProviderError::Timeout(std::time::Duration::from_secs(5));
        let (report, spec, program) = validate_candidate(Err(&err), &ProbeBattery::default());
        assert!(!report.accepted);
        assert!(matches!(report.response_success, GateStatus::Failed(_)));
        assert_eq!(report.json_valid, GateStatus::Skipped);
        assert_eq!(report.boundedness, GateStatus::Skipped);
        assert!(spec.is_none() && program.is_none());
    }

    #[test]
    fn division_by_zero_probe_fails_the_finiteness_gate() {
        let raw = r#"{"factors":[],"expression":"energy/position","rationale":""}"#;
        let (report, _, program) = validate_candidate(Ok(raw), &ProbeBattery::default());
        assert!(matches!(
            report.return_type_numeric_finite,
            GateStatus::Failed(_)
        ));
        assert_eq!(report.boundedness, GateStatus::Skipped);
        assert!(program.is_none());
    }

    #[test]
    fn unbounded_expression_fails_the_bound_gate() {
        let raw = r#"{"factors":[],"expression":"5000 * energy","rationale":""}"#;
        let (report, _, _) = validate_candidate(Ok(raw), &ProbeBattery::default());
        assert!(matches!(report.return_type_numeric_finite, GateStatus::Passed));
        assert!(matches!(report.boundedness, GateStatus::Failed(_)));
    }

    #[test]
    fn unknown_identifier_fails_parse_gate_with_name() {
        let raw = r#"{"factors":[],"expression":"speed * energy","rationale":""}"#;
        let (report, spec, _) = validate_candidate(Ok(raw), &ProbeBattery::default());
        assert!(spec.is_some());
        match &report.parse_valid {
            GateStatus::Failed(msg) => assert!(msg.contains("speed"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn accepted_iff_all_gates_pass() {
        let battery = ProbeBattery::default();
        let program = RewardProgram::compile_expression("energy * penalty").unwrap();
        let report = validate_program(&program, &battery);
        assert!(report.accepted);
        assert!(report.gates().iter().all(|(_, s)| s.passed()));
    }
}
