//! Reward design: factor registry, expression DSL, prompts, validation
//! gates, and the reflection pipeline.

mod ast;
mod factors;
mod pipeline;
mod program;
mod prompt;
mod spec;
mod validate;

pub use ast::{parse, BinOp, Expr, SyntaxError};
pub use factors::{manual_reward, FactorValues, DEFAULT_PENALTY_MULTIPLIER, FACTOR_NAMES};
pub use pipeline::{
    design_reward, AuditTrail, CandidateRecord, DesignConfig, DesignOutcome, PipelineError,
};
pub use program::{CompileError, ProgramArtifact, RewardProgram};
pub use prompt::{build_prompt, FactorDescriptor, PromptBundle, PromptError, WorldDescriptor};
pub use spec::{parse_response, FactorWeight, ResponseError, RewardSpec};
pub use validate::{
    validate_candidate, validate_program, GateStatus, ProbeBattery, ValidationReport,
    BOUNDEDNESS_LIMIT, MIN_PROBES,
};

/// Default weight of the hand-written baseline reward.
pub const DEFAULT_MANUAL_WEIGHT: f64 = 1.0;

/// The reference LLM-designed formula used by offline comparison arms.
pub const REFERENCE_LLM_EXPRESSION: &str = "(0.6*energy + 0.4*position)*penalty";

/// Compiles [`REFERENCE_LLM_EXPRESSION`].
pub fn reference_llm_program() -> RewardProgram {
    RewardProgram::compile_expression(REFERENCE_LLM_EXPRESSION)
        .expect("reference expression compiles")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_program_passes_validation() {
        let program = reference_llm_program();
        let report = validate_program(&program, &ProbeBattery::default());
        assert!(report.accepted);
    }

    #[test]
    fn penalty_monotonicity_for_weighted_sum_times_penalty_family() {
        // For non-negative weighted sums scaled by the penalty factor, a
        // flagged slot can never look better than a clean one.
        let program = reference_llm_program();
        let mut rng = crate::seed::rng(5, 0);
        use rand::Rng;
        for _ in 0..200 {
            let base = FactorValues {
                energy: rng.gen_range(0.0..=1.0),
                position: rng.gen_range(0.0..=1.0),
                aoi: rng.gen_range(0.0..=1.0),
                throughput: rng.gen_range(0.0..=1.0),
                penalty: 1.0,
            };
            let flagged = FactorValues {
                penalty: DEFAULT_PENALTY_MULTIPLIER,
                ..base
            };
            assert!(program.reward(&flagged) <= program.reward(&base) + 1e-15);
        }
    }

    #[test]
    fn position_factor_minimized_at_centroid() {
        // Grid-search the factor definition on a small instance: distance to
        // the undelivered centroid is uniquely minimized at the centroid.
        let terminals = [[40.0, 60.0], [120.0, 200.0], [260.0, 100.0]];
        let centroid = [
            terminals.iter().map(|t| t[0]).sum::<f64>() / 3.0,
            terminals.iter().map(|t| t[1]).sum::<f64>() / 3.0,
        ];
        let diag = 300.0 * std::f64::consts::SQRT_2;
        let position_factor = |uav: [f64; 2]| {
            (((uav[0] - centroid[0]).powi(2) + (uav[1] - centroid[1]).powi(2)).sqrt() / diag)
                .clamp(0.0, 1.0)
        };
        let mut best = (f64::INFINITY, [0.0, 0.0]);
        for i in 0..=60 {
            for j in 0..=60 {
                let p = [300.0 * i as f64 / 60.0, 300.0 * j as f64 / 60.0];
                let v = position_factor(p);
                if v < best.0 {
                    best = (v, p);
                }
            }
        }
        assert!((best.1[0] - centroid[0]).abs() <= 300.0 / 60.0);
        assert!((best.1[1] - centroid[1]).abs() <= 300.0 / 60.0);
        assert!(position_factor(centroid) < best.0 + 1e-12);
    }
}
