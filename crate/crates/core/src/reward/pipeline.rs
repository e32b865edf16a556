//! The reward-design loop: request candidates, validate, reflect, repeat.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::prompt::PromptBundle;
use super::program::{ProgramArtifact, RewardProgram};
use super::spec::RewardSpec;
use super::validate::{validate_candidate, ProbeBattery, ValidationReport};
use crate::llm::{ChatMessage, ChatProvider, ChatRequest, ProviderError};

/// Knobs for one design session.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignConfig {
    /// Candidates requested per round.
    pub k_candidates: usize,
    /// Reflection rounds allowed after the first.
    pub max_reflections: u32,
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
}

impl Default for DesignConfig {
    fn default() -> Self {
        Self {
            k_candidates: 3,
            max_reflections: 5,
            model: "gpt-4o".into(),
            temperature: 0.7,
            max_tokens: 1024,
        }
    }
}

/// Everything observed about one candidate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateRecord {
    /// Reflection round the candidate belongs to (0 = first attempt).
    pub round: u32,
    /// Position within the round.
    pub index: usize,
    /// Raw provider text, absent when the provider call itself failed.
    pub raw_response: Option<String>,
    /// Parsed spec, when the schema gates passed.
    pub spec: Option<RewardSpec>,
    pub report: ValidationReport,
}

/// Complete record of a design session.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AuditTrail {
    pub candidates: Vec<CandidateRecord>,
    /// Rounds actually executed.
    pub rounds: u32,
}

impl AuditTrail {
    pub fn failures(&self) -> usize {
        self.candidates.iter().filter(|c| !c.report.accepted).count()
    }
}

/// Result of a design session that ran to completion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum DesignOutcome {
    Accepted {
        artifact: ProgramArtifact,
        /// Round on which the accepted candidate appeared (0-based).
        round: u32,
        trail: AuditTrail,
    },
    /// Every round exhausted without an accepted candidate.
    Exhausted { trail: AuditTrail },
}

impl DesignOutcome {
    pub fn accepted_program(&self) -> Option<RewardProgram> {
        match self {
            DesignOutcome::Accepted { artifact, .. } => artifact.load_program().ok(),
            DesignOutcome::Exhausted { .. } => None,
        }
    }

    pub fn trail(&self) -> &AuditTrail {
        match self {
            DesignOutcome::Accepted { trail, .. } => trail,
            DesignOutcome::Exhausted { trail } => trail,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("k_candidates must be at least 1")]
    NoCandidates,
    /// Configuration-level provider problems abort the session; response
    /// failures are data and feed the response_success gate instead.
    #[error("provider configuration error: {0}")]
    Provider(#[from] ProviderError),
}

/// Runs the design loop against `provider`.
///
/// Each round issues `k_candidates` requests and validates every response.
/// The first accepted candidate wins. When a round produces none, the gate
/// failures are appended to the conversation and the loop reflects, up to
/// `max_reflections` extra rounds.
pub fn design_reward(
    prompt: &PromptBundle,
    provider: &mut dyn ChatProvider,
    config: &DesignConfig,
    battery: &ProbeBattery,
) -> Result<DesignOutcome, PipelineError> {
    if config.k_candidates == 0 {
        return Err(PipelineError::NoCandidates);
    }
    let mut messages = vec![
        ChatMessage::system(prompt.role_definition.clone()),
        ChatMessage::user(prompt.task_description.clone()),
    ];
    let mut trail = AuditTrail::default();

    for round in 0..=config.max_reflections {
        trail.rounds = round + 1;
        let mut round_failures = Vec::new();
        for index in 0..config.k_candidates {
            let request = ChatRequest {
                model: config.model.clone(),
                messages: messages.clone(),
                temperature: config.temperature,
                max_tokens: config.max_tokens,
            };
            let response = provider.complete(&request);
            let (raw, outcome) = match &response {
                Ok(r) => (Some(r.content.clone()), Ok(r.content.as_str())),
                Err(e) if e.is_response_failure() => (None, Err(e)),
                Err(_) => {
                    return Err(PipelineError::Provider(response.unwrap_err()));
                }
            };
            let (report, spec, program) = validate_candidate(outcome, battery);
            let accepted = program.is_some();
            if let Some((gate, message)) = report.failure() {
                round_failures.push(format!("candidate {}: {gate}: {message}", index + 1));
            }
            trail.candidates.push(CandidateRecord {
                round,
                index,
                raw_response: raw,
                spec: spec.clone(),
                report,
            });
            if let Some(program) = program {
                let spec = spec.expect("accepted candidates carry a spec");
                return Ok(DesignOutcome::Accepted {
                    artifact: ProgramArtifact::new(spec, &program),
                    round,
                    trail,
                });
            }
        }
        // Reflection: feed the failures back and try again.
        if round < config.max_reflections {
            let mut feedback = format!(
                "None of the {} candidate(s) in round {} passed validation:\n",
                config.k_candidates,
                round + 1
            );
            for line in &round_failures {
                feedback.push_str("- ");
                feedback.push_str(line);
                feedback.push('\n');
            }
            feedback.push_str(
                "Reflect on these failures from a logical-consistency perspective and \
respond again with a corrected JSON object in the required format.",
            );
            messages.push(ChatMessage::user(feedback));
        }
    }
    Ok(DesignOutcome::Exhausted { trail })
}
