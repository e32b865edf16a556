//! Prompt assembly for the reward designer.
//!
//! The prompt has two elements. The role definition tells the model what it
//! is (a reward designer), the rules it must follow, and the exact response
//! format. The task description carries the system model, the optimization
//! objective, the factor registry, and the input/output conventions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One registry entry shown to the model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorDescriptor {
    pub name: String,
    pub description: String,
}

/// What the model is told about the world.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorldDescriptor {
    pub system_summary: String,
    pub factors: Vec<FactorDescriptor>,
}

impl WorldDescriptor {
    /// The standard description of this environment and its registry.
    pub fn standard() -> Self {
        Self {
            system_summary: "A rotary-wing UAV flies at fixed altitude and constant cruise \
speed over a square area containing energy-harvesting IoT terminals. Each slot the UAV \
moves or hovers, broadcasts wireless charging power to undelivered terminals, and collects \
one uplink transmission which it relays to a macro base station. Terminals can only spend \
energy they have harvested. An episode ends when every packet is delivered or when the \
slot horizon runs out. Constraints cover transmit power limits, minimum throughput, \
decoding reliability, and data freshness."
                .into(),
            factors: vec![
                FactorDescriptor {
                    name: "energy".into(),
                    description: "total system energy spent this slot (terminal transmissions, \
propulsion, charging broadcast, relay), normalized into [0, 1] by the worst-case slot energy"
                        .into(),
                },
                FactorDescriptor {
                    name: "position".into(),
                    description: "distance from the UAV to the centroid of undelivered \
terminals, normalized into [0, 1] by the area diagonal; 0 when everything is delivered"
                        .into(),
                },
                FactorDescriptor {
                    name: "aoi".into(),
                    description: "largest age of information among undelivered packets as a \
fraction of the freshness deadline, clamped into [0, 1]".into(),
                },
                FactorDescriptor {
                    name: "throughput".into(),
                    description: "bits decoded this slot as a fraction of the reference slot \
capacity, in [0, 1]".into(),
                },
                FactorDescriptor {
                    name: "penalty".into(),
                    description: "1 on clean slots; a fixed multiplier greater than 1 when any \
constraint (throughput, decoding, freshness) was violated this slot".into(),
                },
            ],
        }
    }
}

/// The two prompt elements, assembled deterministically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub role_definition: String,
    pub task_description: String,
}

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("factor registry is empty")]
    EmptyRegistry,
    #[error("objective text is empty")]
    EmptyObjective,
}

/// Builds the prompt bundle. Identical inputs produce byte-identical output.
pub fn build_prompt(
    descriptor: &WorldDescriptor,
    objective: &str,
) -> Result<PromptBundle, PromptError> {
    if descriptor.factors.is_empty() {
        return Err(PromptError::EmptyRegistry);
    }
    if objective.trim().is_empty() {
        return Err(PromptError::EmptyObjective);
    }

    let role_definition = "\
You are a reward designer for a reinforcement-learning agent. Your function is to \
comprehend the system model of the task, reason about the observations and the factors \
provided to you, and produce a reward specification that guides the agent toward the \
stated objective.

Rules you must follow:
- Use only the factors listed in the task description. Do not use information that is \
not given, and do not invent quantities, constants with physical meaning, or factors \
outside the registry.
- Focus on the few most relevant factors rather than using everything available.
- The expression describes a per-slot cost: smaller is better. The training loop negates \
it to form the reward.
- Keep the expression bounded: with every factor in its documented range the absolute \
value must stay below 1000, and the expression must never divide by a quantity that can \
be zero.

Output format: respond with a single JSON object and nothing else. The object must have \
exactly these fields:
{
  \"factors\": [{\"name\": \"<registered factor>\", \"weight\": <number>}, ...],
  \"expression\": \"<arithmetic expression>\",
  \"rationale\": \"<one short paragraph>\"
}
The expression may use the registered factor names, numeric literals, parentheses, and \
the operators + - * /. No function calls, no comparisons, no other syntax."
        .to_string();

    let mut task_description = String::new();
    task_description.push_str("System model:\n");
    task_description.push_str(&descriptor.system_summary);
    task_description.push_str("\n\nOptimization objective: ");
    task_description.push_str(objective);
    task_description.push_str("\n\nFactor registry (per-slot inputs your expression may reference):\n");
    for f in &descriptor.factors {
        task_description.push_str("- ");
        task_description.push_str(&f.name);
        task_description.push_str(": ");
        task_description.push_str(&f.description);
        task_description.push('\n');
    }
    task_description.push_str(
        "\nInput format: at every slot the expression is evaluated on the factor values \
above. Output format: the JSON object described in your role definition; the \
\"expression\" field is the reward function. Infer which factors matter for the \
objective and weight them accordingly.",
    );

    Ok(PromptBundle {
        role_definition,
        task_description,
    })
}
