//! Simulation laboratory for UAV-assisted IoT data collection.
//!
//! A UAV charges energy-harvesting terminals over the air, collects their
//! packets, and relays them to a macro base station. Continuous-control
//! agents (DDPG / TD3) learn movement policies against a reward that is
//! either hand-written or produced by an LLM through a prompt / validate /
//! reflect pipeline. The [`harness`] module reproduces the manual-vs-LLM
//! comparisons as seeded, machine-readable experiments.
//!
//! Module map:
//! - [`env`] — the slotted-time world: channel, power, harvesting, constraints
//! - [`agents`] — from-scratch MLP actor-critic learners with replay
//! - [`reward`] — reward DSL (parse, compile, evaluate), prompts, validation gates
//! - [`llm`] — chat-completion providers: live HTTP, fixture replay, scripted
//! - [`harness`] — seeded training runs, arm comparisons, packet-size sweeps

pub mod agents;
pub mod config;
pub mod env;
pub mod harness;
pub mod llm;
pub mod reward;
pub mod seed;

pub use env::{Action, Environment, Observation, StepOutcome, WorldConfig};
pub use reward::FactorValues;
