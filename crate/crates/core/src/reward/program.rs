//! Compiled reward programs: registry-checked expressions over factors.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ast::{parse, BinOp, Expr, SyntaxError};
use super::factors::{FactorValues, FACTOR_NAMES};
use super::spec::RewardSpec;

#[derive(Debug, Error, PartialEq)]
pub enum CompileError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("unknown identifier `{0}` (registered: {})", FACTOR_NAMES.join(", "))]
    UnknownIdentifier(String),
}

/// An executable reward expression. The expression describes a cost; the
/// training loop uses its negation as the reward.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardProgram {
    ast: Expr,
    identifiers: Vec<String>,
    source: String,
}

impl RewardProgram {
    /// Compiles an expression string, rejecting unregistered identifiers.
    pub fn compile_expression(expression: &str) -> Result<Self, CompileError> {
        let ast = parse(expression)?;
        let identifiers: Vec<String> = ast.identifiers().iter().map(|s| s.to_string()).collect();
        for ident in &identifiers {
            if !FACTOR_NAMES.contains(&ident.as_str()) {
                return Err(CompileError::UnknownIdentifier(ident.clone()));
            }
        }
        Ok(Self {
            source: ast.pretty(),
            ast,
            identifiers,
        })
    }

    /// Compiles the expression carried by a schema-valid [`RewardSpec`].
    pub fn compile(spec: &RewardSpec) -> Result<Self, CompileError> {
        Self::compile_expression(&spec.expression)
    }

    /// Raw expression value (the cost), by tree walk.
    pub fn evaluate(&self, values: &FactorValues) -> f64 {
        eval(&self.ast, values)
    }

    /// Reward seen by the agent: the negated cost.
    pub fn reward(&self, values: &FactorValues) -> f64 {
        -self.evaluate(values)
    }

    /// Identifiers referenced, in first-appearance order.
    pub fn identifiers(&self) -> &[String] {
        &self.identifiers
    }

    /// Canonical printed form of the compiled tree.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }
}

fn eval(expr: &Expr, values: &FactorValues) -> f64 {
    match expr {
        Expr::Number(n) => *n,
        // Identifiers were checked at compile time.
        Expr::Ident(name) => values.get(name).expect("registered identifier"),
        Expr::Neg(inner) => -eval(inner, values),
        Expr::Bin(op, l, r) => {
            let a = eval(l, values);
            let b = eval(r, values);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
            }
        }
    }
}

/// Serialized form of an accepted program: the spec it came from plus the
/// canonical expression actually compiled.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProgramArtifact {
    pub spec: RewardSpec,
    pub canonical_expression: String,
}

impl ProgramArtifact {
    pub fn new(spec: RewardSpec, program: &RewardProgram) -> Self {
        Self {
            spec,
            canonical_expression: program.source().to_string(),
        }
    }

    pub fn load_program(&self) -> Result<RewardProgram, CompileError> {
        RewardProgram::compile_expression(&self.canonical_expression)
    }
}
