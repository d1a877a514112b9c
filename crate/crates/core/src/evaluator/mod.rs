//! Reduction trees, their weights, value iteration and the brute-force
//! tree-enumeration oracle.

mod iterate;
mod oracle;
mod tree;

use serde::Serialize;

use crate::aggregator::AggregatorError;
use crate::semiring::{SemiringDescriptor, SemiringError, SemiringValue};
use crate::system::{Limits, SystemError};

pub use iterate::{
    evaluate_to_fixpoint, evaluate_to_fixpoint_with, lower_bound_series, weight_lower_bound, weight_lower_bound_with,
};
pub use oracle::{attainable_weights, enumerate_trees, oracle_equivalence, tree_count, OracleLevel};
pub use tree::{induced_fold, tree_weight, truncate, ReductionTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budgets {
    /// Rules considered per object.
    pub rule_budget: usize,
    /// Length infinite right-hand sides are cut to.
    pub branch_trunc: usize,
    /// Distinct objects an evaluation may touch.
    pub visit_cap: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            rule_budget: 16,
            branch_trunc: 16,
            visit_cap: 100_000,
        }
    }
}

impl Budgets {
    pub fn new(rule_budget: usize, branch_trunc: usize, visit_cap: usize) -> Self {
        Budgets {
            rule_budget: rule_budget.max(1),
            branch_trunc: branch_trunc.max(1),
            visit_cap: visit_cap.max(1),
        }
    }

    pub fn limits(&self) -> Limits {
        Limits::new(self.rule_budget, self.branch_trunc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightStatus {
    /// A sound lower bound on the weight.
    LowerBound,
    /// A genuine fixpoint of value iteration on a successor-closed,
    /// completely enumerated object set.
    Stabilized,
}

impl std::fmt::Display for WeightStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WeightStatus::LowerBound => "lower_bound",
            WeightStatus::Stabilized => "stabilized",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightBound {
    pub value: SemiringValue,
    pub status: WeightStatus,
    pub depth_explored: usize,
    pub budgets: Budgets,
    /// Distinct objects touched.
    pub visited: usize,
}

/// The serialized form of a [`WeightBound`], values in literal syntax.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvalReport {
    pub start: String,
    pub value: String,
    pub status: WeightStatus,
    pub depth: usize,
    pub budgets: Budgets,
    pub visited: usize,
}

impl WeightBound {
    pub fn report(&self, desc: &SemiringDescriptor, start: &str) -> EvalReport {
        EvalReport {
            start: start.to_string(),
            value: desc.format(&self.value),
            status: self.status,
            depth: self.depth_explored,
            budgets: self.budgets,
            visited: self.visited,
        }
    }
}

impl EvalReport {
    pub fn render_text(&self) -> String {
        format!(
            "{}: {} ({}, depth {}, visited {}, rule_budget {}, branch_trunc {}, visit_cap {})",
            self.start,
            self.value,
            self.status,
            self.depth,
            self.visited,
            self.budgets.rule_budget,
            self.budgets.branch_trunc,
            self.budgets.visit_cap
        )
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("visit cap of {cap} objects reached; partial lower bound {}", partial.value_text)]
    VisitCap { cap: usize, partial: Box<PartialBound> },
    #[error("more than {cap} reduction trees")]
    CountCap { cap: usize },
    #[error("invalid reduction tree at {node}: {msg}")]
    InvalidTree { node: String, msg: String },
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Aggregator(#[from] AggregatorError),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
}

/// The bound computed before a visit cap stopped exploration; it is still
/// a sound lower bound.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialBound {
    pub bound: WeightBound,
    pub value_text: String,
}
