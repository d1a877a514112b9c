//! Semiring semantics for weighted sequence abstract reduction systems.
//!
//! A system maps each object to the rules applicable to it; every rule
//! carries an aggregator that combines the weights of the successors, and
//! normal forms carry a fixed weight. The weight of an object is the
//! supremum over all finite reduction trees rooted at it.
//!
//! The crate evaluates tree weights, approximates object weights from below
//! by value iteration, checks boundedness certificates and proves
//! unboundedness through increasing loops.

pub mod aggregator;
pub mod boundedness;
pub mod evaluator;
pub mod par;
pub mod random;
pub mod semiring;
pub mod system;
pub mod unboundedness;

pub use aggregator::AggregatorExpr;
pub use evaluator::{Budgets, ReductionTree, WeightBound, WeightStatus};
pub use semiring::{SemiringDescriptor, SemiringError, SemiringKind, SemiringValue};
pub use system::{ObjectId, RuleInstance, SystemHandle, WeightedSystem};
