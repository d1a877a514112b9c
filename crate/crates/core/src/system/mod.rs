//! Weighted sequence reduction systems: the trait, object identifiers, the
//! explicit-file loader and the built-in example families.

mod builtins;
mod cplx;
mod explicit;
mod object;
mod registry;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::aggregator::{AggregatorError, AggregatorExpr, ParseError};
use crate::semiring::{ExtNat, SemiringDescriptor, SemiringError, SemiringValue};

pub use builtins::{
    addition_trs_ground, boolean_provenance, geometric_walk, na_system, os_fair, os_runtime, os_size, os_starv,
    prefix_words, ski_rental, walk_expected, walk_termprob, z_walk_safety, BoolCosts, OsWeights, WalkWeights,
};
pub use cplx::cplx_wrap;
pub use explicit::{ExplicitSystem, RuleSpec, SystemFile};
pub use object::{Formula, ObjectId, OsMode, SkiConfig, SkiStmt, Term};
pub use registry::{builtin_catalog, load_system, parse_builtin_spec, BuiltinInfo};

pub type SystemHandle = Arc<dyn WeightedSystem>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SystemError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("`{0}` is not a normal form")]
    NotNormalForm(String),
    #[error("cannot parse object `{text}`: {msg}")]
    BadObject { text: String, msg: String },
    #[error("unknown built-in system `{0}`")]
    UnknownBuiltin(String),
    #[error("bad parameter for {system}: {msg}")]
    BadParam { system: String, msg: String },
    #[error("bad system spec `{0}` (expected builtin:<name>(k=v,...) or file:<path>)")]
    BadSpec(String),
    #[error("system file: {0}")]
    File(String),
    #[error("dangling object reference `{0}`: it has no rules and no normal-form weight")]
    Dangling(String),
    #[error("normal-form weight given for `{0}`, which has rules")]
    WeightOnNonNormalForm(String),
    #[error("rule {tag}: aggregator uses v{index} but the right-hand side has {len} object(s)")]
    RuleArity { tag: String, index: u64, len: usize },
    #[error("rule {tag}: empty right-hand side")]
    EmptyRhs { tag: String },
    #[error("rule {tag}: {source}")]
    Aggregator { tag: String, source: ParseError },
    #[error(transparent)]
    Eval(#[from] AggregatorError),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
}

/// A three-valued claim about a property of the underlying relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Claim {
    Asserted,
    Refuted,
    Unknown,
}

impl Claim {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Claim::Asserted
        } else {
            Claim::Refuted
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Claim::Asserted => "asserted",
            Claim::Refuted => "refuted",
            Claim::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Metadata {
    pub deterministic: Claim,
    pub finitely_nondeterministic: Claim,
    pub finitely_branching: Claim,
    pub terminating: Claim,
}

/// Enumeration budgets for a single successor query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// At most this many rules are returned.
    pub rules: usize,
    /// Infinite right-hand sides are cut to this many objects.
    pub branches: usize,
}

impl Limits {
    pub fn new(rules: usize, branches: usize) -> Self {
        Limits {
            rules: rules.max(1),
            branches: branches.max(1),
        }
    }
}

/// One applicable rule `lhs → rhs` with its aggregator.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleInstance {
    pub lhs: ObjectId,
    pub rhs: Vec<ObjectId>,
    /// False when `rhs` is a finite prefix of an infinite sequence.
    pub rhs_complete: bool,
    pub aggregator: Arc<AggregatorExpr>,
    pub tag: String,
}

impl RuleInstance {
    pub fn new(lhs: ObjectId, rhs: Vec<ObjectId>, aggregator: Arc<AggregatorExpr>, tag: impl Into<String>) -> Self {
        RuleInstance {
            lhs,
            rhs,
            rhs_complete: true,
            aggregator,
            tag: tag.into(),
        }
    }

    /// Checks `maxV(aggr) ≤ |rhs|` for complete right-hand sides.
    pub fn check_arity(&self) -> Result<(), SystemError> {
        if self.rhs.is_empty() {
            return Err(SystemError::EmptyRhs { tag: self.tag.clone() });
        }
        if self.rhs_complete {
            if let ExtNat::Fin(k) = self.aggregator.max_var() {
                if k as usize > self.rhs.len() {
                    return Err(SystemError::RuleArity {
                        tag: self.tag.clone(),
                        index: k,
                        len: self.rhs.len(),
                    });
                }
            } else if !self.aggregator.is_finite() {
                return Err(SystemError::RuleArity {
                    tag: self.tag.clone(),
                    index: u64::MAX,
                    len: self.rhs.len(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Successors {
    pub rules: Vec<RuleInstance>,
    /// True when no further rules exist beyond those returned.
    pub complete: bool,
}

impl Successors {
    pub fn none() -> Self {
        Successors {
            rules: Vec::new(),
            complete: true,
        }
    }

    pub fn all(rules: Vec<RuleInstance>) -> Self {
        Successors { rules, complete: true }
    }

    /// Keeps the first `limit` rules.
    pub fn capped(mut rules: Vec<RuleInstance>, limit: usize) -> Self {
        let complete = rules.len() <= limit;
        rules.truncate(limit);
        Successors { rules, complete }
    }
}

/// A weighted sequence abstract reduction system.
pub trait WeightedSystem: Send + Sync {
    fn name(&self) -> String;

    fn semiring(&self) -> &SemiringDescriptor;

    /// Rules applicable to `a`, in a fixed order.
    fn successors(&self, a: &ObjectId, limits: Limits) -> Result<Successors, SystemError>;

    fn is_normal_form(&self, a: &ObjectId) -> Result<bool, SystemError> {
        let s = self.successors(a, Limits::new(1, 1))?;
        Ok(s.rules.is_empty() && s.complete)
    }

    /// `f_NF(a)`; an error when `a` is not a normal form.
    fn nf_weight(&self, a: &ObjectId) -> Result<SemiringValue, SystemError>;

    fn metadata(&self) -> Metadata;

    fn parse_object(&self, text: &str) -> Result<ObjectId, SystemError>;

    /// Every object, for finite systems.
    fn all_objects(&self) -> Option<Vec<ObjectId>> {
        None
    }

    /// The first `n` objects of a fixed canonical enumeration.
    fn enumerate_objects(&self, n: usize) -> Vec<ObjectId> {
        self.all_objects()
            .map(|mut v| {
                v.truncate(n);
                v
            })
            .unwrap_or_default()
    }

    /// A random object, for sampled checks of infinite families.
    fn random_object(&self, rng: &mut ChaCha8Rng) -> Option<ObjectId> {
        use rand::seq::SliceRandom;
        self.all_objects().and_then(|v| v.choose(rng).cloned())
    }

    /// Canonical object a run starts from when none is given.
    fn default_start(&self) -> Option<ObjectId> {
        None
    }
}

/// Collects every rule of a finite object set, for exhaustive checks.
pub fn all_rules(
    sys: &dyn WeightedSystem,
    objects: &[ObjectId],
    limits: Limits,
) -> Result<BTreeMap<ObjectId, Successors>, SystemError> {
    objects
        .iter()
        .map(|a| Ok((a.clone(), sys.successors(a, limits)?)))
        .collect()
}
