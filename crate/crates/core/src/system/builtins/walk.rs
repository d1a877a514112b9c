use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{bad_object, claims};
use crate::aggregator::{AggregatorExpr, CountableSum};
use crate::semiring::{ExtReal, SemiringDescriptor, SemiringValue};
use crate::system::{
    Claim, Limits, Metadata, ObjectId, RuleInstance, Successors, SystemError, SystemHandle, WeightedSystem,
};

/// Which quantity a walk on `ℕ` measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkWeights {
    /// Probability of reaching `0`.
    TermProb,
    /// Expected number of steps until `0`.
    Expected,
    /// Probability of reaching `0` when every step jumps to `m` with
    /// probability `(1/2)^(m+1)`.
    Geometric,
}

struct Walk {
    weights: WalkWeights,
    desc: SemiringDescriptor,
    agg: Arc<AggregatorExpr>,
}

fn scaled(num: i64, den: i64, i: usize) -> AggregatorExpr {
    AggregatorExpr::Prod(vec![
        AggregatorExpr::Const(SemiringValue::real(num, den)),
        AggregatorExpr::Var(i),
    ])
}

fn build(weights: WalkWeights) -> SystemHandle {
    let agg = match weights {
        WalkWeights::TermProb => AggregatorExpr::Sum(vec![scaled(2, 3, 1), scaled(1, 3, 2)]),
        WalkWeights::Expected => AggregatorExpr::Sum(vec![
            AggregatorExpr::Const(SemiringValue::real(1, 1)),
            scaled(2, 3, 1),
            scaled(1, 3, 2),
        ]),
        WalkWeights::Geometric => AggregatorExpr::Countable(CountableSum::infinite(
            "geo",
            Arc::new(|m| {
                let half = BigRational::new(BigInt::from(1), BigInt::from(1) << (m + 1));
                let c = SemiringValue::Real(ExtReal::Fin(half));
                AggregatorExpr::Prod(vec![AggregatorExpr::Const(c), AggregatorExpr::Var(m + 1)])
            }),
        )),
    };
    Arc::new(Walk {
        weights,
        desc: SemiringDescriptor::real_inf(),
        agg: Arc::new(agg),
    })
}

/// The biased walk `n+1 → [n, n+2]` with probabilities `2/3`, `1/3`,
/// weighing the probability of reaching `0`.
pub fn walk_termprob() -> SystemHandle {
    build(WalkWeights::TermProb)
}

/// The biased walk weighing its expected number of steps.
pub fn walk_expected() -> SystemHandle {
    build(WalkWeights::Expected)
}

/// The walk `n+1 → [0, 1, 2, …]` with geometric jump probabilities.
pub fn geometric_walk() -> SystemHandle {
    build(WalkWeights::Geometric)
}

impl Walk {
    fn position(a: &ObjectId) -> Result<u64, SystemError> {
        match a {
            ObjectId::Nat(n) => Ok(*n),
            other => Err(SystemError::UnknownObject(other.to_string())),
        }
    }
}

impl WeightedSystem for Walk {
    fn name(&self) -> String {
        match self.weights {
            WalkWeights::TermProb => "walk_termprob",
            WalkWeights::Expected => "walk_expected",
            WalkWeights::Geometric => "geometric_walk",
        }
        .to_string()
    }

    fn semiring(&self) -> &SemiringDescriptor {
        &self.desc
    }

    fn successors(&self, a: &ObjectId, limits: Limits) -> Result<Successors, SystemError> {
        let n = Self::position(a)?;
        if n == 0 {
            return Ok(Successors::none());
        }
        let rule = match self.weights {
            WalkWeights::Geometric => {
                let rhs = (0..limits.branches as u64).map(ObjectId::Nat).collect();
                let mut r = RuleInstance::new(a.clone(), rhs, self.agg.clone(), "jump");
                r.rhs_complete = false;
                r
            }
            _ => RuleInstance::new(
                a.clone(),
                vec![ObjectId::Nat(n - 1), ObjectId::Nat(n + 1)],
                self.agg.clone(),
                "step",
            ),
        };
        Ok(Successors::all(vec![rule]))
    }

    fn is_normal_form(&self, a: &ObjectId) -> Result<bool, SystemError> {
        Ok(Self::position(a)? == 0)
    }

    fn nf_weight(&self, a: &ObjectId) -> Result<SemiringValue, SystemError> {
        if Self::position(a)? != 0 {
            return Err(SystemError::NotNormalForm(a.to_string()));
        }
        Ok(match self.weights {
            WalkWeights::Expected => SemiringValue::real(0, 1),
            _ => SemiringValue::real(1, 1),
        })
    }

    fn metadata(&self) -> Metadata {
        let branching = Claim::from_bool(self.weights != WalkWeights::Geometric);
        claims(Claim::Asserted, Claim::Asserted, branching, Claim::Refuted)
    }

    fn parse_object(&self, text: &str) -> Result<ObjectId, SystemError> {
        text.trim()
            .parse::<u64>()
            .map(ObjectId::Nat)
            .map_err(|_| bad_object(text, "expected a natural number"))
    }

    fn enumerate_objects(&self, n: usize) -> Vec<ObjectId> {
        (0..n as u64).map(ObjectId::Nat).collect()
    }

    fn random_object(&self, rng: &mut ChaCha8Rng) -> Option<ObjectId> {
        Some(ObjectId::Nat(rng.gen_range(0..=1000)))
    }

    fn default_start(&self) -> Option<ObjectId> {
        Some(ObjectId::Nat(1))
    }
}
