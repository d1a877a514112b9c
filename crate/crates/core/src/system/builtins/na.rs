use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{bad_object, claims};
use crate::aggregator::AggregatorExpr;
use crate::semiring::{SemiringDescriptor, SemiringValue};
use crate::system::{
    cplx_wrap, Claim, Limits, Metadata, ObjectId, RuleInstance, Successors, SystemError, SystemHandle, WeightedSystem,
};

struct Na {
    desc: SemiringDescriptor,
    pass: Arc<AggregatorExpr>,
}

/// Derivation length of `a → n` for every `n ∈ ℕ` and `n+1 → n`. The
/// relation terminates yet `a` has derivations of every length.
pub fn na_system() -> SystemHandle {
    cplx_wrap(Arc::new(Na {
        desc: SemiringDescriptor::nat_inf(),
        pass: Arc::new(AggregatorExpr::Var(1)),
    }))
}

fn check(a: &ObjectId) -> Result<(), SystemError> {
    match a {
        ObjectId::Label(s) if s == "a" => Ok(()),
        ObjectId::Nat(_) => Ok(()),
        other => Err(SystemError::UnknownObject(other.to_string())),
    }
}

impl WeightedSystem for Na {
    fn name(&self) -> String {
        "na".to_string()
    }

    fn semiring(&self) -> &SemiringDescriptor {
        &self.desc
    }

    fn successors(&self, a: &ObjectId, limits: Limits) -> Result<Successors, SystemError> {
        check(a)?;
        Ok(match a {
            ObjectId::Nat(0) => Successors::none(),
            ObjectId::Nat(n) => Successors::all(vec![RuleInstance::new(
                a.clone(),
                vec![ObjectId::Nat(n - 1)],
                self.pass.clone(),
                "dec",
            )]),
            _ => Successors {
                rules: (0..limits.rules as u64)
                    .map(|n| RuleInstance::new(a.clone(), vec![ObjectId::Nat(n)], self.pass.clone(), format!("a_{n}")))
                    .collect(),
                complete: false,
            },
        })
    }

    fn is_normal_form(&self, a: &ObjectId) -> Result<bool, SystemError> {
        check(a)?;
        Ok(*a == ObjectId::Nat(0))
    }

    fn nf_weight(&self, a: &ObjectId) -> Result<SemiringValue, SystemError> {
        if self.is_normal_form(a)? {
            Ok(SemiringValue::nat(0))
        } else {
            Err(SystemError::NotNormalForm(a.to_string()))
        }
    }

    fn metadata(&self) -> Metadata {
        claims(Claim::Refuted, Claim::Refuted, Claim::Asserted, Claim::Asserted)
    }

    fn parse_object(&self, text: &str) -> Result<ObjectId, SystemError> {
        let t = text.trim();
        if t == "a" {
            return Ok(ObjectId::label("a"));
        }
        t.parse::<u64>()
            .map(ObjectId::Nat)
            .map_err(|_| bad_object(text, "expected `a` or a natural number"))
    }

    fn enumerate_objects(&self, n: usize) -> Vec<ObjectId> {
        std::iter::once(ObjectId::label("a"))
            .chain((0..).map(ObjectId::Nat))
            .take(n)
            .collect()
    }

    fn random_object(&self, rng: &mut ChaCha8Rng) -> Option<ObjectId> {
        Some(match rng.gen_range(0..=100u64) {
            100 => ObjectId::label("a"),
            n => ObjectId::Nat(n),
        })
    }

    fn default_start(&self) -> Option<ObjectId> {
        Some(ObjectId::label("a"))
    }
}
