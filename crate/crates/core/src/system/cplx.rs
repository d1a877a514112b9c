use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use super::{Limits, Metadata, ObjectId, RuleInstance, Successors, SystemError, SystemHandle, WeightedSystem};
use crate::aggregator::{AggregatorExpr, CountableSum};
use crate::semiring::{SemiringDescriptor, SemiringValue};

struct Cplx {
    base: SystemHandle,
    desc: SemiringDescriptor,
    unit: Arc<AggregatorExpr>,
}

/// Reinterprets the relation of `base` over `ℕ∞` so that every object
/// weighs the length of its longest derivation: each step adds `1` to the
/// sum of its children, normal forms weigh `0`.
pub fn cplx_wrap(base: SystemHandle) -> SystemHandle {
    let one = AggregatorExpr::Const(SemiringValue::nat(1));
    Arc::new(Cplx {
        base,
        desc: SemiringDescriptor::nat_inf(),
        unit: Arc::new(AggregatorExpr::Sum(vec![one, AggregatorExpr::Var(1)])),
    })
}

impl Cplx {
    fn aggregator(&self, rule: &RuleInstance) -> Arc<AggregatorExpr> {
        let one = AggregatorExpr::Const(SemiringValue::nat(1));
        if !rule.rhs_complete {
            let all = CountableSum::infinite("children", Arc::new(|m| AggregatorExpr::Var(m + 1)));
            return Arc::new(AggregatorExpr::Sum(vec![one, AggregatorExpr::Countable(all)]));
        }
        if rule.rhs.len() == 1 {
            return self.unit.clone();
        }
        let mut items = vec![one];
        items.extend((1..=rule.rhs.len()).map(AggregatorExpr::Var));
        Arc::new(AggregatorExpr::Sum(items))
    }
}

impl WeightedSystem for Cplx {
    fn name(&self) -> String {
        format!("cplx({})", self.base.name())
    }

    fn semiring(&self) -> &SemiringDescriptor {
        &self.desc
    }

    fn successors(&self, a: &ObjectId, limits: Limits) -> Result<Successors, SystemError> {
        let mut s = self.base.successors(a, limits)?;
        for r in &mut s.rules {
            r.aggregator = self.aggregator(r);
        }
        Ok(s)
    }

    fn is_normal_form(&self, a: &ObjectId) -> Result<bool, SystemError> {
        self.base.is_normal_form(a)
    }

    fn nf_weight(&self, a: &ObjectId) -> Result<SemiringValue, SystemError> {
        if self.base.is_normal_form(a)? {
            Ok(SemiringValue::nat(0))
        } else {
            Err(SystemError::NotNormalForm(a.to_string()))
        }
    }

    fn metadata(&self) -> Metadata {
        self.base.metadata()
    }

    fn parse_object(&self, text: &str) -> Result<ObjectId, SystemError> {
        self.base.parse_object(text)
    }

    fn all_objects(&self) -> Option<Vec<ObjectId>> {
        self.base.all_objects()
    }

    fn enumerate_objects(&self, n: usize) -> Vec<ObjectId> {
        self.base.enumerate_objects(n)
    }

    fn random_object(&self, rng: &mut ChaCha8Rng) -> Option<ObjectId> {
        self.base.random_object(rng)
    }

    fn default_start(&self) -> Option<ObjectId> {
        self.base.default_start()
    }
}
