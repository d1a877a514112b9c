use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{bad_object, claims};
use crate::aggregator::AggregatorExpr;
use crate::semiring::{SemiringDescriptor, SemiringValue};
use crate::system::{
    Claim, Limits, Metadata, ObjectId, RuleInstance, Successors, SystemError, SystemHandle, WeightedSystem,
};

struct ZWalk {
    desc: SemiringDescriptor,
    odd: Arc<AggregatorExpr>,
    even: Arc<AggregatorExpr>,
}

/// The walk on `ℤ` where odd numbers fall forever and even numbers move to
/// `0`, weighted in `ℕ∞ × 𝔹` by (steps, visited an even number).
pub fn z_walk_safety() -> SystemHandle {
    let desc = SemiringDescriptor::product(vec![SemiringDescriptor::nat_inf(), SemiringDescriptor::boolean()])
        .expect("non-empty product");
    let agg = |even: bool| {
        Arc::new(AggregatorExpr::Sum(vec![
            AggregatorExpr::Const(SemiringValue::Tuple(vec![
                SemiringValue::nat(1),
                SemiringValue::Bool(even),
            ])),
            AggregatorExpr::Var(1),
        ]))
    };
    Arc::new(ZWalk {
        desc,
        odd: agg(false),
        even: agg(true),
    })
}

fn position(a: &ObjectId) -> Result<i64, SystemError> {
    match a {
        ObjectId::Int(n) => Ok(*n),
        other => Err(SystemError::UnknownObject(other.to_string())),
    }
}

impl WeightedSystem for ZWalk {
    fn name(&self) -> String {
        "z_walk_safety".to_string()
    }

    fn semiring(&self) -> &SemiringDescriptor {
        &self.desc
    }

    fn successors(&self, a: &ObjectId, _limits: Limits) -> Result<Successors, SystemError> {
        let n = position(a)?;
        if n == 0 {
            return Ok(Successors::none());
        }
        let (next, agg, tag) = if n % 2 != 0 {
            (n.checked_sub(2), &self.odd, "odd_down")
        } else if n < 0 {
            (Some(n + 2), &self.even, "even_up")
        } else {
            (Some(n - 2), &self.even, "even_down")
        };
        let next = next.ok_or_else(|| SystemError::UnknownObject(format!("{n} - 2")))?;
        Ok(Successors::all(vec![RuleInstance::new(
            a.clone(),
            vec![ObjectId::Int(next)],
            agg.clone(),
            tag,
        )]))
    }

    fn is_normal_form(&self, a: &ObjectId) -> Result<bool, SystemError> {
        Ok(position(a)? == 0)
    }

    fn nf_weight(&self, a: &ObjectId) -> Result<SemiringValue, SystemError> {
        if position(a)? != 0 {
            return Err(SystemError::NotNormalForm(a.to_string()));
        }
        Ok(SemiringValue::Tuple(vec![
            SemiringValue::nat(0),
            SemiringValue::Bool(true),
        ]))
    }

    fn metadata(&self) -> Metadata {
        claims(Claim::Asserted, Claim::Asserted, Claim::Asserted, Claim::Refuted)
    }

    fn parse_object(&self, text: &str) -> Result<ObjectId, SystemError> {
        text.trim()
            .parse::<i64>()
            .map(ObjectId::Int)
            .map_err(|_| bad_object(text, "expected an integer"))
    }

    /// `0, 1, -1, 2, -2, …`
    fn enumerate_objects(&self, n: usize) -> Vec<ObjectId> {
        (0..n as i64)
            .map(|i| if i % 2 == 1 { (i + 1) / 2 } else { -(i / 2) })
            .map(ObjectId::Int)
            .collect()
    }

    fn random_object(&self, rng: &mut ChaCha8Rng) -> Option<ObjectId> {
        Some(ObjectId::Int(rng.gen_range(-100..=100)))
    }

    fn default_start(&self) -> Option<ObjectId> {
        Some(ObjectId::Int(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_follow_parity_and_sign() {
        let sys = z_walk_safety();
        let next = |n: i64| {
            let s = sys.successors(&ObjectId::Int(n), Limits::new(1, 1)).unwrap();
            s.rules[0].rhs[0].clone()
        };
        assert_eq!(next(3), ObjectId::Int(1));
        assert_eq!(next(-3), ObjectId::Int(-5));
        assert_eq!(next(-4), ObjectId::Int(-2));
        assert_eq!(next(4), ObjectId::Int(2));
        assert!(sys.is_normal_form(&ObjectId::Int(0)).unwrap());
        let s = sys.successors(&ObjectId::Int(3), Limits::new(1, 1)).unwrap();
        assert_eq!(s.rules[0].aggregator.render(sys.semiring()), "(1,false) + v1");
    }

    #[test]
    fn enumeration_alternates_sign() {
        let sys = z_walk_safety();
        let names: Vec<_> = sys.enumerate_objects(5).iter().map(|o| o.to_string()).collect();
        assert_eq!(names, ["0", "1", "-1", "2", "-2"]);
    }
}
