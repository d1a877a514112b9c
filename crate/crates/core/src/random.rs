//! Seeded random explicit systems for oracle comparisons and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aggregator::AggregatorExpr;
use crate::semiring::{SemiringDescriptor, SemiringKind, SemiringValue};
use crate::system::{ExplicitSystem, SystemError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomShape {
    pub objects: usize,
    pub max_rules: usize,
    pub max_rhs: usize,
}

impl Default for RandomShape {
    fn default() -> Self {
        RandomShape {
            objects: 6,
            max_rules: 3,
            max_rhs: 3,
        }
    }
}

/// Carriers random systems can be drawn over.
pub const RANDOM_KINDS: [SemiringKind; 3] = [SemiringKind::NatInf, SemiringKind::Tropical, SemiringKind::Boolean];

fn descriptor(kind: SemiringKind) -> Result<SemiringDescriptor, SystemError> {
    match kind {
        SemiringKind::NatInf => Ok(SemiringDescriptor::nat_inf()),
        SemiringKind::Tropical => Ok(SemiringDescriptor::tropical()),
        SemiringKind::Boolean => Ok(SemiringDescriptor::boolean()),
        other => Err(SystemError::BadParam {
            system: "random".into(),
            msg: format!("random systems are not drawn over {}", other.name()),
        }),
    }
}

fn constant(kind: SemiringKind, rng: &mut ChaCha8Rng) -> SemiringValue {
    match kind {
        SemiringKind::Boolean => SemiringValue::Bool(rng.gen()),
        _ if rng.gen_ratio(1, 12) => SemiringValue::nat_inf(),
        _ => SemiringValue::nat(rng.gen_range(0..=4)),
    }
}

/// A sum of up to three terms, each a variable, a constant, a constant
/// times a variable, or a product of two variables.
fn aggregator(kind: SemiringKind, arity: usize, rng: &mut ChaCha8Rng) -> AggregatorExpr {
    let var = |rng: &mut ChaCha8Rng| AggregatorExpr::Var(rng.gen_range(1..=arity));
    let terms = rng.gen_range(1..=3);
    let mut items: Vec<AggregatorExpr> = (0..terms)
        .map(|_| match rng.gen_range(0..4) {
            0 => var(rng),
            1 => AggregatorExpr::Const(constant(kind, rng)),
            2 => AggregatorExpr::Prod(vec![AggregatorExpr::Const(constant(kind, rng)), var(rng)]),
            _ => AggregatorExpr::Prod(vec![var(rng), var(rng)]),
        })
        .collect();
    if items.len() == 1 {
        items.pop().unwrap()
    } else {
        AggregatorExpr::Sum(items)
    }
}

/// Draws a finite explicit system over objects `o0, o1, …`. Objects that
/// receive no rules become normal forms with a random weight.
pub fn random_system(kind: SemiringKind, shape: RandomShape, seed: u64) -> Result<ExplicitSystem, SystemError> {
    let desc = descriptor(kind)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = shape.objects.max(1);
    let labels: Vec<String> = (0..n).map(|i| format!("o{i}")).collect();
    let mut rules = Vec::new();
    let mut nf = Vec::new();
    for lhs in &labels {
        let count = rng.gen_range(0..=shape.max_rules);
        if count == 0 {
            nf.push((lhs.clone(), constant(kind, &mut rng)));
            continue;
        }
        for j in 0..count {
            let len = rng.gen_range(1..=shape.max_rhs.max(1));
            let rhs: Vec<String> = (0..len).map(|_| labels.choose(&mut rng).unwrap().clone()).collect();
            let agg = aggregator(kind, len, &mut rng);
            rules.push((lhs.clone(), rhs, agg, format!("{lhs}r{}", j + 1)));
        }
    }
    ExplicitSystem::build(
        format!("random(kind={},seed={seed})", kind.name()),
        desc,
        rules,
        nf,
        false,
    )
}
