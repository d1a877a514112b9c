use std::sync::Arc;

use crate::aggregator::AggregatorExpr;
use crate::semiring::{Language, SemiringDescriptor, SemiringValue, Word};
use crate::system::{ExplicitSystem, SystemHandle};

/// The system over `{0, 1, *}` with `0 → [0,*]`, `0 → [1,*]`,
/// `1 → [0,*]`, `1 → [1,*]` over words on `{0, 1}`: a node labelled `c`
/// prefixes its first child's words with `c` and adds its second child's.
/// `*` weighs `{ε}`, so a tree weighs the prefixes of its spine.
pub fn prefix_words() -> SystemHandle {
    let desc = SemiringDescriptor::language(["0", "1"]).expect("valid alphabet");
    let mut rules = Vec::new();
    for (sym, lhs) in ["0", "1"].iter().enumerate() {
        let letter = SemiringValue::Lang(Language::Words([Word(vec![sym as u8])].into_iter().collect()));
        let agg = AggregatorExpr::Sum(vec![
            AggregatorExpr::Prod(vec![AggregatorExpr::Const(letter), AggregatorExpr::Var(1)]),
            AggregatorExpr::Var(2),
        ]);
        for to in ["0", "1"] {
            rules.push((
                lhs.to_string(),
                vec![to.to_string(), "*".to_string()],
                agg.clone(),
                format!("{lhs}_{to}"),
            ));
        }
    }
    let nf = vec![("*".to_string(), SemiringValue::Lang(Language::epsilon()))];
    Arc::new(ExplicitSystem::build("prefix_words", desc, rules, nf, false).expect("well-formed rules"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{Claim, Limits, ObjectId};

    #[test]
    fn four_rules_and_one_normal_form() {
        let sys = prefix_words();
        assert_eq!(sys.all_objects().unwrap().len(), 3);
        let s = sys.successors(&ObjectId::label("0"), Limits::new(8, 8)).unwrap();
        assert_eq!(s.rules.len(), 2);
        assert_eq!(s.rules[0].aggregator.render(sys.semiring()), "{0} * v1 + v2");
        assert_eq!(sys.metadata().terminating, Claim::Refuted);
    }
}
