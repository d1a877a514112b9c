use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::{lower_bound_series, Budgets, EvalError};
use crate::par::Parallelism;
use crate::semiring::SemiringValue;
use crate::system::{ObjectId, RuleInstance, WeightedSystem};

fn leaf_weight(sys: &dyn WeightedSystem, a: &ObjectId) -> Result<SemiringValue, EvalError> {
    if sys.is_normal_form(a)? {
        Ok(sys.nf_weight(a)?)
    } else {
        Ok(sys.semiring().zero().clone())
    }
}

/// Rules of `a`; empty for normal forms, so a normal-form leaf is the only
/// tree rooted there.
fn rules_of(sys: &dyn WeightedSystem, a: &ObjectId, budgets: &Budgets) -> Result<Vec<RuleInstance>, EvalError> {
    Ok(sys.successors(a, budgets.limits())?.rules)
}

/// Every reduction tree of depth at most `depth` rooted at `a`, within the
/// rule budget and truncation. Fails once more than `count_cap` trees would
/// be produced for any object.
pub fn enumerate_trees(
    sys: &dyn WeightedSystem,
    a: &ObjectId,
    depth: usize,
    budgets: &Budgets,
    count_cap: usize,
) -> Result<Vec<super::ReductionTree>, EvalError> {
    use super::ReductionTree;
    let mut memo: HashMap<(ObjectId, usize), Vec<ReductionTree>> = HashMap::new();

    fn go(
        sys: &dyn WeightedSystem,
        a: &ObjectId,
        d: usize,
        budgets: &Budgets,
        cap: usize,
        memo: &mut HashMap<(ObjectId, usize), Vec<ReductionTree>>,
    ) -> Result<Vec<ReductionTree>, EvalError> {
        if let Some(v) = memo.get(&(a.clone(), d)) {
            return Ok(v.clone());
        }
        let mut out = vec![ReductionTree::leaf(a.clone())];
        if d > 0 {
            for r in rules_of(sys, a, budgets)? {
                let mut combos: Vec<Vec<ReductionTree>> = vec![Vec::new()];
                for b in &r.rhs {
                    let sub = go(sys, b, d - 1, budgets, cap, memo)?;
                    if combos.len().saturating_mul(sub.len()) > cap {
                        return Err(EvalError::CountCap { cap });
                    }
                    combos = combos
                        .into_iter()
                        .flat_map(|c| {
                            sub.iter().map(move |t| {
                                let mut c = c.clone();
                                c.push(t.clone());
                                c
                            })
                        })
                        .collect();
                }
                out.extend(
                    combos
                        .into_iter()
                        .map(|c| ReductionTree::node(a.clone(), r.tag.clone(), c)),
                );
                if out.len() > cap {
                    return Err(EvalError::CountCap { cap });
                }
            }
        }
        memo.insert((a.clone(), d), out.clone());
        Ok(out)
    }

    go(sys, a, depth, budgets, count_cap, &mut memo)
}

/// Number of reduction trees of depth at most `depth` rooted at `a`,
/// saturating at `u128::MAX`.
pub fn tree_count(sys: &dyn WeightedSystem, a: &ObjectId, depth: usize, budgets: &Budgets) -> Result<u128, EvalError> {
    fn go(
        sys: &dyn WeightedSystem,
        a: &ObjectId,
        d: usize,
        budgets: &Budgets,
        memo: &mut HashMap<(ObjectId, usize), u128>,
    ) -> Result<u128, EvalError> {
        if let Some(&n) = memo.get(&(a.clone(), d)) {
            return Ok(n);
        }
        let mut n: u128 = 1;
        if d > 0 {
            for r in rules_of(sys, a, budgets)? {
                let mut p: u128 = 1;
                for b in &r.rhs {
                    p = p.saturating_mul(go(sys, b, d - 1, budgets, memo)?);
                }
                n = n.saturating_add(p);
            }
        }
        memo.insert((a.clone(), d), n);
        Ok(n)
    }
    go(sys, a, depth, budgets, &mut HashMap::new())
}

/// The set of weights `⟦T⟧` over all trees `T` of depth at most `depth`
/// rooted at `a`, built bottom-up from the children's weight sets. Fails
/// when some intermediate set grows beyond `count_cap`.
pub fn attainable_weights(
    sys: &dyn WeightedSystem,
    a: &ObjectId,
    depth: usize,
    budgets: &Budgets,
    count_cap: usize,
) -> Result<Vec<SemiringValue>, EvalError> {
    type Memo = HashMap<(ObjectId, usize), Vec<SemiringValue>>;
    fn go(
        sys: &dyn WeightedSystem,
        a: &ObjectId,
        d: usize,
        budgets: &Budgets,
        cap: usize,
        memo: &mut Memo,
    ) -> Result<Vec<SemiringValue>, EvalError> {
        if let Some(v) = memo.get(&(a.clone(), d)) {
            return Ok(v.clone());
        }
        let desc = sys.semiring();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let leaf = leaf_weight(sys, a)?;
        seen.insert(leaf.clone());
        out.push(leaf);
        if d > 0 {
            for r in rules_of(sys, a, budgets)? {
                let mut sets = Vec::with_capacity(r.rhs.len());
                for b in &r.rhs {
                    sets.push(go(sys, b, d - 1, budgets, cap, memo)?);
                }
                let total = sets.iter().try_fold(1usize, |acc, s| acc.checked_mul(s.len()));
                if total.is_none_or(|t| t > cap) {
                    return Err(EvalError::CountCap { cap });
                }
                let mut pick = vec![0usize; sets.len()];
                let trunc = r.rhs.len().max(1);
                loop {
                    let args: Vec<SemiringValue> = pick.iter().zip(&sets).map(|(&i, s)| s[i].clone()).collect();
                    let v = r.aggregator.eval(desc, &args, trunc)?.0;
                    if seen.insert(v.clone()) {
                        out.push(v);
                        if out.len() > cap {
                            return Err(EvalError::CountCap { cap });
                        }
                    }
                    let mut k = 0;
                    while k < pick.len() {
                        pick[k] += 1;
                        if pick[k] < sets[k].len() {
                            break;
                        }
                        pick[k] = 0;
                        k += 1;
                    }
                    if k == pick.len() {
                        break;
                    }
                }
            }
        }
        memo.insert((a.clone(), d), out.clone());
        Ok(out)
    }
    go(sys, a, depth, budgets, count_cap, &mut HashMap::new())
}

/// One depth of the comparison between value iteration and the join of
/// all tree weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleLevel {
    pub depth: usize,
    pub iterated: String,
    pub oracle: String,
    pub distinct_weights: usize,
    pub agree: bool,
}

/// Compares `W_n(a)` against `⨆ {⟦T⟧ | depth(T) ≤ n}` for `n = 0..=max_depth`.
pub fn oracle_equivalence(
    sys: &dyn WeightedSystem,
    a: &ObjectId,
    max_depth: usize,
    budgets: &Budgets,
    count_cap: usize,
) -> Result<Vec<OracleLevel>, EvalError> {
    let desc = sys.semiring();
    let series = lower_bound_series(sys, a, max_depth, budgets, Parallelism::Sequential)?;
    let mut out = Vec::with_capacity(series.len());
    for (n, w) in series.iter().enumerate() {
        let weights = attainable_weights(sys, a, n, budgets, count_cap)?;
        let join = desc.join(weights.iter())?;
        out.push(OracleLevel {
            depth: n,
            iterated: desc.format(w),
            oracle: desc.format(&join),
            distinct_weights: weights.len(),
            agree: *w == join,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::tree_weight;
    use crate::system::{prefix_words, walk_termprob, ExplicitSystem};

    #[test]
    fn counts_match_enumeration() {
        let w = walk_termprob();
        let a = ObjectId::Nat(2);
        let b = Budgets::default();
        for d in 0..5 {
            let trees = enumerate_trees(&*w, &a, d, &b, 100_000).unwrap();
            assert_eq!(tree_count(&*w, &a, d, &b).unwrap(), trees.len() as u128);
            assert!(trees.iter().all(|t| t.depth() <= d));
        }
    }

    #[test]
    fn attainable_set_matches_tree_weights() {
        let p = prefix_words();
        let a = p.parse_object("0").unwrap();
        let b = Budgets::default();
        let trees = enumerate_trees(&*p, &a, 3, &b, 100_000).unwrap();
        let direct: HashSet<SemiringValue> = trees.iter().map(|t| tree_weight(&*p, t).unwrap()).collect();
        let built: HashSet<SemiringValue> = attainable_weights(&*p, &a, 3, &b, 100_000)
            .unwrap()
            .into_iter()
            .collect();
        assert_eq!(direct, built);
    }

    #[test]
    fn agrees_on_small_system() {
        let text = r#"{"semiring":{"kind":"nat_inf"},"rules":[{"lhs":"a","rhs":["a","b"],"agg":"v1 + v2"},{"lhs":"a","rhs":["b"],"agg":"2 * v1"}],"nf":{"b":"1"}}"#;
        let sys = ExplicitSystem::from_json("s", text).unwrap();
        let levels = oracle_equivalence(&sys, &ObjectId::label("a"), 4, &Budgets::default(), 10_000).unwrap();
        assert!(levels.iter().all(|l| l.agree));
        assert_eq!(levels[1].iterated, "2");
    }

    #[test]
    fn count_cap_is_reported() {
        let w = walk_termprob();
        let err = enumerate_trees(&*w, &ObjectId::Nat(3), 6, &Budgets::default(), 10).unwrap_err();
        assert_eq!(err, EvalError::CountCap { cap: 10 });
    }
}
