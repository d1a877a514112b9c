//! Increasing loops: reduction trees whose root and one leaf carry the
//! same object, their induced weight polynomials and the increments that
//! prove an object's weight is `⊤`.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::aggregator::{extract_affine, probe_value, AggregatorExpr};
use crate::evaluator::{induced_fold, lower_bound_series, Budgets, EvalError, ReductionTree};
use crate::par::Parallelism;
use crate::semiring::{SemiringDescriptor, SemiringKind, SemiringValue};
use crate::system::{ObjectId, WeightedSystem};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum UnboundError {
    #[error("loop of {0} is not certified")]
    NotCertified(String),
    #[error("path {0:?} does not lead to a leaf")]
    NotALeaf(Vec<usize>),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopStatus {
    /// The increment condition holds for every semiring value.
    Certified,
    /// Found, but the increment condition was at most probed.
    Candidate,
}

/// A tree from `object` down to a leaf labelled `object`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopCandidate {
    pub object: ObjectId,
    pub tree: ReductionTree,
    /// Child indices from the root to the designated leaf.
    pub leaf: Vec<usize>,
    /// Rule tags along the path to the designated leaf.
    pub trace: Vec<String>,
}

impl LoopCandidate {
    pub fn depth(&self) -> usize {
        self.leaf.len()
    }
}

/// Breadth-first search for loops from each start object: a path of rule
/// applications, siblings left as leaves, that returns to the start.
/// Shorter loops come first; loops with the same root, leaf and tag
/// sequence are reported once, and a path stops at its first return.
pub fn find_loops(
    sys: &dyn WeightedSystem,
    starts: &[ObjectId],
    max_depth: usize,
    budgets: &Budgets,
    max_witnesses: usize,
) -> Result<Vec<LoopCandidate>, EvalError> {
    #[derive(Clone)]
    struct Step {
        object: ObjectId,
        tag: String,
        rhs: Vec<ObjectId>,
        child: usize,
    }
    let mut found = Vec::new();
    let mut seen = HashSet::new();
    let limits = budgets.limits();
    let mut queue: VecDeque<(usize, Vec<Step>, ObjectId)> = VecDeque::new();
    for (s, a) in starts.iter().enumerate() {
        queue.push_back((s, Vec::new(), a.clone()));
    }
    let mut states = 0usize;
    while let Some((s, path, at)) = queue.pop_front() {
        if found.len() >= max_witnesses {
            break;
        }
        if path.len() >= max_depth {
            continue;
        }
        let root = &starts[s];
        for r in sys.successors(&at, limits)?.rules {
            for (i, b) in r.rhs.iter().enumerate() {
                let mut next = path.clone();
                next.push(Step {
                    object: at.clone(),
                    tag: r.tag.clone(),
                    rhs: r.rhs.clone(),
                    child: i,
                });
                if b == root {
                    let trace: Vec<String> = next.iter().map(|p| p.tag.clone()).collect();
                    if seen.insert((root.clone(), trace.clone())) && found.len() < max_witnesses {
                        let mut tree = ReductionTree::leaf(root.clone());
                        for p in next.iter().rev() {
                            let children = p
                                .rhs
                                .iter()
                                .enumerate()
                                .map(|(j, c)| {
                                    if j == p.child {
                                        tree.clone()
                                    } else {
                                        ReductionTree::leaf(c.clone())
                                    }
                                })
                                .collect();
                            tree = ReductionTree::node(p.object.clone(), p.tag.clone(), children);
                        }
                        found.push(LoopCandidate {
                            object: root.clone(),
                            tree,
                            leaf: next.iter().map(|p| p.child).collect(),
                            trace,
                        });
                    }
                } else if states < budgets.visit_cap {
                    states += 1;
                    queue.push_back((s, next, b.clone()));
                }
            }
        }
    }
    Ok(found)
}

/// `𝒫(T)`: the tree weight with the leaf at `leaf` replaced by `X`, other
/// leaves by their constant weights, folded to `X` and constants.
pub fn induced_polynomial(
    sys: &dyn WeightedSystem,
    tree: &ReductionTree,
    leaf: &[usize],
) -> Result<AggregatorExpr, UnboundError> {
    if !tree.at(leaf).is_some_and(ReductionTree::is_leaf) {
        return Err(UnboundError::NotALeaf(leaf.to_vec()));
    }
    let desc = sys.semiring();
    let expr = induced_fold(
        sys,
        tree,
        &mut |t, path| {
            if path == leaf {
                Ok(AggregatorExpr::X)
            } else if sys.is_normal_form(&t.label)? {
                Ok(AggregatorExpr::Const(sys.nf_weight(&t.label)?))
            } else {
                Ok(AggregatorExpr::Const(desc.zero().clone()))
            }
        },
        &mut |rule, children| {
            let n = children.len().max(1);
            Ok(rule
                .aggregator
                .substitute_vars(&children, desc, n)?
                .fold_constants(desc)?)
        },
    )?;
    Ok(expr)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Increment {
    pub t: SemiringValue,
    pub status: LoopStatus,
}

fn probes(desc: &SemiringDescriptor) -> Vec<SemiringValue> {
    let mut out = vec![desc.zero().clone(), desc.one().clone()];
    out.extend([2, 5, 100, 1 << 20].into_iter().filter_map(|k| probe_value(desc, k)));
    out.push(desc.top().clone());
    out
}

/// `P(s) ≽ s ⊕ t` on every probe in `domain`.
fn dominates(desc: &SemiringDescriptor, p: &AggregatorExpr, t: &SemiringValue, domain: &[SemiringValue]) -> bool {
    domain.iter().all(|s| {
        let Ok((ps, _)) = p.eval_at(desc, &[], Some(s), 1) else {
            return false;
        };
        desc.plus(s, t).and_then(|rhs| desc.leq(&rhs, &ps)).unwrap_or(false)
    })
}

/// Looks for `t` with `⊕^∞ t = ⊤` and `P(s) ≽ s ⊕ t` for all `s`. The
/// condition is decided exactly for affine polynomials over `ℕ∞`, `ℝ∞`
/// and their products, and by exhaustion over the booleans; elsewhere a
/// `t` passing the probes is only a candidate.
pub fn certify_loop(desc: &SemiringDescriptor, p: &AggregatorExpr) -> Option<Increment> {
    let unbounded = |t: &SemiringValue| !desc.is_top(t) && desc.omega_sum(t).is_ok_and(|s| desc.is_top(&s));
    if let Some((c, d)) = extract_affine(p, desc) {
        let one = desc.one();
        return [d.clone(), one.clone()]
            .into_iter()
            .find(|t| {
                !desc.is_zero(t)
                    && unbounded(t)
                    && desc.leq(one, &c).unwrap_or(false)
                    && desc.leq(t, &d).unwrap_or(false)
            })
            .map(|t| Increment {
                t,
                status: LoopStatus::Certified,
            });
    }
    if desc.kind() == SemiringKind::Boolean {
        let t = SemiringValue::Bool(true);
        let all = [SemiringValue::Bool(false), SemiringValue::Bool(true)];
        return dominates(desc, p, &t, &all).then_some(Increment {
            t,
            status: LoopStatus::Certified,
        });
    }
    let domain = probes(desc);
    let mut candidates = vec![desc.one().clone()];
    candidates.extend(p.constants());
    candidates.extend(domain.iter().cloned());
    candidates
        .into_iter()
        .find(|t| unbounded(t) && dominates(desc, p, t, &domain))
        .map(|t| Increment {
            t,
            status: LoopStatus::Candidate,
        })
}

/// A loop with its polynomial and, when found, its increment.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopWitness {
    pub candidate: LoopCandidate,
    pub polynomial: AggregatorExpr,
    pub increment: Option<Increment>,
}

impl LoopWitness {
    pub fn status(&self) -> LoopStatus {
        match &self.increment {
            Some(Increment {
                status: LoopStatus::Certified,
                ..
            }) => LoopStatus::Certified,
            _ => LoopStatus::Candidate,
        }
    }

    pub fn report(&self, desc: &SemiringDescriptor) -> LoopReport {
        LoopReport {
            object: self.candidate.object.to_string(),
            depth: self.candidate.depth(),
            trace: self.candidate.trace.clone(),
            polynomial: self.polynomial.render(desc),
            increment: self.increment.as_ref().map(|i| desc.format(&i.t)),
            status: self.status(),
        }
    }
}

/// Finds loops and attaches their polynomials and increments.
pub fn analyze_loops(
    sys: &dyn WeightedSystem,
    starts: &[ObjectId],
    max_depth: usize,
    budgets: &Budgets,
    max_witnesses: usize,
) -> Result<Vec<LoopWitness>, UnboundError> {
    let desc = sys.semiring();
    find_loops(sys, starts, max_depth, budgets, max_witnesses)?
        .into_iter()
        .map(|c| {
            let polynomial = induced_polynomial(sys, &c.tree, &c.leaf)?;
            let increment = certify_loop(desc, &polynomial);
            Ok(LoopWitness {
                candidate: c,
                polynomial,
                increment,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoopReport {
    pub object: String,
    pub depth: usize,
    pub trace: Vec<String>,
    pub polynomial: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub increment: Option<String>,
    pub status: LoopStatus,
}

impl LoopReport {
    pub fn render_text(&self) -> String {
        let mut out = format!(
            "{} loop at {} (depth {}): {} ; P = {}",
            match self.status {
                LoopStatus::Certified => "certified",
                LoopStatus::Candidate => "candidate",
            },
            self.object,
            self.depth,
            self.trace.join(" -> "),
            self.polynomial
        );
        if let Some(t) = &self.increment {
            out.push_str(&format!(" ; t = {t}"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnboundedReport {
    pub object: String,
    pub weight: String,
    pub loop_report: LoopReport,
    /// `W_{k·d}` for `k = 0..=5`.
    pub series: Vec<String>,
    /// Each `W_{k·d}` dominates the `k`-fold sum of `t` and its predecessor.
    pub evaluator_consistent: bool,
}

/// `⟦a⟧ = ⊤` from a certified loop, cross-checked against value iteration.
pub fn conclude_unbounded(
    sys: &dyn WeightedSystem,
    witness: &LoopWitness,
    budgets: &Budgets,
) -> Result<UnboundedReport, UnboundError> {
    let desc = sys.semiring();
    let a = &witness.candidate.object;
    let t = match &witness.increment {
        Some(i) if i.status == LoopStatus::Certified => &i.t,
        _ => return Err(UnboundError::NotCertified(a.to_string())),
    };
    let d = witness.candidate.depth();
    let full = lower_bound_series(sys, a, 5 * d, budgets, Parallelism::default())?;
    let series: Vec<SemiringValue> = (0..=5).map(|k| full[k * d].clone()).collect();
    let mut consistent = true;
    let mut acc = desc.zero().clone();
    for k in 0..series.len() {
        if k > 0 {
            acc = desc.plus(&acc, t).map_err(EvalError::from)?;
            consistent &= desc.leq(&series[k - 1], &series[k]).unwrap_or(false);
        }
        consistent &= desc.leq(&acc, &series[k]).unwrap_or(false);
    }
    Ok(UnboundedReport {
        object: a.to_string(),
        weight: desc.format(desc.top()),
        loop_report: witness.report(desc),
        series: series.iter().map(|v| desc.format(v)).collect(),
        evaluator_consistent: consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregator::parse;
    use crate::system::ExplicitSystem;

    fn explicit(text: &str) -> ExplicitSystem {
        ExplicitSystem::from_json("t", text).unwrap()
    }

    #[test]
    fn terminating_chain_has_no_loop() {
        let s = explicit(
            r#"{"semiring":{"kind":"nat_inf"},"rules":[{"lhs":"a","rhs":["b"],"agg":"1 + v1"}],"nf":{"b":"0"}}"#,
        );
        assert!(find_loops(&s, &[ObjectId::label("a")], 6, &Budgets::default(), 10)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn boolean_self_loop_is_certified() {
        let s = explicit(
            r#"{"semiring":{"kind":"boolean"},"rules":[{"lhs":"a","rhs":["a","b"],"agg":"v1 + v2"}],"nf":{"b":"true"}}"#,
        );
        let a = ObjectId::label("a");
        let w = analyze_loops(&s, &[a], 3, &Budgets::default(), 5).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].candidate.depth(), 1);
        assert_eq!(w[0].status(), LoopStatus::Certified);
        let r = conclude_unbounded(&s, &w[0], &Budgets::default()).unwrap();
        assert_eq!(r.weight, "true");
        assert!(r.evaluator_consistent);
    }

    #[test]
    fn chain_polynomial_and_leaf_check() {
        let s = explicit(
            r#"{"semiring":{"kind":"nat_inf"},"rules":[{"lhs":"a","rhs":["b"],"agg":"1 + v1"},{"lhs":"b","rhs":["c"],"agg":"v1"}],"nf":{"c":"0"}}"#,
        );
        let t = ReductionTree::node(
            ObjectId::label("a"),
            "r1",
            vec![ReductionTree::leaf(ObjectId::label("b"))],
        );
        let p = induced_polynomial(&s, &t, &[0]).unwrap();
        assert_eq!(p.render(s.semiring()), "1 + X");
        assert!(matches!(
            induced_polynomial(&s, &t, &[1]),
            Err(UnboundError::NotALeaf(_))
        ));
    }

    #[test]
    fn increments_by_carrier() {
        let n = crate::semiring::SemiringDescriptor::nat_inf();
        let i = certify_loop(&n, &parse("X + 4", &n).unwrap()).unwrap();
        assert_eq!((i.t, i.status), (SemiringValue::nat(4), LoopStatus::Certified));
        assert!(certify_loop(&n, &parse("X", &n).unwrap()).is_none());
        let a = crate::semiring::SemiringDescriptor::arctic();
        assert!(certify_loop(&a, &parse("X + 1", &a).unwrap()).is_none());
    }

    #[test]
    fn uncertified_witness_is_rejected() {
        let s = explicit(r#"{"semiring":{"kind":"nat_inf"},"rules":[{"lhs":"a","rhs":["a"],"agg":"v1"}],"nf":{}}"#);
        let w = analyze_loops(&s, &[ObjectId::label("a")], 2, &Budgets::default(), 5).unwrap();
        assert_eq!(w[0].status(), LoopStatus::Candidate);
        assert!(matches!(
            conclude_unbounded(&s, &w[0], &Budgets::default()),
            Err(UnboundError::NotCertified(_))
        ));
    }
}
