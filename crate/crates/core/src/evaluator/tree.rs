use std::fmt;

use serde::Serialize;

use super::EvalError;
use crate::semiring::SemiringValue;
use crate::system::{Limits, ObjectId, RuleInstance, WeightedSystem};

/// A finite labelled ordered tree whose inner nodes are reduction steps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ReductionTree {
    pub label: ObjectId,
    /// Tag of the rule applied at this node; `None` for leaves.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ReductionTree>,
}

impl ReductionTree {
    pub fn leaf(label: ObjectId) -> Self {
        ReductionTree {
            label,
            rule: None,
            children: Vec::new(),
        }
    }

    pub fn node(label: ObjectId, rule: impl Into<String>, children: Vec<ReductionTree>) -> Self {
        ReductionTree {
            label,
            rule: Some(rule.into()),
            children,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.rule.is_none()
    }

    /// Length of the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        self.children.iter().map(|c| c.depth() + 1).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(ReductionTree::node_count).sum::<usize>()
    }

    /// The subtree reached by following child indices from the root.
    pub fn at(&self, path: &[usize]) -> Option<&ReductionTree> {
        path.iter().try_fold(self, |t, &i| t.children.get(i))
    }

    /// Paths to every leaf, left to right.
    pub fn leaf_paths(&self) -> Vec<Vec<usize>> {
        fn go(t: &ReductionTree, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if t.children.is_empty() {
                out.push(path.clone());
            }
            for (i, c) in t.children.iter().enumerate() {
                path.push(i);
                go(c, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Rule tags met on the way from the root to `path`.
    pub fn rule_trace(&self, path: &[usize]) -> Vec<String> {
        let mut out = Vec::new();
        let mut t = self;
        for &i in path {
            out.extend(t.rule.clone());
            match t.children.get(i) {
                Some(c) => t = c,
                None => break,
            }
        }
        out
    }
}

impl fmt::Display for ReductionTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
        if let Some(tag) = &self.rule {
            write!(f, " -{tag}-> [")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

/// Finds the rule `tag` at `label`, widening the rule budget until it is
/// found or the enumeration is complete.
pub(crate) fn find_rule(
    sys: &dyn WeightedSystem,
    label: &ObjectId,
    tag: &str,
    branches: usize,
) -> Result<RuleInstance, EvalError> {
    let mut budget = 16usize;
    loop {
        let s = sys.successors(label, Limits::new(budget, branches))?;
        if let Some(r) = s.rules.into_iter().find(|r| r.tag == tag) {
            return Ok(r);
        }
        if s.complete || budget >= 1 << 20 {
            return Err(EvalError::InvalidTree {
                node: label.to_string(),
                msg: format!("no rule tagged `{tag}`"),
            });
        }
        budget *= 2;
    }
}

/// Folds a tree bottom-up after checking every inner node against the
/// system: `leaf` maps a leaf (with its path), `inner` combines a rule
/// with the folded children.
pub fn induced_fold<T, L, N>(
    sys: &dyn WeightedSystem,
    tree: &ReductionTree,
    leaf: &mut L,
    inner: &mut N,
) -> Result<T, EvalError>
where
    L: FnMut(&ReductionTree, &[usize]) -> Result<T, EvalError>,
    N: FnMut(&RuleInstance, Vec<T>) -> Result<T, EvalError>,
{
    fn go<T, L, N>(
        sys: &dyn WeightedSystem,
        t: &ReductionTree,
        path: &mut Vec<usize>,
        leaf: &mut L,
        inner: &mut N,
    ) -> Result<T, EvalError>
    where
        L: FnMut(&ReductionTree, &[usize]) -> Result<T, EvalError>,
        N: FnMut(&RuleInstance, Vec<T>) -> Result<T, EvalError>,
    {
        let Some(tag) = &t.rule else {
            if !t.children.is_empty() {
                return Err(EvalError::InvalidTree {
                    node: t.label.to_string(),
                    msg: "children without a rule".into(),
                });
            }
            return leaf(t, path);
        };
        let rule = find_rule(sys, &t.label, tag, t.children.len())?;
        let labels_match =
            rule.rhs.len() == t.children.len() && rule.rhs.iter().zip(&t.children).all(|(b, c)| *b == c.label);
        if !labels_match {
            return Err(EvalError::InvalidTree {
                node: t.label.to_string(),
                msg: format!("children do not match the right-hand side of rule `{tag}`"),
            });
        }
        let mut values = Vec::with_capacity(t.children.len());
        for (i, c) in t.children.iter().enumerate() {
            path.push(i);
            values.push(go(sys, c, path, leaf, inner)?);
            path.pop();
        }
        inner(&rule, values)
    }
    go(sys, tree, &mut Vec::new(), leaf, inner)
}

/// `⟦T⟧`: normal-form leaves weigh `f_NF`, other leaves `𝟎`, inner nodes
/// apply their rule's aggregator to the children's weights.
pub fn tree_weight(sys: &dyn WeightedSystem, tree: &ReductionTree) -> Result<SemiringValue, EvalError> {
    let desc = sys.semiring();
    induced_fold(
        sys,
        tree,
        &mut |t, _| {
            if sys.is_normal_form(&t.label)? {
                Ok(sys.nf_weight(&t.label)?)
            } else {
                Ok(desc.zero().clone())
            }
        },
        &mut |rule, values| Ok(rule.aggregator.eval(desc, &values, values.len().max(1))?.0),
    )
}

/// `T|_n`: the tree with every node below depth `n` removed.
pub fn truncate(tree: &ReductionTree, n: usize) -> ReductionTree {
    if n == 0 || tree.is_leaf() {
        return ReductionTree::leaf(tree.label.clone());
    }
    ReductionTree {
        label: tree.label.clone(),
        rule: tree.rule.clone(),
        children: tree.children.iter().map(|c| truncate(c, n - 1)).collect(),
    }
}
