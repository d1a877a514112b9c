use std::collections::HashMap;
use std::sync::Arc;

use super::{Budgets, EvalError, PartialBound, WeightBound, WeightStatus};
use crate::aggregator::AggregatorExpr;
use crate::par::{try_map_range, Parallelism};
use crate::semiring::SemiringValue;
use crate::system::{ObjectId, Successors, WeightedSystem};

/// Stands for an object left out because the visit cap was reached.
const DROPPED: usize = usize::MAX;

struct Node {
    nf: Option<SemiringValue>,
    rules: Vec<(Arc<AggregatorExpr>, Vec<usize>)>,
    expanded: bool,
    /// Every rule was returned and every right-hand side is complete.
    closed: bool,
    dist: usize,
}

struct Engine<'a> {
    sys: &'a dyn WeightedSystem,
    budgets: Budgets,
    mode: Parallelism,
    index: HashMap<ObjectId, usize>,
    objects: Vec<ObjectId>,
    nodes: Vec<Node>,
    capped: bool,
    horizon: usize,
}

impl<'a> Engine<'a> {
    fn new(sys: &'a dyn WeightedSystem, budgets: Budgets, mode: Parallelism) -> Self {
        Engine {
            sys,
            budgets,
            mode,
            index: HashMap::new(),
            objects: Vec::new(),
            nodes: Vec::new(),
            capped: false,
            horizon: 0,
        }
    }

    fn intern(&mut self, a: &ObjectId, dist: usize) -> Result<(usize, bool), EvalError> {
        if let Some(&i) = self.index.get(a) {
            return Ok((i, false));
        }
        if self.objects.len() >= self.budgets.visit_cap {
            self.capped = true;
            return Ok((DROPPED, false));
        }
        let nf = if self.sys.is_normal_form(a)? {
            Some(self.sys.nf_weight(a)?)
        } else {
            None
        };
        let i = self.objects.len();
        self.index.insert(a.clone(), i);
        self.objects.push(a.clone());
        self.nodes.push(Node {
            closed: nf.is_some(),
            nf,
            rules: Vec::new(),
            expanded: false,
            dist,
        });
        Ok((i, true))
    }

    /// Expands every object within distance `< horizon` of the roots.
    fn explore(&mut self, roots: &[ObjectId], horizon: usize) -> Result<Vec<usize>, EvalError> {
        self.horizon = horizon;
        let mut ids = Vec::with_capacity(roots.len());
        let mut layer = Vec::new();
        for a in roots {
            let (i, fresh) = self.intern(a, 0)?;
            if i == DROPPED {
                return Err(EvalError::VisitCap {
                    cap: self.budgets.visit_cap,
                    partial: Box::new(self.partial(self.sys.semiring().zero().clone(), 0)),
                });
            }
            ids.push(i);
            if fresh {
                layer.push(i);
            }
        }
        let limits = self.budgets.limits();
        for d in 0..horizon {
            let todo: Vec<usize> = layer
                .iter()
                .copied()
                .filter(|&i| self.nodes[i].nf.is_none() && !self.nodes[i].expanded)
                .collect();
            if todo.is_empty() {
                break;
            }
            let sys = self.sys;
            let objects = &self.objects;
            let found: Vec<Successors> =
                try_map_range(todo.len(), self.mode, |k| sys.successors(&objects[todo[k]], limits))?;
            let mut next = Vec::new();
            for (i, succ) in todo.into_iter().zip(found) {
                let mut closed = succ.complete;
                let mut rules = Vec::with_capacity(succ.rules.len());
                for r in succ.rules {
                    closed &= r.rhs_complete;
                    let mut kids = Vec::with_capacity(r.rhs.len());
                    for b in &r.rhs {
                        let (j, fresh) = self.intern(b, d + 1)?;
                        if fresh {
                            next.push(j);
                        }
                        kids.push(j);
                    }
                    rules.push((r.aggregator, kids));
                }
                let node = &mut self.nodes[i];
                node.rules = rules;
                node.expanded = true;
                node.closed = closed;
            }
            layer = next;
        }
        Ok(ids)
    }

    fn all_closed(&self) -> bool {
        !self.capped && self.nodes.iter().all(|n| n.closed && (n.expanded || n.nf.is_some()))
    }

    fn initial(&self) -> Vec<SemiringValue> {
        let zero = self.sys.semiring().zero();
        self.nodes
            .iter()
            .map(|n| n.nf.clone().unwrap_or_else(|| zero.clone()))
            .collect()
    }

    /// One step `W_k → W_{k+1}`. Objects further than `horizon - k` from
    /// every root cannot influence the roots any more and keep their value.
    fn step(
        &self,
        values: &[SemiringValue],
        k: usize,
        everywhere: bool,
    ) -> Result<(Vec<SemiringValue>, bool), EvalError> {
        let desc = self.sys.semiring();
        let zero = desc.zero();
        let trunc = self.budgets.branch_trunc;
        let reach = self.horizon.saturating_sub(k);
        let out = try_map_range(
            self.nodes.len(),
            self.mode,
            |i| -> Result<(SemiringValue, bool), EvalError> {
                let node = &self.nodes[i];
                if let Some(v) = &node.nf {
                    return Ok((v.clone(), true));
                }
                if !node.expanded || (!everywhere && node.dist > reach) {
                    return Ok((values[i].clone(), true));
                }
                let mut acc: Option<SemiringValue> = None;
                let mut exact = true;
                let mut args = Vec::new();
                for (agg, kids) in &node.rules {
                    args.clear();
                    args.extend(
                        kids.iter()
                            .map(|&j| if j == DROPPED { zero.clone() } else { values[j].clone() }),
                    );
                    let (v, ex) = agg.eval(desc, &args, trunc)?;
                    exact &= ex;
                    acc = Some(match acc {
                        None => v,
                        Some(a) => desc.lub(&a, &v)?,
                    });
                }
                Ok((acc.unwrap_or_else(|| zero.clone()), exact))
            },
        )?;
        let exact = out.iter().all(|(_, e)| *e);
        Ok((out.into_iter().map(|(v, _)| v).collect(), exact))
    }

    fn partial(&self, value: SemiringValue, depth: usize) -> PartialBound {
        let value_text = self.sys.semiring().format(&value);
        PartialBound {
            bound: WeightBound {
                value,
                status: WeightStatus::LowerBound,
                depth_explored: depth,
                budgets: self.budgets,
                visited: self.objects.len(),
            },
            value_text,
        }
    }

    fn finish(&self, value: SemiringValue, status: WeightStatus, depth: usize) -> Result<WeightBound, EvalError> {
        if self.capped {
            return Err(EvalError::VisitCap {
                cap: self.budgets.visit_cap,
                partial: Box::new(self.partial(value, depth)),
            });
        }
        Ok(WeightBound {
            value,
            status,
            depth_explored: depth,
            budgets: self.budgets,
            visited: self.objects.len(),
        })
    }
}

/// `W_0(a), W_1(a), …, W_depth(a)` by value iteration.
pub fn lower_bound_series(
    sys: &dyn WeightedSystem,
    a: &ObjectId,
    depth: usize,
    budgets: &Budgets,
    mode: Parallelism,
) -> Result<Vec<SemiringValue>, EvalError> {
    let mut e = Engine::new(sys, *budgets, mode);
    let root = e.explore(std::slice::from_ref(a), depth)?[0];
    let mut values = e.initial();
    let mut series = vec![values[root].clone()];
    for k in 0..depth {
        values = e.step(&values, k, false)?.0;
        series.push(values[root].clone());
    }
    if e.capped {
        let last = series.pop().unwrap();
        return Err(EvalError::VisitCap {
            cap: budgets.visit_cap,
            partial: Box::new(e.partial(last, depth)),
        });
    }
    Ok(series)
}

/// `W_depth(a)`, a sound lower bound on `⟦a⟧`:
/// `W_0(a) = f_NF(a)` or `𝟎`, and `W_{k+1}(a)` joins `𝟎` with every
/// rule's aggregator applied to the children's `W_k`.
pub fn weight_lower_bound(
    sys: &dyn WeightedSystem,
    a: &ObjectId,
    depth: usize,
    budgets: &Budgets,
) -> Result<WeightBound, EvalError> {
    weight_lower_bound_with(sys, a, depth, budgets, Parallelism::default())
}

pub fn weight_lower_bound_with(
    sys: &dyn WeightedSystem,
    a: &ObjectId,
    depth: usize,
    budgets: &Budgets,
    mode: Parallelism,
) -> Result<WeightBound, EvalError> {
    let mut e = Engine::new(sys, *budgets, mode);
    let root = e.explore(std::slice::from_ref(a), depth)?[0];
    let mut values = e.initial();
    for k in 0..depth {
        values = e.step(&values, k, false)?.0;
    }
    e.finish(values.swap_remove(root), WeightStatus::LowerBound, depth)
}

/// Iterates until a fixpoint on a successor-closed, completely enumerated
/// object set, or until `max_depth`. Only a genuine fixpoint is reported
/// as stabilized.
pub fn evaluate_to_fixpoint(
    sys: &dyn WeightedSystem,
    a: &ObjectId,
    max_depth: usize,
    budgets: &Budgets,
) -> Result<WeightBound, EvalError> {
    evaluate_to_fixpoint_with(sys, a, max_depth, budgets, Parallelism::default())
}

pub fn evaluate_to_fixpoint_with(
    sys: &dyn WeightedSystem,
    a: &ObjectId,
    max_depth: usize,
    budgets: &Budgets,
    mode: Parallelism,
) -> Result<WeightBound, EvalError> {
    let mut e = Engine::new(sys, *budgets, mode);
    let root = e.explore(std::slice::from_ref(a), max_depth)?[0];
    let closed = e.all_closed();
    let mut values = e.initial();
    for k in 0..max_depth {
        let (next, exact) = e.step(&values, k, closed)?;
        let stable = closed && exact && next == values;
        values = next;
        if stable {
            return e.finish(values.swap_remove(root), WeightStatus::Stabilized, k + 1);
        }
    }
    e.finish(values.swap_remove(root), WeightStatus::LowerBound, max_depth)
}
