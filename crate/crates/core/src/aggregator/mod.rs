//! Aggregator expressions: how a rule combines the weights of its children.

mod parse;
mod poly;

use std::fmt;
use std::sync::Arc;

use crate::semiring::{ExtNat, SemiringDescriptor, SemiringError, SemiringValue};

pub use parse::{parse, ParseError};
pub use poly::{extract_affine, is_affine_in_vars, probe_value};

/// Generates the `m`-th summand of a countable sum, `m = 0, 1, 2, …`.
pub type TermGenerator = Arc<dyn Fn(usize) -> AggregatorExpr + Send + Sync>;

/// `⊕_{m ≥ 0} g(m)`, available to built-in systems only.
#[derive(Clone)]
pub struct CountableSum {
    name: String,
    generator: TermGenerator,
    terms: Option<usize>,
    var_bound: Option<usize>,
}

impl CountableSum {
    /// An infinite sum whose summands reference unboundedly many variables.
    pub fn infinite(name: impl Into<String>, generator: TermGenerator) -> Self {
        CountableSum {
            name: name.into(),
            generator,
            terms: None,
            var_bound: None,
        }
    }

    /// Restricts the sum to its first `n` summands.
    pub fn with_terms(mut self, n: usize) -> Self {
        self.terms = Some(n);
        self
    }

    /// Declares that no summand mentions a variable above `bound`.
    pub fn with_var_bound(mut self, bound: usize) -> Self {
        self.var_bound = Some(bound);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn term(&self, m: usize) -> AggregatorExpr {
        (self.generator)(m)
    }

    pub fn terms(&self) -> Option<usize> {
        self.terms
    }
}

impl fmt::Debug for CountableSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CountableSum")
            .field("name", &self.name)
            .field("terms", &self.terms)
            .finish()
    }
}

impl PartialEq for CountableSum {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.terms == other.terms
            && self.var_bound == other.var_bound
            && Arc::ptr_eq(&self.generator, &other.generator)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AggregatorExpr {
    Const(SemiringValue),
    /// `v_i`, with `i ≥ 1`.
    Var(usize),
    Sum(Vec<AggregatorExpr>),
    Prod(Vec<AggregatorExpr>),
    Countable(CountableSum),
    /// The polynomial variable used for loop analysis.
    X,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AggregatorError {
    #[error("aggregator references v{index} but only {available} argument(s) were supplied")]
    Arity { index: usize, available: usize },
    #[error("aggregator mentions X but no value was bound to it")]
    UnboundX,
    #[error("invalid aggregator: {0}")]
    Invalid(String),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
}

impl AggregatorExpr {
    pub fn constant(v: SemiringValue) -> Self {
        AggregatorExpr::Const(v)
    }

    pub fn var(i: usize) -> Self {
        assert!(i >= 1, "variable indices start at 1");
        AggregatorExpr::Var(i)
    }

    pub fn sum(items: Vec<AggregatorExpr>) -> Self {
        assert!(!items.is_empty(), "empty sum node");
        AggregatorExpr::Sum(items)
    }

    pub fn prod(items: Vec<AggregatorExpr>) -> Self {
        assert!(!items.is_empty(), "empty product node");
        AggregatorExpr::Prod(items)
    }

    /// `sup { i | v_i occurs }`, `0` when no variable occurs.
    pub fn max_var(&self) -> ExtNat {
        match self {
            AggregatorExpr::Const(_) | AggregatorExpr::X => ExtNat::Fin(0),
            AggregatorExpr::Var(i) => ExtNat::Fin(*i as u64),
            AggregatorExpr::Sum(items) | AggregatorExpr::Prod(items) => items
                .iter()
                .map(AggregatorExpr::max_var)
                .max()
                .unwrap_or(ExtNat::Fin(0)),
            AggregatorExpr::Countable(c) => match (c.var_bound, c.terms) {
                (Some(b), _) => ExtNat::Fin(b as u64),
                (None, Some(n)) => (0..n).map(|m| c.term(m).max_var()).max().unwrap_or(ExtNat::Fin(0)),
                (None, None) => ExtNat::Inf,
            },
        }
    }

    pub fn contains_x(&self) -> bool {
        match self {
            AggregatorExpr::X => true,
            AggregatorExpr::Sum(items) | AggregatorExpr::Prod(items) => items.iter().any(AggregatorExpr::contains_x),
            _ => false,
        }
    }

    pub fn contains_var(&self) -> bool {
        match self {
            AggregatorExpr::Var(_) | AggregatorExpr::Countable(_) => true,
            AggregatorExpr::Sum(items) | AggregatorExpr::Prod(items) => items.iter().any(AggregatorExpr::contains_var),
            _ => false,
        }
    }

    /// True when the expression is built from finitely many nodes.
    pub fn is_finite(&self) -> bool {
        match self {
            AggregatorExpr::Countable(c) => c.terms.is_some(),
            AggregatorExpr::Sum(items) | AggregatorExpr::Prod(items) => items.iter().all(AggregatorExpr::is_finite),
            _ => true,
        }
    }

    /// Visits every constant, expanding finite countable sums.
    pub fn constants(&self) -> Vec<SemiringValue> {
        let mut out = Vec::new();
        self.collect_constants(&mut out);
        out
    }

    fn collect_constants(&self, out: &mut Vec<SemiringValue>) {
        match self {
            AggregatorExpr::Const(v) => out.push(v.clone()),
            AggregatorExpr::Sum(items) | AggregatorExpr::Prod(items) => {
                for e in items {
                    e.collect_constants(out);
                }
            }
            AggregatorExpr::Countable(c) => {
                if let Some(n) = c.terms {
                    for m in 0..n {
                        c.term(m).collect_constants(out);
                    }
                }
            }
            _ => {}
        }
    }

    /// Evaluates over `args`; countable sums use their first `truncation`
    /// summands. The flag is false when truncation may have lost mass.
    pub fn eval(
        &self,
        desc: &SemiringDescriptor,
        args: &[SemiringValue],
        truncation: usize,
    ) -> Result<(SemiringValue, bool), AggregatorError> {
        self.eval_at(desc, args, None, truncation)
    }

    /// Like [`eval`](Self::eval), with `X` bound to `x`.
    pub fn eval_at(
        &self,
        desc: &SemiringDescriptor,
        args: &[SemiringValue],
        x: Option<&SemiringValue>,
        truncation: usize,
    ) -> Result<(SemiringValue, bool), AggregatorError> {
        Ok(match self {
            AggregatorExpr::Const(v) => (v.clone(), true),
            AggregatorExpr::Var(i) => match args.get(i.wrapping_sub(1)) {
                Some(v) if *i >= 1 => (v.clone(), true),
                _ => {
                    return Err(AggregatorError::Arity {
                        index: *i,
                        available: args.len(),
                    })
                }
            },
            AggregatorExpr::X => (x.ok_or(AggregatorError::UnboundX)?.clone(), true),
            AggregatorExpr::Sum(items) => fold_items(
                items,
                desc.zero(),
                |a, b| desc.plus(a, b),
                |e| e.eval_at(desc, args, x, truncation),
            )?,
            AggregatorExpr::Prod(items) => fold_items(
                items,
                desc.one(),
                |a, b| desc.times(a, b),
                |e| e.eval_at(desc, args, x, truncation),
            )?,
            AggregatorExpr::Countable(c) => {
                let limit = c.terms.map_or(truncation, |n| n.min(truncation));
                let mut acc = desc.zero().clone();
                let mut exact = c.terms.is_some_and(|n| n <= truncation);
                for m in 0..limit {
                    let term = c.term(m);
                    let needs = match term.max_var() {
                        ExtNat::Fin(k) => k as usize,
                        ExtNat::Inf => usize::MAX,
                    };
                    if needs > args.len() {
                        exact = false;
                        continue;
                    }
                    let (v, ex) = term.eval_at(desc, args, x, truncation)?;
                    acc = desc.plus(&acc, &v)?;
                    exact &= ex;
                }
                if desc.is_top(&acc) {
                    exact = true;
                }
                (acc, exact)
            }
        })
    }

    /// Replaces every `X` leaf by `inner`.
    pub fn substitute_x(&self, inner: &AggregatorExpr) -> AggregatorExpr {
        match self {
            AggregatorExpr::X => inner.clone(),
            AggregatorExpr::Sum(items) => AggregatorExpr::Sum(items.iter().map(|e| e.substitute_x(inner)).collect()),
            AggregatorExpr::Prod(items) => AggregatorExpr::Prod(items.iter().map(|e| e.substitute_x(inner)).collect()),
            other => other.clone(),
        }
    }

    /// Replaces `v_i` by `children[i-1]`. Countable sums are expanded to
    /// their first `truncation` summands, dropping those that mention a
    /// variable beyond `children`.
    pub fn substitute_vars(
        &self,
        children: &[AggregatorExpr],
        desc: &SemiringDescriptor,
        truncation: usize,
    ) -> Result<AggregatorExpr, AggregatorError> {
        Ok(match self {
            AggregatorExpr::Var(i) => children.get(i.wrapping_sub(1)).cloned().ok_or(AggregatorError::Arity {
                index: *i,
                available: children.len(),
            })?,
            AggregatorExpr::Sum(items) => AggregatorExpr::Sum(
                items
                    .iter()
                    .map(|e| e.substitute_vars(children, desc, truncation))
                    .collect::<Result<_, _>>()?,
            ),
            AggregatorExpr::Prod(items) => AggregatorExpr::Prod(
                items
                    .iter()
                    .map(|e| e.substitute_vars(children, desc, truncation))
                    .collect::<Result<_, _>>()?,
            ),
            AggregatorExpr::Countable(c) => {
                let limit = c.terms.map_or(truncation, |n| n.min(truncation));
                let mut kept = Vec::new();
                for m in 0..limit {
                    let term = c.term(m);
                    let fits = matches!(term.max_var(), ExtNat::Fin(k) if k as usize <= children.len());
                    if fits {
                        kept.push(term.substitute_vars(children, desc, truncation)?);
                    }
                }
                if kept.is_empty() {
                    AggregatorExpr::Const(desc.zero().clone())
                } else {
                    AggregatorExpr::Sum(kept)
                }
            }
            other => other.clone(),
        })
    }

    /// Folds every variable-free, `X`-free subtree into a constant.
    pub fn fold_constants(&self, desc: &SemiringDescriptor) -> Result<AggregatorExpr, AggregatorError> {
        if !self.contains_x() && !self.contains_var() {
            let (v, _) = self.eval(desc, &[], 1)?;
            return Ok(AggregatorExpr::Const(v));
        }
        Ok(match self {
            AggregatorExpr::Sum(items) => AggregatorExpr::Sum(fold_list(items, desc, true)?),
            AggregatorExpr::Prod(items) => AggregatorExpr::Prod(fold_list(items, desc, false)?),
            other => other.clone(),
        })
    }

    /// Renders the expression with literals in `desc`'s syntax.
    pub fn render(&self, desc: &SemiringDescriptor) -> String {
        let mut out = String::new();
        self.render_into(desc, &mut out);
        out
    }

    fn render_into(&self, desc: &SemiringDescriptor, out: &mut String) {
        match self {
            AggregatorExpr::Const(v) => out.push_str(&desc.format(v)),
            AggregatorExpr::Var(i) => {
                out.push('v');
                out.push_str(&i.to_string());
            }
            AggregatorExpr::X => out.push('X'),
            AggregatorExpr::Sum(items) => {
                for (k, e) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(" + ");
                    }
                    let wrap = matches!(e, AggregatorExpr::Sum(_) | AggregatorExpr::Countable(_));
                    render_child(e, desc, wrap, out);
                }
            }
            AggregatorExpr::Prod(items) => {
                for (k, e) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(" * ");
                    }
                    let wrap = matches!(
                        e,
                        AggregatorExpr::Sum(_) | AggregatorExpr::Prod(_) | AggregatorExpr::Countable(_)
                    );
                    render_child(e, desc, wrap, out);
                }
            }
            AggregatorExpr::Countable(c) => {
                out.push_str("sum[");
                out.push_str(&c.name);
                out.push(']');
            }
        }
    }
}

fn render_child(e: &AggregatorExpr, desc: &SemiringDescriptor, wrap: bool, out: &mut String) {
    if wrap {
        out.push('(');
        e.render_into(desc, out);
        out.push(')');
    } else {
        e.render_into(desc, out);
    }
}

fn fold_list(
    items: &[AggregatorExpr],
    desc: &SemiringDescriptor,
    is_sum: bool,
) -> Result<Vec<AggregatorExpr>, AggregatorError> {
    let mut out = Vec::with_capacity(items.len());
    for e in items {
        let folded = e.fold_constants(desc)?;
        if let (Some(AggregatorExpr::Const(prev)), AggregatorExpr::Const(cur)) = (out.last(), &folded) {
            let merged = if is_sum {
                desc.plus(prev, cur)?
            } else {
                desc.times(prev, cur)?
            };
            *out.last_mut().unwrap() = AggregatorExpr::Const(merged);
        } else {
            out.push(folded);
        }
    }
    Ok(out)
}

/// Combines the evaluated items left to right, starting from the first
/// one; `unit` is returned for an empty list.
fn fold_items<O, E>(
    items: &[AggregatorExpr],
    unit: &SemiringValue,
    op: O,
    mut eval: E,
) -> Result<(SemiringValue, bool), AggregatorError>
where
    O: Fn(&SemiringValue, &SemiringValue) -> Result<SemiringValue, SemiringError>,
    E: FnMut(&AggregatorExpr) -> Result<(SemiringValue, bool), AggregatorError>,
{
    let mut it = items.iter();
    let Some(first) = it.next() else {
        return Ok((unit.clone(), true));
    };
    let (mut acc, mut exact) = eval(first)?;
    for e in it {
        let (v, ex) = eval(e)?;
        acc = op(&acc, &v)?;
        exact &= ex;
    }
    Ok((acc, exact))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometric() -> AggregatorExpr {
        AggregatorExpr::Countable(CountableSum::infinite(
            "geo",
            Arc::new(|m| {
                AggregatorExpr::Prod(vec![
                    AggregatorExpr::Const(SemiringValue::real(1, 1i64 << (m + 1).min(62))),
                    AggregatorExpr::Var(m + 1),
                ])
            }),
        ))
    }

    #[test]
    fn max_var_cases() {
        let d = SemiringDescriptor::nat_inf();
        assert_eq!(parse("1 + v1", &d).unwrap().max_var(), ExtNat::Fin(1));
        assert_eq!(parse("5", &d).unwrap().max_var(), ExtNat::Fin(0));
        assert_eq!(geometric().max_var(), ExtNat::Inf);
    }

    #[test]
    fn eval_walk_aggregator() {
        let d = SemiringDescriptor::real_inf();
        let e = parse("(2/3 * v1) + (1/3 * v2)", &d).unwrap();
        let args = [SemiringValue::real(2, 3), SemiringValue::real(0, 1)];
        assert_eq!(e.eval(&d, &args, 8).unwrap(), (SemiringValue::real(4, 9), true));
    }

    #[test]
    fn eval_projection_and_arctic_max() {
        let a = SemiringDescriptor::arctic();
        let e = AggregatorExpr::Sum(vec![
            AggregatorExpr::Var(1),
            AggregatorExpr::Const(SemiringValue::arctic(3)),
        ]);
        assert_eq!(
            e.eval(&a, &[SemiringValue::arctic(1)], 1).unwrap(),
            (SemiringValue::arctic(3), true)
        );
        let b = SemiringDescriptor::boolean();
        assert_eq!(
            AggregatorExpr::Var(1)
                .eval(&b, &[SemiringValue::Bool(true)], 1)
                .unwrap(),
            (SemiringValue::Bool(true), true)
        );
    }

    #[test]
    fn arity_error_names_index() {
        let d = SemiringDescriptor::nat_inf();
        let err = parse("v3", &d)
            .unwrap()
            .eval(&d, &[SemiringValue::nat(1)], 1)
            .unwrap_err();
        assert_eq!(err, AggregatorError::Arity { index: 3, available: 1 });
    }

    #[test]
    fn truncated_countable_sum_is_monotone_and_inexact() {
        let d = SemiringDescriptor::real_inf();
        let ones: Vec<SemiringValue> = (0..10).map(|_| SemiringValue::real(1, 1)).collect();
        let g = geometric();
        let mut prev = d.zero().clone();
        for k in 1..10 {
            let (v, exact) = g.eval(&d, &ones, k).unwrap();
            assert!(!exact);
            assert!(d.leq(&prev, &v).unwrap());
            prev = v;
        }
        // summands whose variable is missing are skipped
        let (v, _) = g.eval(&d, &ones[..2], 5).unwrap();
        assert_eq!(v, SemiringValue::real(3, 4));
    }

    #[test]
    fn substitute_x_composes() {
        let d = SemiringDescriptor::nat_inf();
        let p = parse("X + 4", &d).unwrap();
        let pp = p.substitute_x(&p);
        let x8 = parse("X + 8", &d).unwrap();
        for x in 0..=5 {
            let xv = SemiringValue::nat(x);
            assert_eq!(
                pp.eval_at(&d, &[], Some(&xv), 1).unwrap(),
                x8.eval_at(&d, &[], Some(&xv), 1).unwrap()
            );
        }
        let zero = AggregatorExpr::Const(SemiringValue::nat(0));
        assert_eq!(AggregatorExpr::X.substitute_x(&zero), zero);
    }

    #[test]
    fn substitute_x_arctic_idempotent_body() {
        let a = SemiringDescriptor::arctic();
        let p = parse("X + 1", &a).unwrap();
        let pp = p.substitute_x(&p);
        let probes = [
            a.parse_value("-inf").unwrap(),
            SemiringValue::arctic(0),
            SemiringValue::arctic(1),
            SemiringValue::arctic(7),
            a.parse_value("inf").unwrap(),
        ];
        for x in &probes {
            assert_eq!(
                pp.eval_at(&a, &[], Some(x), 1).unwrap(),
                p.eval_at(&a, &[], Some(x), 1).unwrap()
            );
        }
    }

    #[test]
    fn fold_constants_collapses_closed_subtrees() {
        let d = SemiringDescriptor::nat_inf();
        let e = parse("(1 + 2) * X + 3 * 4", &d).unwrap();
        let f = e.fold_constants(&d).unwrap();
        assert_eq!(f.render(&d), "3 * X + 12");
    }
}
