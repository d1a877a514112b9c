use crate::semiring::{SemiringDescriptor, SemiringKind, SemiringValue};

use super::AggregatorExpr;

/// The value `k` embedded in a numeric carrier (`k·𝟏` for the additive
/// carriers), or `None` for carriers without a natural numeral.
pub fn probe_value(desc: &SemiringDescriptor, k: u64) -> Option<SemiringValue> {
    match desc.kind() {
        SemiringKind::NatInf | SemiringKind::Tropical => Some(SemiringValue::nat(k)),
        SemiringKind::RealInf => Some(SemiringValue::real(k as i64, 1)),
        SemiringKind::Arctic => Some(SemiringValue::arctic(k)),
        SemiringKind::Bottleneck => Some(SemiringValue::bottle(k as i64, 1)),
        SemiringKind::Product => desc
            .components()
            .iter()
            .map(|c| probe_value(c, k))
            .collect::<Option<Vec<_>>>()
            .map(SemiringValue::Tuple),
        _ => None,
    }
}

fn numeric_commutative(desc: &SemiringDescriptor) -> bool {
    match desc.kind() {
        SemiringKind::NatInf | SemiringKind::RealInf => true,
        SemiringKind::Product => desc.components().iter().all(numeric_commutative),
        _ => false,
    }
}

/// Coefficients of a polynomial in `X`, lowest degree first.
fn coefficients(expr: &AggregatorExpr, desc: &SemiringDescriptor) -> Option<Vec<SemiringValue>> {
    match expr {
        AggregatorExpr::Const(v) => Some(vec![v.clone()]),
        AggregatorExpr::X => Some(vec![desc.zero().clone(), desc.one().clone()]),
        AggregatorExpr::Var(_) | AggregatorExpr::Countable(_) => None,
        AggregatorExpr::Sum(items) => {
            let mut acc: Vec<SemiringValue> = vec![desc.zero().clone()];
            for e in items {
                let p = coefficients(e, desc)?;
                if p.len() > acc.len() {
                    acc.resize(p.len(), desc.zero().clone());
                }
                for (i, c) in p.iter().enumerate() {
                    acc[i] = desc.plus(&acc[i], c).ok()?;
                }
            }
            Some(acc)
        }
        AggregatorExpr::Prod(items) => {
            let mut acc: Vec<SemiringValue> = vec![desc.one().clone()];
            for e in items {
                let p = coefficients(e, desc)?;
                let mut out = vec![desc.zero().clone(); acc.len() + p.len() - 1];
                for (i, a) in acc.iter().enumerate() {
                    for (j, b) in p.iter().enumerate() {
                        let t = desc.times(a, b).ok()?;
                        out[i + j] = desc.plus(&out[i + j], &t).ok()?;
                    }
                }
                acc = out;
            }
            Some(acc)
        }
    }
}

/// Rewrites an `X`-polynomial over `ℕ∞`, `ℝ∞` or a product of those into
/// `c ⊙ X ⊕ d`. The result is discarded unless it agrees with direct
/// evaluation at `X ∈ {0, 1, 2, 5}`.
pub fn extract_affine(expr: &AggregatorExpr, desc: &SemiringDescriptor) -> Option<(SemiringValue, SemiringValue)> {
    if !numeric_commutative(desc) {
        return None;
    }
    let coeffs = coefficients(expr, desc)?;
    if coeffs.iter().skip(2).any(|c| !desc.is_zero(c)) {
        return None;
    }
    let d = coeffs[0].clone();
    let c = coeffs.get(1).cloned().unwrap_or_else(|| desc.zero().clone());
    for k in [0, 1, 2, 5] {
        let x = probe_value(desc, k)?;
        let (direct, _) = expr.eval_at(desc, &[], Some(&x), 1).ok()?;
        let affine = desc.plus(&desc.times(&c, &x).ok()?, &d).ok()?;
        if direct != affine {
            return None;
        }
    }
    Some((c, d))
}

fn var_degree(expr: &AggregatorExpr) -> Option<usize> {
    match expr {
        AggregatorExpr::Const(_) | AggregatorExpr::X => Some(0),
        AggregatorExpr::Var(_) => Some(1),
        AggregatorExpr::Sum(items) => items.iter().map(var_degree).try_fold(0, |m, d| Some(m.max(d?))),
        AggregatorExpr::Prod(items) => items.iter().map(var_degree).try_fold(0, |m, d| Some(m + d?)),
        AggregatorExpr::Countable(_) => None,
    }
}

/// True when no product multiplies two variable-bearing factors.
pub fn is_affine_in_vars(expr: &AggregatorExpr) -> bool {
    var_degree(expr).is_some_and(|d| d <= 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregator::parse;

    #[test]
    fn extract_affine_examples() {
        let d = SemiringDescriptor::nat_inf();
        let get = |s: &str| extract_affine(&parse(s, &d).unwrap(), &d);
        assert_eq!(get("X + 4"), Some((SemiringValue::nat(1), SemiringValue::nat(4))));
        assert_eq!(get("X"), Some((SemiringValue::nat(1), SemiringValue::nat(0))));
        assert_eq!(
            get("(2*X) + (X + 3)"),
            Some((SemiringValue::nat(3), SemiringValue::nat(3)))
        );
        assert_eq!(get("X * X"), None);
        assert_eq!(get("7"), Some((SemiringValue::nat(0), SemiringValue::nat(7))));
    }

    #[test]
    fn extract_affine_agrees_at_large_probe() {
        let d = SemiringDescriptor::real_inf();
        let e = parse("1/2 * (X + 3) + 2 * X", &d).unwrap();
        let (c, off) = extract_affine(&e, &d).unwrap();
        let x = probe_value(&d, 100).unwrap();
        let lhs = e.eval_at(&d, &[], Some(&x), 1).unwrap().0;
        let rhs = d.plus(&d.times(&c, &x).unwrap(), &off).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn extract_affine_rejects_idempotent_carriers() {
        let a = SemiringDescriptor::arctic();
        assert_eq!(extract_affine(&parse("X + 1", &a).unwrap(), &a), None);
    }

    #[test]
    fn affine_in_vars() {
        let d = SemiringDescriptor::nat_inf();
        assert!(is_affine_in_vars(&parse("1 + 2 * v1 + v2", &d).unwrap()));
        assert!(!is_affine_in_vars(&parse("v1 * v2", &d).unwrap()));
    }
}
