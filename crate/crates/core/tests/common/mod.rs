#![allow(dead_code)]

use std::collections::BTreeSet;

use num_rational::BigRational;
use proptest::prelude::*;
use wars::aggregator::AggregatorExpr;
use wars::semiring::{Arctic, Bottle, ExtNat, ExtReal, Language, SemiringDescriptor, SemiringError, Word};
use wars::{SemiringKind, SemiringValue};

pub fn carriers() -> Vec<SemiringDescriptor> {
    vec![
        SemiringDescriptor::nat_inf(),
        SemiringDescriptor::real_inf(),
        SemiringDescriptor::tropical(),
        SemiringDescriptor::arctic(),
        SemiringDescriptor::boolean(),
        SemiringDescriptor::confidence(),
        SemiringDescriptor::bottleneck(),
        SemiringDescriptor::language(["0", "1"]).unwrap(),
        SemiringDescriptor::product(vec![SemiringDescriptor::nat_inf(), SemiringDescriptor::boolean()]).unwrap(),
    ]
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn value(desc: &SemiringDescriptor) -> BoxedStrategy<SemiringValue> {
    match desc.kind() {
        SemiringKind::NatInf | SemiringKind::Tropical => prop_oneof![
            1 => Just(SemiringValue::nat_inf()),
            2 => Just(SemiringValue::nat(0)),
            9 => (0u64..200).prop_map(SemiringValue::nat),
        ]
        .boxed(),
        SemiringKind::RealInf => prop_oneof![
            1 => Just(SemiringValue::Real(ExtReal::Inf)),
            9 => (0i64..50, 1i64..8).prop_map(|(n, d)| SemiringValue::real(n, d)),
        ]
        .boxed(),
        SemiringKind::Arctic => prop_oneof![
            1 => Just(SemiringValue::Arctic(Arctic::NegInf)),
            1 => Just(SemiringValue::Arctic(Arctic::PosInf)),
            8 => (0u64..200).prop_map(SemiringValue::arctic),
        ]
        .boxed(),
        SemiringKind::Boolean => any::<bool>().prop_map(SemiringValue::Bool).boxed(),
        SemiringKind::Confidence => (0i64..=12)
            .prop_flat_map(|d| (0..=d.max(1), Just(d.max(1))))
            .prop_map(|(n, d)| SemiringValue::Conf(ratio(n, d)))
            .boxed(),
        SemiringKind::Bottleneck => prop_oneof![
            1 => Just(SemiringValue::Bottle(Bottle::NegInf)),
            1 => Just(SemiringValue::Bottle(Bottle::PosInf)),
            8 => (-30i64..30, 1i64..5).prop_map(|(n, d)| SemiringValue::Bottle(Bottle::Fin(ratio(n, d)))),
        ]
        .boxed(),
        SemiringKind::Language => prop_oneof![
            1 => Just(SemiringValue::Lang(Language::Top)),
            9 => proptest::collection::btree_set(proptest::collection::vec(0u8..2, 0..3).prop_map(Word), 0..3)
                .prop_map(|ws: BTreeSet<Word>| SemiringValue::Lang(Language::Words(ws))),
        ]
        .boxed(),
        SemiringKind::Product => {
            let parts: Vec<BoxedStrategy<SemiringValue>> = desc.components().iter().map(value).collect();
            parts.prop_map(SemiringValue::Tuple).boxed()
        }
    }
}

/// Aggregators over `v1..v3` with constants of `desc`.
pub fn aggregator(desc: &SemiringDescriptor) -> BoxedStrategy<AggregatorExpr> {
    let leaf = prop_oneof![
        3 => (1usize..=3).prop_map(AggregatorExpr::Var),
        1 => value(desc).prop_map(AggregatorExpr::Const),
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 1..3).prop_map(AggregatorExpr::Sum),
            proptest::collection::vec(inner, 1..3).prop_map(AggregatorExpr::Prod),
        ]
    })
    .boxed()
}

/// A `u` with `a ⊕ u = b`, computed from the carrier's arithmetic.
fn order_witness(desc: &SemiringDescriptor, a: &SemiringValue, b: &SemiringValue) -> Option<SemiringValue> {
    if desc.kind().plus_is_idempotent() {
        return Some(b.clone());
    }
    match (a, b) {
        (SemiringValue::Nat(ExtNat::Fin(x)), SemiringValue::Nat(ExtNat::Fin(y))) => {
            Some(SemiringValue::nat(y.checked_sub(*x)?))
        }
        (_, SemiringValue::Nat(ExtNat::Inf)) => Some(SemiringValue::nat_inf()),
        (SemiringValue::Real(ExtReal::Fin(x)), SemiringValue::Real(ExtReal::Fin(y))) => {
            Some(SemiringValue::Real(ExtReal::Fin(y - x)))
        }
        (_, SemiringValue::Real(ExtReal::Inf)) => Some(SemiringValue::Real(ExtReal::Inf)),
        (SemiringValue::Tuple(xs), SemiringValue::Tuple(ys)) => desc
            .components()
            .iter()
            .zip(xs.iter().zip(ys))
            .map(|(c, (x, y))| order_witness(c, x, y))
            .collect::<Option<Vec<_>>>()
            .map(SemiringValue::Tuple),
        _ => None,
    }
}

/// Results that leave the representable fragment of a carrier are skipped.
fn ok<T>(r: Result<T, SemiringError>) -> Result<Option<T>, String> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(SemiringError::Unrepresentable(_)) => Ok(None),
        Err(e) => Err(e.to_string()),
    }
}

macro_rules! get {
    ($e:expr) => {
        match ok($e)? {
            Some(v) => v,
            None => return Ok(()),
        }
    };
}

macro_rules! check {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

/// Semiring axioms, natural order, least upper bounds, monotonicity and
/// the capability flags on one triple of values.
pub fn check_laws(
    d: &SemiringDescriptor,
    a: &SemiringValue,
    b: &SemiringValue,
    c: &SemiringValue,
) -> Result<(), String> {
    let f = |v: &SemiringValue| d.format(v);
    let zero = d.zero();
    let one = d.one();
    let ab = get!(d.plus(a, b));
    check!(ab == get!(d.plus(b, a)), "plus not commutative at {} {}", f(a), f(b));
    check!(
        get!(d.plus(&ab, c)) == get!(d.plus(a, &get!(d.plus(b, c)))),
        "plus not associative"
    );
    check!(get!(d.plus(a, zero)) == *a, "zero not neutral for {}", f(a));
    let tab = get!(d.times(a, b));
    check!(
        get!(d.times(&tab, c)) == get!(d.times(a, &get!(d.times(b, c)))),
        "times not associative"
    );
    check!(
        get!(d.times(a, one)) == *a && get!(d.times(one, a)) == *a,
        "one not neutral for {}",
        f(a)
    );
    check!(
        d.is_zero(&get!(d.times(a, zero))) && d.is_zero(&get!(d.times(zero, a))),
        "zero does not annihilate {}",
        f(a)
    );
    let left = get!(d.times(a, &get!(d.plus(b, c))));
    let right = get!(d.plus(&get!(d.times(a, b)), &get!(d.times(a, c))));
    check!(left == right, "left distributivity fails at {} {} {}", f(a), f(b), f(c));
    let left = get!(d.times(&get!(d.plus(a, b)), c));
    let right = get!(d.plus(&get!(d.times(a, c)), &get!(d.times(b, c))));
    check!(
        left == right,
        "right distributivity fails at {} {} {}",
        f(a),
        f(b),
        f(c)
    );

    check!(get!(d.leq(a, &ab)), "a is not below a + b");
    check!(
        get!(d.leq(zero, a)) && get!(d.leq(a, d.top())),
        "{} outside [0, top]",
        f(a)
    );
    let ab_le = get!(d.leq(a, b));
    if ab_le {
        let u = order_witness(d, a, b).ok_or_else(|| format!("no order witness for {} <= {}", f(a), f(b)))?;
        check!(
            get!(d.plus(a, &u)) == *b,
            "order witness fails for {} <= {}",
            f(a),
            f(b)
        );
        if get!(d.leq(b, a)) {
            check!(a == b, "order not antisymmetric at {} {}", f(a), f(b));
        }
        check!(
            get!(d.leq(&get!(d.plus(a, c)), &get!(d.plus(b, c)))),
            "plus not monotone"
        );
        check!(
            get!(d.leq(&get!(d.times(a, c)), &get!(d.times(b, c)))),
            "times not monotone on the left"
        );
        check!(
            get!(d.leq(&get!(d.times(c, a)), &get!(d.times(c, b)))),
            "times not monotone on the right"
        );
    }
    let l = get!(d.lub(a, b));
    check!(get!(d.leq(a, &l)) && get!(d.leq(b, &l)), "lub is not an upper bound");
    if get!(d.leq(a, c)) && get!(d.leq(b, c)) {
        check!(get!(d.leq(&l, c)), "lub is not least");
    }
    if let (SemiringValue::Tuple(xs), SemiringValue::Tuple(ys), SemiringValue::Tuple(ls)) = (a, b, &l) {
        for ((comp, (x, y)), z) in d.components().iter().zip(xs.iter().zip(ys)).zip(ls) {
            check!(get!(comp.lub(x, y)) == *z, "product join not pointwise");
        }
        let pointwise = d
            .components()
            .iter()
            .zip(xs.iter().zip(ys))
            .all(|(comp, (x, y))| comp.leq(x, y).unwrap_or(false));
        check!(ab_le == pointwise, "product order not pointwise");
    }

    let flags = d.flags();
    if flags.plus_is_selective {
        check!(
            ab == *a || ab == *b,
            "plus flagged selective but {} + {} = {}",
            f(a),
            f(b),
            f(&ab)
        );
    }
    if flags.times_is_selective {
        check!(tab == *a || tab == *b, "times flagged selective");
    }
    if flags.has_extremal_property && !d.is_top(a) && !d.is_top(b) {
        check!(
            !d.is_top(&ab) && !d.is_top(&tab),
            "extremal flag violated at {} {}",
            f(a),
            f(b)
        );
    }
    Ok(())
}

/// `x ⪯ y` pointwise implies `Aggr(x) ⪯ Aggr(y)`.
pub fn check_aggregator_monotone(
    d: &SemiringDescriptor,
    agg: &AggregatorExpr,
    x: &[SemiringValue],
    bump: &[SemiringValue],
) -> Result<(), String> {
    let mut y = Vec::with_capacity(x.len());
    for (v, u) in x.iter().zip(bump) {
        y.push(get!(d.plus(v, u)));
    }
    let eval = |args: &[SemiringValue]| match agg.eval(d, args, 4) {
        Ok((v, _)) => Ok(Some(v)),
        Err(e) if e.to_string().contains("representable") || e.to_string().contains("overflow") => Ok(None),
        Err(e) => Err(e.to_string()),
    };
    let (Some(ex), Some(ey)) = (eval(x)?, eval(&y)?) else {
        return Ok(());
    };
    check!(get!(d.leq(&ex, &ey)), "aggregator `{}` not monotone", agg.render(d));
    Ok(())
}

/// `cases` samples without a regression file.
pub fn runner(cases: u32) -> proptest::test_runner::TestRunner {
    proptest::test_runner::TestRunner::new(proptest::test_runner::Config {
        failure_persistence: None,
        ..proptest::test_runner::Config::with_cases(cases)
    })
}
