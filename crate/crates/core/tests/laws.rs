mod common;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

fn run_carrier(index: usize) {
    let d = common::carriers().remove(index);
    let mut runner = common::runner(1000);
    let v = common::value(&d);
    runner
        .run(&(v.clone(), v.clone(), v), |(a, b, c)| {
            common::check_laws(&d, &a, &b, &c).map_err(TestCaseError::fail)
        })
        .unwrap_or_else(|e| panic!("{}: {e}", d.kind().name()));
    let args = proptest::collection::vec(common::value(&d), 3);
    let mut runner = common::runner(1000);
    runner
        .run(&(common::aggregator(&d), args.clone(), args), |(agg, x, u)| {
            common::check_aggregator_monotone(&d, &agg, &x, &u).map_err(TestCaseError::fail)
        })
        .unwrap_or_else(|e| panic!("{}: {e}", d.kind().name()));
}

#[test]
fn nat_inf_laws() {
    run_carrier(0);
}

#[test]
fn real_inf_laws() {
    run_carrier(1);
}

#[test]
fn tropical_laws() {
    run_carrier(2);
}

#[test]
fn arctic_laws() {
    run_carrier(3);
}

#[test]
fn boolean_laws() {
    run_carrier(4);
}

#[test]
fn confidence_laws() {
    run_carrier(5);
}

#[test]
fn bottleneck_laws() {
    run_carrier(6);
}

#[test]
fn language_laws() {
    run_carrier(7);
}

#[test]
fn product_laws() {
    run_carrier(8);
}

proptest! {
    #[test]
    fn literal_syntax_round_trips((i, v) in (0usize..9).prop_flat_map(|i| (Just(i), common::value(&common::carriers()[i])))) {
        let d = &common::carriers()[i];
        prop_assert_eq!(d.parse_value(&d.format(&v)).unwrap(), v);
    }
}
