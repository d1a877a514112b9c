//! One line per acceptance criterion: `criterion N ... PASS|FAIL`, then a
//! summary; the process exits non-zero when any criterion fails.

mod common;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use proptest::test_runner::TestCaseError;
use wars::aggregator::parse;
use wars::boundedness::{verify_embedding, Embedding, InstanceSource, Verdict};
use wars::evaluator::{enumerate_trees, evaluate_to_fixpoint, lower_bound_series, tree_weight, weight_lower_bound};
use wars::par::Parallelism;
use wars::random::{random_system, RandomShape, RANDOM_KINDS};
use wars::semiring::{Arctic, ExtReal};
use wars::system::{
    addition_trs_ground, boolean_provenance, na_system, os_runtime, os_size, prefix_words, ski_rental, walk_expected,
    walk_termprob, z_walk_safety, BoolCosts, Formula, SystemFile, Term,
};
use wars::unboundedness::{certify_loop, find_loops, induced_polynomial, LoopStatus};
use wars::{Budgets, ObjectId, SemiringValue, WeightStatus};

fn report(n: u32, what: &str, limit: Duration, start: Instant, outcome: Result<String, String>) -> bool {
    let elapsed = start.elapsed();
    let (ok, detail) = match outcome {
        Ok(d) if elapsed <= limit => (true, d),
        Ok(d) => (false, format!("{d}; took {elapsed:.2?}, limit {limit:?}")),
        Err(d) => (false, d),
    };
    println!(
        "criterion {n:>2} {what}: {} ({detail}; {elapsed:.2?})",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn criterion_01_provenance_cost() -> bool {
    let t = Instant::now();
    let run = || -> Result<String, String> {
        let f = Formula::parse("Ra & (Pab | Pbb)").unwrap();
        let sys = boolean_provenance(&f, &BoolCosts::default()).map_err(|e| e.to_string())?;
        let b = weight_lower_bound(&*sys, &ObjectId::Formula(f), 2, &Budgets::default()).map_err(|e| e.to_string())?;
        ensure!(
            b.value == SemiringValue::arctic(12),
            "got {}",
            sys.semiring().format(&b.value)
        );
        Ok("cost 12 at depth 2".into())
    };
    report(1, "provenance cost", Duration::from_secs(1), t, run())
}

fn criterion_02_walk_probability() -> bool {
    let t = Instant::now();
    let run = || -> Result<String, String> {
        let w = walk_termprob();
        let d = w.semiring();
        let b = weight_lower_bound(&*w, &ObjectId::Nat(2), 2, &Budgets::default()).map_err(|e| e.to_string())?;
        ensure!(b.value == SemiringValue::real(4, 9), "W_2(2) = {}", d.format(&b.value));
        let threshold = SemiringValue::Real(ExtReal::Fin(BigRational::new(999.into(), 1000.into())));
        let mut horizon = 64;
        loop {
            let series = lower_bound_series(
                &*w,
                &ObjectId::Nat(2),
                horizon,
                &Budgets::default(),
                Parallelism::default(),
            )
            .map_err(|e| e.to_string())?;
            for k in 1..series.len() {
                ensure!(d.leq(&series[k - 1], &series[k]).unwrap(), "W_{} > W_{}", k - 1, k);
            }
            if let Some(n) = series.iter().position(|v| !d.leq(v, &threshold).unwrap()) {
                return Ok(format!(
                    "W_2(2) = 4/9, nondecreasing up to n = {horizon}, first exceeds 0.999 at n = {n}"
                ));
            }
            ensure!(horizon < 500, "W_n(2) stays at or below 0.999 for n <= 500");
            horizon = (horizon * 2).min(500);
        }
    };
    report(2, "random-walk probability", Duration::from_secs(5), t, run())
}

fn criterion_03_expected_steps_certificate() -> bool {
    let t = Instant::now();
    let run = || -> Result<String, String> {
        let w = walk_expected();
        let d = w.semiring();
        let objects: Vec<ObjectId> = (1..=1001).map(ObjectId::Nat).collect();
        let r =
            verify_embedding(&*w, &Embedding::Walk3n, &InstanceSource::Objects(objects)).map_err(|e| e.to_string())?;
        ensure!(
            r.verdict == Verdict::BoundedSampled { instances: 1001 },
            "verdict {}",
            r.verdict
        );
        ensure!(r.checks.len() == 1001, "{} rule checks", r.checks.len());
        for c in &r.checks {
            let ObjectId::Nat(m) = c.object else {
                return Err(format!("unexpected object {}", c.object));
            };
            let expect = SemiringValue::real(3 + 3 * (m as i64 - 1), 1);
            ensure!(
                c.embedded == expect && c.bound == expect,
                "at n = {}: {} vs {}",
                m - 1,
                d.format(&c.embedded),
                d.format(&c.bound)
            );
        }
        for k in 0..=20u64 {
            let b = weight_lower_bound(&*w, &ObjectId::Nat(k), 12, &Budgets::default()).map_err(|e| e.to_string())?;
            ensure!(
                d.leq(&b.value, &SemiringValue::real(3 * k as i64, 1)).unwrap(),
                "W_12({k}) above 3k"
            );
        }
        Ok("1001 instances with both sides 3+3n; W_12(k) <= 3k for k <= 20".into())
    };
    report(3, "expected-steps certificate", Duration::from_secs(5), t, run())
}

/// Length of the longest rewrite sequence, trying every redex.
fn longest_derivation(t: &Term, memo: &mut HashMap<Term, u64>) -> u64 {
    fn steps(t: &Term) -> Vec<Term> {
        let mut out = Vec::new();
        match t {
            Term::Zero => {}
            Term::S(x) => out.extend(steps(x).into_iter().map(|y| Term::S(y.into()))),
            Term::Plus(a, b) => {
                match &**a {
                    Term::Zero => out.push((**b).clone()),
                    Term::S(x) => out.push(Term::S(Term::Plus(x.clone(), b.clone()).into())),
                    Term::Plus(..) => {}
                }
                out.extend(steps(a).into_iter().map(|y| Term::Plus(y.into(), b.clone())));
                out.extend(steps(b).into_iter().map(|y| Term::Plus(a.clone(), y.into())));
            }
        }
        out
    }
    if let Some(&n) = memo.get(t) {
        return n;
    }
    let n = steps(t)
        .iter()
        .map(|s| 1 + longest_derivation(s, memo))
        .max()
        .unwrap_or(0);
    memo.insert(t.clone(), n);
    n
}

fn criterion_04_trs_termination_bound() -> bool {
    let t = Instant::now();
    let run = || -> Result<String, String> {
        let trs = addition_trs_ground(8);
        let r = verify_embedding(&*trs, &Embedding::TrsAdd, &InstanceSource::Exhaustive).map_err(|e| e.to_string())?;
        ensure!(r.verdict == Verdict::BoundedCertified, "verdict {}", r.verdict);
        let big = addition_trs_ground(15);
        let mut memo = HashMap::new();
        for m in 0..=6 {
            for k in 0..=6 {
                let term = Term::plus(Term::numeral(m), Term::numeral(k));
                let oracle = longest_derivation(&term, &mut memo);
                ensure!(oracle == m + 1, "oracle gives {oracle} for m = {m}");
                let b = evaluate_to_fixpoint(&*big, &ObjectId::Term(term), 64, &Budgets::default())
                    .map_err(|e| e.to_string())?;
                ensure!(
                    b.status == WeightStatus::Stabilized,
                    "m = {m}, k = {k} did not stabilize"
                );
                ensure!(b.value == SemiringValue::nat(m + 1), "m = {m}, k = {k}: {:?}", b.value);
            }
        }
        Ok(format!(
            "certified on {} rule instances; 49 stabilized weights equal m+1",
            r.checks.len()
        ))
    };
    report(4, "TRS termination bound", Duration::from_secs(30), t, run())
}

fn criterion_05_tuple_safety_certificate() -> bool {
    let t = Instant::now();
    let run = || -> Result<String, String> {
        let z = z_walk_safety();
        let objects: Vec<ObjectId> = (-100..=100).map(ObjectId::Int).collect();
        let r = verify_embedding(&*z, &Embedding::ZwalkCase, &InstanceSource::Objects(objects))
            .map_err(|e| e.to_string())?;
        ensure!(
            r.verdict == Verdict::BoundedSampled { instances: 201 },
            "verdict {}",
            r.verdict
        );
        let top = z.semiring().top().clone();
        ensure!(
            top == SemiringValue::Tuple(vec![SemiringValue::nat_inf(), SemiringValue::Bool(true)]),
            "unexpected top"
        );
        for k in -20..=20 {
            let s = lower_bound_series(&*z, &ObjectId::Int(k), 50, &Budgets::default(), Parallelism::default())
                .map_err(|e| e.to_string())?;
            ensure!(!s.contains(&top), "W_n({k}) reaches top");
        }
        Ok("201 sampled instances; no W_n(k) equals (inf,true)".into())
    };
    report(5, "tuple safety certificate", Duration::from_secs(5), t, run())
}

fn criterion_06_increasing_loop() -> bool {
    let t = Instant::now();
    let run = || -> Result<String, String> {
        let start = ObjectId::parse_os("idle()").unwrap();
        let expected = ["idle_wait", "wait_P1", "idle_run", "run_P1"];
        let labels = ["idle()", "wait()", "idle(P1)", "run(P1)"];
        let rt = os_runtime();
        let loops =
            find_loops(&*rt, std::slice::from_ref(&start), 4, &Budgets::default(), 16).map_err(|e| e.to_string())?;
        let l = loops
            .iter()
            .find(|l| l.trace == expected)
            .ok_or("4-step loop not found")?;
        ensure!(l.depth() == 4, "loop depth {}", l.depth());
        for (i, label) in labels.iter().enumerate() {
            let node = l.tree.at(&l.leaf[..i]).unwrap();
            ensure!(node.label.to_string() == *label, "node {i} is {}", node.label);
        }
        ensure!(l.tree.at(&l.leaf).unwrap().label == start, "leaf is not idle()");
        let nat = rt.semiring();
        let p = induced_polynomial(&*rt, &l.tree, &l.leaf).map_err(|e| e.to_string())?;
        for x in [0u64, 1, 2, 5, 100] {
            let v = p
                .eval_at(nat, &[], Some(&SemiringValue::nat(x)), 1)
                .map_err(|e| e.to_string())?
                .0;
            ensure!(v == SemiringValue::nat(x + 4), "P({x}) = {}", nat.format(&v));
        }
        let inc = certify_loop(nat, &p).ok_or("no increment")?;
        ensure!(
            inc.t == SemiringValue::nat(4) && inc.status == LoopStatus::Certified,
            "increment {}",
            nat.format(&inc.t)
        );

        let sz = os_size();
        let arctic = sz.semiring();
        let loops = find_loops(&*sz, &[start], 4, &Budgets::default(), 16).map_err(|e| e.to_string())?;
        let l = loops
            .iter()
            .find(|l| l.trace == expected)
            .ok_or("size loop not found")?;
        let p = induced_polynomial(&*sz, &l.tree, &l.leaf).map_err(|e| e.to_string())?;
        for x in [0u64, 1, 2, 5, 100] {
            let v = p
                .eval_at(arctic, &[], Some(&SemiringValue::arctic(x)), 1)
                .map_err(|e| e.to_string())?
                .0;
            ensure!(
                v == SemiringValue::arctic(x.max(1)),
                "size P({x}) = {}",
                arctic.format(&v)
            );
        }
        let v = p
            .eval_at(arctic, &[], Some(&SemiringValue::Arctic(Arctic::NegInf)), 1)
            .map_err(|e| e.to_string())?
            .0;
        ensure!(v == SemiringValue::arctic(1), "size P(-inf) = {}", arctic.format(&v));
        ensure!(certify_loop(arctic, &p).is_none(), "size loop certified");
        Ok("X+4 with t = 4 on os_runtime; max{X,1} without increment on os_size".into())
    };
    report(6, "increasing loop", Duration::from_secs(5), t, run())
}

fn criterion_07_ski_rental() -> bool {
    let t = Instant::now();
    let run = || -> Result<String, String> {
        for y in 0..=8u64 {
            let sys = ski_rental(y);
            for n0 in 0..=8u64 {
                let a = sys.parse_object(&format!("n0={n0}")).map_err(|e| e.to_string())?;
                let b = evaluate_to_fixpoint(&*sys, &a, 256, &Budgets::default()).map_err(|e| e.to_string())?;
                ensure!(
                    b.status == WeightStatus::Stabilized,
                    "n0 = {n0}, y = {y} did not stabilize"
                );
                ensure!(
                    b.value == SemiringValue::nat(n0.min(y)),
                    "n0 = {n0}, y = {y}: {}",
                    sys.semiring().format(&b.value)
                );
            }
        }
        Ok("81 stabilized weights equal min{n0, y}".into())
    };
    report(7, "ski rental", Duration::from_secs(10), t, run())
}

/// Weights of all trees of depth at most `depth` rooted at each label,
/// built directly from the file's rules.
fn brute_force_join(file: &SystemFile, root: &str, depth: usize) -> Result<SemiringValue, String> {
    let d = file.semiring.build().map_err(|e| e.to_string())?;
    let nf: BTreeMap<&str, SemiringValue> = file
        .nf
        .iter()
        .map(|(k, v)| (k.as_str(), d.parse_value(v).unwrap()))
        .collect();
    let mut level: HashMap<String, HashSet<SemiringValue>> = HashMap::new();
    let mut labels: HashSet<String> = file.nf.keys().cloned().collect();
    for r in &file.rules {
        labels.insert(r.lhs.clone());
        labels.extend(r.rhs.iter().cloned());
    }
    let leaf = |l: &str| nf.get(l).cloned().unwrap_or_else(|| d.zero().clone());
    for l in &labels {
        level.insert(l.clone(), HashSet::from([leaf(l)]));
    }
    for _ in 0..depth {
        let mut next = HashMap::new();
        for l in &labels {
            let mut set = HashSet::from([leaf(l)]);
            for r in file.rules.iter().filter(|r| r.lhs == *l) {
                let agg = parse(&r.agg, &d).map_err(|e| e.to_string())?;
                let mut combos: Vec<Vec<SemiringValue>> = vec![Vec::new()];
                for b in &r.rhs {
                    combos = combos
                        .into_iter()
                        .flat_map(|c| {
                            level[b].iter().map(move |v| {
                                let mut c = c.clone();
                                c.push(v.clone());
                                c
                            })
                        })
                        .collect();
                }
                for args in combos {
                    set.insert(agg.eval(&d, &args, args.len()).map_err(|e| e.to_string())?.0);
                }
            }
            next.insert(l.clone(), set);
        }
        level = next;
    }
    d.join(level[root].iter()).map_err(|e| e.to_string())
}

fn criterion_08_oracle_equivalence() -> bool {
    let t = Instant::now();
    let run = || -> Result<String, String> {
        let budgets = Budgets::default();
        let mut checked = 0;
        for seed in 0..200u64 {
            let kind = RANDOM_KINDS[seed as usize % RANDOM_KINDS.len()];
            let sys = random_system(kind, RandomShape::default(), seed).map_err(|e| e.to_string())?;
            let file = sys.to_file();
            for a in sys.objects() {
                let series =
                    lower_bound_series(&sys, a, 4, &budgets, Parallelism::default()).map_err(|e| e.to_string())?;
                for (n, w) in series.iter().enumerate() {
                    let oracle = brute_force_join(&file, &a.to_string(), n)?;
                    ensure!(
                        *w == oracle,
                        "seed {seed}, object {a}, depth {n}: {:?} vs {:?}",
                        w,
                        oracle
                    );
                    checked += 1;
                }
            }
        }
        Ok(format!("200 systems, {checked} (object, depth) pairs agree"))
    };
    report(8, "oracle equivalence", Duration::from_secs(60), t, run())
}

fn criterion_09_infinite_nondeterminism() -> bool {
    let t = Instant::now();
    let run = || -> Result<String, String> {
        let na = na_system();
        let a = na.parse_object("a").map_err(|e| e.to_string())?;
        for n in 1..=50u64 {
            let budgets = Budgets::new(n as usize + 1, 16, 100_000);
            let b = weight_lower_bound(&*na, &a, n as usize + 1, &budgets).map_err(|e| e.to_string())?;
            let SemiringValue::Nat(wars::semiring::ExtNat::Fin(v)) = b.value else {
                return Err(format!("W_{}(a) is not finite", n + 1));
            };
            ensure!(v >= n, "W_{}(a) = {v} < {n}", n + 1);
        }
        Ok("W_{n+1}(a) >= n for n = 1..50".into())
    };
    report(9, "infinite non-determinism", Duration::from_secs(5), t, run())
}

fn criterion_10_law_suite() -> bool {
    let t = Instant::now();
    let run = || -> Result<String, String> {
        let carriers = common::carriers();
        for d in &carriers {
            let v = common::value(d);
            let mut runner = common::runner(1000);
            runner
                .run(&(v.clone(), v.clone(), v), |(a, b, c)| {
                    common::check_laws(d, &a, &b, &c).map_err(TestCaseError::fail)
                })
                .map_err(|e| format!("{}: {e}", d.kind().name()))?;
            let args = proptest::collection::vec(common::value(d), 3);
            let mut runner = common::runner(1000);
            runner
                .run(&(common::aggregator(d), args.clone(), args), |(agg, x, u)| {
                    common::check_aggregator_monotone(d, &agg, &x, &u).map_err(TestCaseError::fail)
                })
                .map_err(|e| format!("{}: {e}", d.kind().name()))?;
        }
        Ok(format!(
            "{} carriers, 1000 law and 1000 monotonicity samples each",
            carriers.len()
        ))
    };
    report(10, "law suite", Duration::from_secs(30), t, run())
}

fn criterion_11_uncountability_demo() -> bool {
    let t = Instant::now();
    let run = || -> Result<String, String> {
        let p = prefix_words();
        let root = p.parse_object("0").map_err(|e| e.to_string())?;
        let mut counts = Vec::new();
        for depth in 0..=6 {
            let trees = enumerate_trees(&*p, &root, depth, &Budgets::default(), 1 << 20).map_err(|e| e.to_string())?;
            let weights: HashSet<SemiringValue> = trees.iter().map(|t| tree_weight(&*p, t).unwrap()).collect();
            counts.push(weights.len());
        }
        let bad: Vec<String> = counts
            .iter()
            .enumerate()
            .filter(|&(d, &c)| c != 1 << d)
            .map(|(d, c)| format!("depth {d}: {c} != {}", 1 << d))
            .collect();
        ensure!(bad.is_empty(), "distinct weights {:?}; {}", counts, bad.join(", "));
        Ok(format!("distinct weights {counts:?}"))
    };
    report(11, "uncountability demo", Duration::from_secs(10), t, run())
}

fn main() {
    let criteria: [fn() -> bool; 11] = [
        criterion_01_provenance_cost,
        criterion_02_walk_probability,
        criterion_03_expected_steps_certificate,
        criterion_04_trs_termination_bound,
        criterion_05_tuple_safety_certificate,
        criterion_06_increasing_loop,
        criterion_07_ski_rental,
        criterion_08_oracle_equivalence,
        criterion_09_infinite_nondeterminism,
        criterion_10_law_suite,
        criterion_11_uncountability_demo,
    ];
    let failed = criteria
        .iter()
        .filter(|&&c| !std::panic::catch_unwind(c).unwrap_or(false))
        .count();
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
