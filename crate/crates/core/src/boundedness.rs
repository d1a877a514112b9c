//! Boundedness provers: the normal-form check, the selective and extremal
//! sufficient conditions, embedding verification and a bounded search for
//! embeddings of finite systems.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::aggregator::{is_affine_in_vars, probe_value, AggregatorError, AggregatorExpr};
use crate::par::{try_map_range, Parallelism};
use crate::semiring::{SemiringDescriptor, SemiringError, SemiringKind, SemiringValue};
use crate::system::{Claim, Limits, ObjectId, RuleInstance, SystemError, Term, WeightedSystem};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BoundError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("embedding `{embedding}` is undefined on `{object}`")]
    Undefined { embedding: String, object: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("embedding file: {0}")]
    File(String),
    #[error("unknown embedding `{0}` (built-ins: walk3n, trs_add, zwalk_case)")]
    UnknownEmbedding(String),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Aggregator(#[from] AggregatorError),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
}

/// A candidate upper-bound map `𝔢` from objects to non-top values.
#[derive(Debug, Clone, PartialEq)]
pub enum Embedding {
    Table(BTreeMap<ObjectId, SemiringValue>),
    /// `n ↦ 3n` on walk positions.
    Walk3n,
    /// `0 ↦ 0`, `s(t) ↦ 𝔢(t) + 1`, `plus(t1,t2) ↦ 2·𝔢(t1) + 𝔢(t2) + 1`.
    TrsAdd,
    /// Even `n ↦ (|n|/2, true)`, odd `n ↦ (∞, false)`.
    ZwalkCase,
}

fn trs_add(t: &Term) -> u64 {
    match t {
        Term::Zero => 0,
        Term::S(t) => trs_add(t) + 1,
        Term::Plus(a, b) => 2 * trs_add(a) + trs_add(b) + 1,
    }
}

impl Embedding {
    pub fn builtin(name: &str) -> Result<Self, BoundError> {
        match name {
            "walk3n" => Ok(Embedding::Walk3n),
            "trs_add" => Ok(Embedding::TrsAdd),
            "zwalk_case" => Ok(Embedding::ZwalkCase),
            other => Err(BoundError::UnknownEmbedding(other.to_string())),
        }
    }

    /// Reads a JSON table `{"a": "4", "b": "3"}` in the literal syntax of
    /// the system's semiring.
    pub fn from_json(sys: &dyn WeightedSystem, text: &str) -> Result<Self, BoundError> {
        let raw: BTreeMap<String, String> = serde_json::from_str(text).map_err(|e| BoundError::File(e.to_string()))?;
        let desc = sys.semiring();
        let mut table = BTreeMap::new();
        for (k, v) in raw {
            table.insert(sys.parse_object(&k)?, desc.parse_value(&v)?);
        }
        Ok(Embedding::Table(table))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Embedding::Table(_) => "table",
            Embedding::Walk3n => "walk3n",
            Embedding::TrsAdd => "trs_add",
            Embedding::ZwalkCase => "zwalk_case",
        }
    }

    pub fn apply(&self, desc: &SemiringDescriptor, a: &ObjectId) -> Result<SemiringValue, BoundError> {
        let numeral = |k: u64| probe_value(desc, k);
        let value = match (self, a) {
            (Embedding::Table(t), _) => t.get(a).cloned(),
            (Embedding::Walk3n, ObjectId::Nat(n)) => numeral(3 * n),
            (Embedding::TrsAdd, ObjectId::Term(t)) => numeral(trs_add(t)),
            (Embedding::ZwalkCase, ObjectId::Int(n)) if desc.components().len() == 2 => Some(if n % 2 == 0 {
                SemiringValue::Tuple(vec![
                    SemiringValue::nat(n.unsigned_abs() / 2),
                    SemiringValue::Bool(true),
                ])
            } else {
                SemiringValue::Tuple(vec![SemiringValue::nat_inf(), SemiringValue::Bool(false)])
            }),
            _ => None,
        };
        let value = value.ok_or_else(|| BoundError::Undefined {
            embedding: self.name().to_string(),
            object: a.to_string(),
        })?;
        desc.validate(&value)?;
        Ok(value)
    }
}

/// Which objects a check visits.
#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    /// The complete universe of a finite system.
    Exhaustive,
    /// The first `n` objects of the canonical enumeration.
    Prefix(usize),
    /// `count` objects drawn with a seeded generator.
    Random {
        seed: u64,
        count: usize,
    },
    Objects(Vec<ObjectId>),
}

impl InstanceSource {
    /// Exhaustive when the system is finite, a prefix of `samples` objects
    /// otherwise.
    pub fn default_for(sys: &dyn WeightedSystem, samples: usize) -> Self {
        if sys.all_objects().is_some() {
            InstanceSource::Exhaustive
        } else {
            InstanceSource::Prefix(samples)
        }
    }

    fn objects(&self, sys: &dyn WeightedSystem) -> Result<Vec<ObjectId>, BoundError> {
        Ok(match self {
            InstanceSource::Exhaustive => sys
                .all_objects()
                .ok_or_else(|| BoundError::Precondition(format!("{} is not finite", sys.name())))?,
            InstanceSource::Prefix(n) => sys.enumerate_objects(*n),
            InstanceSource::Random { seed, count } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..*count).filter_map(|_| sys.random_object(&mut rng)).collect()
            }
            InstanceSource::Objects(v) => v.clone(),
        })
    }

    fn is_exhaustive(&self) -> bool {
        matches!(self, InstanceSource::Exhaustive)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    BoundedCertified,
    BoundedSampled { instances: usize },
    Unbounded { witness: String },
    Unknown,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::BoundedCertified => "bounded_certified",
            Verdict::BoundedSampled { .. } => "bounded_sampled",
            Verdict::Unbounded { .. } => "unbounded",
            Verdict::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::BoundedSampled { instances } => write!(f, "bounded_sampled (verified on {instances} instances)"),
            Verdict::Unbounded { witness } => write!(f, "unbounded (witness {witness})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    NfTop,
    Selective,
    Extremal,
    Embedding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionStatus {
    Passed,
    Failed,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub name: String,
    pub status: ConditionStatus,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Condition {
    fn new(name: &str, status: ConditionStatus, detail: impl Into<String>) -> Self {
        Condition {
            name: name.to_string(),
            status,
            detail: detail.into(),
        }
    }

    fn from_claim(name: &str, claim: Claim) -> Self {
        let status = match claim {
            Claim::Asserted => ConditionStatus::Passed,
            Claim::Refuted => ConditionStatus::Failed,
            Claim::Unknown => ConditionStatus::Unknown,
        };
        Condition::new(name, status, format!("metadata: {claim}"))
    }
}

/// One checked inequality `𝔢(a) ≽ bound`: the normal-form weight, or the
/// aggregator applied to the embedded children.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceCheck {
    pub object: ObjectId,
    /// Rule tag; `None` for the normal-form inequality.
    pub rule: Option<String>,
    pub embedded: SemiringValue,
    pub bound: SemiringValue,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UpperBound {
    pub object: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundednessReport {
    pub system: String,
    pub method: Method,
    pub verdict: Verdict,
    pub conditions: Vec<Condition>,
    /// `a ↦ 𝔢(a)` on the checked objects, each an upper bound on `⟦a⟧`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_bounds: Option<Vec<UpperBound>>,
    #[serde(skip)]
    pub checks: Vec<InstanceCheck>,
}

impl BoundednessReport {
    fn new(sys: &dyn WeightedSystem, method: Method, verdict: Verdict, conditions: Vec<Condition>) -> Self {
        BoundednessReport {
            system: sys.name(),
            method,
            verdict,
            conditions,
            upper_bounds: None,
            checks: Vec::new(),
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("{}: {} via {:?}\n", self.system, self.verdict, self.method);
        for c in &self.conditions {
            out.push_str(&format!("  [{:?}] {}", c.status, c.name));
            if !c.detail.is_empty() {
                out.push_str(&format!(": {}", c.detail));
            }
            out.push('\n');
        }
        if let Some(ub) = &self.upper_bounds {
            out.push_str(&format!("  upper bounds on {} objects\n", ub.len()));
        }
        out
    }
}

fn verdict_for(source: &InstanceSource, conditions: &[Condition], checked: usize) -> Verdict {
    if conditions.iter().any(|c| c.status != ConditionStatus::Passed) {
        Verdict::Unknown
    } else if source.is_exhaustive() {
        Verdict::BoundedCertified
    } else {
        Verdict::BoundedSampled { instances: checked }
    }
}

/// Every rule of `a` with full right-hand sides, or `None` when the rule
/// set or some right-hand side is infinite.
fn complete_rules(sys: &dyn WeightedSystem, a: &ObjectId) -> Result<Option<Vec<RuleInstance>>, BoundError> {
    let mut budget = 64usize;
    loop {
        let s = sys.successors(a, Limits::new(budget, 64))?;
        if s.complete {
            return Ok(s.rules.iter().all(|r| r.rhs_complete).then_some(s.rules));
        }
        if budget >= 1 << 16 {
            return Ok(None);
        }
        budget *= 4;
    }
}

struct Scan {
    nfs: Vec<(ObjectId, SemiringValue)>,
    rules: Vec<RuleInstance>,
    open: Vec<ObjectId>,
}

fn scan(sys: &dyn WeightedSystem, objects: &[ObjectId]) -> Result<Scan, BoundError> {
    let per = try_map_range(objects.len(), Parallelism::default(), |i| -> Result<_, BoundError> {
        let a = &objects[i];
        if sys.is_normal_form(a)? {
            Ok((Some(sys.nf_weight(a)?), complete_rules(sys, a)?))
        } else {
            Ok((None, complete_rules(sys, a)?))
        }
    })?;
    let mut out = Scan {
        nfs: Vec::new(),
        rules: Vec::new(),
        open: Vec::new(),
    };
    for (a, (nf, rules)) in objects.iter().zip(per) {
        if let Some(w) = nf {
            out.nfs.push((a.clone(), w));
        } else {
            match rules {
                Some(r) => out.rules.extend(r),
                None => out.open.push(a.clone()),
            }
        }
    }
    Ok(out)
}

/// An unbounded verdict when some visited normal form weighs `⊤`.
pub fn check_nf_top(
    sys: &dyn WeightedSystem,
    source: &InstanceSource,
) -> Result<Option<BoundednessReport>, BoundError> {
    let desc = sys.semiring();
    for a in source.objects(sys)? {
        if sys.is_normal_form(&a)? && desc.is_top(&sys.nf_weight(&a)?) {
            let c = Condition::new(
                "normal-form weights below top",
                ConditionStatus::Failed,
                format!("f_NF({a}) = top"),
            );
            let verdict = Verdict::Unbounded { witness: a.to_string() };
            return Ok(Some(BoundednessReport::new(sys, Method::NfTop, verdict, vec![c])));
        }
    }
    Ok(None)
}

/// Built only from variables and operations flagged selective.
fn syntactically_selective(expr: &AggregatorExpr, desc: &SemiringDescriptor) -> bool {
    let flags = desc.flags();
    match expr {
        AggregatorExpr::Var(_) => true,
        AggregatorExpr::Sum(items) => flags.plus_is_selective && items.iter().all(|e| syntactically_selective(e, desc)),
        AggregatorExpr::Prod(items) => {
            flags.times_is_selective && items.iter().all(|e| syntactically_selective(e, desc))
        }
        AggregatorExpr::Const(_) | AggregatorExpr::X | AggregatorExpr::Countable(_) => false,
    }
}

/// Bounded when every normal form weighs at most `c ≠ ⊤` and every
/// aggregator always returns one of its arguments.
pub fn check_sufficient_selective(
    sys: &dyn WeightedSystem,
    c: &SemiringValue,
    source: &InstanceSource,
) -> Result<BoundednessReport, BoundError> {
    let desc = sys.semiring();
    desc.validate(c)?;
    if desc.is_top(c) {
        return Err(BoundError::Precondition("the universal bound must not be top".into()));
    }
    if let Some(r) = check_nf_top(sys, source)? {
        return Ok(r);
    }
    let objects = source.objects(sys)?;
    let s = scan(sys, &objects)?;
    let mut conditions = Vec::new();
    let over: Vec<String> = s
        .nfs
        .iter()
        .filter_map(|(a, w)| match desc.leq(w, c) {
            Ok(true) => None,
            _ => Some(a.to_string()),
        })
        .collect();
    conditions.push(if over.is_empty() {
        Condition::new(
            "normal-form weights below the bound",
            ConditionStatus::Passed,
            format!("{} normal forms", s.nfs.len()),
        )
    } else {
        Condition::new(
            "normal-form weights below the bound",
            ConditionStatus::Failed,
            format!("exceeded at {}", over.join(", ")),
        )
    });
    let bad = s.rules.iter().find(|r| !syntactically_selective(&r.aggregator, desc));
    conditions.push(match bad {
        None => Condition::new(
            "aggregators selective",
            ConditionStatus::Passed,
            format!("{} rule instances", s.rules.len()),
        ),
        Some(r) => Condition::new(
            "aggregators selective",
            ConditionStatus::Unknown,
            format!(
                "rule {} at {}: `{}` is not syntactically selective",
                r.tag,
                r.lhs,
                r.aggregator.render(desc)
            ),
        ),
    });
    conditions.push(open_condition(&s.open));
    let verdict = verdict_for(source, &conditions, objects.len());
    Ok(BoundednessReport::new(sys, Method::Selective, verdict, conditions))
}

fn open_condition(open: &[ObjectId]) -> Condition {
    if open.is_empty() {
        Condition::new("rule sets enumerated", ConditionStatus::Passed, "")
    } else {
        let shown: Vec<String> = open.iter().take(5).map(ObjectId::to_string).collect();
        Condition::new(
            "rule sets enumerated",
            ConditionStatus::Unknown,
            format!("infinite at {}", shown.join(", ")),
        )
    }
}

/// Bounded when the relation is terminating, finitely non-deterministic
/// and finitely branching, the semiring has the extremal property, no
/// normal form weighs `⊤` and no aggregator contains `⊤` or an infinite sum.
pub fn check_sufficient_extremal(
    sys: &dyn WeightedSystem,
    source: &InstanceSource,
) -> Result<BoundednessReport, BoundError> {
    let desc = sys.semiring();
    if let Some(r) = check_nf_top(sys, source)? {
        return Ok(r);
    }
    let m = sys.metadata();
    let mut conditions = vec![
        Condition::from_claim("terminating", m.terminating),
        Condition::from_claim("finitely non-deterministic", m.finitely_nondeterministic),
        Condition::from_claim("finitely branching", m.finitely_branching),
        Condition::new(
            "extremal semiring",
            if desc.flags().has_extremal_property {
                ConditionStatus::Passed
            } else {
                ConditionStatus::Failed
            },
            desc.kind().name(),
        ),
    ];
    let objects = source.objects(sys)?;
    let s = scan(sys, &objects)?;
    let bad = s
        .rules
        .iter()
        .find(|r| !r.aggregator.is_finite() || r.aggregator.constants().iter().any(|k| desc.is_top(k)));
    conditions.push(match bad {
        None => Condition::new(
            "aggregators finite without top constants",
            ConditionStatus::Passed,
            format!("{} rule instances", s.rules.len()),
        ),
        Some(r) => Condition::new(
            "aggregators finite without top constants",
            ConditionStatus::Failed,
            format!("rule {} at {}: `{}`", r.tag, r.lhs, r.aggregator.render(desc)),
        ),
    });
    conditions.push(open_condition(&s.open));
    let verdict = verdict_for(source, &conditions, objects.len());
    Ok(BoundednessReport::new(sys, Method::Extremal, verdict, conditions))
}

/// Checks `𝔢(a) ≽ f_NF(a)` on normal forms, `𝔢(a) ≽ Aggr[𝔢(b) | b ∈ B]` on
/// every rule and `𝔢 ≠ ⊤` on every touched object.
pub fn verify_embedding(
    sys: &dyn WeightedSystem,
    e: &Embedding,
    source: &InstanceSource,
) -> Result<BoundednessReport, BoundError> {
    let desc = sys.semiring();
    let objects = source.objects(sys)?;
    let s = scan(sys, &objects)?;
    let mut cache: HashMap<ObjectId, SemiringValue> = HashMap::new();
    let mut top_at = None;
    let mut embed = |a: &ObjectId| -> Result<SemiringValue, BoundError> {
        if let Some(v) = cache.get(a) {
            return Ok(v.clone());
        }
        let v = e.apply(desc, a)?;
        if desc.is_top(&v) && top_at.is_none() {
            top_at = Some(a.clone());
        }
        cache.insert(a.clone(), v.clone());
        Ok(v)
    };
    let mut checks = Vec::with_capacity(s.nfs.len() + s.rules.len());
    for (a, w) in &s.nfs {
        let ev = embed(a)?;
        checks.push(InstanceCheck {
            object: a.clone(),
            rule: None,
            holds: desc.leq(w, &ev)?,
            embedded: ev,
            bound: w.clone(),
        });
    }
    for r in &s.rules {
        let ev = embed(&r.lhs)?;
        let args = r.rhs.iter().map(&mut embed).collect::<Result<Vec<_>, _>>()?;
        let (bound, _) = r.aggregator.eval(desc, &args, args.len().max(1))?;
        checks.push(InstanceCheck {
            object: r.lhs.clone(),
            rule: Some(r.tag.clone()),
            holds: desc.leq(&bound, &ev)?,
            embedded: ev,
            bound,
        });
    }
    for a in &objects {
        embed(a)?;
    }
    let mut conditions = Vec::new();
    conditions.push(match &top_at {
        None => Condition::new(
            "embedding below top",
            ConditionStatus::Passed,
            format!("{} objects", cache.len()),
        ),
        Some(a) => Condition::new("embedding below top", ConditionStatus::Failed, format!("e({a}) = top")),
    });
    let failed = |nf: bool| checks.iter().find(|c| c.rule.is_none() == nf && !c.holds);
    for (name, nf) in [("dominates normal-form weights", true), ("dominates every rule", false)] {
        let n = checks.iter().filter(|c| c.rule.is_none() == nf).count();
        conditions.push(match failed(nf) {
            None => Condition::new(name, ConditionStatus::Passed, format!("{n} instances")),
            Some(c) => Condition::new(
                name,
                ConditionStatus::Failed,
                format!(
                    "at {}{}: e = {} but bound = {}",
                    c.object,
                    c.rule.as_ref().map(|t| format!(" rule {t}")).unwrap_or_default(),
                    desc.format(&c.embedded),
                    desc.format(&c.bound)
                ),
            ),
        });
    }
    conditions.push(open_condition(&s.open));
    let verdict = verdict_for(source, &conditions, objects.len());
    let mut report = BoundednessReport::new(sys, Method::Embedding, verdict, conditions);
    if report.verdict != Verdict::Unknown {
        report.upper_bounds = Some(
            objects
                .iter()
                .map(|a| UpperBound {
                    object: a.to_string(),
                    value: desc.format(&cache[a]),
                })
                .collect(),
        );
    }
    report.checks = checks;
    Ok(report)
}

/// Looks for an embedding of a finite system over `ℕ∞` or the tropical
/// semiring whose finite entries are at most `coeff_cap`. The candidate is
/// the least solution of the embedding inequalities, reached by Kleene
/// iteration from `𝟎`, and is returned only if it verifies exhaustively.
pub fn search_affine_embedding(sys: &dyn WeightedSystem, coeff_cap: u64) -> Result<Option<Embedding>, BoundError> {
    let desc = sys.semiring();
    if !matches!(desc.kind(), SemiringKind::NatInf | SemiringKind::Tropical) {
        return Err(BoundError::Unsupported(format!(
            "affine search over {}",
            desc.kind().name()
        )));
    }
    let objects = sys
        .all_objects()
        .ok_or_else(|| BoundError::Precondition(format!("{} is not finite", sys.name())))?;
    let s = scan(sys, &objects)?;
    if !s.open.is_empty() {
        return Err(BoundError::Precondition("infinite rule sets".into()));
    }
    if let Some(r) = s.rules.iter().find(|r| !is_affine_in_vars(&r.aggregator)) {
        return Err(BoundError::Unsupported(format!(
            "rule {} at {} is not affine",
            r.tag, r.lhs
        )));
    }
    let index: HashMap<&ObjectId, usize> = objects.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut values = vec![desc.zero().clone(); objects.len()];
    for (a, w) in &s.nfs {
        values[index[a]] = w.clone();
    }
    let in_range = |v: &SemiringValue| match v {
        SemiringValue::Nat(crate::semiring::ExtNat::Fin(k)) => *k <= coeff_cap,
        _ => desc.is_zero(v),
    };
    let rounds = (objects.len() + 1) * (coeff_cap as usize + 2);
    for _ in 0..rounds {
        let mut next = values.clone();
        for r in &s.rules {
            let args: Vec<SemiringValue> = r.rhs.iter().map(|b| values[index[b]].clone()).collect();
            let (v, _) = r.aggregator.eval(desc, &args, args.len().max(1))?;
            let i = index[&r.lhs];
            next[i] = desc.lub(&next[i], &v)?;
        }
        if next.iter().any(|v| desc.is_top(v)) {
            return Ok(None);
        }
        if next == values {
            if !values.iter().all(in_range) {
                return Ok(None);
            }
            let e = Embedding::Table(objects.iter().cloned().zip(values).collect());
            let report = verify_embedding(sys, &e, &InstanceSource::Exhaustive)?;
            return Ok((report.verdict == Verdict::BoundedCertified).then_some(e));
        }
        if desc.kind() == SemiringKind::NatInf && !next.iter().all(in_range) {
            return Ok(None);
        }
        values = next;
    }
    Ok(None)
}
