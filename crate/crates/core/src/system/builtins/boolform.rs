use std::collections::BTreeMap;
use std::sync::Arc;

use super::{bad_object, claims};
use crate::aggregator::AggregatorExpr;
use crate::semiring::{Arctic, SemiringDescriptor, SemiringValue};
use crate::system::{
    Claim, Formula, Limits, Metadata, ObjectId, RuleInstance, Successors, SystemError, SystemHandle, WeightedSystem,
};

/// Arctic costs of atomic facts.
#[derive(Debug, Clone, PartialEq)]
pub struct BoolCosts {
    pub atoms: BTreeMap<String, SemiringValue>,
}

impl Default for BoolCosts {
    /// The tables `R = {a: 2, b: ∞}` and
    /// `P = {aa: 2, ab: 7, ba: ∞, bb: 10}`.
    fn default() -> Self {
        let fin = |n| SemiringValue::Arctic(Arctic::Fin(n));
        let inf = SemiringValue::Arctic(Arctic::PosInf);
        let atoms = [
            ("Ra", fin(2)),
            ("Rb", inf.clone()),
            ("Paa", fin(2)),
            ("Pab", fin(7)),
            ("Pba", inf),
            ("Pbb", fin(10)),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        BoolCosts { atoms }
    }
}

struct BoolForm {
    desc: SemiringDescriptor,
    root: Formula,
    universe: Vec<ObjectId>,
    costs: BoolCosts,
    and: Arc<AggregatorExpr>,
    or: Arc<AggregatorExpr>,
}

/// Maximal proof cost of a negation-free formula: a conjunction reduces to
/// both conjuncts and adds their costs, a disjunction reduces to both
/// disjuncts and takes the larger cost.
pub fn boolean_provenance(formula: &Formula, costs: &BoolCosts) -> Result<SystemHandle, SystemError> {
    let desc = SemiringDescriptor::arctic();
    for f in formula.subformulas() {
        if let Formula::Atom(a) = &f {
            let v = costs.atoms.get(a).ok_or_else(|| SystemError::BadParam {
                system: "boolform".into(),
                msg: format!("no cost for atom {a}"),
            })?;
            desc.validate(v)?;
        }
    }
    let pair = |sum: bool| {
        let items = vec![AggregatorExpr::Var(1), AggregatorExpr::Var(2)];
        Arc::new(if sum {
            AggregatorExpr::Sum(items)
        } else {
            AggregatorExpr::Prod(items)
        })
    };
    Ok(Arc::new(BoolForm {
        desc,
        root: formula.clone(),
        universe: formula.subformulas().into_iter().map(ObjectId::Formula).collect(),
        costs: costs.clone(),
        and: pair(false),
        or: pair(true),
    }))
}

impl BoolForm {
    fn formula<'a>(&self, a: &'a ObjectId) -> Result<&'a Formula, SystemError> {
        match a {
            ObjectId::Formula(f) if self.universe.contains(a) => Ok(f),
            other => Err(SystemError::UnknownObject(other.to_string())),
        }
    }
}

impl WeightedSystem for BoolForm {
    fn name(&self) -> String {
        format!("boolform({})", self.root)
    }

    fn semiring(&self) -> &SemiringDescriptor {
        &self.desc
    }

    fn successors(&self, a: &ObjectId, _limits: Limits) -> Result<Successors, SystemError> {
        let (l, r, agg, tag) = match self.formula(a)? {
            Formula::Atom(_) => return Ok(Successors::none()),
            Formula::And(l, r) => (l, r, &self.and, "and"),
            Formula::Or(l, r) => (l, r, &self.or, "or"),
        };
        let rhs = vec![ObjectId::Formula((**l).clone()), ObjectId::Formula((**r).clone())];
        Ok(Successors::all(vec![RuleInstance::new(
            a.clone(),
            rhs,
            agg.clone(),
            tag,
        )]))
    }

    fn is_normal_form(&self, a: &ObjectId) -> Result<bool, SystemError> {
        Ok(matches!(self.formula(a)?, Formula::Atom(_)))
    }

    fn nf_weight(&self, a: &ObjectId) -> Result<SemiringValue, SystemError> {
        match self.formula(a)? {
            Formula::Atom(name) => Ok(self.costs.atoms[name].clone()),
            _ => Err(SystemError::NotNormalForm(a.to_string())),
        }
    }

    fn metadata(&self) -> Metadata {
        claims(Claim::Asserted, Claim::Asserted, Claim::Asserted, Claim::Asserted)
    }

    fn parse_object(&self, text: &str) -> Result<ObjectId, SystemError> {
        let f = Formula::parse(text).ok_or_else(|| bad_object(text, "expected a formula over &, | and atoms"))?;
        let a = ObjectId::Formula(f);
        if !self.universe.contains(&a) {
            return Err(bad_object(text, format!("not a subformula of {}", self.root)));
        }
        Ok(a)
    }

    fn all_objects(&self) -> Option<Vec<ObjectId>> {
        Some(self.universe.clone())
    }

    fn default_start(&self) -> Option<ObjectId> {
        Some(ObjectId::Formula(self.root.clone()))
    }
}
