use std::sync::{Arc, OnceLock};

use super::{bad_object, claims};
use crate::aggregator::AggregatorExpr;
use crate::semiring::{SemiringDescriptor, SemiringValue};
use crate::system::{
    cplx_wrap, Claim, Limits, Metadata, ObjectId, RuleInstance, Successors, SystemError, SystemHandle, Term,
    WeightedSystem,
};

struct AdditionTrs {
    max_size: usize,
    desc: SemiringDescriptor,
    pass: Arc<AggregatorExpr>,
    universe: OnceLock<Vec<ObjectId>>,
}

/// Derivational complexity of `plus(s(x),y) → s(plus(x,y))`,
/// `plus(0,y) → y` on ground terms of size at most `max_size`. Steps may
/// rewrite any redex; rewriting never grows a term, so the universe is
/// closed under reduction.
pub fn addition_trs_ground(max_size: usize) -> SystemHandle {
    cplx_wrap(Arc::new(AdditionTrs {
        max_size: max_size.max(1),
        desc: SemiringDescriptor::nat_inf(),
        pass: Arc::new(AggregatorExpr::Var(1)),
        universe: OnceLock::new(),
    }))
}

/// Every ground term of exactly each size `1..=max`, grouped by size.
fn terms_by_size(max: usize) -> Vec<Vec<Term>> {
    let mut by: Vec<Vec<Term>> = vec![Vec::new(), vec![Term::Zero]];
    for n in 2..=max {
        let mut here: Vec<Term> = by[n - 1].iter().map(|t| Term::S(Arc::new(t.clone()))).collect();
        for i in 1..n - 1 {
            for a in &by[i] {
                for b in &by[n - 1 - i] {
                    here.push(Term::plus(a.clone(), b.clone()));
                }
            }
        }
        by.push(here);
    }
    by
}

/// Rewrites at every redex, outermost first and left to right.
fn rewrites(t: &Term, path: &mut Vec<u8>, out: &mut Vec<(Term, String)>) {
    if let Term::Plus(x, y) = t {
        let at = if path.is_empty() {
            "root".to_string()
        } else {
            path.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(".")
        };
        match &**x {
            Term::S(inner) => out.push((
                Term::S(Arc::new(Term::Plus(inner.clone(), y.clone()))),
                format!("plus_s@{at}"),
            )),
            Term::Zero => out.push(((**y).clone(), format!("plus_0@{at}"))),
            Term::Plus(..) => {}
        }
    }
    let mut descend = |k: u8, child: &Term, rebuild: &dyn Fn(Term) -> Term, out: &mut Vec<(Term, String)>| {
        path.push(k);
        let mut inner = Vec::new();
        rewrites(child, path, &mut inner);
        path.pop();
        out.extend(inner.into_iter().map(|(c, tag)| (rebuild(c), tag)));
    };
    match t {
        Term::Zero => {}
        Term::S(x) => descend(1, x, &|c| Term::S(Arc::new(c)), out),
        Term::Plus(x, y) => {
            descend(1, x, &|c| Term::Plus(Arc::new(c), y.clone()), out);
            descend(2, y, &|c| Term::Plus(x.clone(), Arc::new(c)), out);
        }
    }
}

impl AdditionTrs {
    fn term<'a>(&self, a: &'a ObjectId) -> Result<&'a Term, SystemError> {
        match a {
            ObjectId::Term(t) if t.size() <= self.max_size => Ok(t),
            other => Err(SystemError::UnknownObject(other.to_string())),
        }
    }
}

impl WeightedSystem for AdditionTrs {
    fn name(&self) -> String {
        format!("addition_trs(max_size={})", self.max_size)
    }

    fn semiring(&self) -> &SemiringDescriptor {
        &self.desc
    }

    fn successors(&self, a: &ObjectId, limits: Limits) -> Result<Successors, SystemError> {
        let t = self.term(a)?;
        let mut found = Vec::new();
        rewrites(t, &mut Vec::new(), &mut found);
        let rules = found
            .into_iter()
            .map(|(b, tag)| RuleInstance::new(a.clone(), vec![ObjectId::Term(b)], self.pass.clone(), tag))
            .collect();
        Ok(Successors::capped(rules, limits.rules))
    }

    fn is_normal_form(&self, a: &ObjectId) -> Result<bool, SystemError> {
        Ok(!self.term(a)?.contains_plus())
    }

    fn nf_weight(&self, a: &ObjectId) -> Result<SemiringValue, SystemError> {
        if self.is_normal_form(a)? {
            Ok(SemiringValue::nat(0))
        } else {
            Err(SystemError::NotNormalForm(a.to_string()))
        }
    }

    fn metadata(&self) -> Metadata {
        let deterministic = Claim::from_bool(self.max_size < 5);
        claims(deterministic, Claim::Asserted, Claim::Asserted, Claim::Asserted)
    }

    fn parse_object(&self, text: &str) -> Result<ObjectId, SystemError> {
        let t = Term::parse(text).ok_or_else(|| bad_object(text, "expected a ground term over 0, s, plus"))?;
        if t.size() > self.max_size {
            return Err(bad_object(
                text,
                format!("term size {} exceeds max_size={}", t.size(), self.max_size),
            ));
        }
        Ok(ObjectId::Term(t))
    }

    fn all_objects(&self) -> Option<Vec<ObjectId>> {
        Some(
            self.universe
                .get_or_init(|| {
                    terms_by_size(self.max_size)
                        .into_iter()
                        .flatten()
                        .map(ObjectId::Term)
                        .collect()
                })
                .clone(),
        )
    }

    fn default_start(&self) -> Option<ObjectId> {
        (self.max_size >= 5).then(|| ObjectId::Term(Term::plus(Term::numeral(1), Term::numeral(1))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn universe_sizes() {
        let counts: Vec<usize> = terms_by_size(8).iter().map(Vec::len).collect();
        assert_eq!(counts, [0, 1, 1, 2, 4, 9, 21, 51, 127]);
        assert_eq!(addition_trs_ground(8).all_objects().unwrap().len(), 216);
    }

    #[test]
    fn step_rewrites_and_tags() {
        let sys = addition_trs_ground(8);
        let a = sys.parse_object("plus(s(0),plus(0,0))").unwrap();
        let s = sys.successors(&a, Limits::new(8, 1)).unwrap();
        let shown: Vec<_> = s.rules.iter().map(|r| (r.tag.clone(), r.rhs[0].to_string())).collect();
        assert_eq!(
            shown,
            [
                ("plus_s@root".to_string(), "s(plus(0,plus(0,0)))".to_string()),
                ("plus_0@2".to_string(), "plus(s(0),0)".to_string()),
            ]
        );
        assert_eq!(s.rules[0].aggregator.render(sys.semiring()), "1 + v1");
    }

    #[test]
    fn rewriting_preserves_value_and_size_bound() {
        let sys = addition_trs_ground(7);
        for a in sys.all_objects().unwrap() {
            let ObjectId::Term(t) = &a else { unreachable!() };
            let s = sys.successors(&a, Limits::new(64, 1)).unwrap();
            assert_eq!(s.rules.is_empty(), !t.contains_plus(), "{a}");
            for r in &s.rules {
                let ObjectId::Term(b) = &r.rhs[0] else { unreachable!() };
                assert_eq!(b.value(), t.value());
                assert!(b.size() <= t.size());
            }
        }
    }

    #[test]
    fn rejects_oversized_terms() {
        let sys = addition_trs_ground(4);
        assert!(sys.parse_object("plus(s(0),s(0))").is_err());
        assert!(sys.parse_object("s(s(0))").is_ok());
    }
}
