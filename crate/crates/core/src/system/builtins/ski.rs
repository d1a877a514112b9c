use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{bad_object, claims};
use crate::aggregator::AggregatorExpr;
use crate::semiring::{SemiringDescriptor, SemiringValue};
use crate::system::{
    Claim, Limits, Metadata, ObjectId, RuleInstance, SkiConfig, SkiStmt, Successors, SystemError, SystemHandle,
    WeightedSystem,
};

struct SkiRental {
    y: u64,
    desc: SemiringDescriptor,
    program: Arc<SkiStmt>,
}

/// The ski-rental program
/// `while (n > 0) { {⊙1; n := n-1} ⊕ {⊙y; n := 0} }`
/// as a tropical system over program configurations. Every configuration
/// has a single rule collecting all of its transitions, left branch first;
/// terminated configurations are normal forms weighing `𝟏`.
pub fn ski_rental(y: u64) -> SystemHandle {
    let seq = |a: SkiStmt, b: SkiStmt| SkiStmt::Seq(Arc::new(a), Arc::new(b));
    let rent = seq(SkiStmt::Weight(1), SkiStmt::Decrement);
    let buy = seq(SkiStmt::Weight(y), SkiStmt::Assign(0));
    let body = SkiStmt::Choice(Arc::new(rent), Arc::new(buy));
    Arc::new(SkiRental {
        y,
        desc: SemiringDescriptor::tropical(),
        program: Arc::new(SkiStmt::While(Arc::new(body))),
    })
}

/// One small-step transition: its weight (`None` for `𝟏`), the remaining
/// program and the new value of `n`.
type Transition = (Option<u64>, Option<Arc<SkiStmt>>, u64);

fn step(stmt: &Arc<SkiStmt>, n: u64) -> (Vec<Transition>, &'static str) {
    match &**stmt {
        SkiStmt::Weight(w) => (vec![(Some(*w).filter(|w| *w != 0), None, n)], "weight"),
        SkiStmt::Decrement => (vec![(None, None, n.saturating_sub(1))], "dec"),
        SkiStmt::Assign(c) => (vec![(None, None, *c)], "assign"),
        SkiStmt::Seq(a, b) => {
            let (inner, tag) = step(a, n);
            let out = inner
                .into_iter()
                .map(|(w, rest, m)| {
                    let next = match rest {
                        None => b.clone(),
                        Some(r) => Arc::new(SkiStmt::Seq(r, b.clone())),
                    };
                    (w, Some(next), m)
                })
                .collect();
            (out, tag)
        }
        SkiStmt::Choice(a, b) => (vec![(None, Some(a.clone()), n), (None, Some(b.clone()), n)], "choice"),
        SkiStmt::While(body) => {
            if n > 0 {
                let unrolled = Arc::new(SkiStmt::Seq(body.clone(), stmt.clone()));
                (vec![(None, Some(unrolled), n)], "loop")
            } else {
                (vec![(None, None, n)], "exit")
            }
        }
    }
}

impl SkiRental {
    fn config<'a>(&self, a: &'a ObjectId) -> Result<&'a SkiConfig, SystemError> {
        match a {
            ObjectId::Ski(c) => Ok(c),
            other => Err(SystemError::UnknownObject(other.to_string())),
        }
    }

    fn initial(&self, n0: u64) -> ObjectId {
        ObjectId::Ski(SkiConfig {
            program: Some(self.program.clone()),
            n: n0,
        })
    }
}

impl WeightedSystem for SkiRental {
    fn name(&self) -> String {
        format!("ski_rental(y={})", self.y)
    }

    fn semiring(&self) -> &SemiringDescriptor {
        &self.desc
    }

    fn successors(&self, a: &ObjectId, _limits: Limits) -> Result<Successors, SystemError> {
        let c = self.config(a)?;
        let Some(prog) = &c.program else {
            return Ok(Successors::none());
        };
        let (moves, tag) = step(prog, c.n);
        let mut terms = Vec::with_capacity(moves.len());
        let mut rhs = Vec::with_capacity(moves.len());
        for (i, (w, rest, n)) in moves.into_iter().enumerate() {
            let v = AggregatorExpr::Var(i + 1);
            terms.push(match w {
                None => v,
                Some(w) => AggregatorExpr::Prod(vec![AggregatorExpr::Const(SemiringValue::nat(w)), v]),
            });
            rhs.push(ObjectId::Ski(SkiConfig { program: rest, n }));
        }
        let agg = if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            AggregatorExpr::Sum(terms)
        };
        Ok(Successors::all(vec![RuleInstance::new(
            a.clone(),
            rhs,
            Arc::new(agg),
            tag,
        )]))
    }

    fn is_normal_form(&self, a: &ObjectId) -> Result<bool, SystemError> {
        Ok(self.config(a)?.program.is_none())
    }

    fn nf_weight(&self, a: &ObjectId) -> Result<SemiringValue, SystemError> {
        if self.is_normal_form(a)? {
            Ok(self.desc.one().clone())
        } else {
            Err(SystemError::NotNormalForm(a.to_string()))
        }
    }

    fn metadata(&self) -> Metadata {
        claims(Claim::Asserted, Claim::Asserted, Claim::Asserted, Claim::Asserted)
    }

    /// Accepts `n0=K` (or just `K`) for the initial configuration.
    fn parse_object(&self, text: &str) -> Result<ObjectId, SystemError> {
        let t = text.trim();
        let digits = t.strip_prefix("n0=").unwrap_or(t);
        digits
            .trim()
            .parse::<u64>()
            .map(|n0| self.initial(n0))
            .map_err(|_| bad_object(text, "expected n0=<natural number>"))
    }

    fn enumerate_objects(&self, n: usize) -> Vec<ObjectId> {
        (0..n as u64).map(|n0| self.initial(n0)).collect()
    }

    fn random_object(&self, rng: &mut ChaCha8Rng) -> Option<ObjectId> {
        Some(self.initial(rng.gen_range(0..=32)))
    }

    fn default_start(&self) -> Option<ObjectId> {
        Some(self.initial(5))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_configuration_is_not_normal() {
        let sys = ski_rental(3);
        let a = sys.parse_object("n0=5").unwrap();
        assert!(!sys.is_normal_form(&a).unwrap());
        assert_eq!(
            a.to_string(),
            "<while(n>0){{weight 1; n:=n-1} + {weight 3; n:=0}} | n=5>"
        );
    }

    #[test]
    fn choice_has_two_children_left_first() {
        let sys = ski_rental(3);
        let a = sys.parse_object("n0=1").unwrap();
        let unrolled = sys.successors(&a, Limits::new(1, 1)).unwrap().rules[0].rhs[0].clone();
        let s = sys.successors(&unrolled, Limits::new(1, 1)).unwrap();
        let r = &s.rules[0];
        assert_eq!(r.tag, "choice");
        assert_eq!(r.rhs.len(), 2);
        assert!(r.rhs[0].to_string().starts_with("<weight 1"));
        assert_eq!(r.aggregator.render(sys.semiring()), "v1 + v2");
    }

    #[test]
    fn weighted_step_multiplies() {
        let sys = ski_rental(3);
        let c = ObjectId::Ski(SkiConfig {
            program: Some(Arc::new(SkiStmt::Weight(3))),
            n: 2,
        });
        let s = sys.successors(&c, Limits::new(1, 1)).unwrap();
        assert_eq!(s.rules[0].aggregator.render(sys.semiring()), "3 * v1");
        assert!(sys.is_normal_form(&s.rules[0].rhs[0]).unwrap());
    }
}
