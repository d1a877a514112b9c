use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{bad_object, claims};
use crate::aggregator::AggregatorExpr;
use crate::semiring::{Arctic, Language, SemiringDescriptor, SemiringValue, Word};
use crate::system::{
    cplx_wrap, Claim, Limits, Metadata, ObjectId, OsMode, RuleInstance, Successors, SystemError, SystemHandle,
    WeightedSystem,
};

/// The weighting placed on the two-process scheduler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OsWeights {
    /// Arctic: the longest waiting queue seen.
    Size,
    /// Words over `{P1, P2}`: the order processes were run.
    Fair,
    /// `ℕ∞ × ℕ∞`: how often each process ran.
    Starv,
    /// No weights; the base relation for the complexity wrapper.
    Plain,
}

struct Os {
    weights: OsWeights,
    desc: SemiringDescriptor,
    pass: Arc<AggregatorExpr>,
    run: [Arc<AggregatorExpr>; 2],
}

fn build(weights: OsWeights) -> Os {
    let pass = Arc::new(AggregatorExpr::Var(1));
    let (desc, run) = match weights {
        OsWeights::Size => (SemiringDescriptor::arctic(), [pass.clone(), pass.clone()]),
        OsWeights::Plain => (SemiringDescriptor::nat_inf(), [pass.clone(), pass.clone()]),
        OsWeights::Fair => {
            let desc = SemiringDescriptor::language(["P1", "P2"]).expect("valid alphabet");
            let run = [0u8, 1].map(|p| {
                let word = Language::Words([Word(vec![p])].into_iter().collect());
                Arc::new(AggregatorExpr::Prod(vec![
                    AggregatorExpr::Const(SemiringValue::Lang(word)),
                    AggregatorExpr::Var(1),
                ]))
            });
            (desc, run)
        }
        OsWeights::Starv => {
            let desc = SemiringDescriptor::product(vec![SemiringDescriptor::nat_inf(), SemiringDescriptor::nat_inf()])
                .expect("non-empty product");
            let run = [(1, 0), (0, 1)].map(|(x, y)| {
                Arc::new(AggregatorExpr::Sum(vec![
                    AggregatorExpr::Const(SemiringValue::Tuple(vec![SemiringValue::nat(x), SemiringValue::nat(y)])),
                    AggregatorExpr::Var(1),
                ]))
            });
            (desc, run)
        }
    };
    Os {
        weights,
        desc,
        pass,
        run,
    }
}

/// The arctic memory analysis of the scheduler: enqueueing into a queue of
/// length `|p|` records `|p| + 1`.
pub fn os_size() -> SystemHandle {
    Arc::new(build(OsWeights::Size))
}

/// The process-order analysis over the word semiring on `{P1, P2}`.
pub fn os_fair() -> SystemHandle {
    Arc::new(build(OsWeights::Fair))
}

/// Counts how often each process ran. Its worst-case weight is `(∞, ∞)`
/// on every non-normal form, so it cannot express starvation freedom.
pub fn os_starv() -> SystemHandle {
    Arc::new(build(OsWeights::Starv))
}

/// Derivation length of the scheduler.
pub fn os_runtime() -> SystemHandle {
    cplx_wrap(Arc::new(build(OsWeights::Plain)))
}

impl Os {
    fn wait_agg(&self, queue_len: usize) -> Arc<AggregatorExpr> {
        match self.weights {
            OsWeights::Size => Arc::new(AggregatorExpr::Sum(vec![
                AggregatorExpr::Var(1),
                AggregatorExpr::Const(SemiringValue::Arctic(Arctic::Fin(queue_len as u64 + 1))),
            ])),
            _ => self.pass.clone(),
        }
    }

    fn parts(a: &ObjectId) -> Result<(OsMode, &[u8]), SystemError> {
        match a {
            ObjectId::Os { mode, queue } if queue.iter().all(|p| *p < 2) => Ok((*mode, queue)),
            other => Err(SystemError::UnknownObject(other.to_string())),
        }
    }
}

impl WeightedSystem for Os {
    fn name(&self) -> String {
        match self.weights {
            OsWeights::Size => "os_size",
            OsWeights::Fair => "os_fair",
            OsWeights::Starv => "os_starv",
            OsWeights::Plain => "os",
        }
        .to_string()
    }

    fn semiring(&self) -> &SemiringDescriptor {
        &self.desc
    }

    fn successors(&self, a: &ObjectId, limits: Limits) -> Result<Successors, SystemError> {
        let (mode, queue) = Self::parts(a)?;
        let rule = |to: ObjectId, agg: &Arc<AggregatorExpr>, tag: &str| {
            RuleInstance::new(a.clone(), vec![to], agg.clone(), tag)
        };
        let rules = match mode {
            OsMode::Idle => vec![
                rule(ObjectId::os(OsMode::Wait, queue), &self.pass, "idle_wait"),
                rule(ObjectId::os(OsMode::Run, queue), &self.pass, "idle_run"),
            ],
            OsMode::Wait => {
                let agg = self.wait_agg(queue.len());
                (0u8..2)
                    .map(|p| {
                        let mut q = queue.to_vec();
                        q.push(p);
                        rule(
                            ObjectId::os(OsMode::Idle, &q),
                            &agg,
                            if p == 0 { "wait_P1" } else { "wait_P2" },
                        )
                    })
                    .collect()
            }
            OsMode::Run => match queue.split_first() {
                None => Vec::new(),
                Some((&p, rest)) => vec![rule(
                    ObjectId::os(OsMode::Idle, rest),
                    &self.run[p as usize],
                    if p == 0 { "run_P1" } else { "run_P2" },
                )],
            },
        };
        Ok(Successors::capped(rules, limits.rules))
    }

    fn is_normal_form(&self, a: &ObjectId) -> Result<bool, SystemError> {
        let (mode, queue) = Self::parts(a)?;
        Ok(mode == OsMode::Run && queue.is_empty())
    }

    fn nf_weight(&self, a: &ObjectId) -> Result<SemiringValue, SystemError> {
        if !self.is_normal_form(a)? {
            return Err(SystemError::NotNormalForm(a.to_string()));
        }
        Ok(match self.weights {
            OsWeights::Size => SemiringValue::arctic(0),
            OsWeights::Plain => SemiringValue::nat(0),
            OsWeights::Fair => self.desc.one().clone(),
            OsWeights::Starv => self.desc.zero().clone(),
        })
    }

    fn metadata(&self) -> Metadata {
        claims(Claim::Refuted, Claim::Asserted, Claim::Asserted, Claim::Refuted)
    }

    fn parse_object(&self, text: &str) -> Result<ObjectId, SystemError> {
        ObjectId::parse_os(text).ok_or_else(|| bad_object(text, "expected idle(..), wait(..) or run(..) over P1, P2"))
    }

    /// Queues in shortlex order, each in the modes idle, wait, run.
    fn enumerate_objects(&self, n: usize) -> Vec<ObjectId> {
        let mut out = Vec::with_capacity(n);
        let mut len = 0u32;
        while out.len() < n {
            for code in 0..(1u64 << len) {
                let queue: Vec<u8> = (0..len).rev().map(|b| ((code >> b) & 1) as u8).collect();
                for mode in [OsMode::Idle, OsMode::Wait, OsMode::Run] {
                    if out.len() < n {
                        out.push(ObjectId::os(mode, &queue));
                    }
                }
            }
            len += 1;
        }
        out
    }

    fn random_object(&self, rng: &mut ChaCha8Rng) -> Option<ObjectId> {
        let len = rng.gen_range(0..=8);
        let queue: Vec<u8> = (0..len).map(|_| rng.gen_range(0..2)).collect();
        let mode = [OsMode::Idle, OsMode::Wait, OsMode::Run][rng.gen_range(0..3)];
        Some(ObjectId::os(mode, &queue))
    }

    fn default_start(&self) -> Option<ObjectId> {
        Some(ObjectId::os(OsMode::Idle, &[]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wait_enqueues_with_size_constant() {
        let sys = os_size();
        let s = sys
            .successors(&ObjectId::os(OsMode::Wait, &[]), Limits::new(8, 8))
            .unwrap();
        let d = sys.semiring();
        let shown: Vec<_> = s
            .rules
            .iter()
            .map(|r| (r.rhs[0].to_string(), r.aggregator.render(d)))
            .collect();
        assert_eq!(
            shown,
            vec![
                ("idle(P1)".to_string(), "v1 + 1".to_string()),
                ("idle(P2)".to_string(), "v1 + 1".to_string())
            ]
        );
        assert_eq!(
            sys.nf_weight(&ObjectId::os(OsMode::Run, &[])).unwrap(),
            SemiringValue::arctic(0)
        );
    }

    #[test]
    fn run_serves_the_front_of_the_queue() {
        let sys = os_fair();
        let s = sys
            .successors(&ObjectId::os(OsMode::Run, &[1, 0]), Limits::new(8, 8))
            .unwrap();
        assert_eq!(s.rules[0].rhs[0], ObjectId::os(OsMode::Idle, &[0]));
        assert_eq!(s.rules[0].aggregator.render(sys.semiring()), "{P2} * v1");
        assert!(sys.is_normal_form(&ObjectId::os(OsMode::Run, &[])).unwrap());
        assert!(!sys.is_normal_form(&ObjectId::os(OsMode::Idle, &[])).unwrap());
    }

    #[test]
    fn enumeration_is_shortlex() {
        let sys = os_starv();
        let names: Vec<_> = sys.enumerate_objects(6).iter().map(|o| o.to_string()).collect();
        assert_eq!(names, ["idle()", "wait()", "run()", "idle(P1)", "wait(P1)", "run(P1)"]);
    }
}
