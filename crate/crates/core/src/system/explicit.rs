use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Claim, Limits, Metadata, ObjectId, RuleInstance, Successors, SystemError, WeightedSystem};
use crate::aggregator::{self, AggregatorExpr};
use crate::semiring::{SemiringDescriptor, SemiringSpec, SemiringValue};

/// One rule of a system file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSpec {
    pub lhs: String,
    pub rhs: Vec<String>,
    pub agg: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
}

/// The JSON layout of an explicit system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemFile {
    pub semiring: SemiringSpec,
    #[serde(default)]
    pub rules: Vec<RuleSpec>,
    #[serde(default)]
    pub nf: BTreeMap<String, String>,
    /// Declares that the listed objects are not the whole object set, so
    /// termination cannot be decided from the file alone.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub open: bool,
}

/// A finite system given by an explicit rule table.
#[derive(Debug, Clone)]
pub struct ExplicitSystem {
    name: String,
    desc: SemiringDescriptor,
    objects: Vec<ObjectId>,
    rules: HashMap<String, Vec<RuleInstance>>,
    nf: HashMap<String, SemiringValue>,
    metadata: Metadata,
}

impl ExplicitSystem {
    pub fn from_json(name: impl Into<String>, text: &str) -> Result<Self, SystemError> {
        let file: SystemFile = serde_json::from_str(text).map_err(|e| SystemError::File(e.to_string()))?;
        Self::from_file(name, &file)
    }

    pub fn from_file(name: impl Into<String>, file: &SystemFile) -> Result<Self, SystemError> {
        let desc = file.semiring.build()?;
        let mut rules = Vec::with_capacity(file.rules.len());
        for (i, r) in file.rules.iter().enumerate() {
            let tag = r.tag.clone().unwrap_or_else(|| format!("r{}", i + 1));
            let agg = aggregator::parse(&r.agg, &desc).map_err(|source| SystemError::Aggregator {
                tag: tag.clone(),
                source,
            })?;
            rules.push((r.lhs.clone(), r.rhs.clone(), agg, tag));
        }
        let mut nf = Vec::with_capacity(file.nf.len());
        for (label, lit) in &file.nf {
            nf.push((label.clone(), desc.parse_value(lit)?));
        }
        Self::build(name, desc, rules, nf, file.open)
    }

    /// Builds a system from `(lhs, rhs, aggregator, tag)` rules and
    /// normal-form weights, validating it like a loaded file.
    pub fn build(
        name: impl Into<String>,
        desc: SemiringDescriptor,
        rules: Vec<(String, Vec<String>, AggregatorExpr, String)>,
        nf: Vec<(String, SemiringValue)>,
        open: bool,
    ) -> Result<Self, SystemError> {
        let mut objects: Vec<ObjectId> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut mention = |s: &str, objects: &mut Vec<ObjectId>| {
            if seen.insert(s.to_string()) {
                objects.push(ObjectId::Label(s.to_string()));
            }
        };
        let mut table: HashMap<String, Vec<RuleInstance>> = HashMap::new();
        for (lhs, rhs, agg, tag) in rules {
            mention(&lhs, &mut objects);
            for b in &rhs {
                mention(b, &mut objects);
            }
            if agg.contains_x() {
                return Err(SystemError::File(format!("rule {tag}: aggregator mentions X")));
            }
            let rule = RuleInstance::new(
                ObjectId::Label(lhs.clone()),
                rhs.into_iter().map(ObjectId::Label).collect(),
                Arc::new(agg),
                tag,
            );
            rule.check_arity()?;
            for c in rule.aggregator.constants() {
                desc.validate(&c)?;
            }
            table.entry(lhs).or_default().push(rule);
        }
        let mut weights = HashMap::new();
        for (label, v) in nf {
            mention(&label, &mut objects);
            desc.validate(&v)?;
            if table.contains_key(&label) {
                return Err(SystemError::WeightOnNonNormalForm(label));
            }
            weights.insert(label, v);
        }
        for o in &objects {
            let ObjectId::Label(s) = o else { unreachable!() };
            if !table.contains_key(s) && !weights.contains_key(s) {
                return Err(SystemError::Dangling(s.clone()));
            }
        }
        let deterministic = table.values().all(|rs| rs.len() <= 1);
        let terminating = if open {
            Claim::Unknown
        } else {
            Claim::from_bool(!has_cycle(&objects, &table))
        };
        Ok(ExplicitSystem {
            name: name.into(),
            desc,
            objects,
            rules: table,
            nf: weights,
            metadata: Metadata {
                deterministic: Claim::from_bool(deterministic),
                finitely_nondeterministic: Claim::Asserted,
                finitely_branching: Claim::Asserted,
                terminating,
            },
        })
    }

    /// Serializes back into the file layout.
    pub fn to_file(&self) -> SystemFile {
        let mut rules = Vec::new();
        for o in &self.objects {
            let ObjectId::Label(s) = o else { continue };
            for r in self.rules.get(s).into_iter().flatten() {
                rules.push(RuleSpec {
                    lhs: s.clone(),
                    rhs: r.rhs.iter().map(|b| b.to_string()).collect(),
                    agg: r.aggregator.render(&self.desc),
                    tag: Some(r.tag.clone()),
                });
            }
        }
        SystemFile {
            semiring: SemiringSpec::from(&self.desc),
            rules,
            nf: self.nf.iter().map(|(k, v)| (k.clone(), self.desc.format(v))).collect(),
            open: self.metadata.terminating == Claim::Unknown,
        }
    }

    pub fn objects(&self) -> &[ObjectId] {
        &self.objects
    }

    fn label<'a>(&self, a: &'a ObjectId) -> Result<&'a str, SystemError> {
        match a {
            ObjectId::Label(s) if self.rules.contains_key(s) || self.nf.contains_key(s) => Ok(s),
            other => Err(SystemError::UnknownObject(other.to_string())),
        }
    }
}

fn has_cycle(objects: &[ObjectId], table: &HashMap<String, Vec<RuleInstance>>) -> bool {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let index: HashMap<&ObjectId, usize> = objects.iter().enumerate().map(|(i, o)| (o, i)).collect();
    let succ: Vec<Vec<usize>> = objects
        .iter()
        .map(|o| {
            let ObjectId::Label(s) = o else { return Vec::new() };
            table
                .get(s)
                .into_iter()
                .flatten()
                .flat_map(|r| r.rhs.iter().map(|b| index[b]))
                .collect()
        })
        .collect();
    let mut mark = vec![Mark::New; objects.len()];
    for root in 0..objects.len() {
        if mark[root] != Mark::New {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        mark[root] = Mark::Active;
        while let Some((v, i)) = stack.pop() {
            if i < succ[v].len() {
                stack.push((v, i + 1));
                let w = succ[v][i];
                match mark[w] {
                    Mark::Active => return true,
                    Mark::New => {
                        mark[w] = Mark::Active;
                        stack.push((w, 0));
                    }
                    Mark::Done => {}
                }
            } else {
                mark[v] = Mark::Done;
            }
        }
    }
    false
}

impl WeightedSystem for ExplicitSystem {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn semiring(&self) -> &SemiringDescriptor {
        &self.desc
    }

    fn successors(&self, a: &ObjectId, limits: Limits) -> Result<Successors, SystemError> {
        let s = self.label(a)?;
        Ok(match self.rules.get(s) {
            None => Successors::none(),
            Some(rs) => Successors::capped(rs.clone(), limits.rules),
        })
    }

    fn is_normal_form(&self, a: &ObjectId) -> Result<bool, SystemError> {
        let s = self.label(a)?;
        Ok(!self.rules.contains_key(s))
    }

    fn nf_weight(&self, a: &ObjectId) -> Result<SemiringValue, SystemError> {
        let s = self.label(a)?;
        self.nf
            .get(s)
            .cloned()
            .ok_or_else(|| SystemError::NotNormalForm(s.to_string()))
    }

    fn metadata(&self) -> Metadata {
        self.metadata
    }

    fn parse_object(&self, text: &str) -> Result<ObjectId, SystemError> {
        let a = ObjectId::Label(text.trim().to_string());
        self.label(&a)?;
        Ok(a)
    }

    fn all_objects(&self) -> Option<Vec<ObjectId>> {
        Some(self.objects.clone())
    }

    fn default_start(&self) -> Option<ObjectId> {
        self.objects.first().cloned()
    }
}
