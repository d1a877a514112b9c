use std::sync::Arc;

use super::{
    addition_trs_ground, boolean_provenance, geometric_walk, na_system, os_fair, os_runtime, os_size, os_starv,
    prefix_words, ski_rental, walk_expected, walk_termprob, z_walk_safety, BoolCosts, ExplicitSystem, Formula,
    SystemError, SystemHandle,
};
use crate::random::{random_system, RandomShape};
use crate::semiring::{SemiringDescriptor, SemiringKind};

/// A catalog entry for `list`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct BuiltinInfo {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    pub params: &'static str,
    pub summary: &'static str,
}

pub fn builtin_catalog() -> Vec<BuiltinInfo> {
    vec![
        BuiltinInfo {
            name: "walk_termprob",
            aliases: &["biased_walk_termprob"],
            params: "",
            summary: "biased walk n+1 -> [n, n+2] over real_inf, probability of reaching 0",
        },
        BuiltinInfo {
            name: "walk_expected",
            aliases: &["biased_walk_expected_steps"],
            params: "",
            summary: "biased walk over real_inf, expected number of steps",
        },
        BuiltinInfo {
            name: "geometric_walk",
            aliases: &[],
            params: "",
            summary: "walk n+1 -> [0, 1, 2, ...] with geometric probabilities (infinitely branching)",
        },
        BuiltinInfo {
            name: "os_size",
            aliases: &[],
            params: "",
            summary: "two-process scheduler over arctic, largest waiting queue",
        },
        BuiltinInfo {
            name: "os_fair",
            aliases: &[],
            params: "",
            summary: "two-process scheduler over words on {P1,P2}, order of runs",
        },
        BuiltinInfo {
            name: "os_starv",
            aliases: &[],
            params: "",
            summary: "two-process scheduler over nat_inf x nat_inf, runs per process",
        },
        BuiltinInfo {
            name: "os_runtime",
            aliases: &[],
            params: "",
            summary: "two-process scheduler, derivation length",
        },
        BuiltinInfo {
            name: "z_walk_safety",
            aliases: &["zwalk"],
            params: "",
            summary: "walk on the integers over nat_inf x boolean, (steps, reached an even number)",
        },
        BuiltinInfo {
            name: "addition_trs",
            aliases: &["addition_trs_ground"],
            params: "max_size=8",
            summary: "derivation length of the Peano addition TRS on ground terms up to max_size",
        },
        BuiltinInfo {
            name: "boolform",
            aliases: &["boolean_provenance"],
            params: "formula=Ra&(Pab|Pbb), <atom>=<arctic cost>",
            summary: "maximal proof cost of a negation-free formula over arctic",
        },
        BuiltinInfo {
            name: "na_system",
            aliases: &["na"],
            params: "",
            summary: "a -> n for all n, n+1 -> n; derivation length",
        },
        BuiltinInfo {
            name: "ski_rental",
            aliases: &[],
            params: "y=3",
            summary: "ski-rental program over tropical; start objects n0=<days>",
        },
        BuiltinInfo {
            name: "prefix_words",
            aliases: &[],
            params: "",
            summary: "{0,1,*} system whose tree weights are the prefixes of the tree spine",
        },
        BuiltinInfo {
            name: "random",
            aliases: &[],
            params: "kind=nat_inf, seed=0, objects=6, rules=3, rhs=3",
            summary: "seeded random explicit system over nat_inf, tropical or boolean",
        },
    ]
}

/// Splits `name(k=v,...)` into the name and its parameters.
pub fn parse_builtin_spec(text: &str) -> Result<(String, Vec<(String, String)>), SystemError> {
    let text = text.trim();
    let bad = || SystemError::BadSpec(text.to_string());
    let Some(open) = text.find('(') else {
        if text.is_empty() || !text.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(bad());
        }
        return Ok((text.to_string(), Vec::new()));
    };
    let inner = text[open + 1..].strip_suffix(')').ok_or_else(bad)?;
    let name = text[..open].trim().to_string();
    let mut params = Vec::new();
    if !inner.trim().is_empty() {
        for part in crate::semiring::split_top_level(inner) {
            let (k, v) = part.split_once('=').ok_or_else(bad)?;
            params.push((k.trim().to_string(), v.trim().to_string()));
        }
    }
    Ok((name, params))
}

struct Params {
    system: String,
    items: Vec<(String, String)>,
}

impl Params {
    fn take(&mut self, key: &str) -> Option<String> {
        let i = self.items.iter().position(|(k, _)| k == key)?;
        Some(self.items.remove(i).1)
    }

    fn number(&mut self, key: &str, default: u64) -> Result<u64, SystemError> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| self.error(format!("{key} must be a natural number, got `{v}`"))),
        }
    }

    fn error(&self, msg: String) -> SystemError {
        SystemError::BadParam {
            system: self.system.clone(),
            msg,
        }
    }

    fn finish(self) -> Result<(), SystemError> {
        match self.items.first() {
            None => Ok(()),
            Some((k, _)) => Err(self.error(format!("unknown parameter `{k}`"))),
        }
    }
}

fn canonical(name: &str) -> Option<&'static str> {
    builtin_catalog()
        .into_iter()
        .find(|b| b.name == name || b.aliases.contains(&name))
        .map(|b| b.name)
}

fn build_builtin(name: &str, items: Vec<(String, String)>) -> Result<SystemHandle, SystemError> {
    let name = canonical(name).ok_or_else(|| SystemError::UnknownBuiltin(name.to_string()))?;
    let mut p = Params {
        system: name.to_string(),
        items,
    };
    let sys = match name {
        "walk_termprob" => walk_termprob(),
        "walk_expected" => walk_expected(),
        "geometric_walk" => geometric_walk(),
        "os_size" => os_size(),
        "os_fair" => os_fair(),
        "os_starv" => os_starv(),
        "os_runtime" => os_runtime(),
        "z_walk_safety" => z_walk_safety(),
        "na_system" => na_system(),
        "prefix_words" => prefix_words(),
        "addition_trs" => {
            let max = p.number("max_size", 8)?;
            if max == 0 || max > 15 {
                return Err(p.error("max_size must lie in 1..=15".into()));
            }
            addition_trs_ground(max as usize)
        }
        "ski_rental" => ski_rental(p.number("y", 3)?),
        "boolform" => {
            let text = p.take("formula").unwrap_or_else(|| "Ra&(Pab|Pbb)".to_string());
            let formula = Formula::parse(&text).ok_or_else(|| p.error(format!("cannot parse formula `{text}`")))?;
            let mut costs = BoolCosts::default();
            let arctic = SemiringDescriptor::arctic();
            for (k, v) in std::mem::take(&mut p.items) {
                let value = arctic
                    .parse_value(&v)
                    .map_err(|e| p.error(format!("cost of {k}: {e}")))?;
                costs.atoms.insert(k, value);
            }
            boolean_provenance(&formula, &costs)?
        }
        "random" => {
            let kind = match p.take("kind").as_deref().unwrap_or("nat_inf") {
                "nat_inf" => SemiringKind::NatInf,
                "tropical" => SemiringKind::Tropical,
                "boolean" => SemiringKind::Boolean,
                other => return Err(p.error(format!("kind must be nat_inf, tropical or boolean, got `{other}`"))),
            };
            let seed = p.number("seed", 0)?;
            let shape = RandomShape {
                objects: p.number("objects", 6)?.clamp(1, 64) as usize,
                max_rules: p.number("rules", 3)?.min(16) as usize,
                max_rhs: p.number("rhs", 3)?.clamp(1, 16) as usize,
            };
            Arc::new(random_system(kind, shape, seed)?)
        }
        _ => unreachable!("catalog and constructors agree"),
    };
    p.finish()?;
    Ok(sys)
}

/// Resolves `builtin:<name>(<params>)` or `file:<path>`.
pub fn load_system(spec: &str) -> Result<SystemHandle, SystemError> {
    let spec = spec.trim();
    if let Some(rest) = spec.strip_prefix("builtin:") {
        let (name, params) = parse_builtin_spec(rest)?;
        return build_builtin(&name, params);
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path).map_err(|e| SystemError::File(format!("{path}: {e}")))?;
        return Ok(Arc::new(ExplicitSystem::from_json(path, &text)?));
    }
    Err(SystemError::BadSpec(spec.to_string()))
}
