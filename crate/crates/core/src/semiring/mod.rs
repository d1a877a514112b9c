//! Complete-lattice semirings and their values.

mod descriptor;
mod literal;
mod value;

pub use descriptor::{DisplayValue, SemiringDescriptor, SemiringFlags, SemiringKind};
pub(crate) use literal::split_top_level;
pub use literal::{as_rational, parse_rational, rational_at_least};
pub use value::{Arctic, Bottle, ExtNat, ExtReal, Language, SemiringValue, Word};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SemiringError {
    #[error("carrier mismatch: semiring expects {expected} values, got {found}")]
    CarrierMismatch { expected: String, found: String },
    #[error("tuple arity mismatch: expected {expected} components, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("unknown literal `{literal}` for the {semiring} semiring")]
    UnknownLiteral { literal: String, semiring: String },
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("unknown semiring kind `{0}`")]
    UnknownKind(String),
    #[error("product semiring needs at least one component")]
    EmptyProduct,
    #[error("join of an empty collection (pass the zero element explicitly)")]
    EmptyJoin,
    #[error("arithmetic overflow in a finite carrier value")]
    Overflow,
    #[error("result is not representable: {0}")]
    Unrepresentable(String),
}

/// The JSON shape of a semiring declaration in system files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemiringSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alphabet: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<SemiringSpec>,
}

impl SemiringSpec {
    pub fn build(&self) -> Result<SemiringDescriptor, SemiringError> {
        Ok(match self.kind.as_str() {
            "nat_inf" => SemiringDescriptor::nat_inf(),
            "real_inf" => SemiringDescriptor::real_inf(),
            "tropical" => SemiringDescriptor::tropical(),
            "arctic" => SemiringDescriptor::arctic(),
            "boolean" => SemiringDescriptor::boolean(),
            "confidence" => SemiringDescriptor::confidence(),
            "bottleneck" => SemiringDescriptor::bottleneck(),
            "language" => SemiringDescriptor::language(self.alphabet.iter().cloned())?,
            "product" => SemiringDescriptor::product(
                self.components
                    .iter()
                    .map(SemiringSpec::build)
                    .collect::<Result<_, _>>()?,
            )?,
            other => return Err(SemiringError::UnknownKind(other.to_string())),
        })
    }
}

impl From<&SemiringDescriptor> for SemiringSpec {
    fn from(desc: &SemiringDescriptor) -> Self {
        SemiringSpec {
            kind: desc.kind().name().to_string(),
            alphabet: desc.alphabet().to_vec(),
            components: desc.components().iter().map(SemiringSpec::from).collect(),
        }
    }
}

/// `⊕_{i=1}^k t`.
pub fn repeat_sum(desc: &SemiringDescriptor, t: &SemiringValue, k: usize) -> Result<SemiringValue, SemiringError> {
    let mut acc = desc.zero().clone();
    for _ in 0..k {
        acc = desc.plus(&acc, t)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_round_trips_through_json() {
        let text = r#"{"kind":"product","components":[{"kind":"nat_inf"},{"kind":"language","alphabet":["a","b"]}]}"#;
        let spec: SemiringSpec = serde_json::from_str(text).unwrap();
        let desc = spec.build().unwrap();
        assert_eq!(desc.components().len(), 2);
        assert_eq!(serde_json::to_string(&SemiringSpec::from(&desc)).unwrap(), text);
    }

    #[test]
    fn unknown_kind_is_rejected() {
        let spec = SemiringSpec {
            kind: "matrix".into(),
            alphabet: vec![],
            components: vec![],
        };
        assert!(matches!(spec.build(), Err(SemiringError::UnknownKind(_))));
    }
}
