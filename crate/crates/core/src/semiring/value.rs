//! Carrier elements for the built-in semirings.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_rational::BigRational;

/// An element of `ℕ ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtNat {
    Fin(u64),
    Inf,
}

impl ExtNat {
    pub fn is_zero(&self) -> bool {
        matches!(self, ExtNat::Fin(0))
    }
}

/// An element of `ℝ≥0 ∪ {∞}`, kept as an exact rational.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtReal {
    Fin(BigRational),
    Inf,
}

/// An element of `ℕ ∪ {−∞, +∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Arctic {
    NegInf,
    Fin(u64),
    PosInf,
}

/// An element of `ℚ ∪ {−∞, +∞}` (the bottleneck carrier).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bottle {
    NegInf,
    Fin(BigRational),
    PosInf,
}

/// A word over an alphabet, stored as symbol indices into the owning
/// descriptor's alphabet. Ordered shortlex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        out.extend_from_slice(&self.0);
        out.extend_from_slice(&other.0);
        Word(out)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

/// A finite language, or the whole of `Σ*`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Language {
    Words(BTreeSet<Word>),
    Top,
}

impl Language {
    pub fn empty() -> Self {
        Language::Words(BTreeSet::new())
    }

    pub fn epsilon() -> Self {
        Language::Words(BTreeSet::from([Word::empty()]))
    }

    pub fn contains_epsilon(&self) -> bool {
        match self {
            Language::Top => true,
            Language::Words(ws) => ws.contains(&Word::empty()),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Language::Words(ws) if ws.is_empty())
    }
}

/// One element of some built-in carrier.
///
/// Values do not know which semiring they belong to: tropical and
/// extended-natural values share the `Nat` tag, and the descriptor decides
/// which operations apply.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SemiringValue {
    Nat(ExtNat),
    Real(ExtReal),
    Arctic(Arctic),
    Bool(bool),
    Conf(BigRational),
    Bottle(Bottle),
    Lang(Language),
    Tuple(Vec<SemiringValue>),
}

impl SemiringValue {
    pub fn nat(n: u64) -> Self {
        SemiringValue::Nat(ExtNat::Fin(n))
    }

    pub fn nat_inf() -> Self {
        SemiringValue::Nat(ExtNat::Inf)
    }

    pub fn real(num: i64, den: i64) -> Self {
        SemiringValue::Real(ExtReal::Fin(BigRational::new(num.into(), den.into())))
    }

    pub fn arctic(n: u64) -> Self {
        SemiringValue::Arctic(Arctic::Fin(n))
    }

    pub fn conf(num: i64, den: i64) -> Self {
        SemiringValue::Conf(BigRational::new(num.into(), den.into()))
    }

    pub fn bottle(num: i64, den: i64) -> Self {
        SemiringValue::Bottle(Bottle::Fin(BigRational::new(num.into(), den.into())))
    }

    /// Short carrier name used in error messages.
    pub fn carrier_name(&self) -> &'static str {
        match self {
            SemiringValue::Nat(_) => "extended-natural",
            SemiringValue::Real(_) => "extended-real",
            SemiringValue::Arctic(_) => "arctic",
            SemiringValue::Bool(_) => "boolean",
            SemiringValue::Conf(_) => "confidence",
            SemiringValue::Bottle(_) => "bottleneck",
            SemiringValue::Lang(_) => "language",
            SemiringValue::Tuple(_) => "tuple",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_order_shortlex() {
        let a = Word(vec![1]);
        let b = Word(vec![0, 0]);
        assert!(a < b);
        assert!(Word::empty() < a);
        assert!(Word(vec![0, 1]) < Word(vec![1, 0]));
    }

    #[test]
    fn ext_nat_order_puts_inf_last() {
        assert!(ExtNat::Fin(u64::MAX) < ExtNat::Inf);
        assert!(Arctic::NegInf < Arctic::Fin(0));
        assert!(Arctic::Fin(7) < Arctic::PosInf);
    }
}
