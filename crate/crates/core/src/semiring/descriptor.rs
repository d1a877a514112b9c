use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::value::{Arctic, Bottle, ExtNat, ExtReal, Language, SemiringValue, Word};
use super::SemiringError;

/// Which built-in semiring a descriptor stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SemiringKind {
    /// `(ℕ∞, +, ·, 0, 1)`
    NatInf,
    /// `(ℝ≥0∞, +, ·, 0, 1)` over exact rationals.
    RealInf,
    /// `(ℕ∞, min, +, ∞, 0)`
    Tropical,
    /// `(ℕ±∞, max, +, −∞, 0)`
    Arctic,
    /// `({false, true}, ∨, ∧, false, true)`
    Boolean,
    /// `([0,1], max, ·, 0, 1)`
    Confidence,
    /// `(ℚ±∞, max, min, −∞, ∞)`
    Bottleneck,
    /// `(2^{Σ*}, ∪, ·, ∅, {ε})`, finite languages plus `Σ*`.
    Language,
    /// Cartesian product with pointwise operations.
    Product,
}

impl SemiringKind {
    pub fn name(self) -> &'static str {
        match self {
            SemiringKind::NatInf => "nat_inf",
            SemiringKind::RealInf => "real_inf",
            SemiringKind::Tropical => "tropical",
            SemiringKind::Arctic => "arctic",
            SemiringKind::Boolean => "boolean",
            SemiringKind::Confidence => "confidence",
            SemiringKind::Bottleneck => "bottleneck",
            SemiringKind::Language => "language",
            SemiringKind::Product => "product",
        }
    }

    /// True when `⊕` is idempotent, so infinite sums of a constant stay put.
    pub fn plus_is_idempotent(self) -> bool {
        !matches!(
            self,
            SemiringKind::NatInf | SemiringKind::RealInf | SemiringKind::Product
        )
    }
}

/// Capability flags consumed by the boundedness checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SemiringFlags {
    pub plus_is_selective: bool,
    pub times_is_selective: bool,
    pub has_extremal_property: bool,
    pub order_is_reversed_usual: bool,
}

/// A complete-lattice semiring: identities, top element, and the operations
/// acting on [`SemiringValue`]s of the matching carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiringDescriptor {
    kind: SemiringKind,
    alphabet: Vec<String>,
    components: Vec<SemiringDescriptor>,
    zero: SemiringValue,
    one: SemiringValue,
    top: SemiringValue,
    flags: SemiringFlags,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

impl SemiringDescriptor {
    fn simple(
        kind: SemiringKind,
        zero: SemiringValue,
        one: SemiringValue,
        top: SemiringValue,
        plus_sel: bool,
        times_sel: bool,
    ) -> Self {
        SemiringDescriptor {
            kind,
            alphabet: Vec::new(),
            components: Vec::new(),
            zero,
            one,
            top,
            flags: SemiringFlags {
                plus_is_selective: plus_sel,
                times_is_selective: times_sel,
                has_extremal_property: kind != SemiringKind::Language,
                order_is_reversed_usual: kind == SemiringKind::Tropical,
            },
        }
    }

    pub fn nat_inf() -> Self {
        Self::simple(
            SemiringKind::NatInf,
            SemiringValue::nat(0),
            SemiringValue::nat(1),
            SemiringValue::nat_inf(),
            false,
            false,
        )
    }

    pub fn real_inf() -> Self {
        Self::simple(
            SemiringKind::RealInf,
            SemiringValue::Real(ExtReal::Fin(rat(0))),
            SemiringValue::Real(ExtReal::Fin(rat(1))),
            SemiringValue::Real(ExtReal::Inf),
            false,
            false,
        )
    }

    pub fn tropical() -> Self {
        // natural order is reversed: 𝟎 = ∞ is the bottom, 0 the top
        Self::simple(
            SemiringKind::Tropical,
            SemiringValue::nat_inf(),
            SemiringValue::nat(0),
            SemiringValue::nat(0),
            true,
            false,
        )
    }

    pub fn arctic() -> Self {
        Self::simple(
            SemiringKind::Arctic,
            SemiringValue::Arctic(Arctic::NegInf),
            SemiringValue::arctic(0),
            SemiringValue::Arctic(Arctic::PosInf),
            true,
            false,
        )
    }

    pub fn boolean() -> Self {
        Self::simple(
            SemiringKind::Boolean,
            SemiringValue::Bool(false),
            SemiringValue::Bool(true),
            SemiringValue::Bool(true),
            true,
            true,
        )
    }

    pub fn confidence() -> Self {
        Self::simple(
            SemiringKind::Confidence,
            SemiringValue::Conf(rat(0)),
            SemiringValue::Conf(rat(1)),
            SemiringValue::Conf(rat(1)),
            true,
            false,
        )
    }

    pub fn bottleneck() -> Self {
        Self::simple(
            SemiringKind::Bottleneck,
            SemiringValue::Bottle(Bottle::NegInf),
            SemiringValue::Bottle(Bottle::PosInf),
            SemiringValue::Bottle(Bottle::PosInf),
            true,
            true,
        )
    }

    /// Finite-language semiring over `alphabet`. Symbols must be non-empty,
    /// pairwise prefix-free, and free of the literal delimiters `{},()`.
    pub fn language<S: Into<String>>(alphabet: impl IntoIterator<Item = S>) -> Result<Self, SemiringError> {
        let alphabet: Vec<String> = alphabet.into_iter().map(Into::into).collect();
        if alphabet.is_empty() || alphabet.len() > u8::MAX as usize {
            return Err(SemiringError::InvalidAlphabet(
                "alphabet must have between 1 and 255 symbols".into(),
            ));
        }
        for (i, s) in alphabet.iter().enumerate() {
            if s.is_empty() || s == "eps" || s.contains(['{', '}', ',', '(', ')', ' ']) {
                return Err(SemiringError::InvalidAlphabet(format!("bad symbol `{s}`")));
            }
            for (j, t) in alphabet.iter().enumerate() {
                if i != j && t.starts_with(s.as_str()) {
                    return Err(SemiringError::InvalidAlphabet(format!(
                        "symbol `{s}` is a prefix of `{t}`"
                    )));
                }
            }
        }
        let mut desc = Self::simple(
            SemiringKind::Language,
            SemiringValue::Lang(Language::empty()),
            SemiringValue::Lang(Language::epsilon()),
            SemiringValue::Lang(Language::Top),
            false,
            false,
        );
        desc.alphabet = alphabet;
        Ok(desc)
    }

    /// Cartesian product of complete-lattice semirings, with pointwise
    /// operations. Products never claim the extremal property.
    pub fn product(components: Vec<SemiringDescriptor>) -> Result<Self, SemiringError> {
        if components.is_empty() {
            return Err(SemiringError::EmptyProduct);
        }
        let single = components.len() == 1;
        let flags = SemiringFlags {
            plus_is_selective: single && components[0].flags.plus_is_selective,
            times_is_selective: single && components[0].flags.times_is_selective,
            has_extremal_property: false,
            order_is_reversed_usual: false,
        };
        Ok(SemiringDescriptor {
            kind: SemiringKind::Product,
            alphabet: Vec::new(),
            zero: SemiringValue::Tuple(components.iter().map(|c| c.zero.clone()).collect()),
            one: SemiringValue::Tuple(components.iter().map(|c| c.one.clone()).collect()),
            top: SemiringValue::Tuple(components.iter().map(|c| c.top.clone()).collect()),
            components,
            flags,
        })
    }

    pub fn kind(&self) -> SemiringKind {
        self.kind
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn components(&self) -> &[SemiringDescriptor] {
        &self.components
    }

    pub fn zero(&self) -> &SemiringValue {
        &self.zero
    }

    pub fn one(&self) -> &SemiringValue {
        &self.one
    }

    pub fn top(&self) -> &SemiringValue {
        &self.top
    }

    pub fn flags(&self) -> SemiringFlags {
        self.flags
    }

    pub fn is_top(&self, v: &SemiringValue) -> bool {
        *v == self.top
    }

    pub fn is_zero(&self, v: &SemiringValue) -> bool {
        *v == self.zero
    }

    /// Checks that `v` belongs to this descriptor's carrier.
    pub fn validate(&self, v: &SemiringValue) -> Result<(), SemiringError> {
        use SemiringKind as K;
        use SemiringValue as V;
        let ok = match (self.kind, v) {
            (K::NatInf | K::Tropical, V::Nat(_)) => true,
            (K::RealInf, V::Real(x)) => match x {
                ExtReal::Fin(q) => !q.is_negative_rational(),
                ExtReal::Inf => true,
            },
            (K::Arctic, V::Arctic(_)) | (K::Boolean, V::Bool(_)) | (K::Bottleneck, V::Bottle(_)) => true,
            (K::Confidence, V::Conf(q)) => !q.is_negative_rational() && *q <= BigRational::one(),
            (K::Language, V::Lang(l)) => match l {
                Language::Top => true,
                Language::Words(ws) => ws
                    .iter()
                    .all(|w| w.0.iter().all(|&s| (s as usize) < self.alphabet.len())),
            },
            (K::Product, V::Tuple(items)) => {
                if items.len() != self.components.len() {
                    return Err(SemiringError::Arity {
                        expected: self.components.len(),
                        found: items.len(),
                    });
                }
                for (c, x) in self.components.iter().zip(items) {
                    c.validate(x)?;
                }
                true
            }
            _ => {
                return Err(SemiringError::CarrierMismatch {
                    expected: self.carrier_name(),
                    found: v.carrier_name().to_string(),
                })
            }
        };
        if ok {
            Ok(())
        } else {
            Err(SemiringError::InvalidValue(format!(
                "{v:?} is outside the {} carrier",
                self.kind.name()
            )))
        }
    }

    fn carrier_name(&self) -> String {
        match self.kind {
            SemiringKind::NatInf | SemiringKind::Tropical => "extended-natural".into(),
            SemiringKind::RealInf => "extended-real".into(),
            SemiringKind::Arctic => "arctic".into(),
            SemiringKind::Boolean => "boolean".into(),
            SemiringKind::Confidence => "confidence".into(),
            SemiringKind::Bottleneck => "bottleneck".into(),
            SemiringKind::Language => "language".into(),
            SemiringKind::Product => format!("tuple/{}", self.components.len()),
        }
    }

    fn mismatch(&self, a: &SemiringValue, b: &SemiringValue) -> SemiringError {
        let found = if a.carrier_name() == b.carrier_name() {
            a.carrier_name().to_string()
        } else {
            format!("{} and {}", a.carrier_name(), b.carrier_name())
        };
        SemiringError::CarrierMismatch {
            expected: self.carrier_name(),
            found,
        }
    }

    fn pointwise<F>(&self, a: &[SemiringValue], b: &[SemiringValue], op: F) -> Result<SemiringValue, SemiringError>
    where
        F: Fn(&SemiringDescriptor, &SemiringValue, &SemiringValue) -> Result<SemiringValue, SemiringError>,
    {
        let n = self.components.len();
        if a.len() != n || b.len() != n {
            return Err(SemiringError::Arity {
                expected: n,
                found: if a.len() != n { a.len() } else { b.len() },
            });
        }
        self.components
            .iter()
            .zip(a.iter().zip(b))
            .map(|(c, (x, y))| op(c, x, y))
            .collect::<Result<Vec<_>, _>>()
            .map(SemiringValue::Tuple)
    }

    /// `a ⊕ b`.
    pub fn plus(&self, a: &SemiringValue, b: &SemiringValue) -> Result<SemiringValue, SemiringError> {
        use SemiringKind as K;
        use SemiringValue as V;
        Ok(match (self.kind, a, b) {
            (K::NatInf, V::Nat(x), V::Nat(y)) => V::Nat(match (x, y) {
                (ExtNat::Fin(x), ExtNat::Fin(y)) => ExtNat::Fin(x.checked_add(*y).ok_or(SemiringError::Overflow)?),
                _ => ExtNat::Inf,
            }),
            (K::Tropical, V::Nat(x), V::Nat(y)) => V::Nat(*x.min(y)),
            (K::RealInf, V::Real(x), V::Real(y)) => V::Real(match (x, y) {
                (ExtReal::Fin(x), ExtReal::Fin(y)) => ExtReal::Fin(x + y),
                _ => ExtReal::Inf,
            }),
            (K::Arctic, V::Arctic(x), V::Arctic(y)) => V::Arctic(*x.max(y)),
            (K::Boolean, V::Bool(x), V::Bool(y)) => V::Bool(*x || *y),
            (K::Confidence, V::Conf(x), V::Conf(y)) => V::Conf(x.max(y).clone()),
            (K::Bottleneck, V::Bottle(x), V::Bottle(y)) => V::Bottle(x.max(y).clone()),
            (K::Language, V::Lang(x), V::Lang(y)) => V::Lang(match (x, y) {
                (Language::Words(x), Language::Words(y)) => Language::Words(x.union(y).cloned().collect()),
                _ => Language::Top,
            }),
            (K::Product, V::Tuple(x), V::Tuple(y)) => return self.pointwise(x, y, |c, p, q| c.plus(p, q)),
            _ => return Err(self.mismatch(a, b)),
        })
    }

    /// `a ⊙ b`.
    pub fn times(&self, a: &SemiringValue, b: &SemiringValue) -> Result<SemiringValue, SemiringError> {
        use SemiringKind as K;
        use SemiringValue as V;
        Ok(match (self.kind, a, b) {
            (K::NatInf, V::Nat(x), V::Nat(y)) => V::Nat(match (x, y) {
                _ if x.is_zero() || y.is_zero() => ExtNat::Fin(0),
                (ExtNat::Fin(x), ExtNat::Fin(y)) => ExtNat::Fin(x.checked_mul(*y).ok_or(SemiringError::Overflow)?),
                _ => ExtNat::Inf,
            }),
            (K::Tropical, V::Nat(x), V::Nat(y)) => V::Nat(match (x, y) {
                (ExtNat::Fin(x), ExtNat::Fin(y)) => ExtNat::Fin(x.checked_add(*y).ok_or(SemiringError::Overflow)?),
                _ => ExtNat::Inf,
            }),
            (K::RealInf, V::Real(x), V::Real(y)) => V::Real(match (x, y) {
                (ExtReal::Fin(p), _) if p.is_zero() => ExtReal::Fin(rat(0)),
                (_, ExtReal::Fin(q)) if q.is_zero() => ExtReal::Fin(rat(0)),
                (ExtReal::Fin(p), ExtReal::Fin(q)) => ExtReal::Fin(p * q),
                _ => ExtReal::Inf,
            }),
            (K::Arctic, V::Arctic(x), V::Arctic(y)) => V::Arctic(match (x, y) {
                (Arctic::NegInf, _) | (_, Arctic::NegInf) => Arctic::NegInf,
                (Arctic::Fin(p), Arctic::Fin(q)) => Arctic::Fin(p.checked_add(*q).ok_or(SemiringError::Overflow)?),
                _ => Arctic::PosInf,
            }),
            (K::Boolean, V::Bool(x), V::Bool(y)) => V::Bool(*x && *y),
            (K::Confidence, V::Conf(x), V::Conf(y)) => V::Conf(x * y),
            (K::Bottleneck, V::Bottle(x), V::Bottle(y)) => V::Bottle(x.min(y).clone()),
            (K::Language, V::Lang(x), V::Lang(y)) => V::Lang(concat_languages(x, y)?),
            (K::Product, V::Tuple(x), V::Tuple(y)) => return self.pointwise(x, y, |c, p, q| c.times(p, q)),
            _ => return Err(self.mismatch(a, b)),
        })
    }

    /// Decides the natural order `a ⪯ b`.
    pub fn leq(&self, a: &SemiringValue, b: &SemiringValue) -> Result<bool, SemiringError> {
        use SemiringKind as K;
        use SemiringValue as V;
        Ok(match (self.kind, a, b) {
            (K::NatInf, V::Nat(x), V::Nat(y)) => x <= y,
            (K::Tropical, V::Nat(x), V::Nat(y)) => x >= y,
            (K::RealInf, V::Real(x), V::Real(y)) => x <= y,
            (K::Arctic, V::Arctic(x), V::Arctic(y)) => x <= y,
            (K::Boolean, V::Bool(x), V::Bool(y)) => x <= y,
            (K::Confidence, V::Conf(x), V::Conf(y)) => x <= y,
            (K::Bottleneck, V::Bottle(x), V::Bottle(y)) => x <= y,
            (K::Language, V::Lang(x), V::Lang(y)) => match (x, y) {
                (_, Language::Top) => true,
                (Language::Top, Language::Words(_)) => false,
                (Language::Words(x), Language::Words(y)) => x.is_subset(y),
            },
            (K::Product, V::Tuple(x), V::Tuple(y)) => {
                if x.len() != self.components.len() || y.len() != self.components.len() {
                    return Err(self.mismatch(a, b));
                }
                for (c, (p, q)) in self.components.iter().zip(x.iter().zip(y)) {
                    if !c.leq(p, q)? {
                        return Ok(false);
                    }
                }
                true
            }
            _ => return Err(self.mismatch(a, b)),
        })
    }

    /// Least upper bound of two elements.
    pub fn lub(&self, a: &SemiringValue, b: &SemiringValue) -> Result<SemiringValue, SemiringError> {
        match (self.kind, a, b) {
            (SemiringKind::NatInf, SemiringValue::Nat(x), SemiringValue::Nat(y)) => Ok(SemiringValue::Nat(*x.max(y))),
            (SemiringKind::RealInf, SemiringValue::Real(x), SemiringValue::Real(y)) => {
                Ok(SemiringValue::Real(x.max(y).clone()))
            }
            (SemiringKind::Product, SemiringValue::Tuple(x), SemiringValue::Tuple(y)) => {
                self.pointwise(x, y, |c, p, q| c.lub(p, q))
            }
            // every other built-in has idempotent ⊕, which is the join
            _ => self.plus(a, b),
        }
    }

    /// `⊔` of a finite non-empty collection.
    pub fn join<'a, I>(&self, values: I) -> Result<SemiringValue, SemiringError>
    where
        I: IntoIterator<Item = &'a SemiringValue>,
    {
        let mut it = values.into_iter();
        let first = it.next().ok_or(SemiringError::EmptyJoin)?;
        self.validate(first)?;
        it.try_fold(first.clone(), |acc, v| self.lub(&acc, v))
    }

    /// `⊕_{i=1}^∞ t` in closed form.
    pub fn omega_sum(&self, t: &SemiringValue) -> Result<SemiringValue, SemiringError> {
        self.validate(t)?;
        match (self.kind, t) {
            (SemiringKind::NatInf | SemiringKind::RealInf, _) => {
                Ok(if self.is_zero(t) { t.clone() } else { self.top.clone() })
            }
            (SemiringKind::Product, SemiringValue::Tuple(items)) => self
                .components
                .iter()
                .zip(items)
                .map(|(c, x)| c.omega_sum(x))
                .collect::<Result<Vec<_>, _>>()
                .map(SemiringValue::Tuple),
            _ => Ok(t.clone()),
        }
    }

    /// Partial sum of at most `budget` leading stream elements. The flag is
    /// true when the prefix is known to equal the full sum: the stream ended
    /// within the budget, or the partial sum already reached `⊤`.
    pub fn sum_stream<I>(&self, stream: I, budget: usize) -> Result<(SemiringValue, bool), SemiringError>
    where
        I: IntoIterator<Item = SemiringValue>,
    {
        let mut acc = self.zero.clone();
        let mut it = stream.into_iter();
        for _ in 0..budget {
            match it.next() {
                Some(v) => {
                    acc = self.plus(&acc, &v)?;
                    if self.is_top(&acc) {
                        return Ok((acc, true));
                    }
                }
                None => return Ok((acc, true)),
            }
        }
        let exhausted = it.next().is_none();
        Ok((acc, exhausted))
    }

    /// Finite sum `⊕` over a slice, `𝟎` when empty.
    pub fn sum<'a, I>(&self, values: I) -> Result<SemiringValue, SemiringError>
    where
        I: IntoIterator<Item = &'a SemiringValue>,
    {
        values
            .into_iter()
            .try_fold(self.zero.clone(), |acc, v| self.plus(&acc, v))
    }

    /// Finite product `⊙` over a slice, `𝟏` when empty.
    pub fn product_of<'a, I>(&self, values: I) -> Result<SemiringValue, SemiringError>
    where
        I: IntoIterator<Item = &'a SemiringValue>,
    {
        values
            .into_iter()
            .try_fold(self.one.clone(), |acc, v| self.times(&acc, v))
    }

    /// Renders `v` in the value literal syntax.
    pub fn format(&self, v: &SemiringValue) -> String {
        super::literal::format_value(self, v)
    }

    /// Parses a value literal for this carrier.
    pub fn parse_value(&self, text: &str) -> Result<SemiringValue, SemiringError> {
        super::literal::parse_value(self, text)
    }

    /// A displayable view of `v`.
    pub fn display<'a>(&'a self, v: &'a SemiringValue) -> DisplayValue<'a> {
        DisplayValue { desc: self, value: v }
    }

    /// Whether `⊕` and `⊙` commute (needed for polynomial normal forms).
    pub fn is_commutative(&self) -> bool {
        match self.kind {
            SemiringKind::Language => false,
            SemiringKind::Product => self.components.iter().all(|c| c.is_commutative()),
            _ => true,
        }
    }
}

trait NegativeCheck {
    fn is_negative_rational(&self) -> bool;
}

impl NegativeCheck for BigRational {
    fn is_negative_rational(&self) -> bool {
        *self < BigRational::zero()
    }
}

fn concat_languages(x: &Language, y: &Language) -> Result<Language, SemiringError> {
    if x.is_empty() || y.is_empty() {
        return Ok(Language::empty());
    }
    match (x, y) {
        (Language::Words(x), Language::Words(y)) => {
            let mut out = BTreeSet::new();
            for u in x {
                for v in y {
                    out.insert(u.concat(v));
                }
            }
            Ok(Language::Words(out))
        }
        // Σ*·L ⊇ Σ*·{ε} = Σ* whenever L ∋ ε; otherwise the result is an
        // infinite proper language, which this carrier cannot hold.
        (Language::Top, other) | (other, Language::Top) => {
            if other.contains_epsilon() {
                Ok(Language::Top)
            } else {
                Err(SemiringError::Unrepresentable(
                    "product of SIGMA* with an ε-free language".into(),
                ))
            }
        }
    }
}

/// Helper returned by [`SemiringDescriptor::display`].
pub struct DisplayValue<'a> {
    desc: &'a SemiringDescriptor,
    value: &'a SemiringValue,
}

impl fmt::Display for DisplayValue<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.desc.format(self.value))
    }
}

impl Word {
    /// Renders the word with the symbols of `alphabet`; `eps` for `ε`.
    pub fn render(&self, alphabet: &[String]) -> String {
        if self.0.is_empty() {
            return "eps".into();
        }
        self.0.iter().map(|&s| alphabet[s as usize].as_str()).collect()
    }
}
