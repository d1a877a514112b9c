use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::descriptor::{SemiringDescriptor, SemiringKind};
use super::value::{Arctic, Bottle, ExtNat, ExtReal, Language, SemiringValue, Word};
use super::SemiringError;

fn bad(desc: &SemiringDescriptor, text: &str) -> SemiringError {
    SemiringError::UnknownLiteral {
        literal: text.to_string(),
        semiring: desc.kind().name().to_string(),
    }
}

/// Parses `p/q`, a signed integer or a decimal such as `0.125`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{int_digits}{frac}");
        let num: BigInt = if digits.is_empty() {
            return None;
        } else {
            digits.parse().ok()?
        };
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let q = BigRational::new(num, den);
        return Some(if negative { -q } else { q });
    }
    let n: BigInt = text.parse().ok()?;
    Some(BigRational::from_integer(n))
}

fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.to_integer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Splits `inner` at commas that are not nested inside `()` or `{}`.
pub(crate) fn split_top_level(inner: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in inner.char_indices() {
        match c {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&inner[start..]);
    parts
}

fn parse_word(desc: &SemiringDescriptor, text: &str) -> Option<Word> {
    if text == "eps" {
        return Some(Word::empty());
    }
    let mut rest = text;
    let mut out = Vec::new();
    while !rest.is_empty() {
        let (idx, sym) = desc
            .alphabet()
            .iter()
            .enumerate()
            .find(|(_, s)| rest.starts_with(s.as_str()))?;
        out.push(idx as u8);
        rest = &rest[sym.len()..];
    }
    if out.is_empty() {
        None
    } else {
        Some(Word(out))
    }
}

pub(super) fn parse_value(desc: &SemiringDescriptor, text: &str) -> Result<SemiringValue, SemiringError> {
    let t = text.trim();
    let value = match desc.kind() {
        SemiringKind::NatInf | SemiringKind::Tropical => match t {
            "inf" => SemiringValue::Nat(ExtNat::Inf),
            _ => SemiringValue::Nat(ExtNat::Fin(t.parse().map_err(|_| bad(desc, t))?)),
        },
        SemiringKind::RealInf => match t {
            "inf" => SemiringValue::Real(ExtReal::Inf),
            _ => SemiringValue::Real(ExtReal::Fin(parse_rational(t).ok_or_else(|| bad(desc, t))?)),
        },
        SemiringKind::Arctic => match t {
            "inf" => SemiringValue::Arctic(Arctic::PosInf),
            "-inf" => SemiringValue::Arctic(Arctic::NegInf),
            _ => SemiringValue::Arctic(Arctic::Fin(t.parse().map_err(|_| bad(desc, t))?)),
        },
        SemiringKind::Boolean => match t {
            "true" => SemiringValue::Bool(true),
            "false" => SemiringValue::Bool(false),
            _ => return Err(bad(desc, t)),
        },
        SemiringKind::Confidence => SemiringValue::Conf(parse_rational(t).ok_or_else(|| bad(desc, t))?),
        SemiringKind::Bottleneck => match t {
            "inf" => SemiringValue::Bottle(Bottle::PosInf),
            "-inf" => SemiringValue::Bottle(Bottle::NegInf),
            _ => SemiringValue::Bottle(Bottle::Fin(parse_rational(t).ok_or_else(|| bad(desc, t))?)),
        },
        SemiringKind::Language => {
            if t == "SIGMA*" {
                SemiringValue::Lang(Language::Top)
            } else {
                let inner = t
                    .strip_prefix('{')
                    .and_then(|s| s.strip_suffix('}'))
                    .ok_or_else(|| bad(desc, t))?;
                let mut words = BTreeSet::new();
                if !inner.trim().is_empty() {
                    for w in inner.split(',') {
                        words.insert(parse_word(desc, w.trim()).ok_or_else(|| bad(desc, t))?);
                    }
                }
                SemiringValue::Lang(Language::Words(words))
            }
        }
        SemiringKind::Product => {
            let inner = t
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| bad(desc, t))?;
            let parts = split_top_level(inner);
            if parts.len() != desc.components().len() {
                return Err(SemiringError::Arity {
                    expected: desc.components().len(),
                    found: parts.len(),
                });
            }
            SemiringValue::Tuple(
                desc.components()
                    .iter()
                    .zip(parts)
                    .map(|(c, p)| c.parse_value(p))
                    .collect::<Result<_, _>>()?,
            )
        }
    };
    desc.validate(&value)?;
    Ok(value)
}

pub(super) fn format_value(desc: &SemiringDescriptor, v: &SemiringValue) -> String {
    match v {
        SemiringValue::Nat(ExtNat::Fin(n)) => n.to_string(),
        SemiringValue::Nat(ExtNat::Inf) => "inf".into(),
        SemiringValue::Real(ExtReal::Fin(q)) => format_rational(q),
        SemiringValue::Real(ExtReal::Inf) => "inf".into(),
        SemiringValue::Arctic(Arctic::NegInf) | SemiringValue::Bottle(Bottle::NegInf) => "-inf".into(),
        SemiringValue::Arctic(Arctic::PosInf) | SemiringValue::Bottle(Bottle::PosInf) => "inf".into(),
        SemiringValue::Arctic(Arctic::Fin(n)) => n.to_string(),
        SemiringValue::Bool(b) => b.to_string(),
        SemiringValue::Conf(q) | SemiringValue::Bottle(Bottle::Fin(q)) => format_rational(q),
        SemiringValue::Lang(Language::Top) => "SIGMA*".into(),
        SemiringValue::Lang(Language::Words(ws)) => {
            let items: Vec<String> = ws.iter().map(|w| w.render(desc.alphabet())).collect();
            format!("{{{}}}", items.join(","))
        }
        SemiringValue::Tuple(items) => {
            let parts: Vec<String> = if desc.components().len() == items.len() {
                desc.components().iter().zip(items).map(|(c, x)| c.format(x)).collect()
            } else {
                items.iter().map(|x| format!("{x:?}")).collect()
            };
            format!("({})", parts.join(","))
        }
    }
}

/// Reads a finite rational out of an `ℝ∞`, confidence or bottleneck value.
pub fn as_rational(v: &SemiringValue) -> Option<&BigRational> {
    match v {
        SemiringValue::Real(ExtReal::Fin(q)) | SemiringValue::Conf(q) | SemiringValue::Bottle(Bottle::Fin(q)) => {
            Some(q)
        }
        _ => None,
    }
}

/// True when a rational read from a value is at least `p/q`.
pub fn rational_at_least(v: &SemiringValue, p: i64, q: i64) -> bool {
    let bound = BigRational::new(p.into(), q.into());
    match v {
        SemiringValue::Real(ExtReal::Inf) | SemiringValue::Bottle(Bottle::PosInf) => true,
        _ => as_rational(v).is_some_and(|x| *x >= bound),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!(parse_rational("4/9"), Some(BigRational::new(4.into(), 9.into())));
        assert_eq!(parse_rational("0.125"), Some(BigRational::new(1.into(), 8.into())));
        assert_eq!(parse_rational("-2.5"), Some(BigRational::new((-5).into(), 2.into())));
        assert_eq!(parse_rational("3"), Some(BigRational::from_integer(3.into())));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn literals_round_trip() {
        let cases: Vec<(SemiringDescriptor, &[&str])> = vec![
            (SemiringDescriptor::nat_inf(), &["0", "17", "inf"]),
            (SemiringDescriptor::tropical(), &["3", "inf"]),
            (SemiringDescriptor::real_inf(), &["4/9", "2", "inf"]),
            (SemiringDescriptor::arctic(), &["-inf", "12", "inf"]),
            (SemiringDescriptor::boolean(), &["true", "false"]),
            (SemiringDescriptor::confidence(), &["1/2", "1", "0"]),
            (SemiringDescriptor::bottleneck(), &["-inf", "-3/2", "inf"]),
            (
                SemiringDescriptor::language(["0", "1"]).unwrap(),
                &["{}", "{eps,0,10}", "SIGMA*"],
            ),
            (
                SemiringDescriptor::product(vec![SemiringDescriptor::nat_inf(), SemiringDescriptor::boolean()])
                    .unwrap(),
                &["(inf,false)", "(3,true)"],
            ),
        ];
        for (desc, lits) in cases {
            for lit in lits {
                let v = desc.parse_value(lit).unwrap();
                assert_eq!(desc.format(&v), *lit);
            }
        }
    }

    #[test]
    fn language_words_tokenize_multi_char_symbols() {
        let d = SemiringDescriptor::language(["P1", "P2"]).unwrap();
        let v = d.parse_value("{P1P2,P2}").unwrap();
        assert_eq!(d.format(&v), "{P2,P1P2}");
        assert!(d.parse_value("{P3}").is_err());
    }

    #[test]
    fn unknown_literal_names_semiring() {
        let err = SemiringDescriptor::boolean().parse_value("maybe").unwrap_err();
        assert!(err.to_string().contains("boolean"));
        assert!(SemiringDescriptor::confidence().parse_value("3/2").is_err());
    }
}
