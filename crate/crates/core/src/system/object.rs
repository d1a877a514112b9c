use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

/// Identifies one object of a system.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObjectId {
    /// An object of an explicit system.
    Label(String),
    /// A walk position.
    Nat(u64),
    /// A position on the integer line.
    Int(i64),
    /// An operating-system state with its waiting queue (`0` = P1, `1` = P2).
    Os {
        mode: OsMode,
        queue: Vec<u8>,
    },
    Term(Term),
    Formula(Formula),
    Ski(SkiConfig),
}

impl Serialize for ObjectId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OsMode {
    Idle,
    Wait,
    Run,
}

impl OsMode {
    pub fn name(self) -> &'static str {
        match self {
            OsMode::Idle => "idle",
            OsMode::Wait => "wait",
            OsMode::Run => "run",
        }
    }
}

/// Ground terms over `0`, `s/1` and `plus/2`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Zero,
    S(Arc<Term>),
    Plus(Arc<Term>, Arc<Term>),
}

impl Term {
    pub fn numeral(n: u64) -> Term {
        (0..n).fold(Term::Zero, |t, _| Term::S(Arc::new(t)))
    }

    pub fn plus(a: Term, b: Term) -> Term {
        Term::Plus(Arc::new(a), Arc::new(b))
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Zero => 1,
            Term::S(t) => 1 + t.size(),
            Term::Plus(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn contains_plus(&self) -> bool {
        match self {
            Term::Zero => false,
            Term::S(t) => t.contains_plus(),
            Term::Plus(..) => true,
        }
    }

    /// The integer a term denotes, reading `plus` as addition.
    pub fn value(&self) -> u64 {
        match self {
            Term::Zero => 0,
            Term::S(t) => 1 + t.value(),
            Term::Plus(a, b) => a.value() + b.value(),
        }
    }

    pub fn parse(text: &str) -> Option<Term> {
        let text = text.trim();
        if text == "0" {
            return Some(Term::Zero);
        }
        if let Some(inner) = text.strip_prefix("s(").and_then(|r| r.strip_suffix(')')) {
            return Term::parse(inner).map(|t| Term::S(Arc::new(t)));
        }
        if let Some(inner) = text.strip_prefix("plus(").and_then(|r| r.strip_suffix(')')) {
            let parts = crate::semiring::split_top_level(inner);
            if parts.len() == 2 {
                return Some(Term::plus(Term::parse(parts[0])?, Term::parse(parts[1])?));
            }
        }
        None
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Zero => f.write_str("0"),
            Term::S(t) => write!(f, "s({t})"),
            Term::Plus(a, b) => write!(f, "plus({a},{b})"),
        }
    }
}

/// Negation-free propositional formulas over named atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(String),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    /// Parses `&` (binding tighter) and `|` over alphanumeric atoms, with
    /// parentheses; both operators associate to the left.
    pub fn parse(text: &str) -> Option<Formula> {
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let f = parse_or(&chars, &mut pos)?;
        (pos == chars.len()).then_some(f)
    }

    /// All subformulas, the formula itself first, in pre-order.
    pub fn subformulas(&self) -> Vec<Formula> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<Formula>) {
        if !out.contains(self) {
            out.push(self.clone());
        }
        if let Formula::And(a, b) | Formula::Or(a, b) = self {
            a.collect(out);
            b.collect(out);
        }
    }
}

fn parse_or(c: &[char], pos: &mut usize) -> Option<Formula> {
    let mut f = parse_and(c, pos)?;
    while c.get(*pos) == Some(&'|') {
        *pos += 1;
        f = Formula::or(f, parse_and(c, pos)?);
    }
    Some(f)
}

fn parse_and(c: &[char], pos: &mut usize) -> Option<Formula> {
    let mut f = parse_atom(c, pos)?;
    while c.get(*pos) == Some(&'&') {
        *pos += 1;
        f = Formula::and(f, parse_atom(c, pos)?);
    }
    Some(f)
}

fn parse_atom(c: &[char], pos: &mut usize) -> Option<Formula> {
    if c.get(*pos) == Some(&'(') {
        *pos += 1;
        let f = parse_or(c, pos)?;
        if c.get(*pos) != Some(&')') {
            return None;
        }
        *pos += 1;
        return Some(f);
    }
    let start = *pos;
    while c.get(*pos).is_some_and(|ch| ch.is_alphanumeric() || *ch == '_') {
        *pos += 1;
    }
    (*pos > start).then(|| Formula::Atom(c[start..*pos].iter().collect()))
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn side(x: &Formula, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match x {
                Formula::Atom(_) => write!(f, "{x}"),
                _ => write!(f, "({x})"),
            }
        }
        match self {
            Formula::Atom(a) => f.write_str(a),
            Formula::And(a, b) => {
                side(a, f)?;
                f.write_str("&")?;
                side(b, f)
            }
            Formula::Or(a, b) => {
                side(a, f)?;
                f.write_str("|")?;
                side(b, f)
            }
        }
    }
}

/// Statements of the small weighted guarded-command language over the
/// single variable `n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SkiStmt {
    /// `⊙ w`
    Weight(u64),
    /// `n := n - 1` (truncated at zero)
    Decrement,
    /// `n := c`
    Assign(u64),
    Seq(Arc<SkiStmt>, Arc<SkiStmt>),
    /// `{ left } ⊕ { right }`
    Choice(Arc<SkiStmt>, Arc<SkiStmt>),
    /// `while (n > 0) { body }`
    While(Arc<SkiStmt>),
}

impl fmt::Display for SkiStmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkiStmt::Weight(w) => write!(f, "weight {w}"),
            SkiStmt::Decrement => f.write_str("n:=n-1"),
            SkiStmt::Assign(c) => write!(f, "n:={c}"),
            SkiStmt::Seq(a, b) => write!(f, "{a}; {b}"),
            SkiStmt::Choice(a, b) => write!(f, "{{{a}}} + {{{b}}}"),
            SkiStmt::While(body) => write!(f, "while(n>0){{{body}}}"),
        }
    }
}

/// A program configuration: remaining program (`None` once terminated)
/// and the value of `n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SkiConfig {
    pub program: Option<Arc<SkiStmt>>,
    pub n: u64,
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectId::Label(s) => f.write_str(s),
            ObjectId::Nat(n) => write!(f, "{n}"),
            ObjectId::Int(n) => write!(f, "{n}"),
            ObjectId::Os { mode, queue } => {
                write!(f, "{}(", mode.name())?;
                for &p in queue {
                    write!(f, "P{}", p + 1)?;
                }
                f.write_str(")")
            }
            ObjectId::Term(t) => write!(f, "{t}"),
            ObjectId::Formula(x) => write!(f, "{x}"),
            ObjectId::Ski(c) => match &c.program {
                None => write!(f, "<done | n={}>", c.n),
                Some(p) => write!(f, "<{p} | n={}>", c.n),
            },
        }
    }
}

impl ObjectId {
    pub fn label(s: impl Into<String>) -> Self {
        ObjectId::Label(s.into())
    }

    pub fn os(mode: OsMode, queue: &[u8]) -> Self {
        ObjectId::Os {
            mode,
            queue: queue.to_vec(),
        }
    }

    /// Parses `idle()`, `wait(P1P2)` or `run(P2)`.
    pub fn parse_os(text: &str) -> Option<ObjectId> {
        let text = text.trim();
        let (mode, rest) = [OsMode::Idle, OsMode::Wait, OsMode::Run]
            .into_iter()
            .find_map(|m| text.strip_prefix(m.name()).map(|r| (m, r)))?;
        let mut inner = rest.strip_prefix('(')?.strip_suffix(')')?;
        if inner == "eps" {
            inner = "";
        }
        let mut queue = Vec::new();
        while !inner.is_empty() {
            inner = if let Some(r) = inner.strip_prefix("P1") {
                queue.push(0);
                r
            } else {
                let r = inner.strip_prefix("P2")?;
                queue.push(1);
                r
            };
        }
        Some(ObjectId::Os { mode, queue })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn os_syntax_round_trips() {
        for s in ["idle()", "wait(P1P2)", "run(P2)"] {
            assert_eq!(ObjectId::parse_os(s).unwrap().to_string(), s);
        }
        assert_eq!(ObjectId::parse_os("idle(eps)").unwrap().to_string(), "idle()");
        assert!(ObjectId::parse_os("idle(P3)").is_none());
    }

    #[test]
    fn term_syntax_and_size() {
        let t = Term::parse("plus(s(s(0)),s(0))").unwrap();
        assert_eq!(t.size(), 6);
        assert_eq!(t.value(), 3);
        assert_eq!(t.to_string(), "plus(s(s(0)),s(0))");
        assert_eq!(Term::plus(Term::numeral(6), Term::numeral(6)).size(), 15);
    }

    #[test]
    fn formula_syntax() {
        let f = Formula::parse("Ra & (Pab | Pbb)").unwrap();
        assert_eq!(f.to_string(), "Ra&(Pab|Pbb)");
        assert_eq!(f.subformulas().len(), 5);
        assert!(Formula::parse("Ra &").is_none());
    }
}
