use crate::semiring::{SemiringDescriptor, SemiringKind};

use super::AggregatorExpr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("aggregator syntax error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    desc: &'a SemiringDescriptor,
}

/// Parses the textual aggregator grammar
///
/// ```text
/// expr   := term ('+' term)*
/// term   := factor ('*' factor)*
/// factor := literal | 'v'INT | 'X' | '(' expr ')'
/// ```
///
/// Literals follow the value syntax of `desc`. A parenthesised group that
/// parses as a tuple literal of a product semiring is read as a constant.
pub fn parse(text: &str, desc: &SemiringDescriptor) -> Result<AggregatorExpr, ParseError> {
    let mut p = Parser {
        src: text,
        pos: 0,
        desc,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<AggregatorExpr, ParseError> {
        let mut items = vec![self.term()?];
        while self.eat('+') {
            items.push(self.term()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            AggregatorExpr::Sum(items)
        })
    }

    fn term(&mut self) -> Result<AggregatorExpr, ParseError> {
        let mut items = vec![self.factor()?];
        while self.eat('*') {
            items.push(self.factor()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            AggregatorExpr::Prod(items)
        })
    }

    fn factor(&mut self) -> Result<AggregatorExpr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = self.rest();
        if rest.is_empty() {
            return Err(self.error("expected an operand"));
        }
        if rest.starts_with('(') {
            let close = matching_paren(rest).ok_or_else(|| self.error("unbalanced parenthesis"))?;
            let group = &rest[..=close];
            if self.desc.kind() == SemiringKind::Product {
                match self.desc.parse_value(group) {
                    Ok(v) => {
                        self.pos += group.len();
                        return Ok(AggregatorExpr::Const(v));
                    }
                    Err(e) if has_top_level_comma(&group[1..group.len() - 1]) => {
                        return Err(ParseError {
                            pos: start,
                            msg: e.to_string(),
                        });
                    }
                    Err(_) => {}
                }
            }
            self.pos += 1;
            let e = self.expr()?;
            if !self.eat(')') {
                return Err(self.error("expected `)`"));
            }
            return Ok(e);
        }
        if rest.starts_with("SIGMA*") {
            self.pos += "SIGMA*".len();
            return self.literal(start, "SIGMA*");
        }
        let len = token_len(rest);
        if len == 0 {
            return Err(self.error(format!("unexpected `{}`", rest.chars().next().unwrap())));
        }
        let tok = &rest[..len];
        self.pos += len;
        if tok == "X" {
            return Ok(AggregatorExpr::X);
        }
        if let Some(digits) = tok.strip_prefix('v') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                let i: usize = digits.parse().map_err(|_| ParseError {
                    pos: start,
                    msg: "variable index too large".into(),
                })?;
                if i == 0 {
                    return Err(ParseError {
                        pos: start,
                        msg: "variable indices start at v1".into(),
                    });
                }
                return Ok(AggregatorExpr::Var(i));
            }
        }
        self.literal(start, tok)
    }

    fn literal(&self, start: usize, tok: &str) -> Result<AggregatorExpr, ParseError> {
        self.desc
            .parse_value(tok)
            .map(AggregatorExpr::Const)
            .map_err(|e| ParseError {
                pos: start,
                msg: e.to_string(),
            })
    }
}

/// Length of a bare literal token; word sets `{…}` are read whole.
fn token_len(s: &str) -> usize {
    if s.starts_with('{') {
        return s.find('}').map_or(s.len(), |i| i + 1);
    }
    s.find(|c: char| c.is_whitespace() || "+*(),".contains(c))
        .unwrap_or(s.len())
}

fn matching_paren(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

fn has_top_level_comma(s: &str) -> bool {
    crate::semiring::split_top_level(s).len() > 1
}
