//! Text syntax for construction expressions.
//!
//! ```text
//! expr  := name | name "(" args ")"
//! cycle(n)  complete(n)  empty(n)  path(n)  kneser(n,k)  petersen  grotzsch
//! join(e, e, ..)  compose(host; e, e, ..)  lex(host, part)  mycielski(e)
//! random(n, p, seed=s)  gadget(n, D, seed=s, budget=b)
//! edges(n; u-v, u-v, ..)
//! ```
//!
//! `p` and `D` are rationals (`1/4`, `0.25`, `3`). Whitespace is ignored.

use std::fmt;

use fraclab_core::construct::{ConstructError, ConstructionExpr};
use fraclab_core::rational::{self, Rational};
use fraclab_core::Graph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownConstructor(String),
    Arity { host: usize, parts: usize },
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input.
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: ", self.offset)?;
        match &self.kind {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::UnknownConstructor(name) => write!(f, "unknown constructor `{name}`"),
            ParseErrorKind::Arity { host, parts } => {
                write!(f, "arity mismatch: host has {host} vertices but {parts} parts were given")
            }
            ParseErrorKind::Invalid(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for ParseError {}

pub fn parse_expression(text: &str) -> Result<ConstructionExpr, ParseError> {
    let mut p = Parser { text, pos: 0 };
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            offset: self.pos,
            kind: ParseErrorKind::Syntax(msg.into()),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.as_bytes().get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", c as char)))
        }
    }

    fn take_while(&mut self, f: impl Fn(u8) -> bool) -> &str {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.text.as_bytes();
        while self.pos < bytes.len() && f(bytes[self.pos]) {
            self.pos += 1;
        }
        &self.text[start..self.pos]
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        let word = self.take_while(|b| b.is_ascii_alphanumeric() || b == b'_');
        if word.is_empty() || word.as_bytes()[0].is_ascii_digit() {
            return Err(self.error("expected a constructor name"));
        }
        Ok(word.to_ascii_lowercase())
    }

    fn natural(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let digits = self.take_while(|b| b.is_ascii_digit());
        if digits.is_empty() {
            return Err(self.error("expected a natural number"));
        }
        digits.parse().map_err(|_| ParseError {
            offset: start,
            kind: ParseErrorKind::Syntax("number too large".into()),
        })
    }

    fn size(&mut self) -> Result<usize, ParseError> {
        let start = self.pos;
        let v = self.natural()?;
        usize::try_from(v).map_err(|_| ParseError {
            offset: start,
            kind: ParseErrorKind::Syntax("number too large".into()),
        })
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let lit = self.take_while(|b| b.is_ascii_digit() || b == b'/' || b == b'.');
        rational::parse_rational(lit).ok_or(ParseError {
            offset: start,
            kind: ParseErrorKind::Syntax(format!("expected a rational, found `{lit}`")),
        })
    }

    fn keyword_arg(&mut self, key: &str) -> Result<u64, ParseError> {
        self.skip_ws();
        let at = self.pos;
        let name = self.ident()?;
        if name != key {
            self.pos = at;
            return Err(self.error(format!("expected `{key}=`")));
        }
        self.expect(b'=')?;
        self.natural()
    }

    fn list(&mut self) -> Result<Vec<ConstructionExpr>, ParseError> {
        let mut items = vec![self.expr()?];
        while self.eat(b',') {
            items.push(self.expr()?);
        }
        Ok(items)
    }

    fn expr(&mut self) -> Result<ConstructionExpr, ParseError> {
        use ConstructionExpr as E;
        self.skip_ws();
        let start = self.pos;
        let name = self.ident()?;
        let nullary = |e: E| Ok(e);
        let has_args = self.eat(b'(');
        let expr = match (name.as_str(), has_args) {
            ("petersen", false) => return nullary(E::Kneser(5, 2)),
            ("grotzsch", false) => return nullary(E::Mycielski(Box::new(E::Cycle(5)))),
            ("petersen", true) => E::Kneser(5, 2),
            ("grotzsch", true) => E::Mycielski(Box::new(E::Cycle(5))),
            (
                "cycle" | "complete" | "empty" | "path" | "kneser" | "join" | "compose" | "lex"
                | "mycielski" | "random" | "gadget" | "edges",
                false,
            ) => return Err(self.error(format!("`{name}` needs arguments"))),
            ("cycle", true) => E::Cycle(self.size()?),
            ("complete", true) => E::Complete(self.size()?),
            ("empty", true) => E::Base(Graph::empty(self.size()?)),
            ("path", true) => E::Base(Graph::path(self.size()?)),
            ("kneser", true) => {
                let n = self.size()?;
                self.expect(b',')?;
                E::Kneser(n, self.size()?)
            }
            ("join", true) => E::Join(self.list()?),
            ("compose", true) => {
                let host = self.expr()?;
                self.expect(b';')?;
                let parts = self.list()?;
                E::Compose {
                    host: Box::new(host),
                    parts,
                }
            }
            ("lex", true) => {
                let host = self.expr()?;
                self.expect(b',')?;
                let part = self.expr()?;
                E::Lex {
                    host: Box::new(host),
                    part: Box::new(part),
                }
            }
            ("mycielski", true) => E::Mycielski(Box::new(self.expr()?)),
            ("random", true) => {
                let n = self.size()?;
                self.expect(b',')?;
                let p = self.rational()?;
                self.expect(b',')?;
                let seed = self.keyword_arg("seed")?;
                E::Random { n, p, seed }
            }
            ("gadget", true) => {
                let n = self.size()?;
                self.expect(b',')?;
                let d = self.rational()?;
                self.expect(b',')?;
                let seed = self.keyword_arg("seed")?;
                self.expect(b',')?;
                let budget = self.keyword_arg("budget")?;
                E::TriangleFreeGadget { n, d, seed, budget }
            }
            ("edges", true) => {
                let n = self.size()?;
                let mut edges = Vec::new();
                if self.eat(b';') {
                    loop {
                        self.skip_ws();
                        let at = self.pos;
                        let u = self.size()?;
                        self.expect(b'-')?;
                        let v = self.size()?;
                        if u >= n || v >= n || u == v {
                            self.pos = at;
                            return Err(ParseError {
                                offset: at,
                                kind: ParseErrorKind::Invalid(format!("edge {u}-{v} is not valid on {n} vertices")),
                            });
                        }
                        edges.push((u, v));
                        if !self.eat(b',') {
                            break;
                        }
                    }
                }
                E::Base(Graph::new(n, edges).expect("edges checked"))
            }
            _ => {
                return Err(ParseError {
                    offset: start,
                    kind: ParseErrorKind::UnknownConstructor(name),
                })
            }
        };
        self.expect(b')')?;
        expr.validate().map_err(|e| ParseError {
            offset: start,
            kind: match e {
                ConstructError::PartCount { host, parts } => ParseErrorKind::Arity { host, parts },
                other => ParseErrorKind::Invalid(other.to_string()),
            },
        })?;
        Ok(expr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ConstructionExpr as E;

    #[test]
    fn parses_examples() {
        assert_eq!(
            parse_expression("join(cycle(5),cycle(7))").unwrap(),
            E::Join(vec![E::Cycle(5), E::Cycle(7)])
        );
        let g = parse_expression("mycielski(mycielski(complete(2)))").unwrap().build().unwrap();
        assert_eq!((g.n(), g.edge_count()), (11, 20));
        let err = parse_expression("compose(cycle(3); complete(1), complete(1))").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Arity { host: 3, parts: 2 });
        assert_eq!(err.offset, 0);
    }

    #[test]
    fn parses_every_constructor() {
        for text in [
            "petersen",
            "petersen()",
            "grotzsch",
            "kneser(7, 3)",
            "empty(4)",
            "path(6)",
            "lex(cycle(5), complete(2))",
            "random(10, 1/4, seed=3)",
            "random(10, 0.25, seed=3)",
            "gadget(20, 2, seed=1, budget=100)",
            "edges(4; 0-1, 2-3)",
            "edges(3)",
            " compose ( cycle(3) ; complete(1), complete(2), petersen ) ",
        ] {
            let e = parse_expression(text).unwrap_or_else(|err| panic!("{text}: {err}"));
            e.build().unwrap();
        }
        assert_eq!(
            parse_expression("random(10, 0.25, seed=3)").unwrap(),
            parse_expression("random(10,1/4,seed=3)").unwrap()
        );
    }

    #[test]
    fn error_offsets() {
        let err = parse_expression("join(cycle(5), wheel(4))").unwrap_err();
        assert_eq!(err.offset, 15);
        assert_eq!(err.kind, ParseErrorKind::UnknownConstructor("wheel".into()));
        let err = parse_expression("cycle(5").unwrap_err();
        assert_eq!(err.offset, 7);
        let err = parse_expression("cycle(5) x").unwrap_err();
        assert_eq!(err.offset, 9);
        let err = parse_expression("join(cycle(2))").unwrap_err();
        assert_eq!(err.offset, 5);
        assert!(matches!(err.kind, ParseErrorKind::Invalid(_)));
        let err = parse_expression("random(5, 3/2, seed=1)").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Invalid(_)));
        let err = parse_expression("random(5, 1/2, sed=1)").unwrap_err();
        assert_eq!(err.offset, 15);
        let err = parse_expression("edges(3; 0-3)").unwrap_err();
        assert_eq!(err.offset, 9);
        assert!(parse_expression("").is_err());
        assert!(parse_expression("cycle").is_err());
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "compose(cycle(3);complete(1),mycielski(complete(2)),random(4,1/4,seed=7))",
            "join(kneser(5,2),edges(3;0-1,1-2))",
            "lex(cycle(5),complete(2))",
            "gadget(12,5/2,seed=4,budget=10)",
        ] {
            let e = parse_expression(text).unwrap();
            assert_eq!(e.to_string(), text);
            assert_eq!(parse_expression(&e.to_string()).unwrap(), e);
        }
    }
}
