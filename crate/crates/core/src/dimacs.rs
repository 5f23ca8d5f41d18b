//! DIMACS `.col` edge format.
//!
//! ```text
//! c optional comments
//! p edge <n> <m>
//! e <u> <v>        (1-based endpoints)
//! ```
//!
//! The writer emits the canonical form: header, then each edge once with
//! `u < v` in lexicographic order, no comments, `\n` line endings.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `p edge <n> <m>` header")]
    MissingHeader,
    #[error("line {line}: edge endpoint {vertex} outside 1..={n}")]
    EndpointOutOfRange { line: usize, vertex: usize, n: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub fn parse(text: &str) -> Result<Graph, DimacsError> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut fields = raw.split_whitespace();
        let Some(tag) = fields.next() else { continue };
        let syntax = |message: &str| DimacsError::Syntax {
            line,
            message: message.to_string(),
        };
        match tag {
            "c" => continue,
            "p" => {
                if n.is_some() {
                    return Err(syntax("duplicate problem line"));
                }
                let format = fields.next().ok_or_else(|| syntax("missing format"))?;
                if format != "edge" && format != "col" {
                    return Err(syntax("expected `p edge`"));
                }
                let count = fields
                    .next()
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| syntax("bad vertex count"))?;
                fields
                    .next()
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| syntax("bad edge count"))?;
                if fields.next().is_some() {
                    return Err(syntax("trailing fields on problem line"));
                }
                n = Some(count);
            }
            "e" => {
                let n = n.ok_or(DimacsError::MissingHeader)?;
                let mut endpoint = || -> Result<usize, DimacsError> {
                    let v = fields
                        .next()
                        .and_then(|s| s.parse::<usize>().ok())
                        .ok_or_else(|| syntax("bad edge endpoint"))?;
                    if v == 0 || v > n {
                        return Err(DimacsError::EndpointOutOfRange { line, vertex: v, n });
                    }
                    Ok(v - 1)
                };
                let u = endpoint()?;
                let v = endpoint()?;
                if fields.next().is_some() {
                    return Err(syntax("trailing fields on edge line"));
                }
                edges.push((u, v));
            }
            _ => return Err(syntax(&format!("unknown line type `{tag}`"))),
        }
    }
    let n = n.ok_or(DimacsError::MissingHeader)?;
    Ok(Graph::new(n, edges)?)
}

pub fn write(g: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "e {} {}", u + 1, v + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments_and_duplicates() {
        let text = "c five cycle\np edge 5 6\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 5 1\ne 2 1\n";
        let g = parse(text).unwrap();
        assert!(g.same_adjacency(&Graph::cycle(5).unwrap()));
    }

    #[test]
    fn canonical_form() {
        let g = Graph::cycle(4).unwrap();
        assert_eq!(write(&g), "p edge 4 4\ne 1 2\ne 1 4\ne 2 3\ne 3 4\n");
        let text = write(&Graph::petersen());
        assert_eq!(write(&parse(&text).unwrap()), text);
    }

    #[test]
    fn errors() {
        assert_eq!(parse("e 1 2\n"), Err(DimacsError::MissingHeader));
        assert_eq!(parse("c nothing\n"), Err(DimacsError::MissingHeader));
        assert!(matches!(
            parse("p edge 3 1\ne 1 4\n"),
            Err(DimacsError::EndpointOutOfRange { line: 2, vertex: 4, n: 3 })
        ));
        assert!(matches!(
            parse("p edge 3 1\ne 2 2\n"),
            Err(DimacsError::Graph(GraphError::Loop(1)))
        ));
        assert!(matches!(parse("p edge x 1\n"), Err(DimacsError::Syntax { line: 1, .. })));
        assert!(matches!(parse("q\n"), Err(DimacsError::Syntax { .. })));
    }
}
