//! Text formats: the graph file and the query batch file.

use std::fmt::Write as _;

use repath_core::{EdgeId, Graph, GraphError, Vertex};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: expected \"n m\" header")]
    Header { line: usize },
    #[error("line {line}: expected two vertex ids, found {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { line: usize, vertex: u64, n: usize },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: Vertex },
    #[error("line {line}: duplicate edge, first listed on line {first}")]
    Duplicate { line: usize, first: usize },
    #[error("header announces {expected} edges but the file lists {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error("empty graph file")]
    Empty,
}

/// Content lines with their 1-based line numbers; `#` comments and blank
/// lines are skipped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn two_numbers(l: &str) -> Option<(u64, u64)> {
    let mut it = l.split_whitespace();
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    it.next().is_none().then_some((a, b))
}

pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or(ParseError::Empty)?;
    let (n, m) = two_numbers(header).ok_or(ParseError::Header { line: hline })?;
    let n = n as usize;
    let mut edges = Vec::with_capacity(m as usize);
    let mut line_of = Vec::with_capacity(m as usize);
    for (line, l) in lines {
        let (u, v) = two_numbers(l).ok_or_else(|| ParseError::Malformed {
            line,
            text: l.to_string(),
        })?;
        for w in [u, v] {
            if w >= n as u64 {
                return Err(ParseError::VertexOutOfRange { line, vertex: w, n });
            }
        }
        edges.push((u as Vertex, v as Vertex));
        line_of.push(line);
    }
    if edges.len() != m as usize {
        return Err(ParseError::EdgeCount {
            expected: m as usize,
            found: edges.len(),
        });
    }
    Graph::new(n, edges).map_err(|e| match e {
        GraphError::SelfLoop { index, vertex } => ParseError::SelfLoop {
            line: line_of[index],
            vertex,
        },
        GraphError::Duplicate { index, first } => ParseError::Duplicate {
            line: line_of[index],
            first: line_of[first],
        },
        GraphError::VertexOutOfRange { index, vertex, n } => ParseError::VertexOutOfRange {
            line: line_of[index],
            vertex: vertex as u64,
            n,
        },
    })
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = String::with_capacity(12 * (g.m() + 1));
    writeln!(out, "{} {}", g.n(), g.m()).unwrap();
    for &(u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

/// One line of a query batch, edge already resolved to its id.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QueryLine {
    pub line: usize,
    pub s: Vertex,
    pub t: Vertex,
    pub e: EdgeId,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryLineError {
    #[error("line {line}: expected \"s t u v\", found {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { line: usize, vertex: u64, n: usize },
    #[error("line {line}: no such edge ({u}, {v})")]
    NoSuchEdge { line: usize, u: Vertex, v: Vertex },
}

/// Parses every line; bad lines come back as errors in place.
pub fn parse_queries(g: &Graph, text: &str) -> Vec<Result<QueryLine, QueryLineError>> {
    content_lines(text)
        .map(|(line, l)| {
            let nums: Vec<u64> = l
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| QueryLineError::Malformed {
                    line,
                    text: l.to_string(),
                })?;
            let [s, t, u, v] = nums[..] else {
                return Err(QueryLineError::Malformed {
                    line,
                    text: l.to_string(),
                });
            };
            for w in [s, t] {
                if w >= g.n() as u64 {
                    return Err(QueryLineError::VertexOutOfRange {
                        line,
                        vertex: w,
                        n: g.n(),
                    });
                }
            }
            let no_edge = QueryLineError::NoSuchEdge {
                line,
                u: u as Vertex,
                v: v as Vertex,
            };
            if u >= g.n() as u64 || v >= g.n() as u64 {
                return Err(no_edge);
            }
            let e = g.edge_between(u as Vertex, v as Vertex).ok_or(no_edge)?;
            Ok(QueryLine {
                line,
                s: s as Vertex,
                t: t as Vertex,
                e,
            })
        })
        .collect()
}
