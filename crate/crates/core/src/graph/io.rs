use crate::error::{Error, Result};
use crate::graph::Graph;

fn parse_error(token: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        token: token.to_string(),
        reason: reason.into(),
    }
}

/// Parses comma-separated `u-v` tokens into a graph on `0..=max label`.
///
/// Labels may carry leading zeros (`02-3` reads as `2-3`). Whitespace,
/// including line breaks, around tokens is ignored. Empty input yields the
/// single-vertex graph, matching [`Graph::to_edge_list`].
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut edges = Vec::new();
    for raw in text.split(',') {
        let token = raw.trim();
        if token.is_empty() {
            if text.trim().is_empty() {
                continue;
            }
            return Err(parse_error(raw, "empty token"));
        }
        let (a, b) = token
            .split_once('-')
            .ok_or_else(|| parse_error(token, "expected u-v"))?;
        let label = |s: &str| {
            let s = s.trim();
            if s.is_empty() || !s.bytes().all(|c| c.is_ascii_digit()) {
                return Err(parse_error(token, format!("{s:?} is not a vertex label")));
            }
            s.parse::<usize>()
                .map_err(|e| parse_error(token, e.to_string()))
        };
        let (u, v) = (label(a)?, label(b)?);
        if u == v {
            return Err(parse_error(token, "self-loop"));
        }
        edges.push((token, u.min(v), u.max(v)));
    }
    let n = edges.iter().map(|&(_, _, v)| v + 1).max().unwrap_or(1);
    let mut g = Graph::empty(n);
    for (token, u, v) in edges {
        if g.has_edge(u, v) {
            return Err(parse_error(token, "duplicate edge"));
        }
        g.insert_edge(u, v).map_err(|e| parse_error(token, e.to_string()))?;
    }
    Ok(g)
}
