//! Plain-text graph and hypergraph formats.
//!
//! Graph: a header line `n m`, then `m` lines `u v` (0-based, `u < v`).
//! Hypergraph: a header line `n m`, then `m` lines each listing one hyperedge.

use std::fmt::Write;

use super::{Graph, GraphError, Hypergraph};

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn numbers(line: usize, s: &str) -> Result<Vec<usize>, GraphError> {
    s.split_whitespace()
        .map(|tok| tok.parse::<usize>().map_err(|e| GraphError::Parse { line, msg: format!("{tok:?}: {e}") }))
        .collect()
}

fn header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>) -> Result<(usize, usize), GraphError> {
    let (line, text) = lines.next().ok_or(GraphError::Parse { line: 1, msg: "missing header".into() })?;
    match numbers(line, text)?.as_slice() {
        [n, m] => Ok((*n, *m)),
        _ => Err(GraphError::Parse { line, msg: "header must be `n m`".into() }),
    }
}

pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut lines = data_lines(text);
    let (n, m) = header(&mut lines)?;
    let mut edges = Vec::with_capacity(m);
    for (line, s) in lines.by_ref().take(m) {
        match numbers(line, s)?.as_slice() {
            [u, v] if u < v => edges.push((*u, *v)),
            [_, _] => return Err(GraphError::Parse { line, msg: "edge endpoints must satisfy u < v".into() }),
            _ => return Err(GraphError::Parse { line, msg: "edge line must be `u v`".into() }),
        }
    }
    if edges.len() != m {
        return Err(GraphError::Parse { line: 0, msg: format!("expected {m} edges, found {}", edges.len()) });
    }
    if let Some((line, _)) = lines.next() {
        return Err(GraphError::Parse { line, msg: "trailing data".into() });
    }
    Graph::from_edges(n, &edges)
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.vertex_count(), g.edge_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn parse_hypergraph(text: &str) -> Result<Hypergraph, GraphError> {
    let mut lines = data_lines(text);
    let (n, m) = header(&mut lines)?;
    let mut edges = Vec::with_capacity(m);
    for (line, s) in lines.by_ref().take(m) {
        edges.push(numbers(line, s)?);
    }
    if edges.len() != m {
        return Err(GraphError::Parse { line: 0, msg: format!("expected {m} hyperedges, found {}", edges.len()) });
    }
    if let Some((line, _)) = lines.next() {
        return Err(GraphError::Parse { line, msg: "trailing data".into() });
    }
    Hypergraph::new(n, edges)
}

pub fn write_hypergraph(h: &Hypergraph) -> String {
    let mut out = format!("{} {}\n", h.vertex_count(), h.edge_count());
    for e in h.hyperedges() {
        let line: Vec<String> = e.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, FamilySpec};

    #[test]
    fn graph_round_trip() {
        let g = generate(&FamilySpec::Gnp(30, 0.2), 3).unwrap();
        let text = write_graph(&g);
        assert_eq!(parse_graph(&text).unwrap(), g);
        assert_eq!(write_graph(&parse_graph(&text).unwrap()), text);
    }

    #[test]
    fn graph_parse_errors() {
        assert!(parse_graph("3 1\n1 0\n").is_err());
        assert!(parse_graph("3 2\n0 1\n").is_err());
        assert!(parse_graph("3 1\n0 1\n1 2\n").is_err());
        assert!(parse_graph("3 1\n0 x\n").is_err());
    }

    #[test]
    fn hypergraph_round_trip() {
        let h = Hypergraph::new(5, vec![vec![0, 1, 2], vec![4], vec![2, 3]]).unwrap();
        let text = write_hypergraph(&h);
        assert_eq!(text, "5 3\n0 1 2\n4\n2 3\n");
        assert_eq!(parse_hypergraph(&text).unwrap(), h);
        assert!(parse_hypergraph("2 1\n\n").is_err());
    }
}
