use crate::error::{domain, Result};
use crate::graph::Graph;
use crate::spectral::SymMatrix;

pub fn adjacency_matrix(g: &Graph) -> SymMatrix {
    SymMatrix::from_upper(g.n(), |u, v| if g.has_edge(u, v) { 1.0 } else { 0.0 })
}

/// Hop-distance matrix. Undefined for disconnected graphs.
pub fn distance_matrix(g: &Graph) -> Result<SymMatrix> {
    let n = g.n();
    let dist = g.all_pairs_distances();
    if dist.iter().any(Option::is_none) {
        return Err(domain("distance matrix of a disconnected graph"));
    }
    Ok(SymMatrix::from_upper(n, |u, v| dist[u * n + v].unwrap() as f64))
}

/// Gravity matrix: `d(u) d(v) / ((n - 1) dist(u, v))` off the diagonal,
/// zero on the diagonal and between vertices with no joining path.
pub fn gravity_matrix(g: &Graph) -> Result<SymMatrix> {
    let n = g.n();
    if n < 2 {
        return Err(domain("gravity matrix needs at least two vertices"));
    }
    let dist = g.all_pairs_distances();
    let scale = (n - 1) as f64;
    Ok(SymMatrix::from_upper(n, |u, v| match dist[u * n + v] {
        Some(d) if u != v => (g.degree(u) * g.degree(v)) as f64 / (scale * d as f64),
        _ => 0.0,
    }))
}
