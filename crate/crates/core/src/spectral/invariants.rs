use std::fmt;
use std::str::FromStr;

use crate::error::{domain, invalid, Error, Result};
use crate::graph::Graph;
use crate::spectral::Spectrum;

/// Harmonic index: `Σ_{uv ∈ E} 2 / (d(u) + d(v))`.
pub fn harmonic(g: &Graph) -> f64 {
    g.edges()
        .map(|(u, v)| 2.0 / (g.degree(u) + g.degree(v)) as f64)
        .sum()
}

/// Randić index: `Σ_{uv ∈ E} 1 / sqrt(d(u) d(v))`.
pub fn randic_index(g: &Graph) -> f64 {
    g.edges()
        .map(|(u, v)| 1.0 / ((g.degree(u) * g.degree(v)) as f64).sqrt())
        .sum()
}

/// `Σ_v 1 / Ev(v)` where `Ev(v)` counts vertices at positive even distance
/// from `v`. `None` when some vertex has no such partner.
pub fn inverse_even(g: &Graph) -> Result<Option<f64>> {
    let n = g.n();
    let dist = g.all_pairs_distances();
    if dist.iter().any(Option::is_none) {
        return Err(domain("inverse even of a disconnected graph"));
    }
    let mut total = 0.0;
    for v in 0..n {
        let even = dist[v * n..(v + 1) * n]
            .iter()
            .filter(|d| matches!(d, Some(d) if *d > 0 && d % 2 == 0))
            .count();
        if even == 0 {
            return Ok(None);
        }
        total += 1.0 / even as f64;
    }
    Ok(Some(total))
}

/// Sum of vertex temperatures `d(v) / (n - d(v))`.
pub fn temperature_sum(g: &Graph) -> f64 {
    let n = g.n();
    g.degrees().map(|d| d as f64 / (n - d) as f64).sum()
}

/// `(1/n) Σ_v mean{ d(u) : u ~ v }`.
pub fn mean_of_neighbor_degree_means(g: &Graph) -> Result<f64> {
    let n = g.n();
    let mut total = 0.0;
    for v in 0..n {
        let d = g.degree(v);
        if d == 0 {
            return Err(domain(format!("vertex {v} is isolated")));
        }
        let sum: usize = g.neighbors(v).map(|u| g.degree(u)).sum();
        total += sum as f64 / d as f64;
    }
    Ok(total / n as f64)
}

/// The two readings of "range of eigenvalues".
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum RangeDefinition {
    /// `λ1 - λn`.
    #[default]
    Diff,
    /// Number of distinct eigenvalues, merging values closer than
    /// `1e-6 * max(1, max |λ|)`.
    DistinctCount,
}

impl RangeDefinition {
    pub fn name(self) -> &'static str {
        match self {
            RangeDefinition::Diff => "diff",
            RangeDefinition::DistinctCount => "distinct-count",
        }
    }
}

impl fmt::Display for RangeDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RangeDefinition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "diff" => Ok(RangeDefinition::Diff),
            "distinct-count" | "distinct" | "distinctcount" => Ok(RangeDefinition::DistinctCount),
            other => Err(invalid(format!("unknown range definition {other:?}"))),
        }
    }
}

pub fn spectrum_range(s: &Spectrum, definition: RangeDefinition) -> Result<f64> {
    let values = s.values();
    let (Some(&first), Some(&last)) = (values.first(), values.last()) else {
        return Err(invalid("range of an empty spectrum"));
    };
    Ok(match definition {
        RangeDefinition::Diff => first - last,
        RangeDefinition::DistinctCount => {
            let norm = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let tol = 1e-6 * norm.max(1.0);
            let gaps = values.windows(2).filter(|w| w[0] - w[1] >= tol).count();
            (gaps + 1) as f64
        }
    })
}

/// Largest minus smallest strictly positive eigenvalue; `None` if there is
/// no positive eigenvalue.
pub fn positive_eigenvalue_scope(s: &Spectrum) -> Option<f64> {
    let tol = s.zero_tolerance();
    let positive: Vec<f64> = s.values().iter().copied().filter(|&x| x > tol).collect();
    match (positive.first(), positive.last()) {
        (Some(max), Some(min)) => Some(max - min),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
}

/// Eigenvalues strictly above `+zero_tolerance` or strictly below `-zero_tolerance`.
pub fn count_eigenvalues(s: &Spectrum, sign: Sign, zero_tolerance: f64) -> usize {
    s.values()
        .iter()
        .filter(|&&x| match sign {
            Sign::Positive => x > zero_tolerance,
            Sign::Negative => x < -zero_tolerance,
        })
        .count()
}
