use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error};
use crate::graph::Graph;

/// Structural restriction on the graphs a search may build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphClass {
    Any,
    /// No 3-cycle.
    TriangleFree,
    /// No 3- or 4-cycle.
    GirthAtLeast5,
    Tree,
}

impl GraphClass {
    pub const ALL: [GraphClass; 4] = [
        GraphClass::Any,
        GraphClass::TriangleFree,
        GraphClass::GirthAtLeast5,
        GraphClass::Tree,
    ];

    /// Smallest `dist(u, v)` at which a new edge `uv` keeps the class;
    /// `None` when no edge addition is ever allowed.
    pub(crate) fn min_new_edge_distance(self) -> Option<u32> {
        match self {
            GraphClass::Any => Some(0),
            GraphClass::TriangleFree => Some(3),
            GraphClass::GirthAtLeast5 => Some(4),
            GraphClass::Tree => None,
        }
    }

    /// Full membership check, independent of how the graph was built.
    pub fn contains(self, g: &Graph) -> bool {
        match self {
            GraphClass::Any => true,
            GraphClass::TriangleFree => g.girth().map_or(true, |c| c >= 4),
            GraphClass::GirthAtLeast5 => g.girth().map_or(true, |c| c >= 5),
            GraphClass::Tree => g.n() >= 1 && g.edge_count() == g.n() - 1 && g.is_connected(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GraphClass::Any => "any",
            GraphClass::TriangleFree => "triangle-free",
            GraphClass::GirthAtLeast5 => "girth5",
            GraphClass::Tree => "tree",
        }
    }
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GraphClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "any" => Ok(GraphClass::Any),
            "triangle-free" | "k3-free" | "trianglefree" => Ok(GraphClass::TriangleFree),
            "girth5" | "girth-5" | "girth>=5" => Ok(GraphClass::GirthAtLeast5),
            "tree" => Ok(GraphClass::Tree),
            other => Err(invalid(format!("unknown graph class {other:?}"))),
        }
    }
}
