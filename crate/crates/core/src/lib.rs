//! Searching for counter-examples to spectral graph conjectures.
//!
//! A conjecture is an inequality `lhs <= rhs` over connected graphs. The
//! search plays a construction game that grows a graph one move at a time
//! and scores every intermediate graph by `lhs - rhs`; a positive margin
//! on an admissible graph refutes the conjecture.

pub mod conjectures;
pub mod error;
pub mod game;
pub mod graph;
pub mod search;
pub mod spectral;

pub use conjectures::{list_conjectures, Conjecture, Registry, ScoreOptions, ScoreReport, VIOLATION_EPSILON};
pub use error::{Error, Result};
pub use game::{initial_state, BestTracker, BuildState, Budget, Evaluator, Move, Policy};
pub use graph::{parse_edge_list, Graph, GraphClass};
pub use search::{search, Algorithm, SearchOutcome, SearchParams, SearchRng};
pub use spectral::{EigenMethod, RangeDefinition, Spectrum, SymMatrix};
