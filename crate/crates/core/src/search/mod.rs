//! Search strategies over the construction game.
//!
//! Every strategy scores states through a shared [`Evaluator`], which owns
//! the best-so-far tracker and halts the run as soon as a counter-example
//! appears or the budget runs out.

mod greedy;
mod mcts;
mod nested;
mod nrpa;

pub use greedy::{beam_search, gbfs};
pub use mcts::{mcts, TreePolicy};
pub use nested::{lnmcs_level, nmcs_level};
pub use nrpa::{adapt, nrpa_level};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::conjectures::Conjecture;
use crate::error::{invalid, Error, Result};
use crate::game::{BestTracker, BuildState, Budget, Evaluator, Move};
use crate::graph::Graph;

/// Generator used by every stochastic strategy; portable and seedable.
pub type SearchRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Nmcs,
    Lnmcs,
    Nrpa,
    Uct,
    Rave,
    Grave,
    Gbfs,
    Beam,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Nmcs,
        Algorithm::Lnmcs,
        Algorithm::Nrpa,
        Algorithm::Uct,
        Algorithm::Rave,
        Algorithm::Grave,
        Algorithm::Gbfs,
        Algorithm::Beam,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Nmcs => "nmcs",
            Algorithm::Lnmcs => "lnmcs",
            Algorithm::Nrpa => "nrpa",
            Algorithm::Uct => "uct",
            Algorithm::Rave => "rave",
            Algorithm::Grave => "grave",
            Algorithm::Gbfs => "gbfs",
            Algorithm::Beam => "beam",
        }
    }

    pub fn is_deterministic(self) -> bool {
        matches!(self, Algorithm::Gbfs | Algorithm::Beam)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| invalid(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchParams {
    pub nmcs_level: u32,
    pub lnmcs_level: u32,
    pub lnmcs_playouts: u32,
    pub lnmcs_ratio: f64,
    pub uct_constant: f64,
    pub rave_ref: u32,
    /// Bias term of the AMAF/mean blending schedule.
    pub rave_bias: f64,
    pub beam_width: usize,
    pub nrpa_level: u32,
    pub nrpa_iterations: u32,
    pub nrpa_alpha: f64,
    pub gbfs_open_cap: usize,
    /// Node limit for the MCTS family; past it, iterations only play out.
    pub tree_node_cap: usize,
    pub budget_seconds: f64,
    /// Optional evaluation limit, for runs that must be reproducible
    /// independent of machine speed.
    pub max_evaluations: Option<u64>,
    pub seed: u64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            nmcs_level: 3,
            lnmcs_level: 4,
            lnmcs_playouts: 3,
            lnmcs_ratio: 0.8,
            uct_constant: 1.0,
            rave_ref: 5,
            rave_bias: 1e-5,
            beam_width: 10,
            nrpa_level: 3,
            nrpa_iterations: 100,
            nrpa_alpha: 1.0,
            gbfs_open_cap: 1_000_000,
            tree_node_cap: 500_000,
            budget_seconds: 900.0,
            max_evaluations: None,
            seed: 0,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if self.lnmcs_level < 1 {
            return Err(invalid("lnmcs level must be at least 1"));
        }
        if self.lnmcs_playouts < 1 {
            return Err(invalid("lnmcs needs at least one playout per child"));
        }
        if !(self.lnmcs_ratio > 0.0 && self.lnmcs_ratio <= 1.0) {
            return Err(invalid("lnmcs ratio must lie in (0, 1]"));
        }
        if self.beam_width < 1 {
            return Err(invalid("beam width must be at least 1"));
        }
        if self.uct_constant < 0.0 || !self.uct_constant.is_finite() {
            return Err(invalid("uct constant must be finite and non-negative"));
        }
        if self.nrpa_iterations < 1 {
            return Err(invalid("nrpa needs at least one iteration per level"));
        }
        if !(self.budget_seconds > 0.0) {
            return Err(invalid("budget must be positive"));
        }
        if self.gbfs_open_cap < 1 || self.tree_node_cap < 1 {
            return Err(invalid("caps must be positive"));
        }
        Ok(())
    }

    fn budget(&self) -> Budget {
        let budget = if self.budget_seconds.is_finite() {
            Budget::seconds(self.budget_seconds)
        } else {
            Budget::unlimited()
        };
        budget.with_max_evaluations(self.max_evaluations)
    }

    fn has_limit(&self) -> bool {
        self.budget_seconds.is_finite() || self.max_evaluations.is_some()
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub algorithm: Algorithm,
    pub best_graph: Graph,
    pub best_score: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub refuted: bool,
    pub elapsed_seconds: f64,
    pub evaluations: u64,
    pub move_history: Vec<Move>,
    pub seed: u64,
    /// States dropped from a capped open list (best-first search only).
    pub discarded: u64,
}

impl SearchOutcome {
    fn from_tracker(algorithm: Algorithm, start: &BuildState, tracker: &BestTracker, params: &SearchParams, elapsed: f64, discarded: u64) -> Self {
        let (graph, report, history) = match tracker.result() {
            Some(s) => (s.state.graph().clone(), Some(s.report), s.state.history().to_vec()),
            None => (start.graph().clone(), None, Vec::new()),
        };
        SearchOutcome {
            algorithm,
            best_graph: graph,
            best_score: report.map_or(f64::NEG_INFINITY, |r| r.score),
            lhs: report.map_or(f64::NAN, |r| r.lhs),
            rhs: report.map_or(f64::NAN, |r| r.rhs),
            refuted: tracker.found_counterexample(),
            elapsed_seconds: elapsed,
            evaluations: tracker.evaluations(),
            move_history: history,
            seed: params.seed,
            discarded,
        }
    }
}

/// Runs `algorithm` from `start` until a counter-example, the budget, or
/// natural termination. Stochastic strategies restart with fresh random
/// choices while budget remains; with no limit at all they run once.
pub fn search(
    algorithm: Algorithm,
    start: &BuildState,
    conj: &Conjecture,
    params: &SearchParams,
) -> Result<SearchOutcome> {
    params.validate()?;
    let started = Instant::now();
    let mut eval = Evaluator::new(conj, params.budget());
    let mut rng = SearchRng::seed_from_u64(params.seed);
    let mut discarded = 0;
    let restart = params.has_limit();

    loop {
        match algorithm {
            Algorithm::Nmcs => {
                nmcs_level(start, params.nmcs_level, &mut eval, &mut rng);
            }
            Algorithm::Lnmcs => {
                lnmcs_level(start, params.lnmcs_level, params, &mut eval, &mut rng);
            }
            Algorithm::Nrpa => {
                nrpa_level(start, params.nrpa_level, params, &mut eval, &mut rng);
            }
            Algorithm::Uct | Algorithm::Rave | Algorithm::Grave => {
                let policy = match algorithm {
                    Algorithm::Uct => TreePolicy::Uct,
                    Algorithm::Rave => TreePolicy::Rave,
                    _ => TreePolicy::Grave,
                };
                // a fully expanded tree has seen every state; repeating it adds nothing
                mcts(start, policy, params, &mut eval, &mut rng);
                break;
            }
            Algorithm::Gbfs => {
                discarded = gbfs(start, params, &mut eval);
                break;
            }
            Algorithm::Beam => {
                beam_search(start, params.beam_width, &mut eval);
                break;
            }
        }
        if !restart || eval.should_stop() {
            break;
        }
    }

    let elapsed = started.elapsed().as_secs_f64();
    Ok(SearchOutcome::from_tracker(algorithm, start, eval.tracker(), params, elapsed, discarded))
}

pub fn nmcs(start: &BuildState, conj: &Conjecture, params: &SearchParams) -> Result<SearchOutcome> {
    search(Algorithm::Nmcs, start, conj, params)
}

pub fn lnmcs(start: &BuildState, conj: &Conjecture, params: &SearchParams) -> Result<SearchOutcome> {
    search(Algorithm::Lnmcs, start, conj, params)
}

pub fn nrpa(start: &BuildState, conj: &Conjecture, params: &SearchParams) -> Result<SearchOutcome> {
    search(Algorithm::Nrpa, start, conj, params)
}

pub fn uct(start: &BuildState, conj: &Conjecture, params: &SearchParams) -> Result<SearchOutcome> {
    search(Algorithm::Uct, start, conj, params)
}

pub fn rave(start: &BuildState, conj: &Conjecture, params: &SearchParams) -> Result<SearchOutcome> {
    search(Algorithm::Rave, start, conj, params)
}

pub fn grave(start: &BuildState, conj: &Conjecture, params: &SearchParams) -> Result<SearchOutcome> {
    search(Algorithm::Grave, start, conj, params)
}

pub fn gbfs_search(start: &BuildState, conj: &Conjecture, params: &SearchParams) -> Result<SearchOutcome> {
    search(Algorithm::Gbfs, start, conj, params)
}

pub fn beam(start: &BuildState, conj: &Conjecture, params: &SearchParams) -> Result<SearchOutcome> {
    search(Algorithm::Beam, start, conj, params)
}

/// A scored move sequence relative to some state.
#[derive(Debug, Clone)]
pub struct Sequence {
    pub score: f64,
    pub moves: Vec<Move>,
}

impl Sequence {
    fn empty() -> Self {
        Sequence {
            score: f64::NEG_INFINITY,
            moves: Vec::new(),
        }
    }
}

/// Squashes an unbounded margin into `(0, 1)` for bandit statistics.
pub(crate) fn reward(score: f64) -> f64 {
    if score == f64::NEG_INFINITY {
        0.0
    } else {
        1.0 / (1.0 + (-score).exp())
    }
}
