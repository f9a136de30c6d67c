//! The construction game searched by every algorithm.
//!
//! A state is a connected graph that grows from a single vertex. Each move
//! attaches a new pendant vertex, adds a class-legal edge, or stops. Every
//! state reached is scored, so counter-examples are caught before the game
//! ends.

use std::time::{Duration, Instant};

use rand::Rng;

use crate::conjectures::{Conjecture, ScoreReport, VIOLATION_EPSILON};
use crate::error::{invalid, Result};
use crate::graph::{Graph, GraphClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    /// New vertex joined to the given anchor.
    Attach(usize),
    /// Edge `(u, v)` with `u < v`.
    AddEdge(usize, usize),
    Stop,
}

impl Move {
    /// Position-independent identifier used by policy tables.
    ///
    /// `Attach(j) -> j`, `AddEdge(u, v) -> T + uT + v`, `Stop -> T(T + 1)`
    /// for target size `T`.
    pub fn code(&self, target_size: usize) -> usize {
        let t = target_size;
        match *self {
            Move::Attach(j) => j,
            Move::AddEdge(u, v) => t + u * t + v,
            Move::Stop => t * (t + 1),
        }
    }

    /// Number of distinct codes for target size `T`.
    pub fn code_space(target_size: usize) -> usize {
        target_size * (target_size + 1) + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BuildState {
    graph: Graph,
    target_size: usize,
    stop_size: usize,
    class: GraphClass,
    history: Vec<Move>,
    stopped: bool,
}

/// Single-vertex start state. `Stop` becomes legal once the graph reaches
/// `target_size`; lower it with [`BuildState::with_stop_size`].
pub fn initial_state(target_size: usize, class: GraphClass) -> Result<BuildState> {
    if target_size == 0 {
        return Err(invalid("target size must be at least 1"));
    }
    Ok(BuildState {
        graph: Graph::singleton(),
        target_size,
        stop_size: target_size,
        class,
        history: Vec::new(),
        stopped: false,
    })
}

impl BuildState {
    /// Start state for searching `conjecture` up to `target_size` vertices.
    pub fn for_conjecture(conjecture: &Conjecture, target_size: usize) -> Result<BuildState> {
        if target_size < conjecture.min_size() {
            return Err(invalid(format!(
                "target size {target_size} is below the minimum size {} of {}",
                conjecture.min_size(),
                conjecture.key()
            )));
        }
        Ok(initial_state(target_size, conjecture.graph_class())?.with_stop_size(conjecture.min_size()))
    }

    pub fn with_stop_size(mut self, stop_size: usize) -> Self {
        self.stop_size = stop_size;
        self
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    pub fn stop_size(&self) -> usize {
        self.stop_size
    }

    pub fn class(&self) -> GraphClass {
        self.class
    }

    pub fn history(&self) -> &[Move] {
        &self.history
    }

    pub fn stopped(&self) -> bool {
        self.stopped
    }

    fn legal_edges(&self) -> Vec<(usize, usize)> {
        self.graph.class_legal_edges(self.class)
    }

    /// `Stop`, then `Attach` by anchor, then `AddEdge` lexicographically.
    /// Empty exactly when the state is terminal.
    pub fn legal_moves(&self) -> Vec<Move> {
        if self.stopped {
            return Vec::new();
        }
        let n = self.graph.n();
        let edges = self.legal_edges();
        if n >= self.target_size && edges.is_empty() {
            return Vec::new();
        }
        let mut moves = Vec::with_capacity(1 + n + edges.len());
        if n >= self.stop_size {
            moves.push(Move::Stop);
        }
        if n < self.target_size {
            moves.extend((0..n).map(Move::Attach));
        }
        moves.extend(edges.into_iter().map(|(u, v)| Move::AddEdge(u, v)));
        moves
    }

    pub fn is_terminal(&self) -> bool {
        self.stopped || (self.graph.n() >= self.target_size && self.legal_edges().is_empty())
    }

    pub fn is_legal(&self, m: Move) -> bool {
        if self.stopped {
            return false;
        }
        let n = self.graph.n();
        match m {
            Move::Stop => n >= self.stop_size && !self.is_terminal(),
            Move::Attach(a) => a < n && n < self.target_size,
            Move::AddEdge(u, v) => {
                u < v && v < n && !self.graph.has_edge(u, v) && self.graph.edge_is_class_legal(u, v, self.class)
            }
        }
    }

    pub fn apply(&self, m: Move) -> Result<BuildState> {
        let mut next = self.clone();
        next.apply_in_place(m)?;
        Ok(next)
    }

    pub fn apply_in_place(&mut self, m: Move) -> Result<()> {
        if !self.is_legal(m) {
            return Err(invalid(format!("{m:?} is not legal in this state")));
        }
        self.play_unchecked(m);
        Ok(())
    }

    /// Applies a move already taken from [`BuildState::legal_moves`].
    pub(crate) fn play_unchecked(&mut self, m: Move) {
        match m {
            Move::Attach(a) => {
                self.graph.attach_vertex(a).expect("anchor checked by legal_moves");
            }
            Move::AddEdge(u, v) => self.graph.insert_edge(u, v).expect("edge checked by legal_moves"),
            Move::Stop => self.stopped = true,
        }
        self.history.push(m);
    }

    /// Replays `moves` from the start state of the same game.
    pub fn replay(&self, moves: &[Move]) -> Result<BuildState> {
        let mut s = self.clone();
        for &m in moves {
            s.apply_in_place(m)?;
        }
        Ok(s)
    }

    pub fn code(&self, m: Move) -> usize {
        m.code(self.target_size)
    }
}

/// A scored state worth remembering.
#[derive(Debug, Clone)]
pub struct Scored {
    pub state: BuildState,
    pub report: ScoreReport,
}

/// Best state seen across a run, terminal or not.
#[derive(Debug, Clone, Default)]
pub struct BestTracker {
    best: Option<Scored>,
    counterexample: Option<Scored>,
    evaluations: u64,
}

impl BestTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn best_score(&self) -> f64 {
        self.best.as_ref().map_or(f64::NEG_INFINITY, |b| b.report.score)
    }

    pub fn best(&self) -> Option<&Scored> {
        self.best.as_ref()
    }

    pub fn counterexample(&self) -> Option<&Scored> {
        self.counterexample.as_ref()
    }

    pub fn found_counterexample(&self) -> bool {
        self.counterexample.is_some()
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// The counter-example when one was found, the best state otherwise.
    pub fn result(&self) -> Option<&Scored> {
        self.counterexample.as_ref().or(self.best.as_ref())
    }

    fn record(&mut self, conj: &Conjecture, state: &BuildState, report: ScoreReport) {
        if report.score > self.best_score() || self.best.is_none() {
            self.best = Some(Scored {
                state: state.clone(),
                report,
            });
        }
        if self.counterexample.is_none()
            && report.score > VIOLATION_EPSILON
            && conj.accepts(state.graph(), &report, VIOLATION_EPSILON)
        {
            self.counterexample = Some(Scored {
                state: state.clone(),
                report,
            });
        }
    }
}

fn report_for(conj: &Conjecture, state: &BuildState) -> ScoreReport {
    if state.graph().n() < 2 {
        return ScoreReport::undefined();
    }
    conj.score(state.graph()).unwrap_or_else(|_| ScoreReport::undefined())
}

/// Scores `state`, records it in `tracker`, and returns the margin
/// (`-inf` when undefined or below two vertices).
pub fn evaluate(state: &BuildState, conj: &Conjecture, tracker: &mut BestTracker) -> f64 {
    let report = report_for(conj, state);
    tracker.evaluations += 1;
    tracker.record(conj, state, report);
    report.score
}

/// Limits on a run. The clock is checked between evaluations only.
#[derive(Debug, Clone, Copy, Default)]
pub struct Budget {
    pub deadline: Option<Instant>,
    pub max_evaluations: Option<u64>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn seconds(secs: f64) -> Self {
        Budget {
            deadline: Some(Instant::now() + Duration::from_secs_f64(secs.max(0.0))),
            max_evaluations: None,
        }
    }

    pub fn with_max_evaluations(mut self, max: Option<u64>) -> Self {
        self.max_evaluations = max;
        self
    }
}

/// Scoring front-end shared by all algorithms: owns the tracker, enforces
/// the budget, and skips rescoring a graph identical to the previous one.
pub struct Evaluator<'a> {
    conj: &'a Conjecture,
    tracker: BestTracker,
    budget: Budget,
    last: Option<(Graph, ScoreReport)>,
}

impl<'a> Evaluator<'a> {
    pub fn new(conj: &'a Conjecture, budget: Budget) -> Self {
        Evaluator {
            conj,
            tracker: BestTracker::new(),
            budget,
            last: None,
        }
    }

    pub fn conjecture(&self) -> &Conjecture {
        self.conj
    }

    pub fn evaluate(&mut self, state: &BuildState) -> f64 {
        let report = match &self.last {
            Some((g, r)) if g == state.graph() => *r,
            _ => {
                let r = report_for(self.conj, state);
                self.tracker.evaluations += 1;
                self.last = Some((state.graph().clone(), r));
                r
            }
        };
        self.tracker.record(self.conj, state, report);
        report.score
    }

    /// True once a counter-example is known or the budget is spent.
    pub fn should_stop(&self) -> bool {
        if self.tracker.found_counterexample() {
            return true;
        }
        if let Some(max) = self.budget.max_evaluations {
            if self.tracker.evaluations >= max {
                return true;
            }
        }
        matches!(self.budget.deadline, Some(d) if Instant::now() >= d)
    }

    pub fn found(&self) -> bool {
        self.tracker.found_counterexample()
    }

    pub fn tracker(&self) -> &BestTracker {
        &self.tracker
    }

    pub fn into_tracker(self) -> BestTracker {
        self.tracker
    }
}

/// Move-code weights for policy-guided playouts.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    weights: Vec<f64>,
}

impl Policy {
    pub fn new(target_size: usize) -> Self {
        Policy {
            weights: vec![0.0; Move::code_space(target_size)],
        }
    }

    pub fn weight(&self, code: usize) -> f64 {
        self.weights[code]
    }

    pub fn set(&mut self, code: usize, w: f64) {
        self.weights[code] = w;
    }

    pub fn add(&mut self, code: usize, delta: f64) {
        self.weights[code] += delta;
    }

    /// Softmax probabilities over `moves`. Moves with weight `+inf` share
    /// all the mass when present.
    pub fn probabilities(&self, state: &BuildState, moves: &[Move]) -> Vec<f64> {
        let w: Vec<f64> = moves.iter().map(|&m| self.weights[state.code(m)]).collect();
        let max = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::INFINITY {
            let k = w.iter().filter(|&&x| x == f64::INFINITY).count() as f64;
            return w.iter().map(|&x| if x == f64::INFINITY { 1.0 / k } else { 0.0 }).collect();
        }
        let exp: Vec<f64> = w.iter().map(|&x| (x - max).exp()).collect();
        let z: f64 = exp.iter().sum();
        exp.into_iter().map(|e| e / z).collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, state: &BuildState, moves: &[Move], rng: &mut R) -> Move {
        let p = self.probabilities(state, moves);
        let mut x: f64 = rng.gen();
        for (i, &pi) in p.iter().enumerate() {
            if x < pi {
                return moves[i];
            }
            x -= pi;
        }
        // rounding left a sliver of mass; fall back to the last supported move
        let last = p.iter().rposition(|&pi| pi > 0.0).unwrap_or(moves.len() - 1);
        moves[last]
    }
}

#[derive(Debug, Clone)]
pub struct Playout {
    /// Score of the state the playout ended in.
    pub terminal_score: f64,
    /// Best score among every state visited, start included.
    pub best_score: f64,
    /// Moves played after the start state.
    pub moves: Vec<Move>,
    /// False when the budget or a counter-example cut the playout short.
    pub completed: bool,
}

/// Plays from `state` to a terminal state, uniformly or by `policy`,
/// scoring every state on the way.
pub fn random_playout<R: Rng + ?Sized>(
    state: &BuildState,
    policy: Option<&Policy>,
    rng: &mut R,
    eval: &mut Evaluator<'_>,
) -> Playout {
    let mut s = state.clone();
    let mut score = eval.evaluate(&s);
    let mut best = score;
    let mut moves = Vec::new();
    loop {
        if eval.should_stop() {
            return Playout {
                terminal_score: score,
                best_score: best,
                moves,
                completed: false,
            };
        }
        let legal = s.legal_moves();
        if legal.is_empty() {
            break;
        }
        let m = match policy {
            Some(p) => p.sample(&s, &legal, rng),
            None => legal[rng.gen_range(0..legal.len())],
        };
        s.play_unchecked(m);
        moves.push(m);
        score = eval.evaluate(&s);
        best = best.max(score);
    }
    Playout {
        terminal_score: score,
        best_score: best,
        moves,
        completed: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjectures::Registry;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn conj(key: &str) -> Conjecture {
        Registry::builtin().get(key).unwrap().clone()
    }

    #[test]
    fn initial_states() {
        let s = initial_state(17, GraphClass::TriangleFree).unwrap();
        assert_eq!(s.graph(), &Graph::singleton());
        assert!(s.history().is_empty());
        assert_eq!(initial_state(50, GraphClass::Tree).unwrap().graph().n(), 1);
        assert!(initial_state(0, GraphClass::Any).is_err());
    }

    #[test]
    fn legal_move_examples() {
        let k1 = initial_state(5, GraphClass::Any).unwrap();
        assert_eq!(k1.legal_moves(), vec![Move::Attach(0)]);

        let p3 = k1.replay(&[Move::Attach(0), Move::Attach(1)]).unwrap();
        let tree = initial_state(5, GraphClass::Tree).unwrap().with_stop_size(3).replay(p3.history()).unwrap();
        assert_eq!(tree.legal_moves(), vec![Move::Stop, Move::Attach(0), Move::Attach(1), Move::Attach(2)]);

        let p4 = initial_state(6, GraphClass::GirthAtLeast5)
            .unwrap()
            .replay(&[Move::Attach(0), Move::Attach(1), Move::Attach(2)])
            .unwrap();
        let moves = p4.legal_moves();
        assert!(!moves.contains(&Move::AddEdge(0, 3)));
        assert!(moves.contains(&Move::Attach(3)));
        assert!(!moves.contains(&Move::Stop));
    }

    #[test]
    fn apply_examples() {
        let k1 = initial_state(5, GraphClass::Any).unwrap();
        let k2 = k1.apply(Move::Attach(0)).unwrap();
        assert_eq!(k2.graph(), &Graph::path(2));
        assert!(k2.apply(Move::AddEdge(0, 1)).is_err());
        assert!(k2.apply(Move::Stop).is_err());
        let early = initial_state(5, GraphClass::Any).unwrap().with_stop_size(2);
        let stopped = early.apply(Move::Attach(0)).unwrap().apply(Move::Stop).unwrap();
        assert!(stopped.is_terminal());
        assert!(stopped.legal_moves().is_empty());
    }

    #[test]
    fn terminal_examples() {
        let full_tree = initial_state(3, GraphClass::Tree)
            .unwrap()
            .replay(&[Move::Attach(0), Move::Attach(0)])
            .unwrap();
        assert!(full_tree.is_terminal());
        assert!(!initial_state(5, GraphClass::Any).unwrap().is_terminal());
        // full size but edges remain
        let p3 = initial_state(3, GraphClass::Any)
            .unwrap()
            .replay(&[Move::Attach(0), Move::Attach(1)])
            .unwrap();
        assert!(!p3.is_terminal());
        assert_eq!(p3.legal_moves(), vec![Move::Stop, Move::AddEdge(0, 2)]);
        let k3 = p3.apply(Move::AddEdge(0, 2)).unwrap();
        assert!(k3.is_terminal());
    }

    #[test]
    fn codes_are_injective() {
        let t = 6;
        let mut codes = std::collections::HashSet::new();
        for j in 0..t {
            assert!(codes.insert(Move::Attach(j).code(t)));
        }
        for u in 0..t {
            for v in u + 1..t {
                assert!(codes.insert(Move::AddEdge(u, v).code(t)));
            }
        }
        assert!(codes.insert(Move::Stop.code(t)));
        assert!(codes.iter().all(|&c| c < Move::code_space(t)));
    }

    #[test]
    fn evaluate_examples() {
        let g197 = conj("graffiti-197");
        let mut s = initial_state(17, GraphClass::TriangleFree).unwrap();
        for v in 0..16 {
            s.apply_in_place(Move::Attach(v)).unwrap();
        }
        s.apply_in_place(Move::AddEdge(0, 16)).unwrap();
        let mut tracker = BestTracker::new();
        let score = evaluate(&s, &g197, &mut tracker);
        assert!((score - 0.2624).abs() < 1e-3);
        assert!(tracker.found_counterexample());

        let k2 = initial_state(2, GraphClass::Any).unwrap().apply(Move::Attach(0)).unwrap();
        let mut tracker = BestTracker::new();
        assert!((evaluate(&k2, &conj("graffiti-137"), &mut tracker) + 2.0).abs() < 1e-12);
        let k1 = initial_state(2, GraphClass::Any).unwrap();
        for c in Registry::builtin().iter() {
            assert_eq!(evaluate(&k1, c, &mut tracker), f64::NEG_INFINITY);
        }
    }

    #[test]
    fn playouts() {
        let g301 = conj("graffiti-301");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tree3 = initial_state(3, GraphClass::Tree).unwrap();
        for _ in 0..20 {
            let mut eval = Evaluator::new(&g301, Budget::unlimited());
            let p = random_playout(&tree3, None, &mut rng, &mut eval);
            let end = tree3.replay(&p.moves).unwrap();
            assert_eq!(end.graph().n(), 3);
            assert_eq!(end.graph().edge_count(), 2);
            assert!(p.completed);
        }

        let terminal = tree3.replay(&[Move::Attach(0), Move::Attach(1)]).unwrap();
        let mut eval = Evaluator::new(&g301, Budget::unlimited());
        let p = random_playout(&terminal, None, &mut rng, &mut eval);
        assert!(p.moves.is_empty());
        assert_eq!(p.terminal_score, eval.evaluate(&terminal));
    }

    #[test]
    fn infinite_weight_forces_move() {
        let g = conj("graffiti-301");
        let start = initial_state(6, GraphClass::Tree).unwrap();
        let mut policy = Policy::new(6);
        policy.set(Move::Attach(0).code(6), f64::INFINITY);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut eval = Evaluator::new(&g, Budget::unlimited());
        let p = random_playout(&start, Some(&policy), &mut rng, &mut eval);
        assert!(p.moves.iter().all(|&m| m == Move::Attach(0)));
        assert_eq!(start.replay(&p.moves).unwrap().graph(), &Graph::star(5));
    }

    #[test]
    fn seeded_playouts_repeat() {
        let g = conj("graffiti-29");
        let start = initial_state(7, GraphClass::Any).unwrap();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut eval = Evaluator::new(&g, Budget::unlimited());
            random_playout(&start, None, &mut rng, &mut eval).moves
        };
        assert_eq!(run(11), run(11));
    }
}
