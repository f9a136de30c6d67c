//! Monte Carlo tree search: UCT, RAVE and GRAVE share one tree.
//!
//! Nodes hold statistics only; states are rebuilt by replaying moves while
//! descending. Rewards are squashed margins in `(0, 1)`.

use std::collections::HashMap;

use crate::game::{random_playout, BuildState, Evaluator, Move};
use crate::search::{reward, SearchParams, SearchRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreePolicy {
    /// UCB1 with unvisited children tried first, in move order.
    Uct,
    /// Blends each node's own all-moves-as-first statistics with the mean.
    Rave,
    /// Like RAVE, but reads AMAF statistics from the closest ancestor with
    /// at least `rave_ref` playouts (the root as a last resort).
    Grave,
}

#[derive(Debug, Clone, Copy, Default)]
struct Stat {
    visits: u32,
    total: f64,
}

impl Stat {
    fn mean(&self) -> f64 {
        if self.visits == 0 {
            0.0
        } else {
            self.total / self.visits as f64
        }
    }

    fn add(&mut self, r: f64) {
        self.visits += 1;
        self.total += r;
    }
}

#[derive(Debug)]
struct Node {
    parent: Option<usize>,
    children: Vec<(Move, usize)>,
    stat: Stat,
    amaf: HashMap<u32, Stat>,
    /// Known terminal score, cached to avoid rescoring.
    terminal: Option<f64>,
    /// Every state below has been expanded into the tree.
    exhausted: bool,
}

impl Node {
    fn new(parent: Option<usize>) -> Self {
        Node {
            parent,
            children: Vec::new(),
            stat: Stat::default(),
            amaf: HashMap::new(),
            terminal: None,
            exhausted: false,
        }
    }

    fn child(&self, m: Move) -> Option<usize> {
        self.children.iter().find(|(cm, _)| *cm == m).map(|&(_, id)| id)
    }
}

struct Tree<'p> {
    nodes: Vec<Node>,
    policy: TreePolicy,
    params: &'p SearchParams,
}

fn ucb(mean: f64, c: f64, parent_visits: u32, visits: u32) -> f64 {
    mean + c * ((parent_visits.max(1) as f64).ln() / visits as f64).sqrt()
}

impl Tree<'_> {
    fn amaf_source(&self, node: usize) -> usize {
        match self.policy {
            TreePolicy::Uct | TreePolicy::Rave => node,
            TreePolicy::Grave => {
                let mut id = node;
                loop {
                    let n = &self.nodes[id];
                    if n.stat.visits >= self.params.rave_ref {
                        return id;
                    }
                    match n.parent {
                        Some(p) => id = p,
                        None => return id,
                    }
                }
            }
        }
    }

    /// Picks the move to follow from `node`; `legal` is non-empty.
    fn select(&self, node: usize, state: &BuildState, legal: &[Move]) -> Move {
        let n = &self.nodes[node];
        let c = self.params.uct_constant;
        let parent_visits = n.stat.visits;
        match self.policy {
            TreePolicy::Uct => {
                if n.children.len() < legal.len() {
                    return legal[n.children.len()];
                }
                let mut best = (f64::NEG_INFINITY, legal[0]);
                for &(m, id) in &n.children {
                    let child = &self.nodes[id];
                    if child.exhausted && !n.exhausted {
                        continue;
                    }
                    let v = ucb(child.stat.mean(), c, parent_visits, child.stat.visits);
                    if v > best.0 {
                        best = (v, m);
                    }
                }
                best.1
            }
            TreePolicy::Rave | TreePolicy::Grave => {
                let source = &self.nodes[self.amaf_source(node)].amaf;
                let bias = self.params.rave_bias;
                let mut best: Option<(f64, Move)> = None;
                for &m in legal {
                    let code = state.code(m) as u32;
                    let amaf = source.get(&code).copied().unwrap_or_default();
                    let child = n.child(m).map(|id| &self.nodes[id]);
                    let v = match child {
                        Some(ch) if ch.exhausted && !n.exhausted => continue,
                        Some(ch) if ch.stat.visits > 0 => {
                            let (p, a) = (ch.stat.visits as f64, amaf.visits as f64);
                            let beta = a / (a + p + bias * a * p);
                            (1.0 - beta) * ch.stat.mean() + beta * amaf.mean() + ucb(0.0, c, parent_visits, ch.stat.visits)
                        }
                        _ if amaf.visits > 0 => amaf.mean() + ucb(0.0, c, parent_visits, 1),
                        _ => f64::INFINITY,
                    };
                    if best.map_or(true, |(bv, _)| v > bv) {
                        best = Some((v, m));
                    }
                }
                best.map_or(legal[0], |(_, m)| m)
            }
        }
    }

    fn refresh_exhausted(&mut self, node: usize, legal_count: usize) {
        let n = &self.nodes[node];
        if n.children.len() == legal_count && n.children.iter().all(|&(_, id)| self.nodes[id].exhausted) {
            self.nodes[node].exhausted = true;
        }
    }
}

/// Iterates select / expand / playout / backpropagate until the budget
/// ends, a counter-example is found, or the whole game tree is expanded.
pub fn mcts(
    root: &BuildState,
    policy: TreePolicy,
    params: &SearchParams,
    eval: &mut Evaluator<'_>,
    rng: &mut SearchRng,
) {
    let mut tree = Tree {
        nodes: vec![Node::new(None)],
        policy,
        params,
    };
    let track_amaf = policy != TreePolicy::Uct;

    while !eval.should_stop() && !tree.nodes[0].exhausted {
        let mut state = root.clone();
        let mut node = 0;
        let mut path = vec![0usize];
        let mut sequence: Vec<Move> = Vec::new();
        let mut leaf_score = None;

        loop {
            if let Some(score) = tree.nodes[node].terminal {
                leaf_score = Some(score);
                break;
            }
            let legal = state.legal_moves();
            if legal.is_empty() {
                let score = eval.evaluate(&state);
                let n = &mut tree.nodes[node];
                n.terminal = Some(score);
                n.exhausted = true;
                leaf_score = Some(score);
                break;
            }
            let m = tree.select(node, &state, &legal);
            state.play_unchecked(m);
            sequence.push(m);
            match tree.nodes[node].child(m) {
                Some(id) => {
                    node = id;
                    path.push(id);
                }
                None => {
                    if tree.nodes.len() < params.tree_node_cap {
                        let id = tree.nodes.len();
                        tree.nodes.push(Node::new(Some(node)));
                        tree.nodes[node].children.push((m, id));
                        node = id;
                        path.push(id);
                    }
                    break;
                }
            }
        }

        let (score, tail) = match leaf_score {
            Some(s) => (s, Vec::new()),
            None => {
                let p = random_playout(&state, None, rng, eval);
                if p.completed && p.moves.is_empty() {
                    let n = &mut tree.nodes[node];
                    n.terminal = Some(p.terminal_score);
                    n.exhausted = true;
                }
                (p.terminal_score, p.moves)
            }
        };

        let r = reward(score);
        sequence.extend(tail);
        for (depth, &id) in path.iter().enumerate() {
            tree.nodes[id].stat.add(r);
            if track_amaf {
                let mut seen = std::collections::HashSet::new();
                for m in &sequence[depth..] {
                    let code = m.code(root.target_size()) as u32;
                    if seen.insert(code) {
                        tree.nodes[id].amaf.entry(code).or_default().add(r);
                    }
                }
            }
        }

        // exhaustion propagates upward along the path just taken
        let mut replay = root.clone();
        let mut counts = Vec::with_capacity(path.len());
        for (i, _) in path.iter().enumerate() {
            counts.push(replay.legal_moves().len());
            if i < path.len() - 1 {
                replay.play_unchecked(sequence[i]);
            }
        }
        for (i, &id) in path.iter().enumerate().rev() {
            if !tree.nodes[id].exhausted {
                tree.refresh_exhausted(id, counts[i]);
            }
            if !tree.nodes[id].exhausted {
                break;
            }
        }
    }
}
