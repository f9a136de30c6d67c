//! Deterministic best-first and beam search.
//!
//! Neither strategy plays `Stop`: a stopped child has the same graph as its
//! parent, which was already scored. Identical labeled graphs reached by
//! different move orders are expanded once.

use std::cmp::Reverse;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashSet};
use std::hash::{Hash, Hasher};

use ordered_float::OrderedFloat;

use crate::game::{BuildState, Evaluator, Move};
use crate::search::SearchParams;

fn fingerprint(state: &BuildState) -> u64 {
    let mut h = DefaultHasher::new();
    state.graph().hash(&mut h);
    h.finish()
}

fn expansions(state: &BuildState) -> impl Iterator<Item = Move> {
    state.legal_moves().into_iter().filter(|m| *m != Move::Stop)
}

/// Arena entry: states are rebuilt from the root when popped, so the open
/// list costs a few words per entry rather than a whole graph.
struct Entry {
    parent: u32,
    mv: Move,
}

const ROOT: u32 = u32::MAX;

fn rebuild(root: &BuildState, arena: &[Entry], mut id: u32) -> BuildState {
    let mut moves = Vec::new();
    while id != ROOT {
        let e = &arena[id as usize];
        moves.push(e.mv);
        id = e.parent;
    }
    let mut s = root.clone();
    for m in moves.into_iter().rev() {
        s.play_unchecked(m);
    }
    s
}

/// Greedy best-first search: always expands the open state with the
/// highest score, ties going to the one inserted first. Past
/// `gbfs_open_cap` entries the worst are dropped; returns how many.
pub fn gbfs(root: &BuildState, params: &SearchParams, eval: &mut Evaluator<'_>) -> u64 {
    let mut arena: Vec<Entry> = Vec::new();
    let mut open: BTreeMap<(OrderedFloat<f64>, Reverse<u64>), u32> = BTreeMap::new();
    let mut seen: HashSet<u64> = HashSet::new();
    let mut seq = 0u64;
    let mut discarded = 0u64;

    let score = eval.evaluate(root);
    seen.insert(fingerprint(root));
    if eval.should_stop() || root.is_terminal() {
        return 0;
    }
    open.insert((OrderedFloat(score), Reverse(seq)), ROOT);

    while let Some((_, id)) = open.pop_last() {
        let state = rebuild(root, &arena, id);
        for m in expansions(&state) {
            let mut child = state.clone();
            child.play_unchecked(m);
            if !seen.insert(fingerprint(&child)) {
                continue;
            }
            let score = eval.evaluate(&child);
            if eval.should_stop() {
                return discarded;
            }
            if child.is_terminal() {
                continue;
            }
            let child_id = arena.len() as u32;
            arena.push(Entry { parent: id, mv: m });
            seq += 1;
            open.insert((OrderedFloat(score), Reverse(seq)), child_id);
            if open.len() > params.gbfs_open_cap {
                open.pop_first();
                discarded += 1;
            }
        }
    }
    discarded
}

/// Level-synchronous beam search: every child of the current beam is
/// scored, and the `width` best non-terminal ones form the next beam.
pub fn beam_search(root: &BuildState, width: usize, eval: &mut Evaluator<'_>) {
    eval.evaluate(root);
    if eval.should_stop() || root.is_terminal() {
        return;
    }
    let mut beam = vec![root.clone()];
    while !beam.is_empty() {
        let mut seen = HashSet::new();
        let mut next: Vec<(f64, BuildState)> = Vec::new();
        for state in &beam {
            for m in expansions(state) {
                let mut child = state.clone();
                child.play_unchecked(m);
                if !seen.insert(fingerprint(&child)) {
                    continue;
                }
                let score = eval.evaluate(&child);
                if eval.should_stop() {
                    return;
                }
                if !child.is_terminal() {
                    next.push((score, child));
                }
            }
        }
        // stable: equal scores keep generation order
        next.sort_by(|a, b| b.0.total_cmp(&a.0));
        next.truncate(width);
        beam = next.into_iter().map(|(_, s)| s).collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjectures::Registry;
    use crate::game::{initial_state, Budget};
    use crate::graph::GraphClass;

    fn setup(id: &str) -> crate::conjectures::Conjecture {
        Registry::builtin().get(id).unwrap().clone()
    }

    #[test]
    fn gbfs_is_deterministic() {
        let conj = setup("graffiti-301");
        let root = initial_state(7, GraphClass::Tree).unwrap();
        let run = || {
            let mut e = Evaluator::new(&conj, Budget::unlimited().with_max_evaluations(Some(500)));
            gbfs(&root, &SearchParams::default(), &mut e);
            let t = e.into_tracker();
            (t.best_score(), t.best().map(|s| s.state.history().to_vec()))
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn gbfs_cap_discards() {
        let conj = setup("graffiti-301");
        let root = initial_state(6, GraphClass::Tree).unwrap();
        let params = SearchParams { gbfs_open_cap: 2, ..Default::default() };
        let mut e = Evaluator::new(&conj, Budget::unlimited());
        assert!(gbfs(&root, &params, &mut e) > 0);
    }

    #[test]
    fn gbfs_exhausts_small_tree_game() {
        // labeled trees on at most 4 vertices grown by attachment
        let conj = setup("graffiti-301");
        let root = initial_state(4, GraphClass::Tree).unwrap();
        let mut e = Evaluator::new(&conj, Budget::unlimited());
        assert_eq!(gbfs(&root, &SearchParams::default(), &mut e), 0);
        // K1, K2, two paths P3 by anchor, then 3 + 3 + 3 + 3 attachments deduped
        assert!(e.tracker().evaluations() >= 4);
    }

    #[test]
    fn beam_widths() {
        let conj = setup("graffiti-301");
        let root = initial_state(8, GraphClass::Tree).unwrap();
        let mut narrow = Evaluator::new(&conj, Budget::unlimited());
        beam_search(&root, 1, &mut narrow);
        let mut wide = Evaluator::new(&conj, Budget::unlimited());
        beam_search(&root, 50, &mut wide);
        assert!(wide.tracker().evaluations() > narrow.tracker().evaluations());
        assert!(wide.tracker().best_score() >= narrow.tracker().best_score() - 1e-12 || wide.found());
    }

    #[test]
    fn rebuild_follows_parents() {
        let root = initial_state(5, GraphClass::Tree).unwrap();
        let arena = vec![
            Entry { parent: ROOT, mv: Move::Attach(0) },
            Entry { parent: 0, mv: Move::Attach(1) },
        ];
        let s = rebuild(&root, &arena, 1);
        assert_eq!(s.history(), &[Move::Attach(0), Move::Attach(1)]);
        assert_eq!(s.graph().n(), 3);
    }
}
