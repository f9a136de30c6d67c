//! Nested Monte Carlo search and its lazy (pruning) variant.

use crate::game::{random_playout, BuildState, Evaluator, Move};
use crate::search::{SearchParams, SearchRng, Sequence};

fn playout(state: &BuildState, eval: &mut Evaluator<'_>, rng: &mut SearchRng) -> Sequence {
    let p = random_playout(state, None, rng, eval);
    Sequence {
        score: p.terminal_score,
        moves: p.moves,
    }
}

fn child(state: &BuildState, m: Move) -> BuildState {
    let mut c = state.clone();
    c.play_unchecked(m);
    c
}

/// Keeps `candidate` (a sequence starting with `m`) if it beats `best`.
fn offer(best: &mut Option<Sequence>, m: Move, candidate: Sequence) {
    if best.as_ref().map_or(true, |b| candidate.score > b.score) {
        let mut moves = Vec::with_capacity(candidate.moves.len() + 1);
        moves.push(m);
        moves.extend(candidate.moves);
        *best = Some(Sequence {
            score: candidate.score,
            moves,
        });
    }
}

/// Follows the first move of the best sequence; returns `false` if there is none.
fn advance(state: &mut BuildState, best: &mut Option<Sequence>, played: &mut Vec<Move>) -> bool {
    let Some(seq) = best.as_mut() else {
        return false;
    };
    if seq.moves.is_empty() {
        return false;
    }
    let m = seq.moves.remove(0);
    state.play_unchecked(m);
    played.push(m);
    true
}

fn finish(played: Vec<Move>, best: Option<Sequence>) -> Sequence {
    match best {
        Some(seq) => {
            let mut moves = played;
            moves.extend(seq.moves);
            Sequence {
                score: seq.score,
                moves,
            }
        }
        None => Sequence {
            score: f64::NEG_INFINITY,
            moves: played,
        },
    }
}

/// Level 0 is a uniform playout. Level `L` tries every legal move with a
/// level `L - 1` search, then commits to the first move of the best
/// sequence seen so far, until the game ends.
pub fn nmcs_level(state: &BuildState, level: u32, eval: &mut Evaluator<'_>, rng: &mut SearchRng) -> Sequence {
    if level == 0 {
        return playout(state, eval, rng);
    }
    let mut s = state.clone();
    let mut played = Vec::new();
    let mut best: Option<Sequence> = None;
    'game: loop {
        let moves = s.legal_moves();
        if moves.is_empty() {
            break;
        }
        for m in moves {
            let result = nmcs_level(&child(&s, m), level - 1, eval, rng);
            offer(&mut best, m, result);
            if eval.should_stop() {
                break 'game;
            }
        }
        if !advance(&mut s, &mut best, &mut played) {
            break;
        }
    }
    finish(played, best)
}

/// Indices of children that survive pruning, in move order.
///
/// With a positive best pre-score, children below `ratio * best` are cut.
/// Otherwise the threshold is meaningless, and the top
/// `max(1, ceil((1 - ratio) * k))` children by pre-score survive, so the
/// ratio keeps the same direction (higher prunes more).
pub(crate) fn survivors(prescores: &[f64], ratio: f64) -> Vec<usize> {
    let k = prescores.len();
    if k == 0 {
        return Vec::new();
    }
    let best = prescores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if best > 0.0 {
        let threshold = ratio * best;
        return (0..k).filter(|&i| prescores[i] >= threshold).collect();
    }
    let keep = (((1.0 - ratio) * k as f64).ceil() as usize).clamp(1, k);
    let mut order: Vec<usize> = (0..k).collect();
    // stable: equal pre-scores keep move order
    order.sort_by(|&a, &b| prescores[b].total_cmp(&prescores[a]));
    let mut kept = order[..keep].to_vec();
    kept.sort_unstable();
    kept
}

/// Like [`nmcs_level`], but every child is first scored by a few playouts
/// and only promising children get the costly lower-level search.
pub fn lnmcs_level(
    state: &BuildState,
    level: u32,
    params: &SearchParams,
    eval: &mut Evaluator<'_>,
    rng: &mut SearchRng,
) -> Sequence {
    if level == 0 {
        return playout(state, eval, rng);
    }
    let mut s = state.clone();
    let mut played = Vec::new();
    let mut best: Option<Sequence> = None;
    'game: loop {
        let moves = s.legal_moves();
        if moves.is_empty() {
            break;
        }
        let children: Vec<BuildState> = moves.iter().map(|&m| child(&s, m)).collect();
        let mut prescores = Vec::with_capacity(children.len());
        for (c, &m) in children.iter().zip(&moves) {
            let mut pre = f64::NEG_INFINITY;
            for _ in 0..params.lnmcs_playouts {
                let p = playout(c, eval, rng);
                pre = pre.max(p.score);
                offer(&mut best, m, p);
                if eval.should_stop() {
                    break 'game;
                }
            }
            prescores.push(pre);
        }
        for i in survivors(&prescores, params.lnmcs_ratio) {
            let result = lnmcs_level(&children[i], level - 1, params, eval, rng);
            offer(&mut best, moves[i], result);
            if eval.should_stop() {
                break 'game;
            }
        }
        if !advance(&mut s, &mut best, &mut played) {
            break;
        }
    }
    finish(played, best)
}
