//! Nested rollout policy adaptation.

use crate::game::{random_playout, BuildState, Evaluator, Move, Policy};
use crate::search::{SearchParams, SearchRng, Sequence};

/// Shifts `policy` toward `moves` played from `root`: each chosen code
/// gains `alpha`, and every legal alternative loses `alpha` times its
/// softmax probability under the pre-adaptation weights.
pub fn adapt(policy: &Policy, root: &BuildState, moves: &[Move], alpha: f64) -> Policy {
    let mut next = policy.clone();
    let mut s = root.clone();
    for &m in moves {
        let legal = s.legal_moves();
        let probs = policy.probabilities(&s, &legal);
        next.add(s.code(m), alpha);
        for (&alt, p) in legal.iter().zip(probs) {
            next.add(s.code(alt), -alpha * p);
        }
        s.play_unchecked(m);
    }
    next
}

fn level(
    root: &BuildState,
    depth: u32,
    policy: Policy,
    params: &SearchParams,
    eval: &mut Evaluator<'_>,
    rng: &mut SearchRng,
) -> Sequence {
    if depth == 0 {
        let p = random_playout(root, Some(&policy), rng, eval);
        return Sequence {
            score: p.terminal_score,
            moves: p.moves,
        };
    }
    let mut policy = policy;
    let mut best = Sequence::empty();
    let mut have_best = false;
    for _ in 0..params.nrpa_iterations {
        let result = level(root, depth - 1, policy.clone(), params, eval, rng);
        if eval.should_stop() {
            if !have_best || result.score >= best.score {
                best = result;
            }
            break;
        }
        if !have_best || result.score >= best.score {
            best = result;
            have_best = true;
        }
        policy = adapt(&policy, root, &best.moves, params.nrpa_alpha);
    }
    best
}

/// Runs NRPA at `depth` levels from fresh (all-zero) weights.
pub fn nrpa_level(
    root: &BuildState,
    depth: u32,
    params: &SearchParams,
    eval: &mut Evaluator<'_>,
    rng: &mut SearchRng,
) -> Sequence {
    level(root, depth, Policy::new(root.target_size()), params, eval, rng)
}
