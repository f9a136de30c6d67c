//! Shared fixtures for the kernel benchmarks.

use refute_core::Graph;

/// Cycle with a pendant path, a typical mid-search shape.
pub fn lollipop(cycle: usize, tail: usize) -> Graph {
    let mut g = Graph::cycle(cycle);
    let mut last = 0;
    for _ in 0..tail {
        last = g.attach_vertex(last).expect("anchor exists");
    }
    g
}
