//! Closed walks that traverse every edge of a graph.
//!
//! Doubling every edge makes all vertex degrees even, so a closed walk using
//! each edge exactly twice always exists; Hierholzer's algorithm produces it
//! deterministically (lowest edge id first).

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::graph::{EdgeId, MetricGraph, VertexId};
use crate::num::Q;
use crate::path::{Path, PathStep};

/// A closed walk from `start` using every edge exactly twice.
pub fn doubled_euler_circuit(g: &MetricGraph, start: VertexId) -> Path {
    let mut remaining: Vec<u8> = vec![2; g.edge_count()];
    // (vertex, edge+orientation used to arrive there)
    let mut stack: Vec<(VertexId, Option<(EdgeId, bool)>)> = vec![(start, None)];
    let mut popped: Vec<(VertexId, Option<(EdgeId, bool)>)> = Vec::new();
    while let Some(&(v, _)) = stack.last() {
        let mut nbrs: Vec<(EdgeId, bool)> = g
            .incidence(v)
            .iter()
            .copied()
            .filter(|(e, _)| remaining[e.0 as usize] > 0)
            .collect();
        nbrs.sort_by_key(|&(e, is_from)| (e, !is_from));
        if let Some(&(e, is_from)) = nbrs.first() {
            remaining[e.0 as usize] -= 1;
            let edge = g.edge(e);
            let next = if is_from { edge.to } else { edge.from };
            stack.push((next, Some((e, is_from))));
        } else {
            popped.push(stack.pop().unwrap());
        }
    }
    popped.reverse();
    let steps = popped
        .into_iter()
        .filter_map(|(_, via)| via)
        .map(|(e, is_from)| {
            if is_from {
                PathStep {
                    edge: e,
                    from_t: Q::zero(),
                    to_t: Q::one(),
                }
            } else {
                PathStep {
                    edge: e,
                    from_t: Q::one(),
                    to_t: Q::zero(),
                }
            }
        })
        .collect();
    Path { steps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{circle_graph, Edge, MetricGraph};
    use crate::num::qi;

    #[test]
    fn walk_covers_every_edge_twice_and_closes() {
        let mk = |from, to| Edge {
            from: VertexId(from),
            to: VertexId(to),
            length: qi(1),
        };
        let g = MetricGraph::new(2, vec![mk(0, 1), mk(0, 1), mk(0, 1)]).unwrap();
        let w = doubled_euler_circuit(&g, VertexId(0));
        assert!(w.is_continuous(&g));
        assert_eq!(w.length(&g), qi(6));
        assert!(g.same_point(&w.start().unwrap(), &w.end().unwrap()));
        let mut counts = [0; 3];
        for s in &w.steps {
            counts[s.edge.0 as usize] += 1;
        }
        assert_eq!(counts, [2, 2, 2]);
    }

    #[test]
    fn walk_handles_loops() {
        let g = circle_graph(qi(1));
        let w = doubled_euler_circuit(&g, VertexId(0));
        assert_eq!(w.steps.len(), 2);
        assert!(w.is_continuous(&g));
    }
}
