//! Finite covers with mesh control.
//!
//! [`fine_cover`] subdivides every edge uniformly into closed segments
//! shorter than the requested mesh. Each member is a nondegenerate closed
//! segment, hence connected and equal to the closure of its interior; the
//! union is the whole graph exactly.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::graph::{EdgeId, MetricGraph};
use crate::num::{q_max, Q};
use crate::subset::{DerivedGraph, Seg, Subcontinuum};

/// A finite cover by subcontinua, with its recorded mesh (max member
/// diameter, computed exactly).
#[derive(Clone, Debug)]
pub struct FiniteCover {
    pub members: Vec<Subcontinuum>,
    pub mesh: Q,
}

impl FiniteCover {
    pub fn from_members(g: &MetricGraph, members: Vec<Subcontinuum>) -> FiniteCover {
        let mesh = members
            .iter()
            .fold(Q::zero(), |acc, m| q_max(acc, m.diameter(g)));
        FiniteCover { members, mesh }
    }

    /// Exact union-equals-graph check.
    pub fn covers(&self, g: &MetricGraph) -> bool {
        let mut u = Subcontinuum::empty();
        for m in &self.members {
            u = u.union(g, m);
        }
        u == Subcontinuum::whole(g)
    }
}

/// Cover of the whole graph by closed segments of length `< eps`, formed by
/// uniform subdivision of each edge.
pub fn fine_cover(g: &MetricGraph, eps: &Q) -> FiniteCover {
    debug_assert!(eps.is_positive());
    let members = segment_members(g, eps)
        .into_iter()
        .map(|(e, s)| Subcontinuum::from_raw(g, vec![(e, s)]))
        .collect();
    FiniteCover::from_members(g, members)
}

fn segment_members(g: &MetricGraph, eps: &Q) -> Vec<(EdgeId, Seg)> {
    let mut out = Vec::new();
    for e_id in g.edge_ids() {
        let len = &g.edge(e_id).length;
        // smallest count making each piece strictly shorter than eps
        let ratio = len / eps;
        let mut count: num_bigint::BigInt = ratio.floor().to_integer() + 1;
        if count < 1.into() {
            count = 1.into();
        }
        let count_q = Q::from_integer(count.clone());
        let mut i = num_bigint::BigInt::from(0);
        while i < count {
            let lo = Q::new(i.clone(), 1.into()) / &count_q;
            let hi = Q::new(&i + 1, 1.into()) / &count_q;
            out.push((e_id, Seg::new(lo, hi)));
            i += 1;
        }
    }
    out
}

/// Cover of a connected subcontinuum `s` by closed segments of diameter
/// `< eps` that partition `s` exactly (members are subsegments of `s`, their
/// union is `s`, and interiors are pairwise disjoint).
pub fn fine_cover_of(g: &MetricGraph, s: &Subcontinuum, eps: &Q) -> Vec<Subcontinuum> {
    debug_assert!(s.is_connected(g));
    let derived = DerivedGraph::build(g, s).expect("cover of a nondegenerate connected set");
    let inner = fine_cover(&derived.graph, eps);
    inner
        .members
        .into_iter()
        .map(|m| derived.sub_to_parent(g, &m))
        .collect()
}

/// The member containing a given point, chosen canonically (first in order).
pub fn member_containing<'a>(
    g: &MetricGraph,
    members: &'a [Subcontinuum],
    p: &crate::graph::PointRef,
) -> Option<&'a Subcontinuum> {
    members.iter().find(|m| m.contains_point(g, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{circle_graph, interval_graph, Edge, PointRef, VertexId};
    use crate::num::{qi, qr};

    #[test]
    fn unit_interval_cover_quarters() {
        let g = interval_graph();
        let c = fine_cover(&g, &qr(3, 10));
        assert_eq!(c.members.len(), 4);
        assert_eq!(c.mesh, qr(1, 4));
        assert!(c.covers(&g));
        assert!(c.mesh < qr(3, 10));
        for m in &c.members {
            assert!(m.is_connected(&g));
            assert!(m.is_closure_of_interior(&g));
        }
    }

    #[test]
    fn circle_cover_quarter_arcs() {
        let g = circle_graph(qi(1));
        let c = fine_cover(&g, &qr(3, 10));
        assert_eq!(c.members.len(), 4);
        assert_eq!(c.mesh, qr(1, 4));
        assert!(c.covers(&g));
    }

    #[test]
    fn theta_graph_cover_thirds() {
        // Two vertices joined by three unit edges.
        let mk = |from, to| Edge {
            from: VertexId(from),
            to: VertexId(to),
            length: qi(1),
        };
        let g = crate::graph::MetricGraph::new(2, vec![mk(0, 1), mk(0, 1), mk(0, 1)]).unwrap();
        let c = fine_cover(&g, &qr(2, 5));
        assert_eq!(c.members.len(), 9);
        assert_eq!(c.mesh, qr(1, 3));
        assert!(c.covers(&g));
        for m in &c.members {
            assert!(m.is_connected(&g));
        }
    }

    #[test]
    fn subcontinuum_refinement_partitions() {
        let g = interval_graph();
        let s = Subcontinuum::from_raw(
            &g,
            vec![(crate::graph::EdgeId(0), Seg::new(qr(1, 4), qr(7, 8)))],
        );
        let members = fine_cover_of(&g, &s, &qr(1, 5));
        let mut u = Subcontinuum::empty();
        for m in &members {
            assert!(m.diameter(&g) < qr(1, 5));
            assert!(s.includes(&g, m));
            u = u.union(&g, m);
        }
        assert_eq!(u, s);
        let _ = member_containing(&g, &members, &PointRef::new(crate::graph::EdgeId(0), qr(1, 2)))
            .unwrap();
    }
}
