//! Finite piecewise-linear metric graphs and points on them.
//!
//! A [`MetricGraph`] is a connected multigraph (loops and parallel edges
//! allowed) whose edges carry positive rational lengths. Its geodesic metric
//! makes it a computable model of a Peano continuum. Points are addressed as
//! [`PointRef`]s: an edge id plus an arclength-normalized parameter in
//! `[0,1]`, with parameters `0`/`1` identified with the edge's endpoint
//! vertices.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::num::{q_min, Q};

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexId(pub u32);

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EdgeId(pub u32);

#[derive(Clone, Debug)]
pub struct Edge {
    pub from: VertexId,
    pub to: VertexId,
    pub length: Q,
}

/// A point of the graph: edge id plus normalized parameter along that edge.
///
/// Parameters `0` and `1` denote the edge's `from`/`to` vertices, so distinct
/// `PointRef`s can denote the same point; equality questions go through
/// [`MetricGraph::canon`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointRef {
    pub edge: EdgeId,
    pub t: Q,
}

impl PointRef {
    pub fn new(edge: EdgeId, t: Q) -> Self {
        PointRef { edge, t }
    }
}

/// Canonical form of a point: either a vertex or an edge-interior position.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum CanonPoint {
    Vertex(VertexId),
    Inner(EdgeId, Q),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GraphError {
    DegenerateSpace,
    NonpositiveLength(EdgeId),
    Disconnected,
    InvalidVertex(VertexId),
    InvalidEdge(EdgeId),
    InvalidPoint,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::DegenerateSpace => write!(f, "graph must have at least one edge"),
            GraphError::NonpositiveLength(e) => write!(f, "edge {} has nonpositive length", e.0),
            GraphError::Disconnected => write!(f, "graph is not connected"),
            GraphError::InvalidVertex(v) => write!(f, "vertex id {} out of range", v.0),
            GraphError::InvalidEdge(e) => write!(f, "edge id {} out of range", e.0),
            GraphError::InvalidPoint => write!(f, "point parameter outside [0,1]"),
        }
    }
}

/// A validated, connected PL metric graph.
#[derive(Clone, Debug)]
pub struct MetricGraph {
    vertex_count: u32,
    edges: Vec<Edge>,
    /// Per vertex: incident (edge, end) pairs; `true` is the `from` end.
    /// A loop contributes two entries.
    incidence: Vec<Vec<(EdgeId, bool)>>,
    /// All-pairs geodesic distances between vertices.
    vdist: Vec<Vec<Q>>,
}

impl MetricGraph {
    /// Validates and builds a graph: connected, at least one edge, all edge
    /// lengths positive. Vertex ids must lie in `0..vertex_count`.
    pub fn new(vertex_count: u32, edges: Vec<Edge>) -> Result<Self, GraphError> {
        if edges.is_empty() {
            return Err(GraphError::DegenerateSpace);
        }
        for (i, e) in edges.iter().enumerate() {
            if e.from.0 >= vertex_count {
                return Err(GraphError::InvalidVertex(e.from));
            }
            if e.to.0 >= vertex_count {
                return Err(GraphError::InvalidVertex(e.to));
            }
            if !e.length.is_positive() {
                return Err(GraphError::NonpositiveLength(EdgeId(i as u32)));
            }
        }

        let n = vertex_count as usize;
        let mut incidence: Vec<Vec<(EdgeId, bool)>> = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            incidence[e.from.0 as usize].push((EdgeId(i as u32), true));
            incidence[e.to.0 as usize].push((EdgeId(i as u32), false));
        }

        // Connectivity over vertices; isolated vertices also disconnect.
        let mut uf = UnionFind::new(n);
        for e in &edges {
            uf.union(e.from.0 as usize, e.to.0 as usize);
        }
        let root = uf.find(edges[0].from.0 as usize);
        for v in 0..n {
            if uf.find(v) != root {
                return Err(GraphError::Disconnected);
            }
        }

        let vdist = all_pairs_distances(n, &edges);
        Ok(MetricGraph {
            vertex_count,
            edges,
            incidence,
            vdist,
        })
    }

    pub fn vertex_count(&self) -> u32 {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0 as usize]
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_count).map(VertexId)
    }

    /// Incident (edge, is-from-end) pairs; loops appear twice.
    pub fn incidence(&self, v: VertexId) -> &[(EdgeId, bool)] {
        &self.incidence[v.0 as usize]
    }

    /// Degree with loop multiplicity (a loop counts twice).
    pub fn degree(&self, v: VertexId) -> usize {
        self.incidence[v.0 as usize].len()
    }

    /// Copy with every edge length multiplied by `factor` (> 0). Point
    /// coordinates are unchanged by scaling.
    pub fn scaled(&self, factor: &Q) -> MetricGraph {
        debug_assert!(factor.is_positive());
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                from: e.from,
                to: e.to,
                length: &e.length * factor,
            })
            .collect();
        MetricGraph::new(self.vertex_count, edges).expect("scaling preserves validity")
    }

    /// Checks that `p` addresses a point of this graph.
    pub fn check_point(&self, p: &PointRef) -> Result<(), GraphError> {
        if p.edge.0 as usize >= self.edges.len() {
            return Err(GraphError::InvalidEdge(p.edge));
        }
        if p.t < Q::zero() || p.t > Q::one() {
            return Err(GraphError::InvalidPoint);
        }
        Ok(())
    }

    /// Canonical form of a point under endpoint identification.
    pub fn canon(&self, p: &PointRef) -> CanonPoint {
        let e = self.edge(p.edge);
        if p.t.is_zero() {
            CanonPoint::Vertex(e.from)
        } else if p.t.is_one() {
            CanonPoint::Vertex(e.to)
        } else {
            CanonPoint::Inner(p.edge, p.t.clone())
        }
    }

    /// Whether two point references denote the same point.
    pub fn same_point(&self, p: &PointRef, q: &PointRef) -> bool {
        self.canon(p) == self.canon(q)
    }

    /// Canonical `PointRef` for a canonical point: vertices are addressed via
    /// their lowest incident edge, preferring the `from` end.
    pub fn point_of(&self, c: &CanonPoint) -> PointRef {
        match c {
            CanonPoint::Inner(e, t) => PointRef::new(*e, t.clone()),
            CanonPoint::Vertex(v) => {
                let mut best: Option<(EdgeId, bool)> = None;
                for &(e, is_from) in self.incidence(*v) {
                    let better = match best {
                        None => true,
                        Some((be, bf)) => (e, !is_from) < (be, !bf),
                    };
                    if better {
                        best = Some((e, is_from));
                    }
                }
                let (e, is_from) = best.expect("connected graph has no isolated vertices");
                PointRef::new(e, if is_from { Q::zero() } else { Q::one() })
            }
        }
    }

    /// Geodesic (shortest-path) distance between two points.
    pub fn distance(&self, p: &PointRef, q: &PointRef) -> Q {
        let ep = self.edge(p.edge);
        let eq = self.edge(q.edge);
        // Route through endpoint vertices.
        let p_from = &p.t * &ep.length;
        let p_to = (Q::one() - &p.t) * &ep.length;
        let q_from = &q.t * &eq.length;
        let q_to = (Q::one() - &q.t) * &eq.length;
        let mut best: Option<Q> = None;
        let mut consider = |cand: Q| {
            best = Some(match best.take() {
                None => cand,
                Some(b) => q_min(b, cand),
            });
        };
        consider(&p_from + self.vdist(ep.from, eq.from) + &q_from);
        consider(&p_from + self.vdist(ep.from, eq.to) + &q_to);
        consider(&p_to + self.vdist(ep.to, eq.from) + &q_from);
        consider(&p_to + self.vdist(ep.to, eq.to) + &q_to);
        if p.edge == q.edge {
            let direct = (&p.t - &q.t) * &ep.length;
            consider(if direct.is_negative() { -direct } else { direct });
        }
        best.unwrap()
    }

    pub fn vdist(&self, a: VertexId, b: VertexId) -> &Q {
        &self.vdist[a.0 as usize][b.0 as usize]
    }

    /// A farthest point from `p`, with canonical tie-breaking (lowest edge id,
    /// then smallest parameter). Farthest points are never cut points.
    pub fn farthest_point(&self, p: &PointRef) -> PointRef {
        let mut best: Option<(Q, EdgeId, Q)> = None;
        for e_id in self.edge_ids() {
            let e = self.edge(e_id);
            let a = self.distance(p, &PointRef::new(e_id, Q::zero()));
            let b = self.distance(p, &PointRef::new(e_id, Q::one()));
            // d(p, .) along the edge is min(a + t len, b + (1-t) len); its
            // maximum sits where the two branches cross, clipped to [0,1].
            let mut cands: Vec<Q> = vec![Q::zero(), Q::one()];
            let cross = (&b - &a + &e.length) / (Q::from_integer(2.into()) * &e.length);
            if cross > Q::zero() && cross < Q::one() {
                cands.push(cross);
            }
            for t in cands {
                let val = self.distance(p, &PointRef::new(e_id, t.clone()));
                let better = match &best {
                    None => true,
                    Some((bv, be, bt)) => {
                        val > *bv || (val == *bv && (e_id, &t) < (*be, bt))
                    }
                };
                if better {
                    best = Some((val, e_id, t));
                }
            }
        }
        let (_, e, t) = best.unwrap();
        PointRef::new(e, t)
    }

    /// Number of connected components of the space with vertex `v` removed.
    pub fn vertex_split_components(&self, v: VertexId) -> usize {
        // Nodes: all other vertices plus one stub per incidence at v.
        let n = self.vertex_count as usize;
        let stubs = self.degree(v);
        let mut uf = UnionFind::new(n + stubs);
        let mut stub_iter = 0usize;
        let node_of = |vertex: VertexId, stub_idx: &mut usize| -> usize {
            if vertex == v {
                let id = n + *stub_idx;
                *stub_idx += 1;
                id
            } else {
                vertex.0 as usize
            }
        };
        let mut touched: Vec<usize> = Vec::new();
        for e in &self.edges {
            let a = node_of(e.from, &mut stub_iter);
            let b = node_of(e.to, &mut stub_iter);
            uf.union(a, b);
            touched.push(a);
            touched.push(b);
        }
        count_classes(&mut uf, &touched)
    }

    /// Number of connected components of the space with an interior point of
    /// edge `e` removed.
    pub fn edge_split_components(&self, e_id: EdgeId) -> usize {
        let n = self.vertex_count as usize;
        // Nodes: vertices plus two stubs for the split edge halves.
        let mut uf = UnionFind::new(n + 2);
        let mut touched: Vec<usize> = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if i as u32 == e_id.0 {
                uf.union(e.from.0 as usize, n);
                uf.union(e.to.0 as usize, n + 1);
                touched.extend_from_slice(&[e.from.0 as usize, n, e.to.0 as usize, n + 1]);
            } else {
                uf.union(e.from.0 as usize, e.to.0 as usize);
                touched.extend_from_slice(&[e.from.0 as usize, e.to.0 as usize]);
            }
        }
        count_classes(&mut uf, &touched)
    }

    /// Whether removing the interior of edge `e` disconnects the graph.
    pub fn is_bridge(&self, e_id: EdgeId) -> bool {
        self.edge_split_components(e_id) > 1
    }

    /// Total edge length.
    pub fn total_length(&self) -> Q {
        self.edges
            .iter()
            .fold(Q::zero(), |acc, e| acc + &e.length)
    }
}

/// The unit interval as a one-edge graph: vertex 0 at parameter 0, vertex 1
/// at parameter 1.
pub fn interval_graph() -> MetricGraph {
    MetricGraph::new(
        2,
        vec![Edge {
            from: VertexId(0),
            to: VertexId(1),
            length: Q::one(),
        }],
    )
    .unwrap()
}

/// A circle of the given circumference as a single loop edge.
pub fn circle_graph(circumference: Q) -> MetricGraph {
    MetricGraph::new(
        1,
        vec![Edge {
            from: VertexId(0),
            to: VertexId(0),
            length: circumference,
        }],
    )
    .unwrap()
}

fn all_pairs_distances(n: usize, edges: &[Edge]) -> Vec<Vec<Q>> {
    // Floyd–Warshall in exact arithmetic; None = unreachable (cannot happen
    // in validated graphs but kept local to this routine).
    let mut dist: Vec<Vec<Option<Q>>> = vec![vec![None; n]; n];
    for v in 0..n {
        dist[v][v] = Some(Q::zero());
    }
    for e in edges {
        let (a, b) = (e.from.0 as usize, e.to.0 as usize);
        let better = match &dist[a][b] {
            None => true,
            Some(d) => e.length < *d,
        };
        if better {
            dist[a][b] = Some(e.length.clone());
            dist[b][a] = Some(e.length.clone());
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = match &dist[i][k] {
                Some(d) => d.clone(),
                None => continue,
            };
            for j in 0..n {
                let dkj = match &dist[k][j] {
                    Some(d) => d,
                    None => continue,
                };
                let via = &dik + dkj;
                let better = match &dist[i][j] {
                    None => true,
                    Some(d) => via < *d,
                };
                if better {
                    dist[i][j] = Some(via);
                }
            }
        }
    }
    dist.into_iter()
        .map(|row| row.into_iter().map(|d| d.expect("graph connected")).collect())
        .collect()
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut cur = x;
        while self.parent[cur] != r {
            let next = self.parent[cur];
            self.parent[cur] = r;
            cur = next;
        }
        r
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

fn count_classes(uf: &mut UnionFind, nodes: &[usize]) -> usize {
    let mut roots: Vec<usize> = nodes.iter().map(|&x| uf.find(x)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{qi, qr};

    pub(crate) fn unit_edge(from: u32, to: u32) -> Edge {
        Edge {
            from: VertexId(from),
            to: VertexId(to),
            length: qi(1),
        }
    }

    #[test]
    fn validation_catches_defects() {
        assert_eq!(
            MetricGraph::new(2, vec![]).unwrap_err(),
            GraphError::DegenerateSpace
        );
        let zero_len = Edge {
            from: VertexId(0),
            to: VertexId(1),
            length: qi(0),
        };
        assert_eq!(
            MetricGraph::new(2, vec![zero_len]).unwrap_err(),
            GraphError::NonpositiveLength(EdgeId(0))
        );
        // Two edges sharing no vertex.
        let e1 = unit_edge(0, 1);
        let e2 = unit_edge(2, 3);
        assert_eq!(
            MetricGraph::new(4, vec![e1, e2]).unwrap_err(),
            GraphError::Disconnected
        );
    }

    #[test]
    fn single_edge_distance() {
        let g = interval_graph();
        let p = PointRef::new(EdgeId(0), qr(1, 4));
        let q = PointRef::new(EdgeId(0), qr(3, 4));
        assert_eq!(g.distance(&p, &q), qr(1, 2));
        assert_eq!(g.distance(&p, &p), qi(0));
    }

    #[test]
    fn triangle_vertex_to_opposite_midpoint() {
        // Triangle of unit edges; brute force over the finitely many edge
        // routes gives 3/2 from a vertex to the midpoint of the far side.
        let g = MetricGraph::new(3, vec![unit_edge(0, 1), unit_edge(1, 2), unit_edge(2, 0)])
            .unwrap();
        let v0 = PointRef::new(EdgeId(0), qi(0).into());
        let mid12 = PointRef::new(EdgeId(1), qr(1, 2));
        assert_eq!(g.distance(&v0, &mid12), qr(3, 2));
    }

    #[test]
    fn circle_wraps_around() {
        let g = circle_graph(qi(1));
        let p = PointRef::new(EdgeId(0), qr(1, 10));
        let q = PointRef::new(EdgeId(0), qr(9, 10));
        assert_eq!(g.distance(&p, &q), qr(2, 10));
    }

    #[test]
    fn identified_endpoints_compare_equal() {
        let g = MetricGraph::new(2, vec![unit_edge(0, 1), unit_edge(1, 0)]).unwrap();
        let p = PointRef::new(EdgeId(0), qi(1).into());
        let q = PointRef::new(EdgeId(1), qi(0).into());
        assert!(g.same_point(&p, &q));
        assert_eq!(g.distance(&p, &q), qi(0));
    }

    #[test]
    fn farthest_point_on_interval() {
        let g = interval_graph();
        let origin = PointRef::new(EdgeId(0), qi(0).into());
        let far = g.farthest_point(&origin);
        assert!(g.same_point(&far, &PointRef::new(EdgeId(0), qi(1).into())));
    }

    #[test]
    fn split_component_counts() {
        // Y-tree: center vertex 0, leaves 1,2,3.
        let g = MetricGraph::new(4, vec![unit_edge(0, 1), unit_edge(0, 2), unit_edge(0, 3)])
            .unwrap();
        assert_eq!(g.vertex_split_components(VertexId(0)), 3);
        assert_eq!(g.vertex_split_components(VertexId(1)), 1);
        assert_eq!(g.edge_split_components(EdgeId(0)), 2);
        let circle = circle_graph(qi(1));
        assert_eq!(circle.edge_split_components(EdgeId(0)), 1);
        assert_eq!(circle.vertex_split_components(VertexId(0)), 1);
    }
}
