//! Cut-point topology on metric graphs.
//!
//! Implements the combinatorial specialization used for graphs: points are
//! classified by removal connectivity, base points for the construction are
//! selected canonically, non-cut points are split into two end continua, and
//! order-2 local cut points are opened into a pair of endpoints by surgery.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::cover::fine_cover;
use crate::graph::{CanonPoint, Edge, EdgeId, MetricGraph, PointRef, VertexId};
use crate::num::{pow2, Q};
use crate::path::{geodesic_path, Path};
use crate::plmap::{EdgeMap, PlMap};
use crate::subset::{Seg, Subcontinuum};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MengerOrder {
    Finite(u32),
    Unbounded,
}

/// Removal/neighborhood classification of a point.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PointClass {
    pub is_cut_point: bool,
    pub is_local_cut_point: bool,
    pub menger_order: MengerOrder,
    pub is_endpoint: bool,
}

/// Which clause of the base-point dichotomy a selected point satisfies.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BaseCase {
    NotLocalCut,
    Order2LocalCut,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CutError {
    CutPoint,
    NotEligible,
}

impl fmt::Display for CutError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutError::CutPoint => write!(f, "point is a cut point"),
            CutError::NotEligible => {
                write!(f, "point is not an order-2 local cut point without being a cut point")
            }
        }
    }
}

/// Classifies a point: cut/local-cut flags, Menger order, endpoint flag.
///
/// On a graph: edge-interior points are always local cut points of order 2
/// and cut the space iff their edge is a bridge; a vertex has order equal to
/// its degree (loops counted twice), is an endpoint iff the degree is 1, and
/// is a local cut point iff the degree is at least 2.
pub fn classify_point(g: &MetricGraph, p: &PointRef) -> PointClass {
    match g.canon(p) {
        CanonPoint::Inner(e, _) => PointClass {
            is_cut_point: g.is_bridge(e),
            is_local_cut_point: true,
            menger_order: MengerOrder::Finite(2),
            is_endpoint: false,
        },
        CanonPoint::Vertex(v) => {
            let deg = g.degree(v) as u32;
            PointClass {
                is_cut_point: g.vertex_split_components(v) > 1,
                is_local_cut_point: deg >= 2,
                menger_order: MengerOrder::Finite(deg.max(1)),
                is_endpoint: deg == 1,
            }
        }
    }
}

/// Selects a canonical base point: a degree-1 vertex when one exists (not a
/// local cut point), otherwise the midpoint of the lowest non-bridge edge
/// (a local cut point of order 2 that is not a cut point).
pub fn select_base_point(g: &MetricGraph) -> (PointRef, BaseCase) {
    for e in g.edge_ids() {
        let edge = g.edge(e);
        for (v, t) in [(edge.from, Q::zero()), (edge.to, Q::one())] {
            if g.degree(v) == 1 {
                return (PointRef::new(e, t), BaseCase::NotLocalCut);
            }
        }
    }
    for e in g.edge_ids() {
        if !g.is_bridge(e) {
            return (
                PointRef::new(e, Q::new(1.into(), 2.into())),
                BaseCase::Order2LocalCut,
            );
        }
    }
    unreachable!("a connected graph with an edge has a leaf or a non-bridge edge")
}

/// The graph cut open at a point: one stub vertex per local side of the cut.
/// Connected exactly when the point is not a cut point.
struct SplitAtPoint {
    graph_data: (u32, Vec<Edge>),
    /// Parent (edge, lo, hi) of each split edge.
    edge_src: Vec<(EdgeId, Q, Q)>,
    /// Stub vertices created by the cut, in canonical incidence order.
    stubs: Vec<VertexId>,
}

fn split_at(g: &MetricGraph, x: &PointRef) -> SplitAtPoint {
    match g.canon(x) {
        CanonPoint::Inner(e_cut, t) => {
            let n = g.vertex_count();
            let w1 = VertexId(n);
            let w2 = VertexId(n + 1);
            let mut edges = Vec::new();
            let mut edge_src = Vec::new();
            for e in g.edge_ids() {
                let edge = g.edge(e);
                if e == e_cut {
                    edges.push(Edge {
                        from: edge.from,
                        to: w1,
                        length: &t * &edge.length,
                    });
                    edge_src.push((e, Q::zero(), t.clone()));
                } else {
                    edges.push(edge.clone());
                    edge_src.push((e, Q::zero(), Q::one()));
                }
            }
            let edge = g.edge(e_cut);
            edges.push(Edge {
                from: w2,
                to: edge.to,
                length: (Q::one() - &t) * &edge.length,
            });
            edge_src.push((e_cut, t.clone(), Q::one()));
            SplitAtPoint {
                graph_data: (n + 2, edges),
                edge_src,
                stubs: vec![w1, w2],
            }
        }
        CanonPoint::Vertex(v) => {
            // Remap vertices: all but v keep their order; stubs appended.
            let n = g.vertex_count();
            let remap = |w: VertexId| -> VertexId {
                if w.0 < v.0 {
                    w
                } else {
                    VertexId(w.0 - 1)
                }
            };
            let base = n - 1;
            let mut edges: Vec<Edge> = Vec::new();
            let mut edge_src = Vec::new();
            let mut stub_count = 0u32;
            let mut stub_ids: Vec<VertexId> = Vec::new();
            // Incidences at v in canonical (edge, end) order, from-end first.
            let mut incid: Vec<(EdgeId, bool)> = g.incidence(v).to_vec();
            incid.sort_by_key(|&(e, is_from)| (e, !is_from));
            let mut stub_of = |e: EdgeId, is_from: bool| -> VertexId {
                let idx = incid.iter().position(|&(e2, f2)| e2 == e && f2 == is_from);
                let _ = idx;
                let id = VertexId(base + stub_count);
                stub_count += 1;
                stub_ids.push(id);
                id
            };
            for e in g.edge_ids() {
                let edge = g.edge(e);
                let from = if edge.from == v {
                    stub_of(e, true)
                } else {
                    remap(edge.from)
                };
                let to = if edge.to == v {
                    stub_of(e, false)
                } else {
                    remap(edge.to)
                };
                edges.push(Edge {
                    from,
                    to,
                    length: edge.length.clone(),
                });
                edge_src.push((e, Q::zero(), Q::one()));
            }
            SplitAtPoint {
                graph_data: (base + stub_count, edges),
                edge_src,
                stubs: stub_ids,
            }
        }
    }
}

impl SplitAtPoint {
    fn graph(&self) -> Result<MetricGraph, crate::graph::GraphError> {
        MetricGraph::new(self.graph_data.0, self.graph_data.1.clone())
    }

    fn to_parent_point(&self, p: &PointRef) -> PointRef {
        let (e, lo, hi) = &self.edge_src[p.edge.0 as usize];
        PointRef::new(*e, lo + (hi - lo) * &p.t)
    }

    fn to_parent_path(&self, path: &Path) -> Path {
        Path {
            steps: path
                .steps
                .iter()
                .map(|s| {
                    let (e, lo, hi) = &self.edge_src[s.edge.0 as usize];
                    crate::path::PathStep {
                        edge: *e,
                        from_t: lo + (hi - lo) * &s.from_t,
                        to_t: lo + (hi - lo) * &s.to_t,
                    }
                })
                .collect(),
        }
    }

    /// Split-graph location of a parent point other than the cut point.
    fn from_parent_point(&self, g: &MetricGraph, split: &MetricGraph, p: &PointRef) -> PointRef {
        for (i, (e, lo, hi)) in self.edge_src.iter().enumerate() {
            if *e == p.edge && *lo <= p.t && p.t <= *hi {
                let t = if lo == hi {
                    Q::zero()
                } else {
                    (&p.t - lo) / (hi - lo)
                };
                let cand = PointRef::new(EdgeId(i as u32), t);
                // Reject the stub ends that denote the cut point itself.
                let c = split.canon(&cand);
                if let CanonPoint::Vertex(v) = c {
                    if self.stubs.contains(&v) && g.same_point(&self.to_parent_point(&cand), p) {
                        // p equals the cut point only if caller broke the contract
                    }
                }
                return cand;
            }
        }
        // Vertex point reachable only through another edge representation.
        let c = g.canon(p);
        let q = g.point_of(&c);
        if &q == p {
            unreachable!("point not located in split graph");
        }
        self.from_parent_point(g, split, &q)
    }
}

/// Result of opening an order-2 local cut point into two endpoints.
#[derive(Debug)]
pub struct Surgery {
    /// The lifted graph with the two new endpoints.
    pub lifted: Arc<MetricGraph>,
    pub x1: PointRef,
    pub x2: PointRef,
    /// The identification map from the lifted graph onto the original.
    pub glue: PlMap,
}

/// Splits the graph at an order-2 local cut point that is not a cut point,
/// producing the lifted graph, the two replacement endpoints, and the gluing
/// map (singleton fibers away from the cut point, a two-point fiber there).
pub fn cut_surgery(g: &Arc<MetricGraph>, x: &PointRef) -> Result<Surgery, CutError> {
    let class = classify_point(g, x);
    if !(class.is_local_cut_point
        && !class.is_cut_point
        && class.menger_order == MengerOrder::Finite(2))
    {
        return Err(CutError::NotEligible);
    }
    let split = split_at(g, x);
    let lifted = Arc::new(split.graph().map_err(|_| CutError::NotEligible)?);
    debug_assert_eq!(split.stubs.len(), 2);

    // The gluing map: each lifted edge runs along its source range.
    let edges = split
        .edge_src
        .iter()
        .map(|(e, lo, hi)| EdgeMap {
            breaks: vec![Q::zero(), Q::one()],
            anchors: vec![PointRef::new(*e, lo.clone()), PointRef::new(*e, hi.clone())],
            paths: vec![Path::single(*e, lo.clone(), hi.clone())],
        })
        .collect();
    let glue = PlMap::new(lifted.clone(), g.clone(), edges).expect("gluing map is continuous");

    let stub_point = |v: VertexId| -> PointRef {
        let (e, is_from) = *lifted.incidence(v).first().expect("stub has one edge");
        PointRef::new(e, if is_from { Q::zero() } else { Q::one() })
    };
    let x1 = stub_point(split.stubs[0]);
    let x2 = stub_point(split.stubs[1]);
    Ok(Surgery {
        lifted,
        x1,
        x2,
        glue,
    })
}

/// Splits the space around a non-cut point `x`: returns `(A, B)` with
/// `x ∈ X \ B ⊆ A ⊆ B(x, eps)` (open ball), `A ∪ B = X`, both connected,
/// and `B` equal to the closure of its interior.
pub fn noncut_decomposition(
    g: &MetricGraph,
    x: &PointRef,
    eps: &Q,
) -> Result<(Subcontinuum, Subcontinuum), CutError> {
    debug_assert!(eps.is_positive());
    if classify_point(g, x).is_cut_point {
        return Err(CutError::CutPoint);
    }

    // Fine cover at eps/2, refined further until some member avoids x.
    let mut k = 1i32;
    let (near, far) = loop {
        let scale = eps * pow2(-k);
        let cover = fine_cover(g, &scale);
        let mut near: Vec<Subcontinuum> = Vec::new();
        let mut far: Vec<Subcontinuum> = Vec::new();
        for m in cover.members {
            if m.contains_point(g, x) {
                near.push(m);
            } else {
                far.push(m);
            }
        }
        if !far.is_empty() {
            break (near, far);
        }
        k += 1;
        debug_assert!(k < 64, "graph has positive diameter");
    };

    let mut a = Subcontinuum::empty();
    for m in &near {
        a = a.union(g, m);
    }

    // Join the far members by arcs avoiding x, star-shaped from the first.
    let split = split_at(g, x);
    let split_graph = split.graph().expect("non-cut point split stays connected");
    let mut b_prime = Subcontinuum::empty();
    for m in &far {
        b_prime = b_prime.union(g, m);
    }
    let hub = far[0].canonical_point(g).unwrap();
    let hub_s = split.from_parent_point(g, &split_graph, &hub);
    for m in far.iter().skip(1) {
        let target = m.canonical_point(g).unwrap();
        let target_s = split.from_parent_point(g, &split_graph, &target);
        let arc = geodesic_path(&split_graph, &hub_s, &target_s);
        let arc_parent = split.to_parent_path(&arc);
        b_prime = b_prime.union(g, &arc_parent.to_subset(g));
    }
    debug_assert!(!b_prime.contains_point(g, x));

    // Recover B as a union of closure-of-interior pieces clear of x.
    let delta = b_prime.distance_to_point(g, x);
    debug_assert!(delta.is_positive());
    let inner = fine_cover(g, &(&delta / Q::from_integer(2.into())));
    let mut b = Subcontinuum::empty();
    for m in inner.members {
        if m.intersects(g, &b_prime) {
            b = b.union(g, &m);
        }
    }

    debug_assert!(a.is_connected(g));
    debug_assert!(b.is_connected(g));
    debug_assert!(a.union(g, &b) == Subcontinuum::whole(g));
    debug_assert!(!b.contains_point(g, x));
    debug_assert!(b.is_closure_of_interior(g));
    debug_assert!(&a.max_distance_to_point(g, x) < eps);
    Ok((a, b))
}

/// The four set relations of the decomposition, checkable independently.
pub fn decomposition_holds(
    g: &MetricGraph,
    x: &PointRef,
    eps: &Q,
    a: &Subcontinuum,
    b: &Subcontinuum,
) -> bool {
    let whole = Subcontinuum::whole(g);
    let not_b = b.complement_closure(g);
    let x_set = Subcontinuum::point(g, x);
    a.union(g, b) == whole
        && !b.contains_point(g, x)
        && not_b.includes(g, &x_set)
        && a.includes(g, &not_b)
        && &a.max_distance_to_point(g, x) < eps
        && b.is_closure_of_interior(g)
        && a.is_connected(g)
        && b.is_connected(g)
}

/// Keeps `Seg` reachable for doc purposes of this module's consumers.
#[allow(dead_code)]
fn _seg_marker(_: Seg) {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{circle_graph, interval_graph};
    use crate::num::{qi, qr};

    fn y_tree() -> MetricGraph {
        let mk = |from, to| Edge {
            from: VertexId(from),
            to: VertexId(to),
            length: qi(1),
        };
        MetricGraph::new(4, vec![mk(0, 1), mk(0, 2), mk(0, 3)]).unwrap()
    }

    #[test]
    fn classify_interval_endpoint() {
        let g = interval_graph();
        let c = classify_point(&g, &PointRef::new(EdgeId(0), qi(0).into()));
        assert!(!c.is_local_cut_point);
        assert!(c.is_endpoint);
        assert_eq!(c.menger_order, MengerOrder::Finite(1));
    }

    #[test]
    fn classify_circle_interior() {
        let g = circle_graph(qi(1));
        let c = classify_point(&g, &PointRef::new(EdgeId(0), qr(1, 3)));
        assert!(c.is_local_cut_point);
        assert!(!c.is_cut_point);
        assert_eq!(c.menger_order, MengerOrder::Finite(2));
        let v = classify_point(&g, &PointRef::new(EdgeId(0), qi(0).into()));
        assert!(!v.is_cut_point); // loop vertex, still order 2
        assert_eq!(v.menger_order, MengerOrder::Finite(2));
    }

    #[test]
    fn classify_y_center() {
        let g = y_tree();
        let c = classify_point(&g, &PointRef::new(EdgeId(0), qi(0).into()));
        assert!(c.is_cut_point);
        assert_eq!(c.menger_order, MengerOrder::Finite(3));
    }

    #[test]
    fn base_point_selection() {
        let interval = interval_graph();
        let (p, case) = select_base_point(&interval);
        assert_eq!(case, BaseCase::NotLocalCut);
        assert!(interval.same_point(&p, &PointRef::new(EdgeId(0), qi(0).into())));

        let circle = circle_graph(qi(1));
        let (p, case) = select_base_point(&circle);
        assert_eq!(case, BaseCase::Order2LocalCut);
        assert_eq!(p.t, qr(1, 2));

        let y = y_tree();
        let (p, case) = select_base_point(&y);
        assert_eq!(case, BaseCase::NotLocalCut);
        assert!(classify_point(&y, &p).is_endpoint);
    }

    #[test]
    fn surgery_on_circle_gives_interval() {
        let g = Arc::new(circle_graph(qi(1)));
        let s = cut_surgery(&g, &PointRef::new(EdgeId(0), qr(1, 2))).unwrap();
        assert_eq!(s.lifted.edge_count(), 2);
        // Both new points are endpoints.
        assert!(classify_point(&s.lifted, &s.x1).is_endpoint);
        assert!(classify_point(&s.lifted, &s.x2).is_endpoint);
        // Gluing identifies exactly the two endpoints with the cut point.
        let x = PointRef::new(EdgeId(0), qr(1, 2));
        let pre = s.glue.preimage_of(&x);
        assert_eq!(pre.isolated.len(), 2);
        assert!(pre.flats.is_empty());
        // Other fibers are singletons on a sample grid.
        for k in 1..20i64 {
            let p = PointRef::new(EdgeId(0), qr(k, 21));
            if g.same_point(&p, &x) {
                continue;
            }
            let pre = s.glue.preimage_of(&p);
            assert_eq!(pre.isolated.len(), 1, "fiber at {}/21", k);
        }
    }

    #[test]
    fn surgery_rejects_leaf() {
        let g = Arc::new(interval_graph());
        let err = cut_surgery(&g, &PointRef::new(EdgeId(0), qi(0).into())).unwrap_err();
        assert_eq!(err, CutError::NotEligible);
    }

    #[test]
    fn theta_surgery_stays_connected() {
        let mk = |from, to| Edge {
            from: VertexId(from),
            to: VertexId(to),
            length: qi(1),
        };
        let g = Arc::new(MetricGraph::new(2, vec![mk(0, 1), mk(0, 1), mk(0, 1)]).unwrap());
        let s = cut_surgery(&g, &PointRef::new(EdgeId(2), qr(1, 2))).unwrap();
        assert_eq!(s.lifted.edge_count(), 4);
        assert!(classify_point(&s.lifted, &s.x1).is_endpoint);
        assert!(classify_point(&s.lifted, &s.x2).is_endpoint);
    }

    #[test]
    fn noncut_decomposition_interval_origin() {
        let g = interval_graph();
        let x = PointRef::new(EdgeId(0), qi(0).into());
        let eps = qr(1, 10);
        let (a, b) = noncut_decomposition(&g, &x, &eps).unwrap();
        assert!(decomposition_holds(&g, &x, &eps, &a, &b));
    }

    #[test]
    fn noncut_decomposition_circle() {
        let g = circle_graph(qi(1));
        let x = PointRef::new(EdgeId(0), qr(1, 4));
        let eps = qr(1, 10);
        let (a, b) = noncut_decomposition(&g, &x, &eps).unwrap();
        assert!(decomposition_holds(&g, &x, &eps, &a, &b));
    }

    #[test]
    fn noncut_decomposition_rejects_cut_point() {
        let g = y_tree();
        let center = PointRef::new(EdgeId(0), qi(0).into());
        assert_eq!(
            noncut_decomposition(&g, &center, &qr(1, 10)).unwrap_err(),
            CutError::CutPoint
        );
    }
}
