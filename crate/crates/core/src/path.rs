//! Oriented rectifiable paths in a metric graph.
//!
//! A [`Path`] is a chain of oriented partial-edge traversals. Piecewise-linear
//! maps traverse such paths at constant speed, so paths need exact evaluation
//! by arclength, exact subpath extraction, and shortest-path construction.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use num_traits::{One, Signed, Zero};

use crate::graph::{CanonPoint, EdgeId, MetricGraph, PointRef, VertexId};
use crate::num::{q_min, Q};
use crate::subset::{DerivedGraph, Seg, Subcontinuum};

/// One oriented traversal of part of an edge; `from_t != to_t`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PathStep {
    pub edge: EdgeId,
    pub from_t: Q,
    pub to_t: Q,
}

impl PathStep {
    pub fn span(&self) -> Q {
        let d = &self.to_t - &self.from_t;
        if d.is_negative() {
            -d
        } else {
            d
        }
    }

    pub fn start(&self) -> PointRef {
        PointRef::new(self.edge, self.from_t.clone())
    }

    pub fn end(&self) -> PointRef {
        PointRef::new(self.edge, self.to_t.clone())
    }
}

/// A continuous chain of steps. The empty path is the degenerate path at a
/// point (callers keep the point separately).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Path {
    pub steps: Vec<PathStep>,
}

impl Path {
    pub fn empty() -> Path {
        Path::default()
    }

    pub fn single(edge: EdgeId, from_t: Q, to_t: Q) -> Path {
        debug_assert!(from_t != to_t);
        Path {
            steps: vec![PathStep { edge, from_t, to_t }],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn start(&self) -> Option<PointRef> {
        self.steps.first().map(|s| s.start())
    }

    pub fn end(&self) -> Option<PointRef> {
        self.steps.last().map(|s| s.end())
    }

    pub fn length(&self, g: &MetricGraph) -> Q {
        self.steps
            .iter()
            .fold(Q::zero(), |acc, s| acc + s.span() * &g.edge(s.edge).length)
    }

    /// Validates that consecutive steps share endpoints as graph points.
    pub fn is_continuous(&self, g: &MetricGraph) -> bool {
        self.steps
            .windows(2)
            .all(|w| g.same_point(&w[0].end(), &w[1].start()))
    }

    pub fn reversed(&self) -> Path {
        Path {
            steps: self
                .steps
                .iter()
                .rev()
                .map(|s| PathStep {
                    edge: s.edge,
                    from_t: s.to_t.clone(),
                    to_t: s.from_t.clone(),
                })
                .collect(),
        }
    }

    pub fn concat(mut self, g: &MetricGraph, other: Path) -> Path {
        if let (Some(e), Some(s)) = (self.end(), other.start()) {
            debug_assert!(g.same_point(&e, &s));
        }
        self.steps.extend(other.steps);
        self
    }

    /// Point at arclength `s` from the start (`0 <= s <= length`).
    pub fn eval_at_arclen(&self, g: &MetricGraph, s: &Q) -> Option<PointRef> {
        if self.steps.is_empty() {
            return None;
        }
        let mut remaining = s.clone();
        debug_assert!(!remaining.is_negative());
        for step in &self.steps {
            let len = step.span() * &g.edge(step.edge).length;
            if remaining <= len {
                let frac = if len.is_zero() {
                    Q::zero()
                } else {
                    &remaining / &len
                };
                let t = &step.from_t + (&step.to_t - &step.from_t) * frac;
                return Some(PointRef::new(step.edge, t));
            }
            remaining -= len;
        }
        // Clamp to the end for s == length with rounding-free arithmetic this
        // only happens at exact equality, handled above; keep a safe fallback.
        self.end()
    }

    /// The portion between arclengths `a <= b`, as a path (possibly empty).
    pub fn subpath(&self, g: &MetricGraph, a: &Q, b: &Q) -> Path {
        debug_assert!(a <= b);
        let mut steps = Vec::new();
        let mut cursor = Q::zero();
        for step in &self.steps {
            let len = step.span() * &g.edge(step.edge).length;
            let next = &cursor + &len;
            if &next > a && &cursor < b && !len.is_zero() {
                let lo = if a > &cursor { a.clone() } else { cursor.clone() };
                let hi = if b < &next { b.clone() } else { next.clone() };
                let f0 = (&lo - &cursor) / &len;
                let f1 = (&hi - &cursor) / &len;
                let t0 = &step.from_t + (&step.to_t - &step.from_t) * f0;
                let t1 = &step.from_t + (&step.to_t - &step.from_t) * f1;
                if t0 != t1 {
                    steps.push(PathStep {
                        edge: step.edge,
                        from_t: t0,
                        to_t: t1,
                    });
                }
            }
            cursor = next;
            if &cursor >= b {
                break;
            }
        }
        Path { steps }
    }

    /// The trace of the path as a closed segment set.
    pub fn to_subset(&self, g: &MetricGraph) -> Subcontinuum {
        let raw = self
            .steps
            .iter()
            .map(|s| {
                let (lo, hi) = if s.from_t <= s.to_t {
                    (s.from_t.clone(), s.to_t.clone())
                } else {
                    (s.to_t.clone(), s.from_t.clone())
                };
                (s.edge, Seg::new(lo, hi))
            })
            .collect();
        Subcontinuum::from_raw(g, raw)
    }

    /// Arclength positions at which the path passes through `p` (isolated
    /// crossings; a path that stays at `p` over a whole step cannot occur
    /// since steps have nonzero span).
    pub fn hits_of_point(&self, g: &MetricGraph, p: &PointRef) -> Vec<Q> {
        let target = g.canon(p);
        let mut out: Vec<Q> = Vec::new();
        let mut cursor = Q::zero();
        for step in &self.steps {
            let len = step.span() * &g.edge(step.edge).length;
            let (lo, hi) = if step.from_t <= step.to_t {
                (&step.from_t, &step.to_t)
            } else {
                (&step.to_t, &step.from_t)
            };
            let push = |pos: Q, out: &mut Vec<Q>| {
                if out.last() != Some(&pos) {
                    out.push(pos);
                }
            };
            match &target {
                CanonPoint::Inner(e, t) => {
                    if *e == step.edge && lo <= t && t <= hi {
                        let mut off = t - &step.from_t;
                        if off.is_negative() {
                            off = -off;
                        }
                        push(&cursor + off * &g.edge(step.edge).length, &mut out);
                    }
                }
                CanonPoint::Vertex(_) => {
                    for (end_t, pos_off) in [
                        (step.start(), Q::zero()),
                        (step.end(), len.clone()),
                    ] {
                        if g.canon(&end_t) == target {
                            push(&cursor + pos_off, &mut out);
                        }
                    }
                    // A vertex can only appear at step parameter 0 or 1,
                    // which are step ends whenever 0/1 lies strictly inside
                    // the traversed range -- impossible since params stay in
                    // [0,1]; ends suffice.
                }
            }
            cursor = &cursor + &len;
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Deterministic shortest path between two points (geodesic realization).
pub fn geodesic_path(g: &MetricGraph, p: &PointRef, q: &PointRef) -> Path {
    if g.same_point(p, q) {
        return Path::empty();
    }
    let ep = g.edge(p.edge);
    let eq = g.edge(q.edge);

    let mut best: Option<(Q, Path)> = None;
    let consider = |len: Q, path: Path, best: &mut Option<(Q, Path)>| {
        let better = match best {
            None => true,
            Some((b, _)) => &len < b,
        };
        if better {
            *best = Some((len, path));
        }
    };

    // Direct same-edge route.
    if p.edge == q.edge {
        let len = (&p.t - &q.t) * &ep.length;
        let len = if len.is_negative() { -len } else { len };
        consider(
            len,
            Path::single(p.edge, p.t.clone(), q.t.clone()),
            &mut best,
        );
    }

    // Routes via endpoint vertices.
    for p_from in [true, false] {
        for q_from in [true, false] {
            let (vp, p_leg_len) = if p_from {
                (ep.from, &p.t * &ep.length)
            } else {
                (ep.to, (Q::one() - &p.t) * &ep.length)
            };
            let (vq, q_leg_len) = if q_from {
                (eq.from, &q.t * &eq.length)
            } else {
                (eq.to, (Q::one() - &q.t) * &eq.length)
            };
            let mid = g.vdist(vp, vq).clone();
            let total = &p_leg_len + &mid + &q_leg_len;
            let reached = match &best {
                None => true,
                Some((b, _)) => &total < b,
            };
            if !reached {
                continue;
            }
            let mut path = Path::empty();
            if !p_leg_len.is_zero() {
                path = path.concat(
                    g,
                    Path::single(
                        p.edge,
                        p.t.clone(),
                        if p_from { Q::zero() } else { Q::one() },
                    ),
                );
            }
            path = path.concat(g, vertex_path(g, vp, vq));
            if !q_leg_len.is_zero() {
                path = path.concat(
                    g,
                    Path::single(
                        q.edge,
                        if q_from { Q::zero() } else { Q::one() },
                        q.t.clone(),
                    ),
                );
            }
            consider(total, path, &mut best);
        }
    }
    best.unwrap().1
}

/// Geodesic between two points within a connected subcontinuum, realized in
/// parent coordinates.
pub fn geodesic_path_within(
    g: &MetricGraph,
    sub: &Subcontinuum,
    p: &PointRef,
    q: &PointRef,
) -> Option<Path> {
    let derived = DerivedGraph::build(g, sub).ok()?;
    let dp = derived.from_parent(g, p)?;
    let dq = derived.from_parent(g, q)?;
    let inner = geodesic_path(&derived.graph, &dp, &dq);
    Some(path_to_parent(&derived, &inner))
}

/// Transports a path in a derived graph back to parent coordinates.
pub fn path_to_parent(derived: &DerivedGraph, path: &Path) -> Path {
    let steps = path
        .steps
        .iter()
        .map(|s| {
            let (pe, lo, hi) = &derived.edge_src[s.edge.0 as usize];
            let map = |t: &Q| lo + (hi - lo) * t;
            PathStep {
                edge: *pe,
                from_t: map(&s.from_t),
                to_t: map(&s.to_t),
            }
        })
        .filter(|s| s.from_t != s.to_t)
        .collect();
    Path { steps }
}

/// Deterministic shortest vertex-to-vertex path (Dijkstra with lexicographic
/// tie-breaks on (distance, vertex, edge)).
fn vertex_path(g: &MetricGraph, a: VertexId, b: VertexId) -> Path {
    if a == b {
        return Path::empty();
    }
    let n = g.vertex_count() as usize;
    let mut dist: Vec<Option<Q>> = vec![None; n];
    let mut prev: Vec<Option<(VertexId, EdgeId, bool)>> = vec![None; n]; // via edge, arrived-at-to-end
    let mut heap: BinaryHeap<Reverse<(Q, u32, u32)>> = BinaryHeap::new();
    dist[a.0 as usize] = Some(Q::zero());
    heap.push(Reverse((Q::zero(), a.0, u32::MAX)));
    while let Some(Reverse((d, v, _))) = heap.pop() {
        if dist[v as usize].as_ref() != Some(&d) {
            continue;
        }
        if v == b.0 {
            break;
        }
        let mut nbrs: Vec<(EdgeId, bool)> = g.incidence(VertexId(v)).to_vec();
        nbrs.sort();
        for (e_id, is_from) in nbrs {
            let e = g.edge(e_id);
            let w = if is_from { e.to } else { e.from };
            let nd = &d + &e.length;
            let better = match &dist[w.0 as usize] {
                None => true,
                Some(cur) => &nd < cur,
            };
            if better {
                dist[w.0 as usize] = Some(nd.clone());
                prev[w.0 as usize] = Some((VertexId(v), e_id, is_from));
                heap.push(Reverse((nd, w.0, e_id.0)));
            }
        }
    }
    // Reconstruct.
    let mut steps_rev: Vec<PathStep> = Vec::new();
    let mut cur = b;
    while cur != a {
        let (pv, e_id, was_from) = prev[cur.0 as usize]
            .clone()
            .expect("graph connected, path exists");
        // Traversed from pv to cur along e; orientation by which end pv is.
        let (from_t, to_t) = if was_from {
            (Q::zero(), Q::one())
        } else {
            (Q::one(), Q::zero())
        };
        steps_rev.push(PathStep {
            edge: e_id,
            from_t,
            to_t,
        });
        cur = pv;
    }
    steps_rev.reverse();
    Path { steps: steps_rev }
}

/// Shortest distance realized by [`geodesic_path`]; used in tests to check
/// agreement with [`MetricGraph::distance`].
pub fn geodesic_path_length(g: &MetricGraph, p: &PointRef, q: &PointRef) -> Q {
    q_min(geodesic_path(g, p, q).length(g), g.distance(p, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{circle_graph, interval_graph, Edge};
    use crate::num::{qi, qr};

    #[test]
    fn eval_and_subpath() {
        let g = interval_graph();
        let p = Path::single(EdgeId(0), qi(0).into(), qi(1).into());
        assert_eq!(p.length(&g), qi(1));
        let mid = p.eval_at_arclen(&g, &qr(1, 3)).unwrap();
        assert_eq!(mid.t, qr(1, 3));
        let sp = p.subpath(&g, &qr(1, 4), &qr(3, 4));
        assert_eq!(sp.length(&g), qr(1, 2));
        assert_eq!(sp.steps[0].from_t, qr(1, 4));
    }

    #[test]
    fn geodesic_agrees_with_distance() {
        let mk = |from, to| Edge {
            from: VertexId(from),
            to: VertexId(to),
            length: qi(1),
        };
        let g = crate::graph::MetricGraph::new(3, vec![mk(0, 1), mk(1, 2), mk(2, 0)]).unwrap();
        let p = PointRef::new(EdgeId(0), qr(1, 3));
        let q = PointRef::new(EdgeId(1), qr(2, 3));
        let path = geodesic_path(&g, &p, &q);
        assert!(path.is_continuous(&g));
        assert_eq!(path.length(&g), g.distance(&p, &q));
        assert!(g.same_point(&path.start().unwrap(), &p));
        assert!(g.same_point(&path.end().unwrap(), &q));
    }

    #[test]
    fn circle_shortest_way_around() {
        let g = circle_graph(qi(1));
        let p = PointRef::new(EdgeId(0), qr(1, 10));
        let q = PointRef::new(EdgeId(0), qr(9, 10));
        let path = geodesic_path(&g, &p, &q);
        assert_eq!(path.length(&g), qr(1, 5));
        assert!(path.is_continuous(&g));
    }

    #[test]
    fn hits_of_point_on_sweep() {
        let g = interval_graph();
        // 0 -> 1 -> 0: passes 1/2 twice.
        let p = Path {
            steps: vec![
                PathStep {
                    edge: EdgeId(0),
                    from_t: qi(0).into(),
                    to_t: qi(1).into(),
                },
                PathStep {
                    edge: EdgeId(0),
                    from_t: qi(1).into(),
                    to_t: qi(0).into(),
                },
            ],
        };
        let hits = p.hits_of_point(&g, &PointRef::new(EdgeId(0), qr(1, 2)));
        assert_eq!(hits, vec![qr(1, 2), qr(3, 2)]);
    }
}
