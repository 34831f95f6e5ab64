//! Closed subsets of a metric graph as finite unions of edge segments.
//!
//! A [`Subcontinuum`] stores, per edge, a normalized list of closed parameter
//! intervals. Degenerate intervals (single points) are allowed so that exact
//! intersections and preimages can be represented. All set operations are
//! exact; connectivity, diameter, and interior questions are decided in
//! rational arithmetic.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::graph::{CanonPoint, Edge, EdgeId,GraphError, MetricGraph, PointRef, UnionFind, VertexId};
use crate::num::{q_max, q_min, Q};

/// A closed parameter interval `[lo, hi]` on one edge, `0 <= lo <= hi <= 1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Seg {
    pub lo: Q,
    pub hi: Q,
}

impl Seg {
    pub fn new(lo: Q, hi: Q) -> Self {
        debug_assert!(lo <= hi);
        Seg { lo, hi }
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }
}

/// A finite union of closed edge segments, kept normalized: per edge the
/// segments are sorted, pairwise disjoint and non-touching, and degenerate
/// segments that are covered elsewhere (including across a shared vertex)
/// are dropped.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Subcontinuum {
    segs: BTreeMap<EdgeId, Vec<Seg>>,
}

impl Subcontinuum {
    pub fn empty() -> Self {
        Subcontinuum::default()
    }

    /// The whole graph.
    pub fn whole(g: &MetricGraph) -> Self {
        let mut segs = BTreeMap::new();
        for e in g.edge_ids() {
            segs.insert(e, vec![Seg::new(Q::zero(), Q::one())]);
        }
        Subcontinuum { segs }
    }

    /// A single point.
    pub fn point(g: &MetricGraph, p: &PointRef) -> Self {
        let p = g.point_of(&g.canon(p));
        Subcontinuum::from_raw(
            g,
            vec![(p.edge, Seg::new(p.t.clone(), p.t))],
        )
    }

    /// Builds from raw (edge, segment) pairs and normalizes.
    pub fn from_raw(g: &MetricGraph, raw: Vec<(EdgeId, Seg)>) -> Self {
        let mut segs: BTreeMap<EdgeId, Vec<Seg>> = BTreeMap::new();
        for (e, s) in raw {
            debug_assert!(s.lo >= Q::zero() && s.hi <= Q::one());
            segs.entry(e).or_default().push(s);
        }
        let mut sub = Subcontinuum { segs };
        sub.normalize(g);
        sub
    }

    fn normalize(&mut self, g: &MetricGraph) {
        for list in self.segs.values_mut() {
            list.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.hi.cmp(&b.hi)));
            let mut merged: Vec<Seg> = Vec::with_capacity(list.len());
            for s in list.drain(..) {
                match merged.last_mut() {
                    Some(last) if s.lo <= last.hi => {
                        if s.hi > last.hi {
                            last.hi = s.hi;
                        }
                    }
                    _ => merged.push(s),
                }
            }
            *list = merged;
        }
        self.segs.retain(|_, l| !l.is_empty());

        // Canonicalize degenerate endpoint segments (vertex points) and drop
        // those covered by other segments.
        let mut vertex_points: Vec<VertexId> = Vec::new();
        let mut drop_list: Vec<(EdgeId, usize)> = Vec::new();
        for (&e, list) in self.segs.iter() {
            for (i, s) in list.iter().enumerate() {
                if s.is_degenerate() {
                    if let CanonPoint::Vertex(v) = g.canon(&PointRef::new(e, s.lo.clone())) {
                        vertex_points.push(v);
                        drop_list.push((e, i));
                    }
                }
            }
        }
        for (e, i) in drop_list.into_iter().rev() {
            self.segs.get_mut(&e).unwrap().remove(i);
        }
        self.segs.retain(|_, l| !l.is_empty());
        vertex_points.sort_unstable();
        vertex_points.dedup();
        for v in vertex_points {
            if !self.contains_canon(g, &CanonPoint::Vertex(v)) {
                let p = g.point_of(&CanonPoint::Vertex(v));
                self.segs
                    .entry(p.edge)
                    .or_default()
                    .push(Seg::new(p.t.clone(), p.t));
            }
        }
        for list in self.segs.values_mut() {
            list.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.hi.cmp(&b.hi)));
        }
    }

    pub fn is_empty(&self) -> bool {
        self.segs.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.segs.keys().copied()
    }

    pub fn segments(&self) -> impl Iterator<Item = (EdgeId, &Seg)> + '_ {
        self.segs
            .iter()
            .flat_map(|(&e, list)| list.iter().map(move |s| (e, s)))
    }

    pub fn segments_on(&self, e: EdgeId) -> &[Seg] {
        self.segs.get(&e).map(|l| l.as_slice()).unwrap_or(&[])
    }

    pub fn segment_count(&self) -> usize {
        self.segs.values().map(|l| l.len()).sum()
    }

    /// Total length of the nondegenerate part.
    pub fn measure(&self, g: &MetricGraph) -> Q {
        let mut acc = Q::zero();
        for (e, s) in self.segments() {
            acc += (&s.hi - &s.lo) * &g.edge(e).length;
        }
        acc
    }

    pub fn contains_point(&self, g: &MetricGraph, p: &PointRef) -> bool {
        self.contains_canon(g, &g.canon(p))
    }

    pub fn contains_canon(&self, g: &MetricGraph, c: &CanonPoint) -> bool {
        match c {
            CanonPoint::Inner(e, t) => self
                .segments_on(*e)
                .iter()
                .any(|s| s.lo <= *t && *t <= s.hi),
            CanonPoint::Vertex(v) => self.touches_vertex(g, *v),
        }
    }

    fn touches_vertex(&self, g: &MetricGraph, v: VertexId) -> bool {
        for &(e, is_from) in g.incidence(v) {
            let t = if is_from { Q::zero() } else { Q::one() };
            if self
                .segments_on(e)
                .iter()
                .any(|s| s.lo <= t && t <= s.hi)
            {
                return true;
            }
        }
        false
    }

    /// Whether `p` lies in the interior of the set.
    pub fn contains_in_interior(&self, g: &MetricGraph, p: &PointRef) -> bool {
        match g.canon(p) {
            CanonPoint::Inner(e, t) => self
                .segments_on(e)
                .iter()
                .any(|s| s.lo < t && t < s.hi),
            CanonPoint::Vertex(v) => g.incidence(v).iter().all(|&(e, is_from)| {
                self.segments_on(e).iter().any(|s| {
                    if is_from {
                        s.lo.is_zero() && s.hi > Q::zero()
                    } else {
                        s.hi.is_one() && s.lo < Q::one()
                    }
                })
            }),
        }
    }

    /// Whether the set has nonempty interior (some nondegenerate segment).
    pub fn has_interior(&self) -> bool {
        self.segments().any(|(_, s)| !s.is_degenerate())
    }

    /// The closure of the interior: the union of the nondegenerate segments.
    pub fn closure_of_interior(&self, g: &MetricGraph) -> Subcontinuum {
        Subcontinuum::from_raw(
            g,
            self.segments()
                .filter(|(_, s)| !s.is_degenerate())
                .map(|(e, s)| (e, s.clone()))
                .collect(),
        )
    }

    /// Whether the set equals the closure of its interior.
    pub fn is_closure_of_interior(&self, g: &MetricGraph) -> bool {
        *self == self.closure_of_interior(g)
    }

    pub fn union(&self, g: &MetricGraph, other: &Subcontinuum) -> Subcontinuum {
        let mut raw: Vec<(EdgeId, Seg)> = self
            .segments()
            .map(|(e, s)| (e, s.clone()))
            .collect();
        raw.extend(other.segments().map(|(e, s)| (e, s.clone())));
        Subcontinuum::from_raw(g, raw)
    }

    pub fn intersect(&self, g: &MetricGraph, other: &Subcontinuum) -> Subcontinuum {
        let mut raw: Vec<(EdgeId, Seg)> = Vec::new();
        for (&e, list) in self.segs.iter() {
            for s in list {
                for o in other.segments_on(e) {
                    let lo = q_max(s.lo.clone(), o.lo.clone());
                    let hi = q_min(s.hi.clone(), o.hi.clone());
                    if lo <= hi {
                        raw.push((e, Seg::new(lo, hi)));
                    }
                }
            }
        }
        // Vertex points shared across different edges.
        for v in g.vertex_ids() {
            if self.touches_vertex(g, v) && other.touches_vertex(g, v) {
                let p = g.point_of(&CanonPoint::Vertex(v));
                raw.push((p.edge, Seg::new(p.t.clone(), p.t)));
            }
        }
        Subcontinuum::from_raw(g, raw)
    }

    pub fn intersects(&self, g: &MetricGraph, other: &Subcontinuum) -> bool {
        !self.intersect(g, other).is_empty()
    }

    /// Superset test: does `self` contain every point of `other`?
    pub fn includes(&self, g: &MetricGraph, other: &Subcontinuum) -> bool {
        for (e, s) in other.segments() {
            if s.is_degenerate() {
                if !self.contains_point(g, &PointRef::new(e, s.lo.clone())) {
                    return false;
                }
                continue;
            }
            // A nondegenerate segment must be covered by segments on the
            // same edge (normalized lists are merged, so one must contain it).
            if !self
                .segments_on(e)
                .iter()
                .any(|c| c.lo <= s.lo && s.hi <= c.hi)
            {
                return false;
            }
        }
        true
    }

    /// The closure of the complement.
    pub fn complement_closure(&self, g: &MetricGraph) -> Subcontinuum {
        let mut raw: Vec<(EdgeId, Seg)> = Vec::new();
        for e in g.edge_ids() {
            let list = self.segments_on(e);
            let mut cursor = Q::zero();
            for s in list {
                if s.lo > cursor {
                    raw.push((e, Seg::new(cursor.clone(), s.lo.clone())));
                } else if s.lo == cursor && cursor > Q::zero() {
                    // touching; nothing to emit
                }
                cursor = s.hi.clone();
            }
            if cursor < Q::one() {
                raw.push((e, Seg::new(cursor, Q::one())));
            }
            if list.is_empty() {
                // handled above: cursor stayed 0, pushed whole edge
            }
        }
        // A point where a segment ends in the middle of an edge belongs to
        // the closure of the complement even if lengths work out to zero:
        // covered because we emit closed complementary intervals.
        Subcontinuum::from_raw(g, raw)
    }

    /// Set difference followed by closure, `cl(self \ other)`.
    pub fn minus_closure(&self, g: &MetricGraph, other: &Subcontinuum) -> Subcontinuum {
        self.intersect(g, &other.complement_closure(g))
    }

    /// Connectivity under vertex identification.
    pub fn is_connected(&self, g: &MetricGraph) -> bool {
        let pieces: Vec<(EdgeId, &Seg)> = self.segments().collect();
        if pieces.len() <= 1 {
            return true;
        }
        let n = pieces.len();
        let mut uf = UnionFind::new(n + g.vertex_count() as usize);
        for (i, (e, s)) in pieces.iter().enumerate() {
            let edge = g.edge(*e);
            if s.lo.is_zero() {
                uf.union(i, n + edge.from.0 as usize);
            }
            if s.hi.is_one() {
                uf.union(i, n + edge.to.0 as usize);
            }
        }
        let root = uf.find(0);
        (1..n).all(|i| uf.find(i) == root)
    }

    /// Exact diameter in the geodesic metric of `g`.
    pub fn diameter(&self, g: &MetricGraph) -> Q {
        let pieces: Vec<(EdgeId, Seg)> = self
            .segments()
            .map(|(e, s)| (e, s.clone()))
            .collect();
        let mut best = Q::zero();
        for i in 0..pieces.len() {
            for j in i..pieces.len() {
                let d = seg_pair_max_distance(g, pieces[i].0, &pieces[i].1, pieces[j].0, &pieces[j].1);
                best = q_max(best, d);
            }
        }
        best
    }

    /// Exact `min_{q in self} d(p, q)`.
    pub fn distance_to_point(&self, g: &MetricGraph, p: &PointRef) -> Q {
        if self.contains_point(g, p) {
            return Q::zero();
        }
        let mut best: Option<Q> = None;
        for (e, s) in self.segments() {
            for t in [&s.lo, &s.hi] {
                let d = g.distance(p, &PointRef::new(e, t.clone()));
                best = Some(match best.take() {
                    None => d,
                    Some(b) => q_min(b, d),
                });
            }
            // Same-edge shortcut into the segment interior.
            if e == p.edge && s.lo <= p.t && p.t <= s.hi {
                return Q::zero();
            }
        }
        best.expect("nonempty set")
    }

    /// Exact `max_{q in self} d(p, q)`.
    pub fn max_distance_to_point(&self, g: &MetricGraph, p: &PointRef) -> Q {
        let mut best = Q::zero();
        let pt_seg = Seg::new(p.t.clone(), p.t.clone());
        for (e, s) in self.segments() {
            let d = seg_pair_max_distance(g, p.edge, &pt_seg, e, s);
            best = q_max(best, d);
        }
        best
    }

    /// A canonical point of the set: lowest edge id, then the segment point
    /// with the smallest canonical parameter (midpoint of the first segment
    /// keeps the choice away from identified endpoints).
    pub fn canonical_point(&self, _g: &MetricGraph) -> Option<PointRef> {
        let (e, s) = self.segments().next()?;
        let t = if s.is_degenerate() {
            s.lo.clone()
        } else {
            (&s.lo + &s.hi) / Q::from_integer(2.into())
        };
        Some(PointRef::new(e, t))
    }

    /// Restriction to the interval `[lo, hi]` of a one-edge interval graph.
    pub fn as_interval_range(&self) -> Option<(Q, Q)> {
        let mut lo: Option<Q> = None;
        let mut hi: Option<Q> = None;
        for (_, s) in self.segments() {
            lo = Some(match lo.take() {
                None => s.lo.clone(),
                Some(v) => q_min(v, s.lo.clone()),
            });
            hi = Some(match hi.take() {
                None => s.hi.clone(),
                Some(v) => q_max(v, s.hi.clone()),
            });
        }
        Some((lo?, hi?))
    }
}

/// Closed metric ball as a segment set.
pub fn closed_ball(g: &MetricGraph, center: &PointRef, r: &Q) -> Subcontinuum {
    debug_assert!(!r.is_negative());
    let mut raw: Vec<(EdgeId, Seg)> = Vec::new();
    for e_id in g.edge_ids() {
        let e = g.edge(e_id);
        let a = g.distance(center, &PointRef::new(e_id, Q::zero()));
        let b = g.distance(center, &PointRef::new(e_id, Q::one()));
        // d(center, p_t) <= min(a + t len, b + (1-t) len, direct), so the ball
        // on this edge is a union of sublevel intervals of affine functions.
        if &a <= r {
            let hi = q_min((r - &a) / &e.length, Q::one());
            raw.push((e_id, Seg::new(Q::zero(), hi)));
        }
        if &b <= r {
            let lo = q_max(Q::one() - (r - &b) / &e.length, Q::zero());
            raw.push((e_id, Seg::new(lo, Q::one())));
        }
        if e_id == center.edge {
            let rad = r / &e.length;
            let lo = q_max(&center.t - &rad, Q::zero());
            let hi = q_min(&center.t + &rad, Q::one());
            if lo <= hi {
                raw.push((e_id, Seg::new(lo, hi)));
            }
        }
    }
    Subcontinuum::from_raw(g, raw)
}

/// Exact maximum of `d(p, q)` for `p` in one segment and `q` in another.
///
/// On each region of the parameter box the distance is a minimum of affine
/// functions; the maximum of such a concave PL function is attained at a
/// vertex of the induced arrangement, so it suffices to scan box corners,
/// pairwise crossing lines clipped to the box, and (for the same-edge case)
/// the diagonal split.
fn seg_pair_max_distance(g: &MetricGraph, e1: EdgeId, s1: &Seg, e2: EdgeId, s2: &Seg) -> Q {
    let edge1 = g.edge(e1);
    let edge2 = g.edge(e2);
    // Affine candidates d = c + alpha*s + beta*t on the box.
    let mut affines: Vec<(Q, Q, Q)> = Vec::new(); // (alpha, beta, c)
    let combos = [
        (true, true),
        (true, false),
        (false, true),
        (false, false),
    ];
    for (p_from, q_from) in combos {
        let (alpha, base1, v1) = end_term(edge1, p_from);
        let (beta, base2, v2) = end_term(edge2, q_from);
        let c = base1 + base2 + g.vdist(v1, v2).clone();
        affines.push((alpha, beta, c));
    }
    if e1 == e2 {
        // Direct route |s - t| * len: handle via the two half-planes.
        let len = &edge1.length;
        let mut best = Q::zero();
        for sign in [1i64, -1i64] {
            // region: sign*(s - t) >= 0; direct term = sign*(s-t)*len
            let mut aff = affines.clone();
            aff.push((
                Q::from_integer(sign.into()) * len,
                Q::from_integer((-sign).into()) * len,
                Q::zero(),
            ));
            let d = max_min_affines(&aff, s1, s2, Some(sign));
            best = q_max(best, d);
        }
        best
    } else {
        max_min_affines(&affines, s1, s2, None)
    }
}

fn end_term(edge: &Edge, from_end: bool) -> (Q, Q, VertexId) {
    if from_end {
        (edge.length.clone(), Q::zero(), edge.from)
    } else {
        (-edge.length.clone(), edge.length.clone(), edge.to)
    }
}

/// Maximum over the box `s in s_rng, t in t_rng` (optionally cut to the
/// half-plane `sign*(s-t) >= 0`) of the pointwise minimum of the affines.
fn max_min_affines(affines: &[(Q, Q, Q)], s_rng: &Seg, t_rng: &Seg, half: Option<i64>) -> Q {
    let mut cands: Vec<(Q, Q)> = Vec::new();
    let s_ends = [&s_rng.lo, &s_rng.hi];
    let t_ends = [&t_rng.lo, &t_rng.hi];
    for s in s_ends {
        for t in t_ends {
            cands.push((s.clone(), t.clone()));
        }
    }
    // Crossings of pairs of affines restricted to box edges and to each other.
    for i in 0..affines.len() {
        for j in (i + 1)..affines.len() {
            let (a1, b1, c1) = &affines[i];
            let (a2, b2, c2) = &affines[j];
            let (da, db, dc) = (a1 - a2, b1 - b2, c1 - c2);
            // Along s = const: da*s + db*t + dc = 0.
            if !db.is_zero() {
                for s in s_ends {
                    let t = -(&da * s + &dc) / &db;
                    if t >= t_rng.lo && t <= t_rng.hi {
                        cands.push((s.clone(), t));
                    }
                }
            }
            if !da.is_zero() {
                for t in t_ends {
                    let s = -(&db * t + &dc) / &da;
                    if s >= s_rng.lo && s <= s_rng.hi {
                        cands.push((s, t.clone()));
                    }
                }
            }
            // Pairwise with a third line is covered because the third line's
            // own pairs generate the same point; the remaining interior case
            // is the crossing of exactly these two lines with any other line
            // or the diagonal, handled below via the diagonal clip.
        }
    }
    // Diagonal s = t clips for the half-plane case.
    if half.is_some() {
        let lo = q_max(s_rng.lo.clone(), t_rng.lo.clone());
        let hi = q_min(s_rng.hi.clone(), t_rng.hi.clone());
        if lo <= hi {
            cands.push((lo.clone(), lo.clone()));
            cands.push((hi.clone(), hi.clone()));
            for i in 0..affines.len() {
                for j in (i + 1)..affines.len() {
                    let (a1, b1, c1) = &affines[i];
                    let (a2, b2, c2) = &affines[j];
                    let da = a1 - a2 + (b1 - b2);
                    let dc = c1 - c2;
                    if !da.is_zero() {
                        let s = -dc / da;
                        if s >= lo && s <= hi {
                            cands.push((s.clone(), s));
                        }
                    }
                }
            }
        }
    }
    // Interior crossings of pairs of affine planes (lines in the box).
    for i in 0..affines.len() {
        for j in (i + 1)..affines.len() {
            for k in (j + 1)..affines.len() {
                // crossing point of equality lines (i=j) and (i=k)
                let (a1, b1, c1) = &affines[i];
                let (a2, b2, c2) = &affines[j];
                let (a3, b3, c3) = &affines[k];
                let (p, q, r) = (a1 - a2, b1 - b2, c2 - c1);
                let (u, v, w) = (a1 - a3, b1 - b3, c3 - c1);
                let det = &p * &v - &q * &u;
                if det.is_zero() {
                    continue;
                }
                let s = (&r * &v - &q * &w) / &det;
                let t = (&p * &w - &r * &u) / &det;
                if s >= s_rng.lo && s <= s_rng.hi && t >= t_rng.lo && t <= t_rng.hi {
                    cands.push((s, t));
                }
            }
        }
    }

    let mut best: Option<Q> = None;
    for (s, t) in cands {
        if let Some(sign) = half {
            let diff = &s - &t;
            let ok = if sign > 0 {
                !diff.is_negative()
            } else {
                !diff.is_positive()
            };
            if !ok {
                continue;
            }
        }
        let mut val: Option<Q> = None;
        for (a, b, c) in affines {
            let v = a * &s + b * &t + c;
            val = Some(match val.take() {
                None => v,
                Some(x) => q_min(x, v),
            });
        }
        let v = val.unwrap();
        best = Some(match best.take() {
            None => v,
            Some(x) => q_max(x, v),
        });
    }
    best.unwrap_or_else(Q::zero)
}

/// A connected segment set realized as a metric graph of its own, with
/// point maps to and from the parent graph.
pub struct DerivedGraph {
    pub graph: MetricGraph,
    /// Parent location of each derived vertex.
    pub vertex_points: Vec<CanonPoint>,
    /// Parent (edge, lo, hi) carried by each derived edge.
    pub edge_src: Vec<(EdgeId, Q, Q)>,
}

impl DerivedGraph {
    /// Builds the derived graph of a connected set with nonempty interior.
    pub fn build(g: &MetricGraph, sub: &Subcontinuum) -> Result<DerivedGraph, GraphError> {
        let mut vertex_points: Vec<CanonPoint> = Vec::new();
        let mut index: BTreeMap<CanonPoint, u32> = BTreeMap::new();
        let node = |c: CanonPoint,
                        vertex_points: &mut Vec<CanonPoint>,
                        index: &mut BTreeMap<CanonPoint, u32>|
         -> u32 {
            if let Some(&i) = index.get(&c) {
                return i;
            }
            let i = vertex_points.len() as u32;
            index.insert(c.clone(), i);
            vertex_points.push(c);
            i
        };
        let mut edges: Vec<Edge> = Vec::new();
        let mut edge_src: Vec<(EdgeId, Q, Q)> = Vec::new();
        for (e, s) in sub.segments() {
            if s.is_degenerate() {
                continue;
            }
            let lo_c = g.canon(&PointRef::new(e, s.lo.clone()));
            let hi_c = g.canon(&PointRef::new(e, s.hi.clone()));
            let a = node(lo_c, &mut vertex_points, &mut index);
            let b = node(hi_c, &mut vertex_points, &mut index);
            edges.push(Edge {
                from: VertexId(a),
                to: VertexId(b),
                length: (&s.hi - &s.lo) * &g.edge(e).length,
            });
            edge_src.push((e, s.lo.clone(), s.hi.clone()));
        }
        let graph = MetricGraph::new(vertex_points.len() as u32, edges)?;
        Ok(DerivedGraph {
            graph,
            vertex_points,
            edge_src,
        })
    }

    /// Parent location of a derived point.
    pub fn to_parent(&self, p: &PointRef) -> PointRef {
        let (e, lo, hi) = &self.edge_src[p.edge.0 as usize];
        PointRef::new(*e, lo + (hi - lo) * &p.t)
    }

    /// Derived location of a parent point lying in the set.
    pub fn from_parent(&self, g: &MetricGraph, p: &PointRef) -> Option<PointRef> {
        let c = g.canon(p);
        // Vertex nodes first so endpoint identifications stay canonical.
        if let Some(i) = self.vertex_points.iter().position(|v| *v == c) {
            let vid = VertexId(i as u32);
            let graph = &self.graph;
            let (e, is_from) = *graph.incidence(vid).first()?;
            return Some(PointRef::new(e, if is_from { Q::zero() } else { Q::one() }));
        }
        for (i, (e, lo, hi)) in self.edge_src.iter().enumerate() {
            if *e == p.edge && *lo <= p.t && p.t <= *hi && lo < hi {
                let t = (&p.t - lo) / (hi - lo);
                return Some(PointRef::new(EdgeId(i as u32), t));
            }
        }
        None
    }

    /// Parent image of a derived segment set.
    pub fn sub_to_parent(&self, g: &MetricGraph, sub: &Subcontinuum) -> Subcontinuum {
        let mut raw: Vec<(EdgeId, Seg)> = Vec::new();
        for (e, s) in sub.segments() {
            let (pe, lo, hi) = &self.edge_src[e.0 as usize];
            let a = lo + (hi - lo) * &s.lo;
            let b = lo + (hi - lo) * &s.hi;
            raw.push((*pe, Seg::new(a, b)));
        }
        Subcontinuum::from_raw(g, raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{circle_graph, interval_graph};
    use crate::num::{qi, qr};

    fn seg(lo: (i64, i64), hi: (i64, i64)) -> Seg {
        Seg::new(qr(lo.0, lo.1), qr(hi.0, hi.1))
    }

    #[test]
    fn normalization_merges_touching() {
        let g = interval_graph();
        let s = Subcontinuum::from_raw(
            g0(),
            vec![
                (EdgeId(0), seg((0, 1), (1, 2))),
                (EdgeId(0), seg((1, 2), (3, 4))),
            ],
        );
        assert_eq!(s.segments_on(EdgeId(0)), &[seg((0, 1), (3, 4))]);
        let _ = g;
        fn g0() -> &'static MetricGraph {
            use std::sync::OnceLock;
            static G: OnceLock<MetricGraph> = OnceLock::new();
            G.get_or_init(interval_graph)
        }
    }

    #[test]
    fn interval_diameter_and_ball() {
        let g = interval_graph();
        let s = Subcontinuum::from_raw(&g, vec![(EdgeId(0), seg((1, 4), (3, 4)))]);
        assert_eq!(s.diameter(&g), qr(1, 2));
        let b = closed_ball(&g, &PointRef::new(EdgeId(0), qi(0).into()), &qr(1, 8));
        assert_eq!(b.segments_on(EdgeId(0)), &[seg((0, 1), (1, 8))]);
    }

    #[test]
    fn circle_arc_diameter_wraps() {
        let g = circle_graph(qi(1));
        // Closed arc of length 3/4: farthest pairs sit 1/2 apart through the gap.
        let s = Subcontinuum::from_raw(&g, vec![(EdgeId(0), seg((0, 1), (3, 4)))]);
        assert_eq!(s.diameter(&g), qr(1, 2));
    }

    #[test]
    fn connectivity_through_vertices() {
        // Two unit edges 0-1, 1-2; pieces touching only at vertex 1.
        let g = MetricGraph::new(
            3,
            vec![
                Edge {
                    from: VertexId(0),
                    to: VertexId(1),
                    length: qi(1),
                },
                Edge {
                    from: VertexId(1),
                    to: VertexId(2),
                    length: qi(1),
                },
            ],
        )
        .unwrap();
        let joined = Subcontinuum::from_raw(
            &g,
            vec![
                (EdgeId(0), seg((1, 2), (1, 1))),
                (EdgeId(1), seg((0, 1), (1, 2))),
            ],
        );
        assert!(joined.is_connected(&g));
        let split = Subcontinuum::from_raw(
            &g,
            vec![
                (EdgeId(0), seg((0, 1), (1, 2))),
                (EdgeId(1), seg((1, 2), (1, 1))),
            ],
        );
        assert!(!split.is_connected(&g));
    }

    #[test]
    fn complement_closure_of_middle() {
        let g = interval_graph();
        let s = Subcontinuum::from_raw(&g, vec![(EdgeId(0), seg((1, 4), (1, 2)))]);
        let c = s.complement_closure(&g);
        assert_eq!(
            c.segments_on(EdgeId(0)),
            &[seg((0, 1), (1, 4)), seg((1, 2), (1, 1))]
        );
        assert!(c.union(&g, &s).includes(&g, &Subcontinuum::whole(&g)));
    }

    #[test]
    fn interior_membership() {
        let g = interval_graph();
        let s = Subcontinuum::from_raw(&g, vec![(EdgeId(0), seg((0, 1), (1, 2)))]);
        assert!(s.contains_in_interior(&g, &PointRef::new(EdgeId(0), qr(1, 4))));
        assert!(!s.contains_in_interior(&g, &PointRef::new(EdgeId(0), qr(1, 2))));
        // Vertex 0 of the interval has a one-sided neighborhood inside.
        assert!(s.contains_in_interior(&g, &PointRef::new(EdgeId(0), qi(0).into())));
    }

    #[test]
    fn derived_graph_round_trip() {
        let g = circle_graph(qi(2));
        let s = Subcontinuum::from_raw(&g, vec![(EdgeId(0), seg((1, 8), (5, 8)))]);
        let d = DerivedGraph::build(&g, &s).unwrap();
        assert_eq!(d.graph.edge_count(), 1);
        assert_eq!(d.graph.edge(EdgeId(0)).length, qi(1));
        let inner = PointRef::new(EdgeId(0), qr(1, 4));
        let parent = d.to_parent(&inner);
        assert_eq!(parent.t, qr(1, 4)); // 1/8 + (1/2)(1/4) = 1/4
        let back = d.from_parent(&g, &parent).unwrap();
        assert_eq!(back.t, qr(1, 4));
    }
}
