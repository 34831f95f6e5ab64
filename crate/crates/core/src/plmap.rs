//! Exact piecewise-linear maps between metric graphs.
//!
//! A [`PlMap`] stores, per domain edge, an increasing breakpoint sequence
//! with an image anchor point at each breakpoint and a recorded edge path for
//! each piece; the piece is traversed at constant speed. This representation
//! is closed under composition and admits exact images, preimages, and
//! sup-distance bounds.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::graph::{EdgeId, MetricGraph, PointRef};
use crate::num::{q_max, q_min, Q};
use crate::path::Path;
use crate::subset::{Seg, Subcontinuum};

/// The map restricted to one domain edge.
#[derive(Clone, Debug)]
pub struct EdgeMap {
    /// `0 = s_0 < s_1 < ... < s_m = 1`.
    pub breaks: Vec<Q>,
    /// Image anchor at each breakpoint (`m + 1` entries).
    pub anchors: Vec<PointRef>,
    /// Path of each piece (`m` entries); an empty path is a constant piece.
    pub paths: Vec<Path>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PlMapError {
    DomainMismatch,
    BadBreakpoints(EdgeId),
    Discontinuous(EdgeId),
    PointOutsideDomain,
}

impl fmt::Display for PlMapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlMapError::DomainMismatch => write!(f, "codomain/domain graphs do not match"),
            PlMapError::BadBreakpoints(e) => {
                write!(f, "edge {}: breakpoints not increasing from 0 to 1", e.0)
            }
            PlMapError::Discontinuous(e) => write!(f, "edge {}: pieces do not connect", e.0),
            PlMapError::PointOutsideDomain => write!(f, "point outside the domain graph"),
        }
    }
}

/// Exact full preimage of a point: isolated solutions plus flat segments.
#[derive(Clone, Debug, Default)]
pub struct Preimage {
    pub isolated: Vec<PointRef>,
    pub flats: Subcontinuum,
}

impl Preimage {
    /// Whether the preimage is exactly the single point `p`.
    pub fn is_single_point(&self, g: &MetricGraph, p: &PointRef) -> bool {
        if !self.flats.is_empty() {
            return false;
        }
        !self.isolated.is_empty()
            && self.isolated.iter().all(|q| g.same_point(q, p))
    }

    pub fn as_subset(&self, g: &MetricGraph) -> Subcontinuum {
        let mut raw: Vec<(EdgeId, Seg)> = self
            .isolated
            .iter()
            .map(|p| (p.edge, Seg::new(p.t.clone(), p.t.clone())))
            .collect();
        raw.extend(self.flats.segments().map(|(e, s)| (e, s.clone())));
        Subcontinuum::from_raw(g, raw)
    }
}

#[derive(Clone)]
pub struct PlMap {
    domain: Arc<MetricGraph>,
    codomain: Arc<MetricGraph>,
    edges: Vec<EdgeMap>,
}

impl fmt::Debug for PlMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PlMap {{ domain edges: {}, pieces: {} }}",
            self.edges.len(),
            self.piece_count()
        )
    }
}

impl PlMap {
    /// Validates breakpoint monotonicity, anchor/path consistency, and
    /// continuity across identified vertices.
    pub fn new(
        domain: Arc<MetricGraph>,
        codomain: Arc<MetricGraph>,
        edges: Vec<EdgeMap>,
    ) -> Result<PlMap, PlMapError> {
        if edges.len() != domain.edge_count() {
            return Err(PlMapError::DomainMismatch);
        }
        for (i, em) in edges.iter().enumerate() {
            let e_id = EdgeId(i as u32);
            let m = em.breaks.len();
            if m < 2
                || !em.breaks[0].is_zero()
                || !em.breaks[m - 1].is_one()
                || em.breaks.windows(2).any(|w| w[0] >= w[1])
                || em.anchors.len() != m
                || em.paths.len() != m - 1
            {
                return Err(PlMapError::BadBreakpoints(e_id));
            }
            for (j, path) in em.paths.iter().enumerate() {
                if path.is_empty() {
                    if !codomain.same_point(&em.anchors[j], &em.anchors[j + 1]) {
                        return Err(PlMapError::Discontinuous(e_id));
                    }
                } else {
                    if !path.is_continuous(&codomain)
                        || !codomain.same_point(&path.start().unwrap(), &em.anchors[j])
                        || !codomain.same_point(&path.end().unwrap(), &em.anchors[j + 1])
                    {
                        return Err(PlMapError::Discontinuous(e_id));
                    }
                }
            }
        }
        let map = PlMap {
            domain,
            codomain,
            edges,
        };
        // Vertex consistency: all incident edge-end anchors agree.
        for v in map.domain.vertex_ids() {
            let mut value: Option<PointRef> = None;
            for &(e, is_from) in map.domain.incidence(v) {
                let em = &map.edges[e.0 as usize];
                let anchor = if is_from {
                    &em.anchors[0]
                } else {
                    em.anchors.last().unwrap()
                };
                match &value {
                    None => value = Some(anchor.clone()),
                    Some(prev) => {
                        if !map.codomain.same_point(prev, anchor) {
                            return Err(PlMapError::Discontinuous(e));
                        }
                    }
                }
            }
        }
        Ok(map)
    }

    pub fn domain(&self) -> &Arc<MetricGraph> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<MetricGraph> {
        &self.codomain
    }

    pub fn edge_map(&self, e: EdgeId) -> &EdgeMap {
        &self.edges[e.0 as usize]
    }

    pub fn edge_maps(&self) -> &[EdgeMap] {
        &self.edges
    }

    pub fn piece_count(&self) -> usize {
        self.edges.iter().map(|em| em.paths.len()).sum()
    }

    pub fn is_self_map(&self) -> bool {
        graphs_match(&self.domain, &self.codomain)
    }

    /// The identity map.
    pub fn identity(g: Arc<MetricGraph>) -> PlMap {
        let edges = g
            .edge_ids()
            .map(|e| EdgeMap {
                breaks: vec![Q::zero(), Q::one()],
                anchors: vec![
                    PointRef::new(e, Q::zero()),
                    PointRef::new(e, Q::one()),
                ],
                paths: vec![Path::single(e, Q::zero(), Q::one())],
            })
            .collect();
        PlMap::new(g.clone(), g, edges).unwrap()
    }

    /// The constant map onto `value`.
    pub fn constant(domain: Arc<MetricGraph>, codomain: Arc<MetricGraph>, value: &PointRef) -> PlMap {
        let edges = domain
            .edge_ids()
            .map(|_| EdgeMap {
                breaks: vec![Q::zero(), Q::one()],
                anchors: vec![value.clone(), value.clone()],
                paths: vec![Path::empty()],
            })
            .collect();
        PlMap::new(domain, codomain, edges).unwrap()
    }

    /// Interval self-map from breakpoint/value pairs (values in `[0,1]`),
    /// e.g. the tent map from `[(0,0), (1/2,1), (1,0)]`.
    pub fn interval_map(g: Arc<MetricGraph>, pairs: &[(Q, Q)]) -> Result<PlMap, PlMapError> {
        debug_assert!(g.edge_count() == 1);
        let e = EdgeId(0);
        let breaks: Vec<Q> = pairs.iter().map(|(s, _)| s.clone()).collect();
        let anchors: Vec<PointRef> = pairs
            .iter()
            .map(|(_, v)| PointRef::new(e, v.clone()))
            .collect();
        let mut paths = Vec::new();
        for w in pairs.windows(2) {
            let (v0, v1) = (&w[0].1, &w[1].1);
            paths.push(if v0 == v1 {
                Path::empty()
            } else {
                Path::single(e, v0.clone(), v1.clone())
            });
        }
        PlMap::new(
            g.clone(),
            g,
            vec![EdgeMap {
                breaks,
                anchors,
                paths,
            }],
        )
    }

    /// Exact image of a point.
    pub fn evaluate(&self, p: &PointRef) -> PointRef {
        let em = &self.edges[p.edge.0 as usize];
        // Find the piece; breakpoints evaluate to their anchors exactly.
        let m = em.breaks.len();
        let mut j = 0;
        while j + 1 < m && em.breaks[j + 1] < p.t {
            j += 1;
        }
        if em.breaks[j] == p.t {
            return em.anchors[j].clone();
        }
        if em.breaks[j + 1] == p.t {
            return em.anchors[j + 1].clone();
        }
        let path = &em.paths[j];
        if path.is_empty() {
            return em.anchors[j].clone();
        }
        let len = path.length(&self.codomain);
        let frac = (&p.t - &em.breaks[j]) / (&em.breaks[j + 1] - &em.breaks[j]);
        let s = frac * len;
        path.eval_at_arclen(&self.codomain, &s).unwrap()
    }

    /// Exact image of a segment set (connected sets map to connected sets).
    pub fn image_of(&self, s: &Subcontinuum) -> Subcontinuum {
        let mut raw: Vec<(EdgeId, Seg)> = Vec::new();
        for (e, seg) in s.segments() {
            let em = &self.edges[e.0 as usize];
            if seg.is_degenerate() {
                let v = self.evaluate(&PointRef::new(e, seg.lo.clone()));
                raw.push((v.edge, Seg::new(v.t.clone(), v.t)));
                continue;
            }
            for j in 0..em.paths.len() {
                let (b0, b1) = (&em.breaks[j], &em.breaks[j + 1]);
                let lo = q_max(seg.lo.clone(), b0.clone());
                let hi = q_min(seg.hi.clone(), b1.clone());
                if lo > hi {
                    continue;
                }
                let path = &em.paths[j];
                if path.is_empty() {
                    let v = &em.anchors[j];
                    raw.push((v.edge, Seg::new(v.t.clone(), v.t.clone())));
                    continue;
                }
                let len = path.length(&self.codomain);
                let f0 = (&lo - b0) / (b1 - b0) * &len;
                let f1 = (&hi - b0) / (b1 - b0) * &len;
                let part = path.subpath(&self.codomain, &f0, &f1);
                for st in &part.steps {
                    let (a, b) = if st.from_t <= st.to_t {
                        (st.from_t.clone(), st.to_t.clone())
                    } else {
                        (st.to_t.clone(), st.from_t.clone())
                    };
                    raw.push((st.edge, Seg::new(a, b)));
                }
                if part.steps.is_empty() && lo == hi {
                    let v = self.evaluate(&PointRef::new(e, lo.clone()));
                    raw.push((v.edge, Seg::new(v.t.clone(), v.t)));
                }
            }
        }
        Subcontinuum::from_raw(&self.codomain, raw)
    }

    /// Exact full preimage of a point.
    pub fn preimage_of(&self, p: &PointRef) -> Preimage {
        let mut isolated: Vec<PointRef> = Vec::new();
        let mut flat_raw: Vec<(EdgeId, Seg)> = Vec::new();
        for (i, em) in self.edges.iter().enumerate() {
            let e = EdgeId(i as u32);
            for j in 0..em.paths.len() {
                let (b0, b1) = (&em.breaks[j], &em.breaks[j + 1]);
                let path = &em.paths[j];
                if path.is_empty() {
                    if self.codomain.same_point(&em.anchors[j], p) {
                        flat_raw.push((e, Seg::new(b0.clone(), b1.clone())));
                    }
                    continue;
                }
                let len = path.length(&self.codomain);
                for pos in path.hits_of_point(&self.codomain, p) {
                    let t = b0 + (b1 - b0) * &pos / &len;
                    isolated.push(PointRef::new(e, t));
                }
            }
        }
        // Deduplicate isolated points under identification and drop ones
        // swallowed by flats.
        let flats = Subcontinuum::from_raw(&self.domain, flat_raw);
        let mut canon_seen: Vec<crate::graph::CanonPoint> = Vec::new();
        let mut kept: Vec<PointRef> = Vec::new();
        for q in isolated {
            if flats.contains_point(&self.domain, &q) {
                continue;
            }
            let c = self.domain.canon(&q);
            if !canon_seen.contains(&c) {
                canon_seen.push(c.clone());
                kept.push(self.domain.point_of(&c));
            }
        }
        kept.sort_by(|a, b| a.edge.cmp(&b.edge).then(a.t.cmp(&b.t)));
        Preimage {
            isolated: kept,
            flats,
        }
    }

    /// Exact composition `outer . self` (apply `self` first).
    pub fn then(&self, outer: &PlMap) -> Result<PlMap, PlMapError> {
        compose(outer, self)
    }

    /// Joint breakpoint positions on a domain edge for two maps with the
    /// same domain.
    fn joint_breaks(&self, other: &PlMap, e: EdgeId) -> Vec<Q> {
        let mut cuts: Vec<Q> = self.edges[e.0 as usize].breaks.clone();
        cuts.extend(other.edges[e.0 as usize].breaks.iter().cloned());
        cuts.sort();
        cuts.dedup();
        cuts
    }

    /// An exact upper bound for `sup_x d(self(x), other(x))`, tight along
    /// shared edge paths.
    pub fn sup_distance(&self, other: &PlMap) -> Result<Q, PlMapError> {
        if !graphs_match(&self.domain, &other.domain)
            || !graphs_match(&self.codomain, &other.codomain)
        {
            return Err(PlMapError::DomainMismatch);
        }
        let cod = &self.codomain;
        let mut bound = Q::zero();
        for e in self.domain.edge_ids() {
            let mut cuts = self.joint_breaks(other, e);
            // Refine by internal step boundaries of both maps.
            let mut extra: Vec<Q> = Vec::new();
            for map in [self, other] {
                let em = &map.edges[e.0 as usize];
                for j in 0..em.paths.len() {
                    let (b0, b1) = (&em.breaks[j], &em.breaks[j + 1]);
                    let path = &em.paths[j];
                    if path.is_empty() {
                        continue;
                    }
                    let len = path.length(cod);
                    let mut cursor = Q::zero();
                    for st in &path.steps {
                        cursor = &cursor + st.span() * &cod.edge(st.edge).length;
                        if cursor < len {
                            extra.push(b0 + (b1 - b0) * &cursor / &len);
                        }
                    }
                }
            }
            cuts.extend(extra);
            cuts.sort();
            cuts.dedup();

            for w in cuts.windows(2) {
                let (u, v) = (&w[0], &w[1]);
                let pu = PointRef::new(e, u.clone());
                let pv = PointRef::new(e, v.clone());
                let a_u = self.evaluate(&pu);
                let b_u = other.evaluate(&pu);
                let a_v = self.evaluate(&pv);
                let b_v = other.evaluate(&pv);
                let du = cod.distance(&a_u, &b_u);
                let dv = cod.distance(&a_v, &b_v);
                bound = q_max(bound, du.clone());
                bound = q_max(bound, dv.clone());
                // Within the cell each map runs along a single partial edge.
                let same_edge = a_u.edge == b_u.edge
                    && a_v.edge == a_u.edge
                    && b_v.edge == a_u.edge;
                if same_edge {
                    let len = &cod.edge(a_u.edge).length;
                    let d0 = (&a_u.t - &b_u.t).abs() * len;
                    let d1 = (&a_v.t - &b_v.t).abs() * len;
                    bound = q_max(bound, q_max(d0, d1));
                } else {
                    let travel_a = cod.distance(&a_u, &a_v);
                    let travel_b = cod.distance(&b_u, &b_v);
                    let travel = &travel_a + &travel_b;
                    let via_ends = q_min(&du + &travel, &dv + &travel);
                    let crossing = (&du + &dv + &travel) / Q::from_integer(2.into());
                    bound = q_max(bound, q_min(via_ends, crossing));
                }
            }
        }
        Ok(bound)
    }

    /// Image of a parameter interval of an interval-domain map.
    pub fn image_of_interval(&self, lo: &Q, hi: &Q) -> Subcontinuum {
        debug_assert!(self.domain.edge_count() == 1);
        let s = Subcontinuum::from_raw(
            &self.domain,
            vec![(EdgeId(0), Seg::new(lo.clone(), hi.clone()))],
        );
        self.image_of(&s)
    }
}

/// Structural graph equality (same vertex count, edges, lengths).
pub fn graphs_match(a: &MetricGraph, b: &MetricGraph) -> bool {
    a.vertex_count() == b.vertex_count()
        && a.edge_count() == b.edge_count()
        && a.edges().iter().zip(b.edges().iter()).all(|(x, y)| {
            x.from == y.from && x.to == y.to && x.length == y.length
        })
}

/// Exact PL composition `outer ∘ inner`.
pub fn compose(outer: &PlMap, inner: &PlMap) -> Result<PlMap, PlMapError> {
    if !graphs_match(&inner.codomain, &outer.domain) {
        return Err(PlMapError::DomainMismatch);
    }
    let mid = &outer.domain;
    let cod = &outer.codomain;
    let mut edges_out: Vec<EdgeMap> = Vec::new();
    for em in inner.edges.iter() {
        let mut breaks: Vec<Q> = vec![Q::zero()];
        let mut anchors: Vec<PointRef> = vec![outer.evaluate(&em.anchors[0])];
        let mut paths: Vec<Path> = Vec::new();
        for j in 0..em.paths.len() {
            let (b0, b1) = (em.breaks[j].clone(), em.breaks[j + 1].clone());
            let path = &em.paths[j];
            if path.is_empty() {
                push_piece(
                    &mut breaks,
                    &mut anchors,
                    &mut paths,
                    b1.clone(),
                    outer.evaluate(&em.anchors[j]),
                    Path::empty(),
                    cod,
                );
                continue;
            }
            let total = path.length(mid);
            // Walk the path; cut at outer breakpoints and step boundaries.
            let mut cursor_len = Q::zero();
            for st in &path.steps {
                let st_len = st.span() * &mid.edge(st.edge).length;
                let o_em = &outer.edges[st.edge.0 as usize];
                let forward = st.from_t < st.to_t;
                // Mid-edge params crossed, in traversal order.
                let mut cell_cuts: Vec<Q> = Vec::new();
                for bk in &o_em.breaks {
                    let inside = if forward {
                        *bk > st.from_t && *bk < st.to_t
                    } else {
                        *bk < st.from_t && *bk > st.to_t
                    };
                    if inside {
                        cell_cuts.push(bk.clone());
                    }
                }
                if !forward {
                    cell_cuts.reverse();
                }
                let mut seg_start = st.from_t.clone();
                let mut bounds = cell_cuts;
                bounds.push(st.to_t.clone());
                for seg_end in bounds {
                    if seg_end == seg_start {
                        continue;
                    }
                    // This cell lies in one outer piece.
                    let lo_t = q_min(seg_start.clone(), seg_end.clone());
                    let hi_t = q_max(seg_start.clone(), seg_end.clone());
                    let k = outer_piece_index(o_em, &lo_t, &hi_t);
                    let (ob0, ob1) = (&o_em.breaks[k], &o_em.breaks[k + 1]);
                    let opath = &o_em.paths[k];
                    let image_path = if opath.is_empty() {
                        Path::empty()
                    } else {
                        let olen = opath.length(cod);
                        let fa = (&seg_start - ob0) / (ob1 - ob0) * &olen;
                        let fb = (&seg_end - ob0) / (ob1 - ob0) * &olen;
                        if fa <= fb {
                            opath.subpath(cod, &fa, &fb)
                        } else {
                            opath.subpath(cod, &fb, &fa).reversed()
                        }
                    };
                    // Domain parameter reached at the end of this cell.
                    let travelled = (&seg_end - &st.from_t).abs() * &mid.edge(st.edge).length;
                    let at_len = &cursor_len + travelled;
                    let t_end = if at_len == total {
                        b1.clone()
                    } else {
                        &b0 + (&b1 - &b0) * &at_len / &total
                    };
                    let anchor_end = outer.evaluate(&PointRef::new(st.edge, seg_end.clone()));
                    push_piece(
                        &mut breaks,
                        &mut anchors,
                        &mut paths,
                        t_end,
                        anchor_end,
                        image_path,
                        cod,
                    );
                    seg_start = seg_end;
                }
                cursor_len = &cursor_len + &st_len;
            }
        }
        // Force exact endpoint.
        if let Some(last) = breaks.last_mut() {
            *last = Q::one();
        }
        edges_out.push(EdgeMap {
            breaks,
            anchors,
            paths,
        });
    }
    PlMap::new(inner.domain.clone(), cod.clone(), edges_out)
}

/// Index of the outer piece whose parameter cell contains `[lo, hi]`.
fn outer_piece_index(o_em: &EdgeMap, lo: &Q, hi: &Q) -> usize {
    for k in 0..o_em.paths.len() {
        if &o_em.breaks[k] <= lo && hi <= &o_em.breaks[k + 1] {
            return k;
        }
    }
    unreachable!("cell cut at outer breakpoints")
}

#[allow(clippy::too_many_arguments)]
fn push_piece(
    breaks: &mut Vec<Q>,
    anchors: &mut Vec<PointRef>,
    paths: &mut Vec<Path>,
    t_end: Q,
    anchor_end: PointRef,
    path: Path,
    _cod: &MetricGraph,
) {
    let t_prev = breaks.last().unwrap().clone();
    if t_end <= t_prev {
        return; // zero-width cell: drop
    }
    breaks.push(t_end);
    anchors.push(anchor_end);
    paths.push(path);
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::graph::interval_graph;
    use crate::num::{qi, qr};

    pub(crate) fn unit() -> Arc<MetricGraph> {
        Arc::new(interval_graph())
    }

    pub(crate) fn tent(g: &Arc<MetricGraph>) -> PlMap {
        PlMap::interval_map(
            g.clone(),
            &[
                (qi(0), qi(0)),
                (qr(1, 2), qi(1)),
                (qi(1), qi(0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn evaluate_identity_and_tent() {
        let g = unit();
        let id = PlMap::identity(g.clone());
        let p = PointRef::new(EdgeId(0), qr(1, 3));
        assert_eq!(id.evaluate(&p).t, qr(1, 3));
        let t = tent(&g);
        assert_eq!(t.evaluate(&PointRef::new(EdgeId(0), qr(1, 4))).t, qr(1, 2));
        // Both representations of 1/2 agree (single edge: trivially one rep).
        assert_eq!(t.evaluate(&PointRef::new(EdgeId(0), qr(1, 2))).t, qi(1));
    }

    #[test]
    fn tent_images() {
        let g = unit();
        let t = tent(&g);
        let left = Subcontinuum::from_raw(&g, vec![(EdgeId(0), Seg::new(qi(0).into(), qr(1, 2)))]);
        assert_eq!(t.image_of(&left), Subcontinuum::whole(&g));
        let mid = Subcontinuum::from_raw(&g, vec![(EdgeId(0), Seg::new(qr(1, 4), qr(3, 4)))]);
        let img = t.image_of(&mid);
        assert_eq!(
            img.segments_on(EdgeId(0)),
            &[Seg::new(qr(1, 2), qi(1).into())]
        );
        let id = PlMap::identity(g.clone());
        assert_eq!(id.image_of(&mid), mid);
    }

    #[test]
    fn tent_preimages() {
        let g = unit();
        let t = tent(&g);
        let pre1 = t.preimage_of(&PointRef::new(EdgeId(0), qi(1).into()));
        assert!(pre1.flats.is_empty());
        assert_eq!(pre1.isolated.len(), 1);
        assert_eq!(pre1.isolated[0].t, qr(1, 2));
        let pre_half = t.preimage_of(&PointRef::new(EdgeId(0), qr(1, 2)));
        let ts: Vec<Q> = pre_half.isolated.iter().map(|p| p.t.clone()).collect();
        assert_eq!(ts, vec![qr(1, 4), qr(3, 4)]);
        // Constant map: whole domain as a flat.
        let c = PlMap::constant(g.clone(), g.clone(), &PointRef::new(EdgeId(0), qr(1, 3)));
        let pre = c.preimage_of(&PointRef::new(EdgeId(0), qr(1, 3)));
        assert!(pre.isolated.is_empty());
        assert_eq!(pre.flats, Subcontinuum::whole(&g));
    }

    #[test]
    fn compose_tent_tent() {
        let g = unit();
        let t = tent(&g);
        let tt = compose(&t, &t).unwrap();
        let em = tt.edge_map(EdgeId(0));
        assert_eq!(
            em.breaks,
            vec![qi(0), qr(1, 4), qr(1, 2), qr(3, 4), qi(1)]
        );
        let vals: Vec<Q> = em.anchors.iter().map(|a| a.t.clone()).collect();
        assert_eq!(vals, vec![qi(0), qi(1), qi(0), qi(1), qi(0)]);
        // Identity laws.
        let id = PlMap::identity(g.clone());
        let t_id = compose(&t, &id).unwrap();
        let id_t = compose(&id, &t).unwrap();
        for k in 0..=16i64 {
            let p = PointRef::new(EdgeId(0), qr(k, 16));
            assert_eq!(t.evaluate(&p).t, t_id.evaluate(&p).t);
            assert_eq!(t.evaluate(&p).t, id_t.evaluate(&p).t);
        }
    }

    #[test]
    fn compose_rejects_mismatch() {
        let g = unit();
        let g2 = Arc::new(crate::graph::circle_graph(qi(1)));
        let t = tent(&g);
        let c = PlMap::identity(g2);
        assert_eq!(
            compose(&t, &c).unwrap_err(),
            PlMapError::DomainMismatch
        );
    }

    #[test]
    fn sup_distance_cases() {
        let g = unit();
        let t = tent(&g);
        assert_eq!(t.sup_distance(&t).unwrap(), qi(0));
        let id = PlMap::identity(g.clone());
        // max |tent(x) - x| over [0,1] is 1, attained at x = 1.
        assert_eq!(t.sup_distance(&id).unwrap(), qi(1));
        let c0 = PlMap::constant(g.clone(), g.clone(), &PointRef::new(EdgeId(0), qi(0).into()));
        let c1 = PlMap::constant(g.clone(), g.clone(), &PointRef::new(EdgeId(0), qi(1).into()));
        assert_eq!(c0.sup_distance(&c1).unwrap(), qi(1));
    }
}
