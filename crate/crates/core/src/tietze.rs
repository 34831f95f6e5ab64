//! PL extension of finitely many point values to the whole graph.
//!
//! Assigned values are interpolated linearly along edges; unassigned
//! vertices are filled in breadth-first as the mean of neighboring known
//! values, and regions with no assignments at all become constant at the
//! middle of the range.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::graph::{interval_graph, CanonPoint, EdgeId, MetricGraph, PointRef, VertexId};
use crate::num::Q;
use crate::path::Path;
use crate::plmap::{EdgeMap, PlMap};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TietzeError {
    ValueOutOfRange,
    ConflictingAssignment,
}

impl fmt::Display for TietzeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TietzeError::ValueOutOfRange => write!(f, "assigned value outside the range"),
            TietzeError::ConflictingAssignment => {
                write!(f, "two different values assigned to one point")
            }
        }
    }
}

/// Extends `values` to a PL map `domain -> [0,1]` taking values in
/// `[lo, hi]` (which must sit inside `[0,1]`).
pub fn tietze_extend(
    domain: &Arc<MetricGraph>,
    values: &[(PointRef, Q)],
    lo: &Q,
    hi: &Q,
) -> Result<PlMap, TietzeError> {
    debug_assert!(Q::zero() <= *lo && lo <= hi && *hi <= Q::one());
    for (_, v) in values {
        if v < lo || v > hi {
            return Err(TietzeError::ValueOutOfRange);
        }
    }

    // Sort assignments into vertex values and per-edge interior nodes.
    let mut vertex_val: BTreeMap<VertexId, Q> = BTreeMap::new();
    let mut interior: BTreeMap<EdgeId, Vec<(Q, Q)>> = BTreeMap::new();
    for (p, v) in values {
        match domain.canon(p) {
            CanonPoint::Vertex(w) => {
                if let Some(old) = vertex_val.get(&w) {
                    if old != v {
                        return Err(TietzeError::ConflictingAssignment);
                    }
                } else {
                    vertex_val.insert(w, v.clone());
                }
            }
            CanonPoint::Inner(e, t) => {
                let list = interior.entry(e).or_default();
                if let Some((_, old)) = list.iter().find(|(s, _)| *s == t) {
                    if old != v {
                        return Err(TietzeError::ConflictingAssignment);
                    }
                } else {
                    list.push((t, v.clone()));
                }
            }
        }
    }
    for list in interior.values_mut() {
        list.sort_by(|a, b| a.0.cmp(&b.0));
    }

    // Fill unassigned vertices wave by wave: each wave assigns the mean of
    // the values already known at neighboring nodes (nearest node along each
    // incident edge: an interior assignment or the far endpoint).
    loop {
        let mut adds: Vec<(VertexId, Q)> = Vec::new();
        for v in domain.vertex_ids() {
            if vertex_val.contains_key(&v) {
                continue;
            }
            let mut known: Vec<Q> = Vec::new();
            for &(e, is_from) in domain.incidence(v) {
                let nodes = interior.get(&e);
                let nearest = if is_from {
                    nodes.and_then(|l| l.first()).map(|(_, val)| val.clone())
                } else {
                    nodes.and_then(|l| l.last()).map(|(_, val)| val.clone())
                };
                match nearest {
                    Some(val) => known.push(val),
                    None => {
                        let other = {
                            let edge = domain.edge(e);
                            if is_from {
                                edge.to
                            } else {
                                edge.from
                            }
                        };
                        if let Some(val) = vertex_val.get(&other) {
                            known.push(val.clone());
                        }
                    }
                }
            }
            if !known.is_empty() {
                let n = Q::from_integer((known.len() as i64).into());
                let sum = known.into_iter().fold(Q::zero(), |a, b| a + b);
                adds.push((v, sum / n));
            }
        }
        if adds.is_empty() {
            break;
        }
        for (v, val) in adds {
            vertex_val.insert(v, val);
        }
    }
    // No assignments reachable at all: constant middle value.
    let middle = (lo + hi) / Q::from_integer(2.into());
    for v in domain.vertex_ids() {
        vertex_val.entry(v).or_insert_with(|| middle.clone());
    }

    // Assemble per-edge PL data.
    let codomain = Arc::new(interval_graph());
    let out = EdgeId(0);
    let mut edges = Vec::new();
    for e in domain.edge_ids() {
        let edge = domain.edge(e);
        let mut nodes: Vec<(Q, Q)> = vec![(Q::zero(), vertex_val[&edge.from].clone())];
        if let Some(list) = interior.get(&e) {
            nodes.extend(list.iter().cloned());
        }
        nodes.push((Q::one(), vertex_val[&edge.to].clone()));
        let breaks: Vec<Q> = nodes.iter().map(|(t, _)| t.clone()).collect();
        let anchors: Vec<PointRef> = nodes
            .iter()
            .map(|(_, v)| PointRef::new(out, v.clone()))
            .collect();
        let mut paths = Vec::new();
        for w in nodes.windows(2) {
            let (v0, v1) = (&w[0].1, &w[1].1);
            paths.push(if v0 == v1 {
                Path::empty()
            } else {
                Path::single(out, v0.clone(), v1.clone())
            });
        }
        edges.push(EdgeMap {
            breaks,
            anchors,
            paths,
        });
    }
    Ok(PlMap::new(domain.clone(), codomain, edges).expect("interpolation is continuous"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{circle_graph, Edge};
    use crate::num::{qi, qr};

    #[test]
    fn interval_identity_from_endpoints() {
        let g = Arc::new(interval_graph());
        let f = tietze_extend(
            &g,
            &[
                (PointRef::new(EdgeId(0), qi(0).into()), qi(0).into()),
                (PointRef::new(EdgeId(0), qi(1).into()), qi(1).into()),
            ],
            &qi(0).into(),
            &qi(1).into(),
        )
        .unwrap();
        for k in 0..=8i64 {
            let p = PointRef::new(EdgeId(0), qr(k, 8));
            assert_eq!(f.evaluate(&p).t, qr(k, 8));
        }
    }

    #[test]
    fn circle_single_value_constant() {
        let g = Arc::new(circle_graph(qi(1)));
        let f = tietze_extend(
            &g,
            &[(PointRef::new(EdgeId(0), qi(0).into()), qr(1, 2))],
            &qi(0).into(),
            &qi(1).into(),
        )
        .unwrap();
        for k in 0..8i64 {
            assert_eq!(f.evaluate(&PointRef::new(EdgeId(0), qr(k, 8))).t, qr(1, 2));
        }
    }

    #[test]
    fn y_tree_center_gets_mean() {
        let mk = |from, to| Edge {
            from: VertexId(from),
            to: VertexId(to),
            length: qi(1),
        };
        let g = Arc::new(MetricGraph::new(4, vec![mk(0, 1), mk(0, 2), mk(0, 3)]).unwrap());
        let f = tietze_extend(
            &g,
            &[
                (PointRef::new(EdgeId(0), qi(1).into()), qi(0).into()),
                (PointRef::new(EdgeId(1), qi(1).into()), qr(1, 2)),
                (PointRef::new(EdgeId(2), qi(1).into()), qi(1).into()),
            ],
            &qi(0).into(),
            &qi(1).into(),
        )
        .unwrap();
        // Center value is the mean of the three leaf values.
        assert_eq!(f.evaluate(&PointRef::new(EdgeId(0), qi(0).into())).t, qr(1, 2));
        // Continuity and range at all breakpoints.
        for e in 0..3u32 {
            for k in 0..=4i64 {
                let v = f.evaluate(&PointRef::new(EdgeId(e), qr(k, 4))).t;
                assert!(v >= qi(0) && v <= qi(1));
            }
        }
        assert_eq!(f.evaluate(&PointRef::new(EdgeId(2), qr(1, 2))).t, qr(3, 4));
    }

    #[test]
    fn out_of_range_rejected() {
        let g = Arc::new(interval_graph());
        let err = tietze_extend(
            &g,
            &[(PointRef::new(EdgeId(0), qi(0).into()), qi(1).into())],
            &qi(0).into(),
            &qr(1, 2),
        )
        .unwrap_err();
        assert_eq!(err, TietzeError::ValueOutOfRange);
    }
}
