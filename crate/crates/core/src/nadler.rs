//! Continuous PL surjections from an interval onto a connected subcontinuum,
//! honoring finitely many prescribed values exactly.
//!
//! The construction routes a doubled-edge closed walk of the target (which
//! visits every segment) through the widest free gap between consecutive
//! constraints, joins constraint values by geodesics inside the target, and
//! replaces empty gaps by short out-and-back detours so no piece is constant.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::euler::doubled_euler_circuit;
use crate::graph::{interval_graph, CanonPoint, MetricGraph, PointRef};
use crate::num::Q;
use crate::path::{geodesic_path, path_to_parent, Path};
use crate::plmap::{EdgeMap, PlMap};
use crate::subset::{DerivedGraph, Subcontinuum};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum NadlerError {
    InfeasibleConstraints,
    EmptyTarget,
}

impl fmt::Display for NadlerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NadlerError::InfeasibleConstraints => write!(f, "constraints are infeasible"),
            NadlerError::EmptyTarget => write!(f, "target has no nondegenerate segment"),
        }
    }
}

/// Piece data covering `[params.first(), params.last()]`.
pub struct Schedule {
    pub breaks: Vec<Q>,
    pub anchors: Vec<PointRef>,
    pub paths: Vec<Path>,
}

/// Builds pieces through the given strictly-increasing constraints, sweeping
/// the whole target once inside the widest gap. All paths stay inside the
/// target, so the image over the full parameter range is exactly the target.
pub fn schedule_onto(
    g: &MetricGraph,
    target: &Subcontinuum,
    constraints: &[(Q, PointRef)],
) -> Result<Schedule, NadlerError> {
    if !target.has_interior() {
        return Err(NadlerError::EmptyTarget);
    }
    if constraints.len() < 2 {
        return Err(NadlerError::InfeasibleConstraints);
    }
    for w in constraints.windows(2) {
        if w[0].0 >= w[1].0 {
            return Err(NadlerError::InfeasibleConstraints);
        }
    }
    for (_, v) in constraints {
        if !target.contains_point(g, v) {
            return Err(NadlerError::InfeasibleConstraints);
        }
    }
    let derived =
        DerivedGraph::build(g, target).map_err(|_| NadlerError::EmptyTarget)?;
    let locate = |p: &PointRef| -> Result<PointRef, NadlerError> {
        derived
            .from_parent(g, p)
            .ok_or(NadlerError::InfeasibleConstraints)
    };

    // Widest gap hosts the full sweep.
    let mut widest = 0usize;
    for i in 1..constraints.len() - 1 {
        let cur = &constraints[i + 1].0 - &constraints[i].0;
        let best = &constraints[widest + 1].0 - &constraints[widest].0;
        if cur > best {
            widest = i;
        }
    }

    let mut breaks: Vec<Q> = vec![constraints[0].0.clone()];
    let mut anchors: Vec<PointRef> = vec![constraints[0].1.clone()];
    let mut paths: Vec<Path> = Vec::new();
    for (i, w) in constraints.windows(2).enumerate() {
        let from_d = locate(&w[0].1)?;
        let to_d = locate(&w[1].1)?;
        let dg = &derived.graph;
        let mut path_d = if i == widest {
            // Route to a vertex, run the doubled-edge circuit, come back.
            let hub = match dg.canon(&from_d) {
                CanonPoint::Vertex(v) => v,
                CanonPoint::Inner(e, _) => dg.edge(e).from,
            };
            let hub_pt = dg.point_of(&CanonPoint::Vertex(hub));
            let leg = geodesic_path(dg, &from_d, &hub_pt);
            let sweep = doubled_euler_circuit(dg, hub);
            let back = geodesic_path(dg, &hub_pt, &to_d);
            leg.concat(dg, sweep).concat(dg, back)
        } else {
            geodesic_path(dg, &from_d, &to_d)
        };
        if path_d.is_empty() {
            path_d = detour(dg, &from_d);
        }
        paths.push(path_to_parent(&derived, &path_d));
        breaks.push(w[1].0.clone());
        anchors.push(w[1].1.clone());
    }
    Ok(Schedule {
        breaks,
        anchors,
        paths,
    })
}

/// A short out-and-back excursion at `p`, used to avoid constant pieces.
fn detour(g: &MetricGraph, p: &PointRef) -> Path {
    let (edge, t) = match g.canon(p) {
        CanonPoint::Inner(e, t) => (e, t),
        CanonPoint::Vertex(v) => {
            let &(e, is_from) = g.incidence(v).first().unwrap();
            (e, if is_from { Q::zero() } else { Q::one() })
        }
    };
    let mid = if t < Q::new(1.into(), 2.into()) {
        (&t + Q::one()) / Q::from_integer(2.into())
    } else {
        &t / Q::from_integer(2.into())
    };
    Path {
        steps: vec![
            crate::path::PathStep {
                edge,
                from_t: t.clone(),
                to_t: mid.clone(),
            },
            crate::path::PathStep {
                edge,
                from_t: mid,
                to_t: t,
            },
        ],
    }
}

/// Continuous PL surjection of `[a, b] ⊆ [0,1]` onto `target`, honoring the
/// constraints exactly; outside `[a, b]` the map is constant at the nearest
/// scheduled value. Surjectivity is certifiable via `image_of = target`.
pub fn nadler_surjection(
    space: &Arc<MetricGraph>,
    a: &Q,
    b: &Q,
    target: &Subcontinuum,
    constraints: &[(Q, PointRef)],
) -> Result<PlMap, NadlerError> {
    if a >= b || a < &Q::zero() || b > &Q::one() {
        return Err(NadlerError::InfeasibleConstraints);
    }
    if !target.has_interior() {
        return Err(NadlerError::EmptyTarget);
    }
    let mut cons: Vec<(Q, PointRef)> = constraints.to_vec();
    cons.sort_by(|x, y| x.0.cmp(&y.0));
    for w in cons.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(NadlerError::InfeasibleConstraints);
        }
    }
    if cons.iter().any(|(p, _)| p < a || p > b) {
        return Err(NadlerError::InfeasibleConstraints);
    }
    if cons.is_empty() {
        let v = target.canonical_point(space).unwrap();
        cons.push((a.clone(), v));
    }
    if &cons[0].0 > a {
        cons.insert(0, (a.clone(), cons[0].1.clone()));
    }
    if &cons.last().unwrap().0 < b {
        cons.push((b.clone(), cons.last().unwrap().1.clone()));
    }
    let sched = schedule_onto(space, target, &cons)?;

    let mut breaks = Vec::new();
    let mut anchors = Vec::new();
    let mut paths = Vec::new();
    if a > &Q::zero() {
        breaks.push(Q::zero());
        anchors.push(sched.anchors[0].clone());
        paths.push(Path::empty());
    }
    breaks.extend(sched.breaks);
    anchors.extend(sched.anchors);
    paths.extend(sched.paths);
    if b < &Q::one() {
        breaks.push(Q::one());
        anchors.push(anchors.last().unwrap().clone());
        paths.push(Path::empty());
    }
    let domain = Arc::new(interval_graph());
    PlMap::new(
        domain,
        space.clone(),
        vec![EdgeMap {
            breaks,
            anchors,
            paths,
        }],
    )
    .map_err(|_| NadlerError::InfeasibleConstraints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, EdgeId, VertexId};
    use crate::num::{qi, qr};
    use crate::subset::Seg;

    #[test]
    fn sweep_covers_single_edge() {
        let g = Arc::new(interval_graph());
        let target = Subcontinuum::whole(&g);
        let left = PointRef::new(EdgeId(0), qi(0).into());
        let f = nadler_surjection(&g, &qi(0).into(), &qi(1).into(), &target, &[(qi(0).into(), left.clone())])
            .unwrap();
        assert!(g.same_point(&f.evaluate(&PointRef::new(EdgeId(0), qi(0).into())), &left));
        assert_eq!(f.image_of(&Subcontinuum::whole(&g)), target);
    }

    #[test]
    fn theta_target_with_two_constraints() {
        let mk = |from, to| Edge {
            from: VertexId(from),
            to: VertexId(to),
            length: qi(1),
        };
        let theta = Arc::new(MetricGraph::new(2, vec![mk(0, 1), mk(0, 1), mk(0, 1)]).unwrap());
        let target = Subcontinuum::whole(&theta);
        let a_pt = PointRef::new(EdgeId(0), qr(1, 3));
        let b_pt = PointRef::new(EdgeId(2), qr(2, 3));
        let interval = Arc::new(interval_graph());
        let _ = interval;
        let f = nadler_surjection(
            &theta,
            &qr(1, 4),
            &qr(3, 4),
            &target,
            &[(qr(1, 4), a_pt.clone()), (qr(3, 4), b_pt.clone())],
        )
        .unwrap();
        assert!(theta.same_point(&f.evaluate(&PointRef::new(EdgeId(0), qr(1, 4))), &a_pt));
        assert!(theta.same_point(&f.evaluate(&PointRef::new(EdgeId(0), qr(3, 4))), &b_pt));
        // Image over [1/4, 3/4] is the whole theta graph; constants outside.
        assert_eq!(f.image_of_interval(&qr(1, 4), &qr(3, 4)), target);
        assert!(theta.same_point(&f.evaluate(&PointRef::new(EdgeId(0), qi(0).into())), &a_pt));
    }

    #[test]
    fn duplicate_parameters_rejected() {
        let g = Arc::new(interval_graph());
        let target = Subcontinuum::whole(&g);
        let v = PointRef::new(EdgeId(0), qi(0).into());
        let w = PointRef::new(EdgeId(0), qi(1).into());
        let err = nadler_surjection(
            &g,
            &qi(0).into(),
            &qi(1).into(),
            &target,
            &[(qr(1, 2), v), (qr(1, 2), w)],
        )
        .unwrap_err();
        assert_eq!(err, NadlerError::InfeasibleConstraints);
    }

    #[test]
    fn empty_target_rejected() {
        let g = Arc::new(interval_graph());
        let point_only = Subcontinuum::from_raw(
            &g,
            vec![(EdgeId(0), Seg::new(qr(1, 2), qr(1, 2)))],
        );
        let err = nadler_surjection(&g, &qi(0).into(), &qi(1).into(), &point_only, &[]).unwrap_err();
        assert_eq!(err, NadlerError::EmptyTarget);
    }

    #[test]
    fn no_constant_pieces_with_equal_constraints() {
        let g = Arc::new(interval_graph());
        let target = Subcontinuum::whole(&g);
        let v = PointRef::new(EdgeId(0), qr(1, 2));
        let f = nadler_surjection(
            &g,
            &qi(0).into(),
            &qi(1).into(),
            &target,
            &[
                (qi(0).into(), v.clone()),
                (qr(1, 2), v.clone()),
                (qi(1).into(), v.clone()),
            ],
        )
        .unwrap();
        let em = f.edge_map(EdgeId(0));
        for p in &em.paths {
            assert!(!p.is_empty());
        }
        assert_eq!(f.image_of(&Subcontinuum::whole(&g)), target);
    }
}
