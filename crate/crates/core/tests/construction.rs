//! End-to-end construction runs on the three canonical spaces.

use std::sync::Arc;

use puremix_core::certify::{
    certify_exactness, certify_pure_mixing, factor_commute_check, ExactnessVerdict, MixingVerdict,
};
use puremix_core::graph::{circle_graph, interval_graph, Edge, EdgeId, MetricGraph, PointRef, VertexId};
use puremix_core::mixing::{build_pure_mixing, BuildOptions};
use puremix_core::num::{qi, qr};
use puremix_core::Verdict;

fn theta_graph() -> MetricGraph {
    let mk = |from, to| Edge {
        from: VertexId(from),
        to: VertexId(to),
        length: qi(1),
    };
    MetricGraph::new(2, vec![mk(0, 1), mk(0, 1), mk(0, 1)]).unwrap()
}

#[test]
fn interval_two_stages() {
    let g = Arc::new(interval_graph());
    let result = build_pure_mixing(&g, 2, &BuildOptions::default()).unwrap();
    for (i, cert) in result.stage_certs.iter().enumerate() {
        assert!(
            cert.verdict != Verdict::Fail,
            "stage {} failed: {:?}",
            i,
            cert
        );
    }
    // The fixed point keeps a singleton fiber.
    let pre = result.h.preimage_of(&result.fixed_point);
    assert!(pre.is_single_point(&result.space, &result.fixed_point));
    // h is mixing at the declared resolution and not exact.
    let pm = certify_pure_mixing(&result.h, &result.resolution, None, 4, 64);
    assert_eq!(pm.mixing.verdict, MixingVerdict::Mixing, "{:?}", pm.mixing.cert);
    assert!(matches!(
        pm.exactness.verdict,
        ExactnessVerdict::NotExact { .. }
    ));
}

#[test]
fn circle_surgery_and_factor() {
    let g = Arc::new(circle_graph(qi(1)));
    let result = build_pure_mixing(&g, 2, &BuildOptions::default()).unwrap();
    let glue = result.glue.as_ref().expect("circle needs surgery");
    let cert = factor_commute_check(glue, &result.h_work, &result.h, 500);
    assert!(cert.passed(), "{:?}", cert);
    let pre = result.h.preimage_of(&result.fixed_point);
    assert!(pre.is_single_point(&result.space, &result.fixed_point));
}

#[test]
fn theta_surgery_and_factor() {
    let g = Arc::new(theta_graph());
    let result = build_pure_mixing(&g, 1, &BuildOptions::default()).unwrap();
    let glue = result.glue.as_ref().expect("theta needs surgery");
    let cert = factor_commute_check(glue, &result.h_work, &result.h, 500);
    assert!(cert.passed(), "{:?}", cert);
    let e = certify_exactness(&result.h, 4, 32);
    assert!(matches!(e.verdict, ExactnessVerdict::NotExact { .. }));
}

#[test]
fn y_tree_leaf_case() {
    let mk = |from, to| Edge {
        from: VertexId(from),
        to: VertexId(to),
        length: qi(1),
    };
    let g = Arc::new(MetricGraph::new(4, vec![mk(0, 1), mk(0, 2), mk(0, 3)]).unwrap());
    let result = build_pure_mixing(&g, 1, &BuildOptions::default()).unwrap();
    assert!(result.glue.is_none());
    let pre = result.h.preimage_of(&result.fixed_point);
    assert!(pre.is_single_point(&result.space, &result.fixed_point));
    let _ = (EdgeId(0), qr(1, 2));
}
