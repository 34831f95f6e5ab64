//! Projections onto the unit interval with singleton extreme fibers.
//!
//! [`build_projection`] produces a PL map `f : X -> [0,1]` with
//! `f^{-1}(0) = {x}`, `f^{-1}(1) = {y}`, and nondegenerate images of all
//! basis members. The construction starts from truncated distance functions
//! around `x` and `y`, fills the remaining region by a ratio interpolation of
//! the two distances, bumps any basis member on which the map is constant,
//! and finally replaces every residual flat piece by a train of tent bumps.
//! Each correction step keeps the sub-quarter and super-three-quarter level
//! sets shrinking and stays within its Cauchy budget, so the extreme fibers
//! never move.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::certify::{Certificate, Verdict};
use crate::cover::fine_cover;
use crate::graph::{interval_graph, EdgeId, MetricGraph, PointRef};
use crate::num::{format_ratio, pow2, q_max, q_min, Q};
use crate::path::Path;
use crate::plmap::{EdgeMap, PlMap};
use crate::subset::{Seg, Subcontinuum};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ProjectionError {
    DegenerateSpec,
}

impl fmt::Display for ProjectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectionError::DegenerateSpec => {
                write!(f, "zero and one point coincide without the merged flag")
            }
        }
    }
}

/// What to project: the space, the two extreme-fiber points, and the finite
/// basis whose members must have nondegenerate images.
#[derive(Clone, Debug)]
pub struct ProjectionSpec {
    pub space: Arc<MetricGraph>,
    pub zero_point: PointRef,
    pub one_point: PointRef,
    /// The construction variant where both distinguished fixed points
    /// coincide; the one-point is then only auxiliary.
    pub merged: bool,
    pub basis: Vec<Subcontinuum>,
}

impl ProjectionSpec {
    /// Canonical spec: basis = fine covers at meshes `2^-1 .. 2^-depth`.
    /// With the merged flag and coinciding points, the auxiliary one-point
    /// is taken to be the farthest point from `x` (never a cut point).
    pub fn new(
        space: Arc<MetricGraph>,
        x: PointRef,
        y: PointRef,
        merged: bool,
        basis_depth: u32,
    ) -> Result<ProjectionSpec, ProjectionError> {
        let one_point = if space.same_point(&x, &y) {
            if !merged {
                return Err(ProjectionError::DegenerateSpec);
            }
            space.farthest_point(&x)
        } else {
            y
        };
        let mut basis = Vec::new();
        for k in 1..=basis_depth {
            basis.extend(fine_cover(&space, &pow2(-(k as i32))).members);
        }
        Ok(ProjectionSpec {
            space,
            zero_point: x,
            one_point,
            merged,
            basis,
        })
    }
}

/// One correction step's safety record.
#[derive(Clone, Debug)]
pub struct CorrectionStep {
    pub index: u32,
    /// Exact sup-distance between the map before and after the step.
    pub sup_change: Q,
    pub budget: Q,
    pub fibers_fixed: bool,
    pub low_level_safe: bool,
    pub high_level_safe: bool,
}

/// The built projection with its correction history.
pub struct ProjectionBuild {
    pub map: PlMap,
    pub steps: Vec<CorrectionStep>,
    pub bumped_members: usize,
    pub flat_pieces_removed: usize,
    /// Frozen witness pairs (one per basis member) with distinct values.
    pub witnesses: Vec<(PointRef, PointRef)>,
}

/// Scalar PL function on the graph: per edge, cuts with values in `[0,1]`.
#[derive(Clone, Debug)]
struct ScalarPl {
    edges: Vec<(Vec<Q>, Vec<Q>)>,
}

impl ScalarPl {
    fn value_at(&self, p: &PointRef) -> Q {
        let (cuts, vals) = &self.edges[p.edge.0 as usize];
        let mut j = 0;
        while j + 1 < cuts.len() && cuts[j + 1] < p.t {
            j += 1;
        }
        if cuts[j] == p.t {
            return vals[j].clone();
        }
        if cuts[j + 1] == p.t {
            return vals[j + 1].clone();
        }
        let frac = (&p.t - &cuts[j]) / (&cuts[j + 1] - &cuts[j]);
        &vals[j] + (&vals[j + 1] - &vals[j]) * frac
    }

    fn insert_cut(&mut self, e: EdgeId, t: &Q) {
        let val = self.value_at(&PointRef::new(e, t.clone()));
        let (cuts, vals) = &mut self.edges[e.0 as usize];
        match cuts.binary_search(t) {
            Ok(_) => {}
            Err(pos) => {
                cuts.insert(pos, t.clone());
                vals.insert(pos, val);
            }
        }
    }

    /// Adds a tent of half-width `rho` (in parameter units) and signed peak
    /// `delta` (in value units) centered at `(e, center)`.
    fn add_tent(&mut self, e: EdgeId, center: &Q, rho: &Q, delta: &Q) {
        let lo = center - rho;
        let hi = center + rho;
        self.insert_cut(e, &lo);
        self.insert_cut(e, center);
        self.insert_cut(e, &hi);
        let (cuts, vals) = &mut self.edges[e.0 as usize];
        let pos = cuts.binary_search(center).expect("cut inserted");
        vals[pos] = &vals[pos] + delta;
    }

    /// Exact sup-distance to another scalar function (joint-cut evaluation).
    fn sup_diff(&self, other: &ScalarPl) -> Q {
        let mut best = Q::zero();
        for (i, (cuts, _)) in self.edges.iter().enumerate() {
            let e = EdgeId(i as u32);
            let mut all: Vec<Q> = cuts.clone();
            all.extend(other.edges[i].0.iter().cloned());
            all.sort();
            all.dedup();
            for t in all {
                let p = PointRef::new(e, t);
                let d = (self.value_at(&p) - other.value_at(&p)).abs();
                best = q_max(best, d);
            }
        }
        best
    }

    /// The set `{f <= c}` (or `{f >= c}` when `upper`).
    fn level_set(&self, g: &MetricGraph, c: &Q, upper: bool) -> Subcontinuum {
        let mut raw: Vec<(EdgeId, Seg)> = Vec::new();
        for (i, (cuts, vals)) in self.edges.iter().enumerate() {
            let e = EdgeId(i as u32);
            for j in 0..cuts.len() - 1 {
                let (t0, t1) = (&cuts[j], &cuts[j + 1]);
                let (v0, v1) = (&vals[j], &vals[j + 1]);
                let ok0 = if upper { v0 >= c } else { v0 <= c };
                let ok1 = if upper { v1 >= c } else { v1 <= c };
                match (ok0, ok1) {
                    (true, true) => raw.push((e, Seg::new(t0.clone(), t1.clone()))),
                    (false, false) => {}
                    _ => {
                        // affine crossing
                        let tc = t0 + (t1 - t0) * (c - v0) / (v1 - v0);
                        if ok0 {
                            raw.push((e, Seg::new(t0.clone(), tc)));
                        } else {
                            raw.push((e, Seg::new(tc, t1.clone())));
                        }
                    }
                }
            }
        }
        Subcontinuum::from_raw(g, raw)
    }

    /// Exact value range over a set, with witness points.
    fn range_over(&self, s: &Subcontinuum) -> (Q, PointRef, Q, PointRef) {
        let mut lo: Option<(Q, PointRef)> = None;
        let mut hi: Option<(Q, PointRef)> = None;
        for (e, seg) in s.segments() {
            let (cuts, _) = &self.edges[e.0 as usize];
            let mut cands: Vec<Q> = vec![seg.lo.clone(), seg.hi.clone()];
            for t in cuts {
                if *t > seg.lo && *t < seg.hi {
                    cands.push(t.clone());
                }
            }
            for t in cands {
                let p = PointRef::new(e, t);
                let v = self.value_at(&p);
                let low_better = match &lo {
                    None => true,
                    Some((b, _)) => &v < b,
                };
                if low_better {
                    lo = Some((v.clone(), p.clone()));
                }
                let hi_better = match &hi {
                    None => true,
                    Some((b, _)) => &v > b,
                };
                if hi_better {
                    hi = Some((v, p));
                }
            }
        }
        let (lv, lp) = lo.expect("nonempty set");
        let (hv, hp) = hi.expect("nonempty set");
        (lv, lp, hv, hp)
    }

    /// Maximal runs of consecutive equal-value pieces: `(edge, lo, hi, value)`.
    fn flat_runs(&self) -> Vec<(EdgeId, Q, Q, Q)> {
        let mut out = Vec::new();
        for (i, (cuts, vals)) in self.edges.iter().enumerate() {
            let e = EdgeId(i as u32);
            let mut j = 0;
            while j + 1 < cuts.len() {
                if vals[j] == vals[j + 1] {
                    let start = j;
                    while j + 1 < cuts.len() && vals[j] == vals[j + 1] {
                        j += 1;
                    }
                    out.push((e, cuts[start].clone(), cuts[j].clone(), vals[start].clone()));
                } else {
                    j += 1;
                }
            }
        }
        out
    }

    fn to_plmap(&self, domain: &Arc<MetricGraph>) -> PlMap {
        let codomain = Arc::new(interval_graph());
        let out = EdgeId(0);
        let edges = self
            .edges
            .iter()
            .map(|(cuts, vals)| {
                let anchors = vals
                    .iter()
                    .map(|v| PointRef::new(out, v.clone()))
                    .collect();
                let paths = vals
                    .windows(2)
                    .map(|w| {
                        if w[0] == w[1] {
                            Path::empty()
                        } else {
                            Path::single(out, w[0].clone(), w[1].clone())
                        }
                    })
                    .collect();
                EdgeMap {
                    breaks: cuts.clone(),
                    anchors,
                    paths,
                }
            })
            .collect();
        PlMap::new(domain.clone(), codomain, edges).expect("scalar function is continuous")
    }
}

/// Builds the initial three-region function: truncated distance to `x` near
/// `x`, one minus truncated distance to `y` near `y`, and the two-distance
/// ratio interpolation in between, linearized at all region cuts.
fn initial_function(spec: &ProjectionSpec) -> ScalarPl {
    let g = &spec.space;
    let x = &spec.zero_point;
    let y = &spec.one_point;
    let d_xy = g.distance(x, y);
    let r = q_min(Q::new(1.into(), 4.into()), d_xy / Q::from_integer(3.into()));

    let dist_cuts = |p: &PointRef, e: EdgeId| -> Vec<Q> {
        // Cuts making d(p, .) affine per cell, plus crossings with r.
        let edge = g.edge(e);
        let a = g.distance(p, &PointRef::new(e, Q::zero()));
        let b = g.distance(p, &PointRef::new(e, Q::one()));
        let mut cuts = Vec::new();
        let two = Q::from_integer(2.into());
        let peak = (&b - &a + &edge.length) / (&two * &edge.length);
        if peak > Q::zero() && peak < Q::one() {
            cuts.push(peak);
        }
        if e == p.edge {
            // the tent around p itself
            cuts.push(p.t.clone());
        }
        // r-crossings of the two branches (valid ones confirmed by value)
        for s in [(&r - &a) / &edge.length, Q::one() - (&r - &b) / &edge.length] {
            if s > Q::zero() && s < Q::one() {
                cuts.push(s);
            }
        }
        if e == p.edge {
            for s in [&p.t - &r / &edge.length, &p.t + &r / &edge.length] {
                if s > Q::zero() && s < Q::one() {
                    cuts.push(s);
                }
            }
        }
        cuts
    };

    let value_at = |p: &PointRef| -> Q {
        let dx = g.distance(x, p);
        let dy = g.distance(y, p);
        if dx <= r {
            dx
        } else if dy <= r {
            Q::one() - dy
        } else {
            // r + (1-2r) * (dx - r) / ((dx - r) + (dy - r))
            let num = &dx - &r;
            let den = (&dx - &r) + (&dy - &r);
            &r + (Q::one() - Q::from_integer(2.into()) * &r) * num / den
        }
    };

    let mut edges = Vec::new();
    for e in g.edge_ids() {
        let mut cuts: Vec<Q> = vec![Q::zero(), Q::one()];
        cuts.extend(dist_cuts(x, e));
        cuts.extend(dist_cuts(y, e));
        cuts.sort();
        cuts.dedup();
        // The ratio interpolation is not affine; evaluating at cuts and
        // interpolating linearly keeps it PL while preserving the boundary
        // values r and 1-r exactly, which is all the construction needs.
        let vals: Vec<Q> = cuts
            .iter()
            .map(|t| value_at(&PointRef::new(e, t.clone())))
            .collect();
        edges.push((cuts, vals));
    }
    ScalarPl { edges }
}

/// Safety check between consecutive corrections: the `<= 1/4` level set must
/// not grow and values there must not decrease (dually at `>= 3/4`).
fn level_safety(g: &MetricGraph, before: &ScalarPl, after: &ScalarPl) -> (bool, bool) {
    let quarter = Q::new(1.into(), 4.into());
    let three_q = Q::new(3.into(), 4.into());
    let low_before = before.level_set(g, &quarter, false);
    let low_after = after.level_set(g, &quarter, false);
    let mut low_ok = low_before.includes(g, &low_after);
    if low_ok {
        // values on the old low set never decrease
        low_ok = compare_on(g, before, after, &low_before, true);
    }
    let high_before = before.level_set(g, &three_q, true);
    let high_after = after.level_set(g, &three_q, true);
    let mut high_ok = high_before.includes(g, &high_after);
    if high_ok {
        high_ok = compare_on(g, before, after, &high_before, false);
    }
    (low_ok, high_ok)
}

/// Whether `after >= before` (or `<=` if `increasing` is false) on `s`,
/// checked at all joint cuts inside `s` plus segment ends (both functions
/// are affine between those points).
fn compare_on(
    g: &MetricGraph,
    before: &ScalarPl,
    after: &ScalarPl,
    s: &Subcontinuum,
    increasing: bool,
) -> bool {
    let _ = g;
    for (e, seg) in s.segments() {
        let mut cands: Vec<Q> = vec![seg.lo.clone(), seg.hi.clone()];
        for t in &before.edges[e.0 as usize].0 {
            if *t > seg.lo && *t < seg.hi {
                cands.push(t.clone());
            }
        }
        for t in &after.edges[e.0 as usize].0 {
            if *t > seg.lo && *t < seg.hi {
                cands.push(t.clone());
            }
        }
        for t in cands {
            let p = PointRef::new(e, t);
            let (b, a) = (before.value_at(&p), after.value_at(&p));
            if increasing && a < b {
                return false;
            }
            if !increasing && a > b {
                return false;
            }
        }
    }
    true
}

fn fibers_exact(g: &MetricGraph, f: &ScalarPl, spec: &ProjectionSpec) -> bool {
    let zero_set = f.level_set(g, &Q::zero(), false);
    let one_set = f.level_set(g, &Q::one(), true);
    let zx = Subcontinuum::point(g, &spec.zero_point);
    let oy = Subcontinuum::point(g, &spec.one_point);
    zero_set == zx && one_set == oy
}

/// Builds the projection map for the given spec.
pub fn build_projection(spec: &ProjectionSpec) -> Result<ProjectionBuild, ProjectionError> {
    if spec
        .space
        .same_point(&spec.zero_point, &spec.one_point)
    {
        return Err(ProjectionError::DegenerateSpec);
    }
    let g = &spec.space;
    let mut f = initial_function(spec);
    debug_assert!(fibers_exact(g, &f, spec));

    let mut steps: Vec<CorrectionStep> = Vec::new();
    let mut witnesses: Vec<(PointRef, PointRef)> = Vec::new();
    let mut frozen: Vec<PointRef> = vec![spec.zero_point.clone(), spec.one_point.clone()];
    let mut counter: u32 = 1;
    let mut bumped = 0usize;

    // Pass over the basis: freeze a distinct-value witness pair per member,
    // bumping members on which the function is constant.
    for member in &spec.basis {
        let (lo_v, lo_p, hi_v, hi_p) = f.range_over(member);
        if lo_v < hi_v {
            witnesses.push((lo_p.clone(), hi_p.clone()));
            frozen.push(lo_p);
            frozen.push(hi_p);
            continue;
        }
        // Constant value c on the member: bump a tent inside it.
        let before = f.clone();
        let c = lo_v;
        let (e, seg) = member
            .segments()
            .find(|(_, s)| !s.is_degenerate())
            .expect("basis members have nonempty interior");
        let len = &g.edge(e).length;
        let center = (&seg.lo + &seg.hi) / Q::from_integer(2.into());
        // Stay inside the segment and clear of frozen points.
        let mut rho = (&seg.hi - &seg.lo) / Q::from_integer(4.into());
        for p in &frozen {
            if p.edge == e {
                let gap = (&p.t - &center).abs();
                if gap.is_positive() {
                    rho = q_min(rho, gap / Q::from_integer(2.into()));
                }
            }
        }
        // Keep the peak inside the cap so the bump is an exact tent.
        let cap = pow2(-(counter as i32) - 2);
        rho = q_min(rho, &cap / len);
        let delta = &rho * len;
        let sign_up = c <= Q::new(1.into(), 2.into());
        let signed = if sign_up { delta.clone() } else { -delta.clone() };
        f.add_tent(e, &center, &rho, &signed);
        bumped += 1;

        let peak = PointRef::new(e, center.clone());
        let foot = PointRef::new(e, &center + &rho);
        witnesses.push((peak.clone(), foot.clone()));
        frozen.push(peak);
        frozen.push(foot);

        let sup_change = f.sup_diff(&before);
        let (low_ok, high_ok) = level_safety(g, &before, &f);
        steps.push(CorrectionStep {
            index: counter,
            sup_change: sup_change.clone(),
            budget: pow2(-(counter as i32)),
            fibers_fixed: fibers_exact(g, &f, spec),
            low_level_safe: low_ok,
            high_level_safe: high_ok,
        });
        debug_assert!(sup_change < pow2(-(counter as i32)));
        counter += 1;
    }

    // Final pass: replace every remaining flat run by a train of tents, all
    // within one correction budget.
    let before = f.clone();
    let cap = pow2(-(counter as i32) - 2);
    let mut flats_removed = 0usize;
    for (e, lo, hi, c) in before.flat_runs() {
        let len = &g.edge(e).length;
        // Forced boundaries: run ends plus frozen points inside the run.
        let mut bounds: Vec<Q> = vec![lo.clone(), hi.clone()];
        for p in &frozen {
            if p.edge == e && p.t > lo && p.t < hi {
                bounds.push(p.t.clone());
            }
        }
        bounds.sort();
        bounds.dedup();
        let sign_up = c <= Q::new(1.into(), 2.into());
        for w in bounds.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            // Cells of parameter width at most 2*cap/len.
            let width = b - a;
            let max_cell = Q::from_integer(2.into()) * &cap / len;
            let ratio = &width / &max_cell;
            let mut cells: num_bigint::BigInt = ratio.ceil().to_integer();
            if cells < 1.into() {
                cells = 1.into();
            }
            let cells_q = Q::from_integer(cells.clone());
            let mut i = num_bigint::BigInt::from(0);
            while i < cells {
                let c_lo = a + &width * Q::new(i.clone(), 1.into()) / &cells_q;
                let c_hi = a + &width * Q::new(&i + 1, 1.into()) / &cells_q;
                let center = (&c_lo + &c_hi) / Q::from_integer(2.into());
                let rho = (&c_hi - &c_lo) / Q::from_integer(2.into());
                let delta = &rho * len;
                let signed = if sign_up { delta.clone() } else { -delta };
                f.add_tent(e, &center, &rho, &signed);
                i += 1;
            }
            flats_removed += 1;
        }
    }
    if flats_removed > 0 {
        let sup_change = f.sup_diff(&before);
        let (low_ok, high_ok) = level_safety(g, &before, &f);
        steps.push(CorrectionStep {
            index: counter,
            sup_change: sup_change.clone(),
            budget: pow2(-(counter as i32)),
            fibers_fixed: fibers_exact(g, &f, spec),
            low_level_safe: low_ok,
            high_level_safe: high_ok,
        });
        debug_assert!(sup_change < pow2(-(counter as i32)));
    }
    debug_assert!(f.flat_runs().is_empty());
    debug_assert!(fibers_exact(g, &f, spec));

    Ok(ProjectionBuild {
        map: f.to_plmap(g),
        steps,
        bumped_members: bumped,
        flat_pieces_removed: flats_removed,
        witnesses,
    })
}

/// Independent verification of a projection against its spec: exact extreme
/// fibers and a nondegenerate image interval for every basis member.
pub fn verify_projection(f: &PlMap, spec: &ProjectionSpec) -> Certificate {
    let g = &spec.space;
    let mut cert = Certificate::new("projection");
    let zero = PointRef::new(EdgeId(0), Q::zero());
    let one = PointRef::new(EdgeId(0), Q::one());

    let pre0 = f.preimage_of(&zero);
    let ok0 = pre0.is_single_point(g, &spec.zero_point);
    cert.push(
        "fiber-at-zero",
        if ok0 { Verdict::Pass } else { Verdict::Fail },
        describe_preimage(&pre0),
    );
    let pre1 = f.preimage_of(&one);
    let ok1 = pre1.is_single_point(g, &spec.one_point);
    cert.push(
        "fiber-at-one",
        if ok1 { Verdict::Pass } else { Verdict::Fail },
        describe_preimage(&pre1),
    );

    let mut degenerate = 0usize;
    let mut min_len: Option<Q> = None;
    for member in &spec.basis {
        let img = f.image_of(member);
        let (lo, hi) = img.as_interval_range().expect("nonempty image");
        let span = &hi - &lo;
        if !span.is_positive() {
            degenerate += 1;
        }
        min_len = Some(match min_len.take() {
            None => span.clone(),
            Some(m) => q_min(m, span.clone()),
        });
    }
    cert.push(
        "basis-images-nondegenerate",
        if degenerate == 0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        {
            let mut s = String::new();
            s.push_str("degenerate members: ");
            s.push_str(&degenerate.to_string());
            if let Some(m) = &min_len {
                s.push_str(", min image length: ");
                s.push_str(&format_ratio(m));
            }
            s
        },
    );
    cert.finish();
    cert
}

fn describe_preimage(pre: &crate::plmap::Preimage) -> String {
    let mut s = String::new();
    s.push_str("isolated: ");
    s.push_str(&pre.isolated.len().to_string());
    s.push_str(", flat segments: ");
    s.push_str(&pre.flats.segment_count().to_string());
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{circle_graph, interval_graph};
    use crate::num::{qi, qr};

    #[test]
    fn interval_projection_is_clean() {
        let g = Arc::new(interval_graph());
        let spec = ProjectionSpec::new(
            g.clone(),
            PointRef::new(EdgeId(0), qi(0).into()),
            PointRef::new(EdgeId(0), qi(1).into()),
            false,
            3,
        )
        .unwrap();
        let built = build_projection(&spec).unwrap();
        let cert = verify_projection(&built.map, &spec);
        assert!(cert.passed(), "{:?}", cert);
        // Every correction stayed within budget and kept levels safe.
        for s in &built.steps {
            assert!(s.sup_change < s.budget);
            assert!(s.fibers_fixed && s.low_level_safe && s.high_level_safe);
        }
        // No flat pieces at all: images of all small sets are nondegenerate.
        for k in 0..16i64 {
            let seg = Subcontinuum::from_raw(
                &g,
                vec![(EdgeId(0), Seg::new(qr(k, 16), qr(k + 1, 16)))],
            );
            let img = built.map.image_of(&seg);
            let (lo, hi) = img.as_interval_range().unwrap();
            assert!(lo < hi);
        }
    }

    #[test]
    fn circle_projection_fibers() {
        let g = Arc::new(circle_graph(qi(2)));
        let spec = ProjectionSpec::new(
            g.clone(),
            PointRef::new(EdgeId(0), qi(0).into()),
            PointRef::new(EdgeId(0), qr(1, 2)),
            false,
            3,
        )
        .unwrap();
        let built = build_projection(&spec).unwrap();
        let cert = verify_projection(&built.map, &spec);
        assert!(cert.passed(), "{:?}", cert);
    }

    #[test]
    fn merged_variant_picks_farthest() {
        let g = Arc::new(interval_graph());
        let x = PointRef::new(EdgeId(0), qi(0).into());
        let spec = ProjectionSpec::new(g.clone(), x.clone(), x.clone(), true, 2).unwrap();
        assert!(g.same_point(&spec.one_point, &PointRef::new(EdgeId(0), qi(1).into())));
        let built = build_projection(&spec).unwrap();
        assert!(verify_projection(&built.map, &spec).passed());
    }

    #[test]
    fn coinciding_points_without_flag_rejected() {
        let g = Arc::new(interval_graph());
        let x = PointRef::new(EdgeId(0), qr(1, 2));
        let err = ProjectionSpec::new(g, x.clone(), x, false, 2).unwrap_err();
        assert_eq!(err, ProjectionError::DegenerateSpec);
    }

    #[test]
    fn constant_map_fails_verification() {
        let g = Arc::new(interval_graph());
        let spec = ProjectionSpec::new(
            g.clone(),
            PointRef::new(EdgeId(0), qi(0).into()),
            PointRef::new(EdgeId(0), qi(1).into()),
            false,
            2,
        )
        .unwrap();
        let half = PlMap::constant(
            g.clone(),
            Arc::new(interval_graph()),
            &PointRef::new(EdgeId(0), qr(1, 2)),
        );
        assert!(!verify_projection(&half, &spec).passed());
    }

    #[test]
    fn tent_map_fails_fiber_check() {
        let g = Arc::new(interval_graph());
        let spec = ProjectionSpec::new(
            g.clone(),
            PointRef::new(EdgeId(0), qi(0).into()),
            PointRef::new(EdgeId(0), qi(1).into()),
            false,
            2,
        )
        .unwrap();
        let tent = PlMap::interval_map(
            g.clone(),
            &[(qi(0).into(), qi(0).into()), (qr(1, 2), qi(1).into()), (qi(1).into(), qi(0).into())],
        )
        .unwrap();
        // f^{-1}(0) = {0, 1}, not a singleton.
        assert!(!verify_projection(&tent, &spec).passed());
    }
}
