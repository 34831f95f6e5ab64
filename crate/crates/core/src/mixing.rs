//! Staged construction of pure mixing self-maps on metric graphs.
//!
//! The map is assembled as `h = g ∘ f`, where `f` projects the space onto
//! `[0,1]` with singleton fibers over `0` and `1`, and `g` is built stage by
//! stage: each stage refines a cover of the space, shrinks two end continua
//! around the distinguished fixed points, pins periodic seed values, and
//! re-sweeps every grid gap onto a small target continuum. Thirteen exact
//! per-stage properties (checked by [`MixingBuilder::check_stage`]) drive
//! mixing, dense periodicity, and the singleton-fiber non-exactness witness
//! at the declared resolution `2^-N`.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::certify::{Certificate, Verdict};
use crate::cover::{fine_cover_of, member_containing};
use crate::cutpoint::{cut_surgery, noncut_decomposition, select_base_point, BaseCase, CutError};
use crate::graph::{EdgeId, MetricGraph, PointRef};
use crate::num::{format_ratio, pow2, q_max, q_min, Q};
use crate::path::geodesic_path_within;
use crate::plmap::{compose, EdgeMap, PlMap, PlMapError};
use crate::projection::{build_projection, ProjectionBuild, ProjectionError, ProjectionSpec};
use crate::nadler::{schedule_onto, NadlerError};
use crate::subset::{closed_ball, DerivedGraph, Subcontinuum};

#[derive(Clone, Debug)]
pub enum StageError {
    ProjectionInvalid,
    Infeasible {
        property: &'static str,
        detail: String,
    },
    FiberViolation,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StageError::ProjectionInvalid => write!(f, "projection lacks the required fibers"),
            StageError::Infeasible { property, detail } => {
                write!(f, "stage infeasible at {}: {}", property, detail)
            }
            StageError::FiberViolation => write!(f, "assembled map has a wrong fiber"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum BuildError {
    Projection(ProjectionError),
    Stage(StageError),
    Map(PlMapError),
    Cut(CutError),
    Nadler(NadlerError),
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::Projection(e) => write!(f, "projection: {}", e),
            BuildError::Stage(e) => write!(f, "stage: {}", e),
            BuildError::Map(e) => write!(f, "map: {}", e),
            BuildError::Cut(e) => write!(f, "surgery: {}", e),
            BuildError::Nadler(e) => write!(f, "surjection: {}", e),
        }
    }
}

impl From<StageError> for BuildError {
    fn from(e: StageError) -> Self {
        BuildError::Stage(e)
    }
}
impl From<ProjectionError> for BuildError {
    fn from(e: ProjectionError) -> Self {
        BuildError::Projection(e)
    }
}
impl From<PlMapError> for BuildError {
    fn from(e: PlMapError) -> Self {
        BuildError::Map(e)
    }
}
impl From<CutError> for BuildError {
    fn from(e: CutError) -> Self {
        BuildError::Cut(e)
    }
}
impl From<NadlerError> for BuildError {
    fn from(e: NadlerError) -> Self {
        BuildError::Nadler(e)
    }
}

/// Tunables of the staged construction.
#[derive(Clone, Debug)]
pub struct BuildOptions {
    /// Extra grid refinement per stage: the middle grid is subdivided until
    /// it has at least `grid_growth` times the previous stage's gap count.
    /// More sweeps per stage mean faster entropy growth.
    pub grid_growth: u32,
    /// Hard cap on grid gaps per stage.
    pub grid_cap: usize,
    /// Projection basis depth beyond the stage budget.
    pub basis_extra: u32,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            grid_growth: 6,
            grid_cap: 4096,
            basis_extra: 2,
        }
    }
}

/// One stage of the induction.
#[derive(Clone)]
pub struct StageState {
    pub index: u32,
    /// Cover members (the refining family plus the two bridge continua).
    pub members: Vec<Subcontinuum>,
    /// Parent member index (previous stage) of each member; bridges have none.
    pub member_parent: Vec<Option<usize>>,
    /// Union of the members.
    pub union: Subcontinuum,
    /// Interior-disjoint tiling of the union (entropy partitions).
    pub tiles: Vec<Subcontinuum>,
    /// Shrinking end continuum around the zero fixed point.
    pub cap_zero: Subcontinuum,
    /// Shrinking end continuum around the one fixed point.
    pub cap_one: Subcontinuum,
    /// Anchor parameters: the stage map covers the union over `[lo, hi]`.
    pub lo: Q,
    pub hi: Q,
    /// The stage map `[0,1] -> X`.
    pub map: PlMap,
    /// Periodic seed values (sorted, strictly inside `(lo, hi)`).
    pub seeds: Vec<Q>,
    /// The parameter grid used to build the map (stage >= 1).
    pub grid: Vec<Q>,
    /// Per-gap sweep targets (parallel to the gaps of `grid`).
    pub gap_targets: Vec<Subcontinuum>,
    /// Bridge continua attached this stage.
    pub bridge_zero: Option<Subcontinuum>,
    pub bridge_one: Option<Subcontinuum>,
    /// Constant values of the map on `[0, lo]` and `[hi, 1]`.
    pub anchor_zero: PointRef,
    pub anchor_one: PointRef,
}

impl StageState {
    pub fn mesh(&self, g: &MetricGraph) -> Q {
        self.members
            .iter()
            .fold(Q::zero(), |acc, m| q_max(acc, m.diameter(g)))
    }
}

/// The staged builder: space (already rescaled), projection, and stages.
pub struct MixingBuilder {
    pub space: Arc<MetricGraph>,
    /// Edge-length factor applied to the input space.
    pub scale: Q,
    pub f: PlMap,
    pub projection: ProjectionBuild,
    pub x1: PointRef,
    pub x2: PointRef,
    pub merged: bool,
    pub options: BuildOptions,
    pub stages: Vec<StageState>,
}

impl MixingBuilder {
    /// Prepares the builder on a rescaled copy of the space so that the two
    /// distinguished points are at distance 2, and builds the projection.
    pub fn start(
        space: &Arc<MetricGraph>,
        x1: &PointRef,
        x2: &PointRef,
        merged: bool,
        stage_budget: u32,
        options: BuildOptions,
    ) -> Result<MixingBuilder, BuildError> {
        let two = if space.same_point(x1, x2) {
            if !merged {
                return Err(ProjectionError::DegenerateSpec.into());
            }
            space.farthest_point(x1)
        } else {
            x2.clone()
        };
        let d = space.distance(x1, &two);
        let factor = Q::from_integer(2.into()) / d;
        let scaled = Arc::new(space.scaled(&factor));
        let spec = ProjectionSpec::new(
            scaled.clone(),
            x1.clone(),
            two,
            merged,
            stage_budget + options.basis_extra,
        )?;
        let projection = build_projection(&spec)?;
        Ok(MixingBuilder {
            space: scaled,
            scale: factor,
            f: projection.map.clone(),
            x1: spec.zero_point.clone(),
            x2: spec.one_point.clone(),
            merged,
            options,
            projection,
            stages: Vec::new(),
        })
    }

    fn f_range(&self, s: &Subcontinuum) -> (Q, Q) {
        self.f
            .image_of(s)
            .as_interval_range()
            .expect("nonempty set has nonempty image")
    }

    fn eval_g(&self, stage: &StageState, t: &Q) -> PointRef {
        stage.map.evaluate(&PointRef::new(EdgeId(0), t.clone()))
    }

    /// Splits a connected piece around a point inside a carrier continuum:
    /// runs the non-cut decomposition in the carrier's intrinsic graph.
    fn decompose_in(
        &self,
        carrier: &Subcontinuum,
        x: &PointRef,
        eps: &Q,
    ) -> Result<(Subcontinuum, Subcontinuum), StageError> {
        let derived = DerivedGraph::build(&self.space, carrier).map_err(|_| StageError::Infeasible {
            property: "end-continuum",
            detail: String::from("carrier is not a nondegenerate continuum"),
        })?;
        let x_d = derived
            .from_parent(&self.space, x)
            .ok_or(StageError::Infeasible {
                property: "end-continuum",
                detail: String::from("point left its carrier"),
            })?;
        let (a_d, b_d) = noncut_decomposition(&derived.graph, &x_d, eps).map_err(|_| {
            StageError::Infeasible {
                property: "end-continuum",
                detail: String::from("point cuts its carrier"),
            }
        })?;
        Ok((
            derived.sub_to_parent(&self.space, &a_d),
            derived.sub_to_parent(&self.space, &b_d),
        ))
    }

    /// Stage 0: two nested end decompositions and a first sweep.
    pub fn init_stage(&mut self) -> Result<(), BuildError> {
        let g = &self.space;
        let zero = PointRef::new(EdgeId(0), Q::zero());
        let one = PointRef::new(EdgeId(0), Q::one());
        if !self.f.preimage_of(&zero).is_single_point(g, &self.x1)
            || !self.f.preimage_of(&one).is_single_point(g, &self.x2)
        {
            return Err(StageError::ProjectionInvalid.into());
        }

        let eighth = pow2(-3);
        let budget = 40;
        let mut chosen: Option<(Subcontinuum, Subcontinuum, Subcontinuum, Subcontinuum)> = None;
        for k in 4..budget {
            let eps = pow2(-k);
            let ball0 = closed_ball(g, &self.x1, &eps);
            let ball1 = closed_ball(g, &self.x2, &eps);
            let (_, hi0) = self.f_range(&ball0);
            let (lo1, _) = self.f_range(&ball1);
            if hi0 > eighth || lo1 < Q::one() - &eighth {
                continue;
            }
            let whole = Subcontinuum::whole(g);
            let (cap0, b_side) = match self.decompose_in(&whole, &self.x1, &eps) {
                Ok(v) => v,
                Err(_) => continue,
            };
            if !b_side.contains_point(g, &self.x2) {
                continue;
            }
            let (cap1, core) = match self.decompose_in(&b_side, &self.x2, &eps) {
                Ok(v) => v,
                Err(_) => continue,
            };
            // diameters must satisfy the stage-0 bound already
            if cap0.diameter(g) >= pow2(-2) || cap1.diameter(g) >= pow2(-2) {
                continue;
            }
            if core.contains_point(g, &self.x1) || core.contains_point(g, &self.x2) {
                continue;
            }
            chosen = Some((cap0, b_side, cap1, core));
            break;
        }
        let (cap_zero, _b_side, cap_one, core) = chosen.ok_or(StageError::Infeasible {
            property: "initial-decomposition",
            detail: String::from("no dyadic radius satisfied the constraints"),
        })?;

        let quarter = pow2(-2);
        let three_quarters = Q::one() - &quarter;
        let a_meet = cap_zero.intersect(g, &core);
        let b_meet = cap_one.intersect(g, &core);
        let anchor_zero = a_meet.canonical_point(g).ok_or(StageError::Infeasible {
            property: "initial-anchors",
            detail: String::from("zero cap misses the core"),
        })?;
        let anchor_one = b_meet.canonical_point(g).ok_or(StageError::Infeasible {
            property: "initial-anchors",
            detail: String::from("one cap misses the core"),
        })?;

        let sched = schedule_onto(
            g,
            &core,
            &[
                (quarter.clone(), anchor_zero.clone()),
                (three_quarters.clone(), anchor_one.clone()),
            ],
        )?;
        let mut breaks = vec![Q::zero()];
        let mut anchors = vec![anchor_zero.clone()];
        let mut paths = vec![crate::path::Path::empty()];
        breaks.extend(sched.breaks);
        anchors.extend(sched.anchors);
        paths.extend(sched.paths);
        breaks.push(Q::one());
        anchors.push(anchor_one.clone());
        paths.push(crate::path::Path::empty());
        let map = PlMap::new(
            Arc::new(crate::graph::interval_graph()),
            g.clone(),
            vec![EdgeMap {
                breaks,
                anchors,
                paths,
            }],
        )?;

        let tiles = vec![core.clone()];
        self.stages.push(StageState {
            index: 0,
            members: vec![core.clone()],
            member_parent: vec![None],
            union: core,
            tiles,
            cap_zero,
            cap_one,
            lo: quarter,
            hi: three_quarters,
            map,
            seeds: Vec::new(),
            grid: Vec::new(),
            gap_targets: Vec::new(),
            bridge_zero: None,
            bridge_one: None,
            anchor_zero,
            anchor_one,
        });
        Ok(())
    }

    /// Advances the induction by one stage.
    pub fn advance_stage(&mut self) -> Result<(), BuildError> {
        let g = self.space.clone();
        let n = self.stages.last().expect("init first").index;
        let prev = self.stages.last().unwrap().clone();

        // New anchor interval = image of the current union.
        let (new_lo, new_hi) = self.f_range(&prev.union);
        let halving_lo = &prev.lo / Q::from_integer(2.into());
        let halving_hi = (Q::one() + &prev.hi) / Q::from_integer(2.into());
        if !(new_lo <= halving_lo && new_hi >= halving_hi) {
            return Err(StageError::Infeasible {
                property: "anchor-interval-halving",
                detail: {
                    let mut s = String::from("image of union: [");
                    s.push_str(&format_ratio(&new_lo));
                    s.push(',');
                    s.push_str(&format_ratio(&new_hi));
                    s.push(']');
                    s
                },
            }
            .into());
        }

        // Shrink the end caps: dyadic radius search with direct checks.
        let cap_target = pow2(-(n as i32) - 3); // next stage's cap diameter bound
        let mut picked: Option<(Subcontinuum, Subcontinuum, Subcontinuum, Subcontinuum)> = None;
        for k in (n + 4)..(n + 44) {
            let eps = pow2(-(k as i32));
            let ball0 = closed_ball(&g, &self.x1, &eps);
            let ball1 = closed_ball(&g, &self.x2, &eps);
            if ball0.intersects(&g, &prev.union) || !prev.cap_zero.includes(&g, &ball0) {
                continue;
            }
            if ball1.intersects(&g, &prev.union) || !prev.cap_one.includes(&g, &ball1) {
                continue;
            }
            let (_, hi0) = self.f_range(&ball0);
            let (lo1, _) = self.f_range(&ball1);
            if hi0 > &new_lo / Q::from_integer(2.into()) {
                continue;
            }
            if lo1 < (Q::one() + &new_hi) / Q::from_integer(2.into()) {
                continue;
            }
            let (cap0, b0) = match self.decompose_in(&prev.cap_zero, &self.x1, &eps) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let (cap1, b1) = match self.decompose_in(&prev.cap_one, &self.x2, &eps) {
                Ok(v) => v,
                Err(_) => continue,
            };
            if cap0.diameter(&g) >= cap_target || cap1.diameter(&g) >= cap_target {
                continue;
            }
            picked = Some((cap0, b0, cap1, b1));
            break;
        }
        let (cap_zero, b_zero, cap_one, b_one) = picked.ok_or(StageError::Infeasible {
            property: "cap-shrinking",
            detail: String::from("no dyadic radius satisfied the constraints"),
        })?;

        // Bridges: small continua connecting the shed cap parts to the union.
        let bridge_bound = pow2(-(n as i32) - 2);
        let make_bridge = |at: &Q, shed: &Subcontinuum| -> Result<Subcontinuum, BuildError> {
            let joint = self.eval_g(&prev, at);
            if !shed.contains_point(&g, &joint) {
                return Err(StageError::Infeasible {
                    property: "bridge-joint",
                    detail: String::from("stage map anchor escaped the shed piece"),
                }
                .into());
            }
            let room = &bridge_bound - shed.diameter(&g);
            if !room.is_positive() {
                return Err(StageError::Infeasible {
                    property: "bridge-size",
                    detail: String::from("shed piece too large for the bridge bound"),
                }
                .into());
            }
            let pieces = fine_cover_of(&g, &prev.union, &room);
            let patch = member_containing(&g, &pieces, &joint).ok_or(StageError::Infeasible {
                property: "bridge-patch",
                detail: String::from("no cover piece contains the joint"),
            })?;
            let bridge = shed.union(&g, patch);
            if bridge.diameter(&g) >= bridge_bound {
                return Err(StageError::Infeasible {
                    property: "bridge-size",
                    detail: String::from("bridge exceeded its diameter bound"),
                }
                .into());
            }
            Ok(bridge)
        };
        let bridge_zero = make_bridge(&prev.lo, &b_zero)?;
        let bridge_one = make_bridge(&prev.hi, &b_one)?;

        // Refine every member; collect the new family.
        let mesh_bound = pow2(-(n as i32) - 2);
        let mut members: Vec<Subcontinuum> = Vec::new();
        let mut member_parent: Vec<Option<usize>> = Vec::new();
        for (pi, f_member) in prev.members.iter().enumerate() {
            for piece in fine_cover_of(&g, f_member, &mesh_bound) {
                members.push(piece);
                member_parent.push(Some(pi));
            }
        }
        members.push(bridge_zero.clone());
        member_parent.push(None);
        members.push(bridge_one.clone());
        member_parent.push(None);
        let mut union = prev.union.clone();
        union = union.union(&g, &bridge_zero).union(&g, &bridge_one);
        let tiles = fine_cover_of(&g, &union, &mesh_bound);

        // The parameter grid.
        let fresh_members: Vec<&Subcontinuum> = members
            .iter()
            .zip(&member_parent)
            .filter(|(_, par)| par.is_some())
            .map(|(m, _)| m)
            .collect();
        let grid = self.build_grid(
            &prev,
            &new_lo,
            &new_hi,
            &fresh_members,
            &bridge_zero,
            &bridge_one,
        )?;

        // Sweep targets per gap.
        let (gap_targets, gap_members) =
            self.choose_gap_targets(&prev, &grid, &bridge_zero, &bridge_one)?;

        // Per-member distinguished values and preimage chains.
        let mut excluded: Vec<Q> = prev.seeds.clone();
        excluded.extend(grid.iter().cloned());
        let mut picks: Vec<(Q, PointRef, usize)> = Vec::new(); // (value, point, gap index)
        for member in prev.members.iter() {
            let (lo_img, hi_img) = self.f_range(member);
            let u = smallest_denominator_in(&lo_img, &hi_img, &excluded).ok_or(
                StageError::Infeasible {
                    property: "seed-choice",
                    detail: String::from("no admissible rational in the image interval"),
                },
            )?;
            excluded.push(u.clone());
            let pre = self.f.preimage_of(&PointRef::new(EdgeId(0), u.clone()));
            let x_f = pre
                .isolated
                .iter()
                .find(|p| member.contains_point(&g, p))
                .cloned()
                .ok_or(StageError::Infeasible {
                    property: "seed-point",
                    detail: String::from("no preimage point inside the member"),
                })?;
            let gap = gap_index(&grid, &u).ok_or(StageError::Infeasible {
                property: "seed-gap",
                detail: String::from("distinguished value escaped the grid"),
            })?;
            picks.push((u, x_f, gap));
        }

        // Backward preimage chains: 2n+1 new seed values per member.
        let bad: Vec<Q> = picks.iter().map(|(u, _, _)| u.clone()).collect();
        let mut chain_constraints: Vec<(Q, PointRef)> = Vec::new();
        let mut new_seeds: Vec<Q> = Vec::new();
        for (u, x_f, gap) in &picks {
            let start_member = gap_members[*gap];
            let chain = self.backward_chain(&prev, start_member, x_f, &bad)?;
            // links carry (s_j, g_prev(s_j)) for j = 0..2n-1; the member's
            // distinguished value is routed to the chain start.
            for (s, z) in &chain.links {
                chain_constraints.push((s.clone(), z.clone()));
                new_seeds.push(s.clone());
            }
            new_seeds.push(u.clone());
            chain_constraints.push((u.clone(), chain.start_point.clone()));
        }

        // Seed set and map constraints.
        let mut seeds: Vec<Q> = prev.seeds.clone();
        seeds.extend(new_seeds);
        seeds.sort();
        seeds.dedup();

        let anchor_zero = cap_zero
            .intersect(&g, &b_zero)
            .canonical_point(&g)
            .ok_or(StageError::Infeasible {
                property: "anchor-choice",
                detail: String::from("zero cap misses its shed piece"),
            })?;
        let anchor_one = cap_one
            .intersect(&g, &b_one)
            .canonical_point(&g)
            .ok_or(StageError::Infeasible {
                property: "anchor-choice",
                detail: String::from("one cap misses its shed piece"),
            })?;

        let mut constraints: Vec<(Q, PointRef)> = Vec::new();
        constraints.push((grid[0].clone(), anchor_zero.clone()));
        for t in &grid[1..grid.len() - 1] {
            constraints.push((t.clone(), self.eval_g(&prev, t)));
        }
        constraints.push((grid[grid.len() - 1].clone(), anchor_one.clone()));
        for s in &prev.seeds {
            constraints.push((s.clone(), self.eval_g(&prev, s)));
        }
        constraints.extend(chain_constraints);
        constraints.sort_by(|a, b| a.0.cmp(&b.0));
        // Merge duplicates; conflicting values are a construction failure.
        let mut merged: Vec<(Q, PointRef)> = Vec::new();
        for (t, v) in constraints {
            match merged.last() {
                Some((lt, lv)) if *lt == t => {
                    if !g.same_point(lv, &v) {
                        return Err(StageError::Infeasible {
                            property: "constraint-conflict",
                            detail: {
                                let mut s = String::from("two values at parameter ");
                                s.push_str(&format_ratio(&t));
                                s
                            },
                        }
                        .into());
                    }
                }
                _ => merged.push((t, v)),
            }
        }

        // Assemble the new map gap by gap, after the constant left tail.
        let mut breaks = vec![Q::zero(), grid[0].clone()];
        let mut anchors = vec![anchor_zero.clone(), anchor_zero.clone()];
        let mut paths = vec![crate::path::Path::empty()];
        for (i, w) in grid.windows(2).enumerate() {
            let target = &gap_targets[i];
            let mut local: Vec<(Q, PointRef)> = merged
                .iter()
                .filter(|(t, _)| *t >= w[0] && *t <= w[1])
                .cloned()
                .collect();
            if local.first().map(|(t, _)| t != &w[0]).unwrap_or(true)
                || local.last().map(|(t, _)| t != &w[1]).unwrap_or(true)
            {
                return Err(StageError::Infeasible {
                    property: "gap-endpoints",
                    detail: String::from("grid endpoints lost their constraints"),
                }
                .into());
            }
            for (t, v) in &local {
                if !target.contains_point(&g, v) {
                    return Err(StageError::Infeasible {
                        property: "constraint-outside-target",
                        detail: {
                            let mut s = String::from("value at ");
                            s.push_str(&format_ratio(t));
                            s.push_str(" misses its sweep target");
                            s
                        },
                    }
                    .into());
                }
            }
            let sched = schedule_onto(&g, target, &local)?;
            breaks.extend(sched.breaks.into_iter().skip(1));
            anchors.extend(sched.anchors.into_iter().skip(1));
            paths.extend(sched.paths);
        }
        breaks.push(Q::one());
        anchors.push(anchor_one.clone());
        paths.push(crate::path::Path::empty());
        let map = PlMap::new(
            Arc::new(crate::graph::interval_graph()),
            g.clone(),
            vec![EdgeMap {
                breaks,
                anchors,
                paths,
            }],
        )?;

        self.stages.push(StageState {
            index: prev.index + 1,
            members,
            member_parent,
            union,
            tiles,
            cap_zero,
            cap_one,
            lo: new_lo,
            hi: new_hi,
            map,
            seeds,
            grid,
            gap_targets,
            bridge_zero: Some(bridge_zero),
            bridge_one: Some(bridge_one),
            anchor_zero,
            anchor_one,
        });
        Ok(())
    }

    /// The stage-(n+1) parameter grid: mandated values plus diameter- and
    /// growth-driven refinement of the middle part.
    fn build_grid(
        &self,
        prev: &StageState,
        new_lo: &Q,
        new_hi: &Q,
        fresh_members: &[&Subcontinuum],
        bridge_zero: &Subcontinuum,
        bridge_one: &Subcontinuum,
    ) -> Result<Vec<Q>, BuildError> {
        let mut pts: Vec<Q> = vec![
            new_lo.clone(),
            prev.lo.clone(),
            prev.hi.clone(),
            new_hi.clone(),
        ];
        for st in &self.stages {
            pts.push(st.lo.clone());
            pts.push(st.hi.clone());
            for m in &st.members {
                let (a, b) = self.f_range(m);
                pts.push(a);
                pts.push(b);
            }
        }
        // Image endpoints of the incoming refinement members.
        for m in fresh_members {
            let (a, b) = self.f_range(m);
            pts.push(a);
            pts.push(b);
        }
        // Inner image endpoints of the two new bridges.
        let (_, s_zero) = self.f_range(bridge_zero);
        let (s_one, _) = self.f_range(bridge_one);
        pts.push(s_zero);
        pts.push(s_one);
        pts.retain(|p| p >= new_lo && p <= new_hi);
        pts.sort();
        pts.dedup();

        // Diameter refinement of gaps strictly inside [prev.lo, prev.hi].
        let diam_bound = pow2(-(prev.index as i32) - 1);
        let mut queue: Vec<(Q, Q)> = pts
            .windows(2)
            .filter(|w| w[0] >= prev.lo && w[1] <= prev.hi)
            .map(|w| (w[0].clone(), w[1].clone()))
            .collect();
        let mut refined: Vec<Q> = pts.clone();
        while let Some((a, b)) = queue.pop() {
            let img = prev.map.image_of_interval(&a, &b);
            if img.diameter(&self.space) < diam_bound {
                continue;
            }
            let mid = (&a + &b) / Q::from_integer(2.into());
            refined.push(mid.clone());
            queue.push((a, mid.clone()));
            queue.push((mid, b));
            if refined.len() > self.options.grid_cap * 4 {
                return Err(StageError::Infeasible {
                    property: "grid-refinement",
                    detail: String::from("diameter refinement exploded"),
                }
                .into());
            }
        }
        refined.sort();
        refined.dedup();

        // Growth refinement: bisect the widest middle gaps until the middle
        // gap count reaches the growth target.
        let prev_gaps = if prev.grid.len() >= 2 {
            prev.grid.len() - 1
        } else {
            1
        };
        let target = (self.options.grid_growth as usize)
            .saturating_mul(prev_gaps)
            .min(self.options.grid_cap);
        loop {
            let middle: Vec<(usize, Q)> = refined
                .windows(2)
                .enumerate()
                .filter(|(_, w)| w[0] >= prev.lo && w[1] <= prev.hi)
                .map(|(i, w)| (i, &w[1] - &w[0]))
                .collect();
            if middle.len() >= target {
                break;
            }
            let (wide_i, _) = middle
                .iter()
                .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                .expect("middle nonempty")
                .clone();
            let mid = (&refined[wide_i] + &refined[wide_i + 1]) / Q::from_integer(2.into());
            refined.insert(wide_i + 1, mid);
        }
        Ok(refined)
    }

    /// For each grid gap, the sweep target and the index (into the previous
    /// stage's members) of the member it contains.
    fn choose_gap_targets(
        &self,
        prev: &StageState,
        grid: &[Q],
        bridge_zero: &Subcontinuum,
        bridge_one: &Subcontinuum,
    ) -> Result<(Vec<Subcontinuum>, Vec<usize>), BuildError> {
        let g = &self.space;
        let qa = self.eval_g(prev, &prev.lo);
        let qb = self.eval_g(prev, &prev.hi);
        let star_zero = prev
            .members
            .iter()
            .position(|m| m.contains_point(g, &qa))
            .ok_or(StageError::Infeasible {
                property: "gap-target",
                detail: String::from("left anchor image outside the union"),
            })?;
        let star_one = prev
            .members
            .iter()
            .position(|m| m.contains_point(g, &qb))
            .ok_or(StageError::Infeasible {
                property: "gap-target",
                detail: String::from("right anchor image outside the union"),
            })?;
        let low_target = prev.members[star_zero].union(g, bridge_zero);
        let high_target = prev.members[star_one].union(g, bridge_one);

        let mut targets = Vec::new();
        let mut member_of = Vec::new();
        for w in grid.windows(2) {
            let (t0, t1) = (&w[0], &w[1]);
            if t1 <= &prev.lo {
                targets.push(low_target.clone());
                member_of.push(star_zero);
                continue;
            }
            if t0 >= &prev.hi {
                targets.push(high_target.clone());
                member_of.push(star_one);
                continue;
            }
            // Middle gap: smallest stage whose anchor interval contains it.
            let mut level: Option<usize> = None;
            for st in self.stages.iter() {
                if &st.lo <= t0 && t1 <= &st.hi {
                    level = Some(st.index as usize);
                    break;
                }
            }
            let level = level.ok_or(StageError::Infeasible {
                property: "gap-level",
                detail: String::from("middle gap outside every anchor interval"),
            })?;
            let level_union = &self.stages[level].union;
            let img = prev.map.image_of_interval(t0, t1);
            let pick = prev
                .members
                .iter()
                .position(|m| level_union.includes(g, m) && m.intersects(g, &img))
                .ok_or(StageError::Infeasible {
                    property: "gap-member",
                    detail: String::from("no member inside the gap's level meets its image"),
                })?;
            targets.push(prev.members[pick].union(g, &img));
            member_of.push(pick);
        }
        Ok((targets, member_of))
    }

    /// Builds the backward preimage chain of length `2n` ending at `x_f`,
    /// starting inside the member with the given index: a point `x'` with
    /// `(g∘f)^{2n}(x') = x_f` whose forward orbit walks down the refinement
    /// levels and back up through the historical anchor intervals.
    fn backward_chain(
        &self,
        prev: &StageState,
        start_member: usize,
        x_f: &PointRef,
        bad: &[Q],
    ) -> Result<Chain, BuildError> {
        let g = &self.space;
        let n = prev.index as usize;
        // Descent member chain: descent[l] indexes a member of stage l, with
        // one map application sending the level-l member over the level-(l-1)
        // one. descent[n] is the given start member of the current stage.
        let mut descent: Vec<usize> = vec![0; n + 1];
        descent[n] = start_member;
        for level in (1..=n).rev() {
            let member = &self.stages[level].members[descent[level]];
            let (a, b) = self.f_range(member);
            let img = prev.map.image_of_interval(&a, &b);
            let lower = &self.stages[level - 1];
            let pick = lower
                .members
                .iter()
                .position(|m| img.includes(g, m))
                .ok_or(StageError::Infeasible {
                    property: "magnification",
                    detail: String::from("descent found no covered member"),
                })?;
            descent[level - 1] = pick;
        }

        // Backward points: z[2n] = x_f; the ascent indices come first going
        // backward (j = 2n-1 .. n, z_j in the stage-(j-n) union), then the
        // descent part (j = n-1 .. 0, z_j in descent member n-j).
        let two_n = 2 * n;
        let mut z_next = x_f.clone();
        let mut links_rev: Vec<(Q, PointRef)> = Vec::new(); // (s_j, z_{j+1})
        for j in (0..two_n).rev() {
            let (range_lo, range_hi, container) = if j >= n {
                let m = j - n;
                (
                    self.stages[m + 1].lo.clone(),
                    self.stages[m + 1].hi.clone(),
                    self.stages[m].union.clone(),
                )
            } else {
                let d = &self.stages[n - j].members[descent[n - j]];
                let (a, b) = self.f_range(d);
                (a, b, d.clone())
            };
            let s = self.pick_param_preimage(prev, &z_next, &range_lo, &range_hi, bad)?;
            let z = self.pick_point_preimage(&s, &container)?;
            links_rev.push((s, z_next.clone()));
            z_next = z;
        }
        links_rev.reverse();
        Ok(Chain {
            start_point: z_next,
            links: links_rev,
        })
    }

    /// A parameter `s` in `[lo, hi]` with `g_prev(s) = z`, avoiding `bad`.
    fn pick_param_preimage(
        &self,
        prev: &StageState,
        z: &PointRef,
        lo: &Q,
        hi: &Q,
        bad: &[Q],
    ) -> Result<Q, BuildError> {
        let pre = prev.map.preimage_of(z);
        for p in &pre.isolated {
            if &p.t >= lo && &p.t <= hi && !bad.contains(&p.t) {
                return Ok(p.t.clone());
            }
        }
        for (_, seg) in pre.flats.segments() {
            let a = q_max(seg.lo.clone(), lo.clone());
            let b = q_min(seg.hi.clone(), hi.clone());
            if a < b {
                if let Some(s) = smallest_denominator_in(&a, &b, bad) {
                    return Ok(s);
                }
            } else if a == b && &a >= lo && &a <= hi && !bad.contains(&a) {
                return Ok(a);
            }
        }
        Err(StageError::Infeasible {
            property: "chain-parameter",
            detail: String::from("no admissible parameter preimage in range"),
        }
        .into())
    }

    /// A point of `container` mapped by `f` to the value `s`.
    fn pick_point_preimage(
        &self,
        s: &Q,
        container: &Subcontinuum,
    ) -> Result<PointRef, BuildError> {
        let pre = self.f.preimage_of(&PointRef::new(EdgeId(0), s.clone()));
        pre.isolated
            .iter()
            .find(|p| container.contains_point(&self.space, p))
            .cloned()
            .ok_or_else(|| {
                StageError::Infeasible {
                    property: "chain-point",
                    detail: String::from("no point preimage inside its continuum"),
                }
                .into()
            })
    }

    /// Checks the thirteen stage properties for stage `idx`, each exactly.
    pub fn check_stage(&self, idx: usize) -> Certificate {
        let g = &self.space;
        let st = &self.stages[idx];
        let prev = if idx > 0 { Some(&self.stages[idx - 1]) } else { None };
        let mut cert = Certificate::new("stage-properties");
        cert.resolution = Some(pow2(-(st.index as i32)));
        let mut put = |cert: &mut Certificate, id: &str, ok: Option<bool>, detail: String| {
            match ok {
                Some(true) => cert.push(id, Verdict::Pass, detail),
                Some(false) => cert.push(id, Verdict::Fail, detail),
                None => cert.push(id, Verdict::Inconclusive, String::from("not applicable")),
            }
        };

        // (1) map Cauchy bound, stages >= 2
        if st.index >= 2 {
            let prev = prev.unwrap();
            let d = st.map.sup_distance(&prev.map).expect("same shapes");
            let bound = pow2(-(st.index as i32) + 1);
            put(
                &mut cert,
                "p1-map-cauchy",
                Some(d <= bound),
                {
                    let mut s = String::from("sup distance ");
                    s.push_str(&format_ratio(&d));
                    s.push_str(" vs bound ");
                    s.push_str(&format_ratio(&bound));
                    s
                },
            );
        } else {
            put(&mut cert, "p1-map-cauchy", None, String::new());
        }

        // (2) mesh and cap diameters
        {
            let caps = q_max(st.cap_zero.diameter(g), st.cap_one.diameter(g));
            let cap_bound = pow2(-(st.index as i32) - 2);
            let mut ok = caps < cap_bound;
            let mut detail = {
                let mut s = String::from("caps ");
                s.push_str(&format_ratio(&caps));
                s
            };
            if st.index > 0 {
                let mesh = st.mesh(g);
                let mesh_bound = pow2(-(st.index as i32) - 1);
                ok = ok && mesh <= mesh_bound;
                detail.push_str(", mesh ");
                detail.push_str(&format_ratio(&mesh));
            }
            put(&mut cert, "p2-mesh-and-caps", Some(ok), detail);
        }

        // (3) fixed points sit in caps, outside the union
        {
            let ok = st.cap_zero.contains_point(g, &self.x1)
                && !st.union.contains_point(g, &self.x1)
                && st.cap_one.contains_point(g, &self.x2)
                && !st.union.contains_point(g, &self.x2);
            put(&mut cert, "p3-fixed-points-in-caps", Some(ok), String::new());
        }

        // (4) refinement: children tile each previous member
        if let Some(prev) = prev {
            let mut ok = true;
            for (pi, parent) in prev.members.iter().enumerate() {
                let mut u = Subcontinuum::empty();
                for (m, par) in st.members.iter().zip(&st.member_parent) {
                    if *par == Some(pi) {
                        u = u.union(g, m);
                    }
                }
                if &u != parent {
                    ok = false;
                    break;
                }
            }
            put(&mut cert, "p4-cover-refines", Some(ok), String::new());
        } else {
            put(&mut cert, "p4-cover-refines", None, String::new());
        }

        // (5) anchor halving
        if let Some(prev) = prev {
            let ok = st.lo <= &prev.lo / Q::from_integer(2.into())
                && st.hi >= (Q::one() + &prev.hi) / Q::from_integer(2.into());
            put(&mut cert, "p5-anchor-halving", Some(ok), String::new());
        } else {
            put(&mut cert, "p5-anchor-halving", None, String::new());
        }

        // (6) anchor interval equals the image of the previous union
        if let Some(prev) = prev {
            let (a, b) = self.f_range(&prev.union);
            let ok = a == st.lo && b == st.hi;
            put(
                &mut cert,
                "p6-anchor-interval-is-image",
                Some(ok),
                {
                    let mut s = String::from("image [");
                    s.push_str(&format_ratio(&a));
                    s.push(',');
                    s.push_str(&format_ratio(&b));
                    s.push(']');
                    s
                },
            );
        } else {
            put(&mut cert, "p6-anchor-interval-is-image", None, String::new());
        }

        // (7) tails stay in the caps
        {
            let left = st.map.image_of_interval(&Q::zero(), &st.lo);
            let right = st.map.image_of_interval(&st.hi, &Q::one());
            let ok = st.cap_zero.includes(g, &left) && st.cap_one.includes(g, &right);
            put(&mut cert, "p7-tails-in-caps", Some(ok), String::new());
        }

        // (8) anchor intervals map onto the historical unions
        {
            let mut ok = true;
            for i in 0..=idx {
                let lower = &self.stages[i];
                let img = st.map.image_of_interval(&lower.lo, &lower.hi);
                if img != lower.union {
                    ok = false;
                    break;
                }
            }
            put(&mut cert, "p8-anchor-intervals-cover", Some(ok), String::new());
        }

        // (9) the seed set is permuted by f∘g
        {
            let mut images: Vec<Q> = st
                .seeds
                .iter()
                .map(|s| self.f.evaluate(&self.eval_g(st, s)).t)
                .collect();
            images.sort();
            let mut sorted = st.seeds.clone();
            sorted.sort();
            put(
                &mut cert,
                "p9-seeds-permuted",
                Some(images == sorted),
                {
                    let mut s = String::from("seeds: ");
                    s.push_str(&st.seeds.len().to_string());
                    s
                },
            );
        }

        // (10) earlier seeds keep their values
        if let Some(prev) = prev {
            let mut ok = prev.seeds.iter().all(|s| st.seeds.contains(s));
            if ok {
                ok = prev.seeds.iter().all(|s| {
                    g.same_point(&self.eval_g(st, s), &self.eval_g(prev, s))
                });
            }
            put(&mut cert, "p10-seeds-preserved", Some(ok), String::new());
        } else {
            put(&mut cert, "p10-seeds-preserved", None, String::new());
        }

        // (11) every previous member's image interval holds a seed
        if let Some(prev) = prev {
            let ok = prev.members.iter().all(|m| {
                let (a, b) = self.f_range(m);
                st.seeds.iter().any(|s| *s >= a && *s <= b)
            });
            put(&mut cert, "p11-seeds-meet-members", Some(ok), String::new());
        } else {
            put(&mut cert, "p11-seeds-meet-members", None, String::new());
        }

        // (12) covering growth: (g∘f)^{2i}(F) ∩ (g∘f)^{2i+1}(F) ⊇ union_i
        {
            let mut ok = true;
            let mut witness = String::new();
            'outer: for i in 0..=idx {
                let level = &self.stages[i];
                for (fi, member) in level.members.iter().enumerate() {
                    let mut img = member.clone();
                    for _ in 0..(2 * i) {
                        img = self.apply_h(st, &img);
                    }
                    let next = self.apply_h(st, &img);
                    let meet = img.intersect(g, &next);
                    if !meet.includes(g, &level.union) {
                        ok = false;
                        witness = {
                            let mut s = String::from("stage ");
                            s.push_str(&i.to_string());
                            s.push_str(", member ");
                            s.push_str(&fi.to_string());
                            s
                        };
                        break 'outer;
                    }
                }
            }
            put(&mut cert, "p12-covering-growth", Some(ok), witness);
        }

        // (13) one map application magnifies members a level down
        {
            let mut ok = true;
            'outer13: for i in 1..=idx {
                let level = &self.stages[i];
                let lower = &self.stages[i - 1];
                for member in &level.members {
                    let (a, b) = self.f_range(member);
                    let img = st.map.image_of_interval(&a, &b);
                    if !lower.members.iter().any(|m| img.includes(g, m)) {
                        ok = false;
                        break 'outer13;
                    }
                }
            }
            put(&mut cert, "p13-magnification", Some(ok), String::new());
        }

        cert.finish();
        cert
    }

    fn apply_h(&self, st: &StageState, s: &Subcontinuum) -> Subcontinuum {
        st.map.image_of(&self.f.image_of(s))
    }

    /// Final assembly: closes the stage-N tails onto the fixed points so the
    /// singleton-fiber property holds exactly, and composes `h = g ∘ f`.
    pub fn assemble(&self) -> Result<AssembledMaps, BuildError> {
        let g = &self.space;
        let st = self.stages.last().expect("at least one stage");
        let em = st.map.edge_map(EdgeId(0));
        let mut breaks = em.breaks.clone();
        let mut anchors = em.anchors.clone();
        let mut paths = em.paths.clone();
        // Left tail [0, lo] onto x1.
        debug_assert!(breaks[1] == st.lo);
        anchors[0] = self.x1.clone();
        paths[0] = geodesic_path_within(g, &st.cap_zero, &self.x1, &st.anchor_zero).ok_or(
            StageError::Infeasible {
                property: "tail-closure",
                detail: String::from("no path from the zero fixed point to its anchor"),
            },
        )?;
        // Right tail [hi, 1] onto x2.
        let last = anchors.len() - 1;
        anchors[last] = self.x2.clone();
        let back = geodesic_path_within(g, &st.cap_one, &st.anchor_one, &self.x2).ok_or(
            StageError::Infeasible {
                property: "tail-closure",
                detail: String::from("no path from the one anchor to its fixed point"),
            },
        )?;
        paths[last - 1] = back;
        let closed = PlMap::new(
            st.map.domain().clone(),
            g.clone(),
            vec![EdgeMap {
                breaks,
                anchors,
                paths,
            }],
        )?;
        let h = compose(&closed, &self.f)?;
        if !h.preimage_of(&self.x1).is_single_point(g, &self.x1) {
            return Err(StageError::FiberViolation.into());
        }
        if !g.same_point(&h.evaluate(&self.x1), &self.x1) {
            return Err(StageError::FiberViolation.into());
        }
        Ok(AssembledMaps { g_map: closed, h })
    }

    /// Verified periodic points of the assembled map: the stage map's values
    /// at the seed parameters.
    pub fn seed_points(&self, maps: &AssembledMaps) -> Vec<PointRef> {
        let st = self.stages.last().expect("at least one stage");
        st.seeds
            .iter()
            .map(|s| maps.g_map.evaluate(&PointRef::new(EdgeId(0), s.clone())))
            .collect()
    }
}

pub struct AssembledMaps {
    /// The tail-closed stage map `[0,1] -> X`.
    pub g_map: PlMap,
    /// The composition `g ∘ f`.
    pub h: PlMap,
}

struct Chain {
    start_point: PointRef,
    links: Vec<(Q, PointRef)>,
}

/// Smallest-denominator rational strictly inside `(lo, hi)` avoiding the
/// excluded values; ties broken by smaller numerator.
pub fn smallest_denominator_in(lo: &Q, hi: &Q, excluded: &[Q]) -> Option<Q> {
    if lo >= hi {
        return None;
    }
    for den in 1u64..=1_000_000 {
        let d = Q::from_integer((den as i64).into());
        let mut num: num_bigint::BigInt = (lo * &d).floor().to_integer() + 1;
        loop {
            let cand = Q::new(num.clone(), (den as i64).into());
            if &cand >= hi {
                break;
            }
            if &cand > lo {
                // canonical: skip non-reduced representations
                if cand.denom() == &num_bigint::BigInt::from(den) && !excluded.contains(&cand) {
                    return Some(cand);
                }
            }
            num += 1;
        }
    }
    None
}

fn gap_index(grid: &[Q], t: &Q) -> Option<usize> {
    grid.windows(2)
        .position(|w| w[0] < *t && *t < w[1])
}

/// The delivered artifact: a pure mixing self-map with its construction data.
pub struct ConstructionResult {
    /// The space the map lives on: a uniformly rescaled copy of the input.
    pub space: Arc<MetricGraph>,
    /// Scale factor applied to all input edge lengths.
    pub scale: Q,
    /// The pure mixing self-map.
    pub h: PlMap,
    /// Fixed point with singleton fiber (the non-exactness witness).
    pub fixed_point: PointRef,
    /// Construction internals (on the lifted space when surgery happened).
    pub work_space: Arc<MetricGraph>,
    pub f: PlMap,
    pub g_map: PlMap,
    pub h_work: PlMap,
    pub x1: PointRef,
    pub x2: PointRef,
    pub merged: bool,
    /// Identification map from the lifted space, when surgery was needed.
    pub glue: Option<PlMap>,
    /// Per-stage property certificates.
    pub stage_certs: Vec<Certificate>,
    /// Declared resolution `2^-N`.
    pub resolution: Q,
    /// Verified periodic points on the delivered space.
    pub seed_points: Vec<PointRef>,
    /// Interior-disjoint tiles per stage (entropy partitions), on the work
    /// space.
    pub stage_tiles: Vec<Vec<Subcontinuum>>,
    /// Mesh of each stage's member family.
    pub stage_meshes: Vec<Q>,
    /// Final parameter grid (for interval-side partitions).
    pub final_grid: Vec<Q>,
    /// Base-point case of the input space.
    pub base_case: BaseCase,
}

/// Full pipeline: select a base point, run the staged construction (through
/// surgery and factoring when the base point is an order-2 local cut point),
/// and return the mixing map with all certificates.
pub fn build_pure_mixing(
    space: &Arc<MetricGraph>,
    stages: u32,
    options: &BuildOptions,
) -> Result<ConstructionResult, BuildError> {
    let (point, case) = select_base_point(space);
    build_pure_mixing_at(space, &point, case, stages, options)
}

/// The pipeline with an explicit base point (must match its case).
pub fn build_pure_mixing_at(
    space: &Arc<MetricGraph>,
    point: &PointRef,
    case: BaseCase,
    stages: u32,
    options: &BuildOptions,
) -> Result<ConstructionResult, BuildError> {
    assert!(stages >= 1);
    match case {
        BaseCase::NotLocalCut => {
            let mut builder =
                MixingBuilder::start(space, point, point, true, stages, options.clone())?;
            run_stages(&mut builder, stages)?;
            let maps = builder.assemble()?;
            let certs: Vec<Certificate> = (0..builder.stages.len())
                .map(|i| builder.check_stage(i))
                .collect();
            ensure_all_pass(&certs)?;
            let seed_points = builder.seed_points(&maps);
            Ok(ConstructionResult {
                space: builder.space.clone(),
                scale: builder.scale.clone(),
                h: maps.h.clone(),
                fixed_point: builder.x1.clone(),
                work_space: builder.space.clone(),
                f: builder.f.clone(),
                g_map: maps.g_map,
                h_work: maps.h,
                x1: builder.x1.clone(),
                x2: builder.x2.clone(),
                merged: true,
                glue: None,
                stage_certs: certs,
                resolution: pow2(-(stages as i32)),
                seed_points,
                stage_tiles: builder.stages.iter().map(|s| s.tiles.clone()).collect(),
                stage_meshes: builder
                    .stages
                    .iter()
                    .map(|s| s.mesh(&builder.space))
                    .collect(),
                final_grid: builder.stages.last().unwrap().grid.clone(),
                base_case: case,
            })
        }
        BaseCase::Order2LocalCut => {
            let surgery = cut_surgery(space, point)?;
            let mut builder = MixingBuilder::start(
                &surgery.lifted,
                &surgery.x1,
                &surgery.x2,
                false,
                stages,
                options.clone(),
            )?;
            let base_scaled = Arc::new(space.scaled(&builder.scale));
            // The identification map on the rescaled copies.
            let glue = rebuild_on(&surgery.glue, &builder.space, &base_scaled)?;
            run_stages(&mut builder, stages)?;
            let maps = builder.assemble()?;
            let certs: Vec<Certificate> = (0..builder.stages.len())
                .map(|i| builder.check_stage(i))
                .collect();
            ensure_all_pass(&certs)?;
            let h = push_through_factor(&glue, &maps.h, &base_scaled)?;
            // The factored fiber stays singleton at the cut point.
            let fixed = point.clone();
            if !h.preimage_of(&fixed).is_single_point(&base_scaled, &fixed) {
                return Err(StageError::FiberViolation.into());
            }
            let seed_points = builder
                .seed_points(&maps)
                .into_iter()
                .map(|p| glue.evaluate(&p))
                .collect();
            Ok(ConstructionResult {
                space: base_scaled,
                scale: builder.scale.clone(),
                h,
                fixed_point: fixed,
                work_space: builder.space.clone(),
                f: builder.f.clone(),
                g_map: maps.g_map,
                h_work: maps.h,
                x1: builder.x1.clone(),
                x2: builder.x2.clone(),
                merged: false,
                glue: Some(glue),
                stage_certs: certs,
                resolution: pow2(-(stages as i32)),
                seed_points,
                stage_tiles: builder.stages.iter().map(|s| s.tiles.clone()).collect(),
                stage_meshes: builder
                    .stages
                    .iter()
                    .map(|s| s.mesh(&builder.space))
                    .collect(),
                final_grid: builder.stages.last().unwrap().grid.clone(),
                base_case: case,
            })
        }
    }
}

fn run_stages(builder: &mut MixingBuilder, stages: u32) -> Result<(), BuildError> {
    builder.init_stage()?;
    for _ in 0..stages {
        builder.advance_stage()?;
    }
    Ok(())
}

fn ensure_all_pass(certs: &[Certificate]) -> Result<(), BuildError> {
    for (i, c) in certs.iter().enumerate() {
        if c.verdict == Verdict::Fail {
            let failed = c
                .items
                .iter()
                .find(|it| it.verdict == Verdict::Fail)
                .map(|it| it.id.clone())
                .unwrap_or_default();
            return Err(StageError::Infeasible {
                property: "stage-certificate",
                detail: {
                    let mut s = String::from("stage ");
                    s.push_str(&i.to_string());
                    s.push_str(" failed ");
                    s.push_str(&failed);
                    s
                },
            }
            .into());
        }
    }
    Ok(())
}

/// Rebuilds a map's graphs onto rescaled copies (parameters are unchanged by
/// scaling).
fn rebuild_on(
    map: &PlMap,
    domain: &Arc<MetricGraph>,
    codomain: &Arc<MetricGraph>,
) -> Result<PlMap, PlMapError> {
    PlMap::new(domain.clone(), codomain.clone(), map.edge_maps().to_vec())
}

/// Pushes the lifted self-map down through the identification map: the
/// returned map `h` on the base satisfies `h ∘ glue = glue ∘ lifted_map`.
fn push_through_factor(
    glue: &PlMap,
    lifted_map: &PlMap,
    base: &Arc<MetricGraph>,
) -> Result<PlMap, PlMapError> {
    let comp = compose(glue, lifted_map)?; // lifted -> base
    // Lifted edges tile the base edges (surgery splits one edge in two).
    let lifted = glue.domain();
    let mut per_base: Vec<Vec<(usize, Q, Q)>> = vec![Vec::new(); base.edge_count()];
    for e in lifted.edge_ids() {
        let em = glue.edge_map(e);
        let src_edge = em.anchors[0].edge;
        let lo = em.anchors[0].t.clone();
        let hi = em.anchors.last().unwrap().t.clone();
        per_base[src_edge.0 as usize].push((e.0 as usize, lo, hi));
    }
    let mut edges_out: Vec<EdgeMap> = Vec::new();
    for pieces in per_base.iter_mut() {
        pieces.sort_by(|a, b| a.1.cmp(&b.1));
        let mut breaks: Vec<Q> = Vec::new();
        let mut anchors: Vec<PointRef> = Vec::new();
        let mut paths: Vec<crate::path::Path> = Vec::new();
        for (li, lo, hi) in pieces.iter() {
            let em = comp.edge_map(EdgeId(*li as u32));
            let skip_first = !breaks.is_empty();
            for (k, b) in em.breaks.iter().enumerate() {
                if skip_first && k == 0 {
                    // shared seam: the earlier anchor denotes the same point
                    continue;
                }
                breaks.push(lo + (hi - lo) * b);
                anchors.push(em.anchors[k].clone());
            }
            paths.extend(em.paths.iter().cloned());
        }
        edges_out.push(EdgeMap {
            breaks,
            anchors,
            paths,
        });
    }
    PlMap::new(base.clone(), base.clone(), edges_out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::interval_graph;
    use crate::num::{qi, qr};

    #[test]
    fn interval_stage_zero_shape() {
        let g = Arc::new(interval_graph());
        let mut b = MixingBuilder::start(
            &g,
            &PointRef::new(EdgeId(0), qi(0).into()),
            &PointRef::new(EdgeId(0), qi(0).into()),
            true,
            2,
            BuildOptions::default(),
        )
        .unwrap();
        b.init_stage().unwrap();
        let st = &b.stages[0];
        assert_eq!(st.members.len(), 1);
        assert_eq!(st.lo, qr(1, 4));
        assert_eq!(st.hi, qr(3, 4));
        // The first sweep covers the core exactly.
        let img = st.map.image_of_interval(&qr(1, 4), &qr(3, 4));
        assert_eq!(img, st.union);
        let cert = b.check_stage(0);
        assert!(cert.verdict != crate::certify::Verdict::Fail, "{:?}", cert);
    }

    #[test]
    fn explicit_points_stage_zero() {
        // The non-merged variant with endpoints of the interval and the
        // identity-like projection.
        let g = Arc::new(interval_graph());
        let mut b = MixingBuilder::start(
            &g,
            &PointRef::new(EdgeId(0), qi(0).into()),
            &PointRef::new(EdgeId(0), qi(1).into()),
            false,
            2,
            BuildOptions::default(),
        )
        .unwrap();
        b.init_stage().unwrap();
        let cert = b.check_stage(0);
        assert!(cert.verdict != crate::certify::Verdict::Fail, "{:?}", cert);
    }

    #[test]
    fn smallest_denominator_search() {
        let v = smallest_denominator_in(&qr(1, 3), &qr(2, 3), &[]).unwrap();
        assert_eq!(v, qr(1, 2));
        let v = smallest_denominator_in(&qr(1, 3), &qr(2, 3), &[qr(1, 2)]).unwrap();
        assert_eq!(v, qr(2, 5));
        assert!(smallest_denominator_in(&qr(1, 2), &qr(1, 2), &[]).is_none());
    }
}
