//! Exact topological dynamics on piecewise-linear metric graphs.
//!
//! The crate builds self-maps of finite metric graphs that are topologically
//! mixing but not exact ("pure mixing"), with a dense set of periodic points,
//! and certifies these properties with machine-checkable witnesses computed
//! in exact rational arithmetic.
//!
//! The main entry points are:
//!
//! * [`graph::MetricGraph`] — a finite PL metric graph with a geodesic metric,
//!   the model of a computable Peano continuum used throughout.
//! * [`plmap::PlMap`] — exact piecewise-linear maps between graphs, closed
//!   under composition, with exact images and preimages.
//! * [`projection::build_projection`] — a projection onto `[0,1]` with
//!   singleton extreme fibers and interior-rich open-set images.
//! * [`mixing::build_pure_mixing`] — the staged construction of a pure mixing
//!   self-map, one stage per resolution level.
//! * [`certify`] — the independent verification engine: mixing, exactness,
//!   dense periodicity, entropy bounds, composition-order cross-checks.
//!
//! Everything is deterministic: all choices are made by canonical tie-breaks,
//! so repeated runs produce identical structures.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod certify;
pub mod cover;
pub mod cutpoint;
pub mod euler;
pub mod graph;
pub mod mixing;
pub mod nadler;
pub mod num;
pub mod path;
pub mod plmap;
pub mod projection;
pub mod subset;
pub mod tietze;

pub use certify::{Certificate, CoveringMatrix, MarkovPartition, Verdict};
pub use cover::{fine_cover, FiniteCover};
pub use cutpoint::{
    classify_point, cut_surgery, noncut_decomposition, select_base_point, BaseCase, PointClass,
};
pub use graph::{EdgeId, MetricGraph, PointRef, VertexId};
pub use mixing::{build_pure_mixing, BuildOptions, ConstructionResult, MixingBuilder, StageState};
pub use num::Q;
pub use plmap::PlMap;
pub use projection::ProjectionSpec;
pub use subset::Subcontinuum;
