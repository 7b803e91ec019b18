//! Route planning for small vehicle teams crossing terrain whose traversal
//! cost is only known as a per-cell estimate with uncertainty.
//!
//! The crate builds a roadmap from a clipped Voronoi diagram, scores its
//! edges against a two-value costmap (per-cell mean and variance of finer
//! subcell samples), plans sets of spatially diverse routes by penalizing
//! proximity to already-committed routes, and simulates a survey mission in
//! which vehicles traverse their routes, observe the subcells they cross,
//! and fold those observations back into a shared estimate.
//!
//! Everything here is deterministic given a seed: randomness comes only
//! from explicitly seeded generators, iteration follows index order, and
//! ties in search and nearest-neighbor queries break toward lower indices.
//!
//! The crate is `no_std`-compatible (with `alloc`); the default `std`
//! feature adds nothing but `std::error::Error` and floating-point
//! intrinsics from the host.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod costmap;
pub mod error;
pub mod geom;
mod math;
pub mod mission;
pub mod planner;
pub mod rng;
pub mod roadmap;
pub mod scoring;

pub use costmap::{CellIndex, SurveyReport, TerrainParams, TwoValueCostmap, UpdateMode};
pub use error::{Error, Result};
pub use geom::{Point, Rect};
pub use mission::{MissionConfig, MissionResult, ReplanRecord, VehicleState};
pub use planner::{ExponentForm, PenaltyParams, Route, RouteBreakdown, RouteEdge};
pub use roadmap::{GeneratorSet, Roadmap, VoronoiDiagram};
pub use scoring::{EdgeScore, GainSet};
