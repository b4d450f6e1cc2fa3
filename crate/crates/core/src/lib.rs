//! Covering-assignment problem for swarm-powered ad-hoc clouds.
//!
//! A swarm of drones has taken a set of geo-located photos. A subset of the
//! drones can run 3D reconstruction. The problem is to split the photos into
//! `m` spatial-convex sub-regions (one per capable drone), assign every
//! sub-region to at least `sigma` capable drones and minimise the makespan,
//! optionally under a deadline on the max-min-fair transfer of photos over the
//! swarm's tree network.
//!
//! The crate is organised bottom-up:
//!
//! - [`instance`]: data model, JSON document, naming grammar, generators.
//! - [`geometry`]: coordinate axes, border index sets, rectangle enumeration.
//! - [`network`]: tree routing and progressive-filling MMF allocation.
//! - [`milp`]: solver-agnostic linear models, LP writer, external solvers.
//! - [`pcapsac`] / [`rcapsac`]: the photo-based and region-based formulations.
//! - [`eval`] / [`oracle`]: feasibility checks and the brute-force optimum.
//! - [`gscp`]: executable reduction from geometric set cover.
//! - [`bench`]: benchmark harness, performance profiles and sweeps.

pub mod bench;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod geometry;
pub mod gscp;
pub mod instance;
pub mod milp;
pub mod network;
pub mod oracle;
pub mod par;
pub mod pcapsac;
pub mod rcapsac;
pub mod solution;
pub mod solver;
pub mod transfer;

pub use error::{Error, Result};
pub use instance::{Deadline, Instance};
pub use solution::CapsacSolution;
