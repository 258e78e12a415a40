//! Continuum-percolation laboratory for secrecy graphs.
//!
//! Two independent homogeneous Poisson point processes model legitimate
//! transmitters and eavesdroppers on the plane. A directed edge exists
//! between legitimate nodes when they can sustain a positive secrecy rate
//! against every eavesdropper, under either a pure path-loss law or
//! path-loss plus per-link fading. This crate provides:
//!
//! * [`geom`] — windows, Poisson sampling, and grid-accelerated
//!   nearest-neighbor queries,
//! * [`graph`] — edge predicates, graph construction, and component
//!   extraction in all four directionality senses,
//! * [`estimators`] — reproducible Monte Carlo estimation of percolation
//!   events, critical-ratio search, and distribution cross-checks,
//! * [`analytic`] — closed-form probabilities, the ν-integrals, covering
//!   constants, and the critical-intensity bound calculators.
//!
//! Everything is deterministic given a 64-bit seed: trial workers draw
//! from counter-based substreams, so results do not depend on worker
//! count or scheduling.

pub mod analytic;
pub mod error;
pub mod estimators;
pub mod geom;
pub mod graph;
pub mod rng;

pub use error::Error;
pub use geom::{nearest_distance, pad_width, sample_ppp, GridIndex, Point2, PppSample, Window};
pub use graph::{
    build_graph, component, edge_exists, max_eaves_power, rho, secrecy_rate, ComponentMode,
    Fading, ModelKind, ModelParams, SecrecyGraph,
};
pub use rng::RngStream;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
