//! beds-core: executable mathematics for dissipative belief dynamics.
//!
//! The crate is organized around four subsystems:
//!
//! - [`geometry`]: Fisher–Rao metrics, distances, geodesics and
//!   divergences for Gaussian and von Mises beliefs, plus their product.
//! - [`dynamics`]: dissipation of belief states, crystallization
//!   diagnostics, thermodynamic bounds and the trajectory taxonomy.
//! - [`regularizers`]: the fundamental loss and its coordinate
//!   decomposition, baseline regularizers, plain and natural-gradient
//!   optimizers, and graduated non-convexity continuation.
//! - [`network`]: multi-agent belief propagation with learned coupling
//!   potentials, topology pruning and hierarchical energy budgets.
//!
//! All numerical routines are deterministic; randomness only enters
//! through explicitly seeded streams (see [`rng`]).

pub mod dynamics;
pub mod geometry;
pub mod network;
pub mod regularizers;
pub mod rng;

pub use dynamics::{BedsState, DissipationParams, TaxonomyLabel, Trajectory};
pub use geometry::{GaussianBelief, MetricTensor2, VonMisesBelief};
pub use network::{Agent, AgentGraph, Hierarchy, Potential};
pub use regularizers::{BedsTarget, GncSchedule, LossBreakdown};
