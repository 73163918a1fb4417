//! Convex preferential attachment: trajectory simulation, exact analysis of
//! the two-vertex degree walk and numerical checks of the persistent-hub
//! certificates.
//!
//! The modules build on each other in this order: [`weights`] defines the
//! attachment rule, [`graphgen`] grows trees with it, [`pairwalk`] studies two
//! competing degrees in isolation and [`analysis`] aggregates trials.

pub mod analysis;
pub mod fenwick;
pub mod graphgen;
pub mod harness;
pub mod hub;
pub mod pairwalk;
pub mod stats;
pub mod weights;

pub use graphgen::{DegreeState, GraphError, RunOptions};
pub use hub::HubRecord;
pub use weights::{WeightError, WeightFunction, WeightKind};
