//! Online selection on laminar matroids with random arrival order.
//!
//! Elements arrive at independent uniform times in (0, 1). After a
//! threshold `t0`, the greedy rule accepts an arrival when it belongs to the
//! maximum-weight independent set of everything seen so far and still fits
//! next to what has already been accepted.
//!
//! - [`matroid`]: laminar matroids, the independence oracle and offline optima.
//! - [`sim`]: arrival schedules, the online rules, Monte Carlo estimation.
//! - [`bound`]: the analytic lower bound on per-element selection probability.
//! - [`instances`]: generators and the instance document format.

pub mod bound;
pub mod error;
pub mod instances;
pub mod matroid;
pub mod sim;

pub use error::{BoundError, InstanceError, MatroidError, SimError};
pub use matroid::{Element, ElementId, IndependentSet, LaminarMatroid, SetId};
