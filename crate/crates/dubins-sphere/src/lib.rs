//! Shortest geodesic-curvature-constrained paths on the unit sphere with a
//! fixed start pose and a free terminal heading.
//!
//! A vehicle moves at unit speed on the unit sphere; its pose is the rotation
//! `R = [X, T, N]` (position, tangent, tangent-normal) and its control is the
//! geodesic curvature `u_g` with `|u_g| <= U_max`, so the tightest turn is a
//! circle of radius `r = 1/sqrt(1 + U_max^2)`. For `r <= 1/2` the shortest
//! path to a target location (heading free) is one of `LG`, `RG`, `LR`, `RL`
//! or a degenerate of those, where `L`/`R` are tight turns and `G` is a
//! great-circle arc; for `LR`/`RL` the second angle is at least pi.
//!
//! Module map:
//! - [`geometry`]: forward model (segment rotations, frame ODE, sampling).
//! - [`solvers`]: per-class inverse problems (all angle pairs hitting a target).
//! - [`planner`]: candidate enumeration and minimum-length selection.
//! - [`oracle`]: brute-force grid certification over 1-3 segment words.
//! - [`analysis`]: costate flow, Hamiltonian, and replacement identities.
//! - [`verification`]: the named numeric check suite behind `verify`.
//!
//! ```
//! use dubins_sphere::geometry::{Configuration, TurnRadius};
//! use dubins_sphere::planner;
//! use nalgebra::Vector3;
//!
//! let r = TurnRadius::new(0.4).unwrap();
//! let target = Vector3::new(0.0, 1.0, 0.0);
//! let plan = planner::plan(&Configuration::identity(), &target, r).unwrap();
//! assert!(plan.optimal().length > 0.0);
//! ```
//!
//! With the default `parallel` feature the oracle fans its grid out over a
//! rayon pool; disabling it leaves a sequential implementation with
//! bit-identical results.

pub mod analysis;
mod error;
pub mod geometry;
pub mod oracle;
pub mod planner;
pub mod solvers;
pub mod tolerances;
pub mod verification;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
