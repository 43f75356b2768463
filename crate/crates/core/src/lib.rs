//! Ray limits of nearest-neighbor recurrence coefficients for Angelesco
//! systems with two intervals.
//!
//! Three independent routes compute the limits `A1(s), A2(s), B1(s), B2(s)`
//! along rays `n / |n| -> (s, 1 - s)`:
//!
//! * [`lattice`] fills the recurrence lattice from scalar boundary data,
//! * [`ode`] integrates the first-order system from both endpoints,
//! * [`surface`] evaluates closed-form expansions on a rational surface.
//!
//! [`crossval`] compares them.

// Negated comparisons are the NaN-rejecting form throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod crossval;
pub mod error;
pub mod lattice;
pub mod normalize;
pub mod ode;
pub mod roots;
pub mod scalar;
pub mod surface;

pub use error::{Error, Result};
pub use normalize::{
    pushforward_limits, reflect, star_normalize, uniform_grid, AffineMap, AngelescoSystem,
    Interval, LimitCurve, LimitPoint, Method, StarConfig, WeightKind,
};
pub use surface::{PlateauInfo, SurfaceSolver};
