//! Equivariant Gromov-Hausdorff machinery for finite metric spaces.
//!
//! Everything in this crate is a pure function of immutable inputs and runs
//! without the standard library (an allocator is required). The companion
//! `eqgh` crate adds file formats, scenarios and the command-line front end.
//!
//! Layout:
//!
//! * [`metric`]: finite metric spaces, point maps, Hausdorff and
//!   Gromov-Hausdorff distances, ε-isometries and their inverses.
//! * [`group`] and [`action`]: generated groups, finite actions and the
//!   equivariant distances built on them.
//! * [`shadowing`]: pseudo-orbits, tracing, expansivity and the
//!   stability conjugacy.
//! * [`wasserstein`]: exact discrete optimal transport, pushforwards,
//!   lifted approximations and Følner averaging.
//! * [`systems`]: generators for circles, tori, products, matrix actions,
//!   rotations, shifts and the worked example families.
#![no_std]
// Negated comparisons reject NaN; index loops mirror the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod action;
pub mod error;
pub mod group;
pub mod linalg;
pub mod metric;
mod search;
pub mod shadowing;
pub mod systems;
pub mod transport;
pub mod wasserstein;

pub use error::{Error, Result};

/// Slack added to the right-hand side of every bound check.
pub const BOUND_TOL: f64 = 1e-9;

pub mod prelude {
    pub use crate::action::*;
    pub use crate::error::{Error, Result};
    pub use crate::group::*;
    pub use crate::metric::*;
    pub use crate::shadowing::*;
    pub use crate::systems::*;
    pub use crate::wasserstein::*;
}
