//! Grid model of the Heisenberg module over ℝᵖ × ℤ^q and its metaplectic
//! symmetries.

mod geometry;
mod grid;
mod ops;

pub use geometry::{build_geometry, j0, ModuleGeometry};
pub use grid::{Grid, GridFunction};
pub use ops::{
    act_u, act_w, act_w_inverse, e, inner_a, verify_commutation, verify_covariance, verify_inner_compat,
    verify_unitarity, MetaplecticKind, MetaplecticOp,
};
