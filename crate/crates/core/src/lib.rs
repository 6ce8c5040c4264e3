//! Spreading speeds, forced waves and propagation checks for reaction-diffusion
//! models in shifting habitats.
//!
//! Two model classes are covered:
//!
//! * the delayed scalar equation
//!   `u_t = d u_xx - mu u + mu f(x - c t, u(t - tau, x))`, and
//! * cooperative systems `u_t = D u_xx + f(x, u)` that become homogeneous as
//!   `x -> +-inf`.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! `*64` / `*32` aliases below fix the scalar type.

// `!(a > b)` is used on purpose so that NaN lands in the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// stencil loops index several parallel buffers at once
#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod models;
pub mod real;
pub mod sim;
pub mod speeds;
pub mod waves;

pub use error::{Error, Result};
pub use grid::{DelayHistory, Field, Frame, Grid1D, Trajectory};
pub use linalg::{matrix_exp, perron, Matrix, PerronPair};
pub use models::{
    AssumptionReport, CooperativeModel, ScalarReaction, ScalarShiftModel, Side, VectorReaction,
};
pub use real::Real;
pub use speeds::SpeedReport;
pub use waves::WaveProfile;

pub type Grid1D64 = Grid1D<f64>;
pub type Grid1D32 = Grid1D<f32>;
pub type Field64 = Field<f64>;
pub type Field32 = Field<f32>;
pub type Trajectory64 = Trajectory<f64>;
pub type Trajectory32 = Trajectory<f32>;
pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type ScalarShiftModel64 = ScalarShiftModel<f64>;
pub type ScalarShiftModel32 = ScalarShiftModel<f32>;
pub type CooperativeModel64 = CooperativeModel<f64>;
pub type CooperativeModel32 = CooperativeModel<f32>;
pub type SpeedReport64 = SpeedReport<f64>;
pub type SpeedReport32 = SpeedReport<f32>;
pub type WaveProfile64 = WaveProfile<f64>;
pub type WaveProfile32 = WaveProfile<f32>;
