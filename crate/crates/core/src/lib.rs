//! Jointly optimal pilot and payload power control for the single-cell
//! massive MIMO uplink under per-user energy budgets.
//!
//! All powers and large-scale fading coefficients are normalized by the
//! noise variance. Solvers always use the pilot length `K`.

// `!(x > 0.0)` is the idiom here for rejecting NaN along with bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod channel_sim;
pub mod error;
pub mod maxmin;
pub mod se_model;
pub mod search;
pub mod sumse;

pub use error::{Error, Result};
pub use maxmin::{solve_maxmin, MaxMinSolution, SolverOptions};
pub use se_model::{CorrelationProfile, Detector, PowerAllocation, SeReport, SystemDims, UserProfile};
pub use sumse::{joint_solve, vwf_solve, JointSumSolution};
