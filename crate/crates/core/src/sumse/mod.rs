//! Weighted sum-SE power control: payload-only virtual water-filling and the
//! joint pilot/payload perspective reformulation.

mod joint;
mod vwf;

pub use joint::{
    joint_inner, joint_s_range, joint_solve, q_perspective, q_perspective_dy, JointInner, JointSumSolution,
};
pub use vwf::{vwf_full_power_check, vwf_inner, vwf_solve, VwfProblem, VwfSolution, VwfState};

use crate::error::Result;
use crate::maxmin::SolverOptions;
use crate::se_model::{Detector, PowerAllocation, SystemDims, UserProfile};

/// Sum-SE over payload powers with fixed pilot powers, as an allocation.
pub fn solve_sum_data_only(
    profile: &UserProfile,
    dims: &SystemDims,
    pilot_power: &[f64],
    detector: Detector,
    weights: &[f64],
    opts: &SolverOptions,
) -> Result<(PowerAllocation, VwfSolution)> {
    let problem = VwfProblem::from_pilots(profile, dims, pilot_power, detector, weights)?;
    let sol = vwf_solve(&problem, opts)?;
    let alloc =
        PowerAllocation { tau_p: dims.users, pilot_power: pilot_power.to_vec(), data_power: sol.data_power.clone() };
    Ok((alloc, sol))
}
