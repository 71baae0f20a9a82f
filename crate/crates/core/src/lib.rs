//! Design and simulation toolkit for small desk-top pick-and-place arms:
//! arm models, kinematics, statics, gripper sizing, range sensors, a cycle
//! simulator, trade studies and cost roll-ups.

pub mod arm_model;
pub mod batch;
pub mod control_sim;
pub mod economics;
pub mod error;
pub mod gripper;
pub mod kinematics;
pub mod presets;
pub mod sensors;
pub mod structural;
pub mod trade_study;
pub mod units;

pub use error::{Error, Result};
