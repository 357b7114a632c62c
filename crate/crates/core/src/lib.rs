//! Rotation-space global optimisation built on the bound
//! `d(R_A, R_B) ≤ ‖r_A − r_B‖` between the angular metric on SO(3) and the
//! Euclidean distance of axis-angle vectors.
//!
//! * [`rotation`]: matrices, axis-angle vectors, exp/log maps, the metric.
//! * [`lemma`]: both sides of the bound and every reformulation used to prove it.
//! * [`certify`]: Monte-Carlo and grid certification runs.
//! * [`bnb`]: branch and bound for angular-residual objectives.
//! * [`text`]: the rotation list text format.

pub mod bnb;
pub mod certify;
pub mod error;
pub mod exec;
pub mod lemma;
pub mod rotation;
pub mod text;

pub use error::{Error, Result};
pub use exec::Execution;
pub use rotation::{
    angle_of, angular_distance, compose, enclosed_angle, exp_map, inverse, log_map,
    random_rotation, Angle, AxisAngle, RotationMatrix,
};
