//! Quaternion / vector / matrix algebra and the coordinate-space transforms
//! between the physical stage and the virtual world.

mod mat4;
mod quat;
mod transform;
mod vec3;

pub use mat4::Mat4;
pub use quat::UnitQuat;
pub use transform::{
    apply_scene_init, apply_scene_init_with, handedness_flip, head_pose, ipd, trace_to_stage,
    trace_to_virtual, undo_scene_init, undo_scene_init_with, ScaleDirection,
};
pub use vec3::Vec3;

use crate::model::CoordinateSpace;

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("degenerate quaternion: norm {norm:e} is too small to normalize")]
    DegenerateQuaternion { norm: f64 },

    #[error("matrix rotation block is not orthonormal (max deviation {deviation:e})")]
    NonOrthonormalRotation { deviation: f64 },

    #[error("matrix last row is not (0, 0, 0, 1)")]
    NotRigidTransform,

    #[error("coordinate space mismatch: expected {expected}, got {actual}")]
    SpaceMismatch {
        expected: CoordinateSpace,
        actual: CoordinateSpace,
    },

    #[error(
        "left/right head orientations disagree (max component deviation {deviation:e}, tolerance {tolerance:e})"
    )]
    FrameOrientationMismatch { deviation: f64, tolerance: f64 },
}
