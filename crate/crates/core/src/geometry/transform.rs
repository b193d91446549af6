//! Pose-level transforms: the Y-up/Y-down convention flip and the
//! stage-to-virtual scene-initialization transform with its exact inverse.

use super::vec3::Vec3;
use super::GeometryError;
use crate::model::{CoordinateSpace, Frame, Pose, Trace};
use crate::scene::SceneInit;

/// Which way a scene's scale factor is read.
///
/// The published calibration maps physical meters to scene units, so the
/// default multiplies by the scale when going stage -> virtual. The reciprocal
/// reading is available for interop with tools that store units-per-meter the
/// other way around; the stage/virtual round trip is exact under either.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScaleDirection {
    /// virtual = scale * physical (default).
    #[default]
    VirtualPerMeter,
    /// virtual = physical / scale.
    MeterPerVirtual,
}

impl ScaleDirection {
    fn meters_to_units(self, scale: f64) -> f64 {
        match self {
            ScaleDirection::VirtualPerMeter => scale,
            ScaleDirection::MeterPerVirtual => 1.0 / scale,
        }
    }
}

/// Converts a camera pose between the +Y-up and +Y-down world conventions.
///
/// Both conventions are right-handed and differ by a 180-degree rotation
/// about the X axis, so the conversion negates the Y and Z of the position
/// and conjugates the orientation by that rotation — which likewise reduces
/// to negating the quaternion's y and z components. The operation is exactly
/// self-inverse at the component level.
pub fn handedness_flip(p: &Pose) -> Pose {
    Pose {
        position: Vec3::new(p.position.x, -p.position.y, -p.position.z),
        orientation: p.orientation.conjugated_by_x180(),
        space: p.space,
    }
}

/// Maps a physical-stage pose into the virtual world of a scene:
/// scale the position into scene units, rotate by the tilt correction, then
/// translate to the scene's starting position. The orientation picks up the
/// tilt correction on the left.
pub fn apply_scene_init(p: &Pose, init: &SceneInit) -> Result<Pose, GeometryError> {
    apply_scene_init_with(p, init, ScaleDirection::default())
}

pub fn apply_scene_init_with(
    p: &Pose,
    init: &SceneInit,
    direction: ScaleDirection,
) -> Result<Pose, GeometryError> {
    if p.space != CoordinateSpace::PhysicalStage {
        return Err(GeometryError::SpaceMismatch {
            expected: CoordinateSpace::PhysicalStage,
            actual: p.space,
        });
    }
    let s = direction.meters_to_units(init.scale);
    Ok(Pose {
        position: init.q_init.rotate(p.position * s) + init.init_pos,
        orientation: init.q_init * p.orientation,
        space: CoordinateSpace::VirtualWorld,
    })
}

/// Exact inverse of [`apply_scene_init`]: subtract the starting position,
/// rotate back by the inverse tilt, and divide out the scale, recovering the
/// pose in physical-stage meters.
pub fn undo_scene_init(p: &Pose, init: &SceneInit) -> Result<Pose, GeometryError> {
    undo_scene_init_with(p, init, ScaleDirection::default())
}

pub fn undo_scene_init_with(
    p: &Pose,
    init: &SceneInit,
    direction: ScaleDirection,
) -> Result<Pose, GeometryError> {
    if p.space != CoordinateSpace::VirtualWorld {
        return Err(GeometryError::SpaceMismatch {
            expected: CoordinateSpace::VirtualWorld,
            actual: p.space,
        });
    }
    let s = direction.meters_to_units(init.scale);
    let q_inv = init.q_init.inverse();
    Ok(Pose {
        position: q_inv.rotate(p.position - init.init_pos) * (1.0 / s),
        orientation: q_inv * p.orientation,
        space: CoordinateSpace::PhysicalStage,
    })
}

fn map_trace_poses(
    trace: &Trace,
    space: CoordinateSpace,
    f: impl Fn(&Pose) -> Result<Pose, GeometryError>,
) -> Result<Trace, GeometryError> {
    let mut frames = Vec::with_capacity(trace.frames.len());
    for frame in &trace.frames {
        let map_view =
            |view: &crate::model::EyeView| -> Result<crate::model::EyeView, GeometryError> {
                let mut out = view.clone().without_source();
                out.eye_pose = f(&view.eye_pose)?;
                if let Some(gaze) = &view.gaze {
                    out.gaze = Some(f(gaze)?);
                }
                Ok(out)
            };
        frames.push(
            Frame::new(map_view(&frame.left)?, map_view(&frame.right)?)
                .expect("mapping preserves eye order"),
        );
    }
    Ok(Trace::new(&trace.user_id, &trace.scene_id, frames, space)
        .expect("mapping preserves frame count"))
}

/// Converts a whole virtual-world trace (eye poses and gaze poses) back to
/// physical-stage meters. The lexical row sources are dropped: the values
/// change, so byte-level round-tripping no longer applies.
pub fn trace_to_stage(
    trace: &Trace,
    init: &SceneInit,
    direction: ScaleDirection,
) -> Result<Trace, GeometryError> {
    map_trace_poses(trace, CoordinateSpace::PhysicalStage, |p| {
        undo_scene_init_with(p, init, direction)
    })
}

/// Converts a whole physical-stage trace into a scene's virtual-world
/// coordinates.
pub fn trace_to_virtual(
    trace: &Trace,
    init: &SceneInit,
    direction: ScaleDirection,
) -> Result<Trace, GeometryError> {
    map_trace_poses(trace, CoordinateSpace::VirtualWorld, |p| {
        apply_scene_init_with(p, init, direction)
    })
}

/// Head pose of a stereo frame: the midpoint of the two eye positions with
/// the shared head orientation. Errors when the two rows disagree on the
/// head orientation beyond `1e-6` per component.
pub fn head_pose(f: &Frame) -> Result<Pose, GeometryError> {
    const TOLERANCE: f64 = 1e-6;
    let deviation = f
        .left
        .eye_pose
        .orientation
        .max_component_deviation(&f.right.eye_pose.orientation);
    if deviation > TOLERANCE {
        return Err(GeometryError::FrameOrientationMismatch {
            deviation,
            tolerance: TOLERANCE,
        });
    }
    Ok(Pose {
        position: f.left.eye_pose.position.midpoint(f.right.eye_pose.position),
        orientation: f.left.eye_pose.orientation,
        space: f.left.eye_pose.space,
    })
}

/// Inter-pupillary distance of a frame: the Euclidean distance between the
/// two eye positions, in the units of the frame's space.
pub fn ipd(f: &Frame) -> f64 {
    f.left.eye_pose.position.distance(f.right.eye_pose.position)
}
