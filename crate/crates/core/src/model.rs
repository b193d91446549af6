//! Core domain types: poses, per-eye views, frames, and whole traces.
//!
//! Values are immutable after construction and may be shared freely across
//! threads. Structural invariants that downstream math depends on (eye
//! ordering, nonempty traces) are enforced at construction; data-quality
//! checks (timestamp order, quaternion norms, gaze drift) are reported by
//! [`crate::validate`] instead so that imperfect files can still be inspected.

use crate::geometry::{UnitQuat, Vec3};

/// The coordinate space a pose or trace lives in.
///
/// Recorded traces are in the virtual world of the rendered scene; the
/// physical stage is the metric, floor-aligned tracking area. Transform
/// operations refuse values tagged with the wrong space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordinateSpace {
    VirtualWorld,
    PhysicalStage,
}

impl std::fmt::Display for CoordinateSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoordinateSpace::VirtualWorld => write!(f, "virtual-world"),
            CoordinateSpace::PhysicalStage => write!(f, "physical-stage"),
        }
    }
}

/// Which eye a recorded row belongs to. Left rows come first in file order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Eye {
    Left,
    Right,
}

impl Eye {
    pub fn index(self) -> u8 {
        match self {
            Eye::Left => 0,
            Eye::Right => 1,
        }
    }

    pub fn from_index(i: u8) -> Option<Eye> {
        match i {
            0 => Some(Eye::Left),
            1 => Some(Eye::Right),
            _ => None,
        }
    }
}

/// Position plus orientation, tagged with the space it is expressed in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vec3,
    pub orientation: UnitQuat,
    pub space: CoordinateSpace,
}

impl Pose {
    pub fn new(position: Vec3, orientation: UnitQuat, space: CoordinateSpace) -> Self {
        Self {
            position,
            orientation,
            space,
        }
    }

    pub fn identity(space: CoordinateSpace) -> Self {
        Self::new(Vec3::ZERO, UnitQuat::IDENTITY, space)
    }

    /// Camera-to-world transform: translation(position) * rotation(orientation).
    pub fn camera_to_world(&self) -> crate::geometry::Mat4 {
        crate::geometry::Mat4::from_rotation_translation(&self.orientation, self.position)
    }
}

/// The four signed field-of-view half-angles of one eye, in radians, in
/// recorded column order: left, right, then the two vertical angles.
///
/// Recorded files carry the vertical pair with mixed sign conventions, so no
/// ordering is imposed between `top` and `bottom` here; projection code works
/// from the signed tangents directly.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FovAngles {
    pub left: f64,
    pub right: f64,
    pub top: f64,
    pub bottom: f64,
}

impl FovAngles {
    pub fn new(left: f64, right: f64, top: f64, bottom: f64) -> Self {
        Self {
            left,
            right,
            top,
            bottom,
        }
    }

    /// Symmetric frustum with the same half-angle on all four sides.
    pub fn symmetric(half_angle: f64) -> Self {
        Self::new(-half_angle, half_angle, half_angle, -half_angle)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.left, self.right, self.top, self.bottom]
    }
}

/// The original text of one data row, kept so that writing a parsed trace
/// reproduces the file byte-for-byte (quaternions are normalized in memory
/// but printed values often carry trailing zeros that reformatting would
/// drop).
#[derive(Debug, Clone, PartialEq)]
pub struct RowSource {
    /// 1-based data-row number in the source file (header excluded).
    pub row: usize,
    pub view_index: String,
    pub fov: [String; 4],
    pub pos: [String; 3],
    pub quat: [String; 4],
    pub gaze_pos: Option<[String; 3]>,
    pub gaze_quat: Option<[String; 4]>,
    pub timestamp: String,
}

/// One recorded row: a single eye's view parameters at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct EyeView {
    pub eye: Eye,
    pub fov: FovAngles,
    /// Eye position and head orientation.
    pub eye_pose: Pose,
    /// Gaze position and orientation; absent when the recording headset had
    /// no eye tracker (such files simply omit the gaze columns).
    pub gaze: Option<Pose>,
    /// Milliseconds since the first left-eye row of the trace.
    pub timestamp_ms: f64,
    /// Original field text, present only on views read from a file.
    pub source: Option<RowSource>,
}

impl EyeView {
    /// Drops the lexical source, e.g. after a transform changed the values.
    pub fn without_source(mut self) -> EyeView {
        self.source = None;
        self
    }
}

/// A stereo frame: the left and right eye views recorded for one rendered
/// frame. The two views share the head orientation (validated, not enforced,
/// so imperfect files can be examined).
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub left: EyeView,
    pub right: EyeView,
}

impl Frame {
    /// Pairs two views into a frame. The views must be tagged left and right
    /// respectively; this is the one structural invariant pairing relies on.
    pub fn new(left: EyeView, right: EyeView) -> Result<Self, ModelError> {
        if left.eye != Eye::Left || right.eye != Eye::Right {
            return Err(ModelError::EyeOrder {
                left: left.eye.index(),
                right: right.eye.index(),
            });
        }
        Ok(Self { left, right })
    }

    /// The frame timestamp is the left row's value.
    pub fn timestamp_ms(&self) -> f64 {
        self.left.timestamp_ms
    }
}

/// An ordered sequence of frames for one user exploring one scene.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub user_id: String,
    pub scene_id: String,
    pub frames: Vec<Frame>,
    pub space: CoordinateSpace,
}

impl Trace {
    pub fn new(
        user_id: impl Into<String>,
        scene_id: impl Into<String>,
        frames: Vec<Frame>,
        space: CoordinateSpace,
    ) -> Result<Self, ModelError> {
        if frames.is_empty() {
            return Err(ModelError::EmptyTrace);
        }
        Ok(Self {
            user_id: user_id.into(),
            scene_id: scene_id.into(),
            frames,
            space,
        })
    }

    pub fn n_frames(&self) -> usize {
        self.frames.len()
    }

    /// True when every eye view in the trace carries gaze data.
    pub fn has_gaze(&self) -> bool {
        self.frames
            .iter()
            .all(|f| f.left.gaze.is_some() && f.right.gaze.is_some())
    }

    /// Iterates eye views in file order: left, right, left, right, ...
    pub fn eye_views(&self) -> impl Iterator<Item = &EyeView> {
        self.frames.iter().flat_map(|f| [&f.left, &f.right])
    }

    /// Re-tags the trace (and every pose in it) with a coordinate space,
    /// leaving the numbers untouched. Trace files do not encode the space
    /// they are in, so a caller that knows a file holds stage-space data uses
    /// this to correct the parser's default virtual-world tag.
    pub fn assume_space(mut self, space: CoordinateSpace) -> Trace {
        self.space = space;
        for frame in &mut self.frames {
            for view in [&mut frame.left, &mut frame.right] {
                view.eye_pose.space = space;
                if let Some(gaze) = &mut view.gaze {
                    gaze.space = space;
                }
            }
        }
        self
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("a trace must contain at least one frame")]
    EmptyTrace,

    #[error("frame views out of order: got eye indices ({left}, {right}), expected (0, 1)")]
    EyeOrder { left: u8, right: u8 },
}
