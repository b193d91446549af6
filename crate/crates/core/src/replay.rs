//! Per-frame camera synthesis: the view and projection matrices a renderer
//! needs to reproduce each recorded eye view, and projection of gaze rays to
//! image pixels.

use crate::geometry::{Mat4, UnitQuat, Vec3};
use crate::model::{Eye, EyeView, Pose, Trace};

/// Forward axis of the viewing convention used for gaze rays. Recorded
/// traces replay directly with the `-Z` convention; `+Z` is available for
/// data converted into Y-down viewer conventions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ForwardAxis {
    #[default]
    NegZ,
    PosZ,
}

impl ForwardAxis {
    pub fn vector(self) -> Vec3 {
        match self {
            ForwardAxis::NegZ => Vec3::new(0.0, 0.0, -1.0),
            ForwardAxis::PosZ => Vec3::new(0.0, 0.0, 1.0),
        }
    }
}

/// Render-target size in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImageSize {
    pub width: u32,
    pub height: u32,
}

impl Default for ImageSize {
    /// The per-eye resolution the source recordings were rendered at.
    fn default() -> Self {
        Self {
            width: 2160,
            height: 2224,
        }
    }
}

/// Everything a renderer needs for one eye of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct EyeCamera {
    pub eye: Eye,
    /// World-to-eye transform (inverse of the eye's camera-to-world).
    pub view: Mat4,
    /// Asymmetric-frustum projection built from the row's own FOV angles.
    pub projection: Mat4,
    pub timestamp_ms: f64,
    pub size: ImageSize,
}

/// A gaze ray projected to image coordinates, origin at the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GazePixel {
    pub u: f64,
    pub v: f64,
    /// False when the ray points behind the image plane or lands outside
    /// the image bounds; `u`/`v` then hold the unclamped projection.
    pub in_view: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error("degenerate FOV angles: left tangent {left} must be less than right tangent {right}")]
    DegenerateHorizontalFov { left: f64, right: f64 },

    #[error("degenerate FOV angles: the two vertical tangents are equal ({tangent})")]
    DegenerateVerticalFov { tangent: f64 },

    #[error("clip planes must satisfy 0 < near < far, got near {near}, far {far}")]
    BadClipPlanes { near: f64, far: f64 },

    #[error("frame {frame} ({eye:?} eye): {source}")]
    Frame {
        frame: usize,
        eye: Eye,
        source: Box<ReplayError>,
    },

    #[error("gaze ray is parallel to the image plane")]
    GazeParallelToImagePlane,

    #[error("trace has no gaze data")]
    MissingGaze,
}

/// Signed frustum tangents of a set of FOV angles: (left, right, top,
/// bottom), where top/bottom are ordered by value rather than by the column
/// labels — recordings carry the vertical pair with mixed sign conventions.
fn frustum_tangents(fov: &crate::model::FovAngles) -> Result<(f64, f64, f64, f64), ReplayError> {
    let l = fov.left.tan();
    let r = fov.right.tan();
    let (va, vb) = (fov.top.tan(), fov.bottom.tan());
    let (t, b) = (va.max(vb), va.min(vb));
    if l.partial_cmp(&r) != Some(std::cmp::Ordering::Less) {
        return Err(ReplayError::DegenerateHorizontalFov { left: l, right: r });
    }
    if t == b {
        return Err(ReplayError::DegenerateVerticalFov { tangent: t });
    }
    Ok((l, r, t, b))
}

/// Builds the asymmetric perspective projection for one eye.
///
/// The camera looks down -Z; clip-space z spans [-1, 1] with z = -1 at the
/// near plane. Points on a frustum corner ray map to NDC (±1, ±1).
pub fn projection_from_fov(
    fov: &crate::model::FovAngles,
    near: f64,
    far: f64,
) -> Result<Mat4, ReplayError> {
    if !(near > 0.0 && far > near) {
        return Err(ReplayError::BadClipPlanes { near, far });
    }
    let (l, r, t, b) = frustum_tangents(fov)?;
    let mut p = Mat4::ZERO;
    p.m[0][0] = 2.0 / (r - l);
    p.m[0][2] = (r + l) / (r - l);
    p.m[1][1] = 2.0 / (t - b);
    p.m[1][2] = (t + b) / (t - b);
    p.m[2][2] = -(far + near) / (far - near);
    p.m[2][3] = -2.0 * far * near / (far - near);
    p.m[3][2] = -1.0;
    Ok(p)
}

/// World-to-eye view matrix: the inverse of the pose's camera-to-world
/// transform, [R^T | -R^T p].
pub fn view_matrix(p: &Pose) -> Mat4 {
    let r = Mat4::from_quat(&p.orientation);
    let mut view = Mat4::IDENTITY;
    for i in 0..3 {
        for j in 0..3 {
            view.m[i][j] = r.m[j][i];
        }
    }
    let t = p.position;
    view.m[0][3] = -(r.m[0][0] * t.x + r.m[1][0] * t.y + r.m[2][0] * t.z);
    view.m[1][3] = -(r.m[0][1] * t.x + r.m[1][1] * t.y + r.m[2][1] * t.z);
    view.m[2][3] = -(r.m[0][2] * t.x + r.m[1][2] * t.y + r.m[2][2] * t.z);
    view
}

/// Expands a trace into the per-eye camera sequence the replay renderer
/// consumes: exactly two cameras per frame, left then right, timestamps
/// copied from the rows. Projection errors name the offending frame.
pub fn camera_stream(
    trace: &Trace,
    near: f64,
    far: f64,
    size: ImageSize,
) -> Result<Vec<EyeCamera>, ReplayError> {
    let mut cameras = Vec::with_capacity(trace.n_frames() * 2);
    for (frame_index, frame) in trace.frames.iter().enumerate() {
        for view in [&frame.left, &frame.right] {
            let projection =
                projection_from_fov(&view.fov, near, far).map_err(|e| ReplayError::Frame {
                    frame: frame_index,
                    eye: view.eye,
                    source: Box::new(e),
                })?;
            cameras.push(EyeCamera {
                eye: view.eye,
                view: view_matrix(&view.eye_pose),
                projection,
                timestamp_ms: view.timestamp_ms,
                size,
            });
        }
    }
    Ok(cameras)
}

/// Projects an eye view's gaze ray onto the image.
///
/// The gaze orientation rotates the forward axis into a world-space
/// direction; that direction is carried into the eye's view frame and
/// intersected with the image plane. `v` grows downward from the top edge.
pub fn gaze_pixel(
    ev: &EyeView,
    size: ImageSize,
    forward: ForwardAxis,
) -> Result<GazePixel, ReplayError> {
    let gaze = ev.gaze.as_ref().ok_or(ReplayError::MissingGaze)?;
    project_direction(
        &ev.eye_pose.orientation,
        gaze.orientation.rotate(forward.vector()),
        &ev.fov,
        size,
        forward,
    )
}

/// Shared projection core: takes a world-space direction and the eye
/// orientation, returns the pixel it crosses the image plane at.
fn project_direction(
    eye_orientation: &UnitQuat,
    d_world: Vec3,
    fov: &crate::model::FovAngles,
    size: ImageSize,
    forward: ForwardAxis,
) -> Result<GazePixel, ReplayError> {
    let (l, r, t, b) = frustum_tangents(fov)?;
    let d_view = eye_orientation.inverse().rotate(d_world);
    if d_view.z.abs() < 1e-12 {
        return Err(ReplayError::GazeParallelToImagePlane);
    }
    let in_front = match forward {
        ForwardAxis::NegZ => d_view.z < 0.0,
        ForwardAxis::PosZ => d_view.z > 0.0,
    };
    let h = d_view.x / d_view.z.abs();
    let vhat = d_view.y / d_view.z.abs();
    let u = (h - l) / (r - l) * size.width as f64;
    let v = (t - vhat) / (t - b) * size.height as f64;
    let in_view = in_front
        && (0.0..=size.width as f64).contains(&u)
        && (0.0..=size.height as f64).contains(&v);
    Ok(GazePixel { u, v, in_view })
}
