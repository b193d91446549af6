//! Toolkit for 6-DoF head-pose and eye-gaze navigation traces recorded over
//! reconstructed 3D scenes.
//!
//! The crate covers the full offline pipeline around such recordings,
//! without needing a headset or a renderer:
//!
//! - [`model`] — domain types: poses, per-eye views, stereo frames, traces;
//! - [`geometry`] — quaternion/matrix algebra, the Y-up/Y-down convention
//!   flip, and the stage/virtual scene-initialization transform;
//! - [`scene`] — the calibrated initialization parameters of the twelve
//!   published scenes;
//! - [`io`] — the trace CSV format, the camera-path JSON format, and dataset
//!   directory indexing;
//! - [`validate`] — structural validation with row-attributed findings;
//! - [`replay`] — per-eye view/projection matrices and gaze-to-pixel
//!   projection;
//! - [`analytics`] — distance, frame-rate, trajectory, and gaze-divergence
//!   statistics;
//! - [`synth`] — deterministic synthetic traces with analytic ground truth.

pub mod analytics;
pub mod geometry;
pub mod io;
pub mod model;
pub mod replay;
pub mod scene;
pub mod synth;
pub mod validate;

pub use geometry::{Mat4, UnitQuat, Vec3};
pub use model::{CoordinateSpace, Eye, EyeView, FovAngles, Frame, Pose, Trace};
pub use scene::{scene_registry, SceneInit, SceneRegistry};
