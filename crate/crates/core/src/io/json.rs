//! The camera-path JSON format: one 4x4 camera-to-world matrix per eye view,
//! as consumed by matrix-based trajectory viewers.
//!
//! The document embeds a `convention` block recording whether the poses were
//! flipped into the +Y-up convention, so a reader never has to guess the
//! handedness of the data.

use serde::{Deserialize, Serialize};

use super::FormatError;
use crate::geometry::{handedness_flip, Mat4};
use crate::model::{CoordinateSpace, Eye, EyeView, Frame, Pose, Trace};

/// Coordinate-convention marker carried by every document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Convention {
    /// True when the poses were converted to the +Y-up convention by the
    /// 180-degree X-axis flip; false means they are as recorded (+Y-down
    /// scene convention).
    pub flipped: bool,
    /// Always "row_major" for documents written by this crate.
    pub matrix_layout: String,
}

impl Convention {
    fn new(flipped: bool) -> Self {
        Self {
            flipped,
            matrix_layout: "row_major".to_string(),
        }
    }
}

/// One eye view: timestamp, eye index, camera-to-world matrix, FOV angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraRecord {
    pub timestamp_ms: f64,
    /// 0 = left, 1 = right.
    pub eye: u8,
    /// Row-major 4x4 camera-to-world matrix.
    pub camera_to_world: [f64; 16],
    /// Signed FOV half-angles in radians: left, right, top, bottom.
    pub fov: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraPathDocument {
    pub user_id: String,
    pub scene_id: String,
    pub space: CoordinateSpace,
    pub convention: Convention,
    pub frames: Vec<CameraRecord>,
}

impl CameraPathDocument {
    /// Reads a document. Parsing uses full-precision float handling, so
    /// values written by [`CameraPathDocument::to_json_writer`] read back
    /// bit-exact.
    pub fn from_json_reader<R: std::io::Read>(reader: R) -> Result<Self, FormatError> {
        Ok(serde_json::from_reader(reader)?)
    }

    pub fn to_json_writer<W: std::io::Write>(&self, writer: W) -> Result<(), FormatError> {
        Ok(serde_json::to_writer_pretty(writer, self)?)
    }
}

/// Converts a trace to the matrix representation. With `flip` set, every
/// pose is converted to the +Y-up convention on the way out and the
/// document's convention marker records that.
pub fn csv_to_json(trace: &Trace, flip: bool) -> CameraPathDocument {
    let mut records = Vec::with_capacity(trace.n_frames() * 2);
    for view in trace.eye_views() {
        let pose = if flip {
            handedness_flip(&view.eye_pose)
        } else {
            view.eye_pose
        };
        records.push(CameraRecord {
            timestamp_ms: view.timestamp_ms,
            eye: view.eye.index(),
            camera_to_world: pose.camera_to_world().to_row_major(),
            fov: view.fov.as_array(),
        });
    }
    CameraPathDocument {
        user_id: trace.user_id.clone(),
        scene_id: trace.scene_id.clone(),
        space: trace.space,
        convention: Convention::new(flip),
        frames: records,
    }
}

/// Reconstructs a trace from a camera-path document, honoring the embedded
/// convention marker (a flipped document is un-flipped back to the recorded
/// convention). Matrices must be rigid with an orthonormal rotation block;
/// records must pair into (left, right) eye sequences. The result carries no
/// gaze data — the matrix format does not store it.
pub fn json_to_csv(doc: &CameraPathDocument) -> Result<Trace, FormatError> {
    let mut frames = Vec::with_capacity(doc.frames.len() / 2);
    let mut pending: Option<EyeView> = None;
    for (index, record) in doc.frames.iter().enumerate() {
        let eye = Eye::from_index(record.eye).ok_or_else(|| FormatError::Record {
            index,
            message: format!("eye index must be 0 or 1, got {}", record.eye),
        })?;
        let matrix = Mat4::from_row_major(&record.camera_to_world);
        let orientation = matrix
            .rotation_quat(1e-6)
            .map_err(|e| FormatError::Record {
                index,
                message: e.to_string(),
            })?;
        let mut pose = Pose::new(matrix.translation_part(), orientation, doc.space);
        if doc.convention.flipped {
            pose = handedness_flip(&pose);
        }
        let view = EyeView {
            eye,
            fov: crate::model::FovAngles::new(
                record.fov[0],
                record.fov[1],
                record.fov[2],
                record.fov[3],
            ),
            eye_pose: pose,
            gaze: None,
            timestamp_ms: record.timestamp_ms,
            source: None,
        };
        match (pending.take(), eye) {
            (None, Eye::Left) => pending = Some(view),
            (None, Eye::Right) => {
                return Err(FormatError::Record {
                    index,
                    message: "right-eye record without a preceding left-eye record".to_string(),
                })
            }
            (Some(_), Eye::Left) => {
                return Err(FormatError::Record {
                    index,
                    message: "left-eye record not followed by a right-eye record".to_string(),
                })
            }
            (Some(left), Eye::Right) => {
                frames.push(Frame::new(left, view).expect("pairing guarantees eye order"));
            }
        }
    }
    if pending.is_some() {
        return Err(FormatError::Record {
            index: doc.frames.len(),
            message: "document is missing the final right-eye record".to_string(),
        });
    }
    Trace::new(&doc.user_id, &doc.scene_id, frames, doc.space).map_err(|_| FormatError::NoFrames)
}
