//! File formats: the trace CSV, the camera-path JSON used by matrix-based
//! viewers, and dataset directory indexing.

mod csv;
mod dataset;
mod json;

pub use csv::{
    format_value, parse_trace_csv, trace_to_csv_string, write_trace_csv, ParsedTrace,
    CANONICAL_HEADER, CANONICAL_HEADER_NO_GAZE,
};
pub use dataset::{parse_trace_filename, scan_dataset, DatasetEntry, DatasetIndex};
pub use json::{csv_to_json, json_to_csv, CameraPathDocument, CameraRecord, Convention};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("missing required column {name}")]
    MissingColumn { name: String },

    #[error("unknown column \"{name}\"")]
    UnknownColumn { name: String },

    #[error("duplicate column {name}")]
    DuplicateColumn { name: String },

    #[error("row {row}: expected {expected} fields, found {actual}")]
    FieldCount {
        row: usize,
        expected: usize,
        actual: usize,
    },

    #[error("row {row}, column {column}: {message}")]
    Field {
        row: usize,
        column: String,
        message: String,
    },

    #[error("file contains no frames")]
    NoFrames,

    #[error("odd row count: unpaired row {row}")]
    OddRowCount { row: usize },

    #[error("row {row}: {message}")]
    EyePattern { row: usize, message: String },

    #[error("record {index}: {message}")]
    Record { index: usize, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
