//! Reading and writing the trace CSV format.
//!
//! One data row per eye per frame, twenty columns. Column order is resolved
//! from the header, not assumed, because published material prints the gaze
//! columns in two different orders. The writer always emits the canonical
//! order below. Original field text is retained on parse so an unmodified
//! trace writes back byte-for-byte.

use std::io::{BufRead, Write};

use super::FormatError;
use crate::geometry::{UnitQuat, Vec3};
use crate::model::{CoordinateSpace, Eye, EyeView, FovAngles, Frame, Pose, RowSource, Trace};
use crate::validate::{validate_trace, Finding, ValidateOptions, ValidationReport};

/// Canonical header, in writing order.
pub const CANONICAL_HEADER: &str = "ViewIndex,FOV1,FOV2,FOV3,FOV4,\
Pos_X,Pos_Y,Pos_Z,Quat_X,Quat_Y,Quat_Z,Quat_W,\
GazePos_X,GazePos_Y,GazePos_Z,GazeQ_X,GazeQ_Y,GazeQ_Z,GazeQ_W,Timestamp";

/// Canonical header for traces without gaze data.
pub const CANONICAL_HEADER_NO_GAZE: &str = "ViewIndex,FOV1,FOV2,FOV3,FOV4,\
Pos_X,Pos_Y,Pos_Z,Quat_X,Quat_Y,Quat_Z,Quat_W,Timestamp";

/// The twenty logical columns of a trace file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    ViewIndex,
    Fov(usize),     // 0..4
    Pos(usize),     // 0..3
    Quat(usize),    // 0..4
    GazePos(usize), // 0..3
    GazeQuat(usize),
    Timestamp,
}

impl Column {
    fn name(self) -> String {
        const XYZW: [&str; 4] = ["X", "Y", "Z", "W"];
        match self {
            Column::ViewIndex => "ViewIndex".to_string(),
            Column::Fov(i) => format!("FOV{}", i + 1),
            Column::Pos(i) => format!("Pos_{}", XYZW[i]),
            Column::Quat(i) => format!("Quat_{}", XYZW[i]),
            Column::GazePos(i) => format!("GazePos_{}", XYZW[i]),
            Column::GazeQuat(i) => format!("GazeQ_{}", XYZW[i]),
            Column::Timestamp => "Timestamp".to_string(),
        }
    }
}

/// Normalizes a header cell: lowercase, alphanumerics only. "Pos X", "pos_x"
/// and "Pos-X" all resolve to the same column.
fn normalize_header_cell(cell: &str) -> String {
    cell.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

fn resolve_column(normalized: &str) -> Option<Column> {
    let axis = |s: &str| -> Option<usize> {
        match s {
            "x" => Some(0),
            "y" => Some(1),
            "z" => Some(2),
            "w" => Some(3),
            _ => None,
        }
    };
    match normalized {
        "viewindex" | "view" | "eye" => return Some(Column::ViewIndex),
        "timestamp" | "timestampms" | "time" => return Some(Column::Timestamp),
        _ => {}
    }
    if let Some(rest) = normalized.strip_prefix("fov") {
        let rest = rest.strip_suffix("rad").unwrap_or(rest);
        if let Ok(n @ 1..=4) = rest.parse::<usize>() {
            return Some(Column::Fov(n - 1));
        }
    }
    for (prefixes, make) in [
        (
            &["gazepos", "gazeposition"][..],
            Column::GazePos as fn(usize) -> Column,
        ),
        (
            &["gazeq", "gazequat", "gazequaternion"][..],
            Column::GazeQuat,
        ),
        (&["pos", "position"][..], Column::Pos),
        (&["quat", "quaternion"][..], Column::Quat),
    ] {
        for prefix in prefixes {
            if let Some(rest) = normalized.strip_prefix(prefix) {
                if let Some(i) = axis(rest) {
                    // positions have no W component
                    if matches!(make(0), Column::Pos(_) | Column::GazePos(_)) && i == 3 {
                        return None;
                    }
                    return Some(make(i));
                }
            }
        }
    }
    None
}

/// Header layout: where each logical column sits in a data row.
#[derive(Debug)]
struct HeaderMap {
    slots: Vec<Column>,
    has_gaze: bool,
}

fn parse_header(line: &str) -> Result<HeaderMap, FormatError> {
    let mut slots = Vec::new();
    let mut seen = Vec::new();
    for raw_cell in line.split(',') {
        let cell = raw_cell.trim();
        let column = resolve_column(&normalize_header_cell(cell)).ok_or_else(|| {
            FormatError::UnknownColumn {
                name: cell.to_string(),
            }
        })?;
        if seen.contains(&column) {
            return Err(FormatError::DuplicateColumn {
                name: column.name(),
            });
        }
        seen.push(column);
        slots.push(column);
    }

    let require = |col: Column| -> Result<(), FormatError> {
        if seen.contains(&col) {
            Ok(())
        } else {
            Err(FormatError::MissingColumn { name: col.name() })
        }
    };
    require(Column::ViewIndex)?;
    require(Column::Timestamp)?;
    for i in 0..4 {
        require(Column::Fov(i))?;
        require(Column::Quat(i))?;
    }
    for i in 0..3 {
        require(Column::Pos(i))?;
    }

    // Gaze columns are optional (headsets without eye tracking), but must be
    // all-or-nothing.
    let gaze_count = seen
        .iter()
        .filter(|c| matches!(c, Column::GazePos(_) | Column::GazeQuat(_)))
        .count();
    let has_gaze = match gaze_count {
        0 => false,
        7 => true,
        _ => {
            return Err(FormatError::MissingColumn {
                name: "complete GazePos_*/GazeQ_* set".to_string(),
            })
        }
    };

    Ok(HeaderMap { slots, has_gaze })
}

/// One data row split into its logical fields, still as text.
struct RawRowFields {
    row: usize,
    view_index: String,
    fov: [String; 4],
    pos: [String; 3],
    quat: [String; 4],
    gaze_pos: Option<[String; 3]>,
    gaze_quat: Option<[String; 4]>,
    timestamp: String,
}

fn split_row(header: &HeaderMap, row: usize, line: &str) -> Result<RawRowFields, FormatError> {
    let cells: Vec<&str> = line.split(',').collect();
    if cells.len() != header.slots.len() {
        return Err(FormatError::FieldCount {
            row,
            expected: header.slots.len(),
            actual: cells.len(),
        });
    }
    let empty = || std::array::from_fn(|_| String::new());
    let mut fields = RawRowFields {
        row,
        view_index: String::new(),
        fov: empty(),
        pos: std::array::from_fn(|_| String::new()),
        quat: empty(),
        gaze_pos: header
            .has_gaze
            .then(|| std::array::from_fn(|_| String::new())),
        gaze_quat: header.has_gaze.then(empty),
        timestamp: String::new(),
    };
    for (slot, cell) in header.slots.iter().zip(cells) {
        let text = cell.trim().to_string();
        match slot {
            Column::ViewIndex => fields.view_index = text,
            Column::Fov(i) => fields.fov[*i] = text,
            Column::Pos(i) => fields.pos[*i] = text,
            Column::Quat(i) => fields.quat[*i] = text,
            Column::GazePos(i) => fields.gaze_pos.as_mut().unwrap()[*i] = text,
            Column::GazeQuat(i) => fields.gaze_quat.as_mut().unwrap()[*i] = text,
            Column::Timestamp => fields.timestamp = text,
        }
    }
    Ok(fields)
}

fn parse_field(row: usize, column: Column, text: &str) -> Result<f64, FormatError> {
    let value: f64 = text.parse().map_err(|_| FormatError::Field {
        row,
        column: column.name(),
        message: format!("not a number: \"{text}\""),
    })?;
    if !value.is_finite() {
        return Err(FormatError::Field {
            row,
            column: column.name(),
            message: format!("non-finite value: \"{text}\""),
        });
    }
    Ok(value)
}

fn view_from_fields(fields: RawRowFields) -> Result<EyeView, FormatError> {
    let row = fields.row;
    let eye_index: u8 = fields
        .view_index
        .parse()
        .ok()
        .filter(|i| *i <= 1)
        .ok_or_else(|| FormatError::Field {
            row,
            column: Column::ViewIndex.name(),
            message: format!("eye index must be 0 or 1, got \"{}\"", fields.view_index),
        })?;
    let eye = Eye::from_index(eye_index).unwrap();

    let mut fov = [0.0; 4];
    for (i, (out, text)) in fov.iter_mut().zip(&fields.fov).enumerate() {
        *out = parse_field(row, Column::Fov(i), text)?;
    }
    let mut pos = [0.0; 3];
    for (i, (out, text)) in pos.iter_mut().zip(&fields.pos).enumerate() {
        *out = parse_field(row, Column::Pos(i), text)?;
    }
    let mut quat = [0.0; 4];
    for (i, (out, text)) in quat.iter_mut().zip(&fields.quat).enumerate() {
        *out = parse_field(row, Column::Quat(i), text)?;
    }
    let orientation =
        UnitQuat::new(quat[0], quat[1], quat[2], quat[3]).map_err(|e| FormatError::Field {
            row,
            column: "Quat_*".to_string(),
            message: e.to_string(),
        })?;

    let gaze = match (&fields.gaze_pos, &fields.gaze_quat) {
        (Some(gp), Some(gq)) => {
            let mut p = [0.0; 3];
            for (i, (out, text)) in p.iter_mut().zip(gp).enumerate() {
                *out = parse_field(row, Column::GazePos(i), text)?;
            }
            let mut q = [0.0; 4];
            for (i, (out, text)) in q.iter_mut().zip(gq).enumerate() {
                *out = parse_field(row, Column::GazeQuat(i), text)?;
            }
            let gaze_orientation =
                UnitQuat::new(q[0], q[1], q[2], q[3]).map_err(|e| FormatError::Field {
                    row,
                    column: "GazeQ_*".to_string(),
                    message: e.to_string(),
                })?;
            Some(Pose::new(
                Vec3::new(p[0], p[1], p[2]),
                gaze_orientation,
                CoordinateSpace::VirtualWorld,
            ))
        }
        _ => None,
    };

    let timestamp_ms = parse_field(row, Column::Timestamp, &fields.timestamp)?;
    if timestamp_ms < 0.0 {
        return Err(FormatError::Field {
            row,
            column: Column::Timestamp.name(),
            message: format!("negative timestamp: {timestamp_ms}"),
        });
    }

    Ok(EyeView {
        eye,
        fov: FovAngles::new(fov[0], fov[1], fov[2], fov[3]),
        eye_pose: Pose::new(
            Vec3::new(pos[0], pos[1], pos[2]),
            orientation,
            CoordinateSpace::VirtualWorld,
        ),
        gaze,
        timestamp_ms,
        source: Some(RowSource {
            row,
            view_index: fields.view_index,
            fov: fields.fov,
            pos: fields.pos,
            quat: fields.quat,
            gaze_pos: fields.gaze_pos,
            gaze_quat: fields.gaze_quat,
            timestamp: fields.timestamp,
        }),
    })
}

/// A parsed trace together with the findings produced while pairing rows.
/// Rows that could not be paired are dropped from the trace but recorded
/// here, so no problem is silently swallowed.
#[derive(Debug, Clone)]
pub struct ParsedTrace {
    pub trace: Trace,
    pub findings: Vec<Finding>,
}

impl ParsedTrace {
    /// Full validation: pairing findings merged with the invariant checks of
    /// [`validate_trace`].
    pub fn validate(&self, opts: &ValidateOptions) -> ValidationReport {
        let mut report = ValidationReport {
            findings: self.findings.clone(),
        };
        report.extend(validate_trace(&self.trace, opts));
        report
    }

    /// Consumes the outcome, requiring a trace with no pairing problems.
    /// In this strict reading even the trailing unpaired row (a warning in
    /// lenient mode) rejects the file, as an odd-row-count error.
    pub fn into_strict(self) -> Result<Trace, FormatError> {
        if let Some(first) = self.findings.first() {
            let row = first.row.unwrap_or(0);
            return Err(match first.severity {
                crate::validate::Severity::Warning => FormatError::OddRowCount { row },
                crate::validate::Severity::Error => FormatError::EyePattern {
                    row,
                    message: first.message.clone(),
                },
            });
        }
        Ok(self.trace)
    }
}

/// Parses a trace file. Rows are paired into frames by the strict
/// (left, right) eye-index pattern; rows that break the pattern are dropped
/// with an error-severity finding (mid-stream breaks) or a warning (a
/// trailing unpaired left row). Lines starting with `#` are provenance
/// comments and skipped.
///
/// Structural problems that prevent interpreting the file at all — bad
/// header, non-numeric fields, no frames — are hard errors.
pub fn parse_trace_csv<R: BufRead>(
    reader: R,
    user_id: &str,
    scene_id: &str,
) -> Result<ParsedTrace, FormatError> {
    let mut lines = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line).to_string();
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        lines.push(line);
    }
    let mut it = lines.into_iter();
    let header_line = it.next().ok_or(FormatError::NoFrames)?;
    let header = parse_header(&header_line)?;

    let mut views = Vec::new();
    for (i, line) in it.enumerate() {
        let row = i + 1; // 1-based data rows, header excluded
        views.push(view_from_fields(split_row(&header, row, &line)?)?);
    }

    let mut findings = Vec::new();
    let mut frames = Vec::new();
    let mut pending: Option<EyeView> = None;
    for view in views {
        match (&pending, view.eye) {
            (None, Eye::Left) => pending = Some(view),
            (None, Eye::Right) => {
                findings.push(Finding::error(
                    view.source.as_ref().map(|s| s.row),
                    "eye-index pairing broken: right-eye row without a preceding left-eye row"
                        .to_string(),
                ));
            }
            (Some(_), Eye::Left) => {
                let current_row = view.source.as_ref().map(|s| s.row);
                let dropped = pending.replace(view).unwrap();
                findings.push(Finding::error(
                    current_row,
                    format!(
                        "eye-index pairing broken: expected a right-eye row to pair with row {}, \
                         found another left-eye row (row {} dropped)",
                        dropped.source.as_ref().map(|s| s.row).unwrap_or(0),
                        dropped.source.as_ref().map(|s| s.row).unwrap_or(0),
                    ),
                ));
            }
            (Some(_), Eye::Right) => {
                let left = pending.take().unwrap();
                frames.push(Frame::new(left, view).expect("pattern guarantees eye order"));
            }
        }
    }
    if let Some(trailing) = pending {
        findings.push(Finding::warning(
            trailing.source.as_ref().map(|s| s.row),
            "odd row count: trailing unpaired left-eye row dropped".to_string(),
        ));
    }

    let trace = Trace::new(user_id, scene_id, frames, CoordinateSpace::VirtualWorld)
        .map_err(|_| FormatError::NoFrames)?;
    Ok(ParsedTrace { trace, findings })
}

/// Formats an f64 as the shortest string that parses back to the identical
/// value, so writing never loses precision.
pub fn format_value(v: f64) -> String {
    format!("{v}")
}

fn field_text(source: Option<&String>, value: f64) -> String {
    // Reuse the original text when it still denotes the in-memory value, so
    // trailing zeros and exponent styles survive a read/write cycle.
    if let Some(text) = source {
        if text.parse::<f64>().map(|p| p == value).unwrap_or(false) {
            return text.clone();
        }
    }
    format_value(value)
}

/// Writes a trace in canonical column order, two rows per frame. Views that
/// were parsed from a file keep their original field text; everything else
/// is written with shortest round-trip formatting. Gaze columns are included
/// only when every view carries gaze data.
pub fn write_trace_csv<W: Write>(trace: &Trace, mut out: W) -> Result<(), FormatError> {
    let with_gaze = trace.has_gaze();
    writeln!(
        out,
        "{}",
        if with_gaze {
            CANONICAL_HEADER
        } else {
            CANONICAL_HEADER_NO_GAZE
        }
    )?;
    for frame in &trace.frames {
        for view in [&frame.left, &frame.right] {
            write_row(view, with_gaze, &mut out)?;
        }
    }
    Ok(())
}

fn write_row<W: Write>(view: &EyeView, with_gaze: bool, out: &mut W) -> Result<(), FormatError> {
    let src = view.source.as_ref();
    let mut cells: Vec<String> = Vec::with_capacity(20);
    cells.push(view.eye.index().to_string());
    for (i, value) in view.fov.as_array().into_iter().enumerate() {
        cells.push(field_text(src.map(|s| &s.fov[i]), value));
    }
    let pos: [f64; 3] = view.eye_pose.position.into();
    for (i, value) in pos.into_iter().enumerate() {
        cells.push(field_text(src.map(|s| &s.pos[i]), value));
    }
    // Quaternions are normalized in memory; emit the original text whenever
    // it normalizes to the same orientation, otherwise the normalized values.
    let quat = view.eye_pose.orientation.as_xyzw();
    let raw_quat_matches = src
        .and_then(|s| raw_quat_value(&s.quat))
        .map(|q| q == view.eye_pose.orientation)
        .unwrap_or(false);
    for (i, q) in quat.iter().enumerate() {
        if raw_quat_matches {
            cells.push(src.unwrap().quat[i].clone());
        } else {
            cells.push(format_value(*q));
        }
    }
    if with_gaze {
        let gaze = view.gaze.as_ref().expect("writer checked has_gaze");
        let gp: [f64; 3] = gaze.position.into();
        for (i, value) in gp.into_iter().enumerate() {
            cells.push(field_text(
                src.and_then(|s| s.gaze_pos.as_ref()).map(|g| &g[i]),
                value,
            ));
        }
        let gq = gaze.orientation.as_xyzw();
        let raw_gaze_matches = src
            .and_then(|s| s.gaze_quat.as_ref())
            .and_then(raw_quat_value)
            .map(|q| q == gaze.orientation)
            .unwrap_or(false);
        for (i, q) in gq.iter().enumerate() {
            if raw_gaze_matches {
                cells.push(src.unwrap().gaze_quat.as_ref().unwrap()[i].clone());
            } else {
                cells.push(format_value(*q));
            }
        }
    }
    cells.push(field_text(src.map(|s| &s.timestamp), view.timestamp_ms));
    writeln!(out, "{}", cells.join(","))?;
    Ok(())
}

fn raw_quat_value(raw: &[String; 4]) -> Option<UnitQuat> {
    let mut c = [0.0; 4];
    for (i, s) in raw.iter().enumerate() {
        c[i] = s.parse().ok()?;
    }
    UnitQuat::new(c[0], c[1], c[2], c[3]).ok()
}

/// Convenience: renders the whole trace to a string.
pub fn trace_to_csv_string(trace: &Trace) -> String {
    let mut buf = Vec::new();
    write_trace_csv(trace, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("trace text is UTF-8")
}
