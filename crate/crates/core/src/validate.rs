//! Structural validation of traces: reports every violated invariant with
//! the data row it occurred on instead of failing at the first problem.

use crate::model::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl std::fmt::Display for Severity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Severity::Error => write!(f, "error"),
            Severity::Warning => write!(f, "warning"),
        }
    }
}

/// One validation finding. `row` is the 1-based data-row number in the
/// source file (header line excluded); findings on values that were built in
/// memory carry no row.
#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub severity: Severity,
    pub row: Option<usize>,
    pub message: String,
}

impl Finding {
    pub fn error(row: Option<usize>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            row,
            message: message.into(),
        }
    }

    pub fn warning(row: Option<usize>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            row,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Finding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.row {
            Some(row) => write!(f, "{} at row {}: {}", self.severity, row, self.message),
            None => write!(f, "{}: {}", self.severity, self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn error_count(&self) -> usize {
        self.findings
            .iter()
            .filter(|f| f.severity == Severity::Error)
            .count()
    }

    pub fn warning_count(&self) -> usize {
        self.findings
            .iter()
            .filter(|f| f.severity == Severity::Warning)
            .count()
    }

    pub fn has_errors(&self) -> bool {
        self.error_count() > 0
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.findings.extend(other.findings);
    }
}

/// Thresholds for the data-quality checks.
#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    /// Maximum |norm^2 - 1| of a quaternion as printed in the file before it
    /// is flagged. Six-decimal rounding keeps real recordings within ~1e-5.
    pub quat_norm_tolerance: f64,
    /// Per-component tolerance for the left/right head-orientation match.
    pub orientation_tolerance: f64,
    /// Maximum distance between gaze position and eye position before a
    /// drift warning, in the trace's units.
    pub gaze_drift_threshold: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            quat_norm_tolerance: 1e-3,
            orientation_tolerance: 1e-6,
            gaze_drift_threshold: 0.5,
        }
    }
}

/// Checks every invariant of a parsed (or constructed) trace and reports all
/// violations:
///
/// - non-unit quaternions, judged on the values as printed in the file when
///   the trace was parsed from one (in-memory quaternions are unit by
///   construction);
/// - head-orientation mismatch between the two rows of a frame;
/// - timestamp regressions between consecutive frames;
/// - gaze position drifting away from the eye position (warning only — the
///   two are expected to be close but distinct).
///
/// Eye-index pairing problems are detected while pairing rows during parsing
/// and surface through [`crate::io::ParsedTrace::validate`], which merges
/// them with this report.
pub fn validate_trace(trace: &Trace, opts: &ValidateOptions) -> ValidationReport {
    let mut report = ValidationReport::default();

    for view in trace.eye_views() {
        if let Some(source) = &view.source {
            check_raw_quat(&mut report, source.row, "Quat", &source.quat, opts);
            if let Some(gq) = &source.gaze_quat {
                check_raw_quat(&mut report, source.row, "GazeQ", gq, opts);
            }
        }
        if let Some(gaze) = &view.gaze {
            let drift = gaze.position.distance(view.eye_pose.position);
            if drift > opts.gaze_drift_threshold {
                report.findings.push(Finding::warning(
                    view.source.as_ref().map(|s| s.row),
                    format!(
                        "gaze position drifts {drift:.4} units from the eye position \
                         (threshold {})",
                        opts.gaze_drift_threshold
                    ),
                ));
            }
        }
    }

    for frame in &trace.frames {
        let deviation = frame
            .left
            .eye_pose
            .orientation
            .max_component_deviation(&frame.right.eye_pose.orientation);
        if deviation > opts.orientation_tolerance {
            report.findings.push(Finding::error(
                frame.left.source.as_ref().map(|s| s.row),
                format!(
                    "head quaternion differs between left and right rows \
                     (max component deviation {deviation:e})"
                ),
            ));
        }
    }

    let mut prev: Option<(f64, Option<usize>)> = None;
    for frame in &trace.frames {
        let t = frame.timestamp_ms();
        let row = frame.left.source.as_ref().map(|s| s.row);
        if let Some((prev_t, _)) = prev {
            if t < prev_t {
                report.findings.push(Finding::error(
                    row,
                    format!("timestamp regression: {t} ms after {prev_t} ms"),
                ));
            }
        }
        prev = Some((t, row));
    }

    report
}

fn check_raw_quat(
    report: &mut ValidationReport,
    row: usize,
    label: &str,
    raw: &[String; 4],
    opts: &ValidateOptions,
) {
    let parsed: Vec<f64> = raw.iter().filter_map(|s| s.trim().parse().ok()).collect();
    if parsed.len() != 4 {
        return; // unparseable fields were already rejected during parsing
    }
    let norm_sq: f64 = parsed.iter().map(|c| c * c).sum();
    if (norm_sq - 1.0).abs() > opts.quat_norm_tolerance {
        report.findings.push(Finding::error(
            Some(row),
            format!("non-unit quaternion in {label} columns (squared norm {norm_sq:.6})"),
        ));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{UnitQuat, Vec3};
    use crate::model::{CoordinateSpace, Eye, EyeView, FovAngles, Frame, Pose};

    fn simple_view(eye: Eye, t: f64) -> EyeView {
        EyeView {
            eye,
            fov: FovAngles::symmetric(1.0),
            eye_pose: Pose::identity(CoordinateSpace::VirtualWorld),
            gaze: None,
            timestamp_ms: t,
            source: None,
        }
    }

    fn trace_with_timestamps(ts: &[f64]) -> Trace {
        let frames = ts
            .iter()
            .map(|&t| Frame::new(simple_view(Eye::Left, t), simple_view(Eye::Right, t)).unwrap())
            .collect();
        Trace::new("user1", "truck", frames, CoordinateSpace::VirtualWorld).unwrap()
    }

    #[test]
    fn clean_trace_has_no_findings() {
        let report = validate_trace(
            &trace_with_timestamps(&[0.0, 16.0, 33.0]),
            &ValidateOptions::default(),
        );
        assert!(report.findings.is_empty());
    }

    #[test]
    fn timestamp_regression_is_an_error() {
        let report = validate_trace(
            &trace_with_timestamps(&[0.0, 33.0, 16.0]),
            &ValidateOptions::default(),
        );
        assert_eq!(report.error_count(), 1);
        assert!(report.findings[0].message.contains("regression"));
    }

    #[test]
    fn equal_timestamps_are_accepted() {
        let report = validate_trace(
            &trace_with_timestamps(&[0.0, 0.0, 16.0]),
            &ValidateOptions::default(),
        );
        assert!(!report.has_errors());
    }

    #[test]
    fn mismatched_head_orientation_is_an_error() {
        let mut left = simple_view(Eye::Left, 0.0);
        left.eye_pose.orientation = UnitQuat::new(0.1, 0.0, 0.0, 1.0).unwrap();
        let right = simple_view(Eye::Right, 0.0);
        let frame = Frame::new(left, right).unwrap();
        let trace =
            Trace::new("user1", "truck", vec![frame], CoordinateSpace::VirtualWorld).unwrap();
        let report = validate_trace(&trace, &ValidateOptions::default());
        assert_eq!(report.error_count(), 1);
        assert!(report.findings[0].message.contains("head quaternion"));
    }

    #[test]
    fn gaze_drift_is_a_warning() {
        let mut left = simple_view(Eye::Left, 0.0);
        left.gaze = Some(Pose::new(
            Vec3::new(0.0, 0.0, -1.0),
            UnitQuat::IDENTITY,
            CoordinateSpace::VirtualWorld,
        ));
        let frame = Frame::new(left, simple_view(Eye::Right, 0.0)).unwrap();
        let trace =
            Trace::new("user1", "truck", vec![frame], CoordinateSpace::VirtualWorld).unwrap();
        let report = validate_trace(&trace, &ValidateOptions::default());
        assert_eq!(report.error_count(), 0);
        assert_eq!(report.warning_count(), 1);
        assert!(report.findings[0].message.contains("drift"));
    }
}
