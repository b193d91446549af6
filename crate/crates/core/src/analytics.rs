//! Per-trace and aggregate statistics: frame counts, frame rate, distance
//! traveled in physical meters, trajectory series for plotting, and
//! gaze/head divergence summaries.
//!
//! Distances and trajectories are computed in physical-stage space: traces
//! recorded in virtual-world coordinates are converted back through the
//! scene-initialization transform first, so a meter is a meter regardless of
//! the scene's scale factor.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::Path;

use crate::geometry::{head_pose, undo_scene_init, GeometryError, UnitQuat};
use crate::io::{parse_trace_csv, DatasetIndex, FormatError};
use crate::model::{CoordinateSpace, Pose, Trace};
use crate::replay::ForwardAxis;
use crate::scene::{SceneError, SceneInit, SceneRegistry};

#[derive(Debug, thiserror::Error)]
pub enum AnalyticsError {
    #[error("trace has {n} frames; statistics need at least 2")]
    TooFewFrames { n: usize },

    #[error("trace duration is zero; frame rate is undefined")]
    ZeroDuration,

    #[error("trace has no gaze data")]
    NoGazeData,

    #[error("dataset index is empty")]
    EmptyIndex,

    #[error("site map line {line}: {message}")]
    SiteMap { line: usize, message: String },

    #[error(transparent)]
    Geometry(#[from] GeometryError),

    #[error(transparent)]
    Scene(#[from] SceneError),

    #[error("{path}: {source}")]
    TraceFile {
        path: String,
        #[source]
        source: Box<FormatError>,
    },
}

/// Summary statistics of one trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStats {
    pub n_frames: usize,
    /// Seconds between the first and last left-eye timestamps.
    pub duration_s: f64,
    /// Interval-based rate: (n_frames - 1) / duration_s.
    pub fps: f64,
    /// Polyline length of the head path in stage meters.
    pub distance_m: f64,
    pub mean_speed_mps: f64,
    pub max_speed_mps: f64,
}

/// Stage-space head positions of a trace, one per frame, in meters.
fn stage_head_positions(
    trace: &Trace,
    init: &SceneInit,
) -> Result<Vec<(f64, Pose)>, AnalyticsError> {
    trace
        .frames
        .iter()
        .map(|frame| {
            let head = head_pose(frame)?;
            let stage = match trace.space {
                CoordinateSpace::VirtualWorld => undo_scene_init(&head, init)?,
                CoordinateSpace::PhysicalStage => head,
            };
            Ok((frame.timestamp_ms(), stage))
        })
        .collect()
}

/// Tunables for [`trace_stats_with`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StatsOptions {
    /// Head steps shorter than this (meters) do not accumulate into the
    /// distance — a crude jitter filter. Zero (the default) counts every
    /// step.
    pub min_displacement_m: f64,
}

/// Computes the per-trace statistics. Virtual-world traces are converted to
/// stage meters through `init`; traces already in stage space are used as-is.
pub fn trace_stats(trace: &Trace, init: &SceneInit) -> Result<TraceStats, AnalyticsError> {
    trace_stats_with(trace, init, &StatsOptions::default())
}

pub fn trace_stats_with(
    trace: &Trace,
    init: &SceneInit,
    opts: &StatsOptions,
) -> Result<TraceStats, AnalyticsError> {
    let n = trace.n_frames();
    if n < 2 {
        return Err(AnalyticsError::TooFewFrames { n });
    }
    let heads = stage_head_positions(trace, init)?;
    let duration_s = (heads[n - 1].0 - heads[0].0) / 1000.0;
    if duration_s <= 0.0 {
        return Err(AnalyticsError::ZeroDuration);
    }
    let fps = (n - 1) as f64 / duration_s;

    let mut distance_m = 0.0;
    let mut max_speed_mps: f64 = 0.0;
    for pair in heads.windows(2) {
        let step = pair[1].1.position.distance(pair[0].1.position);
        if step >= opts.min_displacement_m {
            distance_m += step;
        }
        let dt_s = (pair[1].0 - pair[0].0) / 1000.0;
        if dt_s > 0.0 {
            max_speed_mps = max_speed_mps.max(step / dt_s);
        }
    }

    Ok(TraceStats {
        n_frames: n,
        duration_s,
        fps,
        distance_m,
        mean_speed_mps: distance_m / duration_s,
        max_speed_mps,
    })
}

/// Extent of the physical play area used for out-of-stage warnings: a square
/// of `half_extent` meters around (`center_x`, `center_z`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageExtent {
    pub center_x: f64,
    pub center_z: f64,
    pub half_extent: f64,
}

impl Default for StageExtent {
    /// The 3 m x 3 m tracked area the dataset was collected in.
    fn default() -> Self {
        Self {
            center_x: 0.0,
            center_z: 0.0,
            half_extent: 1.5,
        }
    }
}

/// Plot-ready head trajectory: the horizontal path and the height series,
/// both in stage meters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySeries {
    /// Per-frame (timestamp ms, x, z).
    pub horizontal: Vec<(f64, f64, f64)>,
    /// Per-frame (timestamp ms, y).
    pub height: Vec<(f64, f64)>,
    /// One message per point that falls outside the stage extent.
    pub warnings: Vec<String>,
}

/// Splits the stage-space head path into an XZ series and a height series.
pub fn trajectory_export(
    trace: &Trace,
    init: &SceneInit,
    extent: &StageExtent,
) -> Result<TrajectorySeries, AnalyticsError> {
    let heads = stage_head_positions(trace, init)?;
    let mut series = TrajectorySeries {
        horizontal: Vec::with_capacity(heads.len()),
        height: Vec::with_capacity(heads.len()),
        warnings: Vec::new(),
    };
    for (i, (t_ms, pose)) in heads.iter().enumerate() {
        let p = pose.position;
        series.horizontal.push((*t_ms, p.x, p.z));
        series.height.push((*t_ms, p.y));
        if (p.x - extent.center_x).abs() > extent.half_extent
            || (p.z - extent.center_z).abs() > extent.half_extent
        {
            series.warnings.push(format!(
                "frame {i}: head at ({:.3}, {:.3}) m is outside the {:.1} m stage extent",
                p.x,
                p.z,
                extent.half_extent * 2.0
            ));
        }
    }
    Ok(series)
}

/// Gaze/head angular divergence of a trace, degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct GazeDivergence {
    /// Per-frame (timestamp ms, angle averaged over the two eyes).
    pub per_frame_deg: Vec<(f64, f64)>,
    pub mean_deg: f64,
    /// 95th percentile, nearest-rank.
    pub p95_deg: f64,
}

fn forward_angle_deg(head: &UnitQuat, gaze: &UnitQuat, forward: ForwardAxis) -> f64 {
    let f = forward.vector();
    let dot = head.rotate(f).dot(gaze.rotate(f));
    dot.clamp(-1.0, 1.0).acos().to_degrees()
}

/// Per-frame angle between the head-forward and gaze-forward rays, averaged
/// over the two eyes, with mean and p95 summaries.
pub fn gaze_divergence(
    trace: &Trace,
    forward: ForwardAxis,
) -> Result<GazeDivergence, AnalyticsError> {
    if !trace.has_gaze() {
        return Err(AnalyticsError::NoGazeData);
    }
    let mut per_frame = Vec::with_capacity(trace.n_frames());
    for frame in &trace.frames {
        let mut sum = 0.0;
        for view in [&frame.left, &frame.right] {
            let gaze = view.gaze.as_ref().expect("has_gaze checked");
            sum += forward_angle_deg(&view.eye_pose.orientation, &gaze.orientation, forward);
        }
        per_frame.push((frame.timestamp_ms(), sum / 2.0));
    }
    let mean_deg = per_frame.iter().map(|(_, a)| a).sum::<f64>() / per_frame.len() as f64;
    let mut sorted: Vec<f64> = per_frame.iter().map(|(_, a)| *a).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("angles are finite"));
    let rank = ((0.95 * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    let p95_deg = sorted[rank - 1];
    Ok(GazeDivergence {
        per_frame_deg: per_frame,
        mean_deg,
        p95_deg,
    })
}

/// Maps user ids to collection-site labels, read from a two-column CSV
/// sidecar (`user,site` header, one `user101,RU` row per user).
#[derive(Debug, Clone, Default)]
pub struct SiteMap {
    entries: BTreeMap<String, String>,
}

impl SiteMap {
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self, AnalyticsError> {
        let mut entries = BTreeMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| AnalyticsError::SiteMap {
                line: i + 1,
                message: e.to_string(),
            })?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (user, site) = line
                .split_once(',')
                .ok_or_else(|| AnalyticsError::SiteMap {
                    line: i + 1,
                    message: "expected two comma-separated fields".to_string(),
                })?;
            let (user, site) = (user.trim(), site.trim());
            if i == 0 && user.eq_ignore_ascii_case("user") && site.eq_ignore_ascii_case("site") {
                continue; // header row
            }
            entries.insert(user.to_string(), site.to_string());
        }
        Ok(Self { entries })
    }

    pub fn site_of(&self, user_id: &str) -> Option<&str> {
        self.entries.get(user_id).map(String::as_str)
    }
}

/// Mean statistics of a group of traces (a scene, a site, or a site-scene
/// pair). Means are per-trace means of means.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    pub site: Option<String>,
    pub scene: Option<String>,
    pub n_traces: usize,
    pub mean_frames: f64,
    pub mean_fps: f64,
    pub mean_distance_m: f64,
    pub mean_duration_s: f64,
}

fn group_of(label: (Option<String>, Option<String>), stats: &[TraceStats]) -> GroupStats {
    let n = stats.len() as f64;
    GroupStats {
        site: label.0,
        scene: label.1,
        n_traces: stats.len(),
        mean_frames: stats.iter().map(|s| s.n_frames as f64).sum::<f64>() / n,
        mean_fps: stats.iter().map(|s| s.fps).sum::<f64>() / n,
        mean_distance_m: stats.iter().map(|s| s.distance_m).sum::<f64>() / n,
        mean_duration_s: stats.iter().map(|s| s.duration_s).sum::<f64>() / n,
    }
}

/// Dataset-wide aggregation, grouped by scene, by site, and by site-scene
/// pair. Site groups are present only when a site map is supplied.
#[derive(Debug, Clone, Default)]
pub struct AggregateReport {
    pub per_scene: Vec<GroupStats>,
    pub per_site: Vec<GroupStats>,
    pub per_site_scene: Vec<GroupStats>,
    pub overall: Option<GroupStats>,
}

/// Parses every indexed trace, computes its statistics against the scene
/// registry, and aggregates them. Scenes missing from the registry are an
/// error: statistics are only meaningful in calibrated meters.
pub fn aggregate_stats(
    index: &DatasetIndex,
    registry: &SceneRegistry,
    sites: Option<&SiteMap>,
) -> Result<AggregateReport, AnalyticsError> {
    if index.is_empty() {
        return Err(AnalyticsError::EmptyIndex);
    }

    let mut by_scene: BTreeMap<String, Vec<TraceStats>> = BTreeMap::new();
    let mut by_site: BTreeMap<String, Vec<TraceStats>> = BTreeMap::new();
    let mut by_site_scene: BTreeMap<(String, String), Vec<TraceStats>> = BTreeMap::new();
    let mut all = Vec::new();

    for entry in &index.entries {
        let init = registry.get(&entry.scene_id)?;
        let stats = stats_for_file(&entry.path, &entry.user_id, &entry.scene_id, init)?;
        by_scene
            .entry(entry.scene_id.clone())
            .or_default()
            .push(stats);
        if let Some(sites) = sites {
            if let Some(site) = sites.site_of(&entry.user_id) {
                by_site.entry(site.to_string()).or_default().push(stats);
                by_site_scene
                    .entry((site.to_string(), entry.scene_id.clone()))
                    .or_default()
                    .push(stats);
            }
        }
        all.push(stats);
    }

    Ok(AggregateReport {
        per_scene: by_scene
            .into_iter()
            .map(|(scene, stats)| group_of((None, Some(scene)), &stats))
            .collect(),
        per_site: by_site
            .into_iter()
            .map(|(site, stats)| group_of((Some(site), None), &stats))
            .collect(),
        per_site_scene: by_site_scene
            .into_iter()
            .map(|((site, scene), stats)| group_of((Some(site), Some(scene)), &stats))
            .collect(),
        overall: Some(group_of((None, None), &all)),
    })
}

fn stats_for_file(
    path: &Path,
    user_id: &str,
    scene_id: &str,
    init: &SceneInit,
) -> Result<TraceStats, AnalyticsError> {
    let file = std::fs::File::open(path).map_err(|e| AnalyticsError::TraceFile {
        path: path.display().to_string(),
        source: Box::new(FormatError::Io(e)),
    })?;
    let parsed =
        parse_trace_csv(std::io::BufReader::new(file), user_id, scene_id).map_err(|e| {
            AnalyticsError::TraceFile {
                path: path.display().to_string(),
                source: Box::new(e),
            }
        })?;
    trace_stats(&parsed.trace, init)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::scene_registry;
    use crate::synth::{generate_trace, MotionSpec};
    use approx::assert_relative_eq;

    fn identity_init() -> SceneInit {
        SceneInit::identity()
    }

    #[test]
    fn circle_distance_matches_arc_length() {
        let trace = generate_trace(
            &MotionSpec::circle(1.0, 2.0, 60.0, 60.0),
            "u1",
            "synthetic",
            None,
        )
        .unwrap();
        let stats = trace_stats(&trace, &identity_init()).unwrap();
        assert_eq!(stats.n_frames, 3600);
        assert_eq!(stats.fps, 60.0);
        let arc = 4.0 * std::f64::consts::PI;
        assert!(
            (stats.distance_m - arc).abs() / arc < 0.001,
            "distance {} vs arc {arc}",
            stats.distance_m
        );
    }

    #[test]
    fn stationary_trace_travels_zero_meters() {
        let trace =
            generate_trace(&MotionSpec::stationary(10.0, 30.0), "u1", "synthetic", None).unwrap();
        let stats = trace_stats(&trace, &identity_init()).unwrap();
        assert_eq!(stats.distance_m, 0.0);
        assert_eq!(stats.mean_speed_mps, 0.0);
        assert_eq!(stats.max_speed_mps, 0.0);
    }

    #[test]
    fn min_displacement_filters_jitter_steps() {
        let trace = generate_trace(
            &MotionSpec::circle(1.0, 2.0, 60.0, 60.0),
            "u1",
            "synthetic",
            None,
        )
        .unwrap();
        // per-step chord is ~3.5 mm at this sampling rate; a 1 cm floor
        // removes the whole path, a 1 mm floor keeps it
        let filtered = trace_stats_with(
            &trace,
            &identity_init(),
            &StatsOptions {
                min_displacement_m: 0.01,
            },
        )
        .unwrap();
        assert_eq!(filtered.distance_m, 0.0);
        let kept = trace_stats_with(
            &trace,
            &identity_init(),
            &StatsOptions {
                min_displacement_m: 0.001,
            },
        )
        .unwrap();
        assert!(kept.distance_m > 12.0);
    }

    #[test]
    fn virtual_and_stage_traces_agree_after_conversion() {
        let reg = scene_registry();
        let treehill = reg.get("treehill").unwrap(); // large scale factor
        let spec = MotionSpec::circle(1.0, 1.0, 10.0, 30.0);
        let stage = generate_trace(&spec, "u1", "treehill", None).unwrap();
        let virt = generate_trace(&spec, "u1", "treehill", Some(treehill)).unwrap();
        let s1 = trace_stats(&stage, &identity_init()).unwrap();
        let s2 = trace_stats(&virt, treehill).unwrap();
        assert_relative_eq!(s1.distance_m, s2.distance_m, epsilon = 1e-9);
        assert_eq!(s1.fps, s2.fps);
    }

    #[test]
    fn polyline_distance_converges_from_below() {
        let arc = 4.0 * std::f64::consts::PI;
        let mut last = 0.0;
        for fps in [30.0, 60.0, 120.0] {
            let trace = generate_trace(
                &MotionSpec::circle(1.0, 2.0, 60.0, fps),
                "u1",
                "synthetic",
                None,
            )
            .unwrap();
            let d = trace_stats(&trace, &identity_init()).unwrap().distance_m;
            assert!(d <= arc, "polyline must not exceed the arc");
            assert!(d > last, "finer sampling must get closer to the arc");
            last = d;
        }
        assert!((arc - last) / arc < 1e-4);
    }

    #[test]
    fn too_few_frames_is_an_error() {
        let trace =
            generate_trace(&MotionSpec::stationary(10.0, 30.0), "u1", "synthetic", None).unwrap();
        let single = Trace::new(
            "u1",
            "synthetic",
            vec![trace.frames[0].clone()],
            trace.space,
        )
        .unwrap();
        assert!(matches!(
            trace_stats(&single, &identity_init()),
            Err(AnalyticsError::TooFewFrames { n: 1 })
        ));
    }

    #[test]
    fn circular_walk_exports_unit_circle_trajectory() {
        let trace = generate_trace(
            &MotionSpec::circle(1.0, 1.0, 10.0, 30.0),
            "u1",
            "synthetic",
            None,
        )
        .unwrap();
        let series = trajectory_export(&trace, &identity_init(), &StageExtent::default()).unwrap();
        assert_eq!(series.horizontal.len(), trace.n_frames());
        for (_, x, z) in &series.horizontal {
            assert_relative_eq!((x * x + z * z).sqrt(), 1.0, epsilon = 1e-9);
        }
        // radius 1 m stays inside the 3 m x 3 m stage
        assert!(series.warnings.is_empty());
    }

    #[test]
    fn constant_height_series_is_constant() {
        let trace =
            generate_trace(&MotionSpec::stationary(5.0, 20.0), "u1", "synthetic", None).unwrap();
        let series = trajectory_export(&trace, &identity_init(), &StageExtent::default()).unwrap();
        assert!(series.height.iter().all(|(_, y)| *y == series.height[0].1));
    }

    #[test]
    fn out_of_stage_point_warns() {
        let spec = MotionSpec {
            path: crate::synth::PathSpec::Line {
                from: [0.0, 0.0],
                to: [5.0, 0.0],
            },
            ..MotionSpec::stationary(10.0, 10.0)
        };
        let trace = generate_trace(&spec, "u1", "synthetic", None).unwrap();
        let series = trajectory_export(&trace, &identity_init(), &StageExtent::default()).unwrap();
        assert!(!series.warnings.is_empty());
        assert!(series.warnings[0].contains("outside"));
    }

    #[test]
    fn aligned_gaze_has_zero_divergence() {
        let trace =
            generate_trace(&MotionSpec::stationary(5.0, 20.0), "u1", "synthetic", None).unwrap();
        let div = gaze_divergence(&trace, ForwardAxis::NegZ).unwrap();
        assert_eq!(div.mean_deg, 0.0);
        assert_eq!(div.p95_deg, 0.0);
    }

    #[test]
    fn constructed_yaw_offset_is_recovered() {
        let spec = MotionSpec {
            gaze_offset_deg: 10.0,
            ..MotionSpec::circle(1.0, 1.0, 5.0, 20.0)
        };
        let trace = generate_trace(&spec, "u1", "synthetic", None).unwrap();
        let div = gaze_divergence(&trace, ForwardAxis::NegZ).unwrap();
        assert_relative_eq!(div.mean_deg, 10.0, epsilon = 1e-6);
        assert_relative_eq!(div.p95_deg, 10.0, epsilon = 1e-6);
    }

    #[test]
    fn recorded_sample_divergence_matches_matrix_oracle() {
        use crate::geometry::Mat4;
        let head = UnitQuat::new(0.494687, 0.294258, 0.123821, 0.808310).unwrap();
        let gaze = UnitQuat::new(0.250753, 0.0845578, 0.0237413, 0.964059).unwrap();
        let angle = forward_angle_deg(&head, &gaze, ForwardAxis::NegZ);

        // oracle: rotate the forward axis by each rotation matrix and take
        // the angle between the results
        let f = crate::geometry::Vec3::new(0.0, 0.0, -1.0);
        let a = Mat4::from_quat(&head).transform_vector(f);
        let b = Mat4::from_quat(&gaze).transform_vector(f);
        let oracle = a.dot(b).clamp(-1.0, 1.0).acos().to_degrees();
        assert_relative_eq!(angle, oracle, epsilon = 1e-12);
        assert_relative_eq!(angle, 41.98727015351322, epsilon = 1e-9);
    }

    #[test]
    fn divergence_requires_gaze() {
        let mut trace =
            generate_trace(&MotionSpec::stationary(5.0, 20.0), "u1", "synthetic", None).unwrap();
        for frame in &mut trace.frames {
            frame.left.gaze = None;
            frame.right.gaze = None;
        }
        assert!(matches!(
            gaze_divergence(&trace, ForwardAxis::NegZ),
            Err(AnalyticsError::NoGazeData)
        ));
    }

    #[test]
    fn divergence_is_invariant_under_global_rotation() {
        let spec = MotionSpec {
            gaze_offset_deg: 7.5,
            ..MotionSpec::circle(1.0, 1.0, 5.0, 20.0)
        };
        let mut trace = generate_trace(&spec, "u1", "synthetic", None).unwrap();
        let before = gaze_divergence(&trace, ForwardAxis::NegZ).unwrap();
        let g = UnitQuat::new(0.3, -0.5, 0.2, 0.79).unwrap();
        for frame in &mut trace.frames {
            for view in [&mut frame.left, &mut frame.right] {
                view.eye_pose.orientation = g * view.eye_pose.orientation;
                if let Some(gaze) = &mut view.gaze {
                    gaze.orientation = g * gaze.orientation;
                }
            }
        }
        let after = gaze_divergence(&trace, ForwardAxis::NegZ).unwrap();
        assert_relative_eq!(before.mean_deg, after.mean_deg, epsilon = 1e-9);
    }

    #[test]
    fn site_map_parses_header_and_rows() {
        let text = "user,site\nuser101,RU\nuser201,NTHU\n";
        let map = SiteMap::from_reader(text.as_bytes()).unwrap();
        assert_eq!(map.site_of("user101"), Some("RU"));
        assert_eq!(map.site_of("user201"), Some("NTHU"));
        assert_eq!(map.site_of("user999"), None);
    }
}
