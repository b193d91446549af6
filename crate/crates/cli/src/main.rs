//! Command-line tools for 6-DoF navigation traces: validation, format
//! conversion, stage/virtual space transforms, statistics, replay camera
//! export, gaze-pixel projection, synthetic trace generation, and plot data.
//!
//! Exit codes: 0 success, 1 invalid trace data, 2 I/O error, 3 bad arguments.

use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use navtrace::analytics::{
    aggregate_stats, gaze_divergence, trace_stats_with, trajectory_export, GroupStats, SiteMap,
    StageExtent, StatsOptions, TraceStats,
};
use navtrace::geometry::{trace_to_stage, trace_to_virtual, ScaleDirection};
use navtrace::io::{
    csv_to_json, json_to_csv, parse_trace_csv, parse_trace_filename, scan_dataset, write_trace_csv,
    CameraPathDocument, FormatError, ParsedTrace,
};
use navtrace::model::{CoordinateSpace, Trace};
use navtrace::replay::{camera_stream, gaze_pixel, ForwardAxis, ImageSize};
use navtrace::scene::{scene_registry, SceneError, SceneInit};
use navtrace::synth::{generate_trace, HeightProfile, MotionSpec, PathSpec};
use navtrace::validate::{Severity, ValidateOptions};

/// Environment variable holding the default dataset root for
/// `stats --aggregate`.
const DATASET_ROOT_ENV: &str = "NAVTRACE_DATASET_ROOT";

#[derive(Parser)]
#[command(
    name = "navtrace",
    version,
    about = "Tools for 6-DoF head-pose / eye-gaze navigation traces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a trace file and report every invariant violation.
    Validate(ValidateArgs),
    /// Convert between the trace CSV and the camera-path JSON formats.
    #[command(subcommand)]
    Convert(ConvertCommand),
    /// Convert a virtual-world trace to physical-stage meters.
    ToStage(SpaceArgs),
    /// Convert a physical-stage trace into a scene's virtual world.
    ToVirtual(SpaceArgs),
    /// Per-trace statistics, or dataset-wide aggregation with --aggregate.
    Stats(StatsArgs),
    /// Export the per-eye view/projection matrix stream for replay.
    Cameras(CamerasArgs),
    /// Project recorded gaze rays to image pixel coordinates.
    GazePixels(GazePixelsArgs),
    /// Generate a deterministic synthetic trace.
    Synth(SynthArgs),
    /// Export stage-space trajectory series for plotting.
    PlotData(PlotDataArgs),
}

#[derive(Args)]
struct TraceInput {
    /// Input trace CSV.
    input: PathBuf,
    /// User id; inferred from a `user<digits>_<scene>.csv` file name when
    /// omitted.
    #[arg(long)]
    user: Option<String>,
    /// Scene id; inferred from the file name when omitted.
    #[arg(long)]
    scene: Option<String>,
}

impl TraceInput {
    fn ids(&self) -> (String, String) {
        let inferred = self
            .input
            .file_name()
            .and_then(|n| parse_trace_filename(&n.to_string_lossy()));
        let user = self
            .user
            .clone()
            .or_else(|| inferred.as_ref().map(|(u, _)| u.clone()))
            .unwrap_or_else(|| "unknown".to_string());
        let scene = self
            .scene
            .clone()
            .or_else(|| inferred.as_ref().map(|(_, s)| s.clone()))
            .unwrap_or_else(|| "unknown".to_string());
        (user, scene)
    }

    fn parse(&self) -> Result<ParsedTrace> {
        let (user, scene) = self.ids();
        let file = std::fs::File::open(&self.input)
            .with_context(|| format!("cannot open {}", self.input.display()))?;
        parse_trace_csv(BufReader::new(file), &user, &scene)
            .with_context(|| format!("while parsing {}", self.input.display()))
    }
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    trace: TraceInput,
    /// Treat a trailing unpaired row as an error instead of a warning.
    #[arg(long)]
    strict: bool,
    /// Gaze-drift warning threshold, in the trace's units.
    #[arg(long, default_value_t = 0.5)]
    gaze_drift: f64,
}

#[derive(Subcommand)]
enum ConvertCommand {
    /// Trace CSV -> camera-path JSON.
    Csv2json(Csv2JsonArgs),
    /// Camera-path JSON -> trace CSV.
    Json2csv(Json2CsvArgs),
}

#[derive(Args)]
struct Csv2JsonArgs {
    #[command(flatten)]
    trace: TraceInput,
    /// Output JSON path.
    output: PathBuf,
    /// Flip the poses into the +Y-up convention on export; recorded in the
    /// document's convention marker.
    #[arg(long)]
    flip: bool,
}

#[derive(Args)]
struct Json2CsvArgs {
    /// Input camera-path JSON.
    input: PathBuf,
    /// Output trace CSV.
    output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScaleDirectionArg {
    /// virtual units = scale x meters (the calibrated reading).
    VirtualPerMeter,
    /// virtual units = meters / scale (reciprocal reading).
    MeterPerVirtual,
}

impl From<ScaleDirectionArg> for ScaleDirection {
    fn from(v: ScaleDirectionArg) -> Self {
        match v {
            ScaleDirectionArg::VirtualPerMeter => ScaleDirection::VirtualPerMeter,
            ScaleDirectionArg::MeterPerVirtual => ScaleDirection::MeterPerVirtual,
        }
    }
}

#[derive(Args)]
struct SpaceArgs {
    #[command(flatten)]
    trace: TraceInput,
    /// Output trace CSV.
    output: PathBuf,
    /// How the scene scale factor is read.
    #[arg(long, value_enum, default_value_t = ScaleDirectionArg::VirtualPerMeter)]
    scale_direction: ScaleDirectionArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// Human-readable aligned table.
    Table,
    /// Machine-readable comma-separated values.
    Csv,
}

#[derive(Args)]
struct StatsArgs {
    /// Trace CSV, or a dataset root with --aggregate. Defaults to
    /// $NAVTRACE_DATASET_ROOT for --aggregate.
    input: Option<PathBuf>,
    /// Aggregate every trace under a dataset root.
    #[arg(long)]
    aggregate: bool,
    /// Scene id for a single trace; inferred from the file name when omitted.
    #[arg(long)]
    scene: Option<String>,
    /// User id override for a single trace.
    #[arg(long)]
    user: Option<String>,
    /// Site-map CSV (`user,site` per line) for per-site grouping.
    #[arg(long)]
    sites: Option<PathBuf>,
    /// Ignore head steps shorter than this many meters when summing
    /// distance (jitter filter).
    #[arg(long, default_value_t = 0.0)]
    min_displacement: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
}

#[derive(Args)]
struct CamerasArgs {
    #[command(flatten)]
    trace: TraceInput,
    /// Output JSON path.
    output: PathBuf,
    /// Near clip plane, scene units.
    #[arg(long, default_value_t = 0.01)]
    near: f64,
    /// Far clip plane, scene units.
    #[arg(long, default_value_t = 1000.0)]
    far: f64,
    #[arg(long, default_value_t = 2160)]
    width: u32,
    #[arg(long, default_value_t = 2224)]
    height: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ForwardAxisArg {
    NegZ,
    PosZ,
}

impl From<ForwardAxisArg> for ForwardAxis {
    fn from(v: ForwardAxisArg) -> Self {
        match v {
            ForwardAxisArg::NegZ => ForwardAxis::NegZ,
            ForwardAxisArg::PosZ => ForwardAxis::PosZ,
        }
    }
}

#[derive(Args)]
struct GazePixelsArgs {
    #[command(flatten)]
    trace: TraceInput,
    /// Output CSV path.
    output: PathBuf,
    #[arg(long, default_value_t = 2160)]
    width: u32,
    #[arg(long, default_value_t = 2224)]
    height: u32,
    /// Forward axis of the gaze convention.
    #[arg(long, value_enum, default_value_t = ForwardAxisArg::NegZ)]
    forward_axis: ForwardAxisArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PathArg {
    Stationary,
    Circle,
    Line,
}

#[derive(Args)]
struct SynthArgs {
    /// Output trace CSV.
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = PathArg::Circle)]
    path: PathArg,
    /// Circle radius, meters.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 2.0)]
    revolutions: f64,
    /// Line start, meters, as `x,z`.
    #[arg(long, value_parser = parse_xz)]
    from: Option<[f64; 2]>,
    /// Line end, meters, as `x,z`.
    #[arg(long, value_parser = parse_xz)]
    to: Option<[f64; 2]>,
    /// Session length, seconds.
    #[arg(long, default_value_t = 60.0)]
    duration: f64,
    #[arg(long, default_value_t = 60.0)]
    fps: f64,
    /// Constant head height, meters.
    #[arg(long, default_value_t = 1.7)]
    height: f64,
    /// Sinusoidal head height as `mean,amplitude,period_s` (overrides
    /// --height).
    #[arg(long, value_parser = parse_sinusoid)]
    height_sinusoid: Option<[f64; 3]>,
    /// Physical inter-pupillary distance, meters.
    #[arg(long, default_value_t = navtrace::synth::DEFAULT_IPD_M)]
    ipd: f64,
    /// Yaw offset of the gaze relative to the head, degrees.
    #[arg(long, default_value_t = 0.0)]
    gaze_offset_deg: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Apply this scene's initialization so the output is in virtual-world
    /// coordinates; without it the trace stays in stage meters.
    #[arg(long)]
    scene: Option<String>,
    #[arg(long, default_value = "user1")]
    user: String,
}

#[derive(Args)]
struct PlotDataArgs {
    #[command(flatten)]
    trace: TraceInput,
    /// Output prefix; writes `<prefix>_xz.csv` and `<prefix>_height.csv`.
    output_prefix: String,
    /// Stage center as `x,z`, meters.
    #[arg(long, value_parser = parse_xz, default_value = "0,0")]
    stage_center: [f64; 2],
    /// Half the stage side length, meters.
    #[arg(long, default_value_t = 1.5)]
    stage_half_extent: f64,
}

fn parse_xz(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected `x,z`".to_string());
    }
    let x = parts[0].trim().parse().map_err(|_| "x is not a number")?;
    let z = parts[1].trim().parse().map_err(|_| "z is not a number")?;
    Ok([x, z])
}

fn parse_sinusoid(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| "expected `mean,amplitude,period_s`".to_string())?;
    if parts.len() != 3 {
        return Err("expected `mean,amplitude,period_s`".to_string());
    }
    Ok([parts[0], parts[1], parts[2]])
}

/// Marker for argument-semantic failures (unknown scene, missing flags),
/// mapped to exit code 3.
#[derive(Debug)]
struct BadArguments(String);

impl std::fmt::Display for BadArguments {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for BadArguments {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap routes --help and --version through the error path
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(3),
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(classify(&e))
        }
    }
}

/// Exit-code classes: 3 for bad invocations, 2 for I/O, 1 for invalid data.
fn classify(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.downcast_ref::<BadArguments>().is_some()
            || matches!(
                cause.downcast_ref::<SceneError>(),
                Some(SceneError::UnknownScene { .. })
            )
        {
            return 3;
        }
        if let Some(fmt) = cause.downcast_ref::<FormatError>() {
            return match fmt {
                FormatError::Io(_) => 2,
                _ => 1,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 2;
        }
    }
    1
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate(args) => cmd_validate(args),
        Command::Convert(ConvertCommand::Csv2json(args)) => cmd_csv2json(args),
        Command::Convert(ConvertCommand::Json2csv(args)) => cmd_json2csv(args),
        Command::ToStage(args) => cmd_space(args, true),
        Command::ToVirtual(args) => cmd_space(args, false),
        Command::Stats(args) => cmd_stats(args),
        Command::Cameras(args) => cmd_cameras(args),
        Command::GazePixels(args) => cmd_gaze_pixels(args),
        Command::Synth(args) => cmd_synth(args),
        Command::PlotData(args) => cmd_plot_data(args),
    }
}

fn lookup_scene(scene_id: &str) -> Result<SceneInit> {
    Ok(scene_registry().get(scene_id).copied()?)
}

fn create_output(path: &Path) -> Result<BufWriter<std::fs::File>> {
    Ok(BufWriter::new(std::fs::File::create(path).with_context(
        || format!("cannot create {}", path.display()),
    )?))
}

fn cmd_validate(args: ValidateArgs) -> Result<ExitCode> {
    let parsed = args.trace.parse()?;
    let opts = ValidateOptions {
        gaze_drift_threshold: args.gaze_drift,
        ..ValidateOptions::default()
    };
    let mut report = parsed.validate(&opts);
    if args.strict {
        // strict reading: unpaired-row warnings become errors
        for finding in &mut report.findings {
            if finding.severity == Severity::Warning && finding.message.contains("unpaired") {
                finding.severity = Severity::Error;
            }
        }
    }
    for finding in &report.findings {
        println!("{}: {finding}", args.trace.input.display());
    }
    println!(
        "{}: {} frames, {} errors, {} warnings",
        args.trace.input.display(),
        parsed.trace.n_frames(),
        report.error_count(),
        report.warning_count()
    );
    Ok(if report.has_errors() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_csv2json(args: Csv2JsonArgs) -> Result<ExitCode> {
    let parsed = args.trace.parse()?;
    let doc = csv_to_json(&parsed.trace, args.flip);
    let out = create_output(&args.output)?;
    doc.to_json_writer(out).context("writing JSON document")?;
    eprintln!(
        "wrote {} records (flip={}) to {}",
        doc.frames.len(),
        args.flip,
        args.output.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_json2csv(args: Json2CsvArgs) -> Result<ExitCode> {
    let file = std::fs::File::open(&args.input)
        .with_context(|| format!("cannot open {}", args.input.display()))?;
    let doc = CameraPathDocument::from_json_reader(BufReader::new(file))
        .context("reading JSON document")?;
    let trace = json_to_csv(&doc).context("reconstructing trace")?;
    let mut out = create_output(&args.output)?;
    writeln!(
        out,
        "# navtrace convert json2csv flipped_source={}",
        doc.convention.flipped
    )?;
    write_trace_csv(&trace, out)?;
    eprintln!(
        "wrote {} frames to {}",
        trace.n_frames(),
        args.output.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_space(args: SpaceArgs, to_stage: bool) -> Result<ExitCode> {
    let (_, scene_id) = args.trace.ids();
    let init = lookup_scene(&scene_id)?;
    let parsed = args.trace.parse()?;
    let direction: ScaleDirection = args.scale_direction.into();

    let converted = if to_stage {
        trace_to_stage(&parsed.trace, &init, direction)?
    } else {
        // trace files do not encode their space; this command interprets the
        // input as stage meters
        let stage = parsed.trace.assume_space(CoordinateSpace::PhysicalStage);
        trace_to_virtual(&stage, &init, direction)?
    };

    let mut out = create_output(&args.output)?;
    writeln!(
        out,
        "# navtrace {} scene={scene_id} scale_direction={:?}",
        if to_stage { "to-stage" } else { "to-virtual" },
        args.scale_direction
    )?;
    write_trace_csv(&converted, out)?;
    eprintln!(
        "wrote {} frames ({}) to {}",
        converted.n_frames(),
        converted.space,
        args.output.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn single_stats(args: &StatsArgs, input: &Path) -> Result<(TraceStats, Trace)> {
    let trace_input = TraceInput {
        input: input.to_path_buf(),
        user: args.user.clone(),
        scene: args.scene.clone(),
    };
    let (_, scene_id) = trace_input.ids();
    let init = lookup_scene(&scene_id)?;
    let parsed = trace_input.parse()?;
    let stats = trace_stats_with(
        &parsed.trace,
        &init,
        &StatsOptions {
            min_displacement_m: args.min_displacement,
        },
    )?;
    Ok((stats, parsed.trace))
}

fn cmd_stats(args: StatsArgs) -> Result<ExitCode> {
    if args.aggregate {
        return cmd_stats_aggregate(args);
    }
    let input = args
        .input
        .clone()
        .ok_or_else(|| anyhow!(BadArguments("stats needs a trace file".to_string())))?;
    let (stats, trace) = single_stats(&args, &input)?;
    match args.format {
        OutputFormat::Csv => {
            println!("n_frames,duration_s,fps,distance_m,mean_speed_mps,max_speed_mps");
            println!(
                "{},{:.6},{:.6},{:.6},{:.6},{:.6}",
                stats.n_frames,
                stats.duration_s,
                stats.fps,
                stats.distance_m,
                stats.mean_speed_mps,
                stats.max_speed_mps
            );
        }
        OutputFormat::Table => {
            println!("trace           {}", input.display());
            println!("user / scene    {} / {}", trace.user_id, trace.scene_id);
            println!("frames          {}", stats.n_frames);
            println!("duration        {:.3} s", stats.duration_s);
            println!("frame rate      {:.2} fps", stats.fps);
            println!("distance        {:.2} m", stats.distance_m);
            println!("mean speed      {:.3} m/s", stats.mean_speed_mps);
            println!("max speed       {:.3} m/s", stats.max_speed_mps);
            if let Ok(div) = gaze_divergence(&trace, ForwardAxis::NegZ) {
                println!(
                    "gaze divergence {:.2} deg mean, {:.2} deg p95",
                    div.mean_deg, div.p95_deg
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_stats_aggregate(args: StatsArgs) -> Result<ExitCode> {
    let root = args
        .input
        .clone()
        .or_else(|| std::env::var(DATASET_ROOT_ENV).ok().map(PathBuf::from))
        .ok_or_else(|| {
            anyhow!(BadArguments(format!(
                "stats --aggregate needs a dataset root (argument or ${DATASET_ROOT_ENV})"
            )))
        })?;
    let index =
        scan_dataset(&root).with_context(|| format!("while scanning {}", root.display()))?;
    for warning in &index.warnings {
        eprintln!("warning: {warning}");
    }
    let sites = match &args.sites {
        Some(path) => {
            let file = std::fs::File::open(path)
                .with_context(|| format!("cannot open site map {}", path.display()))?;
            Some(SiteMap::from_reader(BufReader::new(file))?)
        }
        None => None,
    };
    let registry = scene_registry();
    let report = aggregate_stats(&index, &registry, sites.as_ref())?;

    match args.format {
        OutputFormat::Csv => {
            println!("site,scene,n_traces,mean_frames,mean_fps,mean_distance_m,mean_duration_s");
            let mut print_group = |g: &GroupStats| {
                println!(
                    "{},{},{},{:.3},{:.3},{:.3},{:.3}",
                    g.site.as_deref().unwrap_or(""),
                    g.scene.as_deref().unwrap_or(""),
                    g.n_traces,
                    g.mean_frames,
                    g.mean_fps,
                    g.mean_distance_m,
                    g.mean_duration_s
                );
            };
            report.per_site.iter().for_each(&mut print_group);
            report.per_scene.iter().for_each(&mut print_group);
            report.per_site_scene.iter().for_each(&mut print_group);
            if let Some(overall) = &report.overall {
                print_group(overall);
            }
        }
        OutputFormat::Table => {
            if !report.per_site.is_empty() {
                println!("per-session means by site ({} traces)", index.len());
                println!(
                    "{:<8} {:>7} {:>10} {:>8} {:>12}",
                    "site", "traces", "frames", "fps", "distance (m)"
                );
                for g in &report.per_site {
                    println!(
                        "{:<8} {:>7} {:>10.0} {:>8.2} {:>12.2}",
                        g.site.as_deref().unwrap_or("-"),
                        g.n_traces,
                        g.mean_frames,
                        g.mean_fps,
                        g.mean_distance_m
                    );
                }
                println!();
            }
            println!("per-scene means");
            println!(
                "{:<12} {:>7} {:>10} {:>8} {:>12}",
                "scene", "traces", "frames", "fps", "distance (m)"
            );
            for g in &report.per_scene {
                println!(
                    "{:<12} {:>7} {:>10.0} {:>8.2} {:>12.2}",
                    g.scene.as_deref().unwrap_or("-"),
                    g.n_traces,
                    g.mean_frames,
                    g.mean_fps,
                    g.mean_distance_m
                );
            }
            if !report.per_site_scene.is_empty() {
                println!();
                println!("frame rate by site and scene");
                println!("{:<8} {:<12} {:>8}", "site", "scene", "fps");
                for g in &report.per_site_scene {
                    println!(
                        "{:<8} {:<12} {:>8.2}",
                        g.site.as_deref().unwrap_or("-"),
                        g.scene.as_deref().unwrap_or("-"),
                        g.mean_fps
                    );
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_cameras(args: CamerasArgs) -> Result<ExitCode> {
    let parsed = args.trace.parse()?;
    let size = ImageSize {
        width: args.width,
        height: args.height,
    };
    let cameras = camera_stream(&parsed.trace, args.near, args.far, size)?;
    let frames: Vec<serde_json::Value> = cameras
        .iter()
        .map(|c| {
            serde_json::json!({
                "timestamp_ms": c.timestamp_ms,
                "eye": c.eye.index(),
                "view": c.view.to_row_major().to_vec(),
                "projection": c.projection.to_row_major().to_vec(),
            })
        })
        .collect();
    let doc = serde_json::json!({
        "near": args.near,
        "far": args.far,
        "width": args.width,
        "height": args.height,
        "user_id": parsed.trace.user_id,
        "scene_id": parsed.trace.scene_id,
        "cameras": frames,
    });
    let out = create_output(&args.output)?;
    serde_json::to_writer_pretty(out, &doc).context("writing camera stream")?;
    eprintln!(
        "wrote {} cameras to {}",
        cameras.len(),
        args.output.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_gaze_pixels(args: GazePixelsArgs) -> Result<ExitCode> {
    let parsed = args.trace.parse()?;
    let size = ImageSize {
        width: args.width,
        height: args.height,
    };
    let forward: ForwardAxis = args.forward_axis.into();
    let mut out = create_output(&args.output)?;
    writeln!(
        out,
        "# navtrace gaze-pixels width={} height={} forward_axis={:?}",
        args.width, args.height, args.forward_axis
    )?;
    writeln!(out, "timestamp_ms,frame,eye,u_px,v_px,in_view")?;
    for (i, frame) in parsed.trace.frames.iter().enumerate() {
        for view in [&frame.left, &frame.right] {
            let px = gaze_pixel(view, size, forward)
                .with_context(|| format!("frame {i}, eye {}", view.eye.index()))?;
            writeln!(
                out,
                "{},{},{},{:.3},{:.3},{}",
                view.timestamp_ms,
                i,
                view.eye.index(),
                px.u,
                px.v,
                px.in_view
            )?;
        }
    }
    eprintln!(
        "wrote {} gaze samples to {}",
        parsed.trace.n_frames() * 2,
        args.output.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_synth(args: SynthArgs) -> Result<ExitCode> {
    let path = match args.path {
        PathArg::Stationary => PathSpec::Stationary,
        PathArg::Circle => PathSpec::Circle {
            radius: args.radius,
            revolutions: args.revolutions,
        },
        PathArg::Line => PathSpec::Line {
            from: args
                .from
                .ok_or_else(|| anyhow!(BadArguments("--path line needs --from x,z".to_string())))?,
            to: args
                .to
                .ok_or_else(|| anyhow!(BadArguments("--path line needs --to x,z".to_string())))?,
        },
    };
    let height = match args.height_sinusoid {
        Some([mean, amplitude, period_s]) => HeightProfile::Sinusoid {
            mean,
            amplitude,
            period_s,
        },
        None => HeightProfile::Constant(args.height),
    };
    let spec = MotionSpec {
        duration_s: args.duration,
        fps: args.fps,
        path,
        height,
        ipd_m: args.ipd,
        gaze_offset_deg: args.gaze_offset_deg,
        seed: args.seed,
    };
    let (scene_id, init) = match &args.scene {
        Some(scene) => (scene.clone(), Some(lookup_scene(scene)?)),
        None => ("synthetic".to_string(), None),
    };
    let trace = generate_trace(&spec, &args.user, &scene_id, init.as_ref())
        .map_err(|e| anyhow!(BadArguments(e.to_string())))?;
    let mut out = create_output(&args.output)?;
    writeln!(
        out,
        "# navtrace synth path={:?} duration={} fps={} ipd={} gaze_offset_deg={} seed={} scene={scene_id}",
        args.path, args.duration, args.fps, args.ipd, args.gaze_offset_deg, args.seed
    )?;
    write_trace_csv(&trace, out)?;
    eprintln!(
        "wrote {} frames ({}) to {}",
        trace.n_frames(),
        trace.space,
        args.output.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_plot_data(args: PlotDataArgs) -> Result<ExitCode> {
    let (_, scene_id) = args.trace.ids();
    let init = lookup_scene(&scene_id)?;
    let parsed = args.trace.parse()?;
    let extent = StageExtent {
        center_x: args.stage_center[0],
        center_z: args.stage_center[1],
        half_extent: args.stage_half_extent,
    };
    let series = trajectory_export(&parsed.trace, &init, &extent)?;
    for warning in &series.warnings {
        eprintln!("warning: {warning}");
    }

    let provenance = format!(
        "# navtrace plot-data scene={scene_id} stage_center={},{} stage_half_extent={}",
        args.stage_center[0], args.stage_center[1], args.stage_half_extent
    );
    let xz_path = PathBuf::from(format!("{}_xz.csv", args.output_prefix));
    let mut out = create_output(&xz_path)?;
    writeln!(out, "{provenance}")?;
    writeln!(out, "x_m,z_m")?;
    for (_, x, z) in &series.horizontal {
        writeln!(out, "{x},{z}")?;
    }

    let height_path = PathBuf::from(format!("{}_height.csv", args.output_prefix));
    let mut out = create_output(&height_path)?;
    writeln!(out, "{provenance}")?;
    writeln!(out, "t_ms,y_m")?;
    for (t, y) in &series.height {
        writeln!(out, "{t},{y}")?;
    }

    eprintln!(
        "wrote {} points to {} and {}",
        series.horizontal.len(),
        xz_path.display(),
        height_path.display()
    );
    Ok(ExitCode::SUCCESS)
}
