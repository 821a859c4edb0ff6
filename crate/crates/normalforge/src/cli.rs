//! Batch command-line interface: `gen`, `estimate`, `eval`, `bench`.
//!
//! Exit codes: 0 success, 1 runtime/I-O failure, 2 usage or configuration
//! error. The environment variable `NORMALFORGE_SEED` overrides the default
//! seed of any subcommand that takes one.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::camera::CameraIntrinsics;
use crate::error::{Error, Result};
use crate::eval::{self, Frame};
use crate::image::{DepthImage, DisparityImage};
use crate::io::dataset;
use crate::io::{self, ReportFormat};
use crate::method::Method;
use crate::synth::{
    add_gaussian_noise, make_mesh, render_depth, sample_viewpoints, MeshShape, NoisePreset,
    NoiseSpec,
};

#[derive(Debug, Parser)]
#[command(
    name = "normalforge",
    about = "Surface normal estimation for depth and disparity images",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset of depth frames with ground-truth normals.
    Gen(GenArgs),
    /// Estimate normals for one depth or disparity image.
    Estimate(EstimateArgs),
    /// Evaluate predicted normals against ground truth.
    Eval(EvalArgs),
    /// Benchmark methods on a dataset: timing plus accuracy metrics.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Shape: plane, sphere, torus, or heightfield.
    #[arg(long)]
    pub shape: String,
    /// Number of viewpoints to render.
    #[arg(long)]
    pub views: usize,
    /// Output dataset directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 640)]
    pub width: usize,
    #[arg(long, default_value_t = 480)]
    pub height: usize,
    /// Focal length in pixels (fx = fy); principal point is the image center.
    #[arg(long, default_value_t = 500.0)]
    pub focal: f64,
    /// Camera distance from the object center in meters.
    #[arg(long, default_value_t = 3.0)]
    pub distance: f64,
    /// Noise preset: low, medium, or high (sigma relative to mean depth).
    #[arg(long)]
    pub noise: Option<String>,
    /// Explicit noise sigma in meters; overrides --noise.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Seed for viewpoints and noise (default: NORMALFORGE_SEED or 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Thread count for rendering (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Input image: PFM depth (meters) or 16-bit PNG depth.
    #[arg(long)]
    pub input: PathBuf,
    /// Intrinsics JSON file.
    #[arg(long)]
    pub intrinsics: PathBuf,
    /// Method name, e.g. fd-median or plane-svd.
    #[arg(long)]
    pub method: String,
    /// Output 3-channel PFM path.
    #[arg(long)]
    pub output: PathBuf,
    /// Optional 8-bit PNG visualization path.
    #[arg(long)]
    pub viz: Option<PathBuf>,
    /// Treat the input as disparity instead of depth.
    #[arg(long)]
    pub disparity: bool,
    /// Meters per unit for 16-bit PNG input.
    #[arg(long, default_value_t = 0.001)]
    pub png_scale: f64,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predicted normals: a 3-channel PFM file, or a directory of
    /// *_normals.pfm files.
    #[arg(long)]
    pub pred: PathBuf,
    /// Ground-truth normals: a 3-channel PFM file, or a directory of
    /// *_gt.pfm files.
    #[arg(long)]
    pub gt: PathBuf,
    /// PGP tolerances in degrees, comma-separated.
    #[arg(long, default_value = "10,20,30", value_delimiter = ',')]
    pub phi: Vec<f64>,
    /// Report output path.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Report format: json or csv.
    #[arg(long, default_value = "json")]
    pub format: String,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Dataset directory produced by `gen`.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Comma-separated method names, or `all`.
    #[arg(long, default_value = "all", value_delimiter = ',')]
    pub methods: Vec<String>,
    /// Timed repetitions per frame (one warmup run is discarded).
    #[arg(long, default_value_t = 3)]
    pub repetitions: usize,
    /// PGP tolerances in degrees, comma-separated.
    #[arg(long, default_value = "10,20,30", value_delimiter = ',')]
    pub phi: Vec<f64>,
    /// Report output path.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Report format: json or csv.
    #[arg(long, default_value = "json")]
    pub format: String,
}

/// Default seed: `NORMALFORGE_SEED` if set and parseable, else 0.
pub fn default_seed() -> Result<u64> {
    match std::env::var("NORMALFORGE_SEED") {
        Ok(s) => s
            .parse()
            .map_err(|_| Error::config(format!("NORMALFORGE_SEED must be an integer, got '{s}'"))),
        Err(_) => Ok(0),
    }
}

fn parse_shape(name: &str, seed: u64) -> Result<MeshShape> {
    match name {
        "plane" => Ok(MeshShape::Plane {
            width: 4.0,
            height: 4.0,
            cells: 8,
        }),
        "sphere" => Ok(MeshShape::Sphere {
            radius: 1.0,
            subdivisions: 4,
        }),
        "torus" => Ok(MeshShape::Torus {
            major_radius: 0.8,
            minor_radius: 0.35,
            major_segments: 128,
            minor_segments: 64,
        }),
        "heightfield" => Ok(MeshShape::Heightfield {
            size: 4.0,
            cells: 96,
            amplitude: 0.4,
            seed,
        }),
        other => Err(Error::config(format!(
            "unknown shape '{other}' (expected plane, sphere, torus, or heightfield)"
        ))),
    }
}

pub fn cmd_gen(args: &GenArgs) -> Result<()> {
    if args.views == 0 {
        return Err(Error::config("--views must be >= 1"));
    }
    if args.threads > 0 {
        // Affects rendering only; estimation is single-threaded by design.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build_global();
    }
    let seed = match args.seed {
        Some(s) => s,
        None => default_seed()?,
    };
    let shape = parse_shape(&args.shape, seed)?;
    let mesh = make_mesh(shape)?;
    if args.distance <= mesh.bounding_radius() {
        return Err(Error::config(format!(
            "--distance {} must exceed the object bounding radius {:.3}",
            args.distance,
            mesh.bounding_radius()
        )));
    }
    let k = CameraIntrinsics::new(
        args.focal,
        args.focal,
        args.width as f64 / 2.0,
        args.height as f64 / 2.0,
    )?;
    let preset: Option<NoisePreset> = match (&args.noise, args.sigma) {
        (_, Some(_)) | (None, None) => None,
        (Some(name), None) => Some(name.parse()?),
    };
    if let Some(s) = args.sigma {
        if !(s >= 0.0) {
            return Err(Error::config("--sigma must be >= 0"));
        }
    }

    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let poses = sample_viewpoints(args.views, args.distance, seed)?;
    dataset::write_dataset_intrinsics(&args.out, &k)?;
    for (i, pose) in poses.iter().enumerate() {
        let (depth, gt) = render_depth(&mesh, &k, pose, args.width, args.height)?;
        let sigma = match (args.sigma, preset) {
            (Some(s), _) => s,
            (None, Some(p)) => p.sigma_for(&depth)?,
            (None, None) => 0.0,
        };
        let depth = if sigma > 0.0 {
            add_gaussian_noise(&depth, &NoiseSpec::new(sigma, seed.wrapping_add(i as u64))?)
        } else {
            depth
        };
        dataset::write_frame(&args.out, &dataset::frame_stem(i), &depth, &gt, pose)?;
    }
    println!(
        "wrote {} frame(s) to {}",
        poses.len(),
        args.out.display()
    );
    Ok(())
}

fn load_depth_input(path: &Path, png_scale: f64) -> Result<DepthImage> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("png") => io::read_png16_depth(path, png_scale),
        _ => Ok(DepthImage::new(io::read_pfm_scalar(path)?)),
    }
}

pub fn cmd_estimate(args: &EstimateArgs) -> Result<()> {
    let method: Method = args.method.parse()?;
    let k = io::read_intrinsics_json(&args.intrinsics)?;
    let normals = if args.disparity {
        if k.t_c.is_none() {
            return Err(Error::config(
                "disparity input requires t_c (stereo baseline) in the intrinsics",
            ));
        }
        let grid = io::read_pfm_scalar(&args.input)?;
        let disp = DisparityImage::new(grid);
        method.estimate_disparity(&disp, &k)?
    } else {
        let depth = load_depth_input(&args.input, args.png_scale)?;
        method.estimate_depth(&depth, &k)?
    };
    io::write_pfm_normals(&args.output, &normals)?;
    if let Some(viz) = &args.viz {
        io::write_normal_png(viz, &normals)?;
    }
    Ok(())
}

fn validate_phis(phis: &[f64]) -> Result<()> {
    if phis.is_empty() {
        return Err(Error::config("at least one --phi tolerance is required"));
    }
    for &p in phis {
        if !(p >= 0.0) {
            return Err(Error::config(format!("--phi values must be >= 0, got {p}")));
        }
    }
    Ok(())
}

/// Pair prediction files with ground-truth files. Directories are matched by
/// stem: `<stem>_normals.pfm` against `<stem>_gt.pfm`, falling back to equal
/// file names.
fn eval_pairs(pred: &Path, gt: &Path) -> Result<Vec<(String, PathBuf, PathBuf)>> {
    if pred.is_file() {
        let name = pred
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "frame".into());
        return Ok(vec![(name, pred.to_path_buf(), gt.to_path_buf())]);
    }
    let mut pairs = Vec::new();
    let entries = std::fs::read_dir(pred).map_err(|e| Error::io(pred, e))?;
    let mut names: Vec<String> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".pfm"))
        .collect();
    names.sort();
    for name in names {
        let stem = name
            .strip_suffix("_normals.pfm")
            .map(|s| s.to_string())
            .unwrap_or_else(|| name.trim_end_matches(".pfm").to_string());
        let gt_by_stem = gt.join(format!("{stem}_gt.pfm"));
        let gt_path = if gt_by_stem.exists() {
            gt_by_stem
        } else {
            gt.join(&name)
        };
        if gt_path.exists() {
            pairs.push((stem, pred.join(&name), gt_path));
        }
    }
    if pairs.is_empty() {
        return Err(Error::invalid(format!(
            "no prediction/ground-truth pairs found under {} and {}",
            pred.display(),
            gt.display()
        )));
    }
    Ok(pairs)
}

pub fn cmd_eval(args: &EvalArgs) -> Result<()> {
    validate_phis(&args.phi)?;
    let format: ReportFormat = args.format.parse()?;
    let pairs = eval_pairs(&args.pred, &args.gt)?;
    let mut loaded = Vec::with_capacity(pairs.len());
    for (name, pred_path, gt_path) in &pairs {
        let pred = io::read_pfm_normals(pred_path)?;
        let gt = io::read_pfm_normals(gt_path)?;
        if !pred.same_size(&gt) {
            return Err(Error::invalid(format!(
                "dimension mismatch for frame '{name}': prediction {}x{} vs ground truth {}x{}",
                pred.width(),
                pred.height(),
                gt.width(),
                gt.height()
            )));
        }
        loaded.push((name.clone(), pred, gt));
    }
    let report = eval::evaluate("(external)", &loaded, &args.phi)?;
    print_report_line(&report, false);
    if let Some(path) = &args.report {
        io::write_report(&report, path, format)?;
    }
    Ok(())
}

fn parse_methods(names: &[String]) -> Result<Vec<Method>> {
    if names.len() == 1 && names[0] == "all" {
        return Ok(Method::all());
    }
    names.iter().map(|n| n.parse()).collect()
}

fn print_report_header(timed: bool) {
    if timed {
        println!(
            "{:<16} {:>10} {:>10} {:>12} {:>10}",
            "method", "e_A (deg)", "t (ms)", "pi (deg/kHz)", "pixels"
        );
    } else {
        println!("{:<16} {:>10} {:>12}", "method", "e_A (deg)", "pixels");
    }
}

fn print_report_line(report: &crate::eval::EvalReport, timed: bool) {
    if timed {
        println!(
            "{:<16} {:>10.4} {:>10.3} {:>12.3} {:>10}",
            report.method, report.e_a, report.t_ms, report.pi, report.m
        );
    } else {
        println!("{:<16} {:>10.4} {:>12}", report.method, report.e_a, report.m);
    }
    for e in &report.e_p {
        println!("  e_P({:>5.1} deg) = {:.4}", e.phi, e.proportion);
    }
}

pub fn cmd_bench(args: &BenchArgs) -> Result<()> {
    validate_phis(&args.phi)?;
    if args.repetitions == 0 {
        return Err(Error::config("--repetitions must be >= 1"));
    }
    let format: ReportFormat = args.format.parse()?;
    let methods = parse_methods(&args.methods)?;
    let k = dataset::read_dataset_intrinsics(&args.dataset)?;
    let stems = dataset::list_frames(&args.dataset)?;
    let mut frames = Vec::with_capacity(stems.len());
    for stem in &stems {
        let (depth, gt, _pose) = dataset::read_frame(&args.dataset, stem)?;
        frames.push(Frame {
            name: stem.clone(),
            depth,
            gt,
        });
    }
    let mut reports = Vec::with_capacity(methods.len());
    print_report_header(true);
    for method in methods {
        let report = eval::benchmark(method, &frames, &k, args.repetitions, &args.phi)?;
        print_report_line(&report, true);
        reports.push(report);
    }
    if let Some(path) = &args.report {
        let text = match format {
            ReportFormat::Json => {
                let mut s = serde_json::to_string_pretty(&reports).expect("reports serialize");
                s.push('\n');
                s
            }
            ReportFormat::Csv => io::report::reports_to_csv(&reports),
        };
        std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

/// Exit code for an error per the CLI contract: configuration/usage errors
/// exit 2, runtime and I/O errors exit 1.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => 2,
        _ => 1,
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Bench(args) => cmd_bench(args),
    }
}
