//! Evaluation metrics (AAE, PGP, the pi speed/accuracy score), per-pixel
//! error maps, and the timing harness.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::camera::CameraIntrinsics;
use crate::error::{Error, Result};
use crate::image::{DepthImage, NormalMap, ScalarImage};
use crate::math::Vec3;
use crate::method::Method;

/// Angle between two directions in degrees, computed in a form that stays
/// accurate for near-parallel vectors.
pub fn angular_error(n: Vec3, nhat: Vec3) -> Result<f64> {
    if n.norm() == 0.0 {
        return Err(Error::invalid("angular_error: zero-norm first argument"));
    }
    if nhat.norm() == 0.0 {
        return Err(Error::invalid("angular_error: zero-norm second argument"));
    }
    Ok(n.angle_deg(nhat))
}

/// Average angular error over a nonempty list, in degrees.
pub fn aae(errors: &[f64]) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::EmptyInput("aae: empty error list".into()));
    }
    Ok(errors.iter().sum::<f64>() / errors.len() as f64)
}

/// Proportion of good pixels: the fraction of errors <= phi degrees.
pub fn pgp(errors: &[f64], phi: f64) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::EmptyInput("pgp: empty error list".into()));
    }
    if !(phi >= 0.0) {
        return Err(Error::invalid("pgp tolerance must be >= 0"));
    }
    let good = errors.iter().filter(|&&e| e <= phi).count();
    Ok(good as f64 / errors.len() as f64)
}

/// Speed/accuracy trade-off: e_A (degrees) times t (milliseconds), in
/// degrees per kilohertz. Lower is better.
pub fn pi_score(e_a: f64, t_ms: f64) -> f64 {
    e_a * t_ms
}

/// Per-pixel angular error where both maps are valid; everything else
/// (including the 1-pixel border, which no 3x3 estimator can fill) is
/// invalid in the output.
pub fn error_map(pred: &NormalMap, gt: &NormalMap) -> Result<ScalarImage> {
    if !pred.same_size(gt) {
        return Err(Error::invalid(format!(
            "error_map dimension mismatch: prediction {}x{} vs ground truth {}x{}",
            pred.width(),
            pred.height(),
            gt.width(),
            gt.height()
        )));
    }
    let (w, h) = (pred.width(), pred.height());
    Ok(ScalarImage::from_fn(w, h, |u, v| {
        if u == 0 || v == 0 || u + 1 == w || v + 1 == h {
            return None;
        }
        match (pred.get(u, v), gt.get(u, v)) {
            (Some(p), Some(g)) => angular_error(p, g).ok(),
            _ => None,
        }
    }))
}

/// One e_P entry of a report.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct PgpEntry {
    /// Tolerance in degrees.
    pub phi: f64,
    pub proportion: f64,
}

/// Metrics for a single frame.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameReport {
    pub frame: String,
    /// Mean angular error over this frame's evaluated pixels, degrees.
    pub e_a: f64,
    pub e_p: Vec<PgpEntry>,
    /// Evaluated pixel count.
    pub m: usize,
    /// Median wall time of the estimation call, milliseconds.
    pub t_ms: f64,
    /// Set when the frame failed; the frame is then excluded from pooling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Dataset-level evaluation result. Pixel metrics are pooled over all
/// evaluated pixels of all frames; t is the median per-frame time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    /// Pooled average angular error, degrees.
    pub e_a: f64,
    pub e_p: Vec<PgpEntry>,
    /// Pooled evaluated pixel count.
    pub m: usize,
    /// Median per-frame estimation time, milliseconds (0 when untimed).
    pub t_ms: f64,
    /// pi = e_a * t_ms, degrees per kilohertz.
    pub pi: f64,
    pub frames: Vec<FrameReport>,
}

impl EvalReport {
    /// Pool per-frame pixel errors into a dataset report.
    pub fn from_pooled(
        method: &str,
        frames: Vec<FrameReport>,
        pooled_errors: &[f64],
        phis: &[f64],
        t_ms: f64,
    ) -> Result<EvalReport> {
        let e_a = if pooled_errors.is_empty() {
            return Err(Error::EmptyInput("report has no evaluated pixels".into()));
        } else {
            aae(pooled_errors)?
        };
        let e_p = phis
            .iter()
            .map(|&phi| {
                Ok(PgpEntry {
                    phi,
                    proportion: pgp(pooled_errors, phi)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EvalReport {
            method: method.to_string(),
            e_a,
            e_p,
            m: pooled_errors.len(),
            t_ms,
            pi: pi_score(e_a, t_ms),
            frames,
        })
    }
}

/// One input frame for [`benchmark`] or [`evaluate`].
pub struct Frame {
    pub name: String,
    pub depth: DepthImage,
    pub gt: NormalMap,
}

pub const DEFAULT_PHIS: [f64; 3] = [10.0, 20.0, 30.0];

fn median(xs: &mut [f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn collect_errors(pred: &NormalMap, gt: &NormalMap) -> Result<Vec<f64>> {
    let map = error_map(pred, gt)?;
    Ok(map
        .values()
        .iter()
        .zip(map.mask())
        .filter(|&(_, &ok)| ok)
        .map(|(&e, _)| e)
        .collect())
}

/// Run `method` on every frame, timing only the estimation call. Per frame,
/// one warmup run is discarded and `repetitions` timed runs are taken; the
/// frame time is their median. Pixel metrics are pooled over frames; failed
/// frames are recorded and skipped. Errors out only when every frame fails
/// or pooling is empty.
pub fn benchmark(
    method: Method,
    frames: &[Frame],
    k: &CameraIntrinsics,
    repetitions: usize,
    phis: &[f64],
) -> Result<EvalReport> {
    if frames.is_empty() {
        return Err(Error::EmptyInput("benchmark: no frames".into()));
    }
    if repetitions == 0 {
        return Err(Error::config("benchmark repetitions must be >= 1"));
    }
    let mut frame_reports = Vec::with_capacity(frames.len());
    let mut pooled = Vec::new();
    let mut frame_times = Vec::new();
    for frame in frames {
        // Warmup, discarded (also the output we evaluate).
        let pred = match method.estimate_depth(&frame.depth, k) {
            Ok(p) => p,
            Err(e) => {
                frame_reports.push(FrameReport {
                    frame: frame.name.clone(),
                    e_a: f64::NAN,
                    e_p: Vec::new(),
                    m: 0,
                    t_ms: f64::NAN,
                    error: Some(e.to_string()),
                });
                continue;
            }
        };
        let mut times = Vec::with_capacity(repetitions);
        for _ in 0..repetitions {
            let start = Instant::now();
            let out = method.estimate_depth(&frame.depth, k)?;
            times.push(start.elapsed().as_secs_f64() * 1e3);
            std::hint::black_box(&out);
        }
        let t_ms = median(&mut times);
        let errors = collect_errors(&pred, &frame.gt)?;
        let e_a = if errors.is_empty() { 0.0 } else { aae(&errors)? };
        let e_p = phis
            .iter()
            .map(|&phi| PgpEntry {
                phi,
                proportion: pgp(&errors, phi).unwrap_or(0.0),
            })
            .collect();
        frame_reports.push(FrameReport {
            frame: frame.name.clone(),
            e_a,
            e_p,
            m: errors.len(),
            t_ms,
            error: None,
        });
        frame_times.push(t_ms);
        pooled.extend(errors);
    }
    if pooled.is_empty() {
        return Err(Error::invalid("benchmark: every frame failed or had no evaluated pixels"));
    }
    let t = median(&mut frame_times);
    EvalReport::from_pooled(&method.name(), frame_reports, &pooled, phis, t)
}

/// Metrics without timing for already-computed predictions.
pub fn evaluate(
    method_name: &str,
    pairs: &[(String, NormalMap, NormalMap)],
    phis: &[f64],
) -> Result<EvalReport> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("evaluate: no frames".into()));
    }
    let mut frame_reports = Vec::with_capacity(pairs.len());
    let mut pooled = Vec::new();
    for (name, pred, gt) in pairs {
        let errors = collect_errors(pred, gt)?;
        let e_a = if errors.is_empty() { 0.0 } else { aae(&errors)? };
        let e_p = phis
            .iter()
            .map(|&phi| PgpEntry {
                phi,
                proportion: pgp(&errors, phi).unwrap_or(0.0),
            })
            .collect();
        frame_reports.push(FrameReport {
            frame: name.clone(),
            e_a,
            e_p,
            m: errors.len(),
            t_ms: 0.0,
            error: None,
        });
        pooled.extend(errors);
    }
    EvalReport::from_pooled(method_name, frame_reports, &pooled, phis, 0.0)
}
