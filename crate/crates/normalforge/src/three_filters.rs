//! The three-filter estimator: two image gradient filters on an inverse-depth
//! (or disparity) image give the normal's x and y components; a mean/median
//! filter over the eight neighbor candidates gives the z component.

use crate::camera::{orient_toward_camera, CameraIntrinsics};
use crate::error::{Error, Result};
use crate::filters::{gradient_pair, AggregatorKind, GradientKernelKind};
use crate::image::{disparity_to_depth, inverse_depth, DepthImage, DisparityImage, NormalMap};
use crate::math::{Point3, Vec3};

/// Fronto-parallel surfaces resolve to this normal.
pub const FLAT_NORMAL: Vec3 = Vec3 {
    x: 0.0,
    y: 0.0,
    z: -1.0,
};

/// Filter choices and numeric thresholds for the three-filter estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeFiltersConfig {
    pub kernel: GradientKernelKind,
    pub aggregator: AggregatorKind,
    /// Neighbors whose |dz| is below this (meters) contribute no candidate.
    pub dz_epsilon: f64,
    /// Window depth spread at or below which the flat rule applies (meters).
    pub flat_epsilon: f64,
}

impl ThreeFiltersConfig {
    pub fn new(kernel: GradientKernelKind, aggregator: AggregatorKind) -> Self {
        ThreeFiltersConfig {
            kernel,
            aggregator,
            dz_epsilon: 1e-8,
            flat_epsilon: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dz_epsilon > 0.0) {
            return Err(Error::config("dz_epsilon must be positive"));
        }
        if !(self.flat_epsilon >= 0.0) {
            return Err(Error::config("flat_epsilon must be nonnegative"));
        }
        Ok(())
    }
}

impl Default for ThreeFiltersConfig {
    fn default() -> Self {
        ThreeFiltersConfig::new(GradientKernelKind::Fd, AggregatorKind::Median)
    }
}

/// The eight window offsets in row-major order (fixed so mean aggregation is
/// bitwise deterministic).
const WINDOW8: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// One n_z candidate per neighbor: `(dx*n_x + dy*n_y) / dz`, with neighbors
/// whose |dz| falls below `dz_epsilon` omitted.
pub fn nz_candidates(
    center: Point3,
    neighbors: &[Point3],
    n_x: f64,
    n_y: f64,
    dz_epsilon: f64,
) -> Vec<f64> {
    neighbors
        .iter()
        .filter_map(|q| {
            let d = *q - center;
            if d.z.abs() < dz_epsilon {
                None
            } else {
                Some((d.x * n_x + d.y * n_y) / d.z)
            }
        })
        .collect()
}

/// Allocation-free reduction over the stack candidate buffer; agrees with
/// [`aggregate`](crate::filters::aggregate) on every input.
fn aggregate8(candidates: &mut [f64], kind: AggregatorKind) -> Option<f64> {
    if candidates.is_empty() {
        return None;
    }
    match kind {
        AggregatorKind::Mean => {
            Some(candidates.iter().sum::<f64>() / candidates.len() as f64)
        }
        AggregatorKind::Median => {
            candidates.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
            let n = candidates.len();
            if n % 2 == 1 {
                Some(candidates[n / 2])
            } else {
                Some(0.5 * (candidates[n / 2 - 1] + candidates[n / 2]))
            }
        }
    }
}

/// Estimate surface normals from a depth image.
pub fn estimate_from_depth(
    depth: &DepthImage,
    k: &CameraIntrinsics,
    cfg: &ThreeFiltersConfig,
) -> Result<NormalMap> {
    cfg.validate()?;
    let inv = inverse_depth(depth);
    let (gu, gv) = gradient_pair(inv.grid(), cfg.kernel);
    estimate_impl(depth, k, cfg, &gu, &gv, k.fx, k.fy)
}

/// Estimate surface normals from a disparity image. The gradient filters run
/// on the disparity values directly; candidate formation uses depths from
/// `z = f * t_c / d`. Requires a stereo baseline and `fx == fy`.
pub fn estimate_from_disparity(
    disp: &DisparityImage,
    k: &CameraIntrinsics,
    cfg: &ThreeFiltersConfig,
) -> Result<NormalMap> {
    cfg.validate()?;
    k.focal()?;
    k.baseline()?;
    let depth = disparity_to_depth(k, disp)?;
    let (gu, gv) = gradient_pair(disp.grid(), cfg.kernel);
    // n_x = dd/du and n_y = dd/dv: the disparity path differs from the depth
    // path by the positive factor 1/(f*t_c) on the gradient pair, which the
    // candidate scheme and normalization absorb.
    estimate_impl(&depth, k, cfg, &gu, &gv, 1.0, 1.0)
}

#[allow(clippy::too_many_arguments)]
fn estimate_impl(
    depth: &DepthImage,
    k: &CameraIntrinsics,
    cfg: &ThreeFiltersConfig,
    gu: &crate::image::ScalarImage,
    gv: &crate::image::ScalarImage,
    gx_scale: f64,
    gy_scale: f64,
) -> Result<NormalMap> {
    let (w, h) = (depth.width(), depth.height());
    if gu.width() != w || gu.height() != h {
        return Err(Error::invalid(format!(
            "gradient/depth dimension mismatch: {}x{} vs {w}x{h}",
            gu.width(),
            gu.height()
        )));
    }
    let mut out = NormalMap::new(w, h);
    if w < 3 || h < 3 {
        return Ok(out);
    }
    let grid = depth.grid();
    let (zvals, zmask) = (grid.values(), grid.mask());
    let (gu_vals, gu_mask) = (gu.values(), gu.mask());
    let (gv_vals, gv_mask) = (gv.values(), gv.mask());
    // Linear-index offsets of the eight window neighbors, in WINDOW8 order.
    let offsets: [isize; 8] = {
        let mut o = [0isize; 8];
        for (i, (du, dv)) in WINDOW8.iter().enumerate() {
            o[i] = (dv * w as i64 + du) as isize;
        }
        o
    };
    // Per-column and per-row ray factors: (u - u0)/fx and (v - v0)/fy.
    let xf: Vec<f64> = (0..w).map(|u| (u as f64 - k.u0) / k.fx).collect();
    let yf: Vec<f64> = (0..h).map(|v| (v as f64 - k.v0) / k.fy).collect();
    for v in 1..h - 1 {
        for u in 1..w - 1 {
            let i = v * w + u;
            if !(zmask[i] && gu_mask[i] && gv_mask[i]) {
                continue;
            }
            let (zc, grad_u, grad_v) = (zvals[i], gu_vals[i], gv_vals[i]);

            // Gather the eight neighbor depths once. Flat rule: all of them
            // within flat_epsilon of the center collapse to the
            // fronto-parallel normal.
            let mut zs = [0.0f64; 8];
            let mut flat = true;
            let mut window_ok = true;
            for (slot, &off) in offsets.iter().enumerate() {
                let j = (i as isize + off) as usize;
                if !zmask[j] {
                    window_ok = false;
                    break;
                }
                let zn = zvals[j];
                zs[slot] = zn;
                if (zn - zc).abs() > cfg.flat_epsilon {
                    flat = false;
                }
            }
            if !window_ok {
                continue;
            }
            if flat {
                out.set(u, v, FLAT_NORMAL);
                continue;
            }

            let n_x = gx_scale * grad_u;
            let n_y = gy_scale * grad_v;
            // Valid depth pixels are finite and positive, so this is
            // `backproject` without the fallible path.
            let center = Point3::new(xf[u] * zc, yf[v] * zc, zc);
            // Candidate formation on the stack; same arithmetic as
            // `nz_candidates` over back-projected neighbors, without the
            // per-pixel allocation.
            let mut candidates = [0.0f64; 8];
            let mut count = 0;
            // Branchless compaction (rejected slots are overwritten) keeps
            // the eight divisions vectorizable.
            for (slot, (du, dv)) in WINDOW8.iter().enumerate() {
                let zn = zs[slot];
                let dz = zn - center.z;
                let uu = (u as i64 + du) as usize;
                let vv = (v as i64 + dv) as usize;
                let dx = xf[uu] * zn - center.x;
                let dy = yf[vv] * zn - center.y;
                candidates[count] = (dx * n_x + dy * n_y) / dz;
                count += (dz.abs() >= cfg.dz_epsilon) as usize;
            }
            let n = match aggregate8(&mut candidates[..count], cfg.aggregator) {
                // No usable candidate: the window is numerically
                // fronto-parallel.
                None => FLAT_NORMAL,
                // `orient_toward_camera` fails exactly when the raw vector
                // has zero norm, which resolves to the flat normal.
                Some(agg) => orient_toward_camera(Vec3::new(n_x, n_y, -agg), center)
                    .unwrap_or(FLAT_NORMAL),
            };
            out.set(u, v, n);
        }
    }
    Ok(out)
}
