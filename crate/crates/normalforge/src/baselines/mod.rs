//! The eight comparison estimators: plane fitting (SVD/PCA), vector fitting,
//! triangle averaging (area/angle weighted), FALS, SRI, and LINE-MOD.
//!
//! All share the 3x3 / 8-connected support of the three-filter estimator,
//! mark the 1-pixel border and pixels with fewer than 3 valid neighbors
//! invalid, and orient outputs camera-facing.

mod eigen;

pub use eigen::{smallest_eigenvector_sym, sym_eigen};

use crate::camera::{backproject, orient_toward_camera, CameraIntrinsics};
use crate::error::Result;
use crate::image::{DepthImage, NormalMap, ScalarImage};
use crate::math::{Mat3, Point3, Vec3};

/// FALS systems with a larger condition number than this are rejected.
const FALS_MAX_CONDITION: f64 = 1e12;

/// Minimum valid neighbors for a fit.
const MIN_NEIGHBORS: usize = 3;

/// Window offsets in counterclockwise angular order starting east, with
/// wraparound pairing (r_9 = r_1) for the triangle-averaging estimators.
const ANGULAR_OFFSETS: [(i64, i64); 8] = [
    (1, 0),   // east
    (1, -1),  // northeast
    (0, -1),  // north
    (-1, -1), // northwest
    (-1, 0),  // west
    (-1, 1),  // southwest
    (0, 1),   // south
    (1, 1),   // southeast
];

/// The 3x3 window around one pixel, back-projected to the camera frame.
/// Slots follow [`ANGULAR_OFFSETS`]; missing neighbors stay `None`.
#[derive(Debug, Clone, Copy)]
pub struct Neighborhood {
    pub center: Point3,
    pub slots: [Option<Point3>; 8],
}

impl Neighborhood {
    pub fn valid_count(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    pub fn points(&self) -> impl Iterator<Item = Point3> + '_ {
        std::iter::once(self.center).chain(self.slots.iter().filter_map(|s| *s))
    }

    /// Difference vectors neighbor - center, in slot order.
    pub fn deltas(&self) -> impl Iterator<Item = Vec3> + '_ {
        let c = self.center;
        self.slots.iter().filter_map(move |s| s.map(|q| q - c))
    }

    /// Apply a rotation to every point (test support for equivariance).
    pub fn rotated(&self, r: &Mat3) -> Neighborhood {
        Neighborhood {
            center: r.mul_vec(self.center),
            slots: self.slots.map(|s| s.map(|p| r.mul_vec(p))),
        }
    }
}

fn gather(depth: &DepthImage, k: &CameraIntrinsics, u: usize, v: usize) -> Option<Neighborhood> {
    let zc = depth.get(u, v)?;
    let center = backproject(k, u as f64, v as f64, zc).ok()?;
    let mut slots = [None; 8];
    for (i, (du, dv)) in ANGULAR_OFFSETS.iter().enumerate() {
        let (uu, vv) = ((u as i64 + du) as usize, (v as i64 + dv) as usize);
        if let Some(zn) = depth.get(uu, vv) {
            slots[i] = backproject(k, uu as f64, vv as f64, zn).ok();
        }
    }
    let nb = Neighborhood { center, slots };
    (nb.valid_count() >= MIN_NEIGHBORS).then_some(nb)
}

/// Run a per-neighborhood solver over every interior pixel.
fn per_pixel(
    depth: &DepthImage,
    k: &CameraIntrinsics,
    solve: impl Fn(&Neighborhood) -> Option<Vec3>,
) -> NormalMap {
    let (w, h) = (depth.width(), depth.height());
    let mut out = NormalMap::new(w, h);
    if w < 3 || h < 3 {
        return out;
    }
    for v in 1..h - 1 {
        for u in 1..w - 1 {
            let Some(nb) = gather(depth, k, u, v) else {
                continue;
            };
            let Some(raw) = solve(&nb) else { continue };
            if let Ok(n) = orient_toward_camera(raw, nb.center) {
                out.set(u, v, n);
            }
        }
    }
    out
}

/// Centered scatter matrix of the window points (center included), plus the
/// centroid. Shared by the SVD and PCA plane fits so both see bitwise
/// identical sums.
fn centered_scatter(nb: &Neighborhood) -> (Mat3, Point3, usize) {
    let mut mean = Vec3::ZERO;
    let mut count = 0usize;
    for p in nb.points() {
        mean = mean + p;
        count += 1;
    }
    mean = mean / count as f64;
    let mut scatter = Mat3::zeros();
    for p in nb.points() {
        scatter.add_outer(p - mean, 1.0);
    }
    (scatter, mean, count)
}

/// Homogeneous plane fit: smallest eigenvector of the 4x4 normal matrix of
/// `[points 1]`. Points are translated to their centroid first; the fit is
/// translation-equivariant and the shift keeps the system well conditioned.
pub fn neighborhood_plane_svd(nb: &Neighborhood) -> Option<Vec3> {
    let (scatter, mean, count) = centered_scatter(nb);
    let mut m = [[0.0f64; 4]; 4];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&scatter.0[i]);
    }
    // With centered points the sums in the mixed row/column are ~0 but kept:
    // they are part of the normal matrix, not assumed away.
    let mut sums = Vec3::ZERO;
    for p in nb.points() {
        sums = sums + (p - mean);
    }
    m[0][3] = sums.x;
    m[1][3] = sums.y;
    m[2][3] = sums.z;
    m[3][0] = sums.x;
    m[3][1] = sums.y;
    m[3][2] = sums.z;
    m[3][3] = count as f64;
    let b = smallest_eigenvector_sym(&m).ok()?;
    Vec3::new(b[0], b[1], b[2]).normalized()
}

/// PCA plane fit: smallest eigenvector of the centered 3x3 scatter.
pub fn neighborhood_plane_pca(nb: &Neighborhood) -> Option<Vec3> {
    let (scatter, _, _) = centered_scatter(nb);
    let n = smallest_eigenvector_sym(&scatter.0).ok()?;
    Vec3::from_array(n).normalized()
}

/// Smallest eigenvector of the sum of outer products of the neighbor
/// difference vectors.
pub fn neighborhood_vector_svd(nb: &Neighborhood) -> Option<Vec3> {
    let mut m = Mat3::zeros();
    for r in nb.deltas() {
        m.add_outer(r, 1.0);
    }
    let n = smallest_eigenvector_sym(&m.0).ok()?;
    Vec3::from_array(n).normalized()
}

fn weighted_triangle_average(
    nb: &Neighborhood,
    weight: impl Fn(Vec3, Vec3, &Vec3) -> f64,
) -> Option<Vec3> {
    let c = nb.center;
    let mut acc = Vec3::ZERO;
    let mut used = 0usize;
    for j in 0..8 {
        let (Some(a), Some(b)) = (nb.slots[j], nb.slots[(j + 1) % 8]) else {
            continue;
        };
        let (ra, rb) = (a - c, b - c);
        let cross = ra.cross(rb);
        let norm = cross.norm();
        if norm <= f64::EPSILON * ra.norm() * rb.norm() {
            continue; // degenerate triangle
        }
        let w = weight(ra, rb, &cross);
        acc = acc + cross * (w / norm);
        used += 1;
    }
    if used == 0 {
        return None;
    }
    acc.normalized()
}

/// Triangle average weighted by triangle area.
pub fn neighborhood_area_weighted(nb: &Neighborhood) -> Option<Vec3> {
    weighted_triangle_average(nb, |_, _, cross| 0.5 * cross.norm())
}

/// Triangle average weighted by the angle between the two edge vectors.
pub fn neighborhood_angle_weighted(nb: &Neighborhood) -> Option<Vec3> {
    weighted_triangle_average(nb, |ra, rb, _| {
        (ra.dot(rb) / (ra.norm() * rb.norm())).clamp(-1.0, 1.0).acos()
    })
}

pub fn plane_svd(depth: &DepthImage, k: &CameraIntrinsics) -> Result<NormalMap> {
    Ok(per_pixel(depth, k, neighborhood_plane_svd))
}

pub fn plane_pca(depth: &DepthImage, k: &CameraIntrinsics) -> Result<NormalMap> {
    Ok(per_pixel(depth, k, neighborhood_plane_pca))
}

pub fn vector_svd(depth: &DepthImage, k: &CameraIntrinsics) -> Result<NormalMap> {
    Ok(per_pixel(depth, k, neighborhood_vector_svd))
}

pub fn area_weighted(depth: &DepthImage, k: &CameraIntrinsics) -> Result<NormalMap> {
    Ok(per_pixel(depth, k, neighborhood_area_weighted))
}

pub fn angle_weighted(depth: &DepthImage, k: &CameraIntrinsics) -> Result<NormalMap> {
    Ok(per_pixel(depth, k, neighborhood_angle_weighted))
}

/// Per-camera precomputation for FALS: the normal-equation matrix of each
/// pixel's window depends only on the ray directions, so its inverse can be
/// built once per (image size, intrinsics) and shared across frames.
pub struct FalsContext {
    width: usize,
    height: usize,
    /// Unit ray direction and the ray-length factor |t| per pixel.
    rays: Vec<(Vec3, f64)>,
    /// Inverse of the full-window system per interior pixel; `None` where the
    /// system is ill conditioned.
    inv: Vec<Option<Mat3>>,
}

fn invert_checked(m: &Mat3) -> Option<Mat3> {
    let (l, _) = sym_eigen(&m.0).ok()?;
    let lmax = l.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
    let lmin = l.iter().cloned().fold(f64::INFINITY, |a, b| a.min(b.abs()));
    if !(lmin > 0.0) || lmax / lmin > FALS_MAX_CONDITION {
        return None;
    }
    // Column-by-column via the pivoted solver.
    let cols = [
        m.solve(Vec3::new(1.0, 0.0, 0.0))?,
        m.solve(Vec3::new(0.0, 1.0, 0.0))?,
        m.solve(Vec3::new(0.0, 0.0, 1.0))?,
    ];
    let mut out = Mat3::zeros();
    for (j, c) in cols.iter().enumerate() {
        out.0[0][j] = c.x;
        out.0[1][j] = c.y;
        out.0[2][j] = c.z;
    }
    Some(out)
}

impl FalsContext {
    pub fn new(width: usize, height: usize, k: &CameraIntrinsics) -> Self {
        let mut rays = Vec::with_capacity(width * height);
        for v in 0..height {
            for u in 0..width {
                let t = k.ray(u as f64, v as f64);
                let norm = t.norm();
                rays.push((t / norm, norm));
            }
        }
        let mut inv = vec![None; width * height];
        if width >= 3 && height >= 3 {
            for v in 1..height - 1 {
                for u in 1..width - 1 {
                    let mut m = Mat3::zeros();
                    for dv in -1i64..=1 {
                        for du in -1i64..=1 {
                            let i = (v as i64 + dv) as usize * width + (u as i64 + du) as usize;
                            m.add_outer(rays[i].0, 1.0);
                        }
                    }
                    inv[v * width + u] = invert_checked(&m);
                }
            }
        }
        FalsContext {
            width,
            height,
            rays,
            inv,
        }
    }

    pub fn estimate(&self, depth: &DepthImage) -> Result<NormalMap> {
        let (w, h) = (self.width, self.height);
        let mut out = NormalMap::new(w, h);
        if depth.width() != w || depth.height() != h {
            return Err(crate::error::Error::invalid(format!(
                "FALS context is {w}x{h}, depth is {}x{}",
                depth.width(),
                depth.height()
            )));
        }
        if w < 3 || h < 3 {
            return Ok(out);
        }
        for v in 1..h - 1 {
            for u in 1..w - 1 {
                let Some(zc) = depth.get(u, v) else { continue };
                let mut rhs = Vec3::ZERO;
                let mut valid = 0usize;
                let mut full = true;
                let mut partial = Mat3::zeros();
                for dv in -1i64..=1 {
                    for du in -1i64..=1 {
                        let (uu, vv) = ((u as i64 + du) as usize, (v as i64 + dv) as usize);
                        match depth.get(uu, vv) {
                            Some(z) => {
                                let (vhat, tlen) = self.rays[vv * w + uu];
                                let r = z * tlen;
                                rhs = rhs + vhat / r;
                                partial.add_outer(vhat, 1.0);
                                valid += 1;
                            }
                            None => full = false,
                        }
                    }
                }
                if valid < MIN_NEIGHBORS + 1 {
                    continue;
                }
                let ntilde = if full {
                    match self.inv[v * w + u] {
                        Some(minv) => minv.mul_vec(rhs),
                        None => continue,
                    }
                } else {
                    match invert_checked(&partial) {
                        Some(minv) => minv.mul_vec(rhs),
                        None => continue,
                    }
                };
                if ntilde.normalized().is_none() {
                    continue;
                }
                let (vhat, tlen) = self.rays[v * w + u];
                let center = vhat * (zc * tlen);
                if let Ok(n) = orient_toward_camera(ntilde, center) {
                    out.set(u, v, n);
                }
            }
        }
        Ok(out)
    }
}

/// Fast approximate least squares over the window rays.
pub fn fals(depth: &DepthImage, k: &CameraIntrinsics) -> Result<NormalMap> {
    FalsContext::new(depth.width(), depth.height(), k).estimate(depth)
}

/// SRI needs cos(phi) above this to stay away from the spherical poles.
const SRI_MIN_COS_PHI: f64 = 1e-9;

/// Spherical range image estimator: normals from partial derivatives of
/// range over the spherical angles. Angular spacing is non-uniform on a
/// pinhole grid, so the finite differences of r are related to (theta, phi)
/// derivatives through the per-pixel 2x2 Jacobian of the angle images.
pub fn sri(depth: &DepthImage, k: &CameraIntrinsics) -> Result<NormalMap> {
    let (w, h) = (depth.width(), depth.height());
    let mut r_img = ScalarImage::new(w, h);
    let mut th_img = ScalarImage::new(w, h);
    let mut ph_img = ScalarImage::new(w, h);
    for v in 0..h {
        for u in 0..w {
            if let Some(z) = depth.get(u, v) {
                let p = backproject(k, u as f64, v as f64, z)?;
                let r = p.norm();
                r_img.set(u, v, r);
                th_img.set(u, v, p.x.atan2(p.z));
                ph_img.set(u, v, (p.y / r).asin());
            }
        }
    }

    let mut out = NormalMap::new(w, h);
    if w < 3 || h < 3 {
        return Ok(out);
    }
    for v in 1..h - 1 {
        for u in 1..w - 1 {
            let (Some(r), Some(theta), Some(phi)) =
                (r_img.get(u, v), th_img.get(u, v), ph_img.get(u, v))
            else {
                continue;
            };
            let cross = |img: &ScalarImage| -> Option<(f64, f64)> {
                Some((
                    img.get(u + 1, v)? - img.get(u - 1, v)?,
                    img.get(u, v + 1)? - img.get(u, v - 1)?,
                ))
            };
            let (Some((dr_u, dr_v)), Some((dth_u, dth_v)), Some((dph_u, dph_v))) =
                (cross(&r_img), cross(&th_img), cross(&ph_img))
            else {
                continue;
            };
            let cos_phi = phi.cos();
            if cos_phi < SRI_MIN_COS_PHI {
                continue;
            }
            // Solve [dr_u; dr_v] = J [dr/dtheta; dr/dphi].
            let det = dth_u * dph_v - dph_u * dth_v;
            if det.abs() < 1e-300 {
                continue;
            }
            let dr_dth = (dr_u * dph_v - dph_u * dr_v) / det;
            let dr_dph = (dth_u * dr_v - dr_u * dth_v) / det;
            let g_th = dr_dth / (r * cos_phi);
            let g_ph = dr_dph / r;
            // Gradient of F(p) = |p| - s(theta, phi): radial part minus the
            // tangential slopes along the local theta/phi directions.
            let rot = Mat3::rot_y(theta).mul_mat(&Mat3::rot_x(-phi));
            let n = rot.mul_vec(Vec3::new(-g_th, -g_ph, 1.0));
            let zc = depth.get(u, v).expect("checked");
            let p = backproject(k, u as f64, v as f64, zc)?;
            if let Some(_unit) = n.normalized() {
                if let Ok(oriented) = orient_toward_camera(n, p) {
                    out.set(u, v, oriented);
                }
            }
        }
    }
    Ok(out)
}

/// LINE-MOD estimator: a plane through three points stepped along the lines
/// of sight, with centered finite differences (halved to per-pixel units) on
/// the depth image.
pub fn line_mod(depth: &DepthImage, k: &CameraIntrinsics) -> Result<NormalMap> {
    let (w, h) = (depth.width(), depth.height());
    let mut out = NormalMap::new(w, h);
    if w < 3 || h < 3 {
        return Ok(out);
    }
    for v in 1..h - 1 {
        for u in 1..w - 1 {
            let (Some(z), Some(ze), Some(zw), Some(zs), Some(zn)) = (
                depth.get(u, v),
                depth.get(u + 1, v),
                depth.get(u - 1, v),
                depth.get(u, v + 1),
                depth.get(u, v - 1),
            ) else {
                continue;
            };
            let (uf, vf) = (u as f64, v as f64);
            // Centered tangent vectors from the backprojected 4-neighbors;
            // their cross product is the (unnormalized) surface normal.
            let p0 = k.ray(uf, vf) * z;
            let tu = k.ray(uf + 1.0, vf) * ze - k.ray(uf - 1.0, vf) * zw;
            let tv = k.ray(uf, vf + 1.0) * zs - k.ray(uf, vf - 1.0) * zn;
            let n = tu.cross(tv);
            if n.normalized().is_none() {
                continue;
            }
            if let Ok(oriented) = orient_toward_camera(n, p0) {
                out.set(u, v, oriented);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::DepthImage;

    fn k500() -> CameraIntrinsics {
        CameraIntrinsics::new(500.0, 500.0, 320.0, 240.0).unwrap()
    }

    fn plane_depth(k: &CameraIntrinsics, n: Vec3, p0: Point3, w: usize, h: usize) -> DepthImage {
        let b = -n.dot(p0);
        DepthImage::from_fn(w, h, |u, v| {
            let inv = -(n.x * (u as f64 - k.u0) / k.fx + n.y * (v as f64 - k.v0) / k.fy + n.z) / b;
            (inv > 0.0).then(|| 1.0 / inv)
        })
    }

    type EstimatorFn = fn(&DepthImage, &CameraIntrinsics) -> Result<NormalMap>;

    const ALL: [(&str, EstimatorFn); 8] = [
        ("plane_svd", plane_svd),
        ("plane_pca", plane_pca),
        ("vector_svd", vector_svd),
        ("area_weighted", area_weighted),
        ("angle_weighted", angle_weighted),
        ("fals", fals),
        ("sri", sri),
        ("line_mod", line_mod),
    ];

    #[test]
    fn slanted_plane_fixture() {
        let k = k500();
        let s = 1.0 / 2.0f64.sqrt();
        let n_gt = Vec3::new(-s, 0.0, -s);
        let depth = plane_depth(&k, n_gt, Point3::new(0.0, 0.0, 2.0), 21, 15);
        for (name, est) in ALL {
            let tol = if name == "sri" { 0.5 } else { 0.01 };
            let nm = est(&depth, &k).unwrap();
            for v in 1..14 {
                for u in 1..20 {
                    let n = nm.get(u, v).unwrap_or_else(|| panic!("{name} invalid at ({u},{v})"));
                    let err = n.angle_deg(n_gt);
                    assert!(err < tol, "{name} at ({u},{v}): {err} deg");
                }
            }
        }
    }

    #[test]
    fn constant_depth_fixture() {
        let k = k500();
        let depth = DepthImage::from_fn(17, 13, |_, _| Some(2.5));
        let flat = Vec3::new(0.0, 0.0, -1.0);
        for (name, est) in ALL {
            // SRI differentiates over a spherical grid, so even a
            // fronto-parallel plane is only approximate.
            let tol = if name == "sri" { 0.5 } else { 1e-6 };
            let nm = est(&depth, &k).unwrap();
            for v in 1..12 {
                for u in 1..16 {
                    let n = nm.get(u, v).unwrap_or_else(|| panic!("{name} invalid at ({u},{v})"));
                    assert!(n.angle_deg(flat) < tol, "{name} at ({u},{v})");
                }
            }
        }
    }

    #[test]
    fn on_axis_sphere_principal_point() {
        // Sphere of radius 1 centered at (0,0,3): symmetric about the axis,
        // so the principal-point normal must be [0,0,-1].
        let k = k500();
        let depth = DepthImage::from_fn(641, 481, |u, v| {
            let x = (u as f64 - k.u0) / k.fx;
            let y = (v as f64 - k.v0) / k.fy;
            // ray p = t*(x,y,1); |p - (0,0,3)|^2 = 1
            let a = x * x + y * y + 1.0;
            let bq = -6.0;
            let cq = 8.0;
            let disc = bq * bq - 4.0 * a * cq;
            (disc >= 0.0).then(|| (-bq - disc.sqrt()) / (2.0 * a))
        });
        let flat = Vec3::new(0.0, 0.0, -1.0);
        for (name, est) in ALL {
            let nm = est(&depth, &k).unwrap();
            let n = nm.get(320, 240).unwrap();
            assert!(n.angle_deg(flat) < 0.1, "{name}: {} deg", n.angle_deg(flat));
        }
    }

    #[test]
    fn sri_constant_range_is_radial() {
        // Constant r: both partials vanish and the normal is the ray
        // direction. This pins the rotation convention.
        let k = k500();
        let depth = DepthImage::from_fn(41, 31, |u, v| {
            let t = k.ray(u as f64, v as f64);
            Some(2.0 / t.norm()) // r = z * |t| = 2
        });
        let nm = sri(&depth, &k).unwrap();
        for v in 1..30 {
            for u in 1..40 {
                let n = nm.get(u, v).expect("valid");
                let ray = k.ray(u as f64, v as f64);
                let align = n.angle_deg(ray).min(n.angle_deg(-ray));
                assert!(align < 0.1, "({u},{v}): {align} deg");
            }
        }
    }

    #[test]
    fn window_solvers_rotation_equivariant() {
        let k = k500();
        let depth = DepthImage::from_fn(5, 5, |u, v| {
            Some(2.0 + 0.01 * u as f64 + 0.02 * v as f64 + 0.001 * (u * v) as f64)
        });
        let nb = gather(&depth, &k, 2, 2).unwrap();
        let rot = Mat3::rot_y(0.4).mul_mat(&Mat3::rot_x(-0.9)).mul_mat(&Mat3::rot_z(1.3));
        let nb_rot = nb.rotated(&rot);
        for solve in [
            neighborhood_plane_svd,
            neighborhood_plane_pca,
            neighborhood_vector_svd,
        ] {
            let n = solve(&nb).unwrap();
            let nr = solve(&nb_rot).unwrap();
            let want = rot.mul_vec(n);
            let align = want.dot(nr).abs();
            assert!(align > 1.0 - 1e-8, "alignment {align}");
        }
    }

    #[test]
    fn few_neighbors_invalid() {
        let k = k500();
        // Only center and two neighbors valid: below the k >= 3 floor.
        let depth = DepthImage::from_fn(3, 3, |u, v| {
            matches!((u, v), (1, 1) | (0, 1) | (2, 1)).then_some(2.0)
        });
        for (name, est) in ALL {
            let nm = est(&depth, &k).unwrap();
            assert_eq!(nm.valid_count(), 0, "{name}");
        }
    }

    #[test]
    fn partial_window_still_estimates() {
        let k = k500();
        let s = 1.0 / 2.0f64.sqrt();
        let n_gt = Vec3::new(-s, 0.0, -s);
        let mut depth = plane_depth(&k, n_gt, Point3::new(0.0, 0.0, 2.0), 5, 5);
        // knock out one corner of the center window
        let grid = depth.grid().clone();
        let mut g = grid;
        g.invalidate(1, 1);
        depth = DepthImage::new(g);
        for solve in [plane_svd, plane_pca, vector_svd, area_weighted, angle_weighted, fals] {
            let nm = solve(&depth, &k).unwrap();
            let n = nm.get(2, 2).expect("k=7 window still valid");
            assert!(n.angle_deg(n_gt) < 0.01);
        }
    }
}
