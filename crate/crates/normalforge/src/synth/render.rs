//! Depth raycasting with per-triangle ground-truth normals.
//!
//! Rays go through integer pixel coordinates (the same convention as
//! `backproject`), all triangles are tested through a bounding-volume
//! hierarchy, and the nearest hit with t > 0 wins. The ground-truth normal
//! at a hit is the triangle's normal rotated to the camera frame and
//! oriented camera-facing.

use rayon::prelude::*;

use crate::camera::{orient_toward_camera, CameraIntrinsics};
use crate::error::{Error, Result};
use crate::image::{DepthImage, NormalMap, ScalarImage};
use crate::math::{Point3, Vec3};
use crate::synth::mesh::TriangleMesh;
use crate::synth::view::Pose;

/// Triangle in the camera frame with its unit normal.
#[derive(Debug, Clone, Copy)]
struct CamTriangle {
    a: Point3,
    b: Point3,
    c: Point3,
    normal: Vec3,
}

#[derive(Debug, Clone, Copy)]
struct Aabb {
    min: Point3,
    max: Point3,
}

impl Aabb {
    fn empty() -> Self {
        Aabb {
            min: Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
            max: Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn grow(&mut self, p: Point3) {
        self.min = Point3::new(self.min.x.min(p.x), self.min.y.min(p.y), self.min.z.min(p.z));
        self.max = Point3::new(self.max.x.max(p.x), self.max.y.max(p.y), self.max.z.max(p.z));
    }

    /// Slab test against a ray from the origin; returns the entry t if the
    /// box is hit before `t_max`.
    fn hit(&self, inv_dir: Vec3, t_max: f64) -> Option<f64> {
        let mut t0 = 0.0f64;
        let mut t1 = t_max;
        for axis in 0..3 {
            let (lo, hi, inv) = match axis {
                0 => (self.min.x, self.max.x, inv_dir.x),
                1 => (self.min.y, self.max.y, inv_dir.y),
                _ => (self.min.z, self.max.z, inv_dir.z),
            };
            let (mut ta, mut tb) = (lo * inv, hi * inv);
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
            if t0 > t1 {
                return None;
            }
        }
        Some(t0)
    }
}

enum BvhNode {
    Leaf {
        bounds: Aabb,
        start: usize,
        count: usize,
    },
    Inner {
        bounds: Aabb,
        left: usize,
        right: usize,
    },
}

struct Bvh {
    nodes: Vec<BvhNode>,
    tris: Vec<CamTriangle>,
}

const LEAF_SIZE: usize = 4;

impl Bvh {
    fn build(mut tris: Vec<CamTriangle>) -> Self {
        let mut nodes = Vec::new();
        if !tris.is_empty() {
            let n = tris.len();
            Self::build_range(&mut tris, 0, n, &mut nodes);
        }
        Bvh { nodes, tris }
    }

    fn build_range(
        tris: &mut [CamTriangle],
        start: usize,
        end: usize,
        nodes: &mut Vec<BvhNode>,
    ) -> usize {
        let mut bounds = Aabb::empty();
        let mut centroid_bounds = Aabb::empty();
        for t in &tris[start..end] {
            bounds.grow(t.a);
            bounds.grow(t.b);
            bounds.grow(t.c);
            centroid_bounds.grow((t.a + t.b + t.c) / 3.0);
        }
        let count = end - start;
        let me = nodes.len();
        if count <= LEAF_SIZE {
            nodes.push(BvhNode::Leaf {
                bounds,
                start,
                count,
            });
            return me;
        }
        // Split at the centroid midpoint of the longest axis.
        let ext = centroid_bounds.max - centroid_bounds.min;
        let axis = if ext.x >= ext.y && ext.x >= ext.z {
            0
        } else if ext.y >= ext.z {
            1
        } else {
            2
        };
        let key = |t: &CamTriangle| {
            let c = (t.a + t.b + t.c) / 3.0;
            match axis {
                0 => c.x,
                1 => c.y,
                _ => c.z,
            }
        };
        let mid_value = match axis {
            0 => (centroid_bounds.min.x + centroid_bounds.max.x) / 2.0,
            1 => (centroid_bounds.min.y + centroid_bounds.max.y) / 2.0,
            _ => (centroid_bounds.min.z + centroid_bounds.max.z) / 2.0,
        };
        let mut mid = start
            + itertools_partition(&mut tris[start..end], |t| key(t) < mid_value);
        if mid == start || mid == end {
            // Degenerate split (all centroids equal): fall back to a median
            // split so the recursion always terminates.
            tris[start..end]
                .sort_by(|p, q| key(p).partial_cmp(&key(q)).unwrap());
            mid = start + count / 2;
        }
        nodes.push(BvhNode::Inner {
            bounds,
            left: 0,
            right: 0,
        });
        let left = Self::build_range(tris, start, mid, nodes);
        let right = Self::build_range(tris, mid, end, nodes);
        if let BvhNode::Inner {
            left: l, right: r, ..
        } = &mut nodes[me]
        {
            *l = left;
            *r = right;
        }
        me
    }

    /// Nearest intersection along `dir` from the camera origin.
    fn intersect(&self, dir: Vec3) -> Option<(f64, Vec3)> {
        if self.nodes.is_empty() {
            return None;
        }
        let inv_dir = Vec3::new(1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z);
        let mut best_t = f64::INFINITY;
        let mut best_n = Vec3::new(0.0, 0.0, 0.0);
        let mut stack = vec![0usize];
        while let Some(ix) = stack.pop() {
            match &self.nodes[ix] {
                BvhNode::Leaf {
                    bounds,
                    start,
                    count,
                } => {
                    if bounds.hit(inv_dir, best_t).is_none() {
                        continue;
                    }
                    for t in &self.tris[*start..*start + *count] {
                        if let Some(hit_t) = ray_triangle(dir, t) {
                            if hit_t < best_t {
                                best_t = hit_t;
                                best_n = t.normal;
                            }
                        }
                    }
                }
                BvhNode::Inner {
                    bounds,
                    left,
                    right,
                } => {
                    if bounds.hit(inv_dir, best_t).is_some() {
                        stack.push(*left);
                        stack.push(*right);
                    }
                }
            }
        }
        if best_t.is_finite() {
            Some((best_t, best_n))
        } else {
            None
        }
    }
}

/// Stable partition returning the number of elements satisfying the
/// predicate (moved to the front).
fn itertools_partition<T: Copy>(xs: &mut [T], pred: impl Fn(&T) -> bool) -> usize {
    let mut i = 0;
    for j in 0..xs.len() {
        if pred(&xs[j]) {
            xs.swap(i, j);
            i += 1;
        }
    }
    i
}

const RAY_EPS: f64 = 1e-12;

/// Moller-Trumbore intersection for a ray from the origin. Edge-inclusive
/// (barycentric bounds with a small epsilon) so shared triangle edges do not
/// leave pinholes.
fn ray_triangle(dir: Vec3, t: &CamTriangle) -> Option<f64> {
    let e1 = t.b - t.a;
    let e2 = t.c - t.a;
    let p = dir.cross(e2);
    let det = e1.dot(p);
    if det.abs() < RAY_EPS {
        return None;
    }
    let inv_det = 1.0 / det;
    let tvec = -t.a;
    let u = tvec.dot(p) * inv_det;
    if !(-1e-9..=1.0 + 1e-9).contains(&u) {
        return None;
    }
    let q = tvec.cross(e1);
    let v = dir.dot(q) * inv_det;
    if v < -1e-9 || u + v > 1.0 + 1e-9 {
        return None;
    }
    let hit_t = e2.dot(q) * inv_det;
    if hit_t > RAY_EPS {
        Some(hit_t)
    } else {
        None
    }
}

/// Raycast `mesh` under `pose` into a depth image plus per-pixel
/// ground-truth normals. Misses are invalid pixels.
pub fn render_depth(
    mesh: &TriangleMesh,
    k: &CameraIntrinsics,
    pose: &Pose,
    width: usize,
    height: usize,
) -> Result<(DepthImage, NormalMap)> {
    if width < 3 || height < 3 {
        return Err(Error::config("render target must be at least 3x3"));
    }
    let tris: Vec<CamTriangle> = (0..mesh.triangle_count())
        .map(|i| {
            let [a, b, c] = mesh.triangle_points(i);
            CamTriangle {
                a: pose.transform_point(a),
                b: pose.transform_point(b),
                c: pose.transform_point(c),
                normal: pose.transform_direction(mesh.normals[i]),
            }
        })
        .collect();
    let bvh = Bvh::build(tris);

    let rows: Vec<(Vec<f64>, Vec<Option<Vec3>>)> = (0..height)
        .into_par_iter()
        .map(|v| {
            let mut depths = vec![f64::NAN; width];
            let mut normals = vec![None; width];
            for u in 0..width {
                let dir = k.ray(u as f64, v as f64);
                if let Some((t, n)) = bvh.intersect(dir) {
                    let z = t * dir.z;
                    if z > 0.0 {
                        let point = dir * t;
                        if let Ok(oriented) = orient_toward_camera(n, point) {
                            depths[u] = z;
                            normals[u] = Some(oriented);
                        }
                    }
                }
            }
            (depths, normals)
        })
        .collect();

    let mut depth = ScalarImage::new(width, height);
    let mut gt = NormalMap::new(width, height);
    for (v, (drow, nrow)) in rows.into_iter().enumerate() {
        for u in 0..width {
            if let Some(n) = nrow[u] {
                depth.set(u, v, drow[u]);
                gt.set(u, v, n);
            }
        }
    }
    Ok((DepthImage::new(depth), gt))
}
