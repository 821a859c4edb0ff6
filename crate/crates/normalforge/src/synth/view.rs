//! Camera poses and viewpoint sampling on a sphere around the object.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::UnitSphere;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{Mat3, Point3, Vec3};

/// Object-to-camera rigid transform: `p_cam = rotation * p_obj + translation`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Pose {
    pub rotation: Mat3,
    pub translation: Vec3,
}

impl Pose {
    pub fn new(rotation: Mat3, translation: Vec3) -> Result<Self> {
        let det = rotation.determinant();
        if (det - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "pose rotation determinant {det} is not 1"
            )));
        }
        let rt = rotation.mul_mat(&rotation.transpose());
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                if (rt.0[i][j] - want).abs() > 1e-9 {
                    return Err(Error::invalid("pose rotation is not orthonormal"));
                }
            }
        }
        Ok(Pose {
            rotation,
            translation,
        })
    }

    pub fn transform_point(&self, p: Point3) -> Point3 {
        self.rotation.mul_vec(p) + self.translation
    }

    pub fn transform_direction(&self, d: Vec3) -> Vec3 {
        self.rotation.mul_vec(d)
    }

    /// Camera center in the object frame: `-Rᵀ t`.
    pub fn camera_center(&self) -> Point3 {
        -self.rotation.transpose().mul_vec(self.translation)
    }

    /// Look-at pose: camera at `center` (object frame) with its +z axis
    /// toward `target`. The up hint fixes the roll; it falls back to +x when
    /// the view direction is (anti)parallel to the hint.
    pub fn look_at(center: Point3, target: Point3, up_hint: Vec3) -> Result<Self> {
        let z = (target - center)
            .normalized()
            .ok_or_else(|| Error::invalid("look_at: camera center equals target"))?;
        let up = if up_hint.cross(z).norm() > 1e-6 {
            up_hint
        } else {
            Vec3::new(1.0, 0.0, 0.0)
        };
        // Right-handed basis with image v growing downward: y_cam = -up
        // projected off z.
        let x = up.cross(z).normalized().unwrap();
        let y = z.cross(x);
        let rotation = Mat3([x.to_array(), y.to_array(), z.to_array()]);
        let translation = -rotation.mul_vec(center);
        Pose::new(rotation, translation)
    }
}

/// Poses with camera centers uniformly sampled on the sphere of `radius`
/// around the origin, each looking at the origin. The first pose is always
/// the canonical one on the +z axis; the rest depend on `seed` only.
pub fn sample_viewpoints(n: usize, radius: f64, seed: u64) -> Result<Vec<Pose>> {
    if n == 0 {
        return Err(Error::config("viewpoint count must be >= 1"));
    }
    if !(radius > 0.0) {
        return Err(Error::config("viewpoint radius must be positive"));
    }
    let up = Vec3::new(0.0, 1.0, 0.0);
    let mut poses = Vec::with_capacity(n);
    poses.push(Pose::look_at(
        Point3::new(0.0, 0.0, radius),
        Point3::new(0.0, 0.0, 0.0),
        up,
    )?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while poses.len() < n {
        let dir: [f64; 3] = UnitSphere.sample(&mut rng);
        let center = Vec3::from_array(dir) * radius;
        poses.push(Pose::look_at(center, Point3::new(0.0, 0.0, 0.0), up)?);
    }
    Ok(poses)
}
