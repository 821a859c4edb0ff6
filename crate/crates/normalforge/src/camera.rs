//! Pinhole camera model and normal orientation.
//!
//! Conventions: the camera looks along +z, image `u` grows to the right and
//! `v` grows downward. Visible-surface normals are camera-facing, i.e.
//! `dot(n, p) <= 0` for the 3D point `p` the pixel observes; a fronto-parallel
//! surface therefore has normal `[0, 0, -1]`.

use crate::error::{Error, Result};
use crate::math::{Point3, Vec3};

/// Pinhole intrinsic parameters, plus an optional stereo baseline for
/// disparity input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics {
    /// Focal length in pixels along u.
    pub fx: f64,
    /// Focal length in pixels along v.
    pub fy: f64,
    /// Principal point, u coordinate.
    pub u0: f64,
    /// Principal point, v coordinate.
    pub v0: f64,
    /// Stereo baseline in meters, required for disparity input.
    pub t_c: Option<f64>,
}

impl CameraIntrinsics {
    pub fn new(fx: f64, fy: f64, u0: f64, v0: f64) -> Result<Self> {
        Self::with_baseline(fx, fy, u0, v0, None)
    }

    pub fn with_baseline(fx: f64, fy: f64, u0: f64, v0: f64, t_c: Option<f64>) -> Result<Self> {
        if !(fx > 0.0 && fx.is_finite()) {
            return Err(Error::config(format!("fx must be positive, got {fx}")));
        }
        if !(fy > 0.0 && fy.is_finite()) {
            return Err(Error::config(format!("fy must be positive, got {fy}")));
        }
        if !(u0.is_finite() && v0.is_finite()) {
            return Err(Error::config("principal point must be finite"));
        }
        if let Some(t) = t_c {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::config(format!("t_c must be positive, got {t}")));
            }
        }
        Ok(CameraIntrinsics { fx, fy, u0, v0, t_c })
    }

    /// Single focal length for stereo formulas; requires `fx == fy`.
    pub fn focal(&self) -> Result<f64> {
        if self.fx != self.fy {
            return Err(Error::config(format!(
                "stereo conversion requires fx == fy, got fx={} fy={}",
                self.fx, self.fy
            )));
        }
        Ok(self.fx)
    }

    pub fn baseline(&self) -> Result<f64> {
        self.t_c
            .ok_or_else(|| Error::config("intrinsics have no stereo baseline t_c"))
    }

    /// Direction of the viewing ray through pixel `(u, v)`, with unit z.
    pub fn ray(&self, u: f64, v: f64) -> Vec3 {
        Vec3::new((u - self.u0) / self.fx, (v - self.v0) / self.fy, 1.0)
    }

    /// Project a camera-frame point with `z > 0` to pixel coordinates.
    pub fn project(&self, p: Point3) -> Option<(f64, f64)> {
        if p.z <= 0.0 {
            return None;
        }
        Some((
            self.fx * p.x / p.z + self.u0,
            self.fy * p.y / p.z + self.v0,
        ))
    }
}

/// Back-project pixel `(u, v)` at depth `z` into the camera frame.
pub fn backproject(k: &CameraIntrinsics, u: f64, v: f64, z: f64) -> Result<Point3> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::invalid(format!(
            "backproject requires finite positive depth, got {z}"
        )));
    }
    Ok(k.ray(u, v) * z)
}

/// Resolve the sign ambiguity of an estimated normal: flip it so that it
/// faces the camera (`dot(n, p) <= 0`). When `dot(n, p) == 0` exactly the
/// normal is flipped only if its z component is positive, keeping the
/// fronto-parallel convention `[0, 0, -1]` reachable deterministically.
pub fn orient_toward_camera(n: Vec3, p: Point3) -> Result<Vec3> {
    let unit = n
        .normalized()
        .ok_or_else(|| Error::invalid("cannot orient a zero-norm normal"))?;
    let d = unit.dot(p);
    if d > 0.0 || (d == 0.0 && unit.z > 0.0) {
        Ok(-unit)
    } else {
        Ok(unit)
    }
}
