//! Image containers: scalar grids with validity masks and normal maps.
//!
//! Invalid pixels are tracked in an explicit mask rather than by sentinel
//! values; non-finite or out-of-domain values are folded into the mask at
//! construction so estimators never have to re-check them.

use crate::camera::CameraIntrinsics;
use crate::error::{Error, Result};
use crate::math::Vec3;

/// An H x W grid of f64 samples with a per-pixel validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarImage {
    width: usize,
    height: usize,
    values: Vec<f64>,
    mask: Vec<bool>,
}

impl ScalarImage {
    /// All-invalid image of the given size.
    pub fn new(width: usize, height: usize) -> Self {
        ScalarImage {
            width,
            height,
            values: vec![0.0; width * height],
            mask: vec![false; width * height],
        }
    }

    /// Build from row-major values; non-finite entries become invalid pixels.
    pub fn from_values(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::invalid(format!(
                "expected {} values for a {}x{} image, got {}",
                width * height,
                width,
                height,
                values.len()
            )));
        }
        let mask = values.iter().map(|v| v.is_finite()).collect();
        Ok(ScalarImage {
            width,
            height,
            values,
            mask,
        })
    }

    /// Fill from a function of pixel coordinates; `None` marks invalid.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> Option<f64>) -> Self {
        let mut img = ScalarImage::new(width, height);
        for v in 0..height {
            for u in 0..width {
                if let Some(x) = f(u, v) {
                    if x.is_finite() {
                        img.set(u, v, x);
                    }
                }
            }
        }
        img
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn idx(&self, u: usize, v: usize) -> usize {
        v * self.width + u
    }

    #[inline]
    pub fn is_valid(&self, u: usize, v: usize) -> bool {
        self.mask[self.idx(u, v)]
    }

    /// Value at a valid pixel, `None` otherwise.
    #[inline]
    pub fn get(&self, u: usize, v: usize) -> Option<f64> {
        let i = self.idx(u, v);
        if self.mask[i] {
            Some(self.values[i])
        } else {
            None
        }
    }

    /// Raw value ignoring the mask. Only meaningful for valid pixels.
    #[inline]
    pub fn raw(&self, u: usize, v: usize) -> f64 {
        self.values[self.idx(u, v)]
    }

    pub fn set(&mut self, u: usize, v: usize, value: f64) {
        let i = self.idx(u, v);
        self.values[i] = value;
        self.mask[i] = value.is_finite();
    }

    pub fn invalidate(&mut self, u: usize, v: usize) {
        let i = self.idx(u, v);
        self.mask[i] = false;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    pub fn same_size(&self, other: &ScalarImage) -> bool {
        self.width == other.width && self.height == other.height
    }
}

macro_rules! scalar_wrapper {
    ($(#[$doc:meta])* $name:ident, $keep:expr) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name(ScalarImage);

        impl $name {
            /// Wrap a grid, invalidating pixels outside the type's domain.
            pub fn new(mut grid: ScalarImage) -> Self {
                let keep: fn(f64) -> bool = $keep;
                for v in 0..grid.height() {
                    for u in 0..grid.width() {
                        if let Some(x) = grid.get(u, v) {
                            if !keep(x) {
                                grid.invalidate(u, v);
                            }
                        }
                    }
                }
                $name(grid)
            }

            pub fn from_values(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
                Ok(Self::new(ScalarImage::from_values(width, height, values)?))
            }

            pub fn from_fn(
                width: usize,
                height: usize,
                f: impl FnMut(usize, usize) -> Option<f64>,
            ) -> Self {
                Self::new(ScalarImage::from_fn(width, height, f))
            }

            pub fn grid(&self) -> &ScalarImage {
                &self.0
            }

            pub fn into_grid(self) -> ScalarImage {
                self.0
            }

            pub fn width(&self) -> usize {
                self.0.width()
            }

            pub fn height(&self) -> usize {
                self.0.height()
            }

            pub fn is_valid(&self, u: usize, v: usize) -> bool {
                self.0.is_valid(u, v)
            }

            pub fn get(&self, u: usize, v: usize) -> Option<f64> {
                self.0.get(u, v)
            }
        }
    };
}

scalar_wrapper!(
    /// Per-pixel depth z in meters; valid pixels are finite and positive.
    DepthImage,
    |z| z > 0.0
);

scalar_wrapper!(
    /// Per-pixel stereo disparity in pixels; valid pixels are finite and positive.
    DisparityImage,
    |d| d > 0.0
);

scalar_wrapper!(
    /// Per-pixel 1/z in 1/meters; valid pixels are finite and positive.
    InverseDepthImage,
    |w| w > 0.0
);

/// Per-pixel unit surface normals with a validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalMap {
    width: usize,
    height: usize,
    normals: Vec<Vec3>,
    mask: Vec<bool>,
}

impl NormalMap {
    pub fn new(width: usize, height: usize) -> Self {
        NormalMap {
            width,
            height,
            normals: vec![Vec3::ZERO; width * height],
            mask: vec![false; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn idx(&self, u: usize, v: usize) -> usize {
        v * self.width + u
    }

    #[inline]
    pub fn is_valid(&self, u: usize, v: usize) -> bool {
        self.mask[self.idx(u, v)]
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> Option<Vec3> {
        let i = self.idx(u, v);
        if self.mask[i] {
            Some(self.normals[i])
        } else {
            None
        }
    }

    pub fn set(&mut self, u: usize, v: usize, n: Vec3) {
        let i = self.idx(u, v);
        self.normals[i] = n;
        self.mask[i] = true;
    }

    pub fn invalidate(&mut self, u: usize, v: usize) {
        let i = self.idx(u, v);
        self.mask[i] = false;
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    pub fn same_size(&self, other: &NormalMap) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Per-pixel 1/z. Non-positive or invalid depths stay invalid.
pub fn inverse_depth(depth: &DepthImage) -> InverseDepthImage {
    InverseDepthImage::from_fn(depth.width(), depth.height(), |u, v| {
        depth.get(u, v).map(|z| 1.0 / z)
    })
}

/// Depth from disparity via `z = f * t_c / d`. Requires a stereo baseline
/// and a single focal length (`fx == fy`).
pub fn disparity_to_depth(k: &CameraIntrinsics, disp: &DisparityImage) -> Result<DepthImage> {
    let f = k.focal()?;
    let t_c = k.baseline()?;
    Ok(DepthImage::from_fn(disp.width(), disp.height(), |u, v| {
        disp.get(u, v).map(|d| f * t_c / d)
    }))
}

/// Disparity from depth, the inverse of [`disparity_to_depth`].
pub fn depth_to_disparity(k: &CameraIntrinsics, depth: &DepthImage) -> Result<DisparityImage> {
    let f = k.focal()?;
    let t_c = k.baseline()?;
    Ok(DisparityImage::from_fn(
        depth.width(),
        depth.height(),
        |u, v| depth.get(u, v).map(|z| f * t_c / z),
    ))
}
