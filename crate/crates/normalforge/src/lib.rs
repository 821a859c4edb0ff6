// `!(x > 0.0)`-style comparisons deliberately reject NaN alongside the
// out-of-range values; index-based loops in the fixed-size linear algebra
// mirror the usual textbook notation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

//! Surface normal estimation for structured range data.
//!
//! The core estimator recovers per-pixel surface normals from a depth or
//! disparity image with three filters: a horizontal and a vertical gradient
//! filter on the inverse-depth (or disparity) image give the x and y normal
//! components directly, and a mean or median filter over the eight
//! neighboring depth differences gives the z component. Eight geometry-based
//! estimators (plane fitting, vector averaging, FALS, SRI, LINE-MOD) are
//! provided for comparison, together with a synthetic dataset generator,
//! evaluation metrics, and bit-exact file formats.
//!
//! ```
//! use normalforge::camera::CameraIntrinsics;
//! use normalforge::image::DepthImage;
//! use normalforge::method::Method;
//!
//! let k = CameraIntrinsics::new(500.0, 500.0, 32.0, 24.0).unwrap();
//! // A fronto-parallel plane two meters out.
//! let depth = DepthImage::from_fn(64, 48, |_, _| Some(2.0));
//! let method: Method = "fd-median".parse().unwrap();
//! let normals = method.estimate_depth(&depth, &k).unwrap();
//! let n = normals.get(32, 24).unwrap();
//! assert!((n.z + 1.0).abs() < 1e-9);
//! ```

pub mod baselines;
pub mod camera;
pub mod cli;
pub mod error;
pub mod eval;
pub mod filters;
pub mod image;
pub mod io;
pub mod math;
pub mod method;
pub mod synth;
pub mod three_filters;

pub use camera::CameraIntrinsics;
pub use error::{Error, Result};
pub use eval::EvalReport;
pub use image::{DepthImage, DisparityImage, NormalMap, ScalarImage};
pub use math::{Mat3, Point3, Vec3};
pub use method::Method;
