//! The method registry: the eight three-filter variants (kernel x
//! aggregator) plus the eight geometry-based baselines, addressable by the
//! hyphenated names used in reports and on the command line.

use crate::baselines;
use crate::camera::CameraIntrinsics;
use crate::error::{Error, Result};
use crate::filters::{AggregatorKind, GradientKernelKind};
use crate::image::{DepthImage, DisparityImage, NormalMap};
use crate::three_filters::{estimate_from_depth, estimate_from_disparity, ThreeFiltersConfig};

/// One named estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ThreeFilters(GradientKernelKind, AggregatorKind),
    PlaneSvd,
    PlanePca,
    VectorSvd,
    AreaWeighted,
    AngleWeighted,
    Fals,
    Sri,
    LineMod,
}

impl Method {
    /// Every method, in registry order (the 8 filter variants first).
    pub fn all() -> Vec<Method> {
        let mut out = Vec::with_capacity(16);
        for kernel in GradientKernelKind::ALL {
            for agg in [AggregatorKind::Mean, AggregatorKind::Median] {
                out.push(Method::ThreeFilters(kernel, agg));
            }
        }
        out.extend([
            Method::PlaneSvd,
            Method::PlanePca,
            Method::VectorSvd,
            Method::AreaWeighted,
            Method::AngleWeighted,
            Method::Fals,
            Method::Sri,
            Method::LineMod,
        ]);
        out
    }

    pub fn name(&self) -> String {
        match self {
            Method::ThreeFilters(kernel, agg) => {
                let k = match kernel {
                    GradientKernelKind::Fd => "fd",
                    GradientKernelKind::Sobel => "sobel",
                    GradientKernelKind::Scharr => "scharr",
                    GradientKernelKind::Prewitt => "prewitt",
                };
                let a = match agg {
                    AggregatorKind::Mean => "mean",
                    AggregatorKind::Median => "median",
                };
                format!("{k}-{a}")
            }
            Method::PlaneSvd => "plane-svd".into(),
            Method::PlanePca => "plane-pca".into(),
            Method::VectorSvd => "vector-svd".into(),
            Method::AreaWeighted => "area-weighted".into(),
            Method::AngleWeighted => "angle-weighted".into(),
            Method::Fals => "fals".into(),
            Method::Sri => "sri".into(),
            Method::LineMod => "line-mod".into(),
        }
    }

    /// Estimate normals from a depth image.
    pub fn estimate_depth(&self, depth: &DepthImage, k: &CameraIntrinsics) -> Result<NormalMap> {
        match self {
            Method::ThreeFilters(kernel, agg) => {
                estimate_from_depth(depth, k, &ThreeFiltersConfig::new(*kernel, *agg))
            }
            Method::PlaneSvd => baselines::plane_svd(depth, k),
            Method::PlanePca => baselines::plane_pca(depth, k),
            Method::VectorSvd => baselines::vector_svd(depth, k),
            Method::AreaWeighted => baselines::area_weighted(depth, k),
            Method::AngleWeighted => baselines::angle_weighted(depth, k),
            Method::Fals => baselines::fals(depth, k),
            Method::Sri => baselines::sri(depth, k),
            Method::LineMod => baselines::line_mod(depth, k),
        }
    }

    /// Estimate normals from a disparity image. The three-filter methods use
    /// their native disparity path; the baselines convert to depth first.
    pub fn estimate_disparity(
        &self,
        disp: &DisparityImage,
        k: &CameraIntrinsics,
    ) -> Result<NormalMap> {
        match self {
            Method::ThreeFilters(kernel, agg) => {
                estimate_from_disparity(disp, k, &ThreeFiltersConfig::new(*kernel, *agg))
            }
            _ => {
                let depth = crate::image::disparity_to_depth(k, disp)?;
                self.estimate_depth(&depth, k)
            }
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::all()
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown method '{s}' (known: {})",
                    Method::all()
                        .iter()
                        .map(|m| m.name())
                        .collect::<Vec<_>>()
                        .join(", ")
                ))
            })
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name())
    }
}
