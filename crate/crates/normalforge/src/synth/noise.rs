//! Gaussian depth noise with per-pixel counter-based seeding, so the result
//! is independent of how work is split across threads.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::image::{DepthImage, ScalarImage};

/// Gaussian noise parameters.
#[derive(Debug, Clone, Copy)]
pub struct NoiseSpec {
    /// Standard deviation in meters.
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(Error::config("noise sigma must be >= 0"));
        }
        Ok(NoiseSpec { sigma, seed })
    }
}

/// SplitMix64 finalizer: decorrelates the per-pixel stream seeds.
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Add independent zero-mean Gaussian noise to every valid pixel. Pixels
/// pushed to z <= 0 become invalid. Each pixel draws from its own stream
/// keyed by (seed, pixel index), so the output never depends on iteration
/// order or thread count.
pub fn add_gaussian_noise(depth: &DepthImage, spec: &NoiseSpec) -> DepthImage {
    let (w, h) = (depth.width(), depth.height());
    if spec.sigma == 0.0 {
        return depth.clone();
    }
    let out = ScalarImage::from_fn(w, h, |u, v| {
        depth.get(u, v).and_then(|z| {
            let idx = (v * w + u) as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(mix(spec.seed ^ mix(idx)));
            let e: f64 = rng.sample(StandardNormal);
            let zn = z + spec.sigma * e;
            if zn > 0.0 {
                Some(zn)
            } else {
                None
            }
        })
    });
    DepthImage::new(out)
}

/// The named presets: sigma as a fraction of the frame's mean valid depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoisePreset {
    Low,
    Medium,
    High,
}

impl NoisePreset {
    pub fn fraction(self) -> f64 {
        match self {
            NoisePreset::Low => 0.001,
            NoisePreset::Medium => 0.003,
            NoisePreset::High => 0.01,
        }
    }

    /// Resolve the preset against a frame: sigma = fraction x mean valid depth.
    pub fn sigma_for(self, depth: &DepthImage) -> Result<f64> {
        let vals: Vec<f64> = (0..depth.height())
            .flat_map(|v| (0..depth.width()).filter_map(move |u| depth.get(u, v)))
            .collect();
        if vals.is_empty() {
            return Err(Error::invalid("cannot scale noise preset: no valid depths"));
        }
        Ok(self.fraction() * vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

impl std::str::FromStr for NoisePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "low" => Ok(NoisePreset::Low),
            "medium" | "med" => Ok(NoisePreset::Medium),
            "high" => Ok(NoisePreset::High),
            other => Err(Error::config(format!(
                "unknown noise preset '{other}' (expected low, medium, or high)"
            ))),
        }
    }
}
