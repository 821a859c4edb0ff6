//! How the mean and median aggregators degrade with depth noise: the
//! median's robustness shows up as lower error at higher noise levels.
//!
//! Run with: cargo run --release --example noise_study

use normalforge::camera::CameraIntrinsics;
use normalforge::eval::{aae, error_map};
use normalforge::image::{DepthImage, NormalMap};
use normalforge::method::Method;
use normalforge::synth::{
    add_gaussian_noise, make_mesh, render_depth, sample_viewpoints, MeshShape, NoisePreset,
    NoiseSpec,
};

fn frame_aae(
    method: Method,
    depth: &DepthImage,
    gt: &NormalMap,
    k: &CameraIntrinsics,
) -> normalforge::Result<f64> {
    let pred = method.estimate_depth(depth, k)?;
    let map = error_map(&pred, gt)?;
    let errors: Vec<f64> = map
        .values()
        .iter()
        .zip(map.mask())
        .filter(|&(_, &ok)| ok)
        .map(|(&e, _)| e)
        .collect();
    aae(&errors)
}

fn main() -> normalforge::Result<()> {
    let (width, height) = (320, 240);
    let k = CameraIntrinsics::new(500.0, 500.0, width as f64 / 2.0, height as f64 / 2.0)?;
    let mesh = make_mesh(MeshShape::Sphere {
        radius: 1.0,
        subdivisions: 4,
    })?;
    let pose = sample_viewpoints(1, 3.0, 0)?[0];
    let (clean, gt) = render_depth(&mesh, &k, &pose, width, height)?;

    let fd_mean: Method = "fd-mean".parse()?;
    let fd_median: Method = "fd-median".parse()?;

    println!(
        "{:<10} {:>12} {:>14} {:>16}",
        "noise", "sigma (m)", "fd-mean (deg)", "fd-median (deg)"
    );
    let mut rows = vec![("none".to_string(), 0.0)];
    for preset in [NoisePreset::Low, NoisePreset::Medium, NoisePreset::High] {
        rows.push((format!("{preset:?}").to_lowercase(), preset.sigma_for(&clean)?));
    }
    for (label, sigma) in rows {
        let depth = if sigma > 0.0 {
            add_gaussian_noise(&clean, &NoiseSpec::new(sigma, 42)?)
        } else {
            clean.clone()
        };
        println!(
            "{:<10} {:>12.5} {:>14.3} {:>16.3}",
            label,
            sigma,
            frame_aae(fd_mean, &depth, &gt, &k)?,
            frame_aae(fd_median, &depth, &gt, &k)?
        );
    }
    Ok(())
}
