//! Run the estimator on stereo disparity input and check that it agrees
//! with the depth path. For a stereo rig, z = f * t_c / d, and the gradient
//! filters can be applied to the disparity image directly because disparity
//! is proportional to inverse depth.
//!
//! Run with: cargo run --release --example disparity_pipeline

use normalforge::camera::CameraIntrinsics;
use normalforge::image::depth_to_disparity;
use normalforge::method::Method;
use normalforge::synth::{make_mesh, render_depth, sample_viewpoints, MeshShape};

fn main() -> normalforge::Result<()> {
    let (width, height) = (320, 240);
    let k = CameraIntrinsics::with_baseline(
        500.0,
        500.0,
        width as f64 / 2.0,
        height as f64 / 2.0,
        Some(0.1), // 10 cm stereo baseline
    )?;
    let mesh = make_mesh(MeshShape::Sphere {
        radius: 1.0,
        subdivisions: 4,
    })?;
    let pose = sample_viewpoints(1, 3.0, 0)?[0];
    let (depth, _gt) = render_depth(&mesh, &k, &pose, width, height)?;
    let disparity = depth_to_disparity(&k, &depth)?;

    let method: Method = "fd-median".parse()?;
    let from_depth = method.estimate_depth(&depth, &k)?;
    let from_disparity = method.estimate_disparity(&disparity, &k)?;

    let mut worst: f64 = 0.0;
    let mut compared = 0usize;
    for v in 0..height {
        for u in 0..width {
            if let (Some(a), Some(b)) = (from_depth.get(u, v), from_disparity.get(u, v)) {
                worst = worst.max(a.angle_deg(b));
                compared += 1;
            }
        }
    }
    println!(
        "depth path vs disparity path on {} pixels: worst difference {:.2e} deg",
        compared, worst
    );
    assert!(worst < 1e-4, "paths should agree on noiseless data");
    Ok(())
}
