//! Estimate surface normals for a rendered depth image and write the
//! standard 8-bit visualization PNG.
//!
//! Run with: cargo run --release --example estimate_normals

use normalforge::camera::CameraIntrinsics;
use normalforge::io::{write_normal_png, write_pfm_normals};
use normalforge::method::Method;
use normalforge::synth::{make_mesh, render_depth, sample_viewpoints, MeshShape};

fn main() -> normalforge::Result<()> {
    let (width, height) = (640, 480);
    let k = CameraIntrinsics::new(500.0, 500.0, width as f64 / 2.0, height as f64 / 2.0)?;
    let mesh = make_mesh(MeshShape::Sphere {
        radius: 1.0,
        subdivisions: 5,
    })?;
    let pose = sample_viewpoints(1, 3.0, 0)?[0];
    let (depth, gt) = render_depth(&mesh, &k, &pose, width, height)?;

    let method: Method = "fd-median".parse()?;
    let normals = method.estimate_depth(&depth, &k)?;

    // Quick accuracy readout against the rendered ground truth.
    let map = normalforge::eval::error_map(&normals, &gt)?;
    let errors: Vec<f64> = map
        .values()
        .iter()
        .zip(map.mask())
        .filter(|&(_, &ok)| ok)
        .map(|(&e, _)| e)
        .collect();
    println!(
        "{} on a rendered sphere: AAE = {:.3} deg over {} pixels",
        method,
        normalforge::eval::aae(&errors)?,
        errors.len()
    );

    let dir = std::env::temp_dir().join("normalforge_example_estimate");
    std::fs::create_dir_all(&dir).expect("create output directory");
    write_pfm_normals(&dir.join("sphere_normals.pfm"), &normals)?;
    write_normal_png(&dir.join("sphere_normals.png"), &normals)?;
    println!("outputs in {}", dir.display());
    Ok(())
}
