//! Render a small synthetic dataset to disk: a torus seen from several
//! viewpoints, with depth, ground-truth normals, poses, and intrinsics in
//! the standard layout.
//!
//! Run with: cargo run --release --example generate_dataset

use normalforge::camera::CameraIntrinsics;
use normalforge::io::dataset;
use normalforge::synth::{
    add_gaussian_noise, make_mesh, render_depth, sample_viewpoints, MeshShape, NoiseSpec,
};

fn main() -> normalforge::Result<()> {
    let out = std::env::temp_dir().join("normalforge_example_dataset");
    std::fs::create_dir_all(&out).expect("create output directory");

    let mesh = make_mesh(MeshShape::Torus {
        major_radius: 0.8,
        minor_radius: 0.35,
        major_segments: 128,
        minor_segments: 64,
    })?;
    let (width, height) = (320, 240);
    let k = CameraIntrinsics::new(500.0, 500.0, width as f64 / 2.0, height as f64 / 2.0)?;
    let seed = 7;
    let poses = sample_viewpoints(4, 3.0, seed)?;

    dataset::write_dataset_intrinsics(&out, &k)?;
    for (i, pose) in poses.iter().enumerate() {
        let (clean, gt) = render_depth(&mesh, &k, pose, width, height)?;
        // Mild sensor noise on the depth; the ground truth stays clean.
        let depth = add_gaussian_noise(&clean, &NoiseSpec::new(0.003, seed + i as u64)?);
        let stem = dataset::frame_stem(i);
        dataset::write_frame(&out, &stem, &depth, &gt, pose)?;
        println!(
            "{stem}: {} valid depth pixels",
            depth.grid().valid_count()
        );
    }
    println!("dataset written to {}", out.display());
    Ok(())
}
