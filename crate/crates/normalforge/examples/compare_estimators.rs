//! Benchmark every registered estimator on a small rendered dataset and
//! print the accuracy/speed comparison table.
//!
//! Run with: cargo run --release --example compare_estimators

use normalforge::camera::CameraIntrinsics;
use normalforge::eval::{benchmark, Frame, DEFAULT_PHIS};
use normalforge::method::Method;
use normalforge::synth::{make_mesh, render_depth, sample_viewpoints, MeshShape};

fn main() -> normalforge::Result<()> {
    let (width, height) = (320, 240);
    let k = CameraIntrinsics::new(500.0, 500.0, width as f64 / 2.0, height as f64 / 2.0)?;

    let shapes = [
        (
            "sphere",
            make_mesh(MeshShape::Sphere {
                radius: 1.0,
                subdivisions: 4,
            })?,
        ),
        (
            "torus",
            make_mesh(MeshShape::Torus {
                major_radius: 0.8,
                minor_radius: 0.35,
                major_segments: 128,
                minor_segments: 64,
            })?,
        ),
    ];

    let mut frames = Vec::new();
    for (name, mesh) in &shapes {
        for (i, pose) in sample_viewpoints(2, 3.0, 11)?.iter().enumerate() {
            let (depth, gt) = render_depth(mesh, &k, pose, width, height)?;
            frames.push(Frame {
                name: format!("{name}_{i}"),
                depth,
                gt,
            });
        }
    }

    println!(
        "{:<16} {:>10} {:>8} {:>8} {:>8} {:>9} {:>12}",
        "method", "e_A (deg)", "eP10", "eP20", "eP30", "t (ms)", "pi (deg/kHz)"
    );
    for method in Method::all() {
        let r = benchmark(method, &frames, &k, 3, &DEFAULT_PHIS)?;
        println!(
            "{:<16} {:>10.4} {:>8.4} {:>8.4} {:>8.4} {:>9.3} {:>12.3}",
            r.method,
            r.e_a,
            r.e_p[0].proportion,
            r.e_p[1].proportion,
            r.e_p[2].proportion,
            r.t_ms,
            r.pi
        );
    }
    Ok(())
}
