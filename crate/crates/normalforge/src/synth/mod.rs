//! Synthetic dataset generation: procedural meshes, viewpoint sampling,
//! depth raycasting with per-triangle ground truth, and Gaussian noise.

pub mod mesh;
pub mod noise;
pub mod render;
pub mod view;

pub use mesh::{make_mesh, read_obj, MeshShape, TriangleMesh};
pub use noise::{add_gaussian_noise, NoisePreset, NoiseSpec};
pub use render::render_depth;
pub use view::{sample_viewpoints, Pose};
