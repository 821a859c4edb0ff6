//! Procedural triangle meshes with per-triangle unit normals.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math::{Point3, Vec3};

/// Indexed triangle mesh in the object frame. Every triangle has positive
/// area and a stored unit normal equal to the normalized cross product of
/// its edges.
#[derive(Debug, Clone)]
pub struct TriangleMesh {
    pub vertices: Vec<Point3>,
    pub triangles: Vec<[usize; 3]>,
    pub normals: Vec<Vec3>,
}

impl TriangleMesh {
    /// Build from vertices and index triples, computing normals and
    /// rejecting degenerate triangles.
    pub fn new(vertices: Vec<Point3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let mut normals = Vec::with_capacity(triangles.len());
        for (i, t) in triangles.iter().enumerate() {
            for &ix in t {
                if ix >= vertices.len() {
                    return Err(Error::invalid(format!(
                        "triangle {i} references vertex {ix} of {}",
                        vertices.len()
                    )));
                }
            }
            let [a, b, c] = [vertices[t[0]], vertices[t[1]], vertices[t[2]]];
            let n = (b - a).cross(c - a);
            let norm = n.normalized().ok_or_else(|| {
                Error::invalid(format!("triangle {i} has zero area"))
            })?;
            normals.push(norm);
        }
        Ok(TriangleMesh {
            vertices,
            triangles,
            normals,
        })
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// Undirected edge count, for Euler-characteristic checks.
    pub fn edge_count(&self) -> usize {
        let mut edges = std::collections::HashSet::new();
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges.len()
    }

    /// Largest vertex distance from the origin.
    pub fn bounding_radius(&self) -> f64 {
        self.vertices
            .iter()
            .map(|p| p.norm())
            .fold(0.0, f64::max)
    }

    pub fn triangle_points(&self, i: usize) -> [Point3; 3] {
        let t = self.triangles[i];
        [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]]
    }
}

/// Shape selector for [`make_mesh`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeshShape {
    /// Axis-aligned rectangle in the z=0 plane, `cells x cells` quads.
    Plane { width: f64, height: f64, cells: usize },
    /// Icosphere: subdivided icosahedron projected to the sphere.
    Sphere { radius: f64, subdivisions: u32 },
    /// Torus around the z axis.
    Torus {
        major_radius: f64,
        minor_radius: f64,
        major_segments: usize,
        minor_segments: usize,
    },
    /// Random smooth height field over a square, z = f(x, y).
    Heightfield {
        size: f64,
        cells: usize,
        amplitude: f64,
        seed: u64,
    },
}

/// Build one of the procedural shapes. Deterministic for fixed parameters.
pub fn make_mesh(shape: MeshShape) -> Result<TriangleMesh> {
    match shape {
        MeshShape::Plane { width, height, cells } => plane(width, height, cells),
        MeshShape::Sphere { radius, subdivisions } => icosphere(radius, subdivisions),
        MeshShape::Torus {
            major_radius,
            minor_radius,
            major_segments,
            minor_segments,
        } => torus(major_radius, minor_radius, major_segments, minor_segments),
        MeshShape::Heightfield {
            size,
            cells,
            amplitude,
            seed,
        } => heightfield(size, cells, amplitude, seed),
    }
}

fn plane(width: f64, height: f64, cells: usize) -> Result<TriangleMesh> {
    if !(width > 0.0 && height > 0.0) || cells == 0 {
        return Err(Error::config("plane needs positive extents and cells >= 1"));
    }
    grid_mesh(cells, cells, |i, j| {
        Point3::new(
            (i as f64 / cells as f64 - 0.5) * width,
            (j as f64 / cells as f64 - 0.5) * height,
            0.0,
        )
    })
}

fn heightfield(size: f64, cells: usize, amplitude: f64, seed: u64) -> Result<TriangleMesh> {
    if !(size > 0.0) || cells < 2 || !(amplitude >= 0.0) {
        return Err(Error::config(
            "heightfield needs positive size, cells >= 2, amplitude >= 0",
        ));
    }
    // Smooth field: a fixed number of random sinusoidal plane waves.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let waves: Vec<(f64, f64, f64, f64)> = (0..6)
        .map(|_| {
            (
                rng.gen_range(0.5..3.0) * std::f64::consts::TAU / size,
                rng.gen_range(0.5..3.0) * std::f64::consts::TAU / size,
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(0.2..1.0),
            )
        })
        .collect();
    let total_w: f64 = waves.iter().map(|w| w.3).sum();
    grid_mesh(cells, cells, |i, j| {
        let x = (i as f64 / cells as f64 - 0.5) * size;
        let y = (j as f64 / cells as f64 - 0.5) * size;
        let z: f64 = waves
            .iter()
            .map(|&(kx, ky, phase, w)| w * (kx * x + ky * y + phase).sin())
            .sum::<f64>()
            / total_w
            * amplitude;
        Point3::new(x, y, z)
    })
}

fn grid_mesh(nx: usize, ny: usize, f: impl Fn(usize, usize) -> Point3) -> Result<TriangleMesh> {
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push(f(i, j));
        }
    }
    let at = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            triangles.push([at(i, j), at(i + 1, j), at(i + 1, j + 1)]);
            triangles.push([at(i, j), at(i + 1, j + 1), at(i, j + 1)]);
        }
    }
    TriangleMesh::new(vertices, triangles)
}

fn icosphere(radius: f64, subdivisions: u32) -> Result<TriangleMesh> {
    if !(radius > 0.0) {
        return Err(Error::config("sphere radius must be positive"));
    }
    if subdivisions > 7 {
        return Err(Error::config("sphere subdivisions capped at 7"));
    }
    // Icosahedron from three orthogonal golden rectangles.
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut vertices: Vec<Point3> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalized().unwrap())
    .collect();
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for t in &triangles {
            let mut mids = [0usize; 3];
            for (e, (a, b)) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])].into_iter().enumerate() {
                let key = (a.min(b), a.max(b));
                mids[e] = *midpoint.entry(key).or_insert_with(|| {
                    let m = ((vertices[a] + vertices[b]) / 2.0).normalized().unwrap();
                    vertices.push(m);
                    vertices.len() - 1
                });
            }
            next.push([t[0], mids[0], mids[2]]);
            next.push([t[1], mids[1], mids[0]]);
            next.push([t[2], mids[2], mids[1]]);
            next.push([mids[0], mids[1], mids[2]]);
        }
        triangles = next;
    }

    let vertices = vertices.into_iter().map(|v| v * radius).collect();
    TriangleMesh::new(vertices, triangles)
}

fn torus(
    major_radius: f64,
    minor_radius: f64,
    major_segments: usize,
    minor_segments: usize,
) -> Result<TriangleMesh> {
    if !(major_radius > minor_radius && minor_radius > 0.0) {
        return Err(Error::config(
            "torus needs major_radius > minor_radius > 0",
        ));
    }
    if major_segments < 3 || minor_segments < 3 {
        return Err(Error::config("torus needs at least 3 segments per ring"));
    }
    let mut vertices = Vec::with_capacity(major_segments * minor_segments);
    for i in 0..major_segments {
        let a = std::f64::consts::TAU * i as f64 / major_segments as f64;
        for j in 0..minor_segments {
            let b = std::f64::consts::TAU * j as f64 / minor_segments as f64;
            let ring = major_radius + minor_radius * b.cos();
            vertices.push(Point3::new(
                ring * a.cos(),
                ring * a.sin(),
                minor_radius * b.sin(),
            ));
        }
    }
    let at = |i: usize, j: usize| (i % major_segments) * minor_segments + (j % minor_segments);
    let mut triangles = Vec::with_capacity(2 * major_segments * minor_segments);
    for i in 0..major_segments {
        for j in 0..minor_segments {
            // Wind so normals point away from the tube axis.
            triangles.push([at(i, j), at(i + 1, j), at(i + 1, j + 1)]);
            triangles.push([at(i, j), at(i + 1, j + 1), at(i, j + 1)]);
        }
    }
    TriangleMesh::new(vertices, triangles)
}

/// Read an ASCII Wavefront-style triangle list: only `v x y z` and
/// `f a b c` records (1-based indices, optional `a/..` suffixes), everything
/// else ignored.
pub fn read_obj(path: &Path) -> Result<TriangleMesh> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = std::io::BufReader::new(file);
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let mut offset = 0u64;
    for line in reader.lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let len = line.len() as u64 + 1;
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let coords: Vec<f64> = parts
                    .take(3)
                    .map(|s| s.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::format(path, offset, format!("bad vertex: {e}")))?;
                if coords.len() != 3 {
                    return Err(Error::format(path, offset, "vertex needs 3 coordinates"));
                }
                vertices.push(Point3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let idx: Vec<usize> = parts
                    .take(3)
                    .map(|s| {
                        s.split('/')
                            .next()
                            .unwrap_or("")
                            .parse::<usize>()
                            .map_err(|e| Error::format(path, offset, format!("bad face index: {e}")))
                    })
                    .collect::<Result<_>>()?;
                if idx.len() != 3 {
                    return Err(Error::format(path, offset, "only triangle faces supported"));
                }
                if idx.contains(&0) {
                    return Err(Error::format(path, offset, "face indices are 1-based"));
                }
                triangles.push([idx[0] - 1, idx[1] - 1, idx[2] - 1]);
            }
            _ => {}
        }
        offset += len;
    }
    TriangleMesh::new(vertices, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_plane() {
        let m = make_mesh(MeshShape::Plane {
            width: 1.0,
            height: 1.0,
            cells: 1,
        })
        .unwrap();
        assert_eq!(m.vertices.len(), 4);
        assert_eq!(m.triangle_count(), 2);
        assert!((m.normals[0] - m.normals[1]).norm() < 1e-15);
    }

    #[test]
    fn icosphere_counts_and_radius() {
        let m = make_mesh(MeshShape::Sphere {
            radius: 1.0,
            subdivisions: 2,
        })
        .unwrap();
        assert_eq!(m.vertices.len(), 162);
        assert_eq!(m.triangle_count(), 320);
        for v in &m.vertices {
            assert!((v.norm() - 1.0).abs() < 1e-9);
        }
        // Euler characteristic of a closed sphere: V - E + F = 2.
        let chi = m.vertices.len() as i64 - m.edge_count() as i64 + m.triangle_count() as i64;
        assert_eq!(chi, 2);
    }

    #[test]
    fn icosphere_outward_normals() {
        let m = make_mesh(MeshShape::Sphere {
            radius: 2.0,
            subdivisions: 1,
        })
        .unwrap();
        for i in 0..m.triangle_count() {
            let [a, b, c] = m.triangle_points(i);
            let centroid = (a + b + c) / 3.0;
            assert!(m.normals[i].dot(centroid) > 0.0, "triangle {i} points inward");
        }
    }

    #[test]
    fn torus_normals_unit() {
        let m = make_mesh(MeshShape::Torus {
            major_radius: 2.0,
            minor_radius: 0.5,
            major_segments: 64,
            minor_segments: 32,
        })
        .unwrap();
        assert_eq!(m.triangle_count(), 2 * 64 * 32);
        for n in &m.normals {
            assert!((n.norm() - 1.0).abs() < 1e-9);
        }
        // Closed torus: V - E + F = 0.
        let chi = m.vertices.len() as i64 - m.edge_count() as i64 + m.triangle_count() as i64;
        assert_eq!(chi, 0);
    }

    #[test]
    fn torus_outward_normals() {
        let m = make_mesh(MeshShape::Torus {
            major_radius: 2.0,
            minor_radius: 0.5,
            major_segments: 16,
            minor_segments: 8,
        })
        .unwrap();
        for i in 0..m.triangle_count() {
            let [a, b, c] = m.triangle_points(i);
            let centroid = (a + b + c) / 3.0;
            // Outward means away from the tube center circle.
            let axis = Vec3::new(centroid.x, centroid.y, 0.0).normalized().unwrap() * 2.0;
            assert!(m.normals[i].dot(centroid - axis) > 0.0, "triangle {i}");
        }
    }

    #[test]
    fn heightfield_deterministic() {
        let shape = MeshShape::Heightfield {
            size: 2.0,
            cells: 16,
            amplitude: 0.3,
            seed: 42,
        };
        let a = make_mesh(shape).unwrap();
        let b = make_mesh(shape).unwrap();
        assert_eq!(a.vertices.len(), b.vertices.len());
        for (x, y) in a.vertices.iter().zip(&b.vertices) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn bad_params_rejected() {
        assert!(make_mesh(MeshShape::Sphere {
            radius: -1.0,
            subdivisions: 1
        })
        .is_err());
        assert!(make_mesh(MeshShape::Torus {
            major_radius: 0.5,
            minor_radius: 1.0,
            major_segments: 8,
            minor_segments: 8
        })
        .is_err());
        assert!(make_mesh(MeshShape::Plane {
            width: 0.0,
            height: 1.0,
            cells: 1
        })
        .is_err());
    }

    #[test]
    fn obj_roundtrip_subset() {
        let dir = std::env::temp_dir().join("normalforge_obj_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("tri.obj");
        std::fs::write(
            &path,
            "# comment\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n",
        )
        .unwrap();
        let m = read_obj(&path).unwrap();
        assert_eq!(m.vertices.len(), 3);
        assert_eq!(m.triangle_count(), 1);
        assert!((m.normals[0] - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn obj_rejects_garbage() {
        let dir = std::env::temp_dir().join("normalforge_obj_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.obj");
        std::fs::write(&path, "v 0 0\n").unwrap();
        assert!(read_obj(&path).is_err());
    }
}
