//! Shared synthetic fixtures for integration tests.
#![allow(dead_code)]

use primdecomp::math::Vec3;
use primdecomp::mesh::IndexedMesh;
use primdecomp::primitives::{Cylinder, Primitive, Sphere};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Unit cube as 12 triangles. Diagonals are mixed so the per-axis tangent
/// sums differ, which keeps the summed quadric anisotropic.
pub fn unit_cube(origin: Vec3, size: f64) -> IndexedMesh {
    let s = size;
    let vertices: Vec<Vec3> = [
        (0.0, 0.0, 0.0),
        (s, 0.0, 0.0),
        (s, s, 0.0),
        (0.0, s, 0.0),
        (0.0, 0.0, s),
        (s, 0.0, s),
        (s, s, s),
        (0.0, s, s),
    ]
    .iter()
    .map(|&(x, y, z)| origin + Vec3::new(x, y, z))
    .collect();
    let faces: Vec<Vec<u32>> = vec![
        vec![0, 2, 1],
        vec![0, 3, 2],
        vec![4, 5, 6],
        vec![4, 6, 7],
        vec![0, 1, 5],
        vec![0, 5, 4],
        vec![2, 3, 7],
        vec![2, 7, 6],
        vec![1, 2, 6],
        vec![1, 6, 5],
        vec![0, 4, 7],
        vec![0, 7, 3],
    ];
    IndexedMesh::new(vertices, faces).unwrap()
}

/// Random rotation matrix columns from a seeded generator.
pub fn random_rotation(rng: &mut ChaCha8Rng) -> [Vec3; 3] {
    loop {
        let u = Vec3::new(
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
        );
        let v = Vec3::new(
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
        );
        let Some(u) = u.normalized() else { continue };
        let w = v - u * v.dot(u);
        let Some(v) = w.normalized() else { continue };
        return [u, v, u.cross(v)];
    }
}

pub fn transform_mesh(mesh: &IndexedMesh, rot: [Vec3; 3], translate: Vec3) -> IndexedMesh {
    let vertices: Vec<Vec3> = mesh
        .vertices
        .iter()
        .map(|p| rot[0] * p.x + rot[1] * p.y + rot[2] * p.z + translate)
        .collect();
    IndexedMesh::new(vertices, mesh.faces.clone()).unwrap()
}

/// Closed 32-gon prism (capped cylinder approximation) of radius 1,
/// height 1.
pub fn cylinder_mesh(segments: usize) -> IndexedMesh {
    Primitive::Cylinder(Cylinder {
        start: Vec3::ZERO,
        end: Vec3::new(0.0, 0.0, 1.0),
        radius: 1.0,
    })
    .quantize(segments, false)
}

pub fn uv_sphere_mesh(segments: usize) -> IndexedMesh {
    Primitive::Sphere(Sphere {
        center: Vec3::ZERO,
        radius: 1.0,
    })
    .quantize(segments, false)
}

/// Gable wedge: triangular prism with rectangular base and a ridge line.
pub fn gable_wedge() -> IndexedMesh {
    let vertices = vec![
        Vec3::new(0.0, 0.0, -1.0), // 0 base
        Vec3::new(2.0, 0.0, -1.0), // 1
        Vec3::new(2.0, 0.0, 1.0),  // 2
        Vec3::new(0.0, 0.0, 1.0),  // 3
        Vec3::new(0.0, 1.0, 0.0),  // 4 ridge
        Vec3::new(2.0, 1.0, 0.0),  // 5
    ];
    let faces = vec![
        vec![0, 1, 2, 3], // base
        vec![0, 4, 5, 1], // roof slope (-z side)
        vec![3, 2, 5, 4], // roof slope (+z side)
        vec![0, 3, 4],    // end cap
        vec![1, 5, 2],    // end cap
    ];
    IndexedMesh::new(vertices, faces).unwrap()
}

/// Grid of disjoint unit cubes spaced `gap` apart.
pub fn box_grid(nx: usize, ny: usize, nz: usize, gap: f64) -> IndexedMesh {
    let mut mesh = IndexedMesh::new(vec![], vec![]).unwrap();
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let origin = Vec3::new(
                    x as f64 * (1.0 + gap),
                    y as f64 * (1.0 + gap),
                    z as f64 * (1.0 + gap),
                );
                mesh.append(&unit_cube(origin, 1.0));
            }
        }
    }
    mesh
}

/// Concentric cubes: outer side 2 at the origin, inner side 1 centered.
pub fn cube_in_cube() -> IndexedMesh {
    let mut mesh = unit_cube(Vec3::ZERO, 2.0);
    mesh.append(&unit_cube(Vec3::new(0.5, 0.5, 0.5), 1.0));
    mesh
}

pub fn two_distant_cubes() -> IndexedMesh {
    let mut mesh = unit_cube(Vec3::ZERO, 1.0);
    mesh.append(&unit_cube(Vec3::new(10.0, 0.0, 0.0), 1.0));
    mesh
}

/// Flat plane subdivided into `n x n` unit quads.
pub fn subdivided_plane(n: usize) -> IndexedMesh {
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for y in 0..=n {
        for x in 0..=n {
            vertices.push(Vec3::new(x as f64, y as f64, 0.0));
        }
    }
    let mut faces = Vec::with_capacity(n * n);
    let idx = |x: usize, y: usize| (y * (n + 1) + x) as u32;
    for y in 0..n {
        for x in 0..n {
            faces.push(vec![
                idx(x, y),
                idx(x + 1, y),
                idx(x + 1, y + 1),
                idx(x, y + 1),
            ]);
        }
    }
    IndexedMesh::new(vertices, faces).unwrap()
}

/// Random disconnected quads in a unit-ish volume.
pub fn quad_soup(count: usize, seed: u64) -> IndexedMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vertices = Vec::with_capacity(count * 4);
    let mut faces = Vec::with_capacity(count);
    for i in 0..count {
        let c = Vec3::new(
            rng.gen::<f64>() * 4.0,
            rng.gen::<f64>() * 4.0,
            rng.gen::<f64>() * 4.0,
        );
        let u = Vec3::new(
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
        );
        let v = Vec3::new(
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
        );
        let base = i as u32 * 4;
        vertices.push(c);
        vertices.push(c + u);
        vertices.push(c + u + v);
        vertices.push(c + v);
        faces.push(vec![base, base + 1, base + 2, base + 3]);
    }
    IndexedMesh::new(vertices, faces).unwrap()
}

/// Signed mesh volume via the divergence theorem (absolute value).
pub fn mesh_volume(mesh: &IndexedMesh) -> f64 {
    let mut v = 0.0;
    for [a, b, c] in mesh.triangles() {
        let (a, b, c) = (
            mesh.vertices[a as usize],
            mesh.vertices[b as usize],
            mesh.vertices[c as usize],
        );
        v += a.dot(b.cross(c)) / 6.0;
    }
    v.abs()
}
