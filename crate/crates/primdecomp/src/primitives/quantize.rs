//! Quantization of analytic primitives into polygonal meshes.
//!
//! Boxes and prisms become 8-vertex hexahedra. Cylinders and frustums
//! become n-gon prisms capped by one polygon on each end. Spheres become UV
//! spheres, capsules n-gon prisms capped with UV hemispheres. Meshes are
//! inscribed: every emitted vertex lies on or inside the analytic shape.
//! With `circumscribed` set, radial extents are scaled by `1/cos(pi/n)`.

use super::{Primitive, TrapezoidalPrism};
use crate::math::Vec3;
use crate::mesh::IndexedMesh;

pub fn quantize(prim: &Primitive, segments: usize, circumscribed: bool) -> IndexedMesh {
    let segments = segments.max(3);
    let scale = if circumscribed {
        1.0 / (std::f64::consts::PI / segments as f64).cos()
    } else {
        1.0
    };
    match prim {
        Primitive::Obb(b) => hexahedron(
            b.center,
            b.axes,
            [b.half_extents[0]; 2],
            [b.half_extents[2]; 2],
            b.half_extents[1],
        ),
        Primitive::Prism(p) => prism_mesh(p),
        Primitive::Sphere(s) => uv_sphere(s.center, s.radius * scale, segments),
        Primitive::Cylinder(c) => {
            let axis = (c.end - c.start)
                .normalized()
                .unwrap_or(Vec3::new(0.0, 0.0, 1.0));
            capped_ngon(
                c.start,
                axis,
                (c.end - c.start).norm(),
                c.radius * scale,
                c.radius * scale,
                segments,
            )
        }
        Primitive::Frustum(f) => capped_ngon(
            f.base_center,
            f.axis,
            f.height,
            f.r_bot * scale,
            f.r_top * scale,
            segments,
        ),
        Primitive::Capsule(c) => capsule_mesh(c.start, c.end, c.radius * scale, segments),
    }
}

fn hexahedron(center: Vec3, axes: [Vec3; 3], hx: [f64; 2], hz: [f64; 2], hy: f64) -> IndexedMesh {
    // hx/hz give (bottom, top) half-extents along axes[0]/axes[2]; y is the
    // interpolation axis, so an OBB passes equal pairs
    let corner = |sx: f64, sy: f64, sz: f64| {
        let side = if sy < 0.0 { 0 } else { 1 };
        center + axes[0] * (sx * hx[side]) + axes[1] * (sy * hy) + axes[2] * (sz * hz[side])
    };
    let vertices = vec![
        corner(-1.0, -1.0, -1.0), // 0
        corner(1.0, -1.0, -1.0),  // 1
        corner(1.0, -1.0, 1.0),   // 2
        corner(-1.0, -1.0, 1.0),  // 3
        corner(-1.0, 1.0, -1.0),  // 4
        corner(1.0, 1.0, -1.0),   // 5
        corner(1.0, 1.0, 1.0),    // 6
        corner(-1.0, 1.0, 1.0),   // 7
    ];
    let faces = vec![
        vec![0, 1, 2, 3], // bottom (-y)
        vec![7, 6, 5, 4], // top (+y)
        vec![0, 4, 5, 1], // -z side
        vec![3, 2, 6, 7], // +z side
        vec![1, 5, 6, 2], // +x side
        vec![0, 3, 7, 4], // -x side
    ];
    IndexedMesh::new(vertices, faces).expect("hexahedron is well formed")
}

fn prism_mesh(p: &TrapezoidalPrism) -> IndexedMesh {
    hexahedron(p.center, p.axes, [p.h_x; 2], [p.h_zb, p.h_zt], p.h_y)
}

/// n-gon prism from `base` along `axis`, radius interpolating `r_bot` to
/// `r_top`, capped by one polygon face on each end.
fn capped_ngon(
    base: Vec3,
    axis: Vec3,
    height: f64,
    r_bot: f64,
    r_top: f64,
    n: usize,
) -> IndexedMesh {
    let b1 = axis.any_orthonormal();
    let b2 = axis.cross(b1);
    let mut vertices = Vec::with_capacity(2 * n);
    for (r, h) in [(r_bot, 0.0), (r_top, height)] {
        for k in 0..n {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            vertices.push(base + axis * h + b1 * (r * a.cos()) + b2 * (r * a.sin()));
        }
    }
    let mut faces = Vec::with_capacity(n + 2);
    for k in 0..n {
        let k1 = (k + 1) % n;
        faces.push(vec![k as u32, k1 as u32, (n + k1) as u32, (n + k) as u32]);
    }
    faces.push((0..n as u32).rev().collect());
    faces.push((n as u32..2 * n as u32).collect());
    IndexedMesh::new(vertices, faces).expect("capped prism is well formed")
}

/// UV sphere with `n` longitude segments and ceil(n/2) latitude bands.
fn uv_sphere(center: Vec3, radius: f64, n: usize) -> IndexedMesh {
    let bands = n.div_ceil(2);
    let mut vertices = Vec::new();
    vertices.push(center + Vec3::new(0.0, 0.0, radius)); // north pole
    for j in 1..bands {
        let theta = std::f64::consts::PI * j as f64 / bands as f64;
        for k in 0..n {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            vertices.push(
                center
                    + Vec3::new(
                        radius * theta.sin() * phi.cos(),
                        radius * theta.sin() * phi.sin(),
                        radius * theta.cos(),
                    ),
            );
        }
    }
    vertices.push(center + Vec3::new(0.0, 0.0, -radius)); // south pole
    let south = (vertices.len() - 1) as u32;
    let ring = |j: usize, k: usize| (1 + (j - 1) * n + (k % n)) as u32;

    let mut faces = Vec::new();
    for k in 0..n {
        faces.push(vec![0, ring(1, k), ring(1, k + 1)]);
    }
    for j in 1..bands - 1 {
        for k in 0..n {
            faces.push(vec![
                ring(j, k),
                ring(j + 1, k),
                ring(j + 1, k + 1),
                ring(j, k + 1),
            ]);
        }
    }
    for k in 0..n {
        faces.push(vec![south, ring(bands - 1, k + 1), ring(bands - 1, k)]);
    }
    IndexedMesh::new(vertices, faces).expect("uv sphere is well formed")
}

/// Capsule: an n-gon prism between the cap centers, closed with UV
/// hemispheres.
fn capsule_mesh(start: Vec3, end: Vec3, radius: f64, n: usize) -> IndexedMesh {
    let seg = end - start;
    let len = seg.norm();
    if len == 0.0 {
        return uv_sphere(start, radius, n);
    }
    let axis = seg / len;
    let b1 = axis.any_orthonormal();
    let b2 = axis.cross(b1);
    let hemi_bands = n.div_ceil(2).div_ceil(2).max(1);

    let mut vertices = Vec::new();
    let mut rings: Vec<u32> = Vec::new(); // start index of each full ring, bottom to top

    // bottom pole
    vertices.push(start - axis * radius);
    let bottom_pole = 0u32;
    // bottom hemisphere rings, near pole first, up to the equator at `start`
    for j in 1..=hemi_bands {
        let theta = std::f64::consts::PI / 2.0 * j as f64 / hemi_bands as f64;
        let (s, c) = (theta.sin(), theta.cos());
        rings.push(vertices.len() as u32);
        for k in 0..n {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            vertices.push(
                start - axis * (radius * c)
                    + b1 * (radius * s * a.cos())
                    + b2 * (radius * s * a.sin()),
            );
        }
    }
    // top hemisphere rings (equator at `end` up toward the pole)
    for j in (1..=hemi_bands).rev() {
        let theta = std::f64::consts::PI / 2.0 * j as f64 / hemi_bands as f64;
        let (s, c) = (theta.sin(), theta.cos());
        rings.push(vertices.len() as u32);
        for k in 0..n {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            vertices.push(
                end + axis * (radius * c)
                    + b1 * (radius * s * a.cos())
                    + b2 * (radius * s * a.sin()),
            );
        }
    }
    vertices.push(end + axis * radius);
    let top_pole = (vertices.len() - 1) as u32;

    let mut faces = Vec::new();
    let first_ring = rings[0];
    for k in 0..n as u32 {
        let k1 = (k + 1) % n as u32;
        faces.push(vec![bottom_pole, first_ring + k1, first_ring + k]);
    }
    for w in rings.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        for k in 0..n as u32 {
            let k1 = (k + 1) % n as u32;
            faces.push(vec![lo + k, lo + k1, hi + k1, hi + k]);
        }
    }
    let last_ring = *rings.last().unwrap();
    for k in 0..n as u32 {
        let k1 = (k + 1) % n as u32;
        faces.push(vec![top_pole, last_ring + k, last_ring + k1]);
    }
    IndexedMesh::new(vertices, faces).expect("capsule mesh is well formed")
}
