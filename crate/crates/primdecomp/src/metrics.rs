//! One-way Hausdorff/Chamfer distance via area-weighted surface sampling
//! and exact point-to-triangle queries over an AABB tree, plus per-kind
//! byte-cost accounting.

use crate::math::{Aabb, Vec3};
use crate::mesh::IndexedMesh;
use crate::primitives::{Kind, Primitive, ALL_KINDS};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// One-way distance report; distances are normalized by the target mesh's
/// axis-aligned bounding-box diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub hausdorff_normalized: f64,
    pub chamfer_normalized: f64,
    pub sample_count: usize,
    pub seed: u64,
    pub bbox_diagonal: f64,
}

/// Byte cost of a primitive set: floats are 4 bytes, (hull) indices 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ByteCostReport {
    pub obb_count: usize,
    pub sphere_count: usize,
    pub capsule_count: usize,
    pub cylinder_count: usize,
    pub prism_count: usize,
    pub frustum_count: usize,
    pub float_count: usize,
    pub int_count: usize,
    pub total_bytes: usize,
}

/// Deterministic arithmetic over the per-kind float counts
/// (box 10, capsule 7, sphere 4, cylinder 7, frustum 8, prism 11).
pub fn byte_cost(kinds: impl IntoIterator<Item = Kind>) -> ByteCostReport {
    let mut counts = [0usize; 6];
    let mut floats = 0usize;
    for k in kinds {
        counts[k.index()] += 1;
        floats += k.float_count();
    }
    let get = |k: Kind| counts[k.index()];
    ByteCostReport {
        obb_count: get(Kind::Obb),
        sphere_count: get(Kind::Sphere),
        capsule_count: get(Kind::Capsule),
        cylinder_count: get(Kind::Cylinder),
        prism_count: get(Kind::Prism),
        frustum_count: get(Kind::Frustum),
        float_count: floats,
        int_count: 0,
        total_bytes: floats * 4,
    }
}

impl ByteCostReport {
    pub fn kind_count(&self, kind: Kind) -> usize {
        match kind {
            Kind::Obb => self.obb_count,
            Kind::Sphere => self.sphere_count,
            Kind::Capsule => self.capsule_count,
            Kind::Cylinder => self.cylinder_count,
            Kind::Prism => self.prism_count,
            Kind::Frustum => self.frustum_count,
        }
    }
}

/// Quantizes primitives at `segments` and concatenates the meshes.
pub fn combined_mesh(prims: &[Primitive], segments: usize, circumscribed: bool) -> IndexedMesh {
    let mut out = IndexedMesh::new(vec![], vec![]).expect("empty mesh");
    for p in prims {
        out.append(&p.quantize(segments, circumscribed));
    }
    out
}

/// Area-weighted uniform samples over a mesh's (fan-triangulated) surface.
/// Deterministic for a given seed.
pub fn sample_surface(mesh: &IndexedMesh, count: usize, seed: u64) -> Result<Vec<Vec3>> {
    if count == 0 {
        return Err(Error::Config("sample count must be at least 1".into()));
    }
    let tris = mesh.triangles();
    let mut cumulative = Vec::with_capacity(tris.len());
    let mut total = 0.0f64;
    for t in &tris {
        let (a, b, c) = tri_verts(mesh, *t);
        total += 0.5 * (b - a).cross(c - a).norm();
        cumulative.push(total);
    }
    if total <= 0.0 || total.is_nan() {
        return Err(Error::Structure("mesh has zero total surface area".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let target = rng.gen::<f64>() * total;
        let idx = cumulative
            .partition_point(|&acc| acc <= target)
            .min(tris.len() - 1);
        let (a, b, c) = tri_verts(mesh, tris[idx]);
        // sqrt trick for uniform barycentric coordinates
        let r1 = rng.gen::<f64>().sqrt();
        let r2 = rng.gen::<f64>();
        samples.push(a * (1.0 - r1) + b * (r1 * (1.0 - r2)) + c * (r1 * r2));
    }
    Ok(samples)
}

fn tri_verts(mesh: &IndexedMesh, t: [u32; 3]) -> (Vec3, Vec3, Vec3) {
    (
        mesh.vertices[t[0] as usize],
        mesh.vertices[t[1] as usize],
        mesh.vertices[t[2] as usize],
    )
}

/// Max and compensated mean of the exact distances from each sample to the
/// target mesh, both normalized by the target's bounding-box diagonal.
pub fn one_way_distance(
    samples: &[Vec3],
    to_mesh: &IndexedMesh,
    seed: u64,
) -> Result<DistanceReport> {
    if samples.is_empty() {
        return Err(Error::Config("need at least one sample".into()));
    }
    let tree = AabbTree::build(to_mesh)?;
    let diagonal = to_mesh.bbox_diagonal();
    if diagonal <= 0.0 || diagonal.is_nan() {
        return Err(Error::Structure(
            "target mesh bounding box is degenerate".into(),
        ));
    }
    let mut max_d: f64 = 0.0;
    // Kahan summation keeps the mean reduction-order stable
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for s in samples {
        let d = tree.distance(*s).sqrt();
        max_d = max_d.max(d);
        let y = d - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(DistanceReport {
        hausdorff_normalized: max_d / diagonal,
        chamfer_normalized: sum / samples.len() as f64 / diagonal,
        sample_count: samples.len(),
        seed,
        bbox_diagonal: diagonal,
    })
}

/// Median-split AABB tree over a mesh's fan triangles.
pub struct AabbTree {
    nodes: Vec<Node>,
    tris: Vec<(Vec3, Vec3, Vec3)>,
}

struct Node {
    bounds: Aabb,
    /// leaf: (start, len) into `order`; inner: child indices
    kind: NodeKind,
}

enum NodeKind {
    Leaf { start: u32, len: u32 },
    Inner { left: u32, right: u32 },
}

const LEAF_SIZE: usize = 8;

impl AabbTree {
    pub fn build(mesh: &IndexedMesh) -> Result<AabbTree> {
        let raw = mesh.triangles();
        if raw.is_empty() {
            return Err(Error::Structure(
                "cannot build a tree over an empty mesh".into(),
            ));
        }
        let tris: Vec<(Vec3, Vec3, Vec3)> = raw.iter().map(|t| tri_verts(mesh, *t)).collect();
        let mut items: Vec<(u32, Vec3, Aabb)> = tris
            .iter()
            .enumerate()
            .map(|(i, (a, b, c))| {
                let mut bb = Aabb::EMPTY;
                bb.grow(*a);
                bb.grow(*b);
                bb.grow(*c);
                ((i) as u32, (*a + *b + *c) / 3.0, bb)
            })
            .collect();
        let mut nodes = Vec::new();
        Self::split(&mut items[..], 0, &mut nodes);
        let order: Vec<(Vec3, Vec3, Vec3)> =
            items.iter().map(|&(i, _, _)| tris[i as usize]).collect();
        Ok(AabbTree { nodes, tris: order })
    }

    fn split(items: &mut [(u32, Vec3, Aabb)], offset: usize, nodes: &mut Vec<Node>) -> u32 {
        let mut bounds = Aabb::EMPTY;
        for (_, _, bb) in items.iter() {
            bounds = bounds.union(*bb);
        }
        let id = nodes.len() as u32;
        if items.len() <= LEAF_SIZE {
            nodes.push(Node {
                bounds,
                kind: NodeKind::Leaf {
                    start: offset as u32,
                    len: items.len() as u32,
                },
            });
            return id;
        }
        // longest axis of the centroid bounds
        let mut cb = Aabb::EMPTY;
        for (_, c, _) in items.iter() {
            cb.grow(*c);
        }
        let ext = cb.max - cb.min;
        let axis = if ext.x >= ext.y && ext.x >= ext.z {
            0
        } else if ext.y >= ext.z {
            1
        } else {
            2
        };
        let mid = items.len() / 2;
        items.select_nth_unstable_by(mid, |a, b| {
            a.1.component(axis)
                .total_cmp(&b.1.component(axis))
                .then(a.0.cmp(&b.0))
        });
        nodes.push(Node {
            bounds,
            kind: NodeKind::Leaf { start: 0, len: 0 },
        }); // placeholder
        let (lo, hi) = items.split_at_mut(mid);
        let left = Self::split(lo, offset, nodes);
        let right = Self::split(hi, offset + mid, nodes);
        nodes[id as usize] = Node {
            bounds,
            kind: NodeKind::Inner { left, right },
        };
        id
    }

    /// Squared distance from `p` to the closest triangle.
    pub fn distance(&self, p: Vec3) -> f64 {
        let mut best = f64::INFINITY;
        let mut stack = vec![0u32];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id as usize];
            if node.bounds.distance_squared(p) >= best {
                continue;
            }
            match node.kind {
                NodeKind::Leaf { start, len } => {
                    for i in start..start + len {
                        let (a, b, c) = self.tris[i as usize];
                        best = best.min(point_triangle_distance_squared(p, a, b, c));
                    }
                }
                NodeKind::Inner { left, right } => {
                    let dl = self.nodes[left as usize].bounds.distance_squared(p);
                    let dr = self.nodes[right as usize].bounds.distance_squared(p);
                    // visit the nearer child first
                    if dl <= dr {
                        stack.push(right);
                        stack.push(left);
                    } else {
                        stack.push(left);
                        stack.push(right);
                    }
                }
            }
        }
        best
    }
}

/// Exact squared distance from a point to a triangle (region-based
/// projection onto the triangle's plane, edges and vertices).
pub fn point_triangle_distance_squared(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;

    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return ap.norm_squared();
    }

    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return bp.norm_squared();
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (ap - ab * v).norm_squared();
    }

    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return cp.norm_squared();
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (ap - ac * w).norm_squared();
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (bp - (c - b) * w).norm_squared();
    }

    let sum = va + vb + vc;
    if sum <= 0.0 || !sum.is_finite() {
        // degenerate (collinear) triangle: closest edge decides
        return segment_distance_squared(p, a, b)
            .min(segment_distance_squared(p, a, c))
            .min(segment_distance_squared(p, b, c));
    }
    let v = vb / sum;
    let w = vc / sum;
    (ap - ab * v - ac * w).norm_squared()
}

fn segment_distance_squared(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm_squared();
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm_squared()
}

/// Byte cost over all primitives of several kinds at once.
pub fn byte_cost_of_primitives<'a>(
    prims: impl IntoIterator<Item = &'a Primitive>,
) -> ByteCostReport {
    byte_cost(prims.into_iter().map(|p| p.kind()))
}

/// All kinds in declaration order; useful for stable per-kind summaries.
pub fn kind_order() -> [Kind; 6] {
    ALL_KINDS
}
