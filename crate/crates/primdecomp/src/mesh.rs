//! Indexed polygonal meshes: OBJ ingest, vertex deduplication, edge-based
//! face adjacency and per-face normals/tangents/areas.

use crate::math::{Aabb, Vec3};
use crate::{Error, Result};
use std::collections::HashMap;
use std::io::{BufRead, Write};

/// A polygonal mesh as vertices plus faces of 3 or more vertex indices.
///
/// Construct via [`IndexedMesh::new`], [`parse_obj`] or
/// [`deduplicate_vertices`] so that the edge adjacency stays consistent.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexedMesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<Vec<u32>>,
    adjacency: Vec<Vec<u32>>,
}

impl IndexedMesh {
    /// Validates face indices and builds the edge-based adjacency.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<Vec<u32>>) -> Result<Self> {
        for (fi, face) in faces.iter().enumerate() {
            if face.len() < 3 {
                return Err(Error::Structure(format!(
                    "face {fi} has {} vertices, need at least 3",
                    face.len()
                )));
            }
            for &v in face {
                if v as usize >= vertices.len() {
                    return Err(Error::Structure(format!(
                        "face {fi} references vertex {v} out of {}",
                        vertices.len()
                    )));
                }
            }
            let mut sorted = face.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Structure(format!(
                    "face {fi} repeats a vertex index"
                )));
            }
        }
        let adjacency = build_adjacency(&faces);
        Ok(Self {
            vertices,
            faces,
            adjacency,
        })
    }

    /// Faces sharing at least one edge (unordered vertex pair) with `face`.
    pub fn adjacent(&self, face: usize) -> &[u32] {
        &self.adjacency[face]
    }

    pub fn aabb(&self) -> Aabb {
        Aabb::from_points(&self.vertices)
    }

    pub fn bbox_diagonal(&self) -> f64 {
        self.aabb().diagonal()
    }

    /// Fan triangulation of all faces as vertex-index triples.
    pub fn triangles(&self) -> Vec<[u32; 3]> {
        let mut tris = Vec::new();
        for face in &self.faces {
            for k in 1..face.len() - 1 {
                tris.push([face[0], face[k], face[k + 1]]);
            }
        }
        tris
    }

    /// Appends another mesh, offsetting its indices.
    pub fn append(&mut self, other: &IndexedMesh) {
        let offset = self.vertices.len() as u32;
        self.vertices.extend_from_slice(&other.vertices);
        for face in &other.faces {
            self.faces.push(face.iter().map(|&v| v + offset).collect());
        }
        self.adjacency = build_adjacency(&self.faces);
    }
}

fn build_adjacency(faces: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut edge_faces: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    for (fi, face) in faces.iter().enumerate() {
        for i in 0..face.len() {
            let a = face[i];
            let b = face[(i + 1) % face.len()];
            let key = (a.min(b), a.max(b));
            edge_faces.entry(key).or_default().push(fi as u32);
        }
    }
    let mut adjacency = vec![Vec::new(); faces.len()];
    for list in edge_faces.values() {
        for i in 0..list.len() {
            for j in 0..list.len() {
                if i != j {
                    adjacency[list[i] as usize].push(list[j]);
                }
            }
        }
    }
    for adj in &mut adjacency {
        adj.sort_unstable();
        adj.dedup();
    }
    adjacency
}

/// Parses Wavefront OBJ text. Only `v` and `f` records are used; `f`
/// entries may carry `v/vt/vn` syntax and negative (relative) indices.
pub fn parse_obj(reader: impl BufRead) -> Result<IndexedMesh> {
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut faces: Vec<Vec<u32>> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let line = line.split('#').next().unwrap_or("");
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let mut coords = [0.0f64; 3];
                for c in &mut coords {
                    let tok = tokens.next().ok_or_else(|| Error::Parse {
                        line: lineno,
                        message: "vertex with fewer than 3 coordinates".into(),
                    })?;
                    *c = tok.parse().map_err(|_| Error::Parse {
                        line: lineno,
                        message: format!("bad coordinate '{tok}'"),
                    })?;
                    if !c.is_finite() {
                        return Err(Error::Parse {
                            line: lineno,
                            message: format!("non-finite coordinate '{tok}'"),
                        });
                    }
                }
                vertices.push(Vec3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let mut face = Vec::new();
                for tok in tokens {
                    let first = tok.split('/').next().unwrap_or("");
                    let raw: i64 = first.parse().map_err(|_| Error::Parse {
                        line: lineno,
                        message: format!("bad face index '{tok}'"),
                    })?;
                    let resolved = if raw < 0 {
                        // relative to the number of vertices seen so far
                        vertices.len() as i64 + raw
                    } else if raw > 0 {
                        raw - 1
                    } else {
                        return Err(Error::Parse {
                            line: lineno,
                            message: "face index 0 is invalid".into(),
                        });
                    };
                    if resolved < 0 {
                        return Err(Error::Structure(format!(
                            "line {lineno}: face index {raw} resolves before the first vertex"
                        )));
                    }
                    face.push(resolved as u32);
                }
                if face.len() < 3 {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("face with {} vertices, need at least 3", face.len()),
                    });
                }
                faces.push(face);
            }
            _ => {}
        }
    }
    IndexedMesh::new(vertices, faces)
}

/// Writes `v`/`f` records. Coordinates round-trip bit-exactly through
/// [`parse_obj`].
pub fn write_obj(mesh: &IndexedMesh, mut out: impl Write) -> std::io::Result<()> {
    for v in &mesh.vertices {
        writeln!(out, "v {} {} {}", v.x, v.y, v.z)?;
    }
    for face in &mesh.faces {
        write!(out, "f")?;
        for &v in face {
            write!(out, " {}", v + 1)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Merges vertices whose coordinates lie within `epsilon` of each other
/// (`epsilon == 0` means bit-exact equality) and remaps faces. Faces that
/// degenerate to repeated indices are dropped; adjacency is rebuilt.
pub fn deduplicate_vertices(mesh: &IndexedMesh, epsilon: f64) -> IndexedMesh {
    let remap: Vec<u32> = if epsilon == 0.0 {
        let mut seen: HashMap<(u64, u64, u64), u32> = HashMap::new();
        let mut remap = Vec::with_capacity(mesh.vertices.len());
        let mut out_count = 0u32;
        for v in &mesh.vertices {
            let key = (v.x.to_bits(), v.y.to_bits(), v.z.to_bits());
            let id = *seen.entry(key).or_insert_with(|| {
                let id = out_count;
                out_count += 1;
                id
            });
            remap.push(id);
        }
        remap
    } else {
        // Uniform grid with cell size epsilon: any representative within
        // distance epsilon lies in the 27 neighboring cells.
        let cell = |v: f64| (v / epsilon).floor() as i64;
        let mut grid: HashMap<(i64, i64, i64), Vec<u32>> = HashMap::new();
        let mut reps: Vec<Vec3> = Vec::new();
        let mut remap = Vec::with_capacity(mesh.vertices.len());
        for v in &mesh.vertices {
            let (cx, cy, cz) = (cell(v.x), cell(v.y), cell(v.z));
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        if let Some(ids) = grid.get(&(cx + dx, cy + dy, cz + dz)) {
                            for &id in ids {
                                if (reps[id as usize] - *v).norm() <= epsilon {
                                    found = Some(id);
                                    break 'search;
                                }
                            }
                        }
                    }
                }
            }
            let id = found.unwrap_or_else(|| {
                let id = reps.len() as u32;
                reps.push(*v);
                grid.entry((cx, cy, cz)).or_default().push(id);
                id
            });
            remap.push(id);
        }
        remap
    };

    let vertex_count = remap.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut vertices = vec![Vec3::ZERO; vertex_count];
    for (old, &new) in remap.iter().enumerate() {
        vertices[new as usize] = mesh.vertices[old];
    }

    let mut faces = Vec::with_capacity(mesh.faces.len());
    for face in &mesh.faces {
        let mapped: Vec<u32> = face.iter().map(|&v| remap[v as usize]).collect();
        let mut sorted = mapped.clone();
        sorted.sort_unstable();
        if sorted.windows(2).all(|w| w[0] != w[1]) {
            faces.push(mapped);
        }
    }

    let adjacency = build_adjacency(&faces);
    IndexedMesh {
        vertices,
        faces,
        adjacency,
    }
}

/// Per (fan-)triangle orientation data of one face.
///
/// Triangles and quads produce one record; polygons with more than four
/// vertices produce one record per fan triangle rooted at vertex 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceAttributes {
    /// Index of the owning face in the mesh.
    pub face: u32,
    /// Unit normal, or zero for degenerate geometry.
    pub normal: Vec3,
    /// Unnormalized tangent following the face's edge directions.
    pub tangent: Vec3,
    pub area: f64,
}

/// Computes normals, tangents and areas for every face.
pub fn face_attributes(mesh: &IndexedMesh) -> Vec<FaceAttributes> {
    let mut out = Vec::with_capacity(mesh.faces.len());
    for (fi, face) in mesh.faces.iter().enumerate() {
        let fi = fi as u32;
        let p = |i: usize| mesh.vertices[face[i] as usize];
        match face.len() {
            3 => out.push(triangle_attributes(fi, p(0), p(1), p(2))),
            4 => {
                let (v0, v1, v2, v3) = (p(0), p(1), p(2), p(3));
                let cross = (v0 - v2).cross(v1 - v3);
                let normal = cross.normalized().unwrap_or(Vec3::ZERO);
                let tangent = v0 - v2 + v1 - v3;
                let area =
                    0.5 * (v1 - v0).cross(v2 - v0).norm() + 0.5 * (v2 - v0).cross(v3 - v0).norm();
                out.push(FaceAttributes {
                    face: fi,
                    normal,
                    tangent,
                    area,
                });
            }
            n => {
                for k in 1..n - 1 {
                    out.push(triangle_attributes(fi, p(0), p(k), p(k + 1)));
                }
            }
        }
    }
    out
}

fn triangle_attributes(face: u32, v0: Vec3, v1: Vec3, v2: Vec3) -> FaceAttributes {
    let cross = (v2 - v0).cross(v1 - v0);
    let area = 0.5 * cross.norm();
    let normal = cross.normalized().unwrap_or(Vec3::ZERO);

    // Treat the triangle as half of a regular quad: the longest edge plays
    // the role of a diagonal.
    let verts = [v0, v1, v2];
    let mut edges: Vec<(Vec3, usize)> =
        (0..3).map(|i| (verts[(i + 1) % 3] - verts[i], i)).collect();
    // near-equal lengths keep their cyclic order so the picked edge does
    // not depend on rounding noise under rigid transforms
    edges.sort_by(|a, b| {
        let (la, lb) = (a.0.norm(), b.0.norm());
        if (la - lb).abs() <= 1e-9 * la.max(lb) {
            std::cmp::Ordering::Equal
        } else {
            la.partial_cmp(&lb).unwrap()
        }
    });
    let (e0, e1, e2) = (edges[0].0, edges[1].0, edges[2].0);
    let t0 = 0.5 * (e0 - e1 + e2);
    // flip based on the vertex opposite the longest edge
    let e2_start = verts[edges[2].1];
    let opposite = verts[(edges[2].1 + 2) % 3];
    let tangent = if (opposite - e2_start).dot(e2.cross(normal)) < 0.0 {
        -t0
    } else {
        t0
    };
    FaceAttributes {
        face,
        normal,
        tangent,
        area,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn parse(text: &str) -> Result<IndexedMesh> {
        parse_obj(std::io::Cursor::new(text))
    }

    #[test]
    fn parse_minimal_triangle() {
        let m = parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n").unwrap();
        assert_eq!(m.vertices.len(), 3);
        assert_eq!(m.faces, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn parse_short_face_is_error() {
        let err = parse("v 0 0 0\nv 1 0 0\nf 1 2\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_bad_coordinate_reports_line() {
        let err = parse("v 0 zero 0\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_non_finite_coordinates() {
        assert!(parse("v 0 nan 0\n").is_err());
        assert!(parse("v inf 0 0\n").is_err());
    }

    #[test]
    fn parse_index_out_of_range() {
        let err = parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n").unwrap_err();
        assert!(matches!(err, Error::Structure(_)));
    }

    #[test]
    fn parse_quad_stays_one_face() {
        let m = parse("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n").unwrap();
        assert_eq!(m.faces.len(), 1);
        assert_eq!(m.faces[0].len(), 4);
    }

    #[test]
    fn parse_negative_and_slash_indices() {
        let m = parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3/1/1 -2/2/2 -1/3/3\n").unwrap();
        assert_eq!(m.faces, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn parse_negative_index_before_first_vertex() {
        let err = parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -4 1 2\n").unwrap_err();
        assert!(matches!(err, Error::Structure(_)));
    }

    #[test]
    fn obj_round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let vertices: Vec<Vec3> = (0..40)
            .map(|_| {
                Vec3::new(
                    rng.gen::<f64>() * 1e3 - 500.0,
                    rng.gen::<f64>() * 1e-3,
                    rng.gen::<f64>(),
                )
            })
            .collect();
        let faces = vec![vec![0u32, 1, 2], vec![3, 4, 5, 6], vec![7, 8, 9, 10, 11]];
        let mesh = IndexedMesh::new(vertices, faces).unwrap();
        let mut buf = Vec::new();
        write_obj(&mesh, &mut buf).unwrap();
        let back = parse_obj(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back.vertices, mesh.vertices);
        assert_eq!(back.faces, mesh.faces);
    }

    #[test]
    fn dedup_merges_coincident_cubes() {
        // two tetrahedra sharing 3 duplicated corner coordinates
        let mut vertices = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ];
        vertices.extend_from_slice(&[
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ]);
        let faces = vec![vec![0u32, 1, 2], vec![3, 4, 5]];
        let mesh = IndexedMesh::new(vertices, faces).unwrap();
        assert!(mesh.adjacent(0).is_empty());
        let deduped = deduplicate_vertices(&mesh, 0.0);
        assert_eq!(deduped.vertices.len(), 3);
        assert_eq!(deduped.faces.len(), 2);
        assert_eq!(deduped.adjacent(0), &[1]);
        assert_eq!(deduped.adjacent(1), &[0]);
    }

    #[test]
    fn dedup_without_duplicates_is_identity() {
        let m = parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3\nf 2 4 3\n").unwrap();
        let d = deduplicate_vertices(&m, 0.0);
        assert_eq!(d.vertices, m.vertices);
        assert_eq!(d.faces, m.faces);
    }

    #[test]
    fn dedup_is_idempotent_and_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // clusters of points within eps of a center
        let mut vertices = Vec::new();
        for _ in 0..50 {
            let c = Vec3::new(rng.gen::<f64>() * 10.0, rng.gen::<f64>() * 10.0, 0.0);
            for _ in 0..3 {
                let jitter = Vec3::new(rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>());
                vertices.push(c + jitter * 1e-4);
            }
        }
        let faces: Vec<Vec<u32>> = (0..48)
            .map(|i| vec![i as u32, i as u32 + 1, i as u32 + 2])
            .collect();
        let mesh = IndexedMesh::new(vertices, faces).unwrap();
        let eps = 5e-4;
        let once = deduplicate_vertices(&mesh, eps);
        let twice = deduplicate_vertices(&once, eps);
        assert_eq!(once.vertices.len(), twice.vertices.len());
        for f in 0..once.faces.len() {
            for &n in once.adjacent(f) {
                assert!(once.adjacent(n as usize).contains(&(f as u32)));
            }
        }
    }

    #[test]
    fn unit_square_attributes() {
        let m = parse("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n").unwrap();
        let attrs = face_attributes(&m);
        assert_eq!(attrs.len(), 1);
        let a = attrs[0];
        assert!((a.normal - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-12);
        assert!((a.tangent - Vec3::new(0.0, -2.0, 0.0)).norm() < 1e-12);
        assert!((a.area - 1.0).abs() < 1e-12);
    }

    #[test]
    fn right_triangle_attributes() {
        let m = parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n").unwrap();
        let a = face_attributes(&m)[0];
        assert!((a.area - 0.5).abs() < 1e-12);
        assert!((a.normal.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_area_face_has_zero_normal() {
        let m = parse("v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n").unwrap();
        let a = face_attributes(&m)[0];
        assert_eq!(a.area, 0.0);
        assert_eq!(a.normal, Vec3::ZERO);
    }

    #[test]
    fn random_quad_normal_agrees_with_fan() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let verts: Vec<Vec3> = (0..4)
                .map(|_| Vec3::new(rng.gen(), rng.gen(), rng.gen()))
                .collect();
            let mesh = IndexedMesh::new(verts.clone(), vec![vec![0, 1, 2, 3]]).unwrap();
            let quad = face_attributes(&mesh)[0];
            if quad.area < 1e-6 {
                continue;
            }
            // oracle: the summed counterclockwise fan area vectors point the
            // same way (the diagonal cross product is exactly their sum)
            let n0 = (verts[1] - verts[0]).cross(verts[2] - verts[0]);
            let n1 = (verts[2] - verts[0]).cross(verts[3] - verts[0]);
            let avg = n0 + n1;
            assert!(quad.normal.dot(avg) > 0.0, "quad normal flipped vs fan");
            assert!((quad.normal.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn polygon_fan_records_share_face_id() {
        let m = parse("v 0 0 0\nv 1 0 0\nv 2 1 0\nv 1 2 0\nv 0 2 0\nf 1 2 3 4 5\n").unwrap();
        let attrs = face_attributes(&m);
        assert_eq!(attrs.len(), 3);
        assert!(attrs.iter().all(|a| a.face == 0));
        let total: f64 = attrs.iter().map(|a| a.area).sum();
        assert!(total > 0.0);
    }

    #[test]
    fn normals_unit_length_on_random_meshes() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let vertices: Vec<Vec3> = (0..60)
            .map(|_| Vec3::new(rng.gen(), rng.gen(), rng.gen()))
            .collect();
        let faces: Vec<Vec<u32>> = (0..20)
            .map(|i| vec![3 * i as u32, 3 * i as u32 + 1, 3 * i as u32 + 2])
            .collect();
        let mesh = IndexedMesh::new(vertices, faces).unwrap();
        for a in face_attributes(&mesh) {
            if a.area > 1e-12 {
                assert!((a.normal.norm() - 1.0).abs() < 1e-9);
            }
        }
    }
}
