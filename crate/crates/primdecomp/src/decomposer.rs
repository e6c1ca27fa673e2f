//! The greedy bottom-up merge engine: one primitive per face, a priority
//! queue over adjacent-primitive pairs ordered by excess-volume cost, DSU +
//! cyclic face rings for bookkeeping, pairwise component merging once
//! topological edges run out, and redundant-primitive culling.

use crate::math::Vec3;
use crate::mesh::{FaceAttributes, IndexedMesh};
use crate::primitives::{fit_all, FitConfig, Primitive};
use crate::quadric::{face_quadric, Quadric};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

/// Rejection-sampling mode for the intersection-aware cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntersectionCost {
    pub sample_count: u32,
    pub seed: u64,
}

/// Parameters of one decomposition run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposeConfig {
    /// Target number of output primitives (N >= 1).
    pub target: usize,
    /// Maximum excess volume per merge as a fraction of the input's
    /// axis-aligned bounding-box volume. Unlimited by default.
    pub max_excess_volume: f64,
    pub fit: FitConfig,
    /// Weight of the tangent term added to each face quadric; 0 disables.
    pub tangent_epsilon: f64,
    /// Optional intersection-aware cost (slow; ablation mode).
    pub intersection: Option<IntersectionCost>,
    /// Drop primitives whose subsumed vertices all lie inside another
    /// primitive, reassigning their faces.
    pub cull_redundant: bool,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig {
            target: 1,
            max_excess_volume: f64::INFINITY,
            fit: FitConfig::default(),
            tangent_epsilon: 0.0,
            intersection: None,
            cull_redundant: true,
        }
    }
}

impl DecomposeConfig {
    fn validate(&self) -> Result<()> {
        if self.target < 1 {
            return Err(Error::Config(
                "target primitive count must be at least 1".into(),
            ));
        }
        if self.max_excess_volume.is_nan() || self.max_excess_volume <= 0.0 {
            return Err(Error::Config("max excess volume must be positive".into()));
        }
        if self.tangent_epsilon < 0.0 {
            return Err(Error::Config("tangent epsilon must be nonnegative".into()));
        }
        self.fit.validate()
    }
}

/// One output primitive together with the faces it subsumes.
#[derive(Debug, Clone, PartialEq)]
pub struct DecomposedPrimitive {
    pub primitive: Primitive,
    /// Indices into the decomposed mesh's face list, ascending.
    pub faces: Vec<u32>,
}

/// Final decomposition output.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveSet {
    pub primitives: Vec<DecomposedPrimitive>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// FNV-1a hash of the input mesh, hex encoded.
    pub input_hash: String,
    pub config: ConfigSnapshot,
}

/// JSON-safe snapshot of [`DecomposeConfig`] (infinity maps to `None`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub target: usize,
    pub max_excess_volume: Option<f64>,
    pub fit: FitConfig,
    pub tangent_epsilon: f64,
    pub intersection: Option<IntersectionCost>,
    pub cull_redundant: bool,
}

impl ConfigSnapshot {
    fn of(config: &DecomposeConfig) -> Self {
        ConfigSnapshot {
            target: config.target,
            max_excess_volume: if config.max_excess_volume.is_finite() {
                Some(config.max_excess_volume)
            } else {
                None
            },
            fit: config.fit.clone(),
            tangent_epsilon: config.tangent_epsilon,
            intersection: config.intersection,
            cull_redundant: config.cull_redundant,
        }
    }
}

/// Counters describing one decomposition run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecomposeStats {
    pub pops: usize,
    pub stale_discarded: usize,
    pub merges: usize,
    pub culled: usize,
    /// Total points gathered across candidate evaluations.
    pub points_visited: usize,
    /// Number of candidate fits evaluated.
    pub evaluations: usize,
}

/// Fits a merged candidate over both primitives' points with the summed
/// quadric and returns it with the excess-volume cost
/// `V'(candidate) - (Vol(p0) + Vol(p1))`, stored volumes being weighted.
pub fn merge_cost(
    q0: &Quadric,
    q1: &Quadric,
    points: &[Vec3],
    stored_vol0: f64,
    stored_vol1: f64,
    config: &FitConfig,
) -> Result<(Primitive, f64, f64)> {
    let q = *q0 + *q1;
    let (candidate, weighted) = fit_all(&q, points, config)?;
    Ok((candidate, weighted, weighted - (stored_vol0 + stored_vol1)))
}

/// As [`merge_cost`] but adds back the double-counted overlap volume,
/// estimated by rejection sampling inside the smaller primitive.
#[allow(clippy::too_many_arguments)]
pub fn merge_cost_with_intersection(
    q0: &Quadric,
    q1: &Quadric,
    p0: &Primitive,
    p1: &Primitive,
    points: &[Vec3],
    stored_vol0: f64,
    stored_vol1: f64,
    config: &FitConfig,
    isect: IntersectionCost,
) -> Result<(Primitive, f64, f64)> {
    let (candidate, weighted, base) = merge_cost(q0, q1, points, stored_vol0, stored_vol1, config)?;
    let overlap = intersection_volume(p0, p1, isect.sample_count, isect.seed);
    Ok((candidate, weighted, base + overlap))
}

/// Monte-Carlo estimate of `V(a intersect b)`: uniform points inside the
/// smaller primitive, contained fraction scaled by its volume.
pub fn intersection_volume(a: &Primitive, b: &Primitive, samples: u32, seed: u64) -> f64 {
    if samples == 0 {
        return 0.0;
    }
    let (small, big) = if a.volume() <= b.volume() {
        (a, b)
    } else {
        (b, a)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let p = sample_inside(small, &mut rng);
        if big.contains(p, 0.0) {
            hits += 1;
        }
    }
    small.volume() * hits as f64 / samples as f64
}

/// Uniform sample inside a primitive by rejection from a shape-local box.
fn sample_inside(prim: &Primitive, rng: &mut ChaCha8Rng) -> Vec3 {
    match prim {
        Primitive::Obb(b) => {
            let u = Vec3::new(
                rng.gen::<f64>() * 2.0 - 1.0,
                rng.gen::<f64>() * 2.0 - 1.0,
                rng.gen::<f64>() * 2.0 - 1.0,
            );
            b.center
                + b.axes[0] * (u.x * b.half_extents[0])
                + b.axes[1] * (u.y * b.half_extents[1])
                + b.axes[2] * (u.z * b.half_extents[2])
        }
        Primitive::Sphere(s) => loop {
            let p = Vec3::new(
                rng.gen::<f64>() * 2.0 - 1.0,
                rng.gen::<f64>() * 2.0 - 1.0,
                rng.gen::<f64>() * 2.0 - 1.0,
            );
            if p.norm_squared() <= 1.0 {
                break s.center + p * s.radius;
            }
        },
        Primitive::Cylinder(c) => {
            let axis_vec = c.end - c.start;
            let h = axis_vec.norm();
            let axis = if h > 0.0 {
                axis_vec / h
            } else {
                Vec3::new(0.0, 0.0, 1.0)
            };
            let b1 = axis.any_orthonormal();
            let b2 = axis.cross(b1);
            loop {
                let x = rng.gen::<f64>() * 2.0 - 1.0;
                let y = rng.gen::<f64>() * 2.0 - 1.0;
                if x * x + y * y <= 1.0 {
                    let t = rng.gen::<f64>();
                    break c.start + axis * (t * h) + b1 * (x * c.radius) + b2 * (y * c.radius);
                }
            }
        }
        Primitive::Capsule(c) => {
            let axis_vec = c.end - c.start;
            let h = axis_vec.norm();
            let axis = if h > 0.0 {
                axis_vec / h
            } else {
                Vec3::new(0.0, 0.0, 1.0)
            };
            let b1 = axis.any_orthonormal();
            let b2 = axis.cross(b1);
            loop {
                let x = rng.gen::<f64>() * 2.0 - 1.0;
                let y = rng.gen::<f64>() * 2.0 - 1.0;
                let t = rng.gen::<f64>() * (h + 2.0 * c.radius) - c.radius;
                let p = c.start + axis * t + b1 * (x * c.radius) + b2 * (y * c.radius);
                if prim.contains(p, 0.0) {
                    break p;
                }
            }
        }
        Primitive::Frustum(f) => {
            let rmax = f.r_bot.max(f.r_top);
            let b1 = f.axis.any_orthonormal();
            let b2 = f.axis.cross(b1);
            loop {
                let x = rng.gen::<f64>() * 2.0 - 1.0;
                let y = rng.gen::<f64>() * 2.0 - 1.0;
                let t = rng.gen::<f64>();
                let allowed = f.r_bot * (1.0 - t) + f.r_top * t;
                if (x * x + y * y) * rmax * rmax <= allowed * allowed {
                    break f.base_center
                        + f.axis * (t * f.height)
                        + b1 * (x * rmax)
                        + b2 * (y * rmax);
                }
            }
        }
        Primitive::Prism(p) => {
            let zmax = p.h_zt.max(p.h_zb);
            loop {
                let x = rng.gen::<f64>() * 2.0 - 1.0;
                let y = rng.gen::<f64>() * 2.0 - 1.0;
                let z = rng.gen::<f64>() * 2.0 - 1.0;
                let yn = (y + 1.0) * 0.5;
                if (z * zmax).abs() <= p.half_width(yn) {
                    break p.center
                        + p.axes[0] * (x * p.h_x)
                        + p.axes[1] * (y * p.h_y)
                        + p.axes[2] * (z * zmax);
                }
            }
        }
    }
}

struct Dsu {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    /// Unions two roots; the larger set survives (ties keep the lower id).
    fn union_roots(&mut self, a: u32, b: u32) -> u32 {
        debug_assert!(self.parent[a as usize] == a && self.parent[b as usize] == b && a != b);
        let (winner, loser) = match self.size[a as usize].cmp(&self.size[b as usize]) {
            Ordering::Greater => (a, b),
            Ordering::Less => (b, a),
            Ordering::Equal => (a.min(b), a.max(b)),
        };
        self.parent[loser as usize] = winner;
        self.size[winner as usize] += self.size[loser as usize];
        winner
    }
}

/// Candidate merge in the priority queue. Ordered by cost with the push
/// sequence number as the deterministic edge-id tie-break; stale
/// generation stamps are discarded on pop.
struct MergeEntry {
    cost: f64,
    seq: u64,
    a: u32,
    b: u32,
    gen_a: u32,
    gen_b: u32,
    candidate: Primitive,
    candidate_vol: f64,
    stored_sum: f64,
}

impl PartialEq for MergeEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cost == other.cost && self.seq == other.seq
    }
}
impl Eq for MergeEntry {}
impl PartialOrd for MergeEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for MergeEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap, we want minimum cost first
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct State<'a> {
    positions: &'a [Vec3],
    config: &'a DecomposeConfig,
    dsu: Dsu,
    /// cyclic ring of face ids per live primitive
    ring_next: Vec<u32>,
    /// per-root payload, valid only at DSU roots
    quadrics: Vec<Quadric>,
    prims: Vec<Primitive>,
    stored_vol: Vec<f64>,
    verts: Vec<Vec<u32>>,
    generation: Vec<u32>,
    neighbors: Vec<BTreeSet<u32>>,
    queue: BinaryHeap<MergeEntry>,
    next_seq: u64,
    live: usize,
    pairwise: bool,
    max_cost: f64,
    stats: DecomposeStats,
    points_buf: Vec<Vec3>,
}

impl<'a> State<'a> {
    fn gather_points(&mut self, a: u32, b: u32) {
        self.points_buf.clear();
        for &v in merge_iter(&self.verts[a as usize], &self.verts[b as usize]) {
            self.points_buf.push(self.positions[v as usize]);
        }
    }

    fn evaluate(&mut self, a: u32, b: u32) -> Result<MergeEntry> {
        let (a, b) = (a.min(b), a.max(b));
        self.gather_points(a, b);
        self.stats.evaluations += 1;
        self.stats.points_visited += self.points_buf.len();
        let stored0 = self.stored_vol[a as usize];
        let stored1 = self.stored_vol[b as usize];
        let (candidate, weighted, cost) = match self.config.intersection {
            None => merge_cost(
                &self.quadrics[a as usize],
                &self.quadrics[b as usize],
                &self.points_buf,
                stored0,
                stored1,
                &self.config.fit,
            )?,
            Some(isect) => {
                let pair_seed = mix_seed(
                    isect.seed,
                    a,
                    b,
                    self.generation[a as usize],
                    self.generation[b as usize],
                );
                merge_cost_with_intersection(
                    &self.quadrics[a as usize],
                    &self.quadrics[b as usize],
                    &self.prims[a as usize],
                    &self.prims[b as usize],
                    &self.points_buf,
                    stored0,
                    stored1,
                    &self.config.fit,
                    IntersectionCost {
                        sample_count: isect.sample_count,
                        seed: pair_seed,
                    },
                )?
            }
        };
        Ok(MergeEntry {
            cost,
            seq: 0,
            a,
            b,
            gen_a: self.generation[a as usize],
            gen_b: self.generation[b as usize],
            candidate,
            candidate_vol: weighted,
            stored_sum: stored0 + stored1,
        })
    }

    fn push_edge(&mut self, a: u32, b: u32, honor_threshold: bool) -> Result<()> {
        let mut entry = self.evaluate(a, b)?;
        if honor_threshold && entry.cost > self.max_cost {
            return Ok(());
        }
        entry.seq = self.next_seq;
        self.next_seq += 1;
        self.queue.push(entry);
        Ok(())
    }

    fn is_stale(&mut self, e: &MergeEntry) -> bool {
        self.dsu.find(e.a) != e.a
            || self.dsu.find(e.b) != e.b
            || self.generation[e.a as usize] != e.gen_a
            || self.generation[e.b as usize] != e.gen_b
    }

    fn execute(&mut self, e: MergeEntry) -> Result<u32> {
        // generation stamps matched, so the stored volumes the cost was
        // computed from must be unchanged
        let current_sum = self.stored_vol[e.a as usize] + self.stored_vol[e.b as usize];
        if current_sum.to_bits() != e.stored_sum.to_bits() {
            return Err(Error::Invariant(
                "stale merge entry escaped the generation check".into(),
            ));
        }
        let (a, b) = (e.a, e.b);
        let root = self.dsu.union_roots(a, b);
        let other = if root == a { b } else { a };

        self.ring_next.swap(a as usize, b as usize);
        self.quadrics[root as usize] = self.quadrics[a as usize] + self.quadrics[b as usize];
        self.prims[root as usize] = e.candidate;
        self.stored_vol[root as usize] = e.candidate_vol;
        let merged = merge_sorted(&self.verts[a as usize], &self.verts[b as usize]);
        self.verts[root as usize] = merged;
        self.verts[other as usize] = Vec::new();

        let other_neighbors = std::mem::take(&mut self.neighbors[other as usize]);
        self.neighbors[root as usize].extend(other_neighbors);
        self.generation[root as usize] += 1;
        self.live -= 1;
        self.stats.merges += 1;
        Ok(root)
    }

    /// Recomputes candidate edges incident to `root` after a merge. In the
    /// pairwise phase adjacency is the complete graph over live roots.
    fn refresh_incident(&mut self, root: u32) -> Result<()> {
        if self.pairwise {
            let others: Vec<u32> = self
                .live_roots()
                .into_iter()
                .filter(|&r| r != root)
                .collect();
            for other in others {
                self.push_edge(root, other, true)?;
            }
        } else {
            let raw = std::mem::take(&mut self.neighbors[root as usize]);
            let mut canon = BTreeSet::new();
            for n in raw {
                let r = self.dsu.find(n);
                if r != root {
                    canon.insert(r);
                }
            }
            for &n in &canon {
                self.push_edge(root, n, false)?;
            }
            self.neighbors[root as usize] = canon;
        }
        Ok(())
    }

    fn live_roots(&mut self) -> Vec<u32> {
        let n = self.ring_next.len();
        let mut roots: Vec<u32> = (0..n as u32).filter(|&f| self.dsu.find(f) == f).collect();
        roots.sort_unstable();
        roots
    }

    fn ring_faces(&self, root: u32) -> Vec<u32> {
        let mut faces = vec![root];
        let mut cur = self.ring_next[root as usize];
        while cur != root {
            faces.push(cur);
            cur = self.ring_next[cur as usize];
        }
        faces.sort_unstable();
        faces
    }
}

fn mix_seed(seed: u64, a: u32, b: u32, gen_a: u32, gen_b: u32) -> u64 {
    let mut h = seed ^ 0x9E37_79B9_7F4A_7C15;
    for v in [a as u64, b as u64, gen_a as u64, gen_b as u64] {
        h ^= v
            .wrapping_add(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(h << 6)
            .wrapping_add(h >> 2);
        h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    }
    h
}

fn merge_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Iterator over the union of two sorted unique slices.
fn merge_iter<'a>(a: &'a [u32], b: &'a [u32]) -> impl Iterator<Item = &'a u32> {
    MergeIter { a, b, i: 0, j: 0 }
}

struct MergeIter<'a> {
    a: &'a [u32],
    b: &'a [u32],
    i: usize,
    j: usize,
}

impl<'a> Iterator for MergeIter<'a> {
    type Item = &'a u32;
    fn next(&mut self) -> Option<&'a u32> {
        match (self.a.get(self.i), self.b.get(self.j)) {
            (Some(x), Some(y)) => match x.cmp(y) {
                Ordering::Less => {
                    self.i += 1;
                    Some(x)
                }
                Ordering::Greater => {
                    self.j += 1;
                    Some(y)
                }
                Ordering::Equal => {
                    self.i += 1;
                    self.j += 1;
                    Some(x)
                }
            },
            (Some(x), None) => {
                self.i += 1;
                Some(x)
            }
            (None, Some(y)) => {
                self.j += 1;
                Some(y)
            }
            (None, None) => None,
        }
    }
}

/// Runs the full decomposition. `attrs` must come from
/// [`crate::mesh::face_attributes`] on the same (already deduplicated) mesh.
pub fn decompose(
    mesh: &IndexedMesh,
    attrs: &[FaceAttributes],
    config: &DecomposeConfig,
) -> Result<PrimitiveSet> {
    decompose_with_stats(mesh, attrs, config).map(|(set, _)| set)
}

/// As [`decompose`], also returning run counters.
pub fn decompose_with_stats(
    mesh: &IndexedMesh,
    attrs: &[FaceAttributes],
    config: &DecomposeConfig,
) -> Result<(PrimitiveSet, DecomposeStats)> {
    config.validate()?;
    let n_faces = mesh.faces.len();
    if n_faces == 0 {
        return Err(Error::Structure("cannot decompose an empty mesh".into()));
    }

    // per-face quadrics: fan records sum per face
    let mut quadrics = vec![Quadric::ZERO; n_faces];
    for attr in attrs {
        quadrics[attr.face as usize] += face_quadric(attr, config.tangent_epsilon);
    }

    // sorted unique vertex ids per face
    let mut verts: Vec<Vec<u32>> = Vec::with_capacity(n_faces);
    for face in &mesh.faces {
        let mut v = face.clone();
        v.sort_unstable();
        v.dedup();
        verts.push(v);
    }

    let aabb = mesh.aabb();
    let max_cost = if config.max_excess_volume.is_finite() {
        config.max_excess_volume * aabb.volume()
    } else {
        f64::INFINITY
    };

    let mut prims = Vec::with_capacity(n_faces);
    let mut stored_vol = Vec::with_capacity(n_faces);
    let mut points_buf: Vec<Vec3> = Vec::new();
    for f in 0..n_faces {
        points_buf.clear();
        points_buf.extend(verts[f].iter().map(|&v| mesh.vertices[v as usize]));
        let (prim, wvol) = fit_all(&quadrics[f], &points_buf, &config.fit)?;
        prims.push(prim);
        stored_vol.push(wvol);
    }

    let neighbors: Vec<BTreeSet<u32>> = (0..n_faces)
        .map(|f| mesh.adjacent(f).iter().copied().collect())
        .collect();

    let mut state = State {
        positions: &mesh.vertices,
        config,
        dsu: Dsu::new(n_faces),
        ring_next: (0..n_faces as u32).collect(),
        quadrics,
        prims,
        stored_vol,
        verts,
        generation: vec![0; n_faces],
        neighbors,
        queue: BinaryHeap::new(),
        next_seq: 0,
        live: n_faces,
        pairwise: false,
        max_cost,
        stats: DecomposeStats::default(),
        points_buf,
    };

    if state.live > config.target {
        // seed the queue over all adjacent face pairs, skipping pairs whose
        // excess volume exceeds the threshold
        for a in 0..n_faces as u32 {
            let adj: Vec<u32> = state.neighbors[a as usize]
                .iter()
                .copied()
                .filter(|&b| b > a)
                .collect();
            for b in adj {
                state.push_edge(a, b, true)?;
            }
        }

        loop {
            while state.live > config.target {
                let Some(entry) = state.queue.pop() else {
                    break;
                };
                state.stats.pops += 1;
                if state.is_stale(&entry) {
                    state.stats.stale_discarded += 1;
                    continue;
                }
                let root = state.execute(entry)?;
                state.refresh_incident(root)?;
            }
            if state.live <= config.target || state.pairwise {
                break;
            }
            // pairwise component merging: no topological edges remain, so
            // candidate edges form a complete graph, still honoring the
            // excess-volume threshold
            state.pairwise = true;
            let roots = state.live_roots();
            for i in 0..roots.len() {
                for j in i + 1..roots.len() {
                    state.push_edge(roots[i], roots[j], true)?;
                }
            }
            if state.queue.is_empty() {
                break;
            }
        }
    }

    // collect live primitives
    let mut roots = state.live_roots();

    // cull primitives whose every subsumed vertex lies inside another live
    // primitive; their faces are reassigned to the containing primitive
    if config.cull_redundant {
        let tol = 1e-9 * aabb.diagonal();
        let mut alive: Vec<bool> = vec![true; roots.len()];
        for i in 0..roots.len() {
            let ri = roots[i];
            'others: for j in 0..roots.len() {
                if i == j || !alive[j] {
                    continue;
                }
                let rj = roots[j];
                let prim_j = state.prims[rj as usize];
                for &v in &state.verts[ri as usize] {
                    if !prim_j.contains(state.positions[v as usize], tol) {
                        continue 'others;
                    }
                }
                // fully contained: reassign faces and vertex list to j
                alive[i] = false;
                state.ring_next.swap(ri as usize, rj as usize);
                let merged = merge_sorted(&state.verts[ri as usize], &state.verts[rj as usize]);
                state.verts[rj as usize] = merged;
                state.verts[ri as usize] = Vec::new();
                state.dsu.parent[ri as usize] = rj;
                state.stats.culled += 1;
                break;
            }
        }
        roots = roots
            .into_iter()
            .zip(alive)
            .filter_map(|(r, keep)| keep.then_some(r))
            .collect();
    }

    // enclosure invariant: every subsumed vertex inside its primitive
    let tol = 1e-9 * aabb.diagonal();
    let mut primitives = Vec::with_capacity(roots.len());
    let mut face_total = 0usize;
    for &root in &roots {
        let prim = state.prims[root as usize];
        for &v in &state.verts[root as usize] {
            if !prim.contains(state.positions[v as usize], tol) {
                return Err(Error::Invariant(format!(
                    "vertex {v} escapes its owning {} primitive",
                    prim.kind().as_str()
                )));
            }
        }
        let faces = state.ring_faces(root);
        face_total += faces.len();
        primitives.push(DecomposedPrimitive {
            primitive: prim,
            faces,
        });
    }
    if face_total != n_faces {
        return Err(Error::Invariant(format!(
            "face rings cover {face_total} of {n_faces} faces"
        )));
    }

    let set = PrimitiveSet {
        primitives,
        provenance: Provenance {
            input_hash: format!("{:016x}", mesh_hash(mesh)),
            config: ConfigSnapshot::of(config),
        },
    };
    Ok((set, state.stats))
}

/// FNV-1a over vertex bits and face indices.
pub fn mesh_hash(mesh: &IndexedMesh) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    for v in &mesh.vertices {
        eat(&v.x.to_bits().to_le_bytes());
        eat(&v.y.to_bits().to_le_bytes());
        eat(&v.z.to_bits().to_le_bytes());
    }
    for face in &mesh.faces {
        eat(&(face.len() as u32).to_le_bytes());
        for &i in face {
            eat(&i.to_le_bytes());
        }
    }
    h
}

/// Combined per-kind primitive counts of a set, in kind order.
pub fn kind_counts(set: &PrimitiveSet) -> [usize; 6] {
    let mut counts = [0usize; 6];
    for p in &set.primitives {
        counts[p.primitive.kind().index()] += 1;
    }
    counts
}
