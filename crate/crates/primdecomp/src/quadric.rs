//! Area-weighted 3x3 quadric operators and their eigendecomposition into an
//! orientation basis.

use crate::math::Vec3;
use crate::mesh::FaceAttributes;
use std::ops::{Add, AddAssign};

/// Symmetric 3x3 matrix stored as its 6 unique entries
/// `[xx, xy, xz, yy, yz, zz]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quadric {
    m: [f64; 6],
}

impl Quadric {
    pub const ZERO: Quadric = Quadric { m: [0.0; 6] };

    pub fn from_entries(m: [f64; 6]) -> Self {
        Self { m }
    }

    /// `weight * v vᵀ`
    pub fn outer(v: Vec3, weight: f64) -> Self {
        Self {
            m: [
                weight * v.x * v.x,
                weight * v.x * v.y,
                weight * v.x * v.z,
                weight * v.y * v.y,
                weight * v.y * v.z,
                weight * v.z * v.z,
            ],
        }
    }

    #[inline]
    pub fn entry(&self, r: usize, c: usize) -> f64 {
        const IDX: [[usize; 3]; 3] = [[0, 1, 2], [1, 3, 4], [2, 4, 5]];
        self.m[IDX[r][c]]
    }

    pub fn entries(&self) -> [f64; 6] {
        self.m
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        Vec3::new(
            self.m[0] * v.x + self.m[1] * v.y + self.m[2] * v.z,
            self.m[1] * v.x + self.m[3] * v.y + self.m[4] * v.z,
            self.m[2] * v.x + self.m[4] * v.y + self.m[5] * v.z,
        )
    }

    pub fn trace(&self) -> f64 {
        self.m[0] + self.m[3] + self.m[5]
    }

    pub fn frobenius_norm(&self) -> f64 {
        let [xx, xy, xz, yy, yz, zz] = self.m;
        (xx * xx + yy * yy + zz * zz + 2.0 * (xy * xy + xz * xz + yz * yz)).sqrt()
    }

    pub fn scaled(&self, k: f64) -> Quadric {
        let mut m = self.m;
        for v in &mut m {
            *v *= k;
        }
        Quadric { m }
    }
}

impl Add for Quadric {
    type Output = Quadric;
    fn add(self, o: Quadric) -> Quadric {
        let mut m = self.m;
        for i in 0..6 {
            m[i] += o.m[i];
        }
        Quadric { m }
    }
}

impl AddAssign for Quadric {
    fn add_assign(&mut self, o: Quadric) {
        *self = *self + o;
    }
}

/// `area * (n nᵀ + ε t̂ t̂ᵀ)` for one face record. A zero `tangent_epsilon`
/// omits the tangent term entirely; zero-area records contribute nothing.
pub fn face_quadric(attr: &FaceAttributes, tangent_epsilon: f64) -> Quadric {
    if attr.area <= 0.0 {
        return Quadric::ZERO;
    }
    let mut q = Quadric::outer(attr.normal, attr.area);
    if tangent_epsilon > 0.0 {
        if let Some(t) = attr.tangent.normalized() {
            q += Quadric::outer(t, attr.area * tangent_epsilon);
        }
    }
    q
}

/// Orthonormal eigenbasis sorted by descending eigenvalue magnitude.
///
/// `axes[0]` carries the largest |eigenvalue|. Each axis is flipped so its
/// largest-magnitude component is positive (first such component on ties).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenBasis {
    pub axes: [Vec3; 3],
    pub lambdas: [f64; 3],
}

const IDENTITY_AXES: [Vec3; 3] = [
    Vec3 {
        x: 1.0,
        y: 0.0,
        z: 0.0,
    },
    Vec3 {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    },
    Vec3 {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    },
];

/// Eigendecomposition of a symmetric quadric. Uses the closed-form
/// characteristic-polynomial solution, falling back to Jacobi sweeps when
/// the discriminant indicates (nearly) repeated roots.
pub fn eigen_basis(q: &Quadric) -> EigenBasis {
    let scale = q.m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return EigenBasis {
            axes: IDENTITY_AXES,
            lambdas: [0.0; 3],
        };
    }
    let a = q.scaled(1.0 / scale);

    let solved = analytic_eigen(&a).unwrap_or_else(|| jacobi_eigen(&a));
    let (vals, vecs) = solved;

    // sort by |lambda| descending, deterministic tie-breaks
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| {
        vals[j]
            .abs()
            .partial_cmp(&vals[i].abs())
            .unwrap()
            .then(vals[j].partial_cmp(&vals[i]).unwrap())
            .then(i.cmp(&j))
    });

    let mut axes = [Vec3::ZERO; 3];
    let mut lambdas = [0.0f64; 3];
    for (slot, &i) in order.iter().enumerate() {
        axes[slot] = sign_convention(vecs[i]);
        lambdas[slot] = vals[i] * scale;
    }
    EigenBasis { axes, lambdas }
}

fn sign_convention(v: Vec3) -> Vec3 {
    let a = [v.x.abs(), v.y.abs(), v.z.abs()];
    let mut k = 0;
    if a[1] > a[k] {
        k = 1;
    }
    if a[2] > a[k] {
        k = 2;
    }
    if v.component(k) < 0.0 {
        -v
    } else {
        v
    }
}

/// Closed-form eigenpairs; `None` when the configuration is too degenerate
/// for reliable eigenvector extraction.
fn analytic_eigen(a: &Quadric) -> Option<([f64; 3], [Vec3; 3])> {
    let p1 = a.m[1] * a.m[1] + a.m[2] * a.m[2] + a.m[4] * a.m[4];
    if p1 < 1e-30 {
        // already diagonal
        return Some(([a.m[0], a.m[3], a.m[5]], IDENTITY_AXES));
    }
    let q = a.trace() / 3.0;
    let d0 = a.m[0] - q;
    let d1 = a.m[3] - q;
    let d2 = a.m[5] - q;
    let p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return Some(([q, q, q], IDENTITY_AXES));
    }
    let b = [
        (a.m[0] - q) / p,
        a.m[1] / p,
        a.m[2] / p,
        (a.m[3] - q) / p,
        a.m[4] / p,
        (a.m[5] - q) / p,
    ];
    let det_b = b[0] * (b[3] * b[5] - b[4] * b[4]) - b[1] * (b[1] * b[5] - b[4] * b[2])
        + b[2] * (b[1] * b[4] - b[3] * b[2]);
    let r = (det_b / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e0 = q + 2.0 * p * phi.cos();
    let e2 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3 * 2.0).cos();
    let e1 = 3.0 * q - e0 - e2;
    let vals = [e0, e1, e2];

    // nearly repeated roots: defer to Jacobi
    let disc = ((e0 - e1) * (e0 - e2) * (e1 - e2)).powi(2);
    if disc < 1e-12 {
        return None;
    }

    let mut vecs = [Vec3::ZERO; 3];
    for (k, &lambda) in vals.iter().enumerate() {
        vecs[k] = null_vector(a, lambda)?;
    }
    // enforce orthonormality: keep the most separated pair structure
    let w0 = vecs[0];
    let mut w1 = vecs[1] - w0 * vecs[1].dot(w0);
    w1 = w1.normalized()?;
    let w2 = w0.cross(w1);
    let vecs = [w0, w1, w2];

    // residual sanity check on the scaled matrix
    let fro = a.frobenius_norm();
    for k in 0..3 {
        let r = a.apply(vecs[k]) - vecs[k] * vals[k];
        if r.norm() > 1e-8 * fro.max(1.0) {
            return None;
        }
    }
    Some((vals, vecs))
}

fn null_vector(a: &Quadric, lambda: f64) -> Option<Vec3> {
    let r0 = Vec3::new(a.m[0] - lambda, a.m[1], a.m[2]);
    let r1 = Vec3::new(a.m[1], a.m[3] - lambda, a.m[4]);
    let r2 = Vec3::new(a.m[2], a.m[4], a.m[5] - lambda);
    let c0 = r0.cross(r1);
    let c1 = r0.cross(r2);
    let c2 = r1.cross(r2);
    let mut best = c0;
    if c1.norm_squared() > best.norm_squared() {
        best = c1;
    }
    if c2.norm_squared() > best.norm_squared() {
        best = c2;
    }
    if best.norm_squared() < 1e-24 {
        None
    } else {
        best.normalized()
    }
}

/// Cyclic Jacobi rotations; robust for repeated eigenvalues.
fn jacobi_eigen(a: &Quadric) -> ([f64; 3], [Vec3; 3]) {
    let mut m = [
        [a.m[0], a.m[1], a.m[2]],
        [a.m[1], a.m[3], a.m[4]],
        [a.m[2], a.m[4], a.m[5]],
    ];
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _ in 0..50 {
        let off = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
        if off < 1e-30 {
            break;
        }
        for &(p, q) in &[(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = m[p][q];
            if apq.abs() < 1e-300 {
                continue;
            }
            let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            // rotate rows/cols p and q
            for k in 0..3 {
                let mkp = m[k][p];
                let mkq = m[k][q];
                m[k][p] = c * mkp - s * mkq;
                m[k][q] = s * mkp + c * mkq;
            }
            for k in 0..3 {
                let mpk = m[p][k];
                let mqk = m[q][k];
                m[p][k] = c * mpk - s * mqk;
                m[q][k] = s * mpk + c * mqk;
            }
            for k in 0..3 {
                let vkp = v[k][p];
                let vkq = v[k][q];
                v[k][p] = c * vkp - s * vkq;
                v[k][q] = s * vkp + c * vkq;
            }
        }
    }
    let vals = [m[0][0], m[1][1], m[2][2]];
    let vecs = [
        Vec3::new(v[0][0], v[1][0], v[2][0]),
        Vec3::new(v[0][1], v[1][1], v[2][1]),
        Vec3::new(v[0][2], v[1][2], v[2][2]),
    ];
    (vals, vecs)
}
