//! The six convex primitive kinds: fitting, exact volumes, containment
//! tests and quantization to meshes.

mod fit;
mod quantize;

pub use fit::{fit_all, fit_capsule, fit_cylinder, fit_frustum, fit_obb, fit_prism, fit_sphere};

use crate::math::Vec3;
use serde::{Deserialize, Serialize};

/// Minimum extent/radius in model units preventing degenerate volumes.
pub const MIN_EXTENT: f64 = 1e-3;

/// Primitive kind tag. Declaration order is the cost tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Obb,
    Sphere,
    Capsule,
    Cylinder,
    Prism,
    Frustum,
}

pub const ALL_KINDS: [Kind; 6] = [
    Kind::Obb,
    Kind::Sphere,
    Kind::Capsule,
    Kind::Cylinder,
    Kind::Prism,
    Kind::Frustum,
];

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Obb => "obb",
            Kind::Sphere => "sphere",
            Kind::Capsule => "capsule",
            Kind::Cylinder => "cylinder",
            Kind::Prism => "prism",
            Kind::Frustum => "frustum",
        }
    }

    pub fn parse(s: &str) -> Option<Kind> {
        match s {
            "obb" | "box" => Some(Kind::Obb),
            "sphere" => Some(Kind::Sphere),
            "capsule" => Some(Kind::Capsule),
            "cylinder" => Some(Kind::Cylinder),
            "prism" => Some(Kind::Prism),
            "frustum" => Some(Kind::Frustum),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Floats needed to store this kind's parameters.
    pub fn float_count(self) -> usize {
        match self {
            Kind::Obb => 10,
            Kind::Capsule => 7,
            Kind::Sphere => 4,
            Kind::Cylinder => 7,
            Kind::Frustum => 8,
            Kind::Prism => 11,
        }
    }
}

/// Oriented bounding box with right-handed orthonormal axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obb {
    pub center: Vec3,
    pub axes: [Vec3; 3],
    pub half_extents: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub center: Vec3,
    pub radius: f64,
}

/// Capped cylinder between `start` and `end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cylinder {
    pub start: Vec3,
    pub end: Vec3,
    pub radius: f64,
}

/// Capsule; `start`/`end` are the cap-sphere centers and may coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capsule {
    pub start: Vec3,
    pub end: Vec3,
    pub radius: f64,
}

/// Circular frustum from `base_center` along `axis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frustum {
    pub base_center: Vec3,
    pub axis: Vec3,
    pub height: f64,
    pub r_bot: f64,
    pub r_top: f64,
}

/// Isosceles trapezoidal prism. The half-width along `axes[2]` varies
/// linearly from `h_zb` at the negative y face to `h_zt` at the positive y face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapezoidalPrism {
    pub center: Vec3,
    pub axes: [Vec3; 3],
    pub h_x: f64,
    pub h_y: f64,
    pub h_zt: f64,
    pub h_zb: f64,
}

impl TrapezoidalPrism {
    /// Half-width along `axes[2]` at normalized y in [0, 1].
    #[inline]
    pub fn half_width(&self, y: f64) -> f64 {
        self.h_zb * (1.0 - y) + self.h_zt * y
    }
}

/// Tagged union over the six convex shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primitive {
    Obb(Obb),
    Sphere(Sphere),
    Capsule(Capsule),
    Cylinder(Cylinder),
    Frustum(Frustum),
    Prism(TrapezoidalPrism),
}

impl Primitive {
    pub fn kind(&self) -> Kind {
        match self {
            Primitive::Obb(_) => Kind::Obb,
            Primitive::Sphere(_) => Kind::Sphere,
            Primitive::Capsule(_) => Kind::Capsule,
            Primitive::Cylinder(_) => Kind::Cylinder,
            Primitive::Frustum(_) => Kind::Frustum,
            Primitive::Prism(_) => Kind::Prism,
        }
    }

    /// Exact analytic volume.
    pub fn volume(&self) -> f64 {
        match self {
            Primitive::Obb(b) => 8.0 * b.half_extents[0] * b.half_extents[1] * b.half_extents[2],
            Primitive::Sphere(s) => 4.0 / 3.0 * std::f64::consts::PI * s.radius.powi(3),
            Primitive::Capsule(c) => {
                let h = (c.end - c.start).norm();
                std::f64::consts::PI * c.radius * c.radius * h
                    + 4.0 / 3.0 * std::f64::consts::PI * c.radius.powi(3)
            }
            Primitive::Cylinder(c) => {
                let h = (c.end - c.start).norm();
                std::f64::consts::PI * c.radius * c.radius * h
            }
            Primitive::Frustum(f) => {
                std::f64::consts::PI * f.height / 3.0
                    * (f.r_top * f.r_top + f.r_top * f.r_bot + f.r_bot * f.r_bot)
            }
            Primitive::Prism(p) => 4.0 * p.h_x * p.h_y * (p.h_zt + p.h_zb),
        }
    }

    /// Whether `x` lies inside the primitive expanded by `tol`.
    pub fn contains(&self, x: Vec3, tol: f64) -> bool {
        match self {
            Primitive::Obb(b) => {
                let d = x - b.center;
                (0..3).all(|i| d.dot(b.axes[i]).abs() <= b.half_extents[i] + tol)
            }
            Primitive::Sphere(s) => (x - s.center).norm() <= s.radius + tol,
            Primitive::Capsule(c) => segment_distance(x, c.start, c.end) <= c.radius + tol,
            Primitive::Cylinder(c) => {
                let axis_vec = c.end - c.start;
                let h = axis_vec.norm();
                if h == 0.0 {
                    return (x - c.start).norm() <= c.radius + tol;
                }
                let a = axis_vec / h;
                let d = x - c.start;
                let s = d.dot(a);
                if s < -tol || s > h + tol {
                    return false;
                }
                (d - a * s).norm() <= c.radius + tol
            }
            Primitive::Frustum(f) => {
                let d = x - f.base_center;
                let s = d.dot(f.axis);
                if s < -tol || s > f.height + tol {
                    return false;
                }
                let t = (s / f.height).clamp(0.0, 1.0);
                let allowed = f.r_bot * (1.0 - t) + f.r_top * t;
                (d - f.axis * s).norm() <= allowed + tol
            }
            Primitive::Prism(p) => {
                let d = x - p.center;
                let lx = d.dot(p.axes[0]);
                let ly = d.dot(p.axes[1]);
                let lz = d.dot(p.axes[2]);
                if lx.abs() > p.h_x + tol || ly.abs() > p.h_y + tol {
                    return false;
                }
                let y = ((ly + p.h_y) / (2.0 * p.h_y)).clamp(0.0, 1.0);
                lz.abs() <= p.half_width(y) + tol
            }
        }
    }

    /// Quantizes to a polygonal mesh; boxes and prisms become hexahedra,
    /// curved kinds n-gon prisms and UV spheres, inscribed by default.
    pub fn quantize(&self, segments: usize, circumscribed: bool) -> crate::mesh::IndexedMesh {
        quantize::quantize(self, segments, circumscribed)
    }
}

/// Distance from `x` to the segment `[a, b]`.
pub(crate) fn segment_distance(x: Vec3, a: Vec3, b: Vec3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (x - a).norm();
    }
    let t = ((x - a).dot(ab) / len2).clamp(0.0, 1.0);
    (x - (a + ab * t)).norm()
}

/// Per-run fitting configuration: enabled kinds, per-kind volume weights
/// and the degeneracy clamp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Enabled kinds, indexed by `Kind::index()`.
    pub enabled: [bool; 6],
    /// Volume weights `k(kind)`, indexed by `Kind::index()`.
    pub weights: [f64; 6],
    /// Minimum half-extent / radius / height in model units.
    pub min_extent: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        let mut weights = [1.0; 6];
        weights[Kind::Cylinder.index()] = 1.05;
        weights[Kind::Prism.index()] = 1.4;
        weights[Kind::Frustum.index()] = 2.1;
        FitConfig {
            enabled: [true; 6],
            weights,
            min_extent: MIN_EXTENT,
        }
    }
}

impl FitConfig {
    pub fn weight(&self, kind: Kind) -> f64 {
        self.weights[kind.index()]
    }

    pub fn is_enabled(&self, kind: Kind) -> bool {
        self.enabled[kind.index()]
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !self.enabled.iter().any(|&e| e) {
            return Err(crate::Error::Config(
                "all primitive kinds are disabled".into(),
            ));
        }
        if self.weights.iter().any(|&w| w.is_nan() || w <= 0.0) {
            return Err(crate::Error::Config("kind weights must be positive".into()));
        }
        if self.min_extent.is_nan() || self.min_extent <= 0.0 {
            return Err(crate::Error::Config("min extent must be positive".into()));
        }
        Ok(())
    }
}
