//! Stable on-disk formats: the primitive-set JSON schema and OBJ/MTL
//! export of quantized primitives grouped and colored by kind.
//!
//! Quaternions are stored as `(x, y, z, w)`, unit norm, rotating local axes
//! to world. Box and prism axes are written that way; their half extents
//! stay in local axis order.

use crate::decomposer::{PrimitiveSet, Provenance};
use crate::math::{axes_from_quaternion, quaternion_from_axes, Vec3};
use crate::primitives::{
    Capsule, Cylinder, Frustum, Kind, Obb, Primitive, Sphere, TrapezoidalPrism,
};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::Write;

pub const FORMAT_VERSION: u32 = 1;

/// Serialized primitive set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveSetFile {
    pub version: u32,
    pub units: String,
    pub primitives: Vec<PrimitiveRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

/// One primitive, tagged by kind, using the minimal float parameterization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrimitiveRecord {
    Obb {
        center: [f64; 3],
        half_extents: [f64; 3],
        orientation: [f64; 4],
        #[serde(skip_serializing_if = "Option::is_none")]
        subsumed_faces: Option<Vec<u32>>,
    },
    Sphere {
        center: [f64; 3],
        radius: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        subsumed_faces: Option<Vec<u32>>,
    },
    Capsule {
        start: [f64; 3],
        end: [f64; 3],
        radius: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        subsumed_faces: Option<Vec<u32>>,
    },
    Cylinder {
        start: [f64; 3],
        end: [f64; 3],
        radius: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        subsumed_faces: Option<Vec<u32>>,
    },
    Frustum {
        start: [f64; 3],
        end: [f64; 3],
        r_bot: f64,
        r_top: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        subsumed_faces: Option<Vec<u32>>,
    },
    Prism {
        center: [f64; 3],
        lengths: [f64; 4],
        orientation: [f64; 4],
        #[serde(skip_serializing_if = "Option::is_none")]
        subsumed_faces: Option<Vec<u32>>,
    },
}

impl PrimitiveRecord {
    pub fn from_primitive(prim: &Primitive, faces: Option<Vec<u32>>) -> PrimitiveRecord {
        match prim {
            Primitive::Obb(b) => PrimitiveRecord::Obb {
                center: b.center.to_array(),
                half_extents: b.half_extents,
                orientation: quaternion_from_axes(b.axes[0], b.axes[1], b.axes[2]),
                subsumed_faces: faces,
            },
            Primitive::Sphere(s) => PrimitiveRecord::Sphere {
                center: s.center.to_array(),
                radius: s.radius,
                subsumed_faces: faces,
            },
            Primitive::Capsule(c) => PrimitiveRecord::Capsule {
                start: c.start.to_array(),
                end: c.end.to_array(),
                radius: c.radius,
                subsumed_faces: faces,
            },
            Primitive::Cylinder(c) => PrimitiveRecord::Cylinder {
                start: c.start.to_array(),
                end: c.end.to_array(),
                radius: c.radius,
                subsumed_faces: faces,
            },
            Primitive::Frustum(f) => PrimitiveRecord::Frustum {
                start: f.base_center.to_array(),
                end: (f.base_center + f.axis * f.height).to_array(),
                r_bot: f.r_bot,
                r_top: f.r_top,
                subsumed_faces: faces,
            },
            Primitive::Prism(p) => PrimitiveRecord::Prism {
                center: p.center.to_array(),
                lengths: [p.h_x, p.h_y, p.h_zt, p.h_zb],
                orientation: quaternion_from_axes(p.axes[0], p.axes[1], p.axes[2]),
                subsumed_faces: faces,
            },
        }
    }

    pub fn to_primitive(&self) -> Result<Primitive> {
        Ok(match self {
            PrimitiveRecord::Obb {
                center,
                half_extents,
                orientation,
                ..
            } => {
                let (ax, ay, az) = axes_from_quaternion(validate_quat(*orientation)?);
                Primitive::Obb(Obb {
                    center: Vec3::from_array(*center),
                    axes: [ax, ay, az],
                    half_extents: *half_extents,
                })
            }
            PrimitiveRecord::Sphere { center, radius, .. } => Primitive::Sphere(Sphere {
                center: Vec3::from_array(*center),
                radius: *radius,
            }),
            PrimitiveRecord::Capsule {
                start, end, radius, ..
            } => Primitive::Capsule(Capsule {
                start: Vec3::from_array(*start),
                end: Vec3::from_array(*end),
                radius: *radius,
            }),
            PrimitiveRecord::Cylinder {
                start, end, radius, ..
            } => Primitive::Cylinder(Cylinder {
                start: Vec3::from_array(*start),
                end: Vec3::from_array(*end),
                radius: *radius,
            }),
            PrimitiveRecord::Frustum {
                start,
                end,
                r_bot,
                r_top,
                ..
            } => {
                let base = Vec3::from_array(*start);
                let top = Vec3::from_array(*end);
                let height = (top - base).norm();
                let axis = (top - base)
                    .normalized()
                    .ok_or_else(|| Error::Structure("frustum with coincident endpoints".into()))?;
                Primitive::Frustum(Frustum {
                    base_center: base,
                    axis,
                    height,
                    r_bot: *r_bot,
                    r_top: *r_top,
                })
            }
            PrimitiveRecord::Prism {
                center,
                lengths,
                orientation,
                ..
            } => {
                let (ax, ay, az) = axes_from_quaternion(validate_quat(*orientation)?);
                Primitive::Prism(TrapezoidalPrism {
                    center: Vec3::from_array(*center),
                    axes: [ax, ay, az],
                    h_x: lengths[0],
                    h_y: lengths[1],
                    h_zt: lengths[2],
                    h_zb: lengths[3],
                })
            }
        })
    }

    pub fn kind(&self) -> Kind {
        match self {
            PrimitiveRecord::Obb { .. } => Kind::Obb,
            PrimitiveRecord::Sphere { .. } => Kind::Sphere,
            PrimitiveRecord::Capsule { .. } => Kind::Capsule,
            PrimitiveRecord::Cylinder { .. } => Kind::Cylinder,
            PrimitiveRecord::Frustum { .. } => Kind::Frustum,
            PrimitiveRecord::Prism { .. } => Kind::Prism,
        }
    }

    pub fn subsumed_faces(&self) -> Option<&[u32]> {
        match self {
            PrimitiveRecord::Obb { subsumed_faces, .. }
            | PrimitiveRecord::Sphere { subsumed_faces, .. }
            | PrimitiveRecord::Capsule { subsumed_faces, .. }
            | PrimitiveRecord::Cylinder { subsumed_faces, .. }
            | PrimitiveRecord::Frustum { subsumed_faces, .. }
            | PrimitiveRecord::Prism { subsumed_faces, .. } => subsumed_faces.as_deref(),
        }
    }
}

fn validate_quat(q: [f64; 4]) -> Result<[f64; 4]> {
    let n: f64 = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (n - 1.0).abs() > 1e-7 {
        return Err(Error::Structure(format!(
            "orientation quaternion norm {n} not unit"
        )));
    }
    Ok(q)
}

/// Builds the file representation of a decomposition result.
pub fn to_file(set: &PrimitiveSet, include_faces: bool) -> PrimitiveSetFile {
    PrimitiveSetFile {
        version: FORMAT_VERSION,
        units: "model".to_string(),
        primitives: set
            .primitives
            .iter()
            .map(|p| {
                PrimitiveRecord::from_primitive(
                    &p.primitive,
                    include_faces.then(|| p.faces.clone()),
                )
            })
            .collect(),
        provenance: Some(set.provenance.clone()),
    }
}

pub fn to_json(file: &PrimitiveSetFile) -> Result<String> {
    let mut s = serde_json::to_string_pretty(file)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<PrimitiveSetFile> {
    let file: PrimitiveSetFile = serde_json::from_str(text)?;
    if file.version != FORMAT_VERSION {
        return Err(Error::Structure(format!(
            "unsupported primitive set version {}",
            file.version
        )));
    }
    // surfaces quaternion validation errors early
    for rec in &file.primitives {
        rec.to_primitive()?;
    }
    Ok(file)
}

/// Kind colors matching the renderings: green boxes, yellow cylinders,
/// dark blue prisms, red capsules, light blue spheres, light orange
/// frustums.
pub fn kind_color(kind: Kind) -> [f64; 3] {
    match kind {
        Kind::Obb => [0.30, 0.69, 0.31],
        Kind::Cylinder => [1.00, 0.92, 0.23],
        Kind::Prism => [0.16, 0.21, 0.58],
        Kind::Capsule => [0.90, 0.22, 0.21],
        Kind::Sphere => [0.51, 0.83, 0.98],
        Kind::Frustum => [1.00, 0.80, 0.50],
    }
}

/// Writes quantized primitives as OBJ, one object per primitive named
/// `<kind>_<index>`, each bound to a per-kind material from `mtl_name`.
pub fn export_obj(
    prims: &[Primitive],
    segments: usize,
    circumscribed: bool,
    mtl_name: &str,
    mut out: impl Write,
) -> std::io::Result<()> {
    writeln!(out, "mtllib {mtl_name}")?;
    let mut offset = 1usize; // OBJ indices are 1-based
    for (i, prim) in prims.iter().enumerate() {
        let kind = prim.kind().as_str();
        writeln!(out, "o {kind}_{i}")?;
        writeln!(out, "usemtl kind_{kind}")?;
        let mesh = prim.quantize(segments, circumscribed);
        for v in &mesh.vertices {
            writeln!(out, "v {} {} {}", v.x, v.y, v.z)?;
        }
        for face in &mesh.faces {
            write!(out, "f")?;
            for &v in face {
                write!(out, " {}", v as usize + offset)?;
            }
            writeln!(out)?;
        }
        offset += mesh.vertices.len();
    }
    Ok(())
}

/// MTL sidecar with one diffuse material per kind.
pub fn export_mtl(mut out: impl Write) -> std::io::Result<()> {
    for kind in crate::primitives::ALL_KINDS {
        let [r, g, b] = kind_color(kind);
        writeln!(out, "newmtl kind_{}", kind.as_str())?;
        writeln!(out, "Kd {r} {g} {b}")?;
    }
    Ok(())
}
