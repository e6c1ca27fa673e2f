//! Fitting each primitive kind from an orientation basis and the points it
//! must subsume, plus the candidate sweep that picks the cheapest kind.

use super::{
    Capsule, Cylinder, FitConfig, Frustum, Kind, Obb, Primitive, Sphere, TrapezoidalPrism,
};
use crate::math::Vec3;
use crate::quadric::{eigen_basis, Quadric};
use crate::{Error, Result};

/// Axis-ordering permutations tried for trapezoidal prisms, in tie-break
/// order.
const PRISM_ORDERINGS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Oriented bounding box over `points` with the given orthonormal axes.
/// Half-extents are clamped to `min_extent`; the returned axes are made
/// right-handed (the box is symmetric, so flipping an axis is free).
pub fn fit_obb(axes: &[Vec3; 3], points: &[Vec3], min_extent: f64) -> Obb {
    assert!(!points.is_empty(), "fit_obb requires at least one point");
    let mut axes = *axes;
    if axes[0].cross(axes[1]).dot(axes[2]) < 0.0 {
        axes[2] = -axes[2];
    }
    let mut center = Vec3::ZERO;
    let mut half_extents = [0.0f64; 3];
    for i in 0..3 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in points {
            let s = axes[i].dot(*p);
            lo = lo.min(s);
            hi = hi.max(s);
        }
        half_extents[i] = (0.5 * (hi - lo)).max(min_extent);
        center += axes[i] * (0.5 * (hi + lo));
    }
    Obb {
        center,
        axes,
        half_extents,
    }
}

/// Sphere at a fixed center covering all points.
pub fn fit_sphere(center: Vec3, points: &[Vec3], min_extent: f64) -> Sphere {
    let mut r: f64 = 0.0;
    for p in points {
        r = r.max((*p - center).norm());
    }
    Sphere {
        center,
        radius: r.max(min_extent),
    }
}

/// Capped cylinder along `axis` anchored at `anchor` (the OBB center).
pub fn fit_cylinder(axis: Vec3, anchor: Vec3, points: &[Vec3], min_extent: f64) -> Cylinder {
    let mut radius: f64 = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in points {
        let d = *p - anchor;
        let s = d.dot(axis);
        lo = lo.min(s);
        hi = hi.max(s);
        radius = radius.max((d - axis * s).norm());
    }
    let mid = 0.5 * (lo + hi);
    let h = (hi - lo).max(min_extent);
    Cylinder {
        start: anchor + axis * (mid - 0.5 * h),
        end: anchor + axis * (mid + 0.5 * h),
        radius: radius.max(min_extent),
    }
}

/// Capsule along `axis`. The cap-sphere centers shrink inward by
/// `sqrt(r^2 - r(p)^2)` so each cap still covers its constraining points;
/// when the two constraints cross, both collapse to their midpoint.
pub fn fit_capsule(axis: Vec3, anchor: Vec3, points: &[Vec3], min_extent: f64) -> Capsule {
    let mut radius: f64 = 0.0;
    for p in points {
        let d = *p - anchor;
        let s = d.dot(axis);
        radius = radius.max((d - axis * s).norm());
    }
    let radius = radius.max(min_extent);
    let mut top = f64::NEG_INFINITY;
    let mut bottom = f64::INFINITY;
    for p in points {
        let d = *p - anchor;
        let s = d.dot(axis);
        let lateral = (d - axis * s).norm();
        let reach = (radius * radius - lateral * lateral).max(0.0).sqrt();
        top = top.max(s - reach);
        bottom = bottom.min(s + reach);
    }
    if top < bottom {
        let mid = 0.5 * (top + bottom);
        top = mid;
        bottom = mid;
    }
    Capsule {
        start: anchor + axis * bottom,
        end: anchor + axis * top,
        radius,
    }
}

/// Fixes one side of a linearly interpolated radius profile and recomputes
/// the other as the minimum covering all `(value, y)` constraints.
///
/// `interp(y) = bot*(1-y) + top*y`; `fix_top` selects which side is
/// recomputed. Points at the recomputed side's singular plane contribute
/// nothing here; the pass over the opposite side covers them.
fn fix_side(constraints: &[(f64, f64)], fixed: f64, fix_top: bool) -> f64 {
    let mut out: f64 = 0.0;
    for &(v, y) in constraints {
        let denom = if fix_top { y } else { 1.0 - y };
        if denom.abs() < 1e-12 {
            continue;
        }
        let other_coeff = if fix_top { 1.0 - y } else { y };
        out = out.max(((v - fixed * other_coeff) / denom).abs());
    }
    out
}

/// Greedy two-sided constraint propagation shared by frustums and
/// trapezoidal prisms. `samples` holds (value, normalized y) pairs; returns
/// (bot, top) such that every value fits under the linear interpolation.
fn subsume_two_sided(samples: &[(f64, f64)]) -> (f64, f64) {
    let mut bot = 0.0f64;
    let mut top = 0.0f64;
    // stored constraint (value, y) for each side
    let mut bot_con = (0.0f64, 0.0f64);
    let mut top_con = (0.0f64, 1.0f64);

    let r_bot = |v: f64, y: f64, top: f64| ((v - top * y) / (1.0 - y)).abs();
    let r_top = |v: f64, y: f64, bot: f64| ((v - bot * (1.0 - y)) / y).abs();

    for &(v, y) in samples {
        if y <= 0.5 {
            let next = r_bot(v, y, top);
            if next > bot {
                bot_con = (v, y);
                bot = next;
                // re-propagate the opposite side from its stored constraint
                top = r_top(top_con.0, top_con.1, bot);
            }
        } else {
            let next = r_top(v, y, bot);
            if next > top {
                top_con = (v, y);
                top = next;
                bot = r_bot(bot_con.0, bot_con.1, top);
            }
        }
    }

    // two passes guarantee subsumption: fix the larger side and recompute
    // the smaller, then vice versa
    if top < bot {
        top = fix_side(samples, bot, true);
        bot = fix_side(samples, top, false);
    } else {
        bot = fix_side(samples, top, false);
        top = fix_side(samples, bot, true);
    }
    (bot, top)
}

/// Frustum along `axis` from `base_center`, with `height` taken from the
/// minimum-cost cylinder covering the same points.
pub fn fit_frustum(
    axis: Vec3,
    base_center: Vec3,
    height: f64,
    points: &[Vec3],
    min_extent: f64,
) -> Frustum {
    let height = height.max(min_extent);
    let samples: Vec<(f64, f64)> = points
        .iter()
        .map(|p| {
            let d = *p - base_center;
            let s = d.dot(axis);
            let lateral = (d - axis * s).norm();
            (lateral, s / height)
        })
        .collect();
    let (r_bot, r_top) = subsume_two_sided(&samples);
    Frustum {
        base_center,
        axis,
        height,
        r_bot: r_bot.max(min_extent),
        r_top: r_top.max(min_extent),
    }
}

/// Trapezoidal prism for one axis ordering `(a_x, a_y, a_z)` about `center`
/// (the OBB center). Axes are made right-handed by flipping `a_x`, which
/// the shape is symmetric in.
pub fn fit_prism(
    axes: [Vec3; 3],
    center: Vec3,
    points: &[Vec3],
    min_extent: f64,
) -> TrapezoidalPrism {
    let mut axes = axes;
    if axes[0].cross(axes[1]).dot(axes[2]) < 0.0 {
        axes[0] = -axes[0];
    }
    let mut h_x: f64 = 0.0;
    let mut h_y: f64 = 0.0;
    for p in points {
        let d = *p - center;
        h_x = h_x.max(d.dot(axes[0]).abs());
        h_y = h_y.max(d.dot(axes[1]).abs());
    }
    let h_x = h_x.max(min_extent);
    let h_y = h_y.max(min_extent);
    let samples: Vec<(f64, f64)> = points
        .iter()
        .map(|p| {
            let d = *p - center;
            let z = d.dot(axes[2]).abs();
            let y = (d.dot(axes[1]) + h_y) / (2.0 * h_y);
            (z, y)
        })
        .collect();
    let (h_zb, h_zt) = subsume_two_sided(&samples);
    TrapezoidalPrism {
        center,
        axes,
        h_x,
        h_y,
        h_zt: h_zt.max(min_extent),
        h_zb: h_zb.max(min_extent),
    }
}

/// Fits every enabled candidate and returns the one minimizing the
/// weighted volume `k(kind) * V`, together with that weighted volume.
///
/// Candidates are one OBB, one sphere at the OBB center, one cylinder and
/// one capsule per eigen axis, one frustum on the minimum-cost cylinder's
/// axis, and all six prism axis orderings. Ties resolve to the earliest
/// kind in [`Kind`] order, then the lowest axis/ordering index.
pub fn fit_all(quadric: &Quadric, points: &[Vec3], config: &FitConfig) -> Result<(Primitive, f64)> {
    if points.is_empty() {
        return Err(Error::Config(
            "cannot fit a primitive to zero points".into(),
        ));
    }
    config.validate()?;

    let basis = eigen_basis(quadric);
    let obb = fit_obb(&basis.axes, points, config.min_extent);
    let anchor = obb.center;

    let mut best: Option<(Primitive, f64)> = None;
    let mut consider = |prim: Primitive, config: &FitConfig| {
        let w = config.weight(prim.kind()) * prim.volume();
        match &best {
            Some((_, bw)) if *bw <= w => {}
            _ => best = Some((prim, w)),
        }
    };

    if config.is_enabled(Kind::Obb) {
        consider(Primitive::Obb(obb), config);
    }
    if config.is_enabled(Kind::Sphere) {
        consider(
            Primitive::Sphere(fit_sphere(anchor, points, config.min_extent)),
            config,
        );
    }
    if config.is_enabled(Kind::Capsule) {
        for axis in basis.axes {
            consider(
                Primitive::Capsule(fit_capsule(axis, anchor, points, config.min_extent)),
                config,
            );
        }
    }

    // cylinders are needed even when disabled as candidates: the frustum
    // inherits the minimum-cost cylinder's axis and height
    let needs_cylinders = config.is_enabled(Kind::Cylinder) || config.is_enabled(Kind::Frustum);
    let mut best_cylinder: Option<(Cylinder, f64)> = None;
    if needs_cylinders {
        for axis in basis.axes {
            let cyl = fit_cylinder(axis, anchor, points, config.min_extent);
            let vol = Primitive::Cylinder(cyl).volume();
            if best_cylinder.is_none_or(|(_, bv)| vol < bv) {
                best_cylinder = Some((cyl, vol));
            }
            if config.is_enabled(Kind::Cylinder) {
                consider(Primitive::Cylinder(cyl), config);
            }
        }
    }

    if config.is_enabled(Kind::Prism) {
        for ordering in PRISM_ORDERINGS {
            let axes = [
                basis.axes[ordering[0]],
                basis.axes[ordering[1]],
                basis.axes[ordering[2]],
            ];
            consider(
                Primitive::Prism(fit_prism(axes, anchor, points, config.min_extent)),
                config,
            );
        }
    }

    if config.is_enabled(Kind::Frustum) {
        let (cyl, _) = best_cylinder.expect("cylinders computed for frustum");
        let axis_vec = cyl.end - cyl.start;
        let height = axis_vec.norm();
        let axis = axis_vec.normalized().unwrap_or(basis.axes[2]);
        consider(
            Primitive::Frustum(fit_frustum(
                axis,
                cyl.start,
                height,
                points,
                config.min_extent,
            )),
            config,
        );
    }

    best.ok_or_else(|| Error::Config("all primitive kinds are disabled".into()))
}
