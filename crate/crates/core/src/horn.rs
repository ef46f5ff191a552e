//! Horn-shaped domains `H_i^x` bounded by three circular arcs.

use serde::Serialize;

use crate::error::{KakeyaError, Result};
use crate::geometry::{angle_at, Circle, DirectedArc, Point};
use crate::scalar::Scalar;
use crate::sprouting::{DyadicIndex, SproutScene};

/// Closed region bounded by a loop of arcs, listed head to tail.
#[derive(Clone, Debug, Serialize)]
pub struct HornRegion {
    pub arcs: Vec<DirectedArc>,
    pub tolerance: Scalar,
}

impl HornRegion {
    pub fn from_loop(arcs: Vec<DirectedArc>, tolerance: Scalar) -> HornRegion {
        HornRegion { arcs, tolerance }
    }

    pub fn vertices(&self) -> Vec<Point> {
        self.arcs.iter().map(|a| a.start()).collect()
    }

    pub fn contains(&self, p: &Point) -> bool {
        point_in_horn(p, self)
    }

    /// Axis-aligned box `[xmin, ymin, xmax, ymax]` of the bounding arcs.
    pub fn bbox(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for a in &self.arcs {
            let [x0, y0, x1, y1] = arc_bbox(a);
            b[0] = b[0].min(x0);
            b[1] = b[1].min(y0);
            b[2] = b[2].max(x1);
            b[3] = b[3].max(y1);
        }
        b
    }
}

/// Bounding box of an arc in f64.
pub fn arc_bbox(a: &DirectedArc) -> [f64; 4] {
    let c = a.circle.center.to_f64();
    let r = a.circle.radius.to_f64();
    let s = a.start().to_f64();
    let e = a.end().to_f64();
    let mut b = [s[0].min(e[0]), s[1].min(e[1]), s[0].max(e[0]), s[1].max(e[1])];
    let tol = a.sweep.lift(1e-15);
    for q in 0..4 {
        let theta = a.sweep.lift(q as f64 * std::f64::consts::FRAC_PI_2);
        if a.contains_angle(&theta, &tol) {
            match q {
                0 => b[2] = b[2].max(c[0] + r),
                1 => b[3] = b[3].max(c[1] + r),
                2 => b[0] = b[0].min(c[0] - r),
                _ => b[1] = b[1].min(c[1] - r),
            }
        }
    }
    b
}

fn dist_to_arc(p: &Point, a: &DirectedArc) -> Scalar {
    let tol = Scalar::zero(p.precision());
    if a.contains_angle(&a.circle.angle_of(p), &tol) {
        a.circle.signed_distance(p).abs()
    } else {
        p.dist(&a.start()).min(p.dist(&a.end()))
    }
}

/// Winding contribution of an arc seen from `p`, in radians.
fn arc_winding(p: &Point, a: &DirectedArc) -> Scalar {
    let s = a.start();
    let e = a.end();
    let mut w = angle_at(p, &s, &e);
    let prec = p.precision();
    let inside_disc = a.circle.signed_distance(p).is_negative();
    if inside_disc {
        let mid = a.circle.point_at(&(&a.start_angle + &a.sweep.half()));
        let chord = e.sub(&s);
        let side_p = chord.cross(&p.sub(&s));
        let side_m = chord.cross(&mid.sub(&s));
        if (side_p.is_positive() && side_m.is_positive()) || (side_p.is_negative() && side_m.is_negative()) {
            let two_pi = Scalar::pi(prec) * 2.0;
            if a.sweep.is_positive() {
                w = w + two_pi;
            } else {
                w = w - two_pi;
            }
        }
    }
    w
}

/// Closed membership: boundary points within the region's tolerance count as inside.
pub fn point_in_horn(p: &Point, region: &HornRegion) -> bool {
    if region.arcs.is_empty() {
        return false;
    }
    let p = p.to_precision(region.tolerance.precision());
    if region.arcs.iter().any(|a| dist_to_arc(&p, a) <= region.tolerance) {
        return true;
    }
    let total = region.arcs.iter().fold(Scalar::zero(p.precision()), |acc, a| acc + arc_winding(&p, a));
    total.abs() > Scalar::pi(p.precision())
}

/// `H_i^x`, bounded by `P_x C_i^x` on `K0^x`, `C_i^x P_{x+2^-i}` on `K1^{x+2^-i}` and the tip arc.
pub fn horn_region(scene: &SproutScene, i: u32, x: DyadicIndex) -> Result<HornRegion> {
    let n = scene.n();
    if i > scene.built_level() {
        return Err(KakeyaError::IndexOutOfRange(format!("level {i} not built")));
    }
    let k = x
        .at_level(i)
        .filter(|&k| k < (1u64 << i))
        .ok_or_else(|| KakeyaError::IndexOutOfRange(format!("x = {x} not in D_{i} below 1")))?;
    let step = 1u64 << (n - i);
    let px = scene.p_at(k * step);
    let pnext = scene.p_at((k + 1) * step);
    let c = scene.c_at(i, k)?;
    let k0 = scene.k0_at(k * step)?;
    let k1 = scene.k1_at((k + 1) * step)?;
    let tip: &Circle = &scene.frame().p_arc.circle;
    let arcs = vec![
        DirectedArc::minor_between(k0, px, c),
        DirectedArc::minor_between(k1, c, pnext),
        DirectedArc::minor_between(tip, pnext, px),
    ];
    Ok(HornRegion::from_loop(arcs, scene.tolerance()))
}
