//! SVG snapshots of a scene and a moving arc.

use std::f64::consts::{PI, TAU};
use std::fmt::Write;

use crate::error::Result;
use crate::motion::{pose_at, ArcPose, MotionPlan};
use crate::scalar::Scalar;
use crate::sprouting::SproutScene;

pub const CANVAS: f64 = 800.0;
/// Circles drawn per family at most; denser levels are strided.
const MAX_CIRCLES: u64 = 64;
const ARC_SAMPLES: usize = 240;

/// Square window in M-local coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct View {
    pub cx: f64,
    pub cy: f64,
    pub half: f64,
}

impl View {
    /// Unit-scale window for relaxed scenes, `2 eps` about M for strict ones.
    pub fn auto(scene: &SproutScene) -> View {
        let m = scene.m().to_f64();
        let half = if scene.config().strict { 2.0 * scene.frame().eps.to_f64() } else { 1.4 };
        View { cx: m[0], cy: m[1], half }
    }

    fn px(&self, p: [f64; 2]) -> (f64, f64) {
        let s = CANVAS / (2.0 * self.half);
        (CANVAS / 2.0 + (p[0] - self.cx) * s, CANVAS / 2.0 - (p[1] - self.cy) * s)
    }

    fn visible(&self, p: [f64; 2]) -> bool {
        (p[0] - self.cx).abs() <= 1.5 * self.half && (p[1] - self.cy).abs() <= 1.5 * self.half
    }
}

/// Polylines covering the part of an arc near the view.
fn arc_polylines(c: [f64; 2], rho: f64, start: f64, sweep: f64, view: &View) -> Vec<Vec<[f64; 2]>> {
    let (dx, dy) = (view.cx - c[0], view.cy - c[1]);
    if ((dx * dx + dy * dy).sqrt() - rho).abs() > 2.2 * view.half {
        return Vec::new();
    }
    let (lo, hi) = if sweep >= 0.0 { (start, start + sweep) } else { (start + sweep, start) };
    let w = (3.2 * view.half / rho).min(PI);
    let mid = lo + (dy.atan2(dx) - lo).rem_euclid(TAU);
    let mut out = Vec::new();
    for centre in [mid - TAU, mid] {
        let (a, b) = ((centre - w).max(lo), (centre + w).min(hi));
        if a >= b {
            continue;
        }
        let pts: Vec<[f64; 2]> = (0..=ARC_SAMPLES)
            .map(|j| {
                let t = a + (b - a) * j as f64 / ARC_SAMPLES as f64;
                [c[0] + rho * t.cos(), c[1] + rho * t.sin()]
            })
            .filter(|p| view.visible(*p))
            .collect();
        if pts.len() > 1 {
            out.push(pts);
        }
    }
    out
}

fn path(svg: &mut String, lines: &[Vec<[f64; 2]>], attrs: &str, view: &View) {
    for l in lines {
        let mut d = String::new();
        for (j, p) in l.iter().enumerate() {
            let (x, y) = view.px(*p);
            let _ = write!(d, "{}{x:.3},{y:.3}", if j == 0 { "M" } else { " L" });
        }
        let _ = writeln!(svg, r#"<path d="{d}" fill="none" {attrs}/>"#);
    }
}

fn dot(svg: &mut String, p: [f64; 2], r: f64, fill: &str, view: &View) {
    if view.visible(p) {
        let (x, y) = view.px(p);
        let _ = writeln!(svg, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{r}" fill="{fill}"/>"#);
    }
}

/// Length from the 1-2-5 sequence no longer than a quarter of the window.
pub fn scale_bar_length(half: f64) -> f64 {
    let target = half / 2.0;
    let base = 10f64.powf(target.log10().floor());
    [5.0, 2.0, 1.0].into_iter().map(|m| m * base).find(|&l| l <= target).unwrap_or(base)
}

fn scale_bar(svg: &mut String, view: &View) {
    let len = scale_bar_length(view.half);
    let px = len * CANVAS / (2.0 * view.half);
    let (x0, y0) = (24.0, CANVAS - 24.0);
    let _ = writeln!(
        svg,
        r#"<g id="scale"><line x1="{x0}" y1="{y0}" x2="{:.3}" y2="{y0}" stroke="black" stroke-width="3"/><text x="{x0}" y="{:.1}" font-size="14" font-family="monospace">{len:e}</text></g>"#,
        x0 + px,
        y0 - 8.0
    );
}

fn pose_lines(pose: &ArcPose, view: &View) -> Vec<Vec<[f64; 2]>> {
    let arc = &pose.arc;
    arc_polylines(arc.circle.center.to_f64(), arc.circle.radius.to_f64(), arc.start_angle.to_f64(), arc.sweep.to_f64(), view)
}

/// One frame: level-n circles, junction points, and the arc at time `t`.
pub fn render_frame(scene: &SproutScene, plan: &MotionPlan, t: &Scalar, view: &View) -> Result<String> {
    let pose = pose_at(plan, t)?;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let n = scene.n();
    let top = 1u64 << n;
    let stride = (top / MAX_CIRCLES).max(1);
    let full = |c: [f64; 2]| arc_polylines(c, 1.0, -PI, TAU, view);
    let mut k = 0;
    while k <= top {
        if let (Ok(a), Ok(b)) = (scene.k0_at(k), scene.k1_at(k)) {
            path(&mut svg, &full(a.center.to_f64()), r##"stroke="#4a7ab8" stroke-width="0.6" stroke-opacity="0.6""##, view);
            path(&mut svg, &full(b.center.to_f64()), r##"stroke="#c8803a" stroke-width="0.6" stroke-opacity="0.6""##, view);
        }
        k += stride;
    }
    let f = scene.frame();
    path(&mut svg, &full(f.k0.center.to_f64()), r##"id="K0" stroke="#1f4f8f" stroke-width="1.5""##, view);
    path(&mut svg, &full(f.k1.center.to_f64()), r##"id="K1" stroke="#9f5010" stroke-width="1.5""##, view);
    let tip = &f.p_arc;
    path(
        &mut svg,
        &arc_polylines(tip.circle.center.to_f64(), tip.circle.radius.to_f64(), tip.start_angle.to_f64(), tip.sweep.to_f64(), view),
        r##"stroke="#555" stroke-width="1""##,
        view,
    );
    let mut k = 0;
    while k <= top {
        dot(&mut svg, scene.p_at(k).to_f64(), 2.0, "#333", view);
        if k < top {
            if let Ok(c) = scene.c_at(n, k) {
                dot(&mut svg, c.to_f64(), 2.0, "#2a8a2a", view);
            }
        }
        k += stride;
    }
    dot(&mut svg, f.m.to_f64(), 3.0, "black", view);
    let c = pose.circle().center.to_f64();
    let _ = writeln!(svg, r#"<g id="pose" data-center="{:e} {:e}" data-t="{}">"#, c[0], c[1], t);
    path(&mut svg, &pose_lines(&pose, view), r##"stroke="#d02020" stroke-width="3""##, view);
    dot(&mut svg, pose.start().to_f64(), 3.5, "#d02020", view);
    dot(&mut svg, pose.end().to_f64(), 3.5, "#d02020", view);
    let _ = writeln!(svg, "</g>");
    scale_bar(&mut svg, view);
    let _ = writeln!(svg, r#"<text x="24" y="28" font-size="14" font-family="monospace">n={n} t={:.4}</text>"#, t.to_f64());
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// `count` evenly spaced times in `[0, 1]`.
pub fn frame_times(count: usize, like: &Scalar) -> Vec<Scalar> {
    match count {
        0 => Vec::new(),
        1 => vec![like.lift(0.0)],
        _ => (0..count).map(|j| Scalar::from_i64(j as i64, like.precision()) / &Scalar::from_i64(count as i64 - 1, like.precision())).collect(),
    }
}

pub fn render_frames(scene: &SproutScene, plan: &MotionPlan, count: usize) -> Result<Vec<String>> {
    let view = View::auto(scene);
    frame_times(count, &scene.frame().h).iter().map(|t| render_frame(scene, plan, t, &view)).collect()
}
