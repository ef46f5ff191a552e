//! Motion plans: sequences of pivots about arc endpoints and slides along
//! the arc's own circle.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{KakeyaError, Result};
use crate::geometry::{angle_at, circle_circle_intersection, horn_area, rotate_circle, rotate_point, Circle, DirectedArc, Isometry, Point};
use crate::lemmas::LemmaReport;
use crate::scalar::{normalize_angle, Precision, Scalar};
use crate::sprouting::{build_scene, SproutConfig, SproutScene};

/// Strict upper limit on the arc length.
pub const MAX_ARC_LEN: &str = "1.32";
pub const DEFAULT_ARC_LEN: &str = "1.31";
/// Bound on the chord of the moving arc.
pub const MAX_CHORD: &str = "1.227";
/// Largest centre spacing in a theorem-1 chain.
pub const CHAIN_SPACING: &str = "1.9";
pub const THEOREM1_EPS: &str = "0.05";
pub const THEOREM1_LEVELS: u32 = 4;

fn lit(s: &str, prec: Precision) -> Scalar {
    Scalar::parse(s, prec).expect("literal")
}

/// Position of the moving arc, stored counter-clockwise.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArcPose {
    pub arc: DirectedArc,
}

impl ArcPose {
    pub fn new(arc: DirectedArc) -> ArcPose {
        ArcPose { arc: arc.ccw() }
    }

    /// Arc of length `len` on `circle` whose counter-clockwise end is `end`.
    pub fn ending_at(circle: &Circle, end: &Point, len: &Scalar) -> ArcPose {
        let a = circle.angle_of(end);
        ArcPose { arc: DirectedArc { circle: circle.clone(), start_angle: &a - &(len / &circle.radius), sweep: len / &circle.radius } }
    }

    /// Arc of length `len` on `circle` whose clockwise end is `start`.
    pub fn starting_at(circle: &Circle, start: &Point, len: &Scalar) -> ArcPose {
        ArcPose { arc: DirectedArc { circle: circle.clone(), start_angle: circle.angle_of(start), sweep: len / &circle.radius } }
    }

    pub fn precision(&self) -> Precision {
        self.arc.sweep.precision()
    }

    pub fn circle(&self) -> &Circle {
        &self.arc.circle
    }

    pub fn start(&self) -> Point {
        self.arc.start()
    }

    pub fn end(&self) -> Point {
        self.arc.end()
    }

    pub fn length(&self) -> Scalar {
        self.arc.length()
    }

    pub fn chord(&self) -> Scalar {
        self.arc.chord()
    }

    pub fn rotated(&self, center: &Point, angle: &Scalar) -> ArcPose {
        ArcPose {
            arc: DirectedArc {
                circle: rotate_circle(&self.arc.circle, center, angle),
                start_angle: &self.arc.start_angle + angle,
                sweep: self.arc.sweep.clone(),
            },
        }
    }

    pub fn slid(&self, angle: &Scalar) -> ArcPose {
        ArcPose {
            arc: DirectedArc {
                circle: self.arc.circle.clone(),
                start_angle: &self.arc.start_angle + angle,
                sweep: self.arc.sweep.clone(),
            },
        }
    }

    pub fn transformed(&self, iso: &Isometry) -> ArcPose {
        ArcPose::new(iso.apply_arc(&self.arc))
    }

    /// Largest of the endpoint and centre displacements.
    pub fn distance(&self, o: &ArcPose) -> Scalar {
        let a = self.start().dist(&o.start());
        let b = self.end().dist(&o.end());
        let c = self.arc.circle.center.dist(&o.arc.circle.center);
        a.max(b).max(c)
    }

    /// Slide angle bringing the clockwise end onto `target` (a point of the circle).
    pub fn slide_start_to(&self, target: &Point) -> Scalar {
        normalize_angle(&(self.arc.circle.angle_of(target) - &self.arc.start_angle))
    }

    /// Slide angle bringing the counter-clockwise end onto `target`.
    pub fn slide_end_to(&self, target: &Point) -> Scalar {
        normalize_angle(&(self.arc.circle.angle_of(target) - self.arc.end_angle()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StepKind {
    Pivot { center: Point, angle: Scalar },
    Slide { circle: Circle, angle: Scalar },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MotionStep {
    #[serde(flatten)]
    pub kind: StepKind,
    pub start_pose: ArcPose,
    pub end_pose: ArcPose,
    pub swept_bound: Scalar,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
}

impl MotionStep {
    pub fn pivot(pose: &ArcPose, center: &Point, angle: Scalar, tag: Option<String>) -> MotionStep {
        let end_pose = pose.rotated(center, &angle);
        let swept_bound = pivot_bound(pose, &angle);
        MotionStep { kind: StepKind::Pivot { center: center.clone(), angle }, start_pose: pose.clone(), end_pose, swept_bound, tag }
    }

    pub fn slide(pose: &ArcPose, angle: Scalar, tag: Option<String>) -> MotionStep {
        let end_pose = pose.slid(&angle);
        MotionStep {
            kind: StepKind::Slide { circle: pose.circle().clone(), angle },
            start_pose: pose.clone(),
            end_pose,
            swept_bound: Scalar::zero(pose.precision()),
            tag,
        }
    }

    pub fn angle(&self) -> &Scalar {
        match &self.kind {
            StepKind::Pivot { angle, .. } | StepKind::Slide { angle, .. } => angle,
        }
    }

    pub fn is_pivot(&self) -> bool {
        matches!(self.kind, StepKind::Pivot { .. })
    }

    pub fn center(&self) -> &Point {
        match &self.kind {
            StepKind::Pivot { center, .. } => center,
            StepKind::Slide { circle, .. } => &circle.center,
        }
    }

    pub fn isometry(&self) -> Isometry {
        Isometry::rotation(self.center(), self.angle())
    }

    /// Pose after the fraction `f` of this step.
    pub fn pose_at_fraction(&self, f: &Scalar) -> ArcPose {
        let a = self.angle() * f;
        match &self.kind {
            StepKind::Pivot { center, .. } => self.start_pose.rotated(center, &a),
            StepKind::Slide { .. } => self.start_pose.slid(&a),
        }
    }

    pub fn transformed(&self, iso: &Isometry) -> MotionStep {
        let angle = iso.apply_angle(self.angle());
        let kind = match &self.kind {
            StepKind::Pivot { center, .. } => StepKind::Pivot { center: iso.apply(center), angle },
            StepKind::Slide { circle, .. } => StepKind::Slide { circle: iso.apply_circle(circle), angle },
        };
        MotionStep {
            kind,
            start_pose: self.start_pose.transformed(iso),
            end_pose: self.end_pose.transformed(iso),
            swept_bound: self.swept_bound.clone(),
            tag: self.tag.clone(),
        }
    }
}

fn pivot_bound(pose: &ArcPose, angle: &Scalar) -> Scalar {
    let chord = pose.chord();
    horn_area(&chord, &angle.abs()).unwrap_or_else(|_| Scalar::zero(pose.precision()))
}

#[derive(Clone, Debug, Serialize)]
pub struct MotionPlan {
    pub steps: Vec<MotionStep>,
    pub total_swept_bound: Scalar,
    #[serde(skip)]
    pub precision: Precision,
}

impl MotionPlan {
    pub fn new(steps: Vec<MotionStep>, precision: Precision) -> MotionPlan {
        let total_swept_bound = steps.iter().fold(Scalar::zero(precision), |acc, s| acc + &s.swept_bound);
        MotionPlan { steps, total_swept_bound, precision }
    }

    pub fn empty(precision: Precision) -> MotionPlan {
        MotionPlan::new(Vec::new(), precision)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn first_pose(&self) -> Option<&ArcPose> {
        self.steps.first().map(|s| &s.start_pose)
    }

    pub fn last_pose(&self) -> Option<&ArcPose> {
        self.steps.last().map(|s| &s.end_pose)
    }

    pub fn pivot_count(&self) -> usize {
        self.steps.iter().filter(|s| s.is_pivot()).count()
    }

    pub fn slide_count(&self) -> usize {
        self.len() - self.pivot_count()
    }

    /// Composition of all step motions, first step applied first.
    pub fn isometry(&self) -> Isometry {
        self.steps.iter().fold(Isometry::identity(self.precision), |acc, s| s.isometry().compose(&acc))
    }

    pub fn transformed(&self, iso: &Isometry) -> MotionPlan {
        MotionPlan::new(self.steps.iter().map(|s| s.transformed(iso)).collect(), self.precision)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plan serializes")
    }
}

/// The starting pose: an arc of `K0` ending at M.
pub fn initial_pose(scene: &SproutScene, arc_len: &Scalar) -> ArcPose {
    let f = scene.frame();
    ArcPose::ending_at(&f.k0, &f.m, arc_len)
}

/// The target pose: the initial pose rotated about M by h.
pub fn final_pose(scene: &SproutScene, arc_len: &Scalar) -> ArcPose {
    let f = scene.frame();
    initial_pose(scene, arc_len).rotated(&f.m, &f.h)
}

fn check_arc_len(arc_len: &Scalar) -> Result<()> {
    let prec = arc_len.precision();
    if !arc_len.is_positive() || *arc_len >= lit(MAX_ARC_LEN, prec) {
        return Err(KakeyaError::ArcTooLong(format!("arc length {arc_len} must lie in (0, {MAX_ARC_LEN})")));
    }
    Ok(())
}

/// The alternating pivot and slide itinerary through a complete scene.
pub fn build_motion_plan(scene: &SproutScene, arc_len: &Scalar) -> Result<MotionPlan> {
    if !scene.is_complete() {
        return Err(KakeyaError::SceneIncomplete);
    }
    let prec = scene.precision();
    let arc_len = arc_len.to_precision(prec);
    check_arc_len(&arc_len)?;
    let n = scene.n();
    let top = 1u64 << n;
    let f = scene.frame();
    let mut steps = Vec::with_capacity((4 * top) as usize);
    let mut pose = initial_pose(scene, &arc_len);
    let push = |steps: &mut Vec<MotionStep>, pose: &mut ArcPose, s: MotionStep| {
        *pose = s.end_pose.clone();
        steps.push(s);
    };

    let c0 = scene.c_at(n, 0)?;
    let s = MotionStep::slide(&pose, pose.slide_start_to(c0), Some("slide:start".into()));
    push(&mut steps, &mut pose, s);
    for k in 0..top {
        let c = scene.c_at(n, k)?.clone();
        let target = scene.k1_at(k + 1)?;
        let alpha = angle_at(&c, &pose.circle().center, &target.center);
        let s = MotionStep::pivot(&pose, &c, alpha, Some(format!("alpha:{k}")));
        push(&mut steps, &mut pose, s);
        if k + 1 == top {
            break;
        }
        let p = scene.p_at(k + 1).clone();
        let s = MotionStep::slide(&pose, pose.slide_end_to(&p), Some(format!("slide:{}", k + 1)));
        push(&mut steps, &mut pose, s);
        let target = scene.k0_at(k + 1)?;
        let beta = angle_at(&p, &pose.circle().center, &target.center);
        let s = MotionStep::pivot(&pose, &p, beta, Some(format!("beta:{}", k + 1)));
        push(&mut steps, &mut pose, s);
        let cn = scene.c_at(n, k + 1)?;
        let s = MotionStep::slide(&pose, pose.slide_start_to(cn), Some(format!("slide:{}", k + 1)));
        push(&mut steps, &mut pose, s);
    }
    let s = MotionStep::slide(&pose, pose.slide_end_to(&f.m), Some("slide:end".into()));
    push(&mut steps, &mut pose, s);
    Ok(MotionPlan::new(steps, prec))
}

/// Structural checks on a plan; every measured value is a worst case over steps.
pub fn validate_plan(plan: &MotionPlan) -> LemmaReport {
    let prec = plan.precision;
    let tol = prec.tolerance();
    let one = Scalar::one(prec);
    let zero = Scalar::zero(prec);
    let mut disc = zero.clone();
    let mut radius_err = zero.clone();
    let mut max_len = zero.clone();
    let mut max_chord = zero.clone();
    let mut pivot_off = zero.clone();
    let mut residual = zero.clone();
    let mut off_circle = zero.clone();
    let mut bound_err = zero.clone();
    let half = Scalar::one(prec).half();
    for (idx, s) in plan.steps.iter().enumerate() {
        if idx > 0 {
            disc = disc.max(plan.steps[idx - 1].end_pose.distance(&s.start_pose));
        }
        for pose in [&s.start_pose, &s.end_pose] {
            radius_err = radius_err.max((&pose.circle().radius - &one).abs());
            max_len = max_len.max(pose.length());
            max_chord = max_chord.max(pose.chord());
        }
        let expected = s.start_pose.transformed(&s.isometry());
        residual = residual.max(expected.distance(&s.end_pose));
        match &s.kind {
            StepKind::Pivot { center, angle } => {
                let d = center.dist(&s.start_pose.start()).min(center.dist(&s.start_pose.end()));
                pivot_off = pivot_off.max(d);
                let b = pivot_bound(&s.start_pose, angle);
                bound_err = bound_err.max((&b - &s.swept_bound).abs());
            }
            StepKind::Slide { circle, .. } => {
                let mid = s.pose_at_fraction(&half);
                for pose in [&s.start_pose, &mid, &s.end_pose] {
                    off_circle = off_circle.max(pose.circle().center.dist(&circle.center));
                    off_circle = off_circle.max((&pose.circle().radius - &circle.radius).abs());
                }
                bound_err = bound_err.max(s.swept_bound.abs());
            }
        }
    }
    let sum = plan.steps.iter().fold(zero.clone(), |acc, s| acc + &s.swept_bound);
    let mut r = LemmaReport::new("plan", true);
    r.note("steps", Scalar::from_i64(plan.len() as i64, prec));
    r.at_most("max_discontinuity", disc, tol.clone());
    r.at_most("radius_error", radius_err, tol.clone());
    if !plan.is_empty() {
        r.less("max_arc_length", max_len, lit(MAX_ARC_LEN, prec));
        r.less("max_chord", max_chord, lit(MAX_CHORD, prec));
    }
    r.at_most("pivot_center_offset", pivot_off, tol.clone());
    r.at_most("step_residual", residual, tol.clone());
    r.at_most("slide_off_circle", off_circle, tol.clone());
    r.at_most("swept_bound_error", bound_err, tol.clone());
    r.at_most("total_error", (&sum - &plan.total_swept_bound).abs(), tol);
    r
}

/// Pose at normalized time `t`, with time proportional to accumulated |angle|.
pub fn pose_at(plan: &MotionPlan, t: &Scalar) -> Result<ArcPose> {
    let prec = plan.precision;
    let t = t.to_precision(prec);
    if t.is_negative() || t > Scalar::one(prec) || t.is_nan() {
        return Err(KakeyaError::OutOfRange(format!("t = {t} not in [0, 1]")));
    }
    let first = plan.first_pose().ok_or_else(|| KakeyaError::OutOfRange("empty plan".into()))?;
    let total = plan.steps.iter().fold(Scalar::zero(prec), |acc, s| acc + s.angle().abs());
    if total.is_zero() {
        return Ok(first.clone());
    }
    let mut remaining = &t * &total;
    for s in &plan.steps {
        let a = s.angle().abs();
        if remaining <= a {
            if a.is_zero() {
                return Ok(s.start_pose.clone());
            }
            return Ok(s.pose_at_fraction(&(&remaining / &a)));
        }
        remaining = remaining - a;
    }
    Ok(plan.last_pose().expect("non-empty").clone())
}

fn beta_index(tag: &Option<String>) -> Option<u64> {
    tag.as_deref()?.strip_prefix("beta:")?.parse().ok()
}

/// Replaces each pivot about a tip point by a transported sub-plan, `depth` times.
pub fn refine_plan(plan: &MotionPlan, scene: &SproutScene, depth: u32) -> Result<MotionPlan> {
    if depth == 0 {
        return Ok(plan.clone());
    }
    let cfg = scene.config();
    let prec = plan.precision;
    let gate = &(&cfg.eps * &cfg.eps) / 100.0;
    let jobs: Vec<(usize, u64)> = plan.steps.iter().enumerate().filter_map(|(i, s)| beta_index(&s.tag).map(|k| (i, k))).collect();
    let subs: Vec<Result<(usize, MotionPlan)>> = jobs
        .par_iter()
        .map(|&(idx, k)| {
            let step = &plan.steps[idx];
            let beta = step.angle().clone();
            if !beta.is_positive() {
                return Err(KakeyaError::RecursionInfeasible(format!("non-positive angle at beta:{k}")));
            }
            if cfg.strict && beta >= gate {
                return Err(KakeyaError::RecursionInfeasible(format!("angle {beta} at beta:{k} is not below eps^2/100")));
            }
            let sub_cfg = SproutConfig { h: beta, ..cfg.clone() };
            let sub_scene = build_scene(&sub_cfg).map_err(|e| KakeyaError::RecursionInfeasible(format!("sub-scene at beta:{k}: {e}")))?;
            let sub = build_motion_plan(&sub_scene, &step.start_pose.length())?;
            let sub = refine_plan(&sub, &sub_scene, depth - 1)?;
            // M goes to P_x and the local O0 to O1^x: the sub-plan starts where this pivot does
            let lf = sub_scene.frame();
            let u0 = lf.k0.center.sub(&lf.m);
            let u1 = step.start_pose.circle().center.sub(step.center());
            let iso = Isometry::from_frames(&lf.m, &u0, step.center(), &u1, false);
            let mut out = sub.transformed(&iso);
            for s in out.steps.iter_mut() {
                s.tag = Some(format!("beta:{k}>{}", s.tag.as_deref().unwrap_or("")));
            }
            Ok((idx, out))
        })
        .collect();
    let mut replacement: std::collections::BTreeMap<usize, MotionPlan> = std::collections::BTreeMap::new();
    for s in subs {
        let (i, p) = s?;
        replacement.insert(i, p);
    }
    let mut steps = Vec::new();
    for (i, s) in plan.steps.iter().enumerate() {
        match replacement.remove(&i) {
            Some(sub) => steps.extend(sub.steps),
            None => steps.push(s.clone()),
        }
    }
    Ok(MotionPlan::new(steps, prec))
}

/// One link of a theorem-1 chain: rotation about a common point of two circles.
#[derive(Clone, Debug, Serialize)]
pub struct ChainLink {
    pub from: Circle,
    pub to: Circle,
    pub pivot: Point,
    pub angle: Scalar,
    pub pieces: u32,
    pub swept_bound: Scalar,
    #[serde(skip)]
    pub plan: MotionPlan,
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem1Chain {
    pub circles: Vec<Circle>,
    pub links: Vec<ChainLink>,
    pub total_swept_bound: Scalar,
    #[serde(skip)]
    pub plan: MotionPlan,
}

impl Theorem1Chain {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("chain serializes");
        v["steps"] = serde_json::json!(self.plan.len());
        if let Some(links) = v["links"].as_array_mut() {
            for (l, link) in links.iter_mut().zip(&self.links) {
                l["steps"] = serde_json::json!(link.plan.len());
            }
        }
        v
    }
}

/// Carries `start` to `end` through a chain of unit circles with centres less than 2 apart.
pub fn compose_theorem1(start: &ArcPose, end: &ArcPose, per_step_budget: &Scalar) -> Result<Theorem1Chain> {
    let prec = start.precision();
    let tol = prec.tolerance();
    let end = ArcPose::new(DirectedArc {
        circle: Circle { center: end.arc.circle.center.to_precision(prec), radius: end.arc.circle.radius.to_precision(prec) },
        start_angle: end.arc.start_angle.to_precision(prec),
        sweep: end.arc.sweep.to_precision(prec),
    });
    let one = Scalar::one(prec);
    for p in [start, &end] {
        if (&p.circle().radius - &one).abs() > tol {
            return Err(KakeyaError::OutOfRange("poses must lie on unit circles".into()));
        }
        check_arc_len(&p.length())?;
    }
    if (start.length() - end.length()).abs() > tol {
        return Err(KakeyaError::OutOfRange("poses must have equal arc length".into()));
    }
    if !per_step_budget.is_positive() {
        return Err(KakeyaError::OutOfRange("per-step budget must be positive".into()));
    }
    let arc_len = start.length();
    let c0 = start.circle().center.clone();
    let c1 = end.circle().center.clone();
    let dist = c0.dist(&c1);
    let mut steps = Vec::new();
    let mut pose = start.clone();

    if dist <= tol {
        let a = normalize_angle(&(&end.arc.start_angle - &pose.arc.start_angle));
        steps.push(MotionStep::slide(&pose, a, Some("slide:same-circle".into())));
        let plan = MotionPlan::new(steps, prec);
        return Ok(Theorem1Chain { circles: vec![start.circle().clone()], links: Vec::new(), total_swept_bound: plan.total_swept_bound.clone(), plan });
    }

    let spacing = lit(CHAIN_SPACING, prec);
    let dir = c1.sub(&c0).scale(&(&one / &dist));
    let mut centers = vec![c0.clone()];
    let mut walked = Scalar::zero(prec);
    while walked < dist {
        walked = (&walked + &spacing).min(dist.clone());
        centers.push(if walked == dist { c1.clone() } else { c0.add(&dir.scale(&walked)) });
    }
    let circles: Vec<Circle> = centers.iter().map(|c| Circle::unit(c.clone())).collect();
    let budget = per_step_budget.to_precision(prec);
    let mut links = Vec::new();
    for w in circles.windows(2) {
        let (from, to) = (&w[0], &w[1]);
        let pts = circle_circle_intersection(from, to)?;
        let m = pts
            .iter()
            .skip(1)
            .fold(pts[0].clone(), |best, p| if p.y > best.y { p.clone() } else { best });
        let h = angle_at(&m, &from.center, &to.center);
        let pieces = {
            let q = (h.abs() / &budget).to_f64().ceil().max(1.0);
            q as u32
        };
        let piece = h.abs() / &Scalar::from_i64(pieces as i64, prec);
        let positive = h.is_positive();
        let mut link_steps = Vec::new();
        let a = if positive { pose.slide_end_to(&m) } else { pose.slide_start_to(&m) };
        let s = MotionStep::slide(&pose, a, Some("slide:link".into()));
        pose = s.end_pose.clone();
        link_steps.push(s);
        let cfg = SproutConfig {
            h: piece.clone(),
            eps: lit(THEOREM1_EPS, prec),
            n: THEOREM1_LEVELS,
            r: lit(crate::sprouting::DEFAULT_R, prec),
            precision: prec,
            strict: false,
        };
        let scene = build_scene(&cfg)?;
        let template = build_motion_plan(&scene, &arc_len)?;
        let signed_piece = if positive { piece.clone() } else { -&piece };
        let ex = Point::new(one.clone(), Scalar::zero(prec));
        for j in 0..pieces {
            let xa = rotate_point(&from.center, &m, &(&signed_piece * &Scalar::from_i64(j as i64, prec)));
            let xb = rotate_point(&from.center, &m, &(&signed_piece * &Scalar::from_i64(j as i64 + 1, prec)));
            let iso = Isometry::from_frames(scene.m(), &ex, &m, &xb.sub(&xa), !positive);
            let t = template.transformed(&iso);
            pose = t.steps.last().map(|s| s.end_pose.clone()).unwrap_or(pose);
            link_steps.extend(t.steps);
        }
        let link_plan = MotionPlan::new(link_steps, prec);
        steps.extend(link_plan.steps.iter().cloned());
        links.push(ChainLink {
            from: from.clone(),
            to: to.clone(),
            pivot: m,
            angle: h,
            pieces,
            swept_bound: link_plan.total_swept_bound.clone(),
            plan: link_plan,
        });
    }
    let a = normalize_angle(&(&end.arc.start_angle - &pose.arc.start_angle));
    steps.push(MotionStep::slide(&pose, a, Some("slide:end".into())));
    let plan = MotionPlan::new(steps, prec);
    Ok(Theorem1Chain { circles, links, total_swept_bound: plan.total_swept_bound.clone(), plan })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sprouting::SproutConfig;

    fn relaxed(n: u32) -> SproutScene {
        build_scene(&SproutConfig::relaxed_reference(n)).unwrap()
    }

    fn len(prec: Precision) -> Scalar {
        lit(DEFAULT_ARC_LEN, prec)
    }

    #[test]
    fn one_level_counts() {
        let scene = relaxed(1);
        let plan = build_motion_plan(&scene, &len(scene.precision())).unwrap();
        assert_eq!(plan.pivot_count(), 3);
        assert_eq!(plan.slide_count(), 4);
        assert_eq!(plan.first_pose().unwrap(), &initial_pose(&scene, &len(scene.precision())));
        let r = validate_plan(&plan);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn relaxed_plan_reaches_target() {
        let scene = relaxed(5);
        let l = len(scene.precision());
        let plan = build_motion_plan(&scene, &l).unwrap();
        assert_eq!(plan.len(), (1 << 7) - 1);
        assert!(validate_plan(&plan).pass);
        let target = final_pose(&scene, &l);
        assert!(plan.last_pose().unwrap().distance(&target).to_f64() < 1e-12);
        let moved = initial_pose(&scene, &l).transformed(&plan.isometry());
        assert!(moved.distance(&target).to_f64() < 1e-11);
    }

    #[test]
    fn swapped_steps_fail_validation() {
        let scene = relaxed(2);
        let mut plan = build_motion_plan(&scene, &len(scene.precision())).unwrap();
        plan.steps.swap(1, 2);
        assert!(!validate_plan(&plan).pass);
        assert!(validate_plan(&MotionPlan::empty(Precision::Hardware)).pass);
    }

    #[test]
    fn errors() {
        let scene = relaxed(2);
        let long = Scalar::Hw(1.32);
        assert!(matches!(build_motion_plan(&scene, &long), Err(KakeyaError::ArcTooLong(_))));
        let plan = build_motion_plan(&scene, &len(Precision::Hardware)).unwrap();
        assert!(matches!(pose_at(&plan, &Scalar::Hw(1.5)), Err(KakeyaError::OutOfRange(_))));
    }

    #[test]
    fn pose_at_ends_and_boundaries() {
        let scene = relaxed(3);
        let plan = build_motion_plan(&scene, &len(Precision::Hardware)).unwrap();
        assert_eq!(&pose_at(&plan, &Scalar::Hw(0.0)).unwrap(), plan.first_pose().unwrap());
        assert!(pose_at(&plan, &Scalar::Hw(1.0)).unwrap().distance(plan.last_pose().unwrap()).to_f64() < 1e-15);
        let total: f64 = plan.steps.iter().map(|s| s.angle().abs().to_f64()).sum();
        let upto: f64 = plan.steps[..4].iter().map(|s| s.angle().abs().to_f64()).sum();
        let p = pose_at(&plan, &Scalar::Hw(upto / total)).unwrap();
        assert!(p.distance(&plan.steps[3].end_pose).to_f64() < 1e-9);
    }

    #[test]
    fn refine_relaxed_depth_one() {
        let scene = relaxed(3);
        let plan = build_motion_plan(&scene, &len(Precision::Hardware)).unwrap();
        assert_eq!(refine_plan(&plan, &scene, 0).unwrap().steps, plan.steps);
        let refined = refine_plan(&plan, &scene, 1).unwrap();
        let betas = plan.steps.iter().filter(|s| beta_index(&s.tag).is_some()).count();
        assert_eq!(betas, 7);
        assert_eq!(refined.len(), plan.len() - betas + betas * plan.len());
        let r = validate_plan(&refined);
        assert!(r.pass, "{r:?}");
        assert!(refined.last_pose().unwrap().distance(plan.last_pose().unwrap()).to_f64() < 1e-12);
        let sum_beta: f64 = plan.steps.iter().filter(|s| beta_index(&s.tag).is_some()).map(|s| s.angle().to_f64()).sum();
        assert!(sum_beta < scene.config().h.to_f64());
        assert!(refined.steps.iter().all(|s| beta_index(&s.tag).is_none()));
    }

    #[test]
    fn refine_strict_is_gated() {
        let scene = build_scene(&SproutConfig::strict_reference(1)).unwrap();
        let plan = build_motion_plan(&scene, &len(scene.precision())).unwrap();
        assert!(matches!(refine_plan(&plan, &scene, 1), Err(KakeyaError::RecursionInfeasible(_))));
    }

    #[test]
    fn theorem1_links() {
        let prec = Precision::Hardware;
        let l = len(prec);
        let start = ArcPose::ending_at(&Circle::unit(Point::from_f64(0.0, 0.0, prec)), &Point::from_f64(0.0, 1.0, prec), &l);
        let end_circle = Circle::unit(Point::from_f64(1.0, 0.0, prec));
        let end = ArcPose::ending_at(&end_circle, &Point::from_f64(1.0, 1.0, prec), &l);
        let chain = compose_theorem1(&start, &end, &Scalar::Hw(0.05)).unwrap();
        assert_eq!(chain.links.len(), 1);
        assert!(chain.links[0].angle.is_positive());
        let r = validate_plan(&chain.plan);
        assert!(r.pass, "{r:?}");
        assert!(chain.plan.last_pose().unwrap().distance(&end).to_f64() < 1e-12);

        let same = compose_theorem1(&start, &start.slid(&Scalar::Hw(0.3)), &Scalar::Hw(0.05)).unwrap();
        assert!(same.links.is_empty());
        assert_eq!(same.plan.len(), 1);
        assert_eq!(same.total_swept_bound.to_f64(), 0.0);
    }

    #[test]
    fn theorem1_leftward_chain_turns_clockwise() {
        let prec = Precision::Hardware;
        let l = len(prec);
        let start = ArcPose::ending_at(&Circle::unit(Point::from_f64(0.0, 0.0, prec)), &Point::from_f64(0.0, 1.0, prec), &l);
        let end = ArcPose::ending_at(&Circle::unit(Point::from_f64(-3.0, 0.5, prec)), &Point::from_f64(-3.0, 1.5, prec), &l);
        let chain = compose_theorem1(&start, &end, &Scalar::Hw(0.05)).unwrap();
        assert_eq!(chain.links.len(), 2);
        assert!(chain.links.iter().all(|k| k.angle.is_negative()));
        let r = validate_plan(&chain.plan);
        assert!(r.pass, "{r:?}");
    }
}
