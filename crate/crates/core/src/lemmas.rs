//! Executable forms of the quantitative lemmas: constructions plus reports
//! that compare measured values against the stated bounds.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{KakeyaError, Result};
use crate::geometry::{angle_at, circle_circle_intersection, rotate_circle, rotate_point, Circle, DirectedArc, Point};
use crate::scalar::{Precision, Scalar};
use crate::sprouting::{LuneFrame, SproutScene};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Sense {
    Positive,
    Negative,
}

impl Sense {
    pub fn sign(self) -> f64 {
        match self {
            Sense::Positive => 1.0,
            Sense::Negative => -1.0,
        }
    }
}

/// Outcome of one lemma check. `pass` requires the hypotheses and every bound.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub lemma_id: String,
    pub hypotheses_met: bool,
    pub measured: BTreeMap<String, Scalar>,
    pub bound: BTreeMap<String, Scalar>,
    pub pass: bool,
    #[serde(skip)]
    all_ok: bool,
}

impl LemmaReport {
    pub fn new(lemma_id: impl Into<String>, hypotheses_met: bool) -> LemmaReport {
        LemmaReport {
            lemma_id: lemma_id.into(),
            hypotheses_met,
            measured: BTreeMap::new(),
            bound: BTreeMap::new(),
            pass: hypotheses_met,
            all_ok: true,
        }
    }

    fn record(&mut self, key: &str, measured: Scalar, bound: Scalar, ok: bool) {
        self.measured.insert(key.to_string(), measured);
        self.bound.insert(key.to_string(), bound);
        self.all_ok &= ok;
        self.pass = self.hypotheses_met && self.all_ok;
    }

    /// Requires `measured < bound`.
    pub fn less(&mut self, key: &str, measured: Scalar, bound: Scalar) {
        let ok = measured < bound;
        self.record(key, measured, bound, ok);
    }

    /// Requires `measured <= bound`.
    pub fn at_most(&mut self, key: &str, measured: Scalar, bound: Scalar) {
        let ok = measured <= bound;
        self.record(key, measured, bound, ok);
    }

    /// Requires `measured > bound`.
    pub fn greater(&mut self, key: &str, measured: Scalar, bound: Scalar) {
        let ok = measured > bound;
        self.record(key, measured, bound, ok);
    }

    /// Informational value with no bound attached.
    pub fn note(&mut self, key: &str, measured: Scalar) {
        self.measured.insert(key.to_string(), measured);
    }

    pub fn set_hypotheses(&mut self, met: bool) {
        self.hypotheses_met = met;
        self.pass = met && self.all_ok;
    }

    /// A failure that counts, i.e. one made under the lemma's hypotheses.
    pub fn is_violation(&self) -> bool {
        self.hypotheses_met && !self.pass
    }
}

/// Rotates `k` about `q` (a point of `k`) so the image passes through `p`.
///
/// Returns the rotated circle and the rotation angle's magnitude.
pub fn rotate_circle_to_contain(k: &Circle, q: &Point, p: &Point, sense: Sense) -> Result<(Circle, Scalar)> {
    let prec = k.precision();
    let tol = prec.tolerance();
    if !k.contains_point(q, &(&tol * 16.0)) {
        return Err(KakeyaError::Degenerate("pivot is not on the circle"));
    }
    let qp = q.dist(p);
    if qp <= tol {
        return Err(KakeyaError::Degenerate("pivot and target coincide"));
    }
    if k.contains_point(p, &tol) {
        return Ok((k.clone(), Scalar::zero(prec)));
    }
    if qp > &k.radius * 2.0 {
        return Err(KakeyaError::NoSolution("target farther than a diameter from the pivot"));
    }
    let about_q = Circle { center: q.clone(), radius: k.radius.clone() };
    let about_p = Circle { center: p.clone(), radius: k.radius.clone() };
    let centers = circle_circle_intersection(&about_q, &about_p)?;
    let mut best: Option<(Point, Scalar)> = None;
    for c in centers {
        let theta = angle_at(q, &k.center, &c);
        let ok = match sense {
            Sense::Positive => !theta.is_negative(),
            Sense::Negative => !theta.is_positive(),
        };
        if !ok {
            continue;
        }
        let mag = theta.abs();
        if best.as_ref().is_none_or(|(_, b)| mag < *b) {
            best = Some((c, mag));
        }
    }
    let (center, alpha) = best.ok_or(KakeyaError::NoSolution("no rotation in the requested sense"))?;
    Ok((Circle { center, radius: k.radius.clone() }, alpha))
}

/// Rotation about a point: `sin(alpha) < 2 sqrt(d)`, centre shift `< 4 sqrt(d)`.
pub fn check_lemma1(k: &Circle, q: &Point, p: &Point, sense: Sense) -> Result<LemmaReport> {
    let prec = k.precision();
    let tol = prec.tolerance();
    let o = &k.center;
    let dist_po = p.dist(o);
    let d = (&dist_po - &k.radius).abs();
    let interior = dist_po < k.radius;
    let qp = q.dist(p);
    let sd = d.sqrt();
    let orientation = o.sub(p).cross(&q.sub(p));
    let trivial = d <= tol;
    let hyp = trivial
        || (d < 0.5
            && orientation.is_positive()
            && k.contains_point(q, &(&tol * 16.0))
            && if interior {
                sense == Sense::Positive && qp >= &sd * 2.0
            } else {
                sense == Sense::Negative && qp >= &sd * 3.0 && qp <= Scalar::from_i64(2, prec) - &d
            });
    let mut r = LemmaReport::new("l1", hyp);
    r.note("d", d.clone());
    match rotate_circle_to_contain(k, q, p, sense) {
        Ok((kp, alpha)) => {
            let shift = kp.center.dist(o);
            let residual = kp.signed_distance(p).abs();
            r.note("alpha", alpha.clone());
            if trivial {
                r.at_most("sin_alpha", alpha.sin(), tol.clone());
                r.at_most("center_shift", shift, tol.clone());
            } else {
                r.less("sin_alpha", alpha.sin(), &sd * 2.0);
                r.less("center_shift", shift, &sd * 4.0);
                r.less("alpha", alpha, Scalar::pi(prec).half());
            }
            r.at_most("p_residual", residual, tol);
        }
        Err(_) => {
            r.less("construction", Scalar::one(prec), Scalar::zero(prec));
        }
    }
    Ok(r)
}

/// Intersection of two rotated copies of `k` (inside `k` for POSITIVE, outside for NEGATIVE).
pub fn sprout_intersection(
    k: &Circle,
    a: &Point,
    b: &Point,
    alpha: &Scalar,
    beta: &Scalar,
    sense: Sense,
) -> Result<(Point, LemmaReport)> {
    let prec = k.precision();
    let tol = prec.tolerance();
    let o = &k.center;
    let orient = a.sub(o).cross(&b.sub(o));
    let eta = angle_at(o, a, b).abs();
    let eta_max = match sense {
        Sense::Positive => 0.2,
        Sense::Negative => 0.1,
    };
    let mut why = Vec::new();
    if !orient.is_positive() {
        why.push("orientation of O A B is not positive");
    }
    if !k.contains_point(a, &(&tol * 16.0)) || !k.contains_point(b, &(&tol * 16.0)) {
        why.push("A and B must lie on K");
    }
    if eta >= eta_max {
        why.push("eta too large");
    }
    if !alpha.is_positive() || *alpha >= beta * 0.75 {
        why.push("need 0 < alpha < 3 beta / 4");
    }
    if *beta >= eta {
        why.push("need beta < eta");
    }
    if !why.is_empty() {
        return Err(KakeyaError::HypothesesViolated(why.join("; ")));
    }
    let s = sense.sign();
    let ka = rotate_circle(k, a, &(alpha * s));
    let kb = rotate_circle(k, b, &(beta * s));
    let pts = circle_circle_intersection(&ka, &kb)?;
    let side = |p: &Point| {
        let sd = k.signed_distance(p);
        match sense {
            Sense::Positive => sd.is_negative(),
            Sense::Negative => sd.is_positive(),
        }
    };
    let p = pts
        .into_iter()
        .filter(side)
        .min_by(|x, y| x.dist(a).partial_cmp(&y.dist(a)).unwrap_or(std::cmp::Ordering::Equal))
        .ok_or(KakeyaError::NoIntersection("rotated circles do not meet on the required side"))?;
    let factor = match sense {
        Sense::Positive => 20.0,
        Sense::Negative => 50.0,
    };
    let id = match sense {
        Sense::Positive => "l3",
        Sense::Negative => "l9",
    };
    let mut r = LemmaReport::new(id, true);
    r.note("eta", eta.clone());
    let sd = k.signed_distance(&p);
    match sense {
        Sense::Positive => r.less("signed_distance_to_k", sd, Scalar::zero(prec)),
        Sense::Negative => r.greater("signed_distance_to_k", sd, Scalar::zero(prec)),
    }
    r.less("dist_pa", p.dist(a), &eta * factor);
    Ok((p, r))
}

fn line_angle_to_axis(v: &Point, vertical: bool) -> Scalar {
    let (along, across) = if vertical { (v.y.abs(), v.x.abs()) } else { (v.x.abs(), v.y.abs()) };
    if along.is_zero() && across.is_zero() {
        return Scalar::zero(v.precision());
    }
    across.atan2(&along)
}

/// Chord of the tip arc: angle to the y axis below `h + eps`.
pub fn chord_direction_bound(tip_arc: &DirectedArc, q1: &Point, q2: &Point, h: &Scalar, eps: &Scalar) -> Result<LemmaReport> {
    let tol = h.precision().tolerance();
    if q1.dist(q2) <= tol {
        return Err(KakeyaError::Degenerate("q1 = q2"));
    }
    let hyp = tip_arc.contains_point(q1, &(&tol * 16.0)) && tip_arc.contains_point(q2, &(&tol * 16.0));
    let mut r = LemmaReport::new("l4", hyp);
    r.less("angle_to_y_axis", line_angle_to_axis(&q2.sub(q1), true), h + eps);
    Ok(r)
}

/// Rotation about a junction `C` between two circles through tip points.
pub fn junction_rotation_check(
    frame: &LuneFrame,
    qp: &Point,
    qpp: &Point,
    c: &Point,
    kp: &Circle,
    kpp: &Circle,
) -> Result<LemmaReport> {
    let prec = frame.precision();
    let tol = prec.tolerance();
    let wide = &tol * 16.0;
    let eps = &frame.eps;
    let one = Scalar::one(prec);
    let two = Scalar::from_i64(2, prec);
    let hyp = frame.p_arc.contains_point(qp, &wide)
        && frame.p_arc.contains_point(qpp, &wide)
        && (qp.y > qpp.y || qp.approx_eq(qpp, &tol))
        && frame.in_l1(c, &wide)
        && c.dist(&frame.m) <= &two - &(eps * 5.0)
        && (&kp.radius - &one).abs() <= tol
        && (&kpp.radius - &one).abs() <= tol
        && kp.contains_point(qp, &wide)
        && kp.contains_point(c, &wide)
        && kpp.contains_point(qpp, &wide)
        && kpp.contains_point(c, &wide)
        && kp.center.dist(&frame.origin) < *eps
        && kpp.center.dist(&frame.origin) < *eps;
    let theta = angle_at(c, &kpp.center, &kp.center);
    let image = rotate_point(qpp, c, &theta);
    let mut r = LemmaReport::new("l5", hyp);
    r.less("alpha", theta.abs(), eps.clone());
    r.less("line_angle_to_x_axis", line_angle_to_axis(&image.sub(qp), false), eps * 6.0);
    Ok(r)
}

/// Angle opposite the shortest side is below `2a/c`.
pub fn smallest_angle_bound(a: &Scalar, b: &Scalar, c: &Scalar) -> Result<LemmaReport> {
    if a > b || b > c {
        return Err(KakeyaError::UnsortedSides);
    }
    if !a.is_positive() || a + b <= *c {
        return Err(KakeyaError::NotATriangle);
    }
    let cos = (b * b + c * c - a * a) / ((b * c) * 2.0);
    let one = Scalar::one(a.precision());
    let cos = cos.min(one.clone()).max(-one);
    let mut r = LemmaReport::new("l14", true);
    r.less("angle", cos.acos(), (a * 2.0) / c);
    Ok(r)
}

/// `t^4 + 4t^3 - 4t^2 - 16t + 15.999`.
pub fn certificate_polynomial(t: &Scalar) -> Scalar {
    let c0 = Scalar::parse("15.999", t.precision()).expect("literal");
    let mut acc = t.lift(1.0);
    acc = &acc * t + 4.0;
    acc = &acc * t - 4.0;
    acc = &acc * t - 16.0;
    &acc * t + &c0
}

/// Real roots of `x^3 + a x^2 + b x + c`, ascending.
pub fn real_cubic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = -a / 3.0;
    let disc = q * q / 4.0 + p * p * p / 27.0;
    let mut roots = if disc > 1e-14 {
        let s = disc.sqrt();
        vec![(-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt() + shift]
    } else if p.abs() < 1e-14 {
        vec![shift]
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let th = arg.acos() / 3.0;
        (0..3).map(|k| m * (th - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift).collect()
    };
    // polish with Newton
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let f = ((*r + a) * *r + b) * *r + c;
            let df = (3.0 * *r + 2.0 * a) * *r + b;
            if df != 0.0 {
                *r -= f / df;
            }
        }
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}

/// Non-negativity of the quartic on `(0, t_max]` via grid and critical points.
pub fn polynomial_certificate(t_max: &Scalar, grid: usize) -> LemmaReport {
    let prec = t_max.precision();
    let limit = Scalar::parse("1.228", prec).expect("literal");
    let hyp = *t_max <= limit && t_max.is_positive() && grid >= 2;
    let mut r = LemmaReport::new("eqend", hyp);
    let mut min = certificate_polynomial(t_max);
    let mut arg_min = t_max.clone();
    for k in 1..=grid {
        let t = t_max * &Scalar::from_i64(k as i64, prec) / &Scalar::from_i64(grid as i64, prec);
        let v = certificate_polynomial(&t);
        if v < min {
            min = v;
            arg_min = t;
        }
    }
    // f'(t) = 4 (t^3 + 3 t^2 - 2 t - 4)
    let crit: Vec<f64> = real_cubic_roots(3.0, -2.0, -4.0).into_iter().filter(|&x| x > 0.0 && x <= t_max.to_f64()).collect();
    for x in &crit {
        let t = Scalar::from_f64(*x, prec);
        let v = certificate_polynomial(&t);
        if v < min {
            min = v;
            arg_min = t;
        }
    }
    r.note("critical_points_in_range", Scalar::from_i64(crit.len() as i64, prec));
    r.note("argmin", arg_min);
    r.at_most("negated_min", -min, Scalar::zero(prec));
    r
}

/// Largest `u` with `arccos(1 - u) < h`, found by bisection.
pub fn arccos_modulus(h: &Scalar) -> Scalar {
    let prec = h.precision();
    // arccos(1 - u) = 2 asin(sqrt(u/2)) keeps precision for tiny u
    let step = |u: &Scalar| (u.half().sqrt().asin()) * 2.0;
    let mut lo = Scalar::zero(prec);
    let mut hi = Scalar::one(prec);
    if step(&hi) < *h {
        return hi;
    }
    let iters = prec.bits().min(400) as usize + 8;
    for _ in 0..iters {
        let mid = (&lo + &hi).half();
        if step(&mid) < *h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// The ring-gap threshold `n0 = 2/u`.
pub fn n0(h: &Scalar) -> Scalar {
    Scalar::from_i64(2, h.precision()) / arccos_modulus(h)
}

/// `c = max(2 n0, 8/eps)`.
pub fn junction_constant(h: &Scalar, eps: &Scalar) -> Scalar {
    let a = n0(h) * 2.0;
    let b = Scalar::from_i64(8, eps.precision()) / eps;
    a.max(b)
}

fn chord_profile(t: f64) -> f64 {
    t * (1.0 - t * t / 4.0).sqrt()
}

fn profile_ratio(eps: f64, d: f64) -> f64 {
    let (a, b) = (eps, 2.0 - 4.0 * eps - d);
    if b < a {
        return f64::INFINITY;
    }
    let grid = 4096;
    (0..=grid)
        .map(|j| {
            let t = a + (b - a) * j as f64 / grid as f64;
            let (g0, g1) = (chord_profile(t), chord_profile(t + d));
            (g0 / g1).max(g1 / g0)
        })
        .fold(1.0, f64::max)
}

/// Largest `v` with `g(t)/g(t') < 1.1` for `t, t'` in `[eps, 2 - 4 eps]`, `|t - t'| < v`,
/// where `g(t) = t sqrt(1 - t^2/4)`.
pub fn compute_v(eps: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 2.0 - 5.0 * eps);
    if profile_ratio(eps, hi) < 1.1 {
        return hi;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if profile_ratio(eps, mid) < 1.1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Rotation about `C_i^x` carrying `K0^x` to `K1^{x+2^-i}`; `k` is `x` at level `i`.
pub fn alpha_at(scene: &SproutScene, i: u32, k: u64) -> Result<Scalar> {
    let n = scene.n();
    let step = 1u64 << (n - i);
    let c = scene.c_at(i, k)?;
    let a = scene.k0_at(k * step)?;
    let b = scene.k1_at((k + 1) * step)?;
    Ok(angle_at(c, &a.center, &b.center))
}

pub fn alpha_sandwich(scene: &SproutScene, i: u32, k: u64) -> Result<LemmaReport> {
    let n = scene.n();
    if i == 0 || i > n || k >= (1u64 << i) {
        return Err(KakeyaError::IndexOutOfRange(format!("alpha_{i} at {k}/2^{i}")));
    }
    let prec = scene.precision();
    let cfg = scene.config();
    let step = 1u64 << (n - i);
    let alpha = alpha_at(scene, i, k)?;
    let t = scene.p_at((k + 1) * step).dist(scene.c_at(i, k)?);
    let quarter_t2 = (&t * &t) / 4.0;
    let g = &t * &(Scalar::one(prec) - &quarter_t2).sqrt();
    let scale = &(&cfg.h * &cfg.eps) * &Scalar::pow2(-(i as i32), prec) / &g;
    let mut r = LemmaReport::new(format!("l10:{i}/{k}"), cfg.strict);
    r.note("t", t);
    r.greater("alpha_lower", alpha.clone(), &scale * 0.9);
    r.less("alpha_upper", alpha.clone(), &scale * 1.1);
    r.less("alpha_e34", alpha, Scalar::pow2(-(i as i32), prec) * 1e-3);
    Ok(r)
}

/// Rotation about `P_x` carrying `K1^x` to `K0^x`, at level-n numerator `k`.
pub fn beta_at(scene: &SproutScene, k: u64) -> Result<Scalar> {
    let p = scene.p_at(k);
    Ok(angle_at(p, &scene.k1_at(k)?.center, &scene.k0_at(k)?.center))
}

/// `angle C_n^{x-2^-n} M C_n^x`.
pub fn beta_prime_at(scene: &SproutScene, k: u64) -> Result<Scalar> {
    let n = scene.n();
    Ok(angle_at(scene.m(), scene.c_at(n, k - 1)?, scene.c_at(n, k)?))
}

pub fn beta_sum(scene: &SproutScene) -> Result<LemmaReport> {
    if !scene.is_complete() {
        return Err(KakeyaError::SceneIncomplete);
    }
    let prec = scene.precision();
    let cfg = scene.config();
    let n = scene.n();
    let one = Scalar::one(prec);
    let q = &one - &cfg.eps.powi(4);
    let mut sum_b = Scalar::zero(prec);
    let mut sum_bp = Scalar::zero(prec);
    let mut max_ratio = Scalar::zero(prec);
    for k in 1..(1u64 << n) {
        let b = beta_at(scene, k)?;
        let bp = beta_prime_at(scene, k)?;
        let ratio = &b / &bp;
        max_ratio = max_ratio.max(ratio);
        sum_b = sum_b + b;
        sum_bp = sum_bp + bp;
    }
    if n == 0 {
        sum_bp = cfg.h.clone();
    }
    let h = &cfg.h;
    let rel = (&sum_bp - h).abs() / h;
    let rel_tol = match prec {
        Precision::Hardware => Scalar::Hw(1e-9),
        Precision::Big(bits) => Scalar::pow2(-(bits as i32 - 56), prec),
    };
    let mut r = LemmaReport::new("l+", cfg.strict);
    r.note("sum_beta_prime", sum_bp);
    r.at_most("sum_beta", sum_b, &q * h);
    if n > 0 {
        r.less("max_ratio", max_ratio, q);
    }
    r.at_most("sum_beta_prime_rel_err", rel, rel_tol);
    Ok(r)
}

/// Junction gaps against `c/n`, and ring-to-ring distances against `6h` once `n >= n0`.
pub fn consecutive_junction_bounds(scene: &SproutScene) -> Result<LemmaReport> {
    if !scene.is_complete() {
        return Err(KakeyaError::SceneIncomplete);
    }
    let prec = scene.precision();
    let cfg = scene.config();
    let n = scene.n();
    let c = junction_constant(&cfg.h, &cfg.eps);
    let nn = n0(&cfg.h);
    let mut gap = Scalar::zero(prec);
    for i in 0..n {
        for k in 0..(1u64 << i) {
            let ci = scene.c_at(i, k)?;
            gap = gap.max(ci.dist(scene.c_at(i + 1, 2 * k)?));
            gap = gap.max(ci.dist(scene.c_at(i + 1, 2 * k + 1)?));
        }
    }
    let mut r = LemmaReport::new("l8", cfg.strict);
    r.note("c", c.clone());
    r.note("n0", nn.clone());
    if n > 0 {
        r.at_most("junction_gap", gap, &c / &Scalar::from_i64(n as i64, prec));
    }
    let n_real = Scalar::from_i64(n as i64, prec);
    let mut ring_gap = Scalar::zero(prec);
    for i in 0..n {
        let xs = scene.ring(i)?.sample(100);
        let ys = scene.ring(i + 1)?.sample(100);
        for x in &xs {
            for y in &ys {
                ring_gap = ring_gap.max(x.dist(y));
            }
        }
    }
    if n_real >= nn {
        r.less("ring_gap", ring_gap, &cfg.h * 6.0);
    } else {
        r.note("ring_gap", ring_gap);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HW: Precision = Precision::Hardware;

    fn p(x: f64, y: f64) -> Point {
        Point::from_f64(x, y, HW)
    }

    #[test]
    fn rotate_to_contain_trivial_and_errors() {
        let k = Circle::unit(p(0.0, 0.0));
        let q = p(1.0, 0.0);
        let on = p(0.0, 1.0);
        let (kk, a) = rotate_circle_to_contain(&k, &q, &on, Sense::Positive).unwrap();
        assert_eq!(a.to_f64(), 0.0);
        assert_eq!(kk, k);
        assert!(matches!(rotate_circle_to_contain(&k, &q, &q, Sense::Positive), Err(KakeyaError::Degenerate(_))));
        assert!(matches!(rotate_circle_to_contain(&Circle::unit(p(0.0, 0.0)), &q, &p(-1.6, 0.0), Sense::Positive), Err(KakeyaError::NoSolution(_))));
    }

    #[test]
    fn lemma1_interior_example() {
        let k = Circle::unit(p(0.0, 0.0));
        let q = p(1.0, 0.0);
        let pt = p(0.0, 0.9);
        let r = check_lemma1(&k, &q, &pt, Sense::Positive).unwrap();
        assert!(r.hypotheses_met && r.pass, "{r:?}");
        let (kk, _) = rotate_circle_to_contain(&k, &q, &pt, Sense::Positive).unwrap();
        assert!(kk.contains_point(&pt, &Scalar::Hw(1e-12)));
    }

    #[test]
    fn lemma1_exterior_bisection_oracle() {
        // P at distance 0.01 outside K and distance 1 from Q
        let k = Circle::unit(p(0.0, 0.0));
        let q = p(1.0, 0.0);
        let rr = 1.01f64;
        let cx = (rr * rr) / 2.0;
        let pt = p(cx, (rr * rr - cx * cx).sqrt());
        let r = check_lemma1(&k, &q, &pt, Sense::Negative).unwrap();
        assert!(r.hypotheses_met && r.pass, "{r:?}");
        let (kk, alpha) = rotate_circle_to_contain(&k, &q, &pt, Sense::Negative).unwrap();
        assert!(alpha.sin().to_f64() < 0.2);
        // bisection over the rotation angle for sign change of dist - 1
        let f = |a: f64| {
            let c = rotate_point(&k.center, &q, &Scalar::Hw(-a));
            c.dist(&pt).to_f64() - 1.0
        };
        let (mut lo, mut hi) = (0.0f64, 0.5f64);
        assert!(f(lo) * f(hi) < 0.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if f(lo) * f(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((lo - alpha.to_f64()).abs() < 1e-12);
        assert!(kk.contains_point(&pt, &Scalar::Hw(1e-12)));
    }

    #[test]
    fn lemma1_gate() {
        let k = Circle::unit(p(0.0, 0.0));
        // |PQ| < 2 sqrt(d)
        let pt = p(0.95, 0.0);
        let q = (p(0.95f64, (1.0f64 - 0.95 * 0.95).sqrt())).clone();
        let r = check_lemma1(&k, &q, &pt, Sense::Positive).unwrap();
        assert!(!r.hypotheses_met && !r.pass);
        let on = p(0.0, 1.0);
        let r = check_lemma1(&k, &p(1.0, 0.0), &on, Sense::Positive).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn sprout_intersection_examples() {
        let k = Circle::unit(p(0.0, 0.0));
        let eta = 0.1f64;
        let a = p(1.0, 0.0);
        let b = p(eta.cos(), eta.sin());
        let beta = eta / 2.0;
        let (pt, r) = sprout_intersection(&k, &a, &b, &Scalar::Hw(beta / 2.0), &Scalar::Hw(beta), Sense::Positive).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(pt.dist(&a).to_f64() < 2.0);
        assert!(k.signed_distance(&pt).is_negative());

        let eta = 0.05f64;
        let b = p(eta.cos(), eta.sin());
        let (pt, r) = sprout_intersection(&k, &a, &b, &Scalar::Hw(0.02), &Scalar::Hw(0.04), Sense::Negative).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(pt.dist(&a).to_f64() < 2.5);
        assert!(k.signed_distance(&pt).is_positive());

        let bad = sprout_intersection(&k, &a, &b, &Scalar::Hw(0.03), &Scalar::Hw(0.04), Sense::Negative);
        assert!(matches!(bad, Err(KakeyaError::HypothesesViolated(_))));
    }

    #[test]
    fn smallest_angle_examples() {
        let one = Scalar::Hw(1.0);
        let r = smallest_angle_bound(&one, &one, &one).unwrap();
        assert!((r.measured["angle"].to_f64() - std::f64::consts::FRAC_PI_3).abs() < 1e-12 && r.pass);
        let r = smallest_angle_bound(&one, &one, &Scalar::Hw(2f64.sqrt())).unwrap();
        assert!((r.measured["angle"].to_f64() - std::f64::consts::FRAC_PI_4).abs() < 1e-12 && r.pass);
        assert!(matches!(smallest_angle_bound(&Scalar::Hw(2.0), &one, &one), Err(KakeyaError::UnsortedSides)));
        assert!(matches!(smallest_angle_bound(&one, &one, &Scalar::Hw(3.0)), Err(KakeyaError::NotATriangle)));
    }

    #[test]
    fn cubic_roots_of_derivative() {
        let r = real_cubic_roots(3.0, -2.0, -4.0);
        let s5 = 5f64.sqrt();
        let want = [-1.0 - s5, -1.0, -1.0 + s5];
        assert_eq!(r.len(), 3);
        for (a, b) in r.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn certificate_endpoints() {
        let v = certificate_polynomial(&Scalar::Hw(1.228)).to_f64();
        assert!(v > 0.0);
        assert!((certificate_polynomial(&Scalar::Hw(1e-9)).to_f64() - 15.999).abs() < 1e-7);
        let r = polynomial_certificate(&Scalar::Hw(1.228), 10_000);
        assert!(r.pass, "{r:?}");
        let r = polynomial_certificate(&Scalar::Hw(1.3), 100);
        assert!(!r.hypotheses_met);
    }

    #[test]
    fn modulus_of_arccos() {
        let h = Scalar::Hw(1e-3);
        let u = arccos_modulus(&h).to_f64();
        let exact = 1.0 - (1e-3f64).cos();
        assert!((u - exact).abs() / exact < 1e-9, "{u} {exact}");
    }
}
