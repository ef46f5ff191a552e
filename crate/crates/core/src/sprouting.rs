//! The sprouting construction: circles `K0^x`, `K1^x` and junction points
//! `C_i^x` over dyadic levels, in coordinates anchored at the lune tip M.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{KakeyaError, Result};
use crate::geometry::{circle_circle_intersection, rotate_point, Circle, DirectedArc, Point};
use crate::lemmas::{rotate_circle_to_contain, LemmaReport, Sense};
use crate::scalar::{Precision, Scalar};

/// Levels above this would need more than a few GB of circles.
pub const MAX_LEVEL: u32 = 22;

pub const DEFAULT_R: &str = "1.227";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SproutConfig {
    pub h: Scalar,
    pub eps: Scalar,
    pub n: u32,
    #[serde(rename = "R")]
    pub r: Scalar,
    pub precision: Precision,
    pub strict: bool,
}

impl SproutConfig {
    /// Config from decimal strings, read at the target precision.
    pub fn from_decimal(h: &str, eps: &str, n: u32, precision: Precision, strict: bool) -> Result<SproutConfig> {
        let parse = |s: &str, what: &str| {
            Scalar::parse(s, precision).ok_or_else(|| KakeyaError::InvalidSpec(format!("cannot parse {what} = {s:?}")))
        };
        Ok(SproutConfig {
            h: parse(h, "h")?,
            eps: parse(eps, "eps")?,
            n,
            r: parse(DEFAULT_R, "R")?,
            precision,
            strict,
        })
    }

    pub fn with_r(mut self, r: Scalar) -> SproutConfig {
        self.r = r.to_precision(self.precision);
        self
    }

    /// Strict test scene used throughout: eps = 9e-7, h = 9e-10 at 256 bits.
    pub fn strict_reference(n: u32) -> SproutConfig {
        SproutConfig::from_decimal("9e-10", "9e-7", n, Precision::Big(256), true).expect("valid literals")
    }

    /// Relaxed demo scene: eps = 0.05, h = 1e-3 in hardware precision.
    pub fn relaxed_reference(n: u32) -> SproutConfig {
        SproutConfig::from_decimal("1e-3", "0.05", n, Precision::Hardware, false).expect("valid literals")
    }

    pub fn validate(&self) -> Result<()> {
        if !self.precision.is_valid() {
            return Err(KakeyaError::InvalidSpec(format!(
                "precision must be hw or at least {} bits",
                Precision::MIN_BIG_BITS
            )));
        }
        let pi = Scalar::pi(self.precision);
        if !self.h.is_positive() || self.h >= pi {
            return Err(KakeyaError::InvalidSpec("h must lie in (0, pi)".into()));
        }
        if !self.eps.is_positive() || self.eps >= 0.5 {
            return Err(KakeyaError::InvalidSpec("eps must lie in (0, 1/2)".into()));
        }
        if self.n > MAX_LEVEL {
            return Err(KakeyaError::InvalidSpec(format!("n must be at most {MAX_LEVEL}")));
        }
        let r_max = Scalar::from_i64(2, self.precision) - &(&self.eps * 5.0);
        if !self.r.is_positive() || self.r >= r_max {
            return Err(KakeyaError::InvalidSpec("R must lie in (0, 2 - 5 eps)".into()));
        }
        if self.strict {
            if self.eps >= 1e-6 {
                return Err(KakeyaError::HypothesesViolated("strict mode needs eps < 1e-6".into()));
            }
            if self.h > &self.eps / 1000.0 {
                return Err(KakeyaError::HypothesesViolated("strict mode needs h <= eps/1000".into()));
            }
        }
        Ok(())
    }

    fn normalized(&self) -> SproutConfig {
        SproutConfig {
            h: self.h.to_precision(self.precision),
            eps: self.eps.to_precision(self.precision),
            r: self.r.to_precision(self.precision),
            ..self.clone()
        }
    }
}

/// A dyadic fraction `k / 2^level` in [0, 1].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DyadicIndex {
    pub level: u32,
    pub numerator: u64,
}

impl DyadicIndex {
    pub fn new(level: u32, numerator: u64) -> Result<DyadicIndex> {
        if level > 62 || numerator > (1u64 << level) {
            return Err(KakeyaError::IndexOutOfRange(format!("{numerator}/2^{level}")));
        }
        Ok(DyadicIndex { level, numerator })
    }

    pub fn zero() -> DyadicIndex {
        DyadicIndex { level: 0, numerator: 0 }
    }

    pub fn one() -> DyadicIndex {
        DyadicIndex { level: 0, numerator: 1 }
    }

    /// Lowest-level representative.
    pub fn canonical(self) -> DyadicIndex {
        let mut d = self;
        while d.level > 0 && d.numerator.is_multiple_of(2) {
            d.level -= 1;
            d.numerator /= 2;
        }
        d
    }

    /// Numerator over `2^n`, when `n` is at least the canonical level.
    pub fn at_level(self, n: u32) -> Option<u64> {
        let c = self.canonical();
        (c.level <= n).then(|| c.numerator << (n - c.level))
    }

    pub fn value(self, prec: Precision) -> Scalar {
        Scalar::from_i64(self.numerator as i64, prec) * Scalar::pow2(-(self.level as i32), prec)
    }

    pub fn is_zero(self) -> bool {
        self.numerator == 0
    }

    pub fn is_one(self) -> bool {
        self.numerator == 1u64 << self.level
    }
}

impl fmt::Display for DyadicIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.canonical();
        write!(f, "{}/{}", c.numerator, 1u64 << c.level)
    }
}

/// The two seed circles and the tip region, with M at the origin.
#[derive(Clone, Debug, Serialize)]
pub struct LuneFrame {
    pub h: Scalar,
    pub eps: Scalar,
    /// The global origin O.
    pub origin: Point,
    pub m: Point,
    #[serde(rename = "N")]
    pub n_point: Point,
    pub k0: Circle,
    pub k1: Circle,
    /// The arc `P_0 P_1` on the eps-circle about M, swept counter-clockwise.
    pub p_arc: DirectedArc,
}

impl LuneFrame {
    pub fn new(h: &Scalar, eps: &Scalar) -> LuneFrame {
        let prec = h.precision();
        let half = h.half();
        let s = half.sin();
        let c = half.cos();
        let zero = Scalar::zero(prec);
        let m = Point::origin(prec);
        let origin = Point::new(zero.clone(), -&c);
        let o0 = Point::new(-&s, -&c);
        let o1 = Point::new(s.clone(), -&c);
        let n_point = Point::new(zero, -(&c * 2.0));
        let k0 = Circle::unit(o0.clone());
        let k1 = Circle::unit(o1);
        let p0 = rotate_point(&m, &o0, &((eps.half()).asin() * 2.0));
        let eps_circle = Circle { center: m.clone(), radius: eps.clone() };
        let p_arc = DirectedArc { start_angle: eps_circle.angle_of(&p0), sweep: h.clone(), circle: eps_circle };
        LuneFrame { h: h.clone(), eps: eps.clone(), origin, m, n_point, k0, k1, p_arc }
    }

    pub fn precision(&self) -> Precision {
        self.h.precision()
    }

    pub fn p0(&self) -> Point {
        self.p_arc.start()
    }

    pub fn p1(&self) -> Point {
        self.p_arc.end()
    }

    /// Closed left lune: inside `K0`, outside `K1`.
    pub fn in_l0(&self, p: &Point, tol: &Scalar) -> bool {
        self.k0.signed_distance(p) <= *tol && self.k1.signed_distance(p) >= -tol
    }

    /// Closed right lune: inside `K1`, outside `K0`.
    pub fn in_l1(&self, p: &Point, tol: &Scalar) -> bool {
        self.k1.signed_distance(p) <= *tol && self.k0.signed_distance(p) >= -tol
    }

    /// `Delta(h)`: the left lune cut by the eps-disc about M.
    pub fn in_delta(&self, p: &Point, tol: &Scalar) -> bool {
        self.in_l0(p, tol) && p.norm() <= &self.eps + tol
    }
}

/// Ring `i`: the arc of radius `iR/n` about M inside the right lune.
#[derive(Clone, Debug, Serialize)]
pub struct Ring {
    pub index: u32,
    pub radius: Scalar,
    pub a0: Point,
    pub a1: Point,
    /// `None` for the degenerate ring 0.
    pub arc: Option<DirectedArc>,
}

impl Ring {
    fn build(frame: &LuneFrame, index: u32, radius: Scalar) -> Ring {
        if radius.is_zero() {
            return Ring { index, radius, a0: frame.m.clone(), a1: frame.m.clone(), arc: None };
        }
        let central = radius.half().asin() * 2.0;
        let a0 = rotate_point(&frame.m, &frame.k0.center, &-central);
        let a1 = rotate_point(&a0, &frame.m, &frame.h);
        let circle = Circle { center: frame.m.clone(), radius: radius.clone() };
        let arc = DirectedArc { start_angle: circle.angle_of(&a0), sweep: frame.h.clone(), circle };
        Ring { index, radius, a0, a1, arc: Some(arc) }
    }

    pub fn circle(&self) -> Option<&Circle> {
        self.arc.as_ref().map(|a| &a.circle)
    }

    /// Distance from `p` to the closed ring arc along the ring, plus radial error.
    pub fn deviation(&self, p: &Point) -> Scalar {
        match &self.arc {
            None => p.dist(&self.a0),
            Some(arc) => {
                let radial = arc.circle.signed_distance(p).abs();
                let ang = arc.angular_gap(&arc.circle.angle_of(p));
                radial + &ang * &self.radius
            }
        }
    }

    /// Intersection of `k` with this ring closest to the arc.
    pub fn intersect(&self, k: &Circle) -> Option<Point> {
        let arc = self.arc.as_ref()?;
        let pts = circle_circle_intersection(k, &arc.circle).ok()?;
        pts.into_iter().min_by(|a, b| {
            let ga = arc.angular_gap(&arc.circle.angle_of(a));
            let gb = arc.angular_gap(&arc.circle.angle_of(b));
            ga.partial_cmp(&gb).unwrap_or(std::cmp::Ordering::Equal)
        })
    }

    /// Evenly spaced points on the arc.
    pub fn sample(&self, count: usize) -> Vec<Point> {
        match &self.arc {
            None => vec![self.a0.clone()],
            Some(arc) => (0..count)
                .map(|j| {
                    let f = arc.sweep.lift(j as f64 / (count.max(2) - 1) as f64);
                    arc.circle.point_at(&(&arc.start_angle + &(&arc.sweep * &f)))
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CircleFamily {
    K0,
    K1,
}

#[derive(Clone, Debug)]
pub struct SproutScene {
    config: SproutConfig,
    frame: LuneFrame,
    rings: Vec<Ring>,
    /// `P_{k/2^n}` for `k = 0..=2^n`.
    p: Vec<Point>,
    k0: Vec<Option<Circle>>,
    k1: Vec<Option<Circle>>,
    /// `c[i][k] = C_i^{k/2^i}` for `k < 2^i`.
    c: Vec<Vec<Point>>,
    built_level: u32,
}

impl SproutScene {
    pub fn config(&self) -> &SproutConfig {
        &self.config
    }

    pub fn frame(&self) -> &LuneFrame {
        &self.frame
    }

    pub fn precision(&self) -> Precision {
        self.config.precision
    }

    pub fn tolerance(&self) -> Scalar {
        self.config.precision.tolerance()
    }

    pub fn n(&self) -> u32 {
        self.config.n
    }

    pub fn built_level(&self) -> u32 {
        self.built_level
    }

    pub fn is_complete(&self) -> bool {
        self.built_level == self.config.n
    }

    pub fn m(&self) -> &Point {
        &self.frame.m
    }

    pub fn ring(&self, i: u32) -> Result<&Ring> {
        self.rings.get(i as usize).ok_or_else(|| KakeyaError::IndexOutOfRange(format!("ring {i}")))
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    fn top_numerator(&self, x: DyadicIndex) -> Result<u64> {
        x.at_level(self.config.n).ok_or_else(|| KakeyaError::IndexOutOfRange(format!("x = {x} below level {}", self.config.n)))
    }

    /// `P_k` for `k/2^n`.
    pub fn p_at(&self, k: u64) -> &Point {
        &self.p[k as usize]
    }

    pub fn p_point(&self, x: DyadicIndex) -> Result<&Point> {
        let k = self.top_numerator(x)?;
        Ok(&self.p[k as usize])
    }

    pub fn k0_at(&self, k: u64) -> Result<&Circle> {
        self.k0
            .get(k as usize)
            .and_then(|c| c.as_ref())
            .ok_or_else(|| KakeyaError::IndexOutOfRange(format!("K0 at {k}/2^{}", self.config.n)))
    }

    pub fn k1_at(&self, k: u64) -> Result<&Circle> {
        self.k1
            .get(k as usize)
            .and_then(|c| c.as_ref())
            .ok_or_else(|| KakeyaError::IndexOutOfRange(format!("K1 at {k}/2^{}", self.config.n)))
    }

    pub fn k0(&self, x: DyadicIndex) -> Result<&Circle> {
        self.k0_at(self.top_numerator(x)?)
    }

    pub fn k1(&self, x: DyadicIndex) -> Result<&Circle> {
        self.k1_at(self.top_numerator(x)?)
    }

    /// `C_i^{k/2^i}`.
    pub fn c_at(&self, i: u32, k: u64) -> Result<&Point> {
        self.c
            .get(i as usize)
            .and_then(|row| row.get(k as usize))
            .ok_or_else(|| KakeyaError::IndexOutOfRange(format!("C_{i} at {k}/2^{i}")))
    }

    pub fn c_point(&self, i: u32, x: DyadicIndex) -> Result<&Point> {
        let k = x.at_level(i).ok_or_else(|| KakeyaError::IndexOutOfRange(format!("x = {x} not in D_{i}")))?;
        self.c_at(i, k)
    }

    /// Replaces a circle centre. Meant for diagnostics and fault injection.
    pub fn displace_center(&mut self, family: CircleFamily, k: u64, offset: &Point) -> Result<()> {
        let slot = match family {
            CircleFamily::K0 => self.k0.get_mut(k as usize),
            CircleFamily::K1 => self.k1.get_mut(k as usize),
        };
        let circle = slot.and_then(|c| c.as_mut()).ok_or_else(|| KakeyaError::IndexOutOfRange(format!("{family:?} at {k}")))?;
        circle.center = circle.center.add(offset);
        Ok(())
    }

    /// All circles of level `i`: `(k at level n, family, circle)`.
    pub fn level_circles(&self, i: u32) -> Vec<(u64, CircleFamily, &Circle)> {
        let n = self.config.n;
        let step = 1u64 << (n - i);
        let mut out = Vec::new();
        for k in 0..(1u64 << i) {
            if let Ok(c) = self.k0_at(k * step) {
                out.push((k * step, CircleFamily::K0, c));
            }
            if let Ok(c) = self.k1_at((k + 1) * step) {
                out.push(((k + 1) * step, CircleFamily::K1, c));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let n = self.config.n;
        let pt = |p: &Point| serde_json::json!([p.x.to_decimal_string(), p.y.to_decimal_string()]);
        let circ = |c: &Circle| {
            serde_json::json!({"center": pt(&c.center), "radius": c.radius.to_decimal_string()})
        };
        let mut cmap = BTreeMap::new();
        for (i, row) in self.c.iter().enumerate() {
            for (k, p) in row.iter().enumerate() {
                cmap.insert(format!("{i}/{k}"), pt(p));
            }
        }
        let mut k0 = BTreeMap::new();
        let mut k1 = BTreeMap::new();
        for k in 0..=(1u64 << n) {
            let key = DyadicIndex { level: n, numerator: k }.to_string();
            if let Ok(c) = self.k0_at(k) {
                k0.insert(key.clone(), circ(c));
            }
            if let Ok(c) = self.k1_at(k) {
                k1.insert(key, circ(c));
            }
        }
        let a: Vec<_> = self.rings.iter().map(|r| serde_json::json!({"i": r.index, "A0": pt(&r.a0), "A1": pt(&r.a1)})).collect();
        let p: Vec<_> = self.p.iter().map(pt).collect();
        serde_json::json!({
            "config": self.config,
            "built_level": self.built_level,
            "points": {
                "M": pt(&self.frame.m),
                "N": pt(&self.frame.n_point),
                "O": pt(&self.frame.origin),
                "A": a,
                "P": p,
                "C": cmap,
            },
            "circles": {"K0": k0, "K1": k1},
        })
    }
}

fn fail(scene: &SproutScene, level: u32, x: DyadicIndex, invariant: &str) -> KakeyaError {
    KakeyaError::ConstructionFailed {
        level,
        x: x.to_string(),
        invariant: invariant.to_string(),
        partial: Box::new(scene.clone()),
    }
}

/// Builds the full configuration for levels `0..=n`.
pub fn build_scene(cfg: &SproutConfig) -> Result<SproutScene> {
    cfg.validate()?;
    let cfg = cfg.normalized();
    let prec = cfg.precision;
    let n = cfg.n;
    let tol = prec.tolerance();
    let frame = LuneFrame::new(&cfg.h, &cfg.eps);

    let rings = (0..=n)
        .map(|i| {
            let r = if n == 0 { Scalar::zero(prec) } else { &cfg.r * &Scalar::from_i64(i as i64, prec) / &Scalar::from_i64(n as i64, prec) };
            Ring::build(&frame, i, r)
        })
        .collect();

    let top = 1u64 << n;
    let p0 = frame.p0();
    let p = (0..=top)
        .map(|k| {
            let x = DyadicIndex { level: n, numerator: k }.value(prec);
            rotate_point(&p0, &frame.m, &(&cfg.h * &x))
        })
        .collect();

    let mut k0 = vec![None; (top + 1) as usize];
    let mut k1 = vec![None; (top + 1) as usize];
    k0[0] = Some(frame.k0.clone());
    k1[top as usize] = Some(frame.k1.clone());

    let mut scene = SproutScene {
        config: cfg,
        frame,
        rings,
        p,
        k0,
        k1,
        c: vec![vec![Point::origin(prec)]],
        built_level: 0,
    };

    for i in 0..n {
        let step = 1u64 << (n - i);
        let half = step / 2;
        let ring = scene.rings[(i + 1) as usize].clone();
        let mut row = vec![Point::origin(prec); 1usize << (i + 1)];
        for k in 0..(1u64 << i) {
            let x = DyadicIndex { level: i, numerator: k };
            let c = ring.intersect(scene.k0_at(k * step)?).ok_or_else(|| fail(&scene, i + 1, x, "e6"))?;
            row[(2 * k) as usize] = c;
            let x1 = DyadicIndex { level: i, numerator: k + 1 };
            let c = ring.intersect(scene.k1_at((k + 1) * step)?).ok_or_else(|| fail(&scene, i + 1, x1, "e6"))?;
            row[(2 * k + 1) as usize] = c;
        }
        if scene.config.strict {
            for (j, c) in row.iter().enumerate() {
                if ring.deviation(c) > tol {
                    return Err(fail(&scene, i + 1, DyadicIndex { level: i + 1, numerator: j as u64 }, "e2"));
                }
            }
        }
        for k in 0..(1u64 << i) {
            let xk = k * step;
            // K1^{x + 2^{-i-1}} from K0^x about C_{i+1}^x
            let pivot = &row[(2 * k) as usize];
            let target = scene.p[(xk + half) as usize].clone();
            let (kn, _) = rotate_circle_to_contain(scene.k0_at(xk)?, pivot, &target, Sense::Positive)
                .map_err(|_| fail(&scene, i + 1, DyadicIndex { level: i + 1, numerator: 2 * k + 1 }, "rotation"))?;
            scene.k1[(xk + half) as usize] = Some(kn);
            // K0^{x' - 2^{-i-1}} from K1^{x'} about C_{i+1}^{x' - 2^{-i-1}}, x' = x + 2^{-i}
            let pivot = &row[(2 * k + 1) as usize];
            let target = scene.p[(xk + half) as usize].clone();
            let (kn, _) = rotate_circle_to_contain(scene.k1_at(xk + step)?, pivot, &target, Sense::Negative)
                .map_err(|_| fail(&scene, i + 1, DyadicIndex { level: i + 1, numerator: 2 * k + 1 }, "rotation"))?;
            scene.k0[(xk + half) as usize] = Some(kn);
        }
        scene.c.push(row);
        scene.built_level = i + 1;
        let (worst, at) = membership_residual(&scene, i + 1);
        if worst > tol {
            return Err(fail(&scene, i + 1, at, "e3/e4"));
        }
    }

    if scene.config.strict {
        for r in check_invariants(&scene) {
            if r.hypotheses_met && !r.pass {
                let level = r.lemma_id.rsplit(':').next().and_then(|s| s.parse().ok()).unwrap_or(n);
                return Err(fail(&scene, level, DyadicIndex::zero(), &r.lemma_id));
            }
        }
    }
    Ok(scene)
}

/// Largest (e3)/(e4) residual at level `i`, with its location.
fn membership_residual(scene: &SproutScene, i: u32) -> (Scalar, DyadicIndex) {
    let n = scene.config.n;
    let step = 1u64 << (n - i);
    let mut worst = Scalar::zero(scene.precision());
    let mut at = DyadicIndex::zero();
    let mut consider = |r: Scalar, k: u64| {
        if r > worst {
            worst = r;
            at = DyadicIndex { level: i, numerator: k };
        }
    };
    for k in 0..(1u64 << i) {
        if let (Ok(c), Ok(cp)) = (scene.k0_at(k * step), scene.c_at(i, k)) {
            consider(c.signed_distance(&scene.p[(k * step) as usize]).abs(), k);
            consider(c.signed_distance(cp).abs(), k);
        }
        let k1 = k + 1;
        if let (Ok(c), Ok(cp)) = (scene.k1_at(k1 * step), scene.c_at(i, k)) {
            consider(c.signed_distance(&scene.p[(k1 * step) as usize]).abs(), k1);
            consider(c.signed_distance(cp).abs(), k1);
        }
    }
    (worst, at)
}

/// One report per invariant family and level, plus the global centre bound.
pub fn check_invariants(scene: &SproutScene) -> Vec<LemmaReport> {
    let prec = scene.precision();
    let tol = scene.tolerance();
    let cfg = &scene.config;
    let lemma_scope = cfg.strict;
    let origin = &scene.frame.origin;
    let h = &cfg.h;
    let he_sqrt = (h * &cfg.eps).sqrt();
    let mut out = Vec::new();
    let mut max_center = Scalar::zero(prec);

    for i in 0..=scene.built_level {
        let n = cfg.n;
        let step = 1u64 << (n - i);

        let mut r = LemmaReport::new(format!("e2:{i}"), lemma_scope);
        let mut dev = Scalar::zero(prec);
        if let Some(row) = scene.c.get(i as usize) {
            let ring = &scene.rings[i as usize];
            for c in row {
                dev = dev.max(ring.deviation(c));
            }
        }
        r.at_most("ring_deviation", dev, tol.clone());
        out.push(r);

        let mut r = LemmaReport::new(format!("e3_e4:{i}"), true);
        let (res, _) = membership_residual(scene, i);
        r.at_most("membership_residual", res, tol.clone());
        out.push(r);

        let mut bound = h.clone();
        let mut sum = Scalar::zero(prec);
        for j in 0..i {
            sum = sum + Scalar::pow2(-(j as i32), prec).sqrt();
        }
        bound = bound + &(&he_sqrt * 3.0) * &sum;
        let mut off = Scalar::zero(prec);
        for (_, _, c) in scene.level_circles(i) {
            off = off.max(c.center.dist(origin));
        }
        max_center = max_center.max(off.clone());
        let mut r = LemmaReport::new(format!("e5:{i}"), lemma_scope);
        r.less("center_offset", off, bound);
        out.push(r);

        let mut gap = Scalar::zero(prec);
        for (_, _, circle) in scene.level_circles(i) {
            for j in i..=n {
                let ring = &scene.rings[j as usize];
                let g = match ring.arc {
                    None => circle.signed_distance(&ring.a0).abs(),
                    Some(_) => match circle_circle_intersection(circle, ring.circle().expect("ring arc")) {
                        Ok(pts) if !pts.is_empty() => pts.iter().map(|p| ring.deviation(p)).fold(None, |acc: Option<Scalar>, d| {
                            Some(match acc {
                                None => d,
                                Some(a) => a.min(d),
                            })
                        }).expect("nonempty"),
                        _ => Scalar::one(prec),
                    },
                };
                gap = gap.max(g);
            }
        }
        // the ring lists reach level n only once the scene is complete
        let mut r = LemmaReport::new(format!("e6:{i}"), lemma_scope && scene.is_complete());
        r.at_most("ring_miss", gap, tol.clone());
        out.push(r);
        let _ = step;
    }

    let mut r = LemmaReport::new("e14".to_string(), lemma_scope);
    let ten = &he_sqrt * 10.0;
    r.less("center_offset", max_center, ten.clone());
    r.less("ten_sqrt_h_eps", ten, cfg.eps.clone());
    out.push(r);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_canonical_and_levels() {
        let d = DyadicIndex::new(4, 8).unwrap();
        assert_eq!(d.canonical(), DyadicIndex { level: 1, numerator: 1 });
        assert_eq!(d.at_level(6), Some(32));
        assert_eq!(DyadicIndex::new(3, 3).unwrap().at_level(2), None);
        assert!(DyadicIndex::new(2, 5).is_err());
        assert_eq!(DyadicIndex::one().canonical(), DyadicIndex::one());
        assert_eq!(DyadicIndex::new(3, 6).unwrap().to_string(), "3/4");
    }

    #[test]
    fn frame_basics() {
        let cfg = SproutConfig::relaxed_reference(1);
        let f = LuneFrame::new(&cfg.h, &cfg.eps);
        let tol = Scalar::Hw(1e-12);
        assert!(f.k0.contains_point(&f.m, &tol));
        assert!(f.k1.contains_point(&f.m, &tol));
        assert!(f.k0.contains_point(&f.n_point, &tol));
        assert!(f.k0.contains_point(&f.p0(), &tol));
        assert!(f.k1.contains_point(&f.p1(), &tol));
        assert!(f.in_l0(&f.p_arc.circle.point_at(&(&f.p_arc.start_angle + &f.p_arc.sweep.half())), &tol));
        let mn = f.m.dist(&f.n_point).to_f64();
        assert!(mn > 2.0 - 1e-3);
        assert!((f.p_arc.length().to_f64() - 1e-3 * 0.05).abs() < 1e-18);
    }

    #[test]
    fn strict_gate() {
        let bad = SproutConfig::from_decimal("1e-9", "1e-5", 2, Precision::Big(128), true).unwrap();
        assert!(matches!(build_scene(&bad), Err(KakeyaError::HypothesesViolated(_))));
        let bad = SproutConfig::from_decimal("1e-8", "9e-7", 2, Precision::Big(128), true).unwrap();
        assert!(matches!(build_scene(&bad), Err(KakeyaError::HypothesesViolated(_))));
    }

    #[test]
    fn level_zero_scene() {
        let s = build_scene(&SproutConfig::strict_reference(0)).unwrap();
        assert!(s.c_at(0, 0).unwrap().approx_eq(s.m(), &s.tolerance()));
        assert!(s.k0_at(0).is_ok() && s.k1_at(1).is_ok());
        assert!(check_invariants(&s).iter().all(|r| r.pass));
    }

    #[test]
    fn one_level_strict() {
        let s = build_scene(&SproutConfig::strict_reference(1)).unwrap();
        let tol = s.tolerance();
        let half = DyadicIndex::new(1, 1).unwrap();
        let p = s.p_point(half).unwrap();
        assert!(s.k0(half).unwrap().contains_point(p, &tol));
        assert!(s.k1(half).unwrap().contains_point(p, &tol));
        let eps = &s.config().eps;
        for c in [s.k0(half).unwrap(), s.k1(half).unwrap()] {
            assert!(c.center.dist(&s.frame().origin) < *eps);
        }
        assert!(s.c_at(1, 0).unwrap().approx_eq(&s.ring(1).unwrap().a0, &tol));
        assert!(s.c_at(1, 1).unwrap().approx_eq(&s.ring(1).unwrap().a1, &tol));
    }

    #[test]
    fn relaxed_scene_is_gated() {
        let s = build_scene(&SproutConfig::relaxed_reference(4)).unwrap();
        for r in check_invariants(&s) {
            if r.lemma_id.starts_with("e3_e4") {
                assert!(r.pass, "{r:?}");
            } else {
                assert!(!r.hypotheses_met);
            }
        }
    }

    #[test]
    fn displaced_center_fails_e14() {
        let mut s = build_scene(&SproutConfig::strict_reference(3)).unwrap();
        let eps2 = &s.config().eps * 2.0;
        let off = Point::new(eps2, Scalar::zero(s.precision()));
        s.displace_center(CircleFamily::K0, 4, &off).unwrap();
        let reports = check_invariants(&s);
        let e14 = reports.iter().find(|r| r.lemma_id == "e14").unwrap();
        assert!(e14.hypotheses_met && !e14.pass);
    }
}
