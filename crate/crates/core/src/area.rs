//! Area of swept sets: analytic horn sums, Monte-Carlo unions, and the
//! measure of `T_n \ Delta(h)`.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{KakeyaError, Result};
use crate::geometry::Point;
use crate::lemmas::{compute_v, junction_constant, n0};
use crate::motion::{MotionPlan, StepKind};
use crate::scalar::Scalar;
use crate::sprouting::{build_scene, SproutConfig, SproutScene};

/// Samples per deterministic substream.
pub const SHARD_SIZE: u64 = 1 << 16;
pub const MIN_SAMPLES: u64 = 1000;
const PHI_BINS: usize = 1024;
const GRID: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AreaMethod {
    AnalyticSum,
    McUnion,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AreaEstimate {
    pub value: Scalar,
    pub stderr: Scalar,
    pub samples: u64,
    pub method: AreaMethod,
    pub seed: u64,
}

impl AreaEstimate {
    pub fn analytic(value: Scalar) -> AreaEstimate {
        let prec = value.precision();
        AreaEstimate { value, stderr: Scalar::zero(prec), samples: 0, method: AreaMethod::AnalyticSum, seed: 0 }
    }

    fn mc(hits: u64, samples: u64, region: f64, seed: u64) -> AreaEstimate {
        let n = samples as f64;
        let p = hits as f64 / n;
        let var = (p * (1.0 - p)).max(1.0 / n);
        AreaEstimate {
            value: Scalar::Hw(p * region),
            stderr: Scalar::Hw(region * (var / n).sqrt()),
            samples,
            method: AreaMethod::McUnion,
            seed,
        }
    }
}

/// Runs `f` on a pool sized by `KAKEYA_WORKERS`, or the default pool.
pub fn with_workers<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let workers = std::env::var("KAKEYA_WORKERS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&w| w > 0);
    match workers.and_then(|w| rayon::ThreadPoolBuilder::new().num_threads(w).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

/// Counts hits over `samples` draws; shard `s` uses ChaCha stream `s` of `seed`.
fn count_hits(samples: u64, seed: u64, hit: impl Fn(&mut ChaCha8Rng) -> bool + Sync) -> u64 {
    let shards = samples.div_ceil(SHARD_SIZE);
    with_workers(|| {
        (0..shards)
            .into_par_iter()
            .map(|s| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(s);
                let len = SHARD_SIZE.min(samples - s * SHARD_SIZE);
                (0..len).filter(|_| hit(&mut rng)).count() as u64
            })
            .sum()
    })
}

/// Sum of the per-pivot horn areas.
pub fn swept_area_upper_bound(plan: &MotionPlan) -> AreaEstimate {
    let v = plan.steps.iter().filter(|s| s.is_pivot()).fold(Scalar::zero(plan.precision), |acc, s| acc + &s.swept_bound);
    AreaEstimate::analytic(v)
}

/// Total length of circle arcs traced during slides.
pub fn touched_curve_length(plan: &MotionPlan) -> Scalar {
    plan.steps
        .iter()
        .filter(|s| !s.is_pivot())
        .fold(Scalar::zero(plan.precision), |acc, s| acc + &(s.angle().abs() * &s.start_pose.circle().radius))
}

/// Region swept by rotating an arc about one of its endpoints, in f64.
#[derive(Clone, Debug)]
pub struct PivotHorn {
    a: [f64; 2],
    rho: f64,
    tangent: f64,
    turn: f64,
    chord: f64,
    theta: f64,
}

impl PivotHorn {
    /// `center_is_start` selects which endpoint of the arc is the pivot.
    pub fn new(arc_center: [f64; 2], rho: f64, start: [f64; 2], end: [f64; 2], sweep: f64, center_is_start: bool, theta: f64) -> PivotHorn {
        let (a, other) = if center_is_start { (start, end) } else { (end, start) };
        // direction of travel along the arc, leaving the pivot
        let turn = if center_is_start { sweep.signum() } else { -sweep.signum() };
        let (rx, ry) = (a[0] - arc_center[0], a[1] - arc_center[1]);
        let tangent = (turn * rx).atan2(-turn * ry);
        let chord = ((other[0] - a[0]).powi(2) + (other[1] - a[1]).powi(2)).sqrt();
        PivotHorn { a, rho, tangent, turn, chord, theta }
    }

    pub fn area(&self) -> f64 {
        self.chord * self.chord * self.theta.abs() / 2.0
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let (dx, dy) = (p[0] - self.a[0], p[1] - self.a[1]);
        let r2 = dx * dx + dy * dy;
        if r2 > self.chord * self.chord {
            return false;
        }
        let r = r2.sqrt();
        let phi = self.tangent + self.turn * (r / (2.0 * self.rho)).min(1.0).asin();
        let psi = dy.atan2(dx);
        if self.theta >= 0.0 {
            (psi - phi).rem_euclid(TAU) <= self.theta
        } else {
            (phi - psi).rem_euclid(TAU) <= -self.theta
        }
    }

    /// Box `[xmin, ymin, xmax, ymax]`.
    pub fn bbox(&self) -> [f64; 4] {
        let c = self.chord;
        [self.a[0] - c, self.a[1] - c, self.a[0] + c, self.a[1] + c]
    }
}

#[derive(Clone, Debug)]
struct SlideTube {
    center: [f64; 2],
    rho: f64,
    from: f64,
    sweep: f64,
    tol: f64,
}

impl SlideTube {
    fn contains(&self, p: [f64; 2]) -> bool {
        let (dx, dy) = (p[0] - self.center[0], p[1] - self.center[1]);
        let d = (dx * dx + dy * dy).sqrt();
        if (d - self.rho).abs() > self.tol {
            return false;
        }
        (dy.atan2(dx) - self.from).rem_euclid(TAU) <= self.sweep + self.tol / self.rho
    }
}

enum Piece {
    Horn(PivotHorn),
    Tube(SlideTube),
}

impl Piece {
    fn contains(&self, p: [f64; 2]) -> bool {
        match self {
            Piece::Horn(h) => h.contains(p),
            Piece::Tube(t) => t.contains(p),
        }
    }
}

fn pieces_of(plan: &MotionPlan) -> Vec<(Piece, Vec<[f64; 2]>, f64)> {
    let tol = plan.precision.tolerance().to_f64().max(1e-15);
    let mut out = Vec::new();
    for s in &plan.steps {
        let pose = &s.start_pose;
        let arc = &pose.arc;
        let c = arc.circle.center.to_f64();
        let rho = arc.circle.radius.to_f64();
        let start = pose.start().to_f64();
        let end = pose.end().to_f64();
        let a0 = arc.start_angle.to_f64();
        let sw = arc.sweep.to_f64();
        let theta = s.angle().to_f64();
        // points along the arc, used to mark grid cells
        let m = 64usize;
        let trace: Vec<[f64; 2]> = (0..=m)
            .map(|j| {
                let t = a0 + sw * j as f64 / m as f64;
                [c[0] + rho * t.cos(), c[1] + rho * t.sin()]
            })
            .collect();
        match &s.kind {
            StepKind::Pivot { center, .. } => {
                let p = center.to_f64();
                let ds = (p[0] - start[0]).hypot(p[1] - start[1]);
                let de = (p[0] - end[0]).hypot(p[1] - end[1]);
                let h = PivotHorn::new(c, rho, start, end, sw, ds <= de, theta);
                let reach = h.chord * theta.abs();
                out.push((Piece::Horn(h), trace, reach));
            }
            StepKind::Slide { .. } => {
                let (from, sweep) = if theta >= 0.0 { (a0, sw + theta) } else { (a0 + theta, sw - theta) };
                let k = 64usize;
                let trace: Vec<[f64; 2]> = (0..=k)
                    .map(|j| {
                        let t = from + sweep * j as f64 / k as f64;
                        [c[0] + rho * t.cos(), c[1] + rho * t.sin()]
                    })
                    .collect();
                out.push((Piece::Tube(SlideTube { center: c, rho, from, sweep, tol }), trace, tol));
            }
        }
    }
    out
}

struct Grid {
    x0: f64,
    y0: f64,
    cell: f64,
    n: usize,
    start: Vec<u32>,
    items: Vec<u32>,
}

impl Grid {
    fn cell_of(&self, p: [f64; 2]) -> Option<usize> {
        let i = ((p[0] - self.x0) / self.cell).floor();
        let j = ((p[1] - self.y0) / self.cell).floor();
        if i < 0.0 || j < 0.0 || i >= self.n as f64 || j >= self.n as f64 {
            return None;
        }
        Some(j as usize * self.n + i as usize)
    }

    fn candidates(&self, cell: usize) -> &[u32] {
        &self.items[self.start[cell] as usize..self.start[cell + 1] as usize]
    }
}

/// Cell indices of an `n` by `n` grid with corner `(x0, y0)` near a traced curve.
fn cells_near(trace: &[[f64; 2]], reach: f64, bbox: [f64; 4], grid: (f64, f64, f64, usize), out: &mut Vec<usize>) {
    let (x0, y0, cell, n) = grid;
    let side = (bbox[2] - bbox[0]).max(bbox[3] - bbox[1]);
    let clamp = |v: f64| v.max(0.0).min((n - 1) as f64) as usize;
    if reach > 0.25 * side || reach > 8.0 * cell {
        let (i0, i1) = (clamp(((bbox[0] - x0) / cell).floor()), clamp(((bbox[2] - x0) / cell).floor()));
        let (j0, j1) = (clamp(((bbox[1] - y0) / cell).floor()), clamp(((bbox[3] - y0) / cell).floor()));
        for j in j0..=j1 {
            for i in i0..=i1 {
                out.push(j * n + i);
            }
        }
        return;
    }
    let rad = reach + cell * std::f64::consts::SQRT_2;
    // densify the trace so consecutive points are within one cell
    for w in trace.windows(2) {
        let len = (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
        let k = (len / cell).ceil().max(1.0) as usize;
        for s in 0..=k {
            let t = s as f64 / k as f64;
            let p = [w[0][0] + t * (w[1][0] - w[0][0]), w[0][1] + t * (w[1][1] - w[0][1])];
            let (i0, i1) = (clamp(((p[0] - rad - x0) / cell).floor()), clamp(((p[0] + rad - x0) / cell).floor()));
            let (j0, j1) = (clamp(((p[1] - rad - y0) / cell).floor()), clamp(((p[1] + rad - y0) / cell).floor()));
            for j in j0..=j1 {
                for i in i0..=i1 {
                    out.push(j * n + i);
                }
            }
        }
    }
}

/// Monte-Carlo estimate of the union of all pivot horns and slide arcs.
pub fn monte_carlo_swept_area(plan: &MotionPlan, samples: u64, seed: u64) -> Result<AreaEstimate> {
    if samples < MIN_SAMPLES {
        return Err(KakeyaError::OutOfRange(format!("need at least {MIN_SAMPLES} samples")));
    }
    let pieces = pieces_of(plan);
    if pieces.is_empty() {
        return Ok(AreaEstimate::mc(0, samples, 0.0, seed));
    }
    let mut bb = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
    let mut boxes = Vec::with_capacity(pieces.len());
    for (p, trace, reach) in &pieces {
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for q in trace {
            b = [b[0].min(q[0]), b[1].min(q[1]), b[2].max(q[0]), b[3].max(q[1])];
        }
        b = [b[0] - reach, b[1] - reach, b[2] + reach, b[3] + reach];
        if let Piece::Horn(h) = p {
            let d = h.bbox();
            b = [b[0].max(d[0]), b[1].max(d[1]), b[2].min(d[2]), b[3].min(d[3])];
        }
        bb = [bb[0].min(b[0]), bb[1].min(b[1]), bb[2].max(b[2]), bb[3].max(b[3])];
        boxes.push(b);
    }
    let tol = plan.precision.tolerance().to_f64().max(1e-15);
    bb = [bb[0] - tol, bb[1] - tol, bb[2] + tol, bb[3] + tol];
    let side = (bb[2] - bb[0]).max(bb[3] - bb[1]);
    let cell = side / GRID as f64;
    let mut counts = vec![0u32; GRID * GRID + 1];
    let mut lists: Vec<Vec<usize>> = Vec::with_capacity(pieces.len());
    for (idx, (_, trace, reach)) in pieces.iter().enumerate() {
        let mut cells = Vec::new();
        cells_near(trace, *reach, boxes[idx], (bb[0], bb[1], cell, GRID), &mut cells);
        cells.sort_unstable();
        cells.dedup();
        for &c in &cells {
            counts[c] += 1;
        }
        lists.push(cells);
    }
    let mut start = vec![0u32; GRID * GRID + 1];
    for c in 0..GRID * GRID {
        start[c + 1] = start[c] + counts[c];
    }
    let mut fill = start.clone();
    let mut items = vec![0u32; start[GRID * GRID] as usize];
    for (idx, cells) in lists.iter().enumerate() {
        for &c in cells {
            items[fill[c] as usize] = idx as u32;
            fill[c] += 1;
        }
    }
    let grid = Grid { x0: bb[0], y0: bb[1], cell, n: GRID, start, items };
    let (w, h) = (bb[2] - bb[0], bb[3] - bb[1]);
    let hits = count_hits(samples, seed, |rng| {
        let p = [bb[0] + w * rng.random::<f64>(), bb[1] + h * rng.random::<f64>()];
        match grid.cell_of(p) {
            Some(c) => grid.candidates(c).iter().any(|&i| pieces[i as usize].0.contains(p)),
            None => false,
        }
    });
    Ok(AreaEstimate::mc(hits, samples, w * h, seed))
}

/// `H_n^x` in f64: inside `K0^x` (centre `a`), outside `K1^{x+2^-n}` (centre `b`).
#[derive(Clone, Copy, Debug)]
struct TnHorn {
    a: [f64; 2],
    b: [f64; 2],
}

fn d2(p: [f64; 2], q: [f64; 2]) -> f64 {
    let (dx, dy) = (p[0] - q[0], p[1] - q[1]);
    dx * dx + dy * dy
}

/// The f64 membership tests used for `T_n` sampling.
#[derive(Clone, Debug)]
pub struct TnKernel {
    horns: Vec<TnHorn>,
    o0: [f64; 2],
    o1: [f64; 2],
    eps2: f64,
}

impl TnKernel {
    pub fn from_scene(scene: &SproutScene) -> Result<TnKernel> {
        let n = scene.n();
        let mut horns = Vec::with_capacity(1 << n);
        for k in 0..(1u64 << n) {
            horns.push(TnHorn { a: scene.k0_at(k)?.center.to_f64(), b: scene.k1_at(k + 1)?.center.to_f64() });
        }
        let f = scene.frame();
        let e = f.eps.to_f64();
        Ok(TnKernel { horns, o0: f.k0.center.to_f64(), o1: f.k1.center.to_f64(), eps2: e * e })
    }

    pub fn len(&self) -> usize {
        self.horns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.horns.is_empty()
    }

    pub fn in_horn(&self, k: usize, p: [f64; 2]) -> bool {
        let h = &self.horns[k];
        d2(p, h.a) <= 1.0 && d2(p, h.b) >= 1.0 && (p[0] > 0.0 || p[0] * p[0] + p[1] * p[1] <= self.eps2)
    }

    pub fn in_delta(&self, p: [f64; 2]) -> bool {
        d2(p, self.o0) <= 1.0 && d2(p, self.o1) >= 1.0 && p[0] * p[0] + p[1] * p[1] <= self.eps2
    }
}

fn rho_of(d: [f64; 2], phi: f64) -> f64 {
    let (c, s) = (phi.cos(), phi.sin());
    let du = d[0] * c + d[1] * s;
    du + (1.0 - (d[0] * d[0] + d[1] * d[1]) + du * du).max(0.0).sqrt()
}

/// Min and max of `rho_of(d, .)` over `[f0, f1]`.
fn rho_range(d: [f64; 2], f0: f64, f1: f64) -> (f64, f64) {
    let mut lo = rho_of(d, f0).min(rho_of(d, f1));
    let mut hi = rho_of(d, f0).max(rho_of(d, f1));
    let ad = d[1].atan2(d[0]);
    for (ext, is_max) in [(ad, true), (ad + PI, false)] {
        let t = f0 + (ext - f0).rem_euclid(TAU);
        if t <= f1 {
            let v = rho_of(d, t);
            if is_max {
                hi = hi.max(v);
            } else {
                lo = lo.min(v);
            }
        }
    }
    (lo, hi)
}

fn down32(v: f64) -> f32 {
    let f = v as f32;
    if (f as f64) > v { f.next_down() } else { f }
}

fn up32(v: f64) -> f32 {
    let f = v as f32;
    if (f as f64) < v { f.next_up() } else { f }
}

struct Bin {
    /// `(rho_lo - 1, rho_hi - 1, horn)`, sorted by the first entry.
    entries: Vec<(f32, f32, u32)>,
    width: f32,
    lo: f64,
    hi: f64,
}

/// Polar bins about O holding per-horn radial intervals.
struct TnIndex {
    o: [f64; 2],
    phi0: f64,
    dphi: f64,
    bins: Vec<Bin>,
    cum: Vec<f64>,
    area: f64,
}

impl TnIndex {
    fn build(scene: &SproutScene, kernel: &TnKernel) -> Result<TnIndex> {
        let n = scene.n();
        let f = scene.frame();
        let o = f.origin.to_f64();
        let phi = |p: &Point| {
            let q = p.to_f64();
            (q[1] - o[1]).atan2(q[0] - o[0])
        };
        let margin = 1e-9;
        let mut ranges = Vec::with_capacity(kernel.len());
        for k in 0..(1u64 << n) {
            let lo = phi(scene.c_at(n, k)?) - margin;
            let hi = phi(scene.p_at(k)).max(phi(scene.p_at(k + 1))).max(phi(&f.m)) + margin;
            ranges.push((lo, hi));
        }
        let phi0 = ranges.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
        let phi1 = ranges.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
        let dphi = (phi1 - phi0) / PHI_BINS as f64;
        let slack = 1e-12;
        let rel = |p: [f64; 2]| [p[0] - o[0], p[1] - o[1]];
        let bins: Vec<Bin> = (0..PHI_BINS)
            .into_par_iter()
            .map(|b| {
                let (g0, g1) = (phi0 + b as f64 * dphi, phi0 + (b + 1) as f64 * dphi);
                let mut entries = Vec::new();
                for (k, h) in kernel.horns.iter().enumerate() {
                    let (f0, f1) = (g0.max(ranges[k].0), g1.min(ranges[k].1));
                    if f0 > f1 {
                        continue;
                    }
                    let (lo, _) = rho_range(rel(h.b), f0, f1);
                    let (_, hi) = rho_range(rel(h.a), f0, f1);
                    if lo - slack > hi + slack {
                        continue;
                    }
                    entries.push((down32(lo - slack - 1.0), up32(hi + slack - 1.0), k as u32));
                }
                entries.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.2.cmp(&y.2)));
                let width = entries.iter().map(|e| e.1 - e.0).fold(0.0f32, f32::max);
                let lo = entries.iter().map(|e| e.0 as f64).fold(f64::INFINITY, f64::min) + 1.0;
                let hi = entries.iter().map(|e| e.1 as f64).fold(f64::NEG_INFINITY, f64::max) + 1.0;
                Bin { entries, width, lo, hi }
            })
            .collect();
        let mut cum = Vec::with_capacity(PHI_BINS);
        let mut acc = 0.0;
        for bin in &bins {
            if bin.hi > bin.lo {
                acc += dphi * (bin.hi * bin.hi - bin.lo * bin.lo) / 2.0;
            }
            cum.push(acc);
        }
        Ok(TnIndex { o, phi0, dphi, bins, cum, area: acc })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> (usize, f64, [f64; 2]) {
        let u = rng.random::<f64>() * self.area;
        let b = self.cum.partition_point(|&c| c <= u).min(self.bins.len() - 1);
        let bin = &self.bins[b];
        let r2 = bin.lo * bin.lo + rng.random::<f64>() * (bin.hi * bin.hi - bin.lo * bin.lo);
        let rho = r2.sqrt();
        let phi = self.phi0 + (b as f64 + rng.random::<f64>()) * self.dphi;
        (b, rho, [self.o[0] + rho * phi.cos(), self.o[1] + rho * phi.sin()])
    }

    fn hit(&self, kernel: &TnKernel, b: usize, rho: f64, p: [f64; 2]) -> bool {
        let bin = &self.bins[b];
        let off = (rho - 1.0) as f32;
        let top = bin.entries.partition_point(|e| e.0 <= off.next_up());
        let floor = off.next_down() - bin.width;
        bin.entries[..top].iter().rev().take_while(|e| e.0 >= floor).any(|e| e.1 >= off.next_down() && kernel.in_horn(e.2 as usize, p))
    }
}

/// Monte-Carlo measure of `T_n \ Delta(h)`; zero by definition when `n = 0`.
pub fn tn_minus_delta_area(scene: &SproutScene, samples: u64, seed: u64) -> Result<AreaEstimate> {
    if !scene.is_complete() {
        return Err(KakeyaError::SceneIncomplete);
    }
    if scene.n() == 0 {
        return Ok(AreaEstimate::analytic(Scalar::Hw(0.0)));
    }
    if samples < MIN_SAMPLES {
        return Err(KakeyaError::OutOfRange(format!("need at least {MIN_SAMPLES} samples")));
    }
    let kernel = TnKernel::from_scene(scene)?;
    let index = with_workers(|| TnIndex::build(scene, &kernel))?;
    let hits = count_hits(samples, seed, |rng| {
        let (b, rho, p) = index.sample(rng);
        !kernel.in_delta(p) && index.hit(&kernel, b, rho, p)
    });
    Ok(AreaEstimate::mc(hits, samples, index.area, seed))
}

/// Monte-Carlo area of `Delta(h)`, sampled in the M-frame scaled by `1/eps`.
pub fn delta_area(scene: &SproutScene, samples: u64, seed: u64) -> Result<AreaEstimate> {
    if samples < MIN_SAMPLES {
        return Err(KakeyaError::OutOfRange(format!("need at least {MIN_SAMPLES} samples")));
    }
    let f = scene.frame();
    let eps = f.eps.to_f64();
    let o0 = f.k0.center.to_f64();
    let o1 = f.k1.center.to_f64();
    // |p - O|^2 <= 1 with |O| = 1 is 2 p.O >= |p|^2, stable near M
    let hits = count_hits(samples, seed, |rng| {
        let q = [2.0 * rng.random::<f64>() - 1.0, 2.0 * rng.random::<f64>() - 1.0];
        let q2 = q[0] * q[0] + q[1] * q[1];
        if q2 > 1.0 {
            return false;
        }
        let p2 = eps * q2;
        let in0 = 2.0 * (q[0] * o0[0] + q[1] * o0[1]) >= p2;
        let out1 = 2.0 * (q[0] * o1[0] + q[1] * o1[1]) <= p2;
        in0 && out1
    });
    let mut est = AreaEstimate::mc(hits, samples, 4.0, seed);
    est.value = Scalar::Hw(est.value.to_f64() * eps * eps);
    est.stderr = Scalar::Hw(est.stderr.to_f64() * eps * eps);
    Ok(est)
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionBound {
    pub bound: Scalar,
    pub hypotheses_met: bool,
    pub c: Scalar,
    pub n0: Scalar,
    pub v: f64,
}

/// Analytic bound on `m(T_n \ Delta)` from the level decomposition.
pub fn decomposition_bound(scene: &SproutScene) -> DecompositionBound {
    let cfg = scene.config();
    let prec = cfg.precision;
    let n = cfg.n;
    let c = junction_constant(&cfg.h, &cfg.eps);
    let nn = n0(&cfg.h);
    let v = compute_v(cfg.eps.to_f64());
    if n == 0 {
        return DecompositionBound { bound: Scalar::zero(prec), hypotheses_met: true, c, n0: nn, v };
    }
    let nf = n as f64;
    let log = nf.log2();
    let levels = n as i64 - log.ceil() as i64;
    let nsq = Scalar::from_i64((n as i64) * (n as i64), prec);
    let pieces = &(&(&c * &c) * 20000.0) * &Scalar::from_i64(levels.max(0), prec) / &nsq;
    let radius = Scalar::from_f64(2.0 * (log + 1.0) / nf, prec);
    let disc = Scalar::pi(prec) * &(&radius * &radius);
    let ten_c = &c * 10.0;
    let other = (Scalar::one(prec) + &c) / &Scalar::from_f64(v, prec);
    let nscalar = Scalar::from_i64(n as i64, prec);
    let hypotheses_met = nscalar > ten_c && nscalar > other;
    DecompositionBound { bound: pieces + disc, hypotheses_met, c, n0: nn, v }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub n: u32,
    pub area_tn_minus_delta: AreaEstimate,
    pub analytic_bound: Scalar,
    pub bound_hypotheses_met: bool,
    pub runtime_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

pub fn convergence_study(template: &SproutConfig, n_list: &[u32], samples: u64, seed: u64) -> Result<Vec<ConvergenceRow>> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(KakeyaError::InvalidSpec("n list must be strictly ascending".into()));
    }
    let mut rows = Vec::new();
    for &n in n_list {
        let t = Instant::now();
        let cfg = SproutConfig { n, ..template.clone() };
        let row = match build_scene(&cfg).and_then(|s| Ok((tn_minus_delta_area(&s, samples, seed)?, decomposition_bound(&s)))) {
            Ok((est, bound)) => ConvergenceRow {
                n,
                area_tn_minus_delta: est,
                analytic_bound: bound.bound,
                bound_hypotheses_met: bound.hypotheses_met,
                runtime_seconds: t.elapsed().as_secs_f64(),
                failure: None,
            },
            Err(e @ KakeyaError::InvalidSpec(_)) | Err(e @ KakeyaError::HypothesesViolated(_)) => return Err(e),
            Err(e) => ConvergenceRow {
                n,
                area_tn_minus_delta: AreaEstimate::analytic(Scalar::Hw(f64::NAN)),
                analytic_bound: Scalar::Hw(f64::NAN),
                bound_hypotheses_met: false,
                runtime_seconds: t.elapsed().as_secs_f64(),
                failure: Some(e.code().to_string()),
            },
        };
        rows.push(row);
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "n,area,stderr,samples,analytic_bound,runtime_seconds";

fn sci(v: &Scalar) -> String {
    match v {
        Scalar::Hw(x) => format!("{x:e}"),
        other => other.to_decimal_string(),
    }
}

pub fn rows_to_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let line = match &r.failure {
            Some(code) => format!("{},FAILED:{code},,,,{:.3}", r.n, r.runtime_seconds),
            None => format!(
                "{},{},{},{},{},{:.3}",
                r.n,
                sci(&r.area_tn_minus_delta.value),
                sci(&r.area_tn_minus_delta.stderr),
                r.area_tn_minus_delta.samples,
                sci(&r.analytic_bound),
                r.runtime_seconds
            ),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Circle, DirectedArc};
    use crate::scalar::Precision;
    use crate::horn::horn_region;
    use crate::motion::{build_motion_plan, ArcPose, MotionStep};
    use crate::sprouting::DyadicIndex;

    fn single_pivot(chord: f64, angle: f64) -> MotionPlan {
        // unit circle arc from (1, 0) with the given chord, pivot at its start
        let prec = Precision::Hardware;
        let sweep = 2.0 * (chord / 2.0).asin();
        let arc = DirectedArc { circle: Circle::unit(Point::from_f64(0.0, 0.0, prec)), start_angle: Scalar::Hw(0.0), sweep: Scalar::Hw(sweep) };
        let pose = ArcPose::new(arc);
        let s = MotionStep::pivot(&pose, &pose.start(), Scalar::Hw(angle), None);
        MotionPlan::new(vec![s], prec)
    }

    #[test]
    fn half_disc_horn() {
        let plan = single_pivot(2.0, PI / 2.0);
        let est = monte_carlo_swept_area(&plan, 1_000_000, 42).unwrap();
        let (v, se) = (est.value.to_f64(), est.stderr.to_f64());
        assert!((v - PI).abs() < 3.0 * se, "{v} +- {se}");
        assert!((swept_area_upper_bound(&plan).value.to_f64() - PI).abs() < 1e-12);
    }

    #[test]
    fn one_pivot_half_h() {
        let plan = single_pivot(1.0, 1e-3);
        assert!((swept_area_upper_bound(&plan).value.to_f64() - 5e-4).abs() < 1e-15);
    }

    #[test]
    fn empty_and_slides() {
        let plan = MotionPlan::empty(Precision::Hardware);
        assert_eq!(monte_carlo_swept_area(&plan, 1000, 1).unwrap().value.to_f64(), 0.0);
        assert_eq!(swept_area_upper_bound(&plan).value.to_f64(), 0.0);
        let arc = DirectedArc { circle: Circle::unit(Point::from_f64(0.0, 0.0, Precision::Hardware)), start_angle: Scalar::Hw(0.0), sweep: Scalar::Hw(1.0) };
        let s = MotionStep::slide(&ArcPose::new(arc), Scalar::Hw(0.5), None);
        let plan = MotionPlan::new(vec![s], Precision::Hardware);
        assert_eq!(swept_area_upper_bound(&plan).value.to_f64(), 0.0);
        assert!((touched_curve_length(&plan).to_f64() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn disjoint_horns_add() {
        let a = single_pivot(1.0, 0.8);
        let x = |a: f64, b: f64| Point::from_f64(a, b, Precision::Hardware);
        let shift = crate::geometry::Isometry::from_frames(&x(0.0, 0.0), &x(1.0, 0.0), &x(4.0, 0.0), &x(1.0, 0.0), false);
        let b = a.transformed(&shift);
        let mut steps = a.steps.clone();
        steps.extend(b.steps.clone());
        let plan = MotionPlan::new(steps, Precision::Hardware);
        let est = monte_carlo_swept_area(&plan, 1_000_000, 9).unwrap();
        let want = 2.0 * swept_area_upper_bound(&a).value.to_f64();
        assert!((est.value.to_f64() - want).abs() < 3.0 * est.stderr.to_f64(), "{:?}", est);
    }

    #[test]
    fn pivot_horn_matches_polar_oracle() {
        // area of the swept set from a radial integral: theta * chord^2 / 2
        for &(chord, theta) in &[(0.5, 0.3), (1.2, -0.7), (1.9, 2.5)] {
            let plan = single_pivot(chord, theta);
            let est = monte_carlo_swept_area(&plan, 400_000, 5).unwrap();
            let want = chord * chord * f64::abs(theta) / 2.0;
            assert!((est.value.to_f64() - want).abs() < 3.5 * est.stderr.to_f64(), "{chord} {theta} {est:?}");
        }
    }

    #[test]
    fn tn_kernel_matches_horn_regions() {
        let scene = build_scene(&SproutConfig::relaxed_reference(3)).unwrap();
        let kernel = TnKernel::from_scene(&scene).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut inside = 0;
        for k in 0..8u64 {
            let region = horn_region(&scene, 3, DyadicIndex::new(3, k).unwrap()).unwrap();
            let a = &region.arcs[0];
            for _ in 0..300 {
                // points near the first boundary arc, on both sides
                let t = rng.random::<f64>();
                let q = a.circle.point_at(&(&a.start_angle + &(&a.sweep * t))).to_f64();
                let off = (rng.random::<f64>() - 0.5) * 4e-5;
                let c = a.circle.center.to_f64();
                let (dx, dy) = (q[0] - c[0], q[1] - c[1]);
                let p = [q[0] + off * dx, q[1] + off * dy];
                let want = region.contains(&Point::from_f64(p[0], p[1], Precision::Hardware));
                let near = region.arcs.iter().any(|arc| {
                    let cc = arc.circle.center.to_f64();
                    ((p[0] - cc[0]).hypot(p[1] - cc[1]) - 1.0).abs() < 1e-13
                });
                if !near {
                    assert_eq!(kernel.in_horn(k as usize, p), want, "k={k} p={p:?}");
                }
                inside += want as usize;
            }
        }
        assert!(inside > 100);
    }

    #[test]
    fn tn_zero_level_and_determinism() {
        let s0 = build_scene(&SproutConfig::relaxed_reference(0)).unwrap();
        let e = tn_minus_delta_area(&s0, 10_000, 1).unwrap();
        assert_eq!(e.value.to_f64(), 0.0);
        let s = build_scene(&SproutConfig::relaxed_reference(4)).unwrap();
        let a = tn_minus_delta_area(&s, 200_000, 11).unwrap();
        let b = tn_minus_delta_area(&s, 200_000, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.value.to_f64() > 0.0);
    }

    #[test]
    fn tn_binned_matches_brute_force() {
        let s = build_scene(&SproutConfig::relaxed_reference(4)).unwrap();
        let kernel = TnKernel::from_scene(&s).unwrap();
        let index = TnIndex::build(&s, &kernel).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100_000 {
            let (b, rho, p) = index.sample(&mut rng);
            let brute = (0..kernel.len()).any(|k| kernel.in_horn(k, p));
            assert_eq!(index.hit(&kernel, b, rho, p), brute);
        }
    }

    #[test]
    fn strict_delta_below_disc() {
        let s = build_scene(&SproutConfig::strict_reference(0)).unwrap();
        let e = delta_area(&s, 100_000, 2).unwrap();
        let eps = 9e-7f64;
        assert!(e.value.to_f64() < eps * eps * PI);
        let r = build_scene(&SproutConfig::relaxed_reference(0)).unwrap();
        let e = delta_area(&r, 1_000_000, 2).unwrap();
        // lune of opening h cut at radius eps: h eps^2 / 2 to leading order
        let want = 1e-3 * 0.05f64 * 0.05 / 2.0;
        assert!((e.value.to_f64() - want).abs() < 3.0 * e.stderr.to_f64() + 1e-3 * want, "{e:?}");
    }

    #[test]
    fn relaxed_plan_bound_dominates_mc() {
        let s = build_scene(&SproutConfig::relaxed_reference(6)).unwrap();
        let plan = build_motion_plan(&s, &Scalar::Hw(1.31)).unwrap();
        let mc = monte_carlo_swept_area(&plan, 200_000, 42).unwrap();
        let ub = swept_area_upper_bound(&plan);
        assert!(ub.value.to_f64() >= mc.value.to_f64(), "{ub:?} {mc:?}");
        assert!(mc.value.to_f64() <= ub.value.to_f64() + 3.0 * mc.stderr.to_f64());
    }

    #[test]
    fn decomposition_formula() {
        let s = build_scene(&SproutConfig::relaxed_reference(8)).unwrap();
        let d = decomposition_bound(&s);
        let c = d.c.to_f64();
        let want = 5.0 * 20000.0 * c * c / 64.0 + PI * (2.0 * 4.0 / 8.0f64).powi(2);
        assert!((d.bound.to_f64() - want).abs() / want < 1e-12);
        assert!(d.bound.to_f64() <= 20000.0 * c * c / 8.0 + PI * (2.0 * 4.0 / 8.0f64).powi(2));
        assert!(!d.hypotheses_met);
    }

    #[test]
    fn csv_layout() {
        let rows = convergence_study(&SproutConfig::relaxed_reference(0), &[0], 1000, 42).unwrap();
        let csv = rows_to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert!(lines.next().unwrap().starts_with("0,0e0,0e0,0,"));
        assert!(convergence_study(&SproutConfig::relaxed_reference(0), &[4, 2], 1000, 42).is_err());
    }
}
