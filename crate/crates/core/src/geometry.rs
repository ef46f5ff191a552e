//! Planar primitives over [`Scalar`].

use serde::Serialize;

use crate::error::{KakeyaError, Result};
use crate::scalar::{normalize_angle, normalize_angle_positive, Precision, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Point {
    pub x: Scalar,
    pub y: Scalar,
}

impl Point {
    pub fn new(x: Scalar, y: Scalar) -> Point {
        Point { x, y }
    }

    pub fn from_f64(x: f64, y: f64, prec: Precision) -> Point {
        Point::new(Scalar::from_f64(x, prec), Scalar::from_f64(y, prec))
    }

    pub fn origin(prec: Precision) -> Point {
        Point::new(Scalar::zero(prec), Scalar::zero(prec))
    }

    pub fn precision(&self) -> Precision {
        self.x.precision()
    }

    pub fn add(&self, o: &Point) -> Point {
        Point::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn sub(&self, o: &Point) -> Point {
        Point::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn scale(&self, s: &Scalar) -> Point {
        Point::new(&self.x * s, &self.y * s)
    }

    pub fn dot(&self, o: &Point) -> Scalar {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn cross(&self, o: &Point) -> Scalar {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn norm2(&self) -> Scalar {
        self.dot(self)
    }

    pub fn norm(&self) -> Scalar {
        self.norm2().sqrt()
    }

    pub fn dist(&self, o: &Point) -> Scalar {
        self.sub(o).norm()
    }

    /// Direction angle of the vector, in (-pi, pi].
    pub fn arg(&self) -> Scalar {
        self.y.atan2(&self.x)
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(&self) -> Point {
        Point::new(-&self.y, self.x.clone())
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [self.x.to_f64(), self.y.to_f64()]
    }

    pub fn to_precision(&self, prec: Precision) -> Point {
        Point::new(self.x.to_precision(prec), self.y.to_precision(prec))
    }

    pub fn approx_eq(&self, o: &Point, tol: &Scalar) -> bool {
        &self.dist(o) <= tol
    }
}

/// Signed angle from direction `u` to direction `v`, in (-pi, pi].
pub fn angle_between(u: &Point, v: &Point) -> Scalar {
    u.cross(v).atan2(&u.dot(v))
}

/// Signed angle at `pivot` from `a` to `b`.
pub fn angle_at(pivot: &Point, a: &Point, b: &Point) -> Scalar {
    angle_between(&a.sub(pivot), &b.sub(pivot))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Circle {
    pub center: Point,
    pub radius: Scalar,
}

impl Circle {
    pub fn new(center: Point, radius: Scalar) -> Result<Circle> {
        if !radius.is_positive() {
            return Err(KakeyaError::OutOfRange("circle radius must be positive".into()));
        }
        Ok(Circle { center, radius })
    }

    pub fn unit(center: Point) -> Circle {
        let r = Scalar::one(center.precision());
        Circle { center, radius: r }
    }

    pub fn precision(&self) -> Precision {
        self.center.precision()
    }

    /// Signed distance from the circle, negative inside.
    pub fn signed_distance(&self, p: &Point) -> Scalar {
        p.dist(&self.center) - &self.radius
    }

    pub fn contains_point(&self, p: &Point, tol: &Scalar) -> bool {
        &self.signed_distance(p).abs() <= tol
    }

    pub fn point_at(&self, angle: &Scalar) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(&self.center.x + &(&self.radius * &c), &self.center.y + &(&self.radius * &s))
    }

    pub fn angle_of(&self, p: &Point) -> Scalar {
        p.sub(&self.center).arg()
    }
}

/// Rotates `p` counter-clockwise about `pivot`.
pub fn rotate_point(p: &Point, pivot: &Point, angle: &Scalar) -> Point {
    let (s, c) = angle.sin_cos();
    rotate_point_sc(p, pivot, &s, &c)
}

fn rotate_point_sc(p: &Point, pivot: &Point, s: &Scalar, c: &Scalar) -> Point {
    let d = p.sub(pivot);
    Point::new(
        &pivot.x + &(&(&d.x * c) - &(&d.y * s)),
        &pivot.y + &(&(&d.x * s) + &(&d.y * c)),
    )
}

pub fn rotate_circle(k: &Circle, pivot: &Point, angle: &Scalar) -> Circle {
    Circle { center: rotate_point(&k.center, pivot, angle), radius: k.radius.clone() }
}

/// Intersection points of two circles, the one left of the center line a -> b first.
pub fn circle_circle_intersection(a: &Circle, b: &Circle) -> Result<Vec<Point>> {
    let prec = a.precision();
    let tol = prec.tolerance();
    let d_vec = b.center.sub(&a.center);
    let d = d_vec.norm();
    let rdiff = &a.radius - &b.radius;
    if d <= tol && rdiff.abs() <= tol {
        return Err(KakeyaError::IdenticalCircles);
    }
    if d.is_zero() {
        return Ok(Vec::new());
    }
    let rsum = &a.radius + &b.radius;
    // h^2 as a product of four factors stays accurate near tangency
    let f1 = &rsum - &d;
    let f2 = &rsum + &d;
    let f3 = &d - &rdiff;
    let f4 = &d + &rdiff;
    if f1.is_negative() || f3.is_negative() || f4.is_negative() {
        return Ok(Vec::new());
    }
    let d2 = d.square();
    let h2 = &(&(&f1 * &f2) * &(&f3 * &f4)) / &(&d2 * 4.0);
    let l = &(&d2 + &(&rdiff * &rsum)) / &(&d * 2.0);
    let u = d_vec.scale(&(Scalar::one(prec) / &d));
    let base = a.center.add(&u.scale(&l));
    if h2.is_zero() {
        return Ok(vec![base]);
    }
    let hh = h2.sqrt();
    let off = u.perp().scale(&hh);
    Ok(vec![base.add(&off), base.sub(&off)])
}

/// Area swept by an arc with chord `chord` rotated by `angle` about an endpoint.
pub fn horn_area(chord: &Scalar, angle: &Scalar) -> Result<Scalar> {
    if chord.is_negative() {
        return Err(KakeyaError::NegativeInput("chord"));
    }
    if angle.is_negative() {
        return Err(KakeyaError::NegativeInput("angle"));
    }
    Ok((chord * chord * angle).half())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirectedArc {
    pub circle: Circle,
    pub start_angle: Scalar,
    pub sweep: Scalar,
}

impl DirectedArc {
    pub fn new(circle: Circle, start_angle: Scalar, sweep: Scalar) -> Result<DirectedArc> {
        let two_pi = Scalar::pi(sweep.precision()) * 2.0;
        if sweep.abs() >= two_pi {
            return Err(KakeyaError::OutOfRange("|sweep| must be below 2pi".into()));
        }
        Ok(DirectedArc { circle, start_angle, sweep })
    }

    /// Arc on `circle` from point `a` counter-clockwise to point `b`.
    pub fn ccw_between(circle: &Circle, a: &Point, b: &Point) -> DirectedArc {
        let s = circle.angle_of(a);
        let sweep = normalize_angle_positive(&(circle.angle_of(b) - &s));
        DirectedArc { circle: circle.clone(), start_angle: s, sweep }
    }

    /// Shorter arc on `circle` from `a` to `b`.
    pub fn minor_between(circle: &Circle, a: &Point, b: &Point) -> DirectedArc {
        let s = circle.angle_of(a);
        let sweep = normalize_angle(&(circle.angle_of(b) - &s));
        DirectedArc { circle: circle.clone(), start_angle: s, sweep }
    }

    pub fn start(&self) -> Point {
        self.circle.point_at(&self.start_angle)
    }

    pub fn end(&self) -> Point {
        self.circle.point_at(&(&self.start_angle + &self.sweep))
    }

    pub fn length(&self) -> Scalar {
        &self.circle.radius * &self.sweep.abs()
    }

    pub fn chord(&self) -> Scalar {
        self.start().dist(&self.end())
    }

    pub fn end_angle(&self) -> Scalar {
        &self.start_angle + &self.sweep
    }

    /// Same point set, traversed counter-clockwise.
    pub fn ccw(&self) -> DirectedArc {
        if self.sweep.is_negative() {
            DirectedArc { circle: self.circle.clone(), start_angle: self.end_angle(), sweep: -&self.sweep }
        } else {
            self.clone()
        }
    }

    /// Whether the direction angle (about the arc's centre) lies within the arc.
    pub fn contains_angle(&self, theta: &Scalar, tol: &Scalar) -> bool {
        let a = self.ccw();
        let off = normalize_angle_positive(&(theta - &a.start_angle));
        let two_pi = Scalar::pi(theta.precision()) * 2.0;
        off <= (&a.sweep + tol) || off >= (&two_pi - tol)
    }

    /// Angular distance (about the centre) from `theta` to the arc, zero inside.
    pub fn angular_gap(&self, theta: &Scalar) -> Scalar {
        let a = self.ccw();
        let off = normalize_angle_positive(&(theta - &a.start_angle));
        if off <= a.sweep {
            return Scalar::zero(theta.precision());
        }
        let two_pi = Scalar::pi(theta.precision()) * 2.0;
        let past = &off - &a.sweep;
        let before = &two_pi - &off;
        past.min(before)
    }

    pub fn contains_point(&self, p: &Point, tol: &Scalar) -> bool {
        self.circle.contains_point(p, tol)
            && self.contains_angle(&self.circle.angle_of(p), &(tol / &self.circle.radius))
    }
}

/// Point on `arc` at arc-length fraction `x`.
pub fn arc_point_at_fraction(arc: &DirectedArc, x: &Scalar) -> Result<Point> {
    if x.is_negative() || *x > Scalar::one(x.precision()) {
        return Err(KakeyaError::OutOfRange(format!("fraction {x} not in [0,1]")));
    }
    Ok(arc.circle.point_at(&(&arc.start_angle + &(&arc.sweep * x))))
}

/// Rigid motion `p -> R(angle) F p + shift`, where `F` mirrors in the y axis when `reflect`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Isometry {
    pub reflect: bool,
    pub angle: Scalar,
    pub shift: Point,
    #[serde(skip)]
    sin: Scalar,
    #[serde(skip)]
    cos: Scalar,
}

impl Isometry {
    fn from_parts(reflect: bool, angle: Scalar, shift: Point) -> Isometry {
        let (sin, cos) = angle.sin_cos();
        Isometry { reflect, angle, shift, sin, cos }
    }

    pub fn identity(prec: Precision) -> Isometry {
        Isometry::from_parts(false, Scalar::zero(prec), Point::origin(prec))
    }

    /// Counter-clockwise rotation about `center`.
    pub fn rotation(center: &Point, angle: &Scalar) -> Isometry {
        let (s, c) = angle.sin_cos();
        let rc = rotate_point_sc(&Point::origin(center.precision()), center, &s, &c);
        Isometry { reflect: false, angle: angle.clone(), shift: rc, sin: s, cos: c }
    }

    /// Mirror in the y axis, then rotate about `center`.
    pub fn reflect_y_then_rotate(center: &Point, angle: &Scalar) -> Isometry {
        let rot = Isometry::rotation(center, angle);
        Isometry { reflect: true, ..rot }
    }

    /// The isometry taking `a0 -> a1` whose linear part maps direction `u0` onto `u1`.
    pub fn from_frames(a0: &Point, u0: &Point, a1: &Point, u1: &Point, reflect: bool) -> Isometry {
        let prec = a0.precision();
        let u0f = if reflect { Point::new(-&u0.x, u0.y.clone()) } else { u0.clone() };
        let angle = angle_between(&u0f, u1);
        let lin = Isometry::from_parts(reflect, angle, Point::origin(prec));
        let shift = a1.sub(&lin.apply(a0));
        Isometry::from_parts(reflect, lin.angle, shift)
    }

    pub fn apply(&self, p: &Point) -> Point {
        let x = if self.reflect { -&p.x } else { p.x.clone() };
        Point::new(
            &(&(&x * &self.cos) - &(&p.y * &self.sin)) + &self.shift.x,
            &(&(&x * &self.sin) + &(&p.y * &self.cos)) + &self.shift.y,
        )
    }

    pub fn apply_circle(&self, k: &Circle) -> Circle {
        Circle { center: self.apply(&k.center), radius: k.radius.clone() }
    }

    pub fn apply_arc(&self, a: &DirectedArc) -> DirectedArc {
        let circle = self.apply_circle(&a.circle);
        if self.reflect {
            let pi = Scalar::pi(a.sweep.precision());
            DirectedArc {
                circle,
                start_angle: normalize_angle(&(&(&pi - &a.start_angle) + &self.angle)),
                sweep: -&a.sweep,
            }
        } else {
            DirectedArc { circle, start_angle: normalize_angle(&(&a.start_angle + &self.angle)), sweep: a.sweep.clone() }
        }
    }

    /// Maps a signed rotation angle through the linear part.
    pub fn apply_angle(&self, a: &Scalar) -> Scalar {
        if self.reflect {
            -a
        } else {
            a.clone()
        }
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &Isometry) -> Isometry {
        let reflect = self.reflect ^ first.reflect;
        let angle = if self.reflect { &self.angle - &first.angle } else { &self.angle + &first.angle };
        let shift = self.apply(&first.shift);
        Isometry::from_parts(reflect, normalize_angle(&angle), shift)
    }
}
