//! Numeric scalar with a hardware and an arbitrary-precision backend.
//!
//! Every geometric quantity is a [`Scalar`]. Mixed operations promote to the
//! wider of the two operands.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use serde::{Deserialize, Serialize};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Working precision of a construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    Hardware,
    Big(u32),
}

impl Precision {
    pub const MIN_BIG_BITS: u32 = 64;

    pub fn bits(self) -> u32 {
        match self {
            Precision::Hardware => 53,
            Precision::Big(b) => b,
        }
    }

    /// Tolerance used by geometric predicates at this precision.
    pub fn tolerance(self) -> Scalar {
        match self {
            Precision::Hardware => Scalar::Hw(1e-12),
            Precision::Big(b) => Scalar::from_f64(2f64.powi(-(b as i32 - 12)), self),
        }
    }

    pub fn is_valid(self) -> bool {
        match self {
            Precision::Hardware => true,
            Precision::Big(b) => b >= Self::MIN_BIG_BITS,
        }
    }

    fn wider(self, other: Precision) -> Precision {
        match (self, other) {
            (Precision::Hardware, p) | (p, Precision::Hardware) => p,
            (Precision::Big(a), Precision::Big(b)) => Precision::Big(a.max(b)),
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Hardware => write!(f, "hw"),
            Precision::Big(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Scalar {
    Hw(f64),
    Big(BigFloat, u32),
}

macro_rules! big_unary {
    ($name:ident) => {
        pub fn $name(&self) -> Scalar {
            match self {
                Scalar::Hw(v) => Scalar::Hw(v.$name()),
                Scalar::Big(v, p) => {
                    Scalar::Big(with_consts(|cc| v.$name(*p as usize, RM, cc)), *p)
                }
            }
        }
    };
}

impl Scalar {
    pub fn from_f64(v: f64, prec: Precision) -> Scalar {
        match prec {
            Precision::Hardware => Scalar::Hw(v),
            Precision::Big(p) => Scalar::Big(BigFloat::from_f64(v, p as usize), p),
        }
    }

    pub fn from_i64(v: i64, prec: Precision) -> Scalar {
        match prec {
            Precision::Hardware => Scalar::Hw(v as f64),
            Precision::Big(p) => Scalar::Big(BigFloat::from_i64(v, p as usize), p),
        }
    }

    pub fn zero(prec: Precision) -> Scalar {
        Scalar::from_i64(0, prec)
    }

    pub fn one(prec: Precision) -> Scalar {
        Scalar::from_i64(1, prec)
    }

    pub fn pi(prec: Precision) -> Scalar {
        match prec {
            Precision::Hardware => Scalar::Hw(std::f64::consts::PI),
            Precision::Big(p) => Scalar::Big(with_consts(|cc| cc.pi(p as usize, RM)), p),
        }
    }

    /// `2^e` exactly.
    pub fn pow2(e: i32, prec: Precision) -> Scalar {
        let two = Scalar::from_i64(2, prec);
        let mut acc = Scalar::one(prec);
        let mut base = if e >= 0 { two } else { Scalar::one(prec) / &two };
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// Parses a decimal string at the given precision.
    pub fn parse(s: &str, prec: Precision) -> Option<Scalar> {
        let s = s.trim();
        match prec {
            Precision::Hardware => s.parse::<f64>().ok().filter(|v| !v.is_nan()).map(Scalar::Hw),
            Precision::Big(p) => {
                // reject anything f64 cannot read either, astro-float is lenient
                s.parse::<f64>().ok()?;
                let v = with_consts(|cc| BigFloat::parse(s, Radix::Dec, p as usize, RM, cc));
                if v.is_nan() || v.is_inf() {
                    None
                } else {
                    Some(Scalar::Big(v, p))
                }
            }
        }
    }

    pub fn precision(&self) -> Precision {
        match self {
            Scalar::Hw(_) => Precision::Hardware,
            Scalar::Big(_, p) => Precision::Big(*p),
        }
    }

    /// Re-rounds to another precision.
    pub fn to_precision(&self, prec: Precision) -> Scalar {
        match (self, prec) {
            (Scalar::Hw(v), _) => Scalar::from_f64(*v, prec),
            (Scalar::Big(_, _), Precision::Hardware) => Scalar::Hw(self.to_f64()),
            (Scalar::Big(v, _), Precision::Big(p)) => {
                let mut w = v.clone();
                let _ = w.set_precision(p as usize, RM);
                Scalar::Big(w, p)
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Hw(v) => *v,
            Scalar::Big(v, _) => big_to_f64(v),
        }
    }

    pub fn is_nan(&self) -> bool {
        match self {
            Scalar::Hw(v) => v.is_nan(),
            Scalar::Big(v, _) => v.is_nan(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Scalar::Hw(v) => v.is_finite(),
            Scalar::Big(v, _) => !v.is_nan() && !v.is_inf(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Hw(v) => *v == 0.0,
            Scalar::Big(v, _) => v.is_zero(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Hw(v) => *v < 0.0,
            Scalar::Big(v, _) => v.is_negative() && !v.is_zero(),
        }
    }

    pub fn is_positive(&self) -> bool {
        !self.is_negative() && !self.is_zero() && !self.is_nan()
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Hw(v) => Scalar::Hw(v.abs()),
            Scalar::Big(v, p) => Scalar::Big(v.abs(), *p),
        }
    }

    pub fn sqrt(&self) -> Scalar {
        match self {
            Scalar::Hw(v) => Scalar::Hw(v.sqrt()),
            Scalar::Big(v, p) => Scalar::Big(v.sqrt(*p as usize, RM), *p),
        }
    }

    big_unary!(sin);
    big_unary!(cos);
    big_unary!(atan);
    big_unary!(asin);
    big_unary!(acos);

    pub fn sin_cos(&self) -> (Scalar, Scalar) {
        (self.sin(), self.cos())
    }

    /// Four-quadrant arctangent of `self / x`, in (-pi, pi].
    pub fn atan2(&self, x: &Scalar) -> Scalar {
        if let (Scalar::Hw(a), Scalar::Hw(b)) = (self, x) {
            return Scalar::Hw(a.atan2(*b));
        }
        let prec = self.precision().wider(x.precision());
        let y = self.to_precision(prec);
        let x = x.to_precision(prec);
        let pi = Scalar::pi(prec);
        if x.is_zero() {
            return if y.is_zero() {
                Scalar::zero(prec)
            } else if y.is_negative() {
                -(pi.half())
            } else {
                pi.half()
            };
        }
        // reduce to |ratio| <= 1 so the series converges well
        if y.abs() <= x.abs() {
            let t = (&y / &x).atan();
            if !x.is_negative() {
                t
            } else if y.is_negative() {
                t - pi
            } else {
                t + pi
            }
        } else {
            let t = (&x / &y).atan();
            let hp = pi.half();
            if y.is_negative() {
                -hp - t
            } else {
                hp - t
            }
        }
    }

    pub fn half(&self) -> Scalar {
        match self {
            Scalar::Hw(v) => Scalar::Hw(v * 0.5),
            Scalar::Big(v, p) => {
                let h = BigFloat::from_f64(0.5, *p as usize);
                Scalar::Big(v.mul(&h, *p as usize, RM), *p)
            }
        }
    }

    pub fn square(&self) -> Scalar {
        self * self
    }

    pub fn powi(&self, n: u32) -> Scalar {
        let mut acc = Scalar::one(self.precision());
        let mut b = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            k >>= 1;
        }
        acc
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Same-precision constant.
    pub fn lift(&self, v: f64) -> Scalar {
        Scalar::from_f64(v, self.precision())
    }

    /// Full-precision decimal representation.
    pub fn to_decimal_string(&self) -> String {
        match self {
            Scalar::Hw(v) => format!("{v:?}"),
            Scalar::Big(v, _) => {
                if v.is_zero() {
                    return "0.0".to_string();
                }
                with_consts(|cc| v.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".into())
            }
        }
    }
}

fn big_to_f64(v: &BigFloat) -> f64 {
    if v.is_nan() {
        return f64::NAN;
    }
    if v.is_inf() {
        return if v.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    let Some((words, _, sign, exp, _)) = v.as_raw_parts() else {
        return f64::NAN;
    };
    let Some(&top) = words.last() else {
        return 0.0;
    };
    if top == 0 {
        return 0.0;
    }
    // value = 0.m * 2^exp with the top word holding the leading bits
    let e = exp as i64 - 64;
    let mag = if e < -1100 {
        0.0
    } else if e > 1100 {
        f64::INFINITY
    } else {
        let lo = e / 2;
        (top as f64) * 2f64.powi(lo as i32) * 2f64.powi((e - lo) as i32)
    };
    if sign == Sign::Neg {
        -mag
    } else {
        mag
    }
}

fn promote(a: &Scalar, b: &Scalar) -> Option<(BigFloat, BigFloat, u32)> {
    match (a, b) {
        (Scalar::Hw(_), Scalar::Hw(_)) => None,
        _ => {
            let p = a.precision().wider(b.precision());
            let Precision::Big(bits) = p else { unreachable!() };
            let x = match a.to_precision(p) {
                Scalar::Big(v, _) => v,
                Scalar::Hw(_) => unreachable!(),
            };
            let y = match b.to_precision(p) {
                Scalar::Big(v, _) => v,
                Scalar::Hw(_) => unreachable!(),
            };
            Some((x, y, bits))
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Hw(a), Scalar::Hw(b)) => Scalar::Hw(a $op b),
                    (Scalar::Big(a, p), Scalar::Big(b, q)) if p == q => {
                        Scalar::Big(a.$m(b, *p as usize, RM), *p)
                    }
                    _ => {
                        let (a, b, p) = promote(self, rhs).unwrap();
                        Scalar::Big(a.$m(&b, p as usize, RM), p)
                    }
                }
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
        impl $tr<f64> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: f64) -> Scalar {
                self.$m(&self.lift(rhs))
            }
        }
        impl $tr<f64> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: f64) -> Scalar {
                let r = self.lift(rhs);
                (&self).$m(&r)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Hw(v) => Scalar::Hw(-v),
            Scalar::Big(v, p) => Scalar::Big(v.neg(), *p),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Scalar) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Scalar) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Hw(a), Scalar::Hw(b)) => a.partial_cmp(b),
            (Scalar::Big(a, _), Scalar::Big(b, _)) => a.partial_cmp(b),
            _ => {
                let (a, b, _) = promote(self, other)?;
                a.partial_cmp(&b)
            }
        }
    }
}

impl PartialEq<f64> for Scalar {
    fn eq(&self, other: &f64) -> bool {
        *self == self.lift(*other)
    }
}

impl PartialOrd<f64> for Scalar {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.partial_cmp(&self.lift(*other))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_decimal_string())
    }
}

/// Normalizes an angle into (-pi, pi].
pub fn normalize_angle(a: &Scalar) -> Scalar {
    let pi = Scalar::pi(a.precision());
    let two_pi = &pi * 2.0;
    if a > &-&pi && a <= &pi {
        return a.clone();
    }
    let k = ((a + &pi) / &two_pi).to_f64().floor();
    let mut r = a - &(&two_pi * k);
    // one correction step absorbs the truncation of k
    if r <= -&pi {
        r = r + &two_pi;
    } else if r > pi {
        r = r - &two_pi;
    }
    r
}

/// Normalizes an angle into [0, 2pi).
pub fn normalize_angle_positive(a: &Scalar) -> Scalar {
    let r = normalize_angle(a);
    if r.is_negative() {
        r + Scalar::pi(a.precision()) * 2.0
    } else {
        r
    }
}
