//! Scalar types used underneath every jet: plain `f64` and a double-double
//! `Dd` (about 32 significant digits) for the extended-precision path.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Real scalar field closed under the elementary functions we need.
pub trait Scalar:
    Copy
    + fmt::Debug
    + Send
    + Sync
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
    fn powf(self, p: f64) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }
    fn is_finite(self) -> bool {
        self.to_f64().is_finite()
    }
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

pub const LN2: Dd = Dd {
    hi: 6.931471805599452862e-01,
    lo: 2.319046813846299558e-17,
};
pub const PI_2: Dd = Dd {
    hi: 1.570796326794896558e+00,
    lo: 6.123233995736766036e-17,
};

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    /// Exact sum of two doubles.
    pub fn sum(a: f64, b: f64) -> Self {
        let (s, e) = two_sum(a, b);
        Dd { hi: s, lo: e }
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    fn ldexp(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        Dd {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    fn sqr(self) -> Self {
        self * self
    }

    fn exp_impl(self) -> Self {
        if self.hi > 709.0 {
            return Dd::new(f64::INFINITY, 0.0);
        }
        if self.hi < -745.0 {
            return Dd::new(0.0, 0.0);
        }
        let k = (self.hi / LN2.hi).round();
        let r = self - LN2.mul_f64(k);
        // r in [-ln2/2, ln2/2]; scale down, Taylor, square back up
        let s = r.ldexp(-9);
        let mut term = s;
        let mut sum = s;
        for i in 2..=12 {
            term = (term * s) / Dd::new(i as f64, 0.0);
            sum = sum + term;
        }
        // sum = expm1(s); square back: expm1(2s) = 2 expm1(s) + expm1(s)^2
        for _ in 0..9 {
            sum = sum.mul_f64(2.0) + sum.sqr();
        }
        (sum + Dd::new(1.0, 0.0)).ldexp(k as i32)
    }

    fn ln_impl(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                Dd::new(f64::NEG_INFINITY, 0.0)
            } else {
                Dd::new(f64::NAN, 0.0)
            };
        }
        if !self.hi.is_finite() {
            return self;
        }
        // one Newton step on exp(x) = a doubles the f64 accuracy
        let x0 = Dd::new(self.hi.ln(), 0.0);
        x0 + self * (-x0).exp_impl() - Dd::new(1.0, 0.0)
    }

    fn sin_cos_taylor(r: Dd) -> (Dd, Dd) {
        let r2 = r.sqr();
        let mut s = r;
        let mut c = Dd::new(1.0, 0.0);
        let mut ts = r;
        let mut tc = Dd::new(1.0, 0.0);
        for i in 1..=14 {
            let a = (2 * i) as f64;
            ts = -(ts * r2) / Dd::new(a * (a + 1.0), 0.0);
            tc = -(tc * r2) / Dd::new((a - 1.0) * a, 0.0);
            s = s + ts;
            c = c + tc;
        }
        (s, c)
    }

    pub fn sin_cos(self) -> (Dd, Dd) {
        let k = (self.hi / PI_2.hi).round();
        let r = self - PI_2.mul_f64(k);
        let (s, c) = Self::sin_cos_taylor(r);
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

impl Dd {
    /// Arctangent: f64 seed plus one Newton step on `sin - x cos = 0`.
    pub fn atan(x: Dd) -> Dd {
        let t0 = Dd::new(x.to_f64().atan(), 0.0);
        let (s, c) = t0.sin_cos();
        // f(t) = s - x c, f'(t) = c + x s
        t0 - (s - x * c) / (c + x * s)
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.hi)
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x, 0.0)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&o.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&o.lo),
            other => other,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() {
            return Dd::new(q1, 0.0);
        }
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3, 0.0)
    }
}

impl Scalar for Dd {
    fn from_f64(x: f64) -> Self {
        Dd::new(x, 0.0)
    }
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
    fn ln(self) -> Self {
        self.ln_impl()
    }
    fn exp(self) -> Self {
        self.exp_impl()
    }
    fn sin(self) -> Self {
        self.sin_cos().0
    }
    fn cos(self) -> Self {
        self.sin_cos().1
    }
    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::new(self.hi.sqrt(), 0.0);
        }
        let x = self.hi.sqrt();
        let xd = Dd::new(x, 0.0);
        // Heron correction
        xd + (self - xd * xd) / Dd::new(2.0 * x, 0.0)
    }
    fn powf(self, p: f64) -> Self {
        if p == 0.0 {
            return Dd::new(1.0, 0.0);
        }
        if p.fract() == 0.0 && p.abs() <= 64.0 {
            let mut acc = Dd::new(1.0, 0.0);
            let mut base = self;
            let mut e = p.abs() as u32;
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc * base;
                }
                base = base * base;
                e >>= 1;
            }
            return if p < 0.0 {
                Dd::new(1.0, 0.0) / acc
            } else {
                acc
            };
        }
        if self.hi == 0.0 {
            return Dd::new(if p > 0.0 { 0.0 } else { f64::INFINITY }, 0.0);
        }
        (self.ln_impl().mul_f64(p)).exp_impl()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Dd, b: Dd, tol: f64) -> bool {
        let d = (a - b).to_f64().abs();
        d <= tol * b.to_f64().abs().max(1e-300)
    }

    #[test]
    fn exp_ln_roundtrip_beyond_double() {
        for &x in &[0.3, 1.7, -4.2, 25.0, 1e-3] {
            let a = Dd::sum(x, x * 1e-20);
            let back = a.exp().ln();
            assert!(close(back, a, 1e-29), "{x}: {back:?} vs {a:?}");
        }
    }

    #[test]
    fn one_minus_tiny_is_exact() {
        let delta = 3.7e-25;
        let r = Dd::sum(1.0, -delta);
        let c = Dd::from(1.0) - r;
        assert!((c.to_f64() - delta).abs() <= 1e-40);
        // log resolves the tiny offset
        let l = r.ln();
        assert!((l.to_f64() + delta).abs() <= 1e-38);
    }

    #[test]
    fn trig_matches_f64_and_identity() {
        for &x in &[0.1, 1.0, 1.5707, 3.0, -2.2, 7.5] {
            let d = Dd::from(x);
            assert!((d.sin().to_f64() - x.sin()).abs() < 1e-15);
            assert!((d.cos().to_f64() - x.cos()).abs() < 1e-15);
            let one = d.sin() * d.sin() + d.cos() * d.cos();
            assert!((one - Dd::from(1.0)).to_f64().abs() < 1e-30);
        }
    }

    #[test]
    fn cos_near_half_pi_keeps_relative_accuracy() {
        // cos(pi/2 - e) = sin(e) ~ e
        let e = 1e-20;
        let x = PI_2 - Dd::from(e);
        let c = x.cos().to_f64();
        assert!((c - e).abs() < 1e-28, "{c}");
    }

    #[test]
    fn sqrt_and_div() {
        let two = Dd::from(2.0);
        let s = two.sqrt();
        assert!(close(s * s, two, 1e-31));
        let third = Dd::from(1.0) / Dd::from(3.0);
        assert!(close(third * Dd::from(3.0), Dd::from(1.0), 1e-31));
    }

    #[test]
    fn powf_fractional() {
        let x = Dd::from(0.75);
        let y = x.powf(2.5);
        assert!((y.to_f64() - 0.75f64.powf(2.5)).abs() < 1e-15);
        // exponent 0.5 is exact in binary, so the square must return x
        let h = x.powf(0.5);
        assert!(close(h * h, x, 1e-29));
    }
}
