//! Double-exponential quadrature nodes on finite and half-infinite intervals.
//!
//! Nodes are addressed by an integer key, `t = key / KEY_SCALE`, so that
//! successive halvings of the step reuse every node already evaluated.
//! Each node keeps its distance to the nearer endpoint exactly; points close
//! to a nonzero endpoint are rebuilt in double-double so that integrands with
//! endpoint singularities keep their relative accuracy.

use crate::error::{Error, Result};
use crate::series::{Dd, Scalar};

/// Keys are multiples of `1 / KEY_SCALE` in `t`.
pub const KEY_SCALE: i64 = 1 << 12;

/// Finest level (`h = 2^-MAX_LEVEL`).
pub const MAX_LEVEL: u32 = 12;

/// Below this relative distance to an endpoint, integrands should be
/// evaluated in double-double.
pub const NEAR_ENDPOINT: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Interval {
    Finite { a: Dd, b: Dd },
    HalfLine { a: Dd },
}

#[derive(Clone, Copy, Debug)]
pub struct DeNode {
    pub t: f64,
    pub x: Dd,
    /// `ln(dx/dt)`
    pub ln_dxdt: f64,
    /// distance to the nearer endpoint, relative to the interval scale
    pub rel_gap: f64,
    /// `ln` of the distance to the nearer finite endpoint, or `ln x` on the
    /// unbounded side
    pub ln_gap: f64,
    pub unbounded_side: bool,
}

impl DeNode {
    pub fn near_endpoint(&self) -> bool {
        self.rel_gap < NEAR_ENDPOINT
    }
}

fn softplus(u: f64) -> f64 {
    if u > 30.0 {
        u + (-u).exp()
    } else {
        u.exp().ln_1p()
    }
}

/// Smallest distance to an endpoint we can still represent around it.
fn gap_floor(e: Dd) -> f64 {
    let e = e.to_f64().abs();
    if e == 0.0 {
        1e-300
    } else {
        e * 1e-30
    }
}

impl Interval {
    pub fn new(lo: Dd, hi: Option<Dd>) -> Self {
        match hi {
            Some(b) => Interval::Finite { a: lo, b },
            None => Interval::HalfLine { a: lo },
        }
    }

    pub fn scale(&self) -> f64 {
        match *self {
            Interval::Finite { a, b } => (b - a).to_f64(),
            Interval::HalfLine { a } => a.to_f64().abs().max(1.0),
        }
    }

    /// Node at parameter `t`, or `None` once it can no longer be told apart
    /// from the endpoint (or overflows).
    pub fn node(&self, t: f64) -> Option<DeNode> {
        match *self {
            Interval::Finite { a, b } => {
                let w = (b - a).to_f64();
                let u = std::f64::consts::PI * t.sinh();
                let ln_dxdt = w.ln() - softplus(-u) - softplus(u) + (std::f64::consts::PI * t.cosh()).ln();
                if u <= 0.0 {
                    let d = w / (1.0 + (-u).exp());
                    if d < gap_floor(a) {
                        return None;
                    }
                    Some(DeNode { t, x: a + Dd::from(d), ln_dxdt, rel_gap: d / w, ln_gap: d.ln(), unbounded_side: false })
                } else {
                    let d = w / (1.0 + u.exp());
                    if d < gap_floor(b) {
                        return None;
                    }
                    Some(DeNode { t, x: b - Dd::from(d), ln_dxdt, rel_gap: d / w, ln_gap: d.ln(), unbounded_side: false })
                }
            }
            Interval::HalfLine { a } => {
                let s = self.scale();
                let v = std::f64::consts::FRAC_PI_2 * t.sinh();
                if v > 690.0 {
                    return None;
                }
                let d = s * v.exp();
                if d < gap_floor(a) || !d.is_finite() {
                    return None;
                }
                let ln_dxdt = s.ln() + v + (std::f64::consts::FRAC_PI_2 * t.cosh()).ln();
                let x = a + Dd::from(d);
                let (ln_gap, unbounded_side) = if t > 0.0 { (x.to_f64().ln(), true) } else { (d.ln(), false) };
                Some(DeNode { t, x, ln_dxdt, rel_gap: if t > 0.0 { 1.0 } else { d / s }, ln_gap, unbounded_side })
            }
        }
    }
}

/// Log-sum-exp accumulator.
#[derive(Clone, Copy, Debug)]
pub struct LogSum {
    pub max: f64,
    pub sum: f64,
}

impl Default for LogSum {
    fn default() -> Self {
        LogSum { max: f64::NEG_INFINITY, sum: 0.0 }
    }
}

impl LogSum {
    #[inline]
    pub fn add(&mut self, l: f64) {
        if l == f64::NEG_INFINITY {
            return;
        }
        if l <= self.max {
            self.sum += (l - self.max).exp();
        } else if l.is_finite() {
            self.sum = self.sum * (self.max - l).exp() + 1.0;
            self.max = l;
        }
    }

    pub fn ln(&self) -> f64 {
        if self.sum == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

/// Power-law extrapolation of the part of an integral cut off beyond the
/// last node of a sweep. `(ln_f, ln_gap)` are taken at the last two nodes,
/// `b` being the outermost. Returns `ln` of the tail, or `None` when the
/// local exponent says the integral diverges there.
pub fn end_tail(a: (f64, f64), b: (f64, f64), unbounded: bool) -> Option<f64> {
    let (fa, ga) = a;
    let (fb, gb) = b;
    if fb == f64::NEG_INFINITY {
        return Some(f64::NEG_INFINITY);
    }
    let alpha = (fb - fa) / (gb - ga);
    let p = alpha + 1.0;
    let ok = if unbounded { p < 0.0 } else { p > 0.0 };
    if !ok || !p.is_finite() {
        return None;
    }
    Some(fb + gb - p.abs().ln())
}

#[derive(Clone, Copy)]
struct Cached {
    ln_f: f64,
    ln_dxdt: f64,
    ln_gap: f64,
    unbounded: bool,
}

/// `ln` of the integral of `exp(ln_f(node))` over the interval, by step
/// halving until successive estimates agree to `tol` in the logarithm.
pub fn integrate_ln(iv: &Interval, tol: f64, mut ln_f: impl FnMut(&DeNode) -> f64) -> Result<f64> {
    let mut cache: std::collections::HashMap<i64, Option<Cached>> = Default::default();
    let mut prev = f64::NAN;
    let mut last_change = f64::INFINITY;
    for level in 2..=MAX_LEVEL {
        let step = KEY_SCALE >> level;
        let h = 1.0 / (1u64 << level) as f64;
        let mut acc = LogSum::default();
        let mut tails = LogSum::default();
        let mut diverged = false;
        for dir in [1i64, -1] {
            let mut k = if dir == 1 { 0 } else { -step };
            let mut quiet = 0;
            let mut hist: Vec<Cached> = Vec::new();
            loop {
                let e = *cache.entry(k).or_insert_with(|| {
                    iv.node(k as f64 / KEY_SCALE as f64).map(|n| Cached {
                        ln_f: ln_f(&n),
                        ln_dxdt: n.ln_dxdt,
                        ln_gap: n.ln_gap,
                        unbounded: n.unbounded_side,
                    })
                });
                let Some(mut c) = e else {
                    if let [.., p, q] = hist.as_slice() {
                        match end_tail((p.ln_f, p.ln_gap), (q.ln_f, q.ln_gap), q.unbounded) {
                            Some(t) => tails.add(t - h.ln()),
                            None => diverged = true,
                        }
                    }
                    break;
                };
                if c.ln_f.is_nan() {
                    c.ln_f = f64::NEG_INFINITY;
                }
                let l = c.ln_f + c.ln_dxdt;
                acc.add(l);
                hist.push(c);
                if l < acc.max - 46.0 {
                    quiet += 1;
                    if quiet >= 3 {
                        break;
                    }
                } else {
                    quiet = 0;
                }
                k += dir * step;
            }
        }
        // the extrapolated tails are trusted to three digits
        let tail_err = if diverged { f64::INFINITY } else { 1e-3 * (tails.ln() - acc.ln()).exp() };
        acc.add(tails.ln());
        let est = acc.ln() + h.ln();
        if level >= 4 {
            last_change = (est - prev).abs().max(tail_err);
            if last_change <= tol || (est == f64::NEG_INFINITY && prev == f64::NEG_INFINITY) {
                return Ok(est);
            }
        }
        prev = est;
    }
    Err(Error::QuadratureFailure { achieved: last_change, requested: tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn beta_integral_with_endpoint_singularities() {
        // int_0^1 x^{-1/2} (1-x)^{-1/2} dx = pi
        let iv = Interval::new(Dd::from(0.0), Some(Dd::from(1.0)));
        let v = integrate_ln(&iv, 1e-13, |n| {
            let x = n.x;
            let one_minus = Dd::from(1.0) - x;
            -0.5 * x.to_f64().ln() - 0.5 * one_minus.to_f64().ln()
        })
        .unwrap();
        assert_relative_eq!(v.exp(), std::f64::consts::PI, max_relative = 1e-12);
    }

    #[test]
    fn gamma_integral_on_half_line() {
        // int_0^inf x^5 e^{-2x} dx = 5!/2^6
        let iv = Interval::new(Dd::from(0.0), None);
        let v = integrate_ln(&iv, 1e-13, |n| {
            let x = n.x.to_f64();
            5.0 * x.ln() - 2.0 * x
        })
        .unwrap();
        assert_relative_eq!(v.exp(), 120.0 / 64.0, max_relative = 1e-12);
    }

    #[test]
    fn shifted_endpoint_keeps_gap_exact() {
        let iv = Interval::new(Dd::from(3.0), Some(Dd::from(5.0)));
        let n = iv.node(-3.0).unwrap();
        let gap = (n.x - Dd::from(3.0)).to_f64();
        assert!(gap > 0.0 && gap < 1e-12);
        assert!(iv.node(-5.5).is_none());
        assert!(n.near_endpoint());
        let v = integrate_ln(&iv, 1e-9, |n| -0.75 * (n.x - Dd::from(3.0)).to_f64().ln()).unwrap();
        // int_3^5 (x-3)^{-3/4} dx = 4 * 2^{1/4}
        assert_relative_eq!(v.exp(), 4.0 * 2f64.powf(0.25), max_relative = 1e-9);
    }

    #[test]
    fn logsum_matches_direct() {
        let mut s = LogSum::default();
        for l in [-1.0, 2.0, 0.5, -700.0] {
            s.add(l);
        }
        let want = ((-1f64).exp() + 2f64.exp() + 0.5f64.exp() + (-700f64).exp()).ln();
        assert_relative_eq!(s.ln(), want, max_relative = 1e-15);
    }
}
