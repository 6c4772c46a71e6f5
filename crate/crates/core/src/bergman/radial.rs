//! Radial weighted integrals `int x^{d+s} e^{-m f(x)} e^{g(x)} dx` for many
//! degrees at once on one shared double-exponential grid, and the analytic
//! convergence range in `d`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::potentials::RadialPotential;
use crate::quad::{end_tail, Interval, LogSum, KEY_SCALE, MAX_LEVEL};
use crate::series::{Dd, Jet, Precision, Scalar};

/// Slack used when comparing endpoint exponents with the integrability
/// threshold `-1`.
pub const EXPONENT_SLACK: f64 = 1e-7;

#[derive(Clone, Copy, Debug)]
struct Node {
    ln_x: f64,
    f: f64,
    g: f64,
    ln_dxdt: f64,
    ln_gap: f64,
    unbounded: bool,
}

/// `(f, f', f'', f''')` at a double-double point.
fn derivs_dd(pot: &RadialPotential, x: Dd) -> [Dd; 4] {
    let j: Jet<Dd> = pot.jet_in(x, 3);
    let two = Dd::from(2.0);
    let six = Dd::from(6.0);
    [j.c[0], j.c[1], two * j.c[2], six * j.c[3]]
}

/// `g = ln f' + ln (x f')'` (surfaces) or `ln (x f')'` (curves), and its
/// derivative, from `(f', f'', f''')` at `x`.
fn g_and_slope<S: Scalar>(n: usize, x: S, d: &[S; 4]) -> (f64, f64) {
    let q = d[1] + x * d[2];
    let dq = S::from_f64(2.0) * d[2] + x * d[3];
    let q64 = q.to_f64();
    let f1 = d[1].to_f64();
    if !(q64 > 0.0) || (n == 2 && !(f1 > 0.0)) {
        return (f64::NEG_INFINITY, f64::NAN);
    }
    let mut g = q64.ln();
    let mut dg = dq / q;
    if n == 2 {
        g += f1.ln();
        dg = dg + d[2] / d[1];
    }
    (g, dg.to_f64())
}

/// Endpoint behaviour of `F = f` and `G = g` measured as `dF/d ln(gap)`.
#[derive(Clone, Copy, Debug)]
pub struct EndSlopes {
    /// the lower endpoint is `0`, where `x^{d+s}` also matters
    pub lo_is_zero: bool,
    pub lo: (f64, f64),
    /// `None` for the unbounded end
    pub hi: Option<(f64, f64)>,
    /// slopes at infinity, `None` for a bounded domain; a huge or infinite
    /// `F` slope means `f` grows faster than any power
    pub inf: Option<(f64, f64)>,
}

/// `(F, F', F'', F''')` for `F(t) = f(e^t)`. Near `r = 0` this avoids the
/// cancellation in `f' + r f''` when `f` has a logarithmic term.
fn log_derivs<S: Scalar>(pot: &RadialPotential, t: S) -> [f64; 4] {
    let r = Jet::variable(t, 3).exp();
    let j: Jet<S> = pot.expr.eval(&[r]);
    let c = |k: usize, w: f64| (j.c[k] * S::from_f64(w)).to_f64();
    [c(0, 1.0), c(1, 1.0), c(2, 2.0), c(3, 6.0)]
}

/// Far enough out in `t = ln r` for the power-law regime, close enough for
/// double-double to resolve the `e^{-|t|}` corrections.
const LOG_PROBE: f64 = 40.0;

/// `g` and `dg/dt` from the log-coordinate derivatives, using
/// `f' = F'/r` and `(r f')' = F''/r`.
fn log_g_and_slope(n: usize, t: f64, d: &[f64; 4]) -> (f64, f64) {
    if !(d[2] > 0.0) || (n == 2 && !(d[1] > 0.0)) {
        return (f64::NEG_INFINITY, f64::NAN);
    }
    if n == 2 {
        (d[1].ln() + d[2].ln() - 2.0 * t, d[2] / d[1] + d[3] / d[2] - 2.0)
    } else {
        (d[2].ln() - t, d[3] / d[2] - 1.0)
    }
}

pub fn end_slopes(pot: &RadialPotential) -> EndSlopes {
    let n = pot.n;
    let lo = pot.lo;
    let lo_is_zero = lo.to_f64() == 0.0;
    let lo_sl = if lo_is_zero {
        let t = -LOG_PROBE;
        let d = log_derivs(pot, Dd::from(t));
        (d[1], log_g_and_slope(n, t, &d).1)
    } else {
        let delta = Dd::from(lo.to_f64().abs() * 1e-18);
        let x = lo + delta;
        let d = derivs_dd(pot, x);
        let (_, dg) = g_and_slope(n, x, &d);
        ((delta * d[1]).to_f64(), delta.to_f64() * dg)
    };
    let (hi, inf) = match pot.hi {
        Some(h) => {
            let delta = Dd::from(h.to_f64().abs() * 1e-18);
            let x = h - delta;
            let d = derivs_dd(pot, x);
            let (_, dg) = g_and_slope(n, x, &d);
            (Some((-(delta * d[1]).to_f64(), -delta.to_f64() * dg)), None)
        }
        None => {
            let t = LOG_PROBE;
            let d = log_derivs(pot, Dd::from(t));
            (None, Some((d[1], log_g_and_slope(n, t, &d).1)))
        }
    };
    EndSlopes { lo_is_zero, lo: lo_sl, hi, inf }
}

/// Inclusive range of degrees with finite integrals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeRange {
    pub d_min: usize,
    pub d_max: Option<usize>,
}

impl DegreeRange {
    pub fn contains(&self, d: usize) -> bool {
        d >= self.d_min && self.d_max.is_none_or(|h| d <= h)
    }
}

/// Degrees `d` for which `x^{d+s} e^{-m f + g}` is integrable, or the
/// certificate of a divergence that affects every degree.
pub fn degree_range(sl: &EndSlopes, m: f64, shift: f64) -> std::result::Result<DegreeRange, String> {
    let expo = |(sf, sg): (f64, f64)| -m * sf + sg;
    let mut d_min = 0usize;
    if sl.lo_is_zero {
        let a0 = expo(sl.lo);
        // need d + s + a0 > -1
        let c = -1.0 - shift - a0;
        if c + EXPONENT_SLACK >= 0.0 {
            d_min = (c + EXPONENT_SLACK).floor() as usize + 1;
        }
    } else {
        let a = expo(sl.lo);
        if a <= -1.0 + EXPONENT_SLACK {
            return Err(format!("integrand ~ (r - r_min)^{a:.6} at the inner boundary"));
        }
    }
    let mut d_max = None;
    if let Some(h) = sl.hi {
        let a = expo(h);
        if a <= -1.0 + EXPONENT_SLACK {
            return Err(format!("integrand ~ (r_max - r)^{a:.6} at the outer boundary"));
        }
    } else if let Some((sf, sg)) = sl.inf {
        let superpoly = !sf.is_finite() || sf > 1e6;
        if superpoly && m > 0.0 {
            return Ok(DegreeRange { d_min, d_max: None });
        }
        // need d + s + b < -1
        let b = if m > 0.0 { expo((sf, sg)) } else { sg };
        if !b.is_finite() {
            return Err(format!("integrand grows faster than any power of r at infinity"));
        }
        let c = -1.0 - shift - b - EXPONENT_SLACK;
        if c <= 0.0 {
            return Err(format!("integrand ~ r^{:.6} at infinity for every degree", shift + b));
        }
        d_max = Some(c.ceil() as usize - 1);
    }
    if d_max.is_some_and(|h| h < d_min) {
        return Err(format!("no degree between {d_min} and {d_max:?} is integrable"));
    }
    Ok(DegreeRange { d_min, d_max })
}

/// Shared-grid evaluator; nodes are cached across calls and across `m`.
pub struct RadialQuad {
    pub pot: RadialPotential,
    iv: Interval,
    shift: f64,
    prec: Precision,
    nodes: HashMap<i64, Option<Node>>,
}

impl RadialQuad {
    pub fn new(pot: &RadialPotential, prec: Precision) -> Self {
        RadialQuad {
            pot: pot.clone(),
            iv: Interval::new(pot.lo, pot.hi),
            shift: if pot.n == 2 { 1.0 } else { 0.0 },
            prec,
            nodes: HashMap::new(),
        }
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    fn node(&mut self, key: i64) -> Option<Node> {
        if let Some(n) = self.nodes.get(&key) {
            return *n;
        }
        let out = self.iv.node(key as f64 / KEY_SCALE as f64).map(|dn| {
            let x64 = dn.x.to_f64();
            let near_origin = self.pot.lo.to_f64() == 0.0 && x64 < self.pot.hi.map_or(1.0, |h| 0.5 * h.to_f64()).min(1.0);
            let (f, g, ln_x) = if near_origin {
                let t = x64.ln();
                let d = log_derivs(&self.pot, t);
                (d[0], log_g_and_slope(self.pot.n, t, &d).0, t)
            } else if dn.near_endpoint() || (dn.unbounded_side && x64 > 1e3) || self.prec == Precision::Extended {
                let d = derivs_dd(&self.pot, dn.x);
                let (g, _) = g_and_slope(self.pot.n, dn.x, &d);
                (d[0].to_f64(), g, dn.x.to_f64().ln())
            } else {
                let x = dn.x.to_f64();
                let j: Jet<f64> = self.pot.jet_in(x, 2);
                let d = [j.c[0], j.c[1], 2.0 * j.c[2], 0.0];
                let (g, _) = g_and_slope(self.pot.n, x, &d);
                (d[0], g, x.ln())
            };
            let (f, g) = if f.is_finite() && !g.is_nan() { (f, g) } else { (0.0, f64::NEG_INFINITY) };
            Node { ln_x, f, g, ln_dxdt: dn.ln_dxdt, ln_gap: dn.ln_gap, unbounded: dn.unbounded_side }
        });
        self.nodes.insert(key, out);
        out
    }

    /// `ln int x^{d+s} e^{-m f + g} dx` for each requested degree (all
    /// assumed convergent), to `tol` in the logarithm.
    pub fn ln_integrals(&mut self, m: f64, degrees: &[usize], tol: f64) -> Result<Vec<f64>> {
        let nd = degrees.len();
        let pw: Vec<f64> = degrees.iter().map(|&d| d as f64 + self.shift).collect();
        let mut prev = vec![f64::NAN; nd];
        let mut worst = f64::INFINITY;
        for level in 2..=MAX_LEVEL {
            let step = KEY_SCALE >> level;
            let ln_h = -(level as f64) * std::f64::consts::LN_2;
            let mut acc = vec![LogSum::default(); nd];
            let mut tails = vec![LogSum::default(); nd];
            let mut tail_bad = vec![false; nd];
            for dir in [1i64, -1] {
                let mut k = if dir == 1 { 0 } else { -step };
                let mut quiet = 0;
                let mut hist: Vec<Node> = Vec::with_capacity(64);
                loop {
                    let Some(nd_) = self.node(k) else {
                        if let [.., p, q] = hist.as_slice() {
                            for i in 0..nd {
                                let lf = |n: &Node| pw[i] * n.ln_x - m * n.f + n.g;
                                match end_tail((lf(p), p.ln_gap), (lf(q), q.ln_gap), q.unbounded) {
                                    Some(t) => tails[i].add(t - ln_h),
                                    None => tail_bad[i] = true,
                                }
                            }
                        }
                        break;
                    };
                    let base = nd_.ln_dxdt - m * nd_.f + nd_.g;
                    let mut all_quiet = true;
                    for i in 0..nd {
                        let l = base + pw[i] * nd_.ln_x;
                        acc[i].add(l);
                        if l >= acc[i].max - 46.0 {
                            all_quiet = false;
                        }
                    }
                    hist.push(nd_);
                    if all_quiet {
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
            let mut est = vec![0.0; nd];
            worst = 0.0f64;
            for i in 0..nd {
                let tail_err = if tail_bad[i] {
                    f64::INFINITY
                } else {
                    1e-3 * (tails[i].ln() - acc[i].ln()).exp()
                };
                acc[i].add(tails[i].ln());
                est[i] = acc[i].ln() + ln_h;
                let change = if prev[i].is_nan() { f64::INFINITY } else { (est[i] - prev[i]).abs() };
                worst = worst.max(change.max(tail_err));
            }
            if level >= 5 && worst <= tol {
                return Ok(est);
            }
            prev = est;
        }
        Err(Error::QuadratureFailure { achieved: worst, requested: tol })
    }
}
