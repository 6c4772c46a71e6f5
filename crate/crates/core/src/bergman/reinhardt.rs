//! Norms of monomials for Reinhardt potentials by nested double-exponential
//! quadrature on `(x1, u)`, where `x2 = U(x1) u` and `U` is the upper
//! boundary of `x2`:
//!
//! `N(j, k) = int int x1^j U^{k+1} u^k e^{-m Phi} det G du dx1`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::phi_and_det;
use crate::potentials::ReinhardtPotential;
use crate::quad::{Interval, LogSum, KEY_SCALE};
use crate::series::{Dd, Precision, Scalar};

#[derive(Clone, Copy, Debug)]
struct Outer {
    x1: Dd,
    upper: Dd,
    ln_x1: f64,
    ln_upper: f64,
    ln_w: f64,
    near: bool,
}

#[derive(Clone, Copy, Debug)]
struct Inner {
    u: Dd,
    ln_w: f64,
    near: bool,
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    phi: f64,
    ln_det: f64,
}

/// Margins `alpha + 1 > 0` of the integrand exponents at the four sides,
/// used to size the node ranges.
#[derive(Clone, Copy, Debug)]
pub struct Margins {
    pub x1_lo: f64,
    pub x1_hi: f64,
    pub u_lo: f64,
    pub u_hi: f64,
}

pub struct ReinhardtQuad {
    pub pot: ReinhardtPotential,
    outer_iv: Interval,
    inner_iv: Interval,
    prec: Precision,
    outer: HashMap<i64, Option<Outer>>,
    inner: HashMap<i64, Option<Inner>>,
    cells: HashMap<(i64, i64), Cell>,
}

const MAX_LEVEL_2D: u32 = 8;

fn t_limit(margin: f64) -> f64 {
    // beyond this the mapped integrand is below e^-46 of its bulk
    ((46.0 / (std::f64::consts::PI * margin.clamp(1e-3, 1.0))).asinh() + 0.3).min(6.5)
}

impl ReinhardtQuad {
    pub fn new(pot: &ReinhardtPotential, prec: Precision) -> Self {
        ReinhardtQuad {
            pot: pot.clone(),
            outer_iv: Interval::new(Dd::from(0.0), Some(pot.x1_max)),
            inner_iv: Interval::new(Dd::from(0.0), Some(Dd::from(1.0))),
            prec,
            outer: HashMap::new(),
            inner: HashMap::new(),
            cells: HashMap::new(),
        }
    }

    fn outer_node(&mut self, key: i64) -> Option<Outer> {
        if let Some(o) = self.outer.get(&key) {
            return *o;
        }
        let out = self.outer_iv.node(key as f64 / KEY_SCALE as f64).and_then(|n| {
            let upper: Dd = self.pot.upper.eval(&[n.x]);
            let ln_upper = upper.to_f64().ln();
            if !ln_upper.is_finite() {
                return None;
            }
            Some(Outer {
                x1: n.x,
                upper,
                ln_x1: n.x.to_f64().ln(),
                ln_upper,
                ln_w: n.ln_dxdt,
                near: n.near_endpoint(),
            })
        });
        self.outer.insert(key, out);
        out
    }

    fn inner_node(&mut self, key: i64) -> Option<Inner> {
        if let Some(o) = self.inner.get(&key) {
            return *o;
        }
        let out = self.inner_iv.node(key as f64 / KEY_SCALE as f64).map(|n| Inner {
            u: n.x,
            ln_w: n.ln_dxdt,
            near: n.near_endpoint(),
        });
        self.inner.insert(key, out);
        out
    }

    fn cell(&mut self, ka: i64, kb: i64, o: &Outer, i: &Inner) -> Cell {
        if let Some(c) = self.cells.get(&(ka, kb)) {
            return *c;
        }
        let (phi, det) = if o.near || i.near || self.prec == Precision::Extended {
            let x2 = o.upper * i.u;
            let (p, d) = phi_and_det(&self.pot.expr, o.x1, x2);
            (p.to_f64(), d.to_f64())
        } else {
            let x1 = o.x1.to_f64();
            let x2 = o.upper.to_f64() * i.u.to_f64();
            phi_and_det(&self.pot.expr, x1, x2)
        };
        let c = if phi.is_finite() && det > 0.0 {
            Cell { phi, ln_det: det.ln() }
        } else {
            Cell { phi: 0.0, ln_det: f64::NEG_INFINITY }
        };
        self.cells.insert((ka, kb), c);
        c
    }

    fn keys(&mut self, level: u32, t_lo: f64, t_hi: f64, outer: bool) -> Vec<i64> {
        let step = KEY_SCALE >> level;
        let lo = -(t_lo * KEY_SCALE as f64) as i64 / step * step;
        let hi = (t_hi * KEY_SCALE as f64) as i64 / step * step;
        let mut out = Vec::new();
        let mut k = lo;
        while k <= hi {
            let ok = if outer { self.outer_node(k).is_some() } else { self.inner_node(k).is_some() };
            if ok {
                out.push(k);
            }
            k += step;
        }
        out
    }

    /// `ln N(j, k)` for each requested index (all assumed convergent).
    pub fn ln_norms(&mut self, m: f64, idx: &[(usize, usize)], margins: &Margins, tol: f64) -> Result<Vec<f64>> {
        let mut ks: Vec<usize> = idx.iter().map(|p| p.1).collect();
        ks.sort_unstable();
        ks.dedup();
        let kpos: HashMap<usize, usize> = ks.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let (ta_lo, ta_hi) = (t_limit(margins.x1_lo), t_limit(margins.x1_hi));
        let (tb_lo, tb_hi) = (t_limit(margins.u_lo), t_limit(margins.u_hi));
        let mut prev: Vec<f64> = vec![f64::NAN; idx.len()];
        let mut worst = f64::INFINITY;
        for level in 3..=MAX_LEVEL_2D {
            let ka = self.keys(level, ta_lo, ta_hi, true);
            let kb = self.keys(level, tb_lo, tb_hi, false);
            let inner: Vec<Inner> = kb.iter().map(|&k| self.inner_node(k).expect("cached")).collect();
            // u^k for the needed k
            let pows: Vec<Vec<f64>> = inner
                .iter()
                .map(|n| {
                    let u = n.u.to_f64();
                    let mut v = Vec::with_capacity(ks.len());
                    let mut p = 1.0;
                    let mut e = 0usize;
                    for &k in &ks {
                        while e < k {
                            p *= u;
                            e += 1;
                        }
                        v.push(p);
                    }
                    v
                })
                .collect();
            let mut acc = vec![LogSum::default(); idx.len()];
            let mut row = vec![0.0; kb.len()];
            let mut sk = vec![0.0; ks.len()];
            for &a in &ka {
                let o = self.outer_node(a).expect("cached");
                let mut mx = f64::NEG_INFINITY;
                for (bi, &b) in kb.iter().enumerate() {
                    let c = self.cell(a, b, &o, &inner[bi]);
                    let l = -m * c.phi + c.ln_det + inner[bi].ln_w;
                    row[bi] = l;
                    mx = mx.max(l);
                }
                if mx == f64::NEG_INFINITY {
                    continue;
                }
                sk.iter_mut().for_each(|s| *s = 0.0);
                for bi in 0..kb.len() {
                    let e = (row[bi] - mx).exp();
                    if e == 0.0 {
                        continue;
                    }
                    for (s, p) in sk.iter_mut().zip(&pows[bi]) {
                        *s += e * p;
                    }
                }
                for (ii, &(j, k)) in idx.iter().enumerate() {
                    let s = sk[kpos[&k]];
                    if s > 0.0 {
                        acc[ii].add(j as f64 * o.ln_x1 + (k as f64 + 1.0) * o.ln_upper + o.ln_w + mx + s.ln());
                    }
                }
            }
            let ln_h2 = -2.0 * level as f64 * std::f64::consts::LN_2;
            let est: Vec<f64> = acc.iter().map(|a| a.ln() + ln_h2).collect();
            worst = est
                .iter()
                .zip(&prev)
                .map(|(e, p)| if p.is_nan() { f64::INFINITY } else { (e - p).abs() })
                .fold(0.0, f64::max);
            if level >= 5 && worst <= tol {
                return Ok(est);
            }
            prev = est;
        }
        Err(Error::QuadratureFailure { achieved: worst, requested: tol })
    }
}

/// Exponent margins for the p-domain (exact) or, for other potentials,
/// from slopes measured along the middle lines of the `(x1, u)` square.
pub fn margins(pot: &ReinhardtPotential, m: f64, k_min: usize) -> Margins {
    if let Some(p) = pot.p {
        return Margins {
            x1_lo: 1.0,
            x1_hi: p * (k_min as f64 + m) - 1.0,
            u_lo: k_min as f64 + 1.0,
            u_hi: m - 2.0,
        };
    }
    let probe = |x1: Dd, u: Dd| -> f64 {
        let upper: Dd = pot.upper.eval(&[x1]);
        let (phi, det) = phi_and_det(&pot.expr, x1, upper * u);
        (k_min as f64 + 1.0) * upper.to_f64().ln() - m * phi.to_f64() + det.to_f64().ln()
    };
    let slope = |f: &dyn Fn(f64) -> f64| {
        let (d1, d2) = (1e-14, 1e-18);
        (f(d2) - f(d1)) / (d2.ln() - d1.ln())
    };
    let xm = pot.x1_max;
    let half = Dd::from(0.5);
    let x1_hi = slope(&|d| probe(xm - Dd::from(d) * xm, half)) + 1.0;
    let u_hi = slope(&|d| probe(xm * half, Dd::from(1.0) - Dd::from(d))) + 1.0;
    Margins { x1_lo: 1.0, x1_hi, u_lo: k_min as f64 + 1.0, u_hi }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bergman::closed::pdomain_ln_norm;
    use crate::potentials::pdomain_potential;
    use approx::assert_relative_eq;

    #[test]
    fn pdomain_quadrature_matches_beta_form() {
        for p in [0.5, 2.0] {
            let pot = pdomain_potential(p).unwrap();
            let mut q = ReinhardtQuad::new(&pot, Precision::Double);
            let idx = [(0, 0), (3, 1), (1, 4)];
            let m = 3.0;
            let mg = margins(&pot, m, 0);
            let got = q.ln_norms(m, &idx, &mg, 1e-11).unwrap();
            for (g, &(j, k)) in got.iter().zip(&idx) {
                let want = pdomain_ln_norm(&pot, m, j, k).unwrap().unwrap();
                assert_relative_eq!(*g, want, max_relative = 1e-10, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn numeric_margins_match_exact_ones() {
        let mut pot = pdomain_potential(2.0).unwrap();
        let exact = margins(&pot, 4.0, 1);
        pot.p = None;
        let probed = margins(&pot, 4.0, 1);
        assert!((exact.x1_hi - probed.x1_hi).abs() < 1e-6, "{exact:?} {probed:?}");
        assert!((exact.u_hi - probed.u_hi).abs() < 1e-6, "{exact:?} {probed:?}");
    }
}
