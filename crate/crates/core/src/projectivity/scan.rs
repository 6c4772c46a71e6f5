//! Sign scan of `d^h e^f / dr^h` on a radial grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::{RadialPotential, DEFAULT_ORDER_CAP};
use crate::series::{Dd, Jet, Precision, Scalar};
use crate::special::ln_factorial;

/// Relative threshold below which a negative Taylor coefficient is taken
/// as a genuine sign change rather than roundoff.
pub const SIGN_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub r: f64,
    pub h: usize,
    /// `d^h e^f / dr^h` at `r` (may overflow to `-inf` for large `h`)
    pub value: f64,
    /// the same derivative times `s^h / h!`, with `s` the local scale
    pub scaled_value: f64,
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum InducibilityStatus {
    NoObstructionFound { h_max: usize, r_grid: Vec<f64> },
    Obstructed { r: f64, h: usize, value: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InducibilityVerdict {
    pub status: InducibilityStatus,
    /// the first negative order at every grid point where one was found
    pub witnesses: Vec<Witness>,
}

impl InducibilityVerdict {
    pub fn is_obstructed(&self) -> bool {
        matches!(self.status, InducibilityStatus::Obstructed { .. })
    }
}

/// Geometric grid accumulating at the lower end of the domain:
/// `lo + (r0 - lo) 2^{-i}`, `i = 0..count`.
pub fn default_grid(pot: &RadialPotential, count: usize) -> Vec<f64> {
    let lo = pot.lo_f64();
    let r0 = match pot.hi {
        Some(h) => lo + 0.5 * (h.to_f64() - lo),
        None => lo + lo.max(1.0),
    };
    (0..count).map(|i| lo + (r0 - lo) * 0.5f64.powi(i as i32)).collect()
}

/// Local expansion scale at `r`: the distance to the nearer endpoint,
/// capped by `r` itself.
fn local_scale(pot: &RadialPotential, r: f64) -> f64 {
    let mut s = r - pot.lo_f64();
    if let Some(h) = pot.hi {
        s = s.min(h.to_f64() - r);
    }
    if r > 0.0 {
        s = s.min(r);
    }
    s
}

/// Taylor coefficients of `e^f` at `r` in the offset `s u`, i.e.
/// `g_h(r) s^h / h!`.
fn scaled_exp_jet(pot: &RadialPotential, r: f64, s: f64, order: usize, prec: Precision) -> Vec<f64> {
    fn run<S: Scalar>(pot: &RadialPotential, r: S, s: S, order: usize) -> Vec<f64> {
        let mut c = vec![S::zero(); order + 1];
        c[0] = r;
        if order >= 1 {
            c[1] = s;
        }
        let x = Jet::from_coeffs(r.to_f64(), c);
        let f: Jet<S> = pot.expr.eval(&[x]);
        f.exp().c.iter().map(|v| v.to_f64()).collect()
    }
    match prec {
        Precision::Double => run(pot, r, s, order),
        Precision::Extended => run(pot, Dd::from(r), Dd::from(s), order),
    }
}

/// `d^h e^f / dr^h` at `r`, recomputed in double-double.
pub fn derivative_of_exp(pot: &RadialPotential, r: f64, h: usize) -> Result<f64> {
    pot.check(r)?;
    let s = local_scale(pot, r);
    let c = scaled_exp_jet(pot, r, s, h, Precision::Extended);
    if !c[h].is_finite() {
        return Err(Error::JetOverflow { order: h });
    }
    Ok(unscale(c[h], h, s))
}

fn unscale(b: f64, h: usize, s: f64) -> f64 {
    if b == 0.0 {
        return 0.0;
    }
    b.signum() * (b.abs().ln() + ln_factorial(h) - h as f64 * s.ln()).exp()
}

/// First order `h <= h_max` at every grid point where the derivative of
/// `e^f` is negative beyond roundoff; the verdict cites the smallest
/// `(h, r)`.
pub fn derivative_sign_scan(pot: &RadialPotential, r_grid: &[f64], h_max: usize, prec: Precision) -> Result<InducibilityVerdict> {
    if h_max > DEFAULT_ORDER_CAP {
        return Err(Error::OrderTooLarge { order: h_max, cap: DEFAULT_ORDER_CAP });
    }
    for &r in r_grid {
        pot.check(r)?;
    }
    let per_point: Vec<Option<Witness>> = r_grid
        .par_iter()
        .map(|&r| {
            let s = local_scale(pot, r);
            let c = scaled_exp_jet(pot, r, s, h_max, prec);
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::JetOverflow { order: h_max });
            }
            let mag = c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            Ok(c.iter().enumerate().skip(1).find(|(_, &b)| b < -SIGN_TOL * mag).map(|(h, &b)| Witness {
                r,
                h,
                value: unscale(b, h, s),
                scaled_value: b,
                scale: s,
            }))
        })
        .collect::<Result<_>>()?;
    let witnesses: Vec<Witness> = per_point.into_iter().flatten().collect();
    let best = witnesses
        .iter()
        .min_by(|a, b| a.h.cmp(&b.h).then(a.r.total_cmp(&b.r)));
    let status = match best {
        Some(w) => InducibilityStatus::Obstructed { r: w.r, h: w.h, value: w.value },
        None => InducibilityStatus::NoObstructionFound { h_max, r_grid: r_grid.to_vec() },
    };
    Ok(InducibilityVerdict { status, witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{family_potential, FamilyId, FamilyParams};
    use approx::assert_relative_eq;

    fn fam(id: FamilyId, p: FamilyParams) -> RadialPotential {
        family_potential(id, &p, 2).unwrap()
    }

    #[test]
    fn simanca_and_flat_have_no_obstruction() {
        for p in [fam(FamilyId::Simanca, FamilyId::Simanca.default_params()), fam(FamilyId::Flat, FamilyParams::default())] {
            let v = derivative_sign_scan(&p, &default_grid(&p, 31), 40, Precision::Double).unwrap();
            assert!(!v.is_obstructed(), "{}: {:?}", p.label, v.witnesses.first());
        }
    }

    #[test]
    fn simanca_derivatives_match_product_rule() {
        // e^f = r e^r, so d^h e^f/dr^h = (r + h) e^r
        let p = fam(FamilyId::Simanca, FamilyId::Simanca.default_params());
        for (r, h) in [(0.3, 1), (2.0, 5), (1e-4, 3)] {
            assert_relative_eq!(derivative_of_exp(&p, r, h).unwrap(), (r + h as f64) * r.exp(), max_relative = 1e-13);
        }
    }

    #[test]
    fn an0vii_obstructed_at_k_plus_two() {
        let p = fam(FamilyId::Case9, FamilyParams::default().with_zeta(1.0 / 3.0).with_mu(3.0));
        let v = derivative_sign_scan(&p, &default_grid(&p, 31), 40, Precision::Double).unwrap();
        match v.status {
            InducibilityStatus::Obstructed { r, h, value } => {
                assert_eq!(h, 3);
                assert!(value < 0.0);
                let again = derivative_of_exp(&p, r, h).unwrap();
                assert_relative_eq!(again, value, max_relative = 1e-9);
            }
            s => panic!("{s:?}"),
        }
    }
}
