//! Projective inducibility of radial metrics and the balanced condition.

mod balanced;
mod pk;
mod scan;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::{FamilyId, FamilyParams, RadialPotential};
use crate::psi::PsiProfile;
use crate::series::{Dd, Jet, Scalar};

pub use balanced::{balanced_check, exp_coeffs_radial, exp_coeffs_reinhardt, BalancedReason, BalancedStatus, BalancedVerdict, RATIO_TOL};
pub use pk::{numerator, pk_recursion, PkPolynomial, Poly};
pub use scan::{default_grid, derivative_of_exp, derivative_sign_scan, InducibilityStatus, InducibilityVerdict, Witness, SIGN_TOL};

/// A limit of `y` closer than this to zero counts as zero.
const ZERO_LIMIT_TOL: f64 = 1e-8;
/// Relative size of `psi(y0)` accepted as a root.
const ROOT_TOL: f64 = 1e-7;
/// Distance from the nearest integer accepted as integral.
const INTEGER_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NotInducedReason {
    /// `0` is a limit of `y` but `B != 0`
    NonzeroBAtZero { b: f64 },
    /// a positive limit of `y` is a root of `psi` but not an integer
    NonIntegerRoot { y0: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RootVerdict {
    NotInduced { reason: NotInducedReason },
    Inconclusive,
}

/// `y = F'(t)` at `t = ln r` through a jet in `t`.
fn y_at_t<S: Scalar>(pot: &RadialPotential, t: S) -> f64 {
    let r = Jet::variable(t, 1).exp();
    let j: Jet<S> = pot.expr.eval(&[r]);
    j.c[1].to_f64()
}

fn agree(a: f64, b: f64) -> Option<f64> {
    (a.is_finite() && b.is_finite() && (a - b).abs() <= 1e-9 * a.abs().max(1.0)).then_some(b)
}

/// Finite limits of `y = r f'(r)` at the two ends of the domain. An end
/// contributes when two probes at increasing depth agree.
pub fn y_limits(pot: &RadialPotential) -> Vec<f64> {
    let mut out = Vec::new();
    let lo = pot.lo.to_f64();
    if lo == 0.0 {
        out.extend(agree(y_at_t(pot, -300.0), y_at_t(pot, -600.0)));
    } else {
        let probe = |gap: f64| y_at_t(pot, (pot.lo * Dd::from(1.0 + gap)).ln());
        out.extend(agree(probe(1e-20), probe(1e-28)));
    }
    match pot.hi {
        None => out.extend(agree(y_at_t(pot, 300.0), y_at_t(pot, 600.0))),
        Some(h) => {
            let probe = |gap: f64| y_at_t(pot, (h * Dd::from(1.0 - gap)).ln());
            out.extend(agree(probe(1e-20), probe(1e-28)));
        }
    }
    out
}

/// Necessary conditions on the limits of `y` for an induced metric: `B = 0`
/// when `0` is a limit, and every positive limit that is a root of `psi`
/// must be an integer. Passing them proves nothing.
pub fn integer_root_test(profile: &PsiProfile, limits: &[f64]) -> RootVerdict {
    for &y0 in limits {
        if y0.abs() <= ZERO_LIMIT_TOL && profile.b.abs() > ZERO_LIMIT_TOL {
            return RootVerdict::NotInduced { reason: NotInducedReason::NonzeroBAtZero { b: profile.b } };
        }
    }
    for &y0 in limits {
        if y0 <= ZERO_LIMIT_TOL {
            continue;
        }
        let is_root = profile.eval(y0).abs() <= ROOT_TOL * y0.abs().max(1.0).powi(2);
        if is_root && (y0 - y0.round()).abs() > INTEGER_TOL {
            return RootVerdict::NotInduced { reason: NotInducedReason::NonIntegerRoot { y0 } };
        }
    }
    RootVerdict::Inconclusive
}

/// `integer_root_test` for a catalog potential, with the limits of `y`
/// found numerically.
pub fn integer_root_test_for(pot: &RadialPotential) -> Result<RootVerdict> {
    let (id, params) = pot
        .family
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("the integer-root test needs a catalog family".into()))?;
    let profile = PsiProfile::of_family(*id, params, pot.n)?;
    Ok(integer_root_test(&profile, &y_limits(pot)))
}

/// The three lowest-order conditions `g_1, g_2, g_3 >= 0` written in `y`:
/// `y >= 0`, `(A+1) y^2 + B >= 0` and
/// `(2Ay + 3y - 2)(Ay^2 + y + B) + 2y - 3y^2 + y^3 >= 0`.
pub fn inequality_system(a: f64, b: f64, y: f64) -> (bool, bool, bool) {
    let psi = a * y * y + y + b;
    let third = (2.0 * a * y + 3.0 * y - 2.0) * psi + 2.0 * y - 3.0 * y * y + y * y * y;
    (y >= 0.0, (a + 1.0) * y * y + b >= 0.0, third >= 0.0)
}

/// Relative gap, for `k = 1..=k_max`, between `e^{-f} d^k e^f / dr^k` from
/// a jet at `r` and `(psi P_k(y) + (y)_k) / r^k` with `y = r f'(r)`. Both
/// sides are formed in double-double and the polynomial is evaluated
/// exactly, since `psi P_k` and `(y)_k` cancel heavily for large `k`.
pub fn pk_identity_defect(pot: &RadialPotential, r: f64, k_max: usize) -> Result<Vec<f64>> {
    let (id, params) = pot
        .family
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("the identity check needs a catalog family".into()))?;
    pot.check(r)?;
    let (a, b) = id.profile_coeffs(params)?;
    let mut jet: Jet<Dd> = pot.jet_in(Dd::from(r), k_max);
    let y = Dd::from(r) * jet.c[1];
    jet.c[0] = Dd::from(0.0);
    let e = jet.exp();
    let exact = |v: f64| BigRational::from_float(v).ok_or_else(|| Error::InvalidInput(format!("non-finite value {v}")));
    let (a, b) = (exact(a)?, exact(b)?);
    let y = exact(y.hi)? + exact(y.lo)?;
    let mut fact = Dd::from(1.0);
    let mut out = Vec::with_capacity(k_max);
    for pk in pk_recursion(k_max) {
        let k = pk.k;
        fact = fact * Dd::from(k as f64);
        let lhs = (e.c[k] * fact).to_f64();
        let rhs = numerator(&pk).eval_exact(&a, &b, &y).to_f64().unwrap_or(f64::NAN) / r.powi(k as i32);
        out.push((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE));
    }
    Ok(out)
}

fn is_integer(v: f64) -> bool {
    (v - v.round()).abs() <= INTEGER_TOL
}

/// Catalog members known to be projectively induced (complex dimension
/// two). This is the only source of a positive answer; the scan alone can
/// only rule inducibility out.
pub fn certified_induced(id: FamilyId, params: &FamilyParams) -> bool {
    let get = |k: &str| params.get(k).ok();
    match id {
        FamilyId::Flat | FamilyId::Hyperbolic => true,
        FamilyId::Simanca => get("lambda").is_some_and(is_integer),
        FamilyId::FubiniStudy => get("mu").is_some_and(is_integer),
        FamilyId::Case7 => match (get("lambda"), get("mu")) {
            (Some(l), Some(m)) => m > 2.0 && is_integer(l) && is_integer(m * l / 2.0),
            _ => false,
        },
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::family_potential;
    use crate::series::Precision;

    fn fam(id: FamilyId, p: FamilyParams) -> RadialPotential {
        family_potential(id, &p, 2).unwrap()
    }

    #[test]
    fn inequality_examples() {
        assert_eq!(inequality_system(0.0, 0.0, 1.0), (true, true, true));
        assert!(!inequality_system(0.0, 1.0, 1e-6).2);
        assert_eq!(inequality_system(-1.0 / 3.0, 0.0, 1.0), (true, true, true));
    }

    #[test]
    fn root_test_examples() {
        let an = fam(FamilyId::Case7, FamilyParams::default().with_lambda(1.0).with_mu(1.0).with_xi(0.5));
        match integer_root_test_for(&an).unwrap() {
            RootVerdict::NotInduced { reason: NotInducedReason::NonIntegerRoot { y0 } } => assert!((y0 - 0.5).abs() < 1e-9),
            v => panic!("{v:?}"),
        }
        let sim = fam(FamilyId::Simanca, FamilyParams::default().with_lambda(2.0).with_mu(1.0));
        assert_eq!(integer_root_test_for(&sim).unwrap(), RootVerdict::Inconclusive);
        let a03 = fam(FamilyId::A03, FamilyId::A03.default_params());
        assert!(matches!(
            integer_root_test_for(&a03).unwrap(),
            RootVerdict::NotInduced { reason: NotInducedReason::NonzeroBAtZero { .. } }
        ));
    }

    #[test]
    fn an0v_with_fractional_lambda_is_obstructed_at_seven() {
        let p = fam(FamilyId::Case7, FamilyParams::default().with_lambda(1.5).with_mu(4.0).with_xi(0.5));
        let v = derivative_sign_scan(&p, &default_grid(&p, 31), 40, Precision::Double).unwrap();
        match v.status {
            InducibilityStatus::Obstructed { h, .. } => assert_eq!(h, 7),
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn induced_cases_show_no_obstruction() {
        let d = FamilyParams::default();
        for (id, p) in [
            (FamilyId::Flat, d),
            (FamilyId::Simanca, d.with_lambda(1.0).with_mu(1.0)),
            (FamilyId::Simanca, d.with_lambda(2.0).with_mu(1.0)),
            (FamilyId::FubiniStudy, d.with_mu(1.0)),
            (FamilyId::FubiniStudy, d.with_mu(2.0)),
            (FamilyId::Hyperbolic, d.with_mu(1.7)),
            (FamilyId::Case7, d.with_lambda(2.0).with_mu(4.0).with_xi(0.5)),
        ] {
            let pot = fam(id, p);
            let v = derivative_sign_scan(&pot, &default_grid(&pot, 31), 40, Precision::Double).unwrap();
            assert!(!v.is_obstructed(), "{}: {:?}", pot.label, v.witnesses.first());
        }
    }

    #[test]
    fn pk_identity_on_catalog() {
        for id in FamilyId::ALL {
            for u in [[0.2, 0.7, 0.4], [0.9, 0.1, 0.6]] {
                let pot = fam(id, id.sample_params(u));
                for r in [pot.reference_point(), 0.5 * (pot.reference_point() + pot.lo_f64())] {
                    let d = pk_identity_defect(&pot, r, 10).unwrap();
                    let worst = d.iter().cloned().fold(0.0, f64::max);
                    assert!(worst < 1e-9, "{} r={r}: {d:?}", pot.label);
                }
            }
        }
    }

    #[test]
    fn catalog_lookup() {
        let d = FamilyParams::default();
        assert!(certified_induced(FamilyId::Case7, &d.with_lambda(2.0).with_mu(4.0).with_xi(0.5)));
        assert!(!certified_induced(FamilyId::Case7, &d.with_lambda(1.5).with_mu(4.0).with_xi(0.5)));
        assert!(!certified_induced(FamilyId::Simanca, &d.with_lambda(1.5).with_mu(1.0)));
    }
}
