//! The `t = log r` picture of radial metrics: `F(t) = f(e^t)`, `y = F'(t)`,
//! and the profile `psi(y) = F''(t)`. Constant scalar curvature turns into a
//! first-order ODE whose solutions with `C = 0` form the catalog.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::potentials::{family_potential, FamilyId, FamilyParams, RadialPotential};
use crate::series::{Jet, Scalar};

/// Absolute tolerance for root and boundary comparisons in `classify_psi`.
pub const CLASSIFY_TOL: f64 = 1e-12;

/// `psi(y) = A y^2 + y + B / y^{n-2} + C / y^{n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiProfile {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub n: usize,
}

impl PsiProfile {
    pub fn new(a: f64, b: f64, c: f64, n: usize) -> Self {
        PsiProfile { a, b, c, n }
    }

    /// `A y^2 + y + B` in complex dimension two.
    pub fn reduced(a: f64, b: f64) -> Self {
        PsiProfile::new(a, b, 0.0, 2)
    }

    /// Profile of a catalog family (`C = 0`).
    pub fn of_family(id: FamilyId, params: &FamilyParams, n: usize) -> Result<Self> {
        let (a, b) = id.profile_coeffs(params)?;
        Ok(PsiProfile::new(a, b, 0.0, n))
    }

    pub fn eval(&self, y: f64) -> f64 {
        let n = self.n as i32;
        self.a * y * y + y + self.b * y.powi(2 - n) + self.c * y.powi(1 - n)
    }

    /// `dpsi/dy`.
    pub fn deriv(&self, y: f64) -> f64 {
        let n = self.n as i32;
        let nf = self.n as f64;
        2.0 * self.a * y + 1.0 + self.b * (2.0 - nf) * y.powi(1 - n) + self.c * (1.0 - nf) * y.powi(-n)
    }

    /// Scalar curvature of the corresponding metric.
    pub fn csck_scalar(&self) -> f64 {
        -self.a * (self.n * (self.n + 1)) as f64
    }

    /// The third TYCZ coefficient vanishes exactly when `C = 0`.
    pub fn a3_zero(&self) -> bool {
        self.c == 0.0
    }

    /// Real roots of `A y^2 + y + B` (the `C = 0`, `n = 2` profile), ascending.
    pub fn roots(&self) -> Vec<f64> {
        let (a, b) = (self.a, self.b);
        if a.abs() <= CLASSIFY_TOL {
            return vec![-b];
        }
        let disc = 1.0 - 4.0 * a * b;
        if disc < -CLASSIFY_TOL {
            return vec![];
        }
        if disc.abs() <= CLASSIFY_TOL {
            return vec![-1.0 / (2.0 * a)];
        }
        let s = disc.sqrt();
        // stable quadratic formula
        let q = -0.5 * (1.0 + s);
        let mut r = vec![q / a, b / q];
        r.sort_by(f64::total_cmp);
        r
    }
}

/// `(t, y, psi)` at one point of a radial potential.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogCoords {
    pub t: f64,
    pub y: f64,
    pub psi: f64,
}

pub fn log_coords(pot: &RadialPotential, r0: f64) -> Result<LogCoords> {
    let j = pot.jet(r0, 2)?;
    let f1 = j.c[1];
    let f2 = 2.0 * j.c[2];
    Ok(LogCoords {
        t: r0.ln(),
        y: r0 * f1,
        psi: r0 * f1 + r0 * r0 * f2,
    })
}

/// Family and the parameters the profile determines; integration constants
/// (`xi`, `kappa`, and `mu` when `A = 0`) are left unset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub family: FamilyId,
    pub params: FamilyParams,
}

/// Parameters not fixed by `(A, B)`.
pub fn free_params(id: FamilyId) -> &'static [&'static str] {
    match id {
        FamilyId::Simanca | FamilyId::A03 => &["mu"],
        FamilyId::Case11a | FamilyId::Case10a => &["kappa"],
        FamilyId::Case6 | FamilyId::Case7 | FamilyId::Case8 => &["xi"],
        _ => &[],
    }
}

pub fn classify_psi(p: &PsiProfile) -> Result<Classification> {
    let (a, b) = (p.a, p.b);
    if !(a.is_finite() && b.is_finite() && p.c.is_finite()) {
        return Err(Error::DegenerateProfile(format!("non-finite profile {p:?}")));
    }
    if p.c != 0.0 {
        return Err(Error::InvalidInput("only profiles with C = 0 are classified".into()));
    }
    let tol = CLASSIFY_TOL;
    let params = FamilyParams::default();
    let out = |family, params| Ok(Classification { family, params });
    match p.n {
        1 => {
            if b.abs() > tol {
                return Err(Error::InvalidInput("n = 1 profiles must have B = 0".into()));
            }
            if a.abs() <= tol {
                out(FamilyId::Flat, params)
            } else if a < 0.0 {
                out(FamilyId::FubiniStudy, params.with_mu(-1.0 / a))
            } else {
                out(FamilyId::Hyperbolic, params.with_mu(1.0 / a))
            }
        }
        2 => {
            if a.abs() <= tol {
                return if b < -tol {
                    out(FamilyId::Simanca, params.with_lambda(-b))
                } else if b > tol {
                    out(FamilyId::A03, params.with_lambda(b))
                } else {
                    out(FamilyId::Flat, params)
                };
            }
            let mu = 1.0 / a.abs();
            let d = 1.0 - 4.0 * a * b;
            let pm = params.with_mu(mu);
            if a > 0.0 {
                if b.abs() <= tol {
                    out(FamilyId::Hyperbolic, pm)
                } else if b < 0.0 {
                    out(FamilyId::Case7, pm.with_lambda(d.sqrt() - 1.0))
                } else if (b - mu / 4.0).abs() <= tol {
                    out(FamilyId::Case10a, pm)
                } else if b < mu / 4.0 {
                    out(FamilyId::Case6, pm.with_zeta(d.sqrt()))
                } else {
                    out(FamilyId::Case11a, pm.with_lambda((b / mu - 0.25).sqrt()))
                }
            } else if b.abs() <= tol {
                out(FamilyId::FubiniStudy, pm)
            } else if b > 0.0 {
                out(FamilyId::Case8, pm.with_lambda(d.sqrt() - 1.0))
            } else if b > -mu / 4.0 + tol {
                out(FamilyId::Case9, pm.with_zeta(d.sqrt()))
            } else {
                Err(Error::NoAdmissibleFamily(format!(
                    "A={a}, B={b}: y stays outside the region where psi > 0"
                )))
            }
        }
        n => Err(Error::InvalidInput(format!("classification is only available for n <= 2, got n={n}"))),
    }
}

/// `y(t)` of a family as an expression in `t` (variable 0).
pub fn y_of_t_expr(id: FamilyId, params: &FamilyParams) -> Result<Expr> {
    let t = || Expr::var(0);
    let c = Expr::c;
    let g = |k: &str| params.get(k);
    let mu = || g("mu");
    Ok(match id {
        FamilyId::Flat => t().exp(),
        FamilyId::Simanca => mu()? * t().exp() + c(g("lambda")?),
        FamilyId::A03 => mu()? * t().exp() - c(g("lambda")?),
        FamilyId::FubiniStudy => mu()? * t().exp() / (c(1.0) + t().exp()),
        FamilyId::Hyperbolic => mu()? * t().exp() / (c(1.0) - t().exp()),
        FamilyId::Case11a => {
            let (l, k) = (g("lambda")?, g("kappa")?);
            let th = l * t() + c(k);
            mu()? * (l * (th.clone().sin() / th.cos()) - c(0.5))
        }
        FamilyId::Case6 => {
            let (z, m, xi) = (g("zeta")?, mu()?, g("xi")?);
            let e = xi * (z * t()).exp();
            (m * z) * e.clone() / (c(1.0) - e) - c(m * (1.0 - z) / 2.0)
        }
        FamilyId::Case7 => {
            let (l, m, xi) = (g("lambda")?, mu()?, g("xi")?);
            let e = xi * ((l + 1.0) * t()).exp();
            (m * (l + 1.0)) * e.clone() / (c(1.0) - e) + c(m * l / 2.0)
        }
        FamilyId::Case8 => {
            let (l, m, xi) = (g("lambda")?, mu()?, g("xi")?);
            let w = xi * ((-(l + 1.0)) * t()).exp();
            m * (c((l + 2.0) / 2.0) - (l + 1.0) * w.clone() / (c(1.0) + w))
        }
        FamilyId::Case9 => {
            let (z, m) = (g("zeta")?, mu()?);
            let w = ((-z) * t()).exp();
            m * (c((1.0 + z) / 2.0) - z * w.clone() / (c(1.0) + w))
        }
        FamilyId::Case10a => {
            let (m, k) = (mu()?, g("kappa")?);
            m * (c(1.0) / (c(k) - t()) - c(0.5))
        }
    })
}

/// Maximal open `t`-interval of a family (`log` of its radial domain).
pub fn t_interval(id: FamilyId, params: &FamilyParams) -> Result<(f64, f64)> {
    let pot = family_potential(id, params, 2)?;
    let lo = pot.lo_f64();
    let lo = if lo > 0.0 { lo.ln() } else { f64::NEG_INFINITY };
    let hi = pot.hi.map_or(f64::INFINITY, |h| h.to_f64().ln());
    Ok((lo, hi))
}

/// Closed-form `y(t)` of a catalog family.
pub fn integrate_family(id: FamilyId, params: &FamilyParams, t: f64) -> Result<f64> {
    let (lo, hi) = t_interval(id, params)?;
    // the An0vii solutions are glued from two branches at t = 0
    let excluded = id == FamilyId::Case9 && t == 0.0;
    if !(t > lo && t < hi) || excluded {
        return Err(Error::OutOfInterval { t, lo, hi });
    }
    Ok(y_of_t_expr(id, params)?.eval(&[t]))
}

/// `(y, dy/dt)` via a first-order jet of the closed form.
pub fn y_and_slope(id: FamilyId, params: &FamilyParams, t: f64) -> Result<(f64, f64)> {
    integrate_family(id, params, t)?;
    let j: Jet = y_of_t_expr(id, params)?.eval(&[Jet::variable(t, 1)]);
    Ok((j.c[0], j.c[1]))
}

/// Integrality of the roots relevant to projective inducibility:
/// `mu lambda / 2` for An0v, the roots `k, l` for An0vii.
pub fn roots_integral(id: FamilyId, params: &FamilyParams) -> Option<bool> {
    let is_int = |x: f64| (x - x.round()).abs() <= 1e-9;
    match id {
        FamilyId::Case7 => {
            let (l, m) = (params.lambda?, params.mu?);
            Some(is_int(m * l / 2.0))
        }
        FamilyId::Case9 => {
            let (z, m) = (params.zeta?, params.mu?);
            Some(is_int(m * (1.0 - z) / 2.0) && is_int(m * (1.0 + z) / 2.0))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn log_coords_examples() {
        let flat = family_potential(FamilyId::Flat, &FamilyParams::default(), 2).unwrap();
        let lc = log_coords(&flat, 2.0).unwrap();
        assert_relative_eq!(lc.t, 2f64.ln());
        assert_relative_eq!(lc.y, 2.0);
        assert_relative_eq!(lc.psi, 2.0);
        let sim = family_potential(FamilyId::Simanca, &FamilyId::Simanca.default_params(), 2).unwrap();
        let lc = log_coords(&sim, 1.0).unwrap();
        assert_eq!((lc.t, lc.y, lc.psi), (0.0, 2.0, 1.0));
        let hyp = family_potential(FamilyId::Hyperbolic, &FamilyParams::default().with_mu(3.0), 1).unwrap();
        let lc = log_coords(&hyp, 0.5).unwrap();
        assert_relative_eq!(lc.y, 3.0, max_relative = 1e-15);
        assert_relative_eq!(lc.psi, 6.0, max_relative = 1e-15);
    }

    #[test]
    fn classify_examples() {
        let c = classify_psi(&PsiProfile::reduced(0.0, -1.0)).unwrap();
        assert_eq!(c.family, FamilyId::Simanca);
        assert_eq!(c.params.lambda, Some(1.0));
        let c = classify_psi(&PsiProfile::reduced(-1.0 / 3.0, 0.0)).unwrap();
        assert_eq!(c.family, FamilyId::FubiniStudy);
        assert_relative_eq!(c.params.mu.unwrap(), 3.0, max_relative = 1e-15);
        // (1/mu)(y - mu lambda/2)(y + mu lambda/2 + mu) with mu=2, lambda=1
        // expands to y^2/2 + y - 3/2
        let c = classify_psi(&PsiProfile::reduced(0.5, -1.5)).unwrap();
        assert_eq!(c.family, FamilyId::Case7);
        assert_relative_eq!(c.params.lambda.unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(c.params.mu.unwrap(), 2.0);
        assert!(matches!(
            classify_psi(&PsiProfile::reduced(-1.0, -0.5)),
            Err(Error::NoAdmissibleFamily(_))
        ));
        assert!(matches!(
            classify_psi(&PsiProfile::reduced(f64::NAN, 0.0)),
            Err(Error::DegenerateProfile(_))
        ));
    }

    #[test]
    fn integrate_examples() {
        let hyp = FamilyParams::default().with_mu(2.0);
        assert_relative_eq!(
            integrate_family(FamilyId::Hyperbolic, &hyp, 0.5f64.ln()).unwrap(),
            2.0,
            max_relative = 1e-15
        );
        assert_eq!(integrate_family(FamilyId::Flat, &FamilyParams::default(), 0.0).unwrap(), 1.0);
        let p = FamilyParams::default().with_mu(2.0).with_kappa(1.0);
        assert_relative_eq!(integrate_family(FamilyId::Case10a, &p, 0.0).unwrap(), 1.0);
        assert!(matches!(
            integrate_family(FamilyId::Case10a, &p, 1.5),
            Err(Error::OutOfInterval { .. })
        ));
    }

    #[test]
    fn closed_form_y_matches_potential() {
        for id in FamilyId::ALL {
            let pr = id.default_params();
            let pot = family_potential(id, &pr, 2).unwrap();
            let (lo, hi) = t_interval(id, &pr).unwrap();
            let (lo, hi) = (lo.max(-3.0), hi.min(3.0));
            for i in 1..10 {
                let t = lo + (hi - lo) * i as f64 / 10.0;
                if t == 0.0 && id == FamilyId::Case9 {
                    continue;
                }
                let y = integrate_family(id, &pr, t).unwrap();
                let lc = log_coords(&pot, t.exp()).unwrap();
                assert_relative_eq!(y, lc.y, max_relative = 1e-10, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn csck_values() {
        let fs = PsiProfile::of_family(FamilyId::FubiniStudy, &FamilyParams::default().with_mu(2.0), 2).unwrap();
        assert_relative_eq!(fs.csck_scalar(), 3.0);
        assert!(fs.a3_zero());
    }

    fn family_strategy() -> impl Strategy<Value = (FamilyId, FamilyParams)> {
        (0usize..11, 0.2f64..3.0, 0.3f64..4.0, 0.2f64..2.0, 0.05f64..0.95, -1.0f64..1.0).prop_map(
            |(i, l, m, xi, z, k)| {
                let id = FamilyId::ALL[i];
                let all = FamilyParams {
                    lambda: Some(l),
                    mu: Some(m),
                    xi: Some(xi),
                    zeta: Some(z),
                    kappa: Some(k),
                };
                (id, all.restricted_to(id))
            },
        )
    }

    proptest! {
        #[test]
        fn ode_holds_along_closed_forms((id, pr) in family_strategy(), s in 0.02f64..0.98) {
            let (lo, hi) = t_interval(id, &pr).unwrap();
            // only infinite ends are cut off
            let (lo, hi) = match (lo.is_finite(), hi.is_finite()) {
                (true, true) => (lo, hi),
                (true, false) => (lo, lo.max(0.0) + 8.0),
                (false, true) => (hi.min(0.0) - 8.0, hi),
                (false, false) => (-4.0, 4.0),
            };
            let t = lo + (hi - lo) * s;
            prop_assume!(t != 0.0);
            let (y, dy) = y_and_slope(id, &pr, t).unwrap();
            let psi = PsiProfile::of_family(id, &pr, 2).unwrap();
            let want = psi.eval(y);
            prop_assert!((dy - want).abs() <= 1e-9 * want.abs().max(1e-3), "{id}: {dy} vs {want}");
        }

        #[test]
        fn classify_inverts_construction((id, pr) in family_strategy()) {
            let psi = PsiProfile::of_family(id, &pr, 2).unwrap();
            let c = classify_psi(&psi).unwrap();
            prop_assert_eq!(c.family, id);
            let free = free_params(id);
            for name in id.required() {
                if free.contains(name) {
                    continue;
                }
                let want = pr.get(name).unwrap();
                let got = c.params.get(name).unwrap();
                prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "{id} {name}: {got} vs {want}");
            }
        }
    }
}
