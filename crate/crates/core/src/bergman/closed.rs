//! Gamma and Beta closed forms for the weighted monomial norms of the
//! families where the radial integral can be done by hand.
//!
//! Radial `n = 2` norms are expressed through
//! `I(d) = int r^{d+1} e^{-m f} f' (r f')' dr`, with `N(j, k) = j! k! I(d) / (d+1)!`;
//! on a curve `N(j) = int r^j e^{-m f} (r f')' dr`.

use crate::potentials::{FamilyId, FamilyParams, RadialPotential, ReinhardtPotential};
use crate::special::{ln_beta, ln_gamma};

use super::NormMethod;

/// `ln I(d)` (or `ln N(j)` on a curve) when a closed form exists. The inner
/// `Err` carries the divergence certificate.
pub fn radial_ln_integral(pot: &RadialPotential, m: f64, d: usize) -> Option<(std::result::Result<f64, String>, NormMethod)> {
    let (id, p) = pot.family?;
    let df = d as f64;
    let mu = |p: &FamilyParams| p.mu.unwrap_or(1.0);
    let beta = |a: f64, b: f64, pre: f64| match ln_beta(a, b) {
        Some(v) => Ok(pre.ln() + v),
        None => Err(format!("Beta({a}, {b}) diverges")),
    };
    let out = match (id, pot.n) {
        (FamilyId::Flat, 1) => (Ok(ln_gamma(df + 1.0) - (df + 1.0) * m.ln()), NormMethod::GammaClosedForm),
        (FamilyId::Flat, _) => (Ok(ln_gamma(df + 2.0) - (df + 2.0) * m.ln()), NormMethod::GammaClosedForm),
        (FamilyId::Hyperbolic, 1) => (beta(df + 1.0, m * mu(&p) - 1.0, mu(&p)), NormMethod::BetaClosedForm),
        (FamilyId::Hyperbolic, _) => (beta(df + 2.0, m * mu(&p) - 2.0, mu(&p).powi(2)), NormMethod::BetaClosedForm),
        (FamilyId::FubiniStudy, 1) => (beta(df + 1.0, m * mu(&p) + 1.0 - df, mu(&p)), NormMethod::BetaClosedForm),
        (FamilyId::FubiniStudy, _) => (beta(df + 2.0, m * mu(&p) + 1.0 - df, mu(&p).powi(2)), NormMethod::BetaClosedForm),
        (FamilyId::Simanca, 2) => {
            let (l, mu) = (p.lambda?, p.mu?);
            let e = df + 1.0 - m * l;
            if e <= 0.0 {
                (Err(format!("Gamma({e}) at r -> 0")), NormMethod::GammaClosedForm)
            } else {
                let mm = (m * mu).ln();
                // mu [ mu Gamma(e+1) (m mu)^{-(e+1)} + lambda Gamma(e) (m mu)^{-e} ]
                let a = mu.ln() + ln_gamma(e + 1.0) - (e + 1.0) * mm;
                let b = l.ln() + ln_gamma(e) - e * mm;
                let hi = a.max(b);
                (Ok(mu.ln() + hi + ((a - hi).exp() + (b - hi).exp()).ln()), NormMethod::GammaClosedForm)
            }
        }
        (FamilyId::Case7, 2) => (an0v_ln_integral(&p, m, d), NormMethod::BetaClosedForm),
        _ => return None,
    };
    Some(out)
}

/// `ln I(d)` for the An0v potential:
/// `(mu^2 (lambda+1)/2) xi^{-s} [lambda B(s+1, m mu - 2) + (lambda+2) B(s+2, m mu - 2)]`
/// with `s = (2d - m mu lambda) / (2 (lambda + 1))`.
pub fn an0v_ln_integral(p: &FamilyParams, m: f64, d: usize) -> std::result::Result<f64, String> {
    let (l, mu, xi) = match (p.lambda, p.mu, p.xi) {
        (Some(l), Some(mu), Some(xi)) => (l, mu, xi),
        _ => return Err("missing lambda, mu or xi".into()),
    };
    let s = (2.0 * d as f64 - m * mu * l) / (2.0 * (l + 1.0));
    let c = m * mu - 2.0;
    if c <= 0.0 {
        return Err(format!("(1 - xi r^(lambda+1))^{} is not integrable at the outer boundary", c - 1.0));
    }
    if s <= -1.0 {
        return Err(format!("integrand ~ r^{} at r -> 0", (l + 1.0) * (s + 1.0) - 1.0));
    }
    let a = l.ln() + ln_beta(s + 1.0, c).ok_or("Beta diverges")?;
    let b = (l + 2.0).ln() + ln_beta(s + 2.0, c).ok_or("Beta diverges")?;
    let hi = a.max(b);
    Ok((mu * mu * (l + 1.0) / 2.0).ln() - s * xi.ln() + hi + ((a - hi).exp() + (b - hi).exp()).ln())
}

/// `ln N(j, k) = ln [p B(j+1, p(k+m) - 1) B(k+1, m - 2)]` on the p-domain.
pub fn pdomain_ln_norm(pot: &ReinhardtPotential, m: f64, j: usize, k: usize) -> Option<std::result::Result<f64, String>> {
    let p = pot.p?;
    let kf = k as f64;
    if m <= 2.0 {
        return Some(Err(format!("(1 - u)^{} is not integrable at the boundary x2 = (1-x1)^p", m - 3.0)));
    }
    if p * (kf + m) <= 1.0 {
        return Some(Err(format!("(1 - x1)^{} is not integrable at x1 -> 1", p * (kf + m) - 2.0)));
    }
    let a = ln_beta(j as f64 + 1.0, p * (kf + m) - 1.0)?;
    let b = ln_beta(kf + 1.0, m - 2.0)?;
    Some(Ok(p.ln() + a + b))
}
