//! Balanced condition at `m = 1`: the kernel on the diagonal must be a
//! constant multiple of `e^Phi`, coefficient by coefficient.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bergman::{Bergman, BergmanOptions};
use crate::error::{Error, Result};
use crate::potentials::{Potential, RadialPotential, ReinhardtPotential};
use crate::series::Scalar;

/// Samples per circle in the Cauchy coefficient sums.
const SAMPLES: usize = 256;
/// Relative level below which a Cauchy coefficient counts as zero.
const ZERO_TOL: f64 = 1e-9;
/// Agreement required between the ratios of the two expansions.
pub const RATIO_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BalancedReason {
    /// a monomial of this degree has finite norm, but `e^Phi` has no
    /// such term
    MissingMonomialDegree { degree: usize },
    CoefficientMismatch { degree: usize, lhs: f64, rhs: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BalancedStatus {
    Balanced { constant: f64, checked_to: usize },
    NotBalanced { reason: BalancedReason },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalancedVerdict {
    pub status: BalancedStatus,
    /// every degree with finite norms and no term in `e^Phi`
    pub missing_degrees: Vec<usize>,
    /// kernel coefficient per degree (`None` when the norms diverge)
    pub kernel_coeffs: Vec<Option<f64>>,
    /// coefficient of `e^Phi` per degree (`0` when judged absent)
    pub exp_coeffs: Vec<f64>,
}

impl BalancedVerdict {
    pub fn is_balanced(&self) -> bool {
        matches!(self.status, BalancedStatus::Balanced { .. })
    }
}

/// One Cauchy circle: samples of `e^f` on `|r| = rho`.
struct Circle {
    rho: f64,
    max_abs: f64,
    vals: Vec<Complex64>,
}

fn circle(pot: &RadialPotential, rho: f64) -> Result<Circle> {
    let mut vals = Vec::with_capacity(SAMPLES);
    for i in 0..SAMPLES {
        let th = 2.0 * std::f64::consts::PI * i as f64 / SAMPLES as f64;
        let z = Complex64::from_polar(rho, th);
        let v: Complex64 = pot.expr.eval(&[z]);
        let v = v.exp();
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NotExpandable(format!("e^f is singular on |r| = {rho}")));
        }
        vals.push(v);
    }
    // across the negative axis a non-integer power would jump
    let eps = 1e-9;
    let side = |s: f64| -> Complex64 {
        let v: Complex64 = pot.expr.eval(&[Complex64::from_polar(rho, std::f64::consts::PI + s)]);
        v.exp()
    };
    let (a, b) = (side(eps), side(-eps));
    if (a - b).norm() > 1e-6 * a.norm().max(b.norm()).max(f64::MIN_POSITIVE) {
        return Err(Error::NotExpandable("e^f is not single-valued around r = 0".into()));
    }
    let max_abs = vals.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    Ok(Circle { rho, max_abs, vals })
}

/// `(a_d rho^d, ln(max|e^f| / rho^d))` on one circle.
fn cauchy(c: &Circle, d: usize) -> (f64, f64) {
    let mut s = Complex64::new(0.0, 0.0);
    for (i, v) in c.vals.iter().enumerate() {
        let th = -2.0 * std::f64::consts::PI * ((i * d) % SAMPLES) as f64 / SAMPLES as f64;
        s += v * Complex64::from_polar(1.0, th);
    }
    (s.re / SAMPLES as f64, c.max_abs.ln() - d as f64 * c.rho.ln())
}

/// Taylor coefficients of `e^f` in `r` up to `max_degree`, each computed
/// on the circle that minimises the Cauchy bound `max|e^f| / rho^d`. A
/// coefficient below `ZERO_TOL` times that bound is reported as `0`.
pub fn exp_coeffs_radial(pot: &RadialPotential, max_degree: usize) -> Result<Vec<f64>> {
    if pot.lo_f64() != 0.0 {
        return Err(Error::NotExpandable("the domain does not reach r = 0".into()));
    }
    let r_cap = pot.hi.map_or(f64::INFINITY, |h| 0.9 * h.to_f64());
    let mut radii: Vec<f64> = (0..40).map(|i| 0.05 * 1.25f64.powi(i)).filter(|&r| r < r_cap).collect();
    if radii.is_empty() {
        radii.push(0.5 * r_cap);
    }
    let circles: Vec<Circle> = radii.iter().map(|&r| circle(pot, r)).collect::<Result<_>>()?;
    // the same low coefficients from two radii, or the function is not a power series
    let (c1, c2) = (&circles[0], &circles[circles.len() / 2]);
    for d in 0..=max_degree.min(3) {
        let (a1, l1) = cauchy(c1, d);
        let (a2, l2) = cauchy(c2, d);
        let (x1, x2) = (a1 / c1.rho.powi(d as i32), a2 / c2.rho.powi(d as i32));
        let scale = (l1.min(l2)).exp();
        if (x1 - x2).abs() > 1e-6 * scale.max(x1.abs()) {
            return Err(Error::NotExpandable(format!("coefficient of r^{d} depends on the radius ({x1} vs {x2})")));
        }
    }
    Ok((0..=max_degree)
        .map(|d| {
            let best = circles
                .iter()
                .map(|c| (c, cauchy(c, d)))
                .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
                .expect("at least one circle");
            let (c, (a, ln_bound)) = best;
            if a.abs() <= ZERO_TOL * ln_bound.exp() {
                0.0
            } else {
                a / c.rho.powi(d as i32)
            }
        })
        .collect())
}

/// Two-variable Taylor coefficients `a[j][k]` of `e^Phi` on a polydisc
/// inside the domain, for `j + k <= max_degree`.
pub fn exp_coeffs_reinhardt(pot: &ReinhardtPotential, max_degree: usize) -> Result<Vec<Vec<f64>>> {
    let n = 64usize.max(2 * max_degree + 2);
    let rho1 = 0.3 * pot.x1_max.to_f64();
    let mut u_min = f64::INFINITY;
    for i in 0..n {
        let z = Complex64::from_polar(rho1, 2.0 * std::f64::consts::PI * i as f64 / n as f64);
        let u: Complex64 = pot.upper.eval(&[z]);
        u_min = u_min.min(u.norm());
    }
    let rho2 = 0.5 * u_min;
    let mut vals = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut max_abs = 0.0f64;
    for (a, row) in vals.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            let z1 = Complex64::from_polar(rho1, 2.0 * std::f64::consts::PI * a as f64 / n as f64);
            let z2 = Complex64::from_polar(rho2, 2.0 * std::f64::consts::PI * b as f64 / n as f64);
            let phi: Complex64 = pot.expr.eval(&[z1, z2]);
            *v = phi.exp();
            if !v.re.is_finite() {
                return Err(Error::NotExpandable("e^Phi is singular on the polydisc".into()));
            }
            max_abs = max_abs.max(v.norm());
        }
    }
    let mut out = vec![vec![0.0; max_degree + 1]; max_degree + 1];
    for j in 0..=max_degree {
        for k in 0..=max_degree - j {
            let mut s = Complex64::new(0.0, 0.0);
            for (a, row) in vals.iter().enumerate() {
                for (b, v) in row.iter().enumerate() {
                    let th = -2.0 * std::f64::consts::PI * (((a * j) % n) as f64 + ((b * k) % n) as f64) / n as f64;
                    s += v * Complex64::from_polar(1.0, th);
                }
            }
            let a = s.re / (n * n) as f64;
            out[j][k] = if a.abs() <= ZERO_TOL * max_abs { 0.0 } else { a / (rho1.powi(j as i32) * rho2.powi(k as i32)) };
        }
    }
    Ok(out)
}

/// Compares kernel and `e^Phi` coefficients; `pairs` lists
/// `(degree, kernel, exp)` in the order they should be reported.
fn verdict(pairs: &[(usize, Option<f64>, f64)], max_degree: usize) -> BalancedStatus {
    let missing: Vec<usize> = pairs.iter().filter(|p| p.1.is_some() && p.2 == 0.0).map(|p| p.0).collect();
    if !missing.is_empty() {
        // prefer the degree just below the leading term of e^Phi
        let lead = pairs.iter().filter(|p| p.2 != 0.0).map(|p| p.0).min();
        let degree = lead
            .and_then(|l| missing.iter().copied().filter(|&d| d < l).max())
            .unwrap_or(missing[0]);
        return BalancedStatus::NotBalanced { reason: BalancedReason::MissingMonomialDegree { degree } };
    }
    let mut constant: Option<f64> = None;
    for &(d, k, e) in pairs {
        match (k, e) {
            (None, e) if e != 0.0 => {
                return BalancedStatus::NotBalanced { reason: BalancedReason::CoefficientMismatch { degree: d, lhs: 0.0, rhs: e } };
            }
            (Some(k), e) if e != 0.0 => {
                let c = k / e;
                match constant {
                    None => constant = Some(c),
                    Some(c0) if (c - c0).abs() > RATIO_TOL * c0.abs() => {
                        return BalancedStatus::NotBalanced { reason: BalancedReason::CoefficientMismatch { degree: d, lhs: k, rhs: c0 * e } };
                    }
                    _ => {}
                }
            }
            _ => {}
        }
    }
    match constant {
        Some(c) => BalancedStatus::Balanced { constant: c, checked_to: max_degree },
        None => BalancedStatus::NotBalanced { reason: BalancedReason::CoefficientMismatch { degree: 0, lhs: 0.0, rhs: 0.0 } },
    }
}

/// Balanced check at `m = 1` up to total degree `max_degree`.
pub fn balanced_check(pot: &Potential, max_degree: usize, opts: BergmanOptions) -> Result<BalancedVerdict> {
    let mut eng = Bergman::new(pot, opts);
    match pot {
        Potential::Radial(p) => {
            let exp = exp_coeffs_radial(p, max_degree)?;
            let mut kern = Vec::with_capacity(max_degree + 1);
            for d in 0..=max_degree {
                // on x2 = 0 the degree-d part of the kernel is x1^d / N(d, 0)
                let nv = eng.norm(1, (d, 0))?;
                kern.push(nv.value.ln_value().map(|l| (-l).exp()));
            }
            let pairs: Vec<_> = (0..=max_degree).map(|d| (d, kern[d], exp[d])).collect();
            let missing = pairs.iter().filter(|p| p.1.is_some() && p.2 == 0.0).map(|p| p.0).collect();
            Ok(BalancedVerdict { status: verdict(&pairs, max_degree), missing_degrees: missing, kernel_coeffs: kern, exp_coeffs: exp })
        }
        Potential::Reinhardt(p) => {
            let exp = exp_coeffs_reinhardt(p, max_degree)?;
            let mut pairs = Vec::new();
            let mut kern_deg = vec![None; max_degree + 1];
            let mut exp_deg = vec![0.0; max_degree + 1];
            for d in 0..=max_degree {
                for j in (0..=d).rev() {
                    let k = d - j;
                    let nv = eng.norm(1, (j, k))?;
                    let kv = nv.value.ln_value().map(|l| (-l).exp());
                    pairs.push((d, kv, exp[j][k]));
                    if let Some(v) = kv {
                        *kern_deg[d].get_or_insert(0.0) += v;
                    }
                    exp_deg[d] += exp[j][k];
                }
            }
            let missing: Vec<usize> = {
                let mut v: Vec<usize> = pairs.iter().filter(|p| p.1.is_some() && p.2 == 0.0).map(|p| p.0).collect();
                v.dedup();
                v
            };
            Ok(BalancedVerdict { status: verdict(&pairs, max_degree), missing_degrees: missing, kernel_coeffs: kern_deg, exp_coeffs: exp_deg })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{family_potential, FamilyId, FamilyParams};
    use crate::special::ln_factorial;
    use approx::assert_relative_eq;

    fn fam(id: FamilyId, p: FamilyParams, n: usize) -> Potential {
        Potential::Radial(family_potential(id, &p, n).unwrap())
    }

    #[test]
    fn exp_coefficients_of_simple_functions() {
        let Potential::Radial(flat) = fam(FamilyId::Flat, FamilyParams::default(), 1) else { unreachable!() };
        let c = exp_coeffs_radial(&flat, 15).unwrap();
        for (d, v) in c.iter().enumerate() {
            assert_relative_eq!(*v, (-ln_factorial(d)).exp(), max_relative = 1e-10);
        }
        let Potential::Radial(an) = fam(FamilyId::Case7, FamilyParams::default().with_lambda(2.0).with_mu(4.0).with_xi(0.5), 2) else {
            unreachable!()
        };
        // r^4 (1 - r^3/2)^{-4} = r^4 + 2 r^7 + ...
        let c = exp_coeffs_radial(&an, 8).unwrap();
        assert_eq!(&c[..4], &[0.0; 4]);
        assert_relative_eq!(c[4], 1.0, max_relative = 1e-10);
        assert_eq!((c[5], c[6]), (0.0, 0.0));
        assert_relative_eq!(c[7], 2.0, max_relative = 1e-10);
    }

    #[test]
    fn branch_point_is_not_expandable() {
        let Potential::Radial(an) = fam(FamilyId::Case7, FamilyParams::default().with_lambda(1.0).with_mu(1.0).with_xi(0.5), 2) else {
            unreachable!()
        };
        assert!(matches!(exp_coeffs_radial(&an, 4), Err(Error::NotExpandable(_))));
    }

    #[test]
    fn flat_and_simanca_are_balanced() {
        for (pot, c) in [
            (fam(FamilyId::Flat, FamilyParams::default(), 1), 1.0),
            (fam(FamilyId::Simanca, FamilyId::Simanca.default_params(), 2), 1.0),
        ] {
            let v = balanced_check(&pot, 12, BergmanOptions::default()).unwrap();
            match v.status {
                BalancedStatus::Balanced { constant, .. } => assert_relative_eq!(constant, c, max_relative = 1e-9),
                s => panic!("{}: {s:?}", pot.label()),
            }
        }
    }

    #[test]
    fn an0v_misses_the_degree_below_its_leading_term() {
        let pot = fam(FamilyId::Case7, FamilyParams::default().with_lambda(2.0).with_mu(4.0).with_xi(0.5), 2);
        let v = balanced_check(&pot, 10, BergmanOptions::default()).unwrap();
        assert_eq!(v.status, BalancedStatus::NotBalanced { reason: BalancedReason::MissingMonomialDegree { degree: 3 } });
        assert_eq!(v.missing_degrees, vec![2, 3, 5, 6, 8, 9]);
    }
}
