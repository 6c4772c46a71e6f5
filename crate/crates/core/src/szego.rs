//! Fiberwise Szegő series `sum_m t^m T_m` built from a distortion profile,
//! the function `phi(t) = (1-t)^{n+1} sum_m t^m T_m`, and the log term.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::bergman::PolyFitResult;
use crate::error::{Error, Result};
use crate::series::Jet;
use crate::special::{eulerian_coeffs, eulerian_f64, polylog};

/// One term `coefficient * m^power`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileTerm {
    pub power: i32,
    pub coefficient: f64,
}

/// `T_0` on the zero section and `T_m = sum c_s m^s` for `m >= 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionProfile {
    pub n: usize,
    #[serde(rename = "T0")]
    pub t0: f64,
    pub terms: Vec<ProfileTerm>,
}

impl DistortionProfile {
    /// Like terms are merged and zero coefficients dropped.
    pub fn new(n: usize, t0: f64, terms: &[(i32, f64)]) -> Self {
        let mut merged: Vec<ProfileTerm> = Vec::new();
        for &(power, c) in terms {
            match merged.iter_mut().find(|t| t.power == power) {
                Some(t) => t.coefficient += c,
                None => merged.push(ProfileTerm { power, coefficient: c }),
            }
        }
        merged.retain(|t| t.coefficient != 0.0);
        merged.sort_by(|a, b| b.power.cmp(&a.power));
        DistortionProfile { n, t0, terms: merged }
    }

    /// Parses expressions such as `m^2 - 2.5*m + 2.5` or `m^2 + 1/m`.
    pub fn parse(n: usize, t0: f64, s: &str) -> Result<Self> {
        Ok(DistortionProfile::new(n, t0, &parse_terms(s)?))
    }

    /// The profile a Laurent fit describes.
    pub fn from_fit(n: usize, t0: f64, fit: &PolyFitResult) -> Self {
        let terms: Vec<(i32, f64)> = fit.basis.iter().copied().zip(fit.coefficients.iter().copied()).collect();
        DistortionProfile::new(n, t0, &terms)
    }

    pub fn value(&self, m: u32) -> f64 {
        if m == 0 {
            return self.t0;
        }
        self.terms.iter().map(|t| t.coefficient * (m as f64).powi(t.power)).sum()
    }

    /// Largest `k` with a nonzero `m^{-k}` term (`0` if none).
    pub fn k0_max(&self) -> usize {
        self.terms.iter().filter(|t| t.power < 0).map(|t| (-t.power) as usize).max().unwrap_or(0)
    }

    /// Values `T_1 ... T_{m_max}` must be positive.
    pub fn check_positive(&self, m_max: u32) -> Result<()> {
        match (1..=m_max).find(|&m| !(self.value(m) > 0.0)) {
            Some(m) => Err(Error::InvalidInput(format!("T_{m} = {} is not positive", self.value(m)))),
            None => Ok(()),
        }
    }
}

impl fmt::Display for DistortionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let c = t.coefficient;
            if i > 0 {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            } else if c < 0.0 {
                write!(f, "-")?;
            }
            let a = c.abs();
            match t.power {
                0 => write!(f, "{a}")?,
                p => {
                    if a != 1.0 {
                        write!(f, "{a}*")?;
                    }
                    if p == 1 {
                        write!(f, "m")?;
                    } else {
                        write!(f, "m^{p}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl FromStr for DistortionProfile {
    type Err = Error;
    /// Dimension 2 and `T_0 = 0`; use `parse` for anything else.
    fn from_str(s: &str) -> Result<Self> {
        DistortionProfile::parse(2, 0.0, s)
    }
}

fn parse_terms(s: &str) -> Result<Vec<(i32, f64)>> {
    let bad = |why: &str| Error::InvalidInput(format!("cannot parse profile {s:?}: {why}"));
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(bad("empty"));
    }
    let mut terms = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let mut sign = 1.0;
        while i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
            if chars[i] == '-' {
                sign = -sign;
            }
            i += 1;
        }
        let (mut coef, mut power) = (sign, 0i32);
        let mut divide = false;
        loop {
            if i >= chars.len() {
                return Err(bad("dangling operator"));
            }
            let (c, p) = parse_factor(&chars, &mut i).ok_or_else(|| bad(&format!("unexpected input at position {i}")))?;
            if divide {
                if c == 0.0 {
                    return Err(bad("division by zero"));
                }
                coef /= c;
                power -= p;
            } else {
                coef *= c;
                power += p;
            }
            match chars.get(i) {
                Some('*') => divide = false,
                Some('/') => divide = true,
                _ => break,
            }
            i += 1;
        }
        terms.push((power, coef));
        match chars.get(i) {
            None | Some('+') | Some('-') => {}
            Some(c) => return Err(bad(&format!("unexpected {c:?}"))),
        }
    }
    Ok(terms)
}

/// A number, or `m` with an optional integer exponent.
fn parse_factor(chars: &[char], i: &mut usize) -> Option<(f64, i32)> {
    if chars.get(*i) == Some(&'m') {
        *i += 1;
        if chars.get(*i) != Some(&'^') {
            return Some((1.0, 1));
        }
        *i += 1;
        let paren = chars.get(*i) == Some(&'(');
        if paren {
            *i += 1;
        }
        let start = *i;
        if matches!(chars.get(*i), Some('-') | Some('+')) {
            *i += 1;
        }
        while chars.get(*i).is_some_and(|c| c.is_ascii_digit()) {
            *i += 1;
        }
        let e: i32 = chars[start..*i].iter().collect::<String>().parse().ok()?;
        if paren {
            if chars.get(*i) != Some(&')') {
                return None;
            }
            *i += 1;
        }
        return Some((1.0, e));
    }
    let start = *i;
    while let Some(&c) = chars.get(*i) {
        let exp_sign = (c == '-' || c == '+') && *i > start && matches!(chars[*i - 1], 'e' | 'E');
        if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exp_sign {
            *i += 1;
        } else {
            break;
        }
    }
    chars[start..*i].iter().collect::<String>().parse().ok().map(|v| (v, 0))
}

/// `q_k(t) = (1-t)^{k+1} sum_{m>=0} m^k t^m`, ascending coefficients.
pub fn eulerian_q(k: usize) -> Vec<BigInt> {
    eulerian_coeffs(k)
}

/// Relative gap between `q_k(t) / (1-t)^{k+1}` and brute-force partial
/// sums of `m^k t^m`, taken far enough that the tail is below `1e-15`.
pub fn eulerian_partial_sum_gap(k: usize, t: f64) -> f64 {
    let closed = eulerian_f64(k).iter().rev().fold(0.0, |acc, &c| acc * t + c) / (1.0 - t).powi(k as i32 + 1);
    let mut sum = if k == 0 { 1.0 } else { 0.0 };
    let mut m = 1u64;
    loop {
        let term = (m as f64).powi(k as i32) * t.powi(m as i32);
        sum += term;
        // once terms decrease, the rest is at most term * t / (1 - t) times a slowly varying factor
        if m as f64 > k as f64 / (1.0 - t) && term * 10.0 / (1.0 - t) < 1e-16 * sum {
            break;
        }
        m += 1;
    }
    (sum - closed).abs() / closed.abs()
}

/// `(1-t)^e` as a jet, for either sign of `e`.
fn one_minus_pow(t: &Jet, e: i32) -> Jet {
    let one_minus = t.lift(1.0).sub(t);
    let mut acc = t.lift(1.0);
    for _ in 0..e.unsigned_abs() {
        acc = acc.mul(&one_minus);
    }
    if e < 0 {
        t.lift(1.0).div(&acc)
    } else {
        acc
    }
}

/// `(1-t)^{k+1} sum_{m>=1} m^k t^m`: `q_k(t)` for `k >= 1` and `t` for `k = 0`.
fn eulerian_jet(k: usize, t: &Jet) -> Jet {
    if k == 0 {
        return t.clone();
    }
    eulerian_f64(k).iter().rev().fold(t.lift(0.0), |acc, &c| acc.mul(t).add_scalar(c))
}

/// `(1-t)^w sum_{m>=0} t^m T_m` as a jet of the given order at `t0`. Each
/// power of `m` is weighted separately, so that for `w = n + 1` the
/// polynomial part is a polynomial in `t` and nothing cancels.
fn weighted_sum_jet(profile: &DistortionProfile, t0: f64, order: usize, w: i32) -> Result<Jet> {
    if !(t0 > 0.0 && t0 < 1.0) {
        return Err(Error::InvalidInput(format!("t = {t0} must lie in (0, 1)")));
    }
    let t = Jet::variable(t0, order);
    let mut acc = one_minus_pow(&t, w).scale(profile.t0);
    for term in &profile.terms {
        let part = if term.power >= 0 {
            let k = term.power as usize;
            eulerian_jet(k, &t).mul(&one_minus_pow(&t, w - k as i32 - 1))
        } else {
            polylog_jet((-term.power) as usize, t0, order).mul(&one_minus_pow(&t, w))
        };
        acc = acc.add(&part.scale(term.coefficient));
    }
    Ok(acc)
}

/// `Li_q(t) = sum_{m>=1} t^m / m^q` as a jet of the given order, from
/// `t d/dt Li_q = Li_{q-1}` and the value of `Li_q` at the base point.
fn polylog_jet(q: usize, t0: f64, order: usize) -> Jet {
    let t = Jet::variable(t0, order);
    let mut j = eulerian_jet(0, &t).mul(&one_minus_pow(&t, -1));
    for s in 1..=q {
        let d = j.div(&t);
        let mut c = vec![0.0; order + 1];
        c[0] = polylog(s as i64, t0);
        for k in 1..=order {
            c[k] = d.c[k - 1] / k as f64;
        }
        j = Jet::from_coeffs(t0, c);
    }
    j
}

/// `sum_{m>=0} t^m T_m` as a jet of the given order at `t0`.
pub fn szego_sum_jet(profile: &DistortionProfile, t0: f64, order: usize) -> Result<Jet> {
    weighted_sum_jet(profile, t0, order, 0)
}

/// `phi` and its derivatives at `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiValue {
    pub t: f64,
    /// `phi^{(h)}(t)` for `h = 0..=order`
    pub derivatives: Vec<f64>,
}

impl PhiValue {
    pub fn value(&self) -> f64 {
        self.derivatives[0]
    }
}

/// `phi(t) = (1-t)^{n+1} sum_m t^m T_m` with derivatives up to `order`
/// (`None` means `n + k0_max`). Positive powers of `m` use Eulerian
/// polynomials, negative ones polylogarithms, so no truncation is involved.
pub fn phi_series(profile: &DistortionProfile, t: f64, order: Option<usize>) -> Result<PhiValue> {
    let order = order.unwrap_or(profile.n + profile.k0_max());
    let phi = weighted_sum_jet(profile, t, order, profile.n as i32 + 1)?;
    Ok(PhiValue { t, derivatives: (0..=order).map(|h| phi.derivative(h)).collect() })
}

/// `t_i = 1 - 2^{-i}` for `i = 1..=count`.
pub fn default_t_grid(count: usize) -> Vec<f64> {
    (1..=count).map(|i| 1.0 - 0.5f64.powi(i as i32)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundedness {
    Bounded,
    DivergesToMinusInfinity,
    DivergesToPlusInfinity,
}

impl Boundedness {
    pub fn diverges(self) -> bool {
        self != Boundedness::Bounded
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiProbe {
    pub classification: Boundedness,
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// Classifies a sequence sampled at `t = 1 - 2^{-i}`: a logarithmic
/// divergence shows as increments of steady sign that do not decay, a
/// bounded limit as increments that shrink geometrically.
pub fn classify_growth(values: &[f64]) -> Result<Boundedness> {
    if values.len() < 6 {
        return Err(Error::InvalidInput("at least six grid points are needed".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite value on the grid".into()));
    }
    let d: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let tail = &d[d.len() - 4..];
    let scale = values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let same_sign = tail.iter().all(|x| *x > 0.0) || tail.iter().all(|x| *x < 0.0);
    let steady = tail.windows(2).all(|w| w[1].abs() >= 0.8 * w[0].abs());
    if same_sign && steady && tail[3].abs() > 1e-9 * scale {
        return Ok(if tail[3] < 0.0 { Boundedness::DivergesToMinusInfinity } else { Boundedness::DivergesToPlusInfinity });
    }
    Ok(Boundedness::Bounded)
}

/// `psi_h(t) = ((1-t)^{n+1} sum_{m>=1} t^m / m^{k0+h})^{(n+k0)}` on a grid
/// approaching `1`, classified by `classify_growth`.
pub fn psi_h_probe(n: usize, k0: usize, h: usize, t_grid: &[f64]) -> Result<PsiProbe> {
    if k0 == 0 {
        return Err(Error::InvalidInput("k0 must be positive".into()));
    }
    let profile = DistortionProfile::new(n, 0.0, &[(-((k0 + h) as i32), 1.0)]);
    let order = n + k0;
    let values: Vec<f64> = t_grid
        .iter()
        .map(|&t| phi_series(&profile, t, Some(order)).map(|p| p.derivatives[order]))
        .collect::<Result<_>>()?;
    Ok(PsiProbe { classification: classify_growth(&values)?, t_grid: t_grid.to_vec(), values })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogTermFit {
    /// `P(0)`, the coefficient of `rho^{-n-1}` at the boundary
    pub a_boundary: f64,
    pub b_estimate: f64,
    pub fit_window: (f64, f64),
    /// max relative misfit of `rho^{n+1} S` on the held-out points
    pub residual: f64,
    /// coefficients of `P` in powers of `rho`
    pub p_coefficients: Vec<f64>,
}

/// Fits `S(t) = P(rho) rho^{-n-1} + b log rho`, `rho = 1 - t`, over
/// `points` samples of the window spaced evenly in `log rho`. The fit is
/// done on `rho^{n+1} S`, which is smooth, and every fourth sample is held
/// out for the residual.
pub fn logterm_fit(profile: &DistortionProfile, n: usize, window: (f64, f64), points: usize) -> Result<LogTermFit> {
    let (t_lo, t_hi) = window;
    if !(0.0 < t_lo && t_lo < t_hi && t_hi < 1.0) {
        return Err(Error::InvalidInput(format!("window ({t_lo}, {t_hi}) must lie inside (0, 1)")));
    }
    let ncols = n + 3;
    if points < 2 * ncols {
        return Err(Error::InvalidInput(format!("{points} samples are too few for {ncols} unknowns")));
    }
    let (l0, l1) = ((1.0 - t_hi).ln(), (1.0 - t_lo).ln());
    let rhos: Vec<f64> = (0..points).map(|i| (l0 + (l1 - l0) * i as f64 / (points - 1) as f64).exp()).collect();
    let ys: Vec<f64> = rhos
        .iter()
        .map(|&rho| weighted_sum_jet(profile, 1.0 - rho, 0, n as i32 + 1).map(|j| j.c[0]))
        .collect::<Result<_>>()?;
    let row = |rho: f64| -> Vec<f64> {
        let mut r: Vec<f64> = (0..=n + 1).map(|k| rho.powi(k as i32)).collect();
        r.push(rho.powi(n as i32 + 1) * rho.ln());
        r
    };
    let fit_idx: Vec<usize> = (0..points).filter(|i| i % 4 != 2).collect();
    let mut a = DMatrix::<f64>::zeros(fit_idx.len(), ncols);
    let mut rhs = DVector::<f64>::zeros(fit_idx.len());
    for (k, &i) in fit_idx.iter().enumerate() {
        for (c, v) in row(rhos[i]).into_iter().enumerate() {
            a[(k, c)] = v;
        }
        rhs[k] = ys[i];
    }
    let scale: Vec<f64> = (0..ncols).map(|c| a.column(c).norm().max(f64::MIN_POSITIVE)).collect();
    for (c, s) in scale.iter().enumerate() {
        a.column_mut(c).scale_mut(1.0 / s);
    }
    let svd = a.svd(true, true);
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { svd.singular_values.max() / smin } else { f64::INFINITY };
    if condition > crate::bergman::MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let x = svd.solve(&rhs, 0.0).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let coef: Vec<f64> = x.iter().zip(&scale).map(|(v, s)| v / s).collect();
    let residual = (0..points)
        .filter(|i| i % 4 == 2)
        .map(|i| {
            let pred: f64 = row(rhos[i]).iter().zip(&coef).map(|(r, c)| r * c).sum();
            (pred - ys[i]).abs() / ys[i].abs().max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max);
    Ok(LogTermFit {
        a_boundary: coef[0],
        b_estimate: coef[n + 2],
        fit_window: window,
        residual,
        p_coefficients: coef[..=n + 1].to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eulerian_examples() {
        let v = |k| eulerian_q(k).iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        assert_eq!(v(0), "1");
        assert_eq!(v(2), "0,1,1");
        assert_eq!(v(3), "0,1,4,1");
        for k in 0..=8 {
            assert!(eulerian_partial_sum_gap(k, 0.9) < 1e-12, "k={k}");
        }
    }

    #[test]
    fn parses_profiles() {
        let p: DistortionProfile = "m^2 - 2.5*m + 2.5".parse().unwrap();
        assert_eq!(p.terms, vec![
            ProfileTerm { power: 2, coefficient: 1.0 },
            ProfileTerm { power: 1, coefficient: -2.5 },
            ProfileTerm { power: 0, coefficient: 2.5 },
        ]);
        let q: DistortionProfile = "m^2 + 1/m - 3e-1*m^(-2)".parse().unwrap();
        assert_eq!(q.k0_max(), 2);
        assert_relative_eq!(q.value(2), 4.0 + 0.5 - 0.075);
        assert_eq!(q.to_string(), "m^2 + m^-1 - 0.3*m^-2");
        assert!("m^".parse::<DistortionProfile>().is_err());
        assert!("2 +".parse::<DistortionProfile>().is_err());
        assert!("x".parse::<DistortionProfile>().is_err());
    }

    #[test]
    fn phi_examples() {
        let sim = DistortionProfile::new(2, 0.0, &[(2, 1.0)]);
        assert_relative_eq!(phi_series(&sim, 0.5, None).unwrap().value(), 0.75, max_relative = 1e-14);
        let one = DistortionProfile::new(0, 1.0, &[(0, 1.0)]);
        for t in [0.1, 0.5, 0.99] {
            assert_relative_eq!(phi_series(&one, t, None).unwrap().value(), 1.0, max_relative = 1e-13);
        }
        let p = DistortionProfile::new(2, 0.0, &[(2, 1.0), (-1, 1.0)]);
        assert_relative_eq!(phi_series(&p, 0.9, None).unwrap().value(), 1.71 + 0.001 * 10f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn phi_derivatives_match_finite_differences() {
        let p = DistortionProfile::new(2, 0.5, &[(2, 1.0), (1, -0.3), (-1, 0.7), (-3, 0.2)]);
        let v = phi_series(&p, 0.6, Some(2)).unwrap();
        let h = 1e-5;
        let f = |t| phi_series(&p, t, Some(0)).unwrap().value();
        assert_relative_eq!(v.derivatives[1], (f(0.6 + h) - f(0.6 - h)) / (2.0 * h), max_relative = 1e-8);
        assert_relative_eq!(v.derivatives[2], (f(0.6 + h) - 2.0 * f(0.6) + f(0.6 - h)) / (h * h), max_relative = 1e-4);
    }

    #[test]
    fn psi_h_classification() {
        let grid = default_t_grid(24);
        for n in 1..=2 {
            for k0 in 1..=2 {
                let c0 = psi_h_probe(n, k0, 0, &grid).unwrap().classification;
                let want = if n % 2 == 0 { Boundedness::DivergesToMinusInfinity } else { Boundedness::DivergesToPlusInfinity };
                assert_eq!(c0, want, "n={n} k0={k0}");
                for h in 1..=2 {
                    assert_eq!(psi_h_probe(n, k0, h, &grid).unwrap().classification, Boundedness::Bounded, "n={n} k0={k0} h={h}");
                }
            }
        }
    }

    #[test]
    fn polynomial_profiles_keep_phi_bounded() {
        let p = DistortionProfile::new(2, 0.0, &[(2, 1.0), (1, -2.5), (0, 2.5)]);
        for h in 0..=5 {
            let vals: Vec<f64> = default_t_grid(20).iter().map(|&t| phi_series(&p, t, Some(5)).unwrap().derivatives[h]).collect();
            assert_eq!(classify_growth(&vals).unwrap(), Boundedness::Bounded, "h={h}");
        }
    }

    #[test]
    fn logterm_examples() {
        let w = (0.5, 0.999);
        let sim = DistortionProfile::new(2, 0.0, &[(2, 1.0)]);
        let f = logterm_fit(&sim, 2, w, 64).unwrap();
        assert!(f.b_estimate.abs() <= 1e-6, "{f:?}");
        let syn = DistortionProfile::new(2, 0.0, &[(2, 1.0), (-1, 1.0)]);
        let f = logterm_fit(&syn, 2, w, 64).unwrap();
        assert!((f.b_estimate + 1.0).abs() <= 1e-3, "{f:?}");
        let fs = DistortionProfile::new(1, 1.0, &[(1, 1.0), (0, 1.0)]);
        assert!(logterm_fit(&fs, 1, w, 64).unwrap().b_estimate.abs() <= 1e-6);
    }
}
