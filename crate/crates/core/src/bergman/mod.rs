//! Weighted monomial norms, the reproducing kernel on the diagonal and the
//! distortion function `T_m = e^{-m Phi} K_m`.
//!
//! Norms are normalised so that the angular integrals drop out: for a
//! radial surface potential `N(j, k) = j! k! / (j+k+1)! * I(j+k)` with
//! `I(d) = int r^{d+1} e^{-m f} f' (r f')' dr`, and on a curve
//! `N(j) = int r^j e^{-m f} (r f')' dr`. Every constant factor dropped here
//! cancels against the same factor in the kernel, so `T` is unaffected.

mod closed;
mod fit;
mod radial;
mod reinhardt;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::{FamilyParams, Point, Potential, RadialPotential, ReinhardtPotential};
use crate::quad::LogSum;
use crate::series::Precision;
use crate::special::ln_factorial;

pub use closed::{an0v_ln_integral, pdomain_ln_norm, radial_ln_integral};
pub use fit::{fit_laurent, fit_poly_in_m, PolyFitResult, MAX_CONDITION};
pub use radial::{degree_range, end_slopes, DegreeRange, EndSlopes, RadialQuad, EXPONENT_SLACK};
pub use reinhardt::{margins, Margins, ReinhardtQuad};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    Quadrature,
    GammaClosedForm,
    BetaClosedForm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NormValue {
    Finite { value: f64, ln_value: f64 },
    Divergent { certificate: String },
}

impl NormValue {
    fn from_ln(l: f64) -> Self {
        NormValue::Finite { value: l.exp(), ln_value: l }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            NormValue::Finite { value, .. } => Some(*value),
            NormValue::Divergent { .. } => None,
        }
    }

    pub fn ln_value(&self) -> Option<f64> {
        match self {
            NormValue::Finite { ln_value, .. } => Some(*ln_value),
            NormValue::Divergent { .. } => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, NormValue::Divergent { .. })
    }
}

/// `index` is `(j, k)`; on a curve `k` is always `0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialNorm {
    pub index: (usize, usize),
    pub m: u32,
    pub value: NormValue,
    pub method: NormMethod,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BergmanOptions {
    /// relative tolerance of the kernel sum
    pub tol: f64,
    /// tolerance of each `ln N`
    pub quad_tol: f64,
    /// degrees per summation block
    pub degree_cap: usize,
    /// give up beyond this total degree
    pub hard_cap: usize,
    /// use Gamma/Beta forms when the family has one
    pub prefer_closed_form: bool,
    pub precision: Precision,
}

impl Default for BergmanOptions {
    fn default() -> Self {
        BergmanOptions {
            tol: 1e-10,
            quad_tol: 1e-11,
            degree_cap: 64,
            hard_cap: 4096,
            prefer_closed_form: true,
            precision: Precision::from_env(),
        }
    }
}

impl BergmanOptions {
    pub fn quadrature_only(mut self) -> Self {
        self.prefer_closed_form = false;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self.quad_tol = (tol * 0.1).max(1e-13);
        self
    }
}

/// A distortion value with the degree where the sum stopped and the
/// estimated relative size of what was left out.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionValue {
    pub value: f64,
    pub truncation_degree: usize,
    pub tail_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionSeries {
    pub point: Point,
    pub m_grid: Vec<u32>,
    pub values: Vec<f64>,
    pub truncation_degree: usize,
    pub tail_bound: f64,
}

type NormEntry = (std::result::Result<f64, String>, NormMethod);

/// Norm and kernel engine for one potential. Quadrature nodes and norms are
/// cached, so repeated points and degrees are cheap.
pub struct Bergman {
    pot: Potential,
    opts: BergmanOptions,
    rquad: Option<RadialQuad>,
    xquad: Option<ReinhardtQuad>,
    ranges: HashMap<u64, std::result::Result<DegreeRange, String>>,
    slopes: Option<EndSlopes>,
    radial_cache: HashMap<(u64, usize), NormEntry>,
    pair_cache: HashMap<(u64, usize, usize), NormEntry>,
}

impl Bergman {
    pub fn new(pot: &Potential, opts: BergmanOptions) -> Self {
        let (rquad, xquad) = match pot {
            Potential::Radial(p) => (Some(RadialQuad::new(p, opts.precision)), None),
            Potential::Reinhardt(p) => (None, Some(ReinhardtQuad::new(p, opts.precision))),
        };
        Bergman {
            pot: pot.clone(),
            opts,
            rquad,
            xquad,
            ranges: HashMap::new(),
            slopes: None,
            radial_cache: HashMap::new(),
            pair_cache: HashMap::new(),
        }
    }

    pub fn potential(&self) -> &Potential {
        &self.pot
    }

    fn radial_pot(&self) -> Option<&RadialPotential> {
        match &self.pot {
            Potential::Radial(p) => Some(p),
            Potential::Reinhardt(_) => None,
        }
    }

    fn reinhardt_pot(&self) -> Option<&ReinhardtPotential> {
        match &self.pot {
            Potential::Reinhardt(p) => Some(p),
            Potential::Radial(_) => None,
        }
    }

    /// Range of radial degrees with finite norms at weight `m`.
    pub fn degree_range(&mut self, m: f64) -> std::result::Result<DegreeRange, String> {
        let pot = self.radial_pot().expect("radial potential").clone();
        let shift = if pot.n == 2 { 1.0 } else { 0.0 };
        if self.slopes.is_none() {
            self.slopes = Some(end_slopes(&pot));
        }
        let sl = self.slopes.expect("set above");
        self.ranges.entry(m.to_bits()).or_insert_with(|| degree_range(&sl, m, shift)).clone()
    }

    /// `ln I(d)` (curve: `ln N(d)`) for many degrees.
    fn radial_ln_integrals(&mut self, m: f64, degrees: &[usize]) -> Result<Vec<NormEntry>> {
        let pot = self.radial_pot().expect("radial potential").clone();
        let range = self.degree_range(m);
        let mut todo = Vec::new();
        for &d in degrees {
            if self.radial_cache.contains_key(&(m.to_bits(), d)) {
                continue;
            }
            if self.opts.prefer_closed_form && m > 0.0 {
                if let Some((v, how)) = radial_ln_integral(&pot, m, d) {
                    let v = v.map(|l| l - m * pot.offset);
                    self.radial_cache.insert((m.to_bits(), d), (v, how));
                    continue;
                }
            }
            match &range {
                Err(cert) => {
                    self.radial_cache.insert((m.to_bits(), d), (Err(cert.clone()), NormMethod::Quadrature));
                }
                Ok(r) if !r.contains(d) => {
                    let cert = if d < r.d_min {
                        format!("degree {d} is below the first integrable degree {}", r.d_min)
                    } else {
                        format!("degree {d} is above the last integrable degree {}", r.d_max.unwrap_or(0))
                    };
                    self.radial_cache.insert((m.to_bits(), d), (Err(cert), NormMethod::Quadrature));
                }
                Ok(_) => todo.push(d),
            }
        }
        if !todo.is_empty() {
            let tol = self.opts.quad_tol;
            let q = self.rquad.as_mut().expect("radial engine");
            let vals = q.ln_integrals(m, &todo, tol)?;
            for (d, v) in todo.into_iter().zip(vals) {
                self.radial_cache.insert((m.to_bits(), d), (Ok(v), NormMethod::Quadrature));
            }
        }
        Ok(degrees.iter().map(|d| self.radial_cache[&(m.to_bits(), *d)].clone()).collect())
    }

    /// Convergence of the `(j, k)` norm on a Reinhardt domain.
    fn reinhardt_convergence(&self, m: f64, k: usize) -> std::result::Result<Margins, String> {
        let pot = self.reinhardt_pot().expect("Reinhardt potential");
        if let Some(Err(cert)) = pdomain_ln_norm(pot, m, 0, k) {
            return Err(cert);
        }
        let mg = margins(pot, m, k);
        if !(mg.x1_hi > EXPONENT_SLACK) {
            return Err(format!("integrand ~ (x1_max - x1)^{:.6} at the outer boundary", mg.x1_hi - 1.0));
        }
        if !(mg.u_hi > EXPONENT_SLACK) {
            return Err(format!("integrand ~ (upper - x2)^{:.6} at the upper boundary", mg.u_hi - 1.0));
        }
        Ok(mg)
    }

    fn pair_ln_norms(&mut self, m: f64, idx: &[(usize, usize)]) -> Result<Vec<NormEntry>> {
        let pot = self.reinhardt_pot().expect("Reinhardt potential").clone();
        let mut todo = Vec::new();
        let mut k_min = usize::MAX;
        let mut mg_min: Option<Margins> = None;
        for &(j, k) in idx {
            let key = (m.to_bits(), j, k);
            if self.pair_cache.contains_key(&key) {
                continue;
            }
            if self.opts.prefer_closed_form && m > 0.0 {
                if let Some(v) = pdomain_ln_norm(&pot, m, j, k) {
                    self.pair_cache.insert(key, (v.map(|l| l - m * pot.offset), NormMethod::BetaClosedForm));
                    continue;
                }
            }
            match self.reinhardt_convergence(m, k) {
                Err(cert) => {
                    self.pair_cache.insert(key, (Err(cert), NormMethod::Quadrature));
                }
                Ok(mg) => {
                    if k < k_min {
                        k_min = k;
                        mg_min = Some(mg);
                    }
                    todo.push((j, k));
                }
            }
        }
        if let Some(mg) = mg_min {
            let tol = self.opts.quad_tol;
            let q = self.xquad.as_mut().expect("Reinhardt engine");
            let vals = q.ln_norms(m, &todo, &mg, tol)?;
            for ((j, k), v) in todo.into_iter().zip(vals) {
                self.pair_cache.insert((m.to_bits(), j, k), (Ok(v), NormMethod::Quadrature));
            }
        }
        Ok(idx.iter().map(|&(j, k)| self.pair_cache[&(m.to_bits(), j, k)].clone()).collect())
    }

    /// Norms at real weight `m` (`m = 0` gives the unweighted volume form).
    fn ln_norms_at(&mut self, m: f64, idx: &[(usize, usize)]) -> Result<Vec<NormEntry>> {
        match &self.pot {
            Potential::Radial(p) => {
                let n = p.n;
                if n == 1 && idx.iter().any(|&(_, k)| k != 0) {
                    return Err(Error::InvalidInput("a curve has one-index monomials".into()));
                }
                let degrees: Vec<usize> = idx.iter().map(|&(j, k)| j + k).collect();
                let raw = self.radial_ln_integrals(m, &degrees)?;
                Ok(raw
                    .into_iter()
                    .zip(idx)
                    .map(|((v, how), &(j, k))| {
                        let ang = if n == 2 { ln_factorial(j) + ln_factorial(k) - ln_factorial(j + k + 1) } else { 0.0 };
                        (v.map(|l| l + ang), how)
                    })
                    .collect())
            }
            Potential::Reinhardt(_) => self.pair_ln_norms(m, idx),
        }
    }

    pub fn norm(&mut self, m: u32, index: (usize, usize)) -> Result<MonomialNorm> {
        check_m(m)?;
        let (v, method) = self.ln_norms_at(m as f64, &[index])?.remove(0);
        let value = match v {
            Ok(l) => NormValue::from_ln(l),
            Err(certificate) => NormValue::Divergent { certificate },
        };
        Ok(MonomialNorm { index, m, value, method })
    }

    /// `ln` of the summed kernel terms of each total degree in `d0..d1`
    /// at `point`, without the `e^{-m Phi}` factor.
    fn degree_terms(&mut self, m: f64, point: &Point, d0: usize, d1: usize) -> Result<Vec<f64>> {
        let (x1, x2) = point.coords();
        match self.pot.clone() {
            Potential::Radial(p) => {
                let r = point.radius2();
                let ln_r = r.ln();
                let degrees: Vec<usize> = (d0..d1).collect();
                let vals = self.radial_ln_integrals(m, &degrees)?;
                Ok(degrees
                    .iter()
                    .zip(vals)
                    .map(|(&d, (v, _))| match v {
                        Ok(l) => {
                            let w = if p.n == 2 { ((d + 1) as f64).ln() } else { 0.0 };
                            let pw = if d == 0 { 0.0 } else { d as f64 * ln_r };
                            w + pw - l
                        }
                        Err(_) => f64::NEG_INFINITY,
                    })
                    .collect())
            }
            Potential::Reinhardt(_) => {
                let mut idx = Vec::new();
                for d in d0..d1 {
                    for k in 0..=d {
                        let j = d - k;
                        if (x2 == 0.0 && k > 0) || (x1 == 0.0 && j > 0) {
                            continue;
                        }
                        idx.push((j, k));
                    }
                }
                let vals = self.pair_ln_norms(m, &idx)?;
                let mut out = vec![LogSum::default(); d1 - d0];
                for (&(j, k), (v, _)) in idx.iter().zip(vals) {
                    if let Ok(l) = v {
                        let a = if j == 0 { 0.0 } else { j as f64 * x1.ln() };
                        let b = if k == 0 { 0.0 } else { k as f64 * x2.ln() };
                        out[j + k - d0].add(a + b - l);
                    }
                }
                Ok(out.iter().map(LogSum::ln).collect())
            }
        }
    }

    fn potential_at(&self, point: &Point) -> Result<f64> {
        match &self.pot {
            Potential::Radial(p) => {
                let r = point.radius2();
                p.check(r)?;
                Ok(p.value(r))
            }
            Potential::Reinhardt(p) => {
                let (a, b) = point.coords();
                p.check(a, b)?;
                Ok(p.value(a, b))
            }
        }
    }

    /// `T_m(point)`, summed in increasing total degree until the estimated
    /// tail is below `tol` relative to the sum.
    pub fn distortion(&mut self, m: u32, point: &Point) -> Result<DistortionValue> {
        check_m(m)?;
        let m = m as f64;
        let phi = self.potential_at(point)?;
        let d_max = match &self.pot {
            Potential::Radial(_) => match self.degree_range(m) {
                Ok(r) => r.d_max,
                Err(_) => return Err(Error::EmptySpace),
            },
            Potential::Reinhardt(_) => None,
        };
        let opts = self.opts;
        let mut acc = LogSum::default();
        let mut prev_block = f64::NEG_INFINITY;
        let mut last_terms: (f64, f64) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut d0 = 0;
        loop {
            let mut d1 = d0 + opts.degree_cap.max(2);
            if let Some(h) = d_max {
                d1 = d1.min(h + 1);
            }
            let terms = self.degree_terms(m, point, d0, d1)?;
            let mut block = LogSum::default();
            for &t in &terms {
                block.add(t);
                acc.add(t);
            }
            if let [.., a, b] = terms.as_slice() {
                last_terms = (*a, *b);
            }
            let total = acc.ln();
            if d0 == 0 && total == f64::NEG_INFINITY && matches!(self.pot, Potential::Reinhardt(_)) {
                return Err(Error::EmptySpace);
            }
            let value = (total - m * phi).exp();
            if d_max.is_some_and(|h| d1 > h) {
                return Ok(DistortionValue { value, truncation_degree: d1 - 1, tail_bound: 0.0 });
            }
            if total.is_finite() {
                let bl = block.ln();
                let (a, b) = last_terms;
                // an exactly vanishing block (point on a coordinate axis) ends the sum
                let term_ratio = if b == f64::NEG_INFINITY { 0.0 } else { (b - a).exp() };
                let block_ratio = if bl == f64::NEG_INFINITY { 0.0 } else { (bl - prev_block).exp() };
                if term_ratio < 1.0 && block_ratio < 1.0 {
                    let rho = term_ratio.max(block_ratio.powf(1.0 / (d1 - d0) as f64));
                    let tail = if rho == 0.0 { 0.0 } else { (b - total).exp() * rho / (1.0 - rho) };
                    if tail <= opts.tol && (bl - total).exp() <= opts.tol.sqrt() {
                        return Ok(DistortionValue { value, truncation_degree: d1 - 1, tail_bound: tail });
                    }
                }
                prev_block = bl;
            }
            d0 = d1;
            if d0 >= opts.hard_cap {
                return Err(Error::NoConvergence { degree: d0 });
            }
        }
    }

    /// Partial sums of `T_m(point)` up to each total degree below `d_end`.
    pub fn partial_sums(&mut self, m: u32, point: &Point, d_end: usize) -> Result<Vec<f64>> {
        check_m(m)?;
        let phi = self.potential_at(point)?;
        let terms = self.degree_terms(m as f64, point, 0, d_end)?;
        let mut acc = LogSum::default();
        Ok(terms
            .into_iter()
            .map(|t| {
                acc.add(t);
                (acc.ln() - m as f64 * phi).exp()
            })
            .collect())
    }

    /// `1 / Volume` when the constants are integrable for the metric volume
    /// form, `None` when the volume is infinite.
    pub fn t0(&mut self) -> Result<Option<f64>> {
        let (v, _) = self.ln_norms_at(0.0, &[(0, 0)])?.remove(0);
        Ok(v.ok().map(|l| (-l).exp()))
    }
}

fn check_m(m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidInput("m must be a positive integer".into()));
    }
    Ok(())
}

pub fn monomial_norm(pot: &Potential, m: u32, index: (usize, usize), opts: BergmanOptions) -> Result<MonomialNorm> {
    Bergman::new(pot, opts).norm(m, index)
}

pub fn distortion(pot: &Potential, m: u32, point: &Point, opts: BergmanOptions) -> Result<DistortionValue> {
    Bergman::new(pot, opts).distortion(m, point)
}

/// `T_m(point)` for every `m` of the grid; the weights are independent and
/// run in parallel.
pub fn distortion_series(pot: &Potential, m_grid: &[u32], point: &Point, opts: BergmanOptions) -> Result<DistortionSeries> {
    let vals: Vec<DistortionValue> = m_grid
        .par_iter()
        .map(|&m| Bergman::new(pot, opts).distortion(m, point))
        .collect::<Result<_>>()?;
    Ok(DistortionSeries {
        point: *point,
        m_grid: m_grid.to_vec(),
        values: vals.iter().map(|v| v.value).collect(),
        truncation_degree: vals.iter().map(|v| v.truncation_degree).max().unwrap_or(0),
        tail_bound: vals.iter().map(|v| v.tail_bound).fold(0.0, f64::max),
    })
}

/// Closed-form An0v norm at `m = 1`.
pub fn norm_an0v_closed(params: &FamilyParams, index: (usize, usize)) -> NormValue {
    let (j, k) = index;
    match an0v_ln_integral(params, 1.0, j + k) {
        Ok(l) => NormValue::from_ln(l + ln_factorial(j) + ln_factorial(k) - ln_factorial(j + k + 1)),
        Err(certificate) => NormValue::Divergent { certificate },
    }
}

/// `1 / Volume`, or `None` for infinite volume.
pub fn t0(pot: &Potential) -> Result<Option<f64>> {
    Bergman::new(pot, BergmanOptions::default().quadrature_only()).t0()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{family_potential, pdomain_potential, FamilyId};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fam(id: FamilyId, p: FamilyParams, n: usize) -> Potential {
        Potential::Radial(family_potential(id, &p, n).unwrap())
    }

    #[test]
    fn closed_norm_examples() {
        let flat1 = fam(FamilyId::Flat, FamilyParams::default(), 1);
        let q = BergmanOptions::default().quadrature_only();
        // int_0^inf e^{-r} r^2 dr
        let n = monomial_norm(&flat1, 1, (2, 0), q).unwrap();
        assert_relative_eq!(n.value.value().unwrap(), 2.0, max_relative = 1e-10);
        assert_eq!(n.method, NormMethod::Quadrature);
        let sim = fam(FamilyId::Simanca, FamilyId::Simanca.default_params(), 2);
        for o in [q, BergmanOptions::default()] {
            let n = monomial_norm(&sim, 2, (1, 1), o).unwrap();
            assert_relative_eq!(n.value.value().unwrap(), 0.125, max_relative = 1e-10);
        }
        let pr = FamilyParams::default().with_lambda(2.0).with_mu(4.0).with_xi(0.5);
        let an = fam(FamilyId::Case7, pr, 2);
        assert!(!monomial_norm(&an, 1, (0, 3), q).unwrap().value.is_divergent());
        assert!(!monomial_norm(&an, 1, (0, 2), q).unwrap().value.is_divergent());
        assert!(monomial_norm(&an, 1, (0, 1), q).unwrap().value.is_divergent());
    }

    #[test]
    fn an0v_closed_values() {
        let p = FamilyParams::default().with_lambda(2.0).with_mu(4.0).with_xi(1.0);
        // s = 0: 24 * [2 B(1,2) + 4 B(2,2)] * 4!/5! with B(1,2) = 1/2, B(2,2) = 1/6
        let want = 24.0 * (2.0 * 0.5 + 4.0 / 6.0) / 5.0;
        assert_relative_eq!(norm_an0v_closed(&p, (4, 0)).value().unwrap(), want, max_relative = 1e-13);
        assert!(norm_an0v_closed(&p, (0, 0)).is_divergent());
        let p2 = FamilyParams::default().with_lambda(2.0).with_mu(2.0).with_xi(1.0);
        assert!(norm_an0v_closed(&p2, (5, 5)).is_divergent());
    }

    #[test]
    fn quadrature_matches_closed_forms() {
        let cases = [
            fam(FamilyId::Flat, FamilyParams::default(), 1),
            fam(FamilyId::Flat, FamilyParams::default(), 2),
            fam(FamilyId::Simanca, FamilyId::Simanca.default_params(), 2),
            fam(FamilyId::Simanca, FamilyParams::default().with_lambda(2.0).with_mu(0.5), 2),
            fam(FamilyId::Hyperbolic, FamilyParams::default().with_mu(1.7), 1),
            fam(FamilyId::Hyperbolic, FamilyParams::default().with_mu(2.5), 2),
            fam(FamilyId::FubiniStudy, FamilyParams::default().with_mu(2.0), 1),
            fam(FamilyId::FubiniStudy, FamilyParams::default().with_mu(6.0), 2),
            fam(FamilyId::Case7, FamilyParams::default().with_lambda(2.0).with_mu(4.0).with_xi(0.5), 2),
        ];
        for pot in &cases {
            let n = pot.dim();
            let mut a = Bergman::new(pot, BergmanOptions::default().quadrature_only());
            let mut b = Bergman::new(pot, BergmanOptions::default());
            for m in [1u32, 2] {
                for d in 0..=12usize {
                    let idx = if n == 2 { (d / 2, d - d / 2) } else { (d, 0) };
                    let x = a.norm(m, idx).unwrap();
                    let y = b.norm(m, idx).unwrap();
                    assert_ne!(y.method, NormMethod::Quadrature);
                    match (x.value.ln_value(), y.value.ln_value()) {
                        (Some(u), Some(v)) => assert!((u - v).abs() < 1e-8, "{} m={m} d={d}: {u} vs {v}", pot.label()),
                        (None, None) => {}
                        _ => panic!("{} m={m} d={d}: {:?} vs {:?}", pot.label(), x.value, y.value),
                    }
                }
            }
        }
    }

    #[test]
    fn distortion_examples() {
        let sim = fam(FamilyId::Simanca, FamilyId::Simanca.default_params(), 2);
        let t = distortion(&sim, 3, &Point::R(1.0), BergmanOptions::default().quadrature_only()).unwrap();
        assert_relative_eq!(t.value, 9.0, max_relative = 1e-9);
        assert!(t.tail_bound <= 1e-10);
        let hyp = fam(FamilyId::Hyperbolic, FamilyParams::default().with_mu(2.0), 1);
        for r in [0.0, 0.3, 0.9] {
            let t = distortion(&hyp, 3, &Point::R(r), BergmanOptions::default()).unwrap();
            assert_relative_eq!(t.value, 2.5, max_relative = 1e-9);
        }
        let pd = Potential::Reinhardt(pdomain_potential(2.0).unwrap());
        assert_eq!(distortion(&pd, 2, &Point::X(0.0, 0.0), BergmanOptions::default()), Err(Error::EmptySpace));
    }

    #[test]
    fn fubini_study_sum_is_finite() {
        let fs = fam(FamilyId::FubiniStudy, FamilyParams::default().with_mu(1.0), 2);
        let t = distortion(&fs, 3, &Point::R(2.0), BergmanOptions::default()).unwrap();
        assert_eq!(t.truncation_degree, 3);
        assert_eq!(t.tail_bound, 0.0);
        // dim of degree-3 polynomials in 2 variables over the volume 1/2
        assert_relative_eq!(t.value, 10.0 / 0.5, max_relative = 1e-10);
    }

    #[test]
    fn pdomain_quadrature_distortion_matches_closed_norms() {
        let pd = Potential::Reinhardt(pdomain_potential(0.5).unwrap());
        let pt = Point::X(0.2, 0.3);
        let a = distortion(&pd, 4, &pt, BergmanOptions::default()).unwrap();
        let b = distortion(&pd, 4, &pt, BergmanOptions::default().quadrature_only()).unwrap();
        assert_relative_eq!(a.value, b.value, max_relative = 1e-8);
    }

    #[test]
    fn volume_flag() {
        let fs = fam(FamilyId::FubiniStudy, FamilyParams::default().with_mu(1.0), 2);
        // volume of CP^2 in these units: I(0) at m = 0 is B(2, 1) = 1/2
        assert_relative_eq!(t0(&fs).unwrap().unwrap(), 2.0, max_relative = 1e-9);
        let flat = fam(FamilyId::Flat, FamilyParams::default(), 2);
        assert_eq!(t0(&flat).unwrap(), None);
    }

    #[test]
    fn real_zero_weight_rejected() {
        let flat = fam(FamilyId::Flat, FamilyParams::default(), 1);
        assert!(matches!(distortion(&flat, 0, &Point::R(1.0), BergmanOptions::default()), Err(Error::InvalidInput(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn radial_norms_are_symmetric(j in 0usize..15, k in 0usize..15, m in 1u32..5) {
            let sim = fam(FamilyId::Simanca, FamilyId::Simanca.default_params(), 2);
            let mut e = Bergman::new(&sim, BergmanOptions::default().quadrature_only());
            let a = e.norm(m, (j, k)).unwrap();
            let b = e.norm(m, (k, j)).unwrap();
            prop_assert_eq!(a.value, b.value);
        }

        #[test]
        fn gauge_shift_scales_norms_and_keeps_distortion(c in -3.0f64..3.0, m in 1u32..5, r in 0.05f64..4.0) {
            let sim = fam(FamilyId::Simanca, FamilyId::Simanca.default_params(), 2);
            let shifted = sim.shifted(c);
            for o in [BergmanOptions::default(), BergmanOptions::default().quadrature_only()] {
                let a = monomial_norm(&sim, m, (2, 3), o).unwrap().value.ln_value().unwrap();
                let b = monomial_norm(&shifted, m, (2, 3), o).unwrap().value.ln_value().unwrap();
                prop_assert!((b - (a - m as f64 * c)).abs() < 1e-10);
                let ta = distortion(&sim, m, &Point::R(r), o).unwrap().value;
                let tb = distortion(&shifted, m, &Point::R(r), o).unwrap().value;
                prop_assert!((ta - tb).abs() <= 1e-9 * ta);
            }
        }

        #[test]
        fn partial_sums_are_monotone(m in 1u32..6, r in 0.01f64..5.0) {
            let sim = fam(FamilyId::Simanca, FamilyId::Simanca.default_params(), 2);
            let mut e = Bergman::new(&sim, BergmanOptions::default());
            let s = e.partial_sums(m, &Point::R(r), 40).unwrap();
            // up to rounding in the running log-sum
            prop_assert!(s.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-14)));
        }
    }
}
