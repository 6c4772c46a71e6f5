//! The acceptance suite: one pass/fail line per criterion, shared by the
//! `acceptance` test target and `tycz selftest`.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bergman::{fit_laurent, norm_an0v_closed, Bergman, BergmanOptions};
use crate::error::Result;
use crate::geometry::curvature_report;
use crate::potentials::{family_potential, pdomain_c, pdomain_potential, FamilyId, FamilyParams, Point, Potential};
use crate::projectivity::{
    balanced_check, default_grid, derivative_sign_scan, integer_root_test_for, numerator, pk_identity_defect, pk_recursion,
    BalancedReason, BalancedStatus, InducibilityStatus, Poly, RootVerdict,
};
use crate::psi::{log_coords, PsiProfile};
use crate::series::Precision;
use crate::szego::{default_t_grid, eulerian_q, logterm_fit, psi_h_probe, Boundedness, DistortionProfile};

/// Criteria that fail by design: the stated targets disagree with the
/// computed kernel, and the code is left to report that.
pub const KNOWN_FAILURES: &[u32] = &[2, 4];

const SEED: u64 = 20240611;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn known_failure(&self) -> bool {
        !self.passed && KNOWN_FAILURES.contains(&self.id)
    }

    pub fn line(&self) -> String {
        let tag = match (self.passed, self.known_failure()) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        format!("[{tag}] {:>2}. {}: {} ({:.2} s)", self.id, self.title, self.detail, self.seconds)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Relative error, or absolute when the target is below one.
fn rel_or_abs(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn radial(id: FamilyId, p: FamilyParams, n: usize) -> Result<Potential> {
    Ok(Potential::Radial(family_potential(id, &p, n)?))
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn ok(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

pub const TITLES: [&str; 10] = [
    "Simanca distortion equals m^2",
    "p-domain distortion against the stated polynomial",
    "closed-form constants (flat, hyperbolic, Fubini-Study)",
    "first coefficient equals scal/2; p-domain a2 against the stated value",
    "finite expansion: negative powers vanish",
    "cscK catalog: constant scal and psi ODE",
    "inducibility obstructions",
    "balanced failure and Beta norms",
    "P_k identity and symbolic P_2, P_3",
    "Szego probes",
];

pub fn run_criterion(id: u32) -> CriterionResult {
    let start = Instant::now();
    let out = match id {
        1 => c1(),
        2 => c2(),
        3 => c3(),
        4 => c4(),
        5 => c5(),
        6 => c6(),
        7 => c7(),
        8 => c8(),
        9 => c9(),
        10 => c10(),
        _ => ok(false, format!("no criterion {id}")),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (passed, detail) = match out {
        Ok(o) => (o.passed, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult { id, title: TITLES.get(id as usize - 1).copied().unwrap_or("?"), passed, detail, seconds }
}

pub fn run_all() -> Vec<CriterionResult> {
    (1..=10).map(run_criterion).collect()
}

fn c1() -> Result<Outcome> {
    let start = Instant::now();
    let pot = radial(FamilyId::Simanca, FamilyId::Simanca.default_params(), 2)?;
    let mut eng = Bergman::new(&pot, BergmanOptions::default().quadrature_only());
    let mut worst = 0.0f64;
    for r in [0.1, 1.0, 10.0] {
        for m in 1..=15u32 {
            let t = eng.distortion(m, &Point::R(r))?.value;
            worst = worst.max(rel(t, (m * m) as f64));
        }
    }
    let secs = start.elapsed();
    ok(
        worst <= 1e-7 && secs <= Duration::from_secs(30),
        format!("worst rel err {worst:.1e} over m = 1..15, r in {{0.1, 1, 10}}"),
    )
}

/// Four points `(x1, u U(x1))` with `u <= 1/2`.
fn pdomain_points(p: f64) -> Vec<(f64, f64)> {
    [(0.0f64, 0.0f64), (0.3, 0.3), (0.1, 0.5), (0.5, 0.25)].iter().map(|&(x1, u)| (x1, u * (1.0 - x1).powf(p))).collect()
}

fn c2() -> Result<Outcome> {
    let start = Instant::now();
    let per_p: Vec<Result<(f64, f64, usize)>> = [0.5, 2.0, 3.0]
        .par_iter()
        .map(|&p| {
            let pot = Potential::Reinhardt(pdomain_potential(p)?);
            let mut eng = Bergman::new(&pot, BergmanOptions::default().quadrature_only());
            let (mut worst_stated, mut worst_corrected, mut empty) = (0.0f64, 0.0f64, 0usize);
            for (x1, x2) in pdomain_points(p) {
                let c = pdomain_c(p, x1, x2);
                for m in 1..=8u32 {
                    let mf = m as f64;
                    let stated = mf * mf + (c - 3.0) * mf + c + 2.0;
                    match eng.distortion(m, &Point::X(x1, x2)) {
                        Ok(t) => {
                            worst_stated = worst_stated.max(rel(t.value, stated));
                            worst_corrected = worst_corrected.max(rel(t.value, (mf - 2.0) * (mf - 1.0 + c)));
                        }
                        Err(crate::Error::EmptySpace) => {
                            empty += 1;
                            worst_stated = f64::INFINITY;
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
            Ok((worst_stated, worst_corrected, empty))
        })
        .collect();
    let mut stated = 0.0f64;
    let mut corrected = 0.0f64;
    let mut empty = 0;
    for r in per_p {
        let (s, c, e) = r?;
        stated = stated.max(s);
        corrected = corrected.max(c);
        empty += e;
    }
    let secs = start.elapsed();
    ok(
        stated <= 1e-5 && secs <= Duration::from_secs(120),
        format!(
            "worst rel err vs m^2+(c-3)m+c+2 is {stated:.1e}, {empty} (p, point, m) cases have an empty space (m <= 2); \
             vs (m-2)(m-1+c) for m >= 3 the worst is {corrected:.1e}"
        ),
    )
}

/// A criterion 3 case with its expected `T_m`.
struct ClosedCase {
    label: String,
    pot: Potential,
    points: Vec<f64>,
    want: Box<dyn Fn(f64) -> f64>,
    tol: f64,
}

fn closed_form_cases() -> Result<Vec<ClosedCase>> {
    let d = FamilyParams::default();
    let mut v = Vec::new();
    for n in [1usize, 2] {
        let pot = radial(FamilyId::Flat, d, n)?;
        v.push(ClosedCase { label: format!("flat n={n}"), pot, points: vec![0.1, 1.0, 10.0], want: Box::new(move |m: f64| m.powi(n as i32)), tol: 1e-9 });
    }
    for mu in [1.5, 2.0, 4.0] {
        let pot = radial(FamilyId::Hyperbolic, d.with_mu(mu), 1)?;
        v.push(ClosedCase { label: format!("hyperbolic mu={mu}"), pot, points: vec![0.1, 0.5, 0.9], want: Box::new(move |m| m - 1.0 / mu), tol: 1e-8 });
    }
    // on a curve the Fubini-Study scale is the family's mu
    for mu in [1.0, 2.0] {
        let pot = radial(FamilyId::FubiniStudy, d.with_mu(mu), 1)?;
        v.push(ClosedCase { label: format!("Fubini-Study mu={mu}"), pot, points: vec![0.1, 1.0, 10.0], want: Box::new(move |m| m + 1.0 / mu), tol: 1e-8 });
    }
    Ok(v)
}

fn c3() -> Result<Outcome> {
    let mut worst_msg = String::new();
    let mut passed = true;
    for case in closed_form_cases()? {
        let mut eng = Bergman::new(&case.pot, BergmanOptions::default());
        let mut worst = 0.0f64;
        for &r in &case.points {
            for m in 1..=10u32 {
                worst = worst.max(rel(eng.distortion(m, &Point::R(r))?.value, (case.want)(m as f64)));
            }
        }
        if worst > case.tol {
            passed = false;
        }
        worst_msg.push_str(&format!("{}: {worst:.1e}; ", case.label));
    }
    ok(passed, format!("max rel err per case over m = 1..10: {}", worst_msg.trim_end_matches("; ")))
}

fn c4() -> Result<Outcome> {
    let mut radial_ok = true;
    let mut worst_radial = 0.0f64;
    for ClosedCase { pot, points, .. } in closed_form_cases()? {
        let n = pot.dim() as i32;
        let mut eng = Bergman::new(&pot, BergmanOptions::default());
        let ms: Vec<f64> = (1..=12).map(f64::from).collect();
        let ys: Vec<f64> = ms.iter().map(|&m| eng.distortion(m as u32, &Point::R(points[0])).map(|d| d.value)).collect::<Result<_>>()?;
        let basis: Vec<i32> = (-2..=n).rev().collect();
        let fit = fit_laurent(&ms, &ys, &basis, 1e-7)?;
        let got = fit.coefficient(n - 1).unwrap_or(f64::NAN);
        let scal_half = curvature_report(&pot, &Point::R(points[0]))?.a1;
        let e = rel_or_abs(got, scal_half);
        worst_radial = worst_radial.max(e);
        radial_ok &= e <= 1e-5;
    }
    let mut worst_a2 = 0.0f64;
    let mut worst_a2_corrected = 0.0f64;
    for p in [0.5, 2.0, 3.0] {
        let pot = Potential::Reinhardt(pdomain_potential(p)?);
        for (x1, x2) in pdomain_points(p) {
            let c = pdomain_c(p, x1, x2);
            let a2 = curvature_report(&pot, &Point::X(x1, x2))?.a2;
            worst_a2 = worst_a2.max(rel(a2, c + 2.0));
            worst_a2_corrected = worst_a2_corrected.max(rel_or_abs(a2, 2.0 - 2.0 * c));
        }
    }
    ok(
        radial_ok && worst_a2 <= 1e-4,
        format!(
            "fitted m^(n-1) coefficient vs scal/2: worst {worst_radial:.1e}; p-domain a2 vs c+2: worst rel err {worst_a2:.1e} \
             (vs 2-2c: {worst_a2_corrected:.1e})"
        ),
    )
}

fn c5() -> Result<Outcome> {
    let basis = [2, 1, 0, -1, -2];
    let sim = radial(FamilyId::Simanca, FamilyId::Simanca.default_params(), 2)?;
    let mut eng = Bergman::new(&sim, BergmanOptions::default());
    let ms: Vec<f64> = (1..=12).map(f64::from).collect();
    let ys: Vec<f64> = ms.iter().map(|&m| eng.distortion(m as u32, &Point::R(1.0)).map(|d| d.value)).collect::<Result<_>>()?;
    let f_sim = fit_laurent(&ms, &ys, &basis, 1e-7)?;
    // the p-domain space is empty for m <= 2
    let pd = Potential::Reinhardt(pdomain_potential(2.0)?);
    let mut eng = Bergman::new(&pd, BergmanOptions::default());
    let ms: Vec<f64> = (3..=12).map(f64::from).collect();
    let ys: Vec<f64> = ms.iter().map(|&m| eng.distortion(m as u32, &Point::X(0.0, 0.0)).map(|d| d.value)).collect::<Result<_>>()?;
    let f_pd = fit_laurent(&ms, &ys, &basis, 1e-7)?;
    let neg = |f: &crate::bergman::PolyFitResult| f.coefficient(-1).unwrap().abs().max(f.coefficient(-2).unwrap().abs());
    let (a, b) = (neg(&f_sim), neg(&f_pd));
    ok(a <= 1e-7 && b <= 1e-7, format!("max |negative-power coefficient|: Simanca {a:.1e}, p-domain (p=2, origin, m = 3..12) {b:.1e}"))
}

fn c6() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut worst_scal, mut worst_ode) = (0.0f64, 0.0f64);
    for id in FamilyId::ALL {
        for _ in 0..3 {
            let params = id.sample_params([rng.random(), rng.random(), rng.random()]);
            let f = family_potential(id, &params, 2)?;
            let prof = PsiProfile::of_family(id, &params, 2)?;
            let want = prof.csck_scalar();
            let (lo, hi) = (f.lo_f64(), f.hi.map_or(f.lo_f64() + 10.0, |_| f.hi_f64()));
            let pot = Potential::Radial(f.clone());
            for i in 1..=20 {
                let r = lo + (hi - lo) * i as f64 / 21.0;
                let s = curvature_report(&pot, &Point::R(r))?.scal;
                worst_scal = worst_scal.max(rel_or_abs(s, want));
                let lc = log_coords(&f, r)?;
                worst_ode = worst_ode.max(rel_or_abs(lc.psi, prof.eval(lc.y)));
            }
        }
    }
    ok(
        worst_scal <= 1e-8 && worst_ode <= 1e-9,
        format!("11 families x 3 parameter sets x 20 points: scal defect {worst_scal:.1e}, ODE residual {worst_ode:.1e}"),
    )
}

fn scan_h(id: FamilyId, p: FamilyParams) -> Result<Option<usize>> {
    let pot = family_potential(id, &p, 2)?;
    let v = derivative_sign_scan(&pot, &default_grid(&pot, 31), 40, Precision::Double)?;
    Ok(match v.status {
        InducibilityStatus::Obstructed { h, .. } => Some(h),
        InducibilityStatus::NoObstructionFound { .. } => None,
    })
}

fn c7() -> Result<Outcome> {
    let d = FamilyParams::default();
    let a = scan_h(FamilyId::Case9, d.with_zeta(1.0 / 3.0).with_mu(3.0))?;
    let b = scan_h(FamilyId::Case7, d.with_lambda(1.5).with_mu(4.0).with_xi(0.5))?;
    let an = family_potential(FamilyId::Case7, &d.with_lambda(1.0).with_mu(1.0).with_xi(0.5), 2)?;
    let c = matches!(integer_root_test_for(&an)?, RootVerdict::NotInduced { .. });
    let induced = [
        (FamilyId::Flat, d),
        (FamilyId::Simanca, d.with_lambda(1.0).with_mu(1.0)),
        (FamilyId::Simanca, d.with_lambda(2.0).with_mu(1.0)),
        (FamilyId::FubiniStudy, d.with_mu(1.0)),
        (FamilyId::FubiniStudy, d.with_mu(2.0)),
        (FamilyId::Hyperbolic, d.with_mu(1.7)),
        (FamilyId::Case7, d.with_lambda(2.0).with_mu(4.0).with_xi(0.5)),
    ];
    let mut clean = 0;
    for (id, p) in induced {
        if scan_h(id, p)?.is_none() {
            clean += 1;
        }
    }
    let fmt = |h: Option<usize>| h.map_or("none".to_string(), |h| h.to_string());
    ok(
        a == Some(3) && b == Some(7) && c && clean == induced.len(),
        format!(
            "(a) h* = {}, (b) h* = {}, (c) rejected: {c}, (d) {clean}/{} without obstruction",
            fmt(a),
            fmt(b),
            induced.len()
        ),
    )
}

fn c8() -> Result<Outcome> {
    let params = FamilyParams::default().with_lambda(2.0).with_mu(4.0).with_xi(0.5);
    let pot = radial(FamilyId::Case7, params, 2)?;
    let v = balanced_check(&pot, 12, BergmanOptions::default())?;
    let missing3 = v.status == BalancedStatus::NotBalanced { reason: BalancedReason::MissingMonomialDegree { degree: 3 } };
    let mut eng = Bergman::new(&pot, BergmanOptions::default().quadrature_only());
    let deg3_finite = (0..=3).all(|j| eng.norm(1, (j, 3 - j)).is_ok_and(|n| !n.value.is_divergent()));
    let mut worst = 0.0f64;
    let mut agree = true;
    for dsum in 0..=10 {
        for j in 0..=dsum {
            let idx = (j, dsum - j);
            let closed = norm_an0v_closed(&params, idx);
            let quad = eng.norm(1, idx)?.value;
            match (closed.value(), quad.value()) {
                (Some(a), Some(b)) => worst = worst.max(rel(b, a)),
                (None, None) => {}
                _ => agree = false,
            }
        }
    }
    ok(
        missing3 && deg3_finite && agree && worst <= 1e-8,
        format!(
            "verdict {:?}; degree-3 norms finite: {deg3_finite}; closed vs quadrature norms up to degree 10: worst rel err {worst:.1e}, divergence pattern agrees: {agree}",
            v.status
        ),
    )
}

fn c9() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let mut worst = 0.0f64;
    for id in FamilyId::ALL {
        for _ in 0..3 {
            let params = id.sample_params([rng.random(), rng.random(), rng.random()]);
            let pot = family_potential(id, &params, 2)?;
            let (lo, hi) = (pot.lo_f64(), pot.hi.map_or(pot.lo_f64() + 4.0, |_| pot.hi_f64()));
            let r = lo + (hi - lo) * rng.random_range(0.1..0.9);
            worst = pk_identity_defect(&pot, r, 10)?.into_iter().fold(worst, f64::max);
        }
    }
    let ps = pk_recursion(3);
    let p2 = ps[1].coefficients == Poly::constant(1);
    let third = Poly::monomial(1, 0, 1, 2)
        .add(&Poly::monomial(0, 0, 1, 3))
        .add(&Poly::constant(-2))
        .mul(&Poly::psi())
        .add(&Poly::monomial(0, 0, 1, 2))
        .add(&Poly::monomial(0, 0, 2, -3))
        .add(&Poly::monomial(0, 0, 3, 1));
    let p3 = numerator(&ps[2]) == third;
    ok(
        worst <= 1e-9 && p2 && p3,
        format!("identity for k <= 10 over 11 families x 3 parameter sets: worst rel err {worst:.1e}; P_2 = 1: {p2}; P_3 matches: {p3}"),
    )
}

fn c10() -> Result<Outcome> {
    let mut fact = num_bigint::BigInt::from(1);
    let mut qk = true;
    for k in 0..=10usize {
        if k > 0 {
            fact *= k;
        }
        let s: num_bigint::BigInt = eulerian_q(k).iter().sum();
        qk &= s == fact;
    }
    let grid = default_t_grid(24);
    let mut probes = true;
    for n in 1..=2 {
        for k0 in 1..=2 {
            probes &= psi_h_probe(n, k0, 0, &grid)?.classification.diverges();
            for h in 1..=2 {
                probes &= psi_h_probe(n, k0, h, &grid)?.classification == Boundedness::Bounded;
            }
        }
    }
    let w = (0.5, 0.999);
    let b_sim = logterm_fit(&DistortionProfile::new(2, 0.0, &[(2, 1.0)]), 2, w, 64)?.b_estimate;
    let b_syn = logterm_fit(&DistortionProfile::new(2, 0.0, &[(2, 1.0), (-1, 1.0)]), 2, w, 64)?.b_estimate;
    ok(
        qk && probes && b_sim.abs() <= 1e-6 && (b_syn + 1.0).abs() <= 1e-3,
        format!("q_k(1) = k! for k <= 10: {qk}; psi_h classification: {probes}; b(Simanca) = {b_sim:.1e}, b(m^2 + 1/m) = {b_syn:.6}"),
    )
}
