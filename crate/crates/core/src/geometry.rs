//! Metric, Ricci and full curvature tensors of radial and Reinhardt metrics,
//! and the first two TYCZ coefficients.
//!
//! Conventions: `G_{ij} = d^2 Phi / dz_i dzbar_j`, `Ric_{ij} = -d_i dbar_j log det G`,
//! `scal = G^{ij} Ric_{ij}`, `Delta = G^{ij} d_i dbar_j`. With these the unit
//! ball has `scal = -6` and `a2 = 2`.
//!
//! Derivatives come from one multivariate jet: `z_i` and `zbar_i` are treated
//! as independent variables `Z_i`, `W_i` around a real point, so that
//! `x_i = (a_i + Z_i)(a_i + W_i)` with `a_i = sqrt(x_i)`.

use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::potentials::{Point, Potential, RadialPotential, ReinhardtPotential};
use crate::series::{Bi2, Layout, MultiJet, Scalar};

const DEGREE: usize = 6;

fn layout(n: usize) -> Arc<Layout> {
    static L1: OnceLock<Arc<Layout>> = OnceLock::new();
    static L2: OnceLock<Arc<Layout>> = OnceLock::new();
    let cell = if n == 1 { &L1 } else { &L2 };
    cell.get_or_init(|| Layout::new(2 * n, DEGREE)).clone()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub scal: f64,
    pub ric_norm2: f64,
    pub riem_norm2: f64,
    pub lap_scal: f64,
    pub a1: f64,
    pub a2: f64,
}

impl CurvatureReport {
    fn new(scal: f64, ric_norm2: f64, riem_norm2: f64, lap_scal: f64) -> Self {
        CurvatureReport {
            scal,
            ric_norm2,
            riem_norm2,
            lap_scal,
            a1: scal / 2.0,
            a2: lap_scal / 3.0 + (riem_norm2 - 4.0 * ric_norm2 + 3.0 * scal * scal) / 24.0,
        }
    }
}

/// Coordinates `(x_1, .., x_n)` of a point, checked against the domain.
fn coords(pot: &Potential, point: &Point) -> Result<Vec<f64>> {
    match pot {
        Potential::Radial(p) => {
            let (x1, x2) = point.coords();
            let r = x1 + x2;
            p.check(r)?;
            if p.n == 1 {
                if x2 != 0.0 {
                    return Err(Error::InvalidInput("n = 1 potentials take a single coordinate".into()));
                }
                Ok(vec![r])
            } else {
                Ok(vec![x1, x2])
            }
        }
        Potential::Reinhardt(p) => {
            let (x1, x2) = point.coords();
            p.check(x1, x2)?;
            Ok(vec![x1, x2])
        }
    }
}

/// `Phi` as a jet in `(Z_1.., W_1..)` at the point.
fn phi_jet(pot: &Potential, x: &[f64]) -> MultiJet {
    let n = x.len();
    let l = layout(n);
    let xs: Vec<MultiJet> = x
        .iter()
        .enumerate()
        .map(|(i, &xi)| {
            let a = xi.sqrt();
            MultiJet::variable(&l, i, a).mul(&MultiJet::variable(&l, n + i, a))
        })
        .collect();
    match pot {
        Potential::Radial(p) => {
            let r = xs.iter().skip(1).fold(xs[0].clone(), |acc, v| acc.add(v));
            p.expr.eval(&[r])
        }
        Potential::Reinhardt(p) => p.expr.eval(&xs),
    }
}

struct Tensors {
    n: usize,
    g: Vec<Vec<MultiJet>>,
    h: Vec<Vec<MultiJet>>,
    det: MultiJet,
}

fn tensors(pot: &Potential, x: &[f64]) -> Result<Tensors> {
    let n = x.len();
    let phi = phi_jet(pot, x);
    let dz: Vec<MultiJet> = (0..n).map(|i| phi.diff(i)).collect();
    let g: Vec<Vec<MultiJet>> = (0..n)
        .map(|i| (0..n).map(|j| dz[i].diff(n + j)).collect())
        .collect();
    let (det, h) = if n == 1 {
        let det = g[0][0].clone();
        let h = vec![vec![det.recip()]];
        (det, h)
    } else {
        let det = g[0][0].mul(&g[1][1]).sub(&g[0][1].mul(&g[1][0]));
        let inv = det.recip();
        let h = vec![
            vec![g[1][1].mul(&inv), g[0][1].mul(&inv).scale(-1.0)],
            vec![g[1][0].mul(&inv).scale(-1.0), g[0][0].mul(&inv)],
        ];
        (det, h)
    };
    let d0 = det.value();
    if !(d0 > 0.0 && g[0][0].value() > 0.0) || !d0.is_finite() {
        return Err(Error::NotPositiveDefinite(format!(
            "det G = {d0}, G_11 = {} at x = {x:?}",
            g[0][0].value()
        )));
    }
    Ok(Tensors { n, g, h, det })
}

fn values(m: &[Vec<MultiJet>]) -> Vec<Vec<f64>> {
    m.iter().map(|row| row.iter().map(|e| e.value()).collect()).collect()
}

/// `G_{ij}` at the point (real symmetric since the point has real coordinates).
pub fn metric_matrix(pot: &Potential, point: &Point) -> Result<DMatrix<f64>> {
    let x = coords(pot, point)?;
    let t = tensors(pot, &x)?;
    let g = values(&t.g);
    let m = DMatrix::from_fn(t.n, t.n, |i, j| g[i][j]);
    if m.clone().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite(format!("{m}")));
    }
    Ok(m)
}

/// `det G = f' (r f')'` in dimension two, `(r f')'` on a curve.
pub fn det_g_radial(pot: &RadialPotential, r: f64) -> Result<f64> {
    let (f1, rf1) = pot.eigen_factors(r)?;
    Ok(if pot.n == 1 { rf1 } else { f1 * rf1 })
}

/// Determinant of the metric of a Reinhardt potential at `(x1, x2)`.
pub fn det_g_reinhardt(pot: &ReinhardtPotential, x1: f64, x2: f64) -> Result<f64> {
    pot.check(x1, x2)?;
    det_g_expr(&pot.expr, x1, x2)
}

/// `det G` of `Phi(x1, x2)` through the second-order chain rule, without the
/// domain check.
pub fn det_g_expr(expr: &Expr, x1: f64, x2: f64) -> Result<f64> {
    let d = det_g_scalar(expr, x1, x2);
    if d.is_finite() {
        Ok(d)
    } else {
        Err(Error::NotPositiveDefinite(format!("det G = {d} at ({x1}, {x2})")))
    }
}

/// `(Phi, det G)` in any scalar type; no checks.
pub fn phi_and_det<S: Scalar>(expr: &Expr, x1: S, x2: S) -> (S, S) {
    let b: Bi2<S> = expr.eval(&[Bi2::var1(x1), Bi2::var2(x2)]);
    let [p, p1, p2, p11, p12, p22] = b.partials();
    let d = (p1 + x1 * p11) * (p2 + x2 * p22) - x1 * x2 * p12 * p12;
    (p, d)
}

pub fn det_g_scalar<S: Scalar>(expr: &Expr, x1: S, x2: S) -> S {
    phi_and_det(expr, x1, x2).1
}

/// Curvature scalars and `a1`, `a2` at a point.
pub fn curvature_report(pot: &Potential, point: &Point) -> Result<CurvatureReport> {
    let x = coords(pot, point)?;
    let t = tensors(pot, &x)?;
    let n = t.n;
    let logdet = t.det.unary(|j| j.ln());
    let ric: Vec<Vec<MultiJet>> = (0..n)
        .map(|i| {
            let d = logdet.diff(i);
            (0..n).map(|j| d.diff(n + j).scale(-1.0)).collect()
        })
        .collect();
    let mut scal = MultiJet::constant(&t.det.layout, 0.0);
    for i in 0..n {
        for j in 0..n {
            scal = scal.add(&t.h[j][i].mul(&ric[i][j]));
        }
    }
    if scal.valid < 2 {
        return Err(Error::JetOrderInsufficient { have: scal.valid, need: 2 });
    }
    let h = values(&t.h);
    let rv = values(&ric);
    let mut lap = 0.0;
    for i in 0..n {
        let d = scal.diff(i);
        for j in 0..n {
            lap += h[j][i] * d.diff(n + j).value();
        }
    }
    // dg[k][i][j] = d_k G_ij, dbg[l][i][j] = dbar_l G_ij
    let dg: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|k| (0..n).map(|i| (0..n).map(|j| t.g[i][j].diff(k).value()).collect()).collect())
        .collect();
    let dbg: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|l| (0..n).map(|i| (0..n).map(|j| t.g[i][j].diff(n + l).value()).collect()).collect())
        .collect();
    let idx = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * n + k) * n + l;
    let mut riem = vec![0.0; n.pow(4)];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let gk = t.g[i][j].diff(k);
                for l in 0..n {
                    let mut v = -gk.diff(n + l).value();
                    for p in 0..n {
                        for q in 0..n {
                            v += h[q][p] * dg[k][i][q] * dbg[l][p][j];
                        }
                    }
                    riem[idx(i, j, k, l)] = v;
                }
            }
        }
    }
    let mut riem2 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let rijkl = riem[idx(i, j, k, l)];
                    for a in 0..n {
                        for b in 0..n {
                            for c in 0..n {
                                for d in 0..n {
                                    riem2 += rijkl
                                        * riem[idx(b, a, d, c)]
                                        * h[a][i]
                                        * h[j][b]
                                        * h[c][k]
                                        * h[l][d];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let mut ric2 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for a in 0..n {
                for b in 0..n {
                    ric2 += h[a][i] * rv[i][j] * h[j][b] * rv[b][a];
                }
            }
        }
    }
    Ok(CurvatureReport::new(scal.value(), ric2, riem2, lap))
}

/// Relative distance of `Ric` from the nearest multiple of `G`; zero for
/// Kähler-Einstein metrics.
pub fn einstein_defect(pot: &Potential, point: &Point) -> Result<f64> {
    let x = coords(pot, point)?;
    let t = tensors(pot, &x)?;
    let n = t.n;
    let logdet = t.det.unary(|j| j.ln());
    let g = values(&t.g);
    let ric: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let d = logdet.diff(i);
            (0..n).map(|j| -d.diff(n + j).value()).collect()
        })
        .collect();
    // least-squares c in Ric = c G
    let (mut num, mut den, mut rr) = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            num += ric[i][j] * g[i][j];
            den += g[i][j] * g[i][j];
            rr += ric[i][j] * ric[i][j];
        }
    }
    let c = num / den;
    let mut res = 0.0;
    for i in 0..n {
        for j in 0..n {
            res += (ric[i][j] - c * g[i][j]).powi(2);
        }
    }
    Ok((res / rr.max(f64::MIN_POSITIVE)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{family_potential, pdomain_potential, FamilyId, FamilyParams};
    use approx::assert_relative_eq;

    fn radial(id: FamilyId, p: FamilyParams, n: usize) -> Potential {
        Potential::Radial(family_potential(id, &p, n).unwrap())
    }

    #[test]
    fn metric_examples() {
        let flat = radial(FamilyId::Flat, FamilyParams::default(), 2);
        let g = metric_matrix(&flat, &Point::X(0.3, 0.7)).unwrap();
        assert!((g - DMatrix::identity(2, 2)).norm() < 1e-14);
        let sim = radial(FamilyId::Simanca, FamilyId::Simanca.default_params(), 2);
        let g = metric_matrix(&sim, &Point::R(1.0)).unwrap();
        assert_relative_eq!(g[(0, 0)], 1.0, epsilon = 1e-14);
        assert_relative_eq!(g[(1, 1)], 2.0, epsilon = 1e-14);
        assert!(g[(0, 1)].abs() < 1e-14);
        let ball = Potential::Reinhardt(pdomain_potential(1.0).unwrap());
        let g = metric_matrix(&ball, &Point::X(0.0, 0.0)).unwrap();
        assert!((g - DMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn det_examples() {
        let sim = family_potential(FamilyId::Simanca, &FamilyId::Simanca.default_params(), 2).unwrap();
        assert_relative_eq!(det_g_radial(&sim, 2.0).unwrap(), 1.5, max_relative = 1e-15);
        let flat = family_potential(FamilyId::Flat, &FamilyParams::default(), 2).unwrap();
        assert_eq!(det_g_radial(&flat, 5.0).unwrap(), 1.0);
        let p = FamilyParams::default().with_lambda(1.0).with_mu(2.0).with_xi(0.5);
        let v = family_potential(FamilyId::Case7, &p, 2).unwrap();
        assert_relative_eq!(det_g_radial(&v, 1.0).unwrap(), 80.0, max_relative = 1e-14);
    }

    #[test]
    fn ball_coefficients() {
        let ball = Potential::Reinhardt(pdomain_potential(1.0).unwrap());
        for pt in [Point::X(0.0, 0.0), Point::X(0.2, 0.3), Point::X(0.6, 0.1)] {
            let c = curvature_report(&ball, &pt).unwrap();
            assert_relative_eq!(c.scal, -6.0, max_relative = 1e-10);
            assert_relative_eq!(c.a2, 2.0, max_relative = 1e-9);
            assert!(c.lap_scal.abs() < 1e-8);
        }
    }

    #[test]
    fn curve_and_surface_constants() {
        let hyp = radial(FamilyId::Hyperbolic, FamilyParams::default().with_mu(2.0), 1);
        let c = curvature_report(&hyp, &Point::R(0.4)).unwrap();
        assert_relative_eq!(c.scal, -1.0, max_relative = 1e-10);
        assert_relative_eq!(c.a1, -0.5, max_relative = 1e-10);
        let fs = radial(FamilyId::FubiniStudy, FamilyParams::default().with_mu(3.0), 2);
        let c = curvature_report(&fs, &Point::R(0.7)).unwrap();
        assert_relative_eq!(c.scal, 2.0, max_relative = 1e-10);
        let sim = radial(FamilyId::Simanca, FamilyId::Simanca.default_params(), 2);
        let c = curvature_report(&sim, &Point::R(1.3)).unwrap();
        assert!(c.scal.abs() < 1e-10);
    }

    #[test]
    fn radial_det_agrees_with_matrix() {
        let p = FamilyParams::default().with_lambda(2.0).with_mu(4.0).with_xi(0.5);
        let f = family_potential(FamilyId::Case7, &p, 2).unwrap();
        let pot = Potential::Radial(f.clone());
        for r in [0.2, 0.7, 1.1] {
            let g = metric_matrix(&pot, &Point::X(r * 0.3, r * 0.7)).unwrap();
            assert_relative_eq!(g.determinant(), det_g_radial(&f, r).unwrap(), max_relative = 1e-10);
        }
        assert!(einstein_defect(&pot, &Point::R(0.7)).unwrap() > 1e-3);
    }

    #[test]
    fn reinhardt_det_by_chain_rule() {
        let p = pdomain_potential(2.0).unwrap();
        let pot = Potential::Reinhardt(p.clone());
        let g = metric_matrix(&pot, &Point::X(0.3, 0.2)).unwrap();
        assert_relative_eq!(g.determinant(), det_g_reinhardt(&p, 0.3, 0.2).unwrap(), max_relative = 1e-12);
        assert!(matches!(
            curvature_report(&pot, &Point::X(0.9, 0.5)),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn catalog_scalar_curvature_is_constant() {
        for id in FamilyId::ALL {
            let pr = id.default_params();
            let f = family_potential(id, &pr, 2).unwrap();
            let (a, _) = id.profile_coeffs(&pr).unwrap();
            let (lo, hi) = (f.lo_f64(), f.hi_f64().min(f.lo_f64() + 10.0));
            let pot = Potential::Radial(f);
            for i in 1..6 {
                let r = lo + (hi - lo) * i as f64 / 6.0;
                let c = curvature_report(&pot, &Point::R(r)).unwrap();
                assert!((c.scal + 6.0 * a).abs() < 1e-8 * (1.0 + a.abs()), "{id} r={r}: {}", c.scal);
            }
        }
    }

    #[test]
    fn pdomain_a2_at_origin() {
        // T = (m - 2)(m - 1 + c) with c(0) = 1 - 1/p gives a2 = 2 - 2c
        let pot = Potential::Reinhardt(pdomain_potential(2.0).unwrap());
        let c = curvature_report(&pot, &Point::X(0.0, 0.0)).unwrap();
        assert_relative_eq!(c.a1, -3.0 + 0.5, max_relative = 1e-10);
        assert_relative_eq!(c.a2, 1.0, max_relative = 1e-9);
    }
}
