//! Weighted least-squares fits of `T_m` by Laurent polynomials in `m`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::DistortionSeries;

/// Above this (column-scaled) condition number the fit is refused.
pub const MAX_CONDITION: f64 = 1e10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyFitResult {
    pub basis: Vec<i32>,
    pub coefficients: Vec<f64>,
    /// max |T - fit| over the whole grid, held-out points included
    pub residual: f64,
    /// max |T - fit| over the points used in the fit
    pub fit_residual: f64,
    pub held_out: Vec<f64>,
    pub condition: f64,
    pub finite_expansion: bool,
}

impl PolyFitResult {
    pub fn coefficient(&self, power: i32) -> Option<f64> {
        self.basis.iter().position(|&b| b == power).map(|i| self.coefficients[i])
    }

    pub fn eval(&self, m: f64) -> f64 {
        self.basis.iter().zip(&self.coefficients).map(|(&b, c)| c * m.powi(b)).sum()
    }
}

/// Fit `ys ~ sum_b c_b m^b` with relative weights `1/|y|`. Two interior
/// points (at a third and two thirds of the grid) are held out of the fit
/// and only used for the residual. The expansion is flagged finite when
/// the residual is below `tol * max|y|` and every negative-power
/// coefficient is below `tol`.
pub fn fit_laurent(ms: &[f64], ys: &[f64], basis: &[i32], tol: f64) -> Result<PolyFitResult> {
    if ms.len() != ys.len() {
        return Err(Error::InvalidInput("grid and values differ in length".into()));
    }
    if basis.is_empty() || ms.len() < basis.len() + 2 {
        return Err(Error::InvalidInput(format!(
            "{} grid points cannot fit {} basis powers with two held out",
            ms.len(),
            basis.len()
        )));
    }
    let n = ms.len();
    let held = [n / 3, 2 * n / 3];
    let fit_rows: Vec<usize> = (0..n).filter(|i| !held.contains(i)).collect();
    let mut a = DMatrix::<f64>::zeros(fit_rows.len(), basis.len());
    let mut rhs = DVector::<f64>::zeros(fit_rows.len());
    for (r, &i) in fit_rows.iter().enumerate() {
        let w = 1.0 / ys[i].abs().max(f64::MIN_POSITIVE);
        for (c, &b) in basis.iter().enumerate() {
            a[(r, c)] = w * ms[i].powi(b);
        }
        rhs[r] = w * ys[i];
    }
    let scale: Vec<f64> = (0..basis.len()).map(|c| a.column(c).norm().max(f64::MIN_POSITIVE)).collect();
    for (c, s) in scale.iter().enumerate() {
        a.column_mut(c).scale_mut(1.0 / s);
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let x = svd.solve(&rhs, 0.0).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let coefficients: Vec<f64> = x.iter().zip(&scale).map(|(v, s)| v / s).collect();
    let mut out = PolyFitResult {
        basis: basis.to_vec(),
        coefficients,
        residual: 0.0,
        fit_residual: 0.0,
        held_out: held.iter().map(|&i| ms[i]).collect(),
        condition,
        finite_expansion: false,
    };
    for i in 0..n {
        let dev = (ys[i] - out.eval(ms[i])).abs();
        out.residual = out.residual.max(dev);
        if !held.contains(&i) {
            out.fit_residual = out.fit_residual.max(dev);
        }
    }
    let ymax = ys.iter().fold(0.0f64, |a, y| a.max(y.abs()));
    out.finite_expansion = out.residual <= tol * ymax.max(1.0)
        && basis.iter().zip(&out.coefficients).all(|(&b, c)| b >= 0 || c.abs() <= tol);
    Ok(out)
}

pub fn fit_poly_in_m(series: &DistortionSeries, basis: &[i32], tol: f64) -> Result<PolyFitResult> {
    let ms: Vec<f64> = series.m_grid.iter().map(|&m| m as f64).collect();
    fit_laurent(&ms, &series.values, basis, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn recovers_laurent_polynomial() {
        let ms: Vec<f64> = (1..=12).map(f64::from).collect();
        let ys: Vec<f64> = ms.iter().map(|m| m * m - 0.25 * m + 3.0 + 0.5 / m).collect();
        let f = fit_laurent(&ms, &ys, &[2, 1, 0, -1, -2], 1e-9).unwrap();
        for (p, want) in [(2, 1.0), (1, -0.25), (0, 3.0), (-1, 0.5)] {
            assert_relative_eq!(f.coefficient(p).unwrap(), want, max_relative = 1e-9);
        }
        assert!(f.coefficient(-2).unwrap().abs() < 1e-9);
        assert!(!f.finite_expansion);
        assert_eq!(f.held_out, vec![5.0, 9.0]);
    }

    #[test]
    fn polynomial_is_flagged_finite() {
        let ms: Vec<f64> = (1..=10).map(f64::from).collect();
        let ys: Vec<f64> = ms.iter().map(|m| m * m).collect();
        let f = fit_laurent(&ms, &ys, &[2, 1, 0, -1, -2], 1e-9).unwrap();
        assert!(f.finite_expansion, "{f:?}");
    }

    #[test]
    fn rejects_short_grid_and_collinear_basis() {
        let ms = [1.0, 2.0, 3.0];
        assert!(matches!(fit_laurent(&ms, &[1.0; 3], &[1, 0], 1e-9), Err(Error::InvalidInput(_))));
        let ms: Vec<f64> = (1..=6).map(f64::from).collect();
        let ys = vec![1.0; 6];
        assert!(matches!(fit_laurent(&ms, &ys, &[1, 1, 0], 1e-9), Err(Error::IllConditioned { .. })));
    }
}
