//! Bivariate second-order jets: value, gradient and Hessian of a function of
//! `(x1, x2)`. Enough for the Reinhardt metric determinant.

use super::jet::Jet;
use super::scalar::Scalar;

/// `c + g1 s1 + g2 s2 + h11 s1^2 + h12 s1 s2 + h22 s2^2` (Taylor coefficients,
/// so `h11 = f_11 / 2`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bi2<S: Scalar = f64> {
    pub c: S,
    pub g1: S,
    pub g2: S,
    pub h11: S,
    pub h12: S,
    pub h22: S,
}

impl<S: Scalar> Bi2<S> {
    pub fn constant(v: S) -> Self {
        let z = S::zero();
        Bi2 {
            c: v,
            g1: z,
            g2: z,
            h11: z,
            h12: z,
            h22: z,
        }
    }

    pub fn var1(v: S) -> Self {
        Bi2 {
            g1: S::one(),
            ..Self::constant(v)
        }
    }

    pub fn var2(v: S) -> Self {
        Bi2 {
            g2: S::one(),
            ..Self::constant(v)
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Bi2 {
            c: self.c + o.c,
            g1: self.g1 + o.g1,
            g2: self.g2 + o.g2,
            h11: self.h11 + o.h11,
            h12: self.h12 + o.h12,
            h22: self.h22 + o.h22,
        }
    }

    pub fn neg(&self) -> Self {
        Bi2 {
            c: -self.c,
            g1: -self.g1,
            g2: -self.g2,
            h11: -self.h11,
            h12: -self.h12,
            h22: -self.h22,
        }
    }

    pub fn scale(&self, k: S) -> Self {
        Bi2 {
            c: self.c * k,
            g1: self.g1 * k,
            g2: self.g2 * k,
            h11: self.h11 * k,
            h12: self.h12 * k,
            h22: self.h22 * k,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Bi2 {
            c: self.c * o.c,
            g1: self.c * o.g1 + self.g1 * o.c,
            g2: self.c * o.g2 + self.g2 * o.c,
            h11: self.c * o.h11 + self.g1 * o.g1 + self.h11 * o.c,
            h12: self.c * o.h12 + self.g1 * o.g2 + self.g2 * o.g1 + self.h12 * o.c,
            h22: self.c * o.h22 + self.g2 * o.g2 + self.h22 * o.c,
        }
    }

    /// Applies a univariate function given by its Taylor coefficients
    /// `(g0, g1, g2)` at `self.c`.
    pub fn compose(&self, g: [S; 3]) -> Self {
        // v = self - c (no constant term); v^2 keeps only the quadratic part
        Bi2 {
            c: g[0],
            g1: g[1] * self.g1,
            g2: g[1] * self.g2,
            h11: g[1] * self.h11 + g[2] * self.g1 * self.g1,
            h12: g[1] * self.h12 + g[2] * (self.g1 * self.g2 + self.g2 * self.g1),
            h22: g[1] * self.h22 + g[2] * self.g2 * self.g2,
        }
    }

    pub fn unary(&self, f: impl Fn(&Jet<S>) -> Jet<S>) -> Self {
        let j = f(&Jet::variable(self.c, 2));
        self.compose([j.c[0], j.c[1], j.c[2]])
    }

    /// Partial derivatives `(f, f_1, f_2, f_11, f_12, f_22)`.
    pub fn partials(&self) -> [S; 6] {
        let two = S::from_f64(2.0);
        [
            self.c,
            self.g1,
            self.g2,
            self.h11 * two,
            self.h12,
            self.h22 * two,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hessian_of_log_sum() {
        // f = ln(x1 + 2 x2) at (1, 1): f_1 = 1/3, f_2 = 2/3, f_11 = -1/9, f_12 = -2/9, f_22 = -4/9
        let x1 = Bi2::var1(1.0);
        let x2 = Bi2::var2(1.0);
        let u = x1.add(&x2.scale(2.0));
        let f = u.unary(|j| j.ln());
        let p = f.partials();
        assert_relative_eq!(p[0], 3f64.ln());
        assert_relative_eq!(p[1], 1.0 / 3.0);
        assert_relative_eq!(p[2], 2.0 / 3.0);
        assert_relative_eq!(p[3], -1.0 / 9.0);
        assert_relative_eq!(p[4], -2.0 / 9.0);
        assert_relative_eq!(p[5], -4.0 / 9.0);
    }

    #[test]
    fn product_rule_mixed() {
        // f = x1^2 x2 at (2, 3): f_12 = 2 x1 = 4, f_11 = 2 x2 = 6, f_22 = 0
        let x1 = Bi2::var1(2.0);
        let x2 = Bi2::var2(3.0);
        let p = x1.mul(&x1).mul(&x2).partials();
        assert_relative_eq!(p[0], 12.0);
        assert_relative_eq!(p[3], 6.0);
        assert_relative_eq!(p[4], 4.0);
        assert_relative_eq!(p[5], 0.0);
    }
}
