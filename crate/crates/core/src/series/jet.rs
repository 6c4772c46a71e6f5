//! Univariate truncated Taylor series (Taylor-mode differentiation).

use super::scalar::Scalar;

/// Truncated Taylor expansion `sum_k c[k] s^k` of a function at `base`,
/// where `s` is the offset from the base point. Order `K = c.len() - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<S: Scalar = f64> {
    pub base: f64,
    pub c: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    pub fn constant(base: f64, order: usize, v: S) -> Self {
        let mut c = vec![S::zero(); order + 1];
        c[0] = v;
        Jet { base, c }
    }

    /// The identity function `x -> x` expanded at `x0`.
    pub fn variable(x0: S, order: usize) -> Self {
        let mut c = vec![S::zero(); order + 1];
        c[0] = x0;
        if order >= 1 {
            c[1] = S::one();
        }
        Jet { base: x0.to_f64(), c }
    }

    pub fn from_coeffs(base: f64, c: Vec<S>) -> Self {
        assert!(!c.is_empty(), "a jet needs at least one coefficient");
        Jet { base, c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> S {
        self.c[0]
    }

    pub fn coeff(&self, k: usize) -> S {
        self.c.get(k).copied().unwrap_or_else(S::zero)
    }

    /// k-th derivative at the base point, `k! c_k`.
    pub fn derivative(&self, k: usize) -> S {
        let mut f = S::one();
        for i in 2..=k {
            f = f * S::from_f64(i as f64);
        }
        self.coeff(k) * f
    }

    pub fn lift(&self, v: f64) -> Self {
        Jet::constant(self.base, self.order(), S::from_f64(v))
    }

    pub fn add(&self, o: &Self) -> Self {
        let c = self.c.iter().zip(&o.c).map(|(&a, &b)| a + b).collect();
        Jet { base: self.base, c }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let c = self.c.iter().zip(&o.c).map(|(&a, &b)| a - b).collect();
        Jet { base: self.base, c }
    }

    pub fn neg(&self) -> Self {
        Jet {
            base: self.base,
            c: self.c.iter().map(|&a| -a).collect(),
        }
    }

    pub fn scale(&self, k: S) -> Self {
        Jet {
            base: self.base,
            c: self.c.iter().map(|&a| a * k).collect(),
        }
    }

    pub fn add_scalar(&self, k: S) -> Self {
        let mut out = self.clone();
        out.c[0] = out.c[0] + k;
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.c.len().min(o.c.len());
        let mut c = vec![S::zero(); n];
        for (i, &a) in self.c.iter().enumerate().take(n) {
            for (j, &b) in o.c.iter().enumerate().take(n - i) {
                c[i + j] = c[i + j] + a * b;
            }
        }
        Jet { base: self.base, c }
    }

    pub fn div(&self, o: &Self) -> Self {
        let n = self.c.len().min(o.c.len());
        let b0 = o.c[0];
        let mut q = vec![S::zero(); n];
        for k in 0..n {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc = acc - o.c[j] * q[k - j];
            }
            q[k] = acc / b0;
        }
        Jet { base: self.base, c: q }
    }

    pub fn exp(&self) -> Self {
        let n = self.c.len();
        let mut b = vec![S::zero(); n];
        b[0] = self.c[0].exp();
        for k in 1..n {
            let mut acc = S::zero();
            for j in 1..=k {
                acc = acc + S::from_f64(j as f64) * self.c[j] * b[k - j];
            }
            b[k] = acc / S::from_f64(k as f64);
        }
        Jet { base: self.base, c: b }
    }

    pub fn ln(&self) -> Self {
        let n = self.c.len();
        let a0 = self.c[0];
        let mut b = vec![S::zero(); n];
        b[0] = a0.ln();
        for k in 1..n {
            let mut acc = S::zero();
            for j in 1..k {
                acc = acc + S::from_f64(j as f64) * b[j] * self.c[k - j];
            }
            b[k] = (self.c[k] - acc / S::from_f64(k as f64)) / a0;
        }
        Jet { base: self.base, c: b }
    }

    pub fn powf(&self, p: f64) -> Self {
        let n = self.c.len();
        let a0 = self.c[0];
        let mut b = vec![S::zero(); n];
        b[0] = a0.powf(p);
        for k in 1..n {
            let mut acc = S::zero();
            for j in 1..=k {
                let w = S::from_f64(p * j as f64 - (k - j) as f64);
                acc = acc + w * self.c[j] * b[k - j];
            }
            b[k] = acc / (S::from_f64(k as f64) * a0);
        }
        Jet { base: self.base, c: b }
    }

    pub fn sin_cos(&self) -> (Self, Self) {
        let n = self.c.len();
        let mut s = vec![S::zero(); n];
        let mut co = vec![S::zero(); n];
        s[0] = self.c[0].sin();
        co[0] = self.c[0].cos();
        for k in 1..n {
            let mut as_ = S::zero();
            let mut ac = S::zero();
            for j in 1..=k {
                let ja = S::from_f64(j as f64) * self.c[j];
                as_ = as_ + ja * co[k - j];
                ac = ac + ja * s[k - j];
            }
            let kk = S::from_f64(k as f64);
            s[k] = as_ / kk;
            co[k] = -(ac / kk);
        }
        (
            Jet { base: self.base, c: s },
            Jet { base: self.base, c: co },
        )
    }

    /// Derivative with respect to the expansion variable; order drops by one.
    pub fn deriv(&self) -> Self {
        if self.c.len() == 1 {
            return Jet::constant(self.base, 0, S::zero());
        }
        let c = (1..self.c.len())
            .map(|k| self.c[k] * S::from_f64(k as f64))
            .collect();
        Jet { base: self.base, c }
    }

    /// Re-expresses the jet in the scaled offset `s = h u`; coefficient k is
    /// multiplied by `h^k`. Signs are preserved for `h > 0`.
    pub fn rescale(&self, h: S) -> Self {
        let mut f = S::one();
        let c = self
            .c
            .iter()
            .map(|&a| {
                let v = a * f;
                f = f * h;
                v
            })
            .collect();
        Jet { base: self.base, c }
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut c = self.c.clone();
        c.truncate(order + 1);
        Jet { base: self.base, c }
    }

    pub fn to_f64(&self) -> Jet<f64> {
        Jet {
            base: self.base,
            c: self.c.iter().map(|a| a.to_f64()).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|a| a.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::scalar::Dd;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fact(k: usize) -> f64 {
        (1..=k).map(|i| i as f64).product()
    }

    #[test]
    fn exp_of_variable_is_exponential_series() {
        let x = Jet::variable(0.5, 8);
        let e = x.exp();
        for k in 0..=8 {
            assert_relative_eq!(e.c[k], 0.5f64.exp() / fact(k), max_relative = 1e-14);
        }
    }

    #[test]
    fn log_of_variable() {
        // ln(2 + s) = ln 2 + sum (-1)^{k+1} s^k / (k 2^k)
        let l = Jet::variable(2.0, 6).ln();
        assert_relative_eq!(l.c[0], 2f64.ln());
        for k in 1..=6 {
            let want = (-1f64).powi(k as i32 + 1) / (k as f64 * 2f64.powi(k as i32));
            assert_relative_eq!(l.c[k], want, max_relative = 1e-14);
        }
    }

    #[test]
    fn powf_matches_binomial() {
        // (1 + s)^{1.5}
        let p = Jet::variable(1.0, 5).powf(1.5);
        let mut binom = 1.0;
        for k in 0..=5 {
            assert_relative_eq!(p.c[k], binom, max_relative = 1e-14, epsilon = 1e-15);
            binom *= (1.5 - k as f64) / (k as f64 + 1.0);
        }
    }

    #[test]
    fn sin_cos_pythagoras() {
        let x = Jet::variable(0.7, 10).mul(&Jet::variable(0.7, 10));
        let (s, c) = x.sin_cos();
        let one = s.mul(&s).add(&c.mul(&c));
        assert_relative_eq!(one.c[0], 1.0, max_relative = 1e-15);
        for k in 1..=10 {
            assert!(one.c[k].abs() < 1e-13);
        }
    }

    #[test]
    fn double_double_jet_agrees_with_f64() {
        let xf = Jet::variable(0.3, 12);
        let xd = Jet::variable(Dd::from(0.3), 12);
        let f = xf.exp().div(&xf.add_scalar(1.0)).ln();
        let d = xd.exp().div(&xd.add_scalar(Dd::from(1.0))).ln().to_f64();
        for k in 0..=12 {
            assert_relative_eq!(f.c[k], d.c[k], max_relative = 1e-12, epsilon = 1e-14);
        }
    }

    proptest! {
        #[test]
        fn exp_ln_roundtrip(c0 in 0.1f64..5.0, c1 in -2.0f64..2.0, c2 in -2.0f64..2.0, c3 in -1.0f64..1.0) {
            let j = Jet::from_coeffs(0.0, vec![c0, c1, c2, c3, 0.3, -0.1]);
            let back = j.ln().exp();
            for k in 0..j.c.len() {
                let scale = j.c.iter().fold(0f64, |m, v| m.max(v.abs()));
                prop_assert!((back.c[k] - j.c[k]).abs() <= 1e-12 * scale.max(1.0) * (1.0 + 1.0 / c0).powi(6));
            }
        }

        #[test]
        fn division_inverts_multiplication(a0 in 0.5f64..3.0, a1 in -1.0f64..1.0, b0 in 0.5f64..3.0, b1 in -1.0f64..1.0) {
            let a = Jet::from_coeffs(0.0, vec![a0, a1, 0.2, -0.4]);
            let b = Jet::from_coeffs(0.0, vec![b0, b1, 0.1, 0.05]);
            let q = a.mul(&b).div(&b);
            for k in 0..4 {
                prop_assert!((q.c[k] - a.c[k]).abs() < 1e-12);
            }
        }
    }
}
