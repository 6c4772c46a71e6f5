//! Dense multivariate truncated power series in a handful of variables.
//! Used for curvature, where we need up to sixth-order mixed derivatives of
//! the potential in `(z, zbar)` treated as independent variables.

use std::sync::Arc;

use super::jet::Jet;

#[derive(Debug)]
pub struct Layout {
    pub nvars: usize,
    pub degree: usize,
    /// exponent tuples, graded by total degree
    pub monos: Vec<[u8; 4]>,
    lookup: Vec<usize>,
    /// all (i, j, k) with mono_i * mono_j = mono_k inside the truncation
    products: Vec<(u32, u32, u32)>,
}

impl Layout {
    pub fn new(nvars: usize, degree: usize) -> Arc<Layout> {
        assert!((1..=4).contains(&nvars), "1 to 4 variables supported");
        let side = degree + 1;
        let mut monos: Vec<[u8; 4]> = Vec::new();
        for total in 0..=degree {
            let mut e = [0u8; 4];
            Self::enumerate(nvars, 0, total, &mut e, &mut monos);
        }
        let mut lookup = vec![usize::MAX; side.pow(nvars as u32)];
        for (i, m) in monos.iter().enumerate() {
            lookup[Self::key(side, nvars, m)] = i;
        }
        let mut products = Vec::new();
        for (i, a) in monos.iter().enumerate() {
            for (j, b) in monos.iter().enumerate() {
                let da: usize = a.iter().map(|&x| x as usize).sum();
                let db: usize = b.iter().map(|&x| x as usize).sum();
                if da + db > degree {
                    continue;
                }
                let mut c = [0u8; 4];
                for v in 0..4 {
                    c[v] = a[v] + b[v];
                }
                let k = lookup[Self::key(side, nvars, &c)];
                products.push((i as u32, j as u32, k as u32));
            }
        }
        Arc::new(Layout {
            nvars,
            degree,
            monos,
            lookup,
            products,
        })
    }

    fn enumerate(nvars: usize, v: usize, left: usize, e: &mut [u8; 4], out: &mut Vec<[u8; 4]>) {
        if v == nvars - 1 {
            e[v] = left as u8;
            out.push(*e);
            e[v] = 0;
            return;
        }
        for k in (0..=left).rev() {
            e[v] = k as u8;
            Self::enumerate(nvars, v + 1, left - k, e, out);
        }
        e[v] = 0;
    }

    fn key(side: usize, nvars: usize, m: &[u8; 4]) -> usize {
        let mut k = 0;
        for &x in m.iter().take(nvars) {
            k = k * side + x as usize;
        }
        k
    }

    pub fn index(&self, m: &[u8; 4]) -> Option<usize> {
        let side = self.degree + 1;
        if m.iter().take(self.nvars).any(|&x| x as usize > self.degree) {
            return None;
        }
        let i = self.lookup[Self::key(side, self.nvars, m)];
        (i != usize::MAX).then_some(i)
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }
}

/// Truncated series; coefficients above total degree `valid` are not
/// trustworthy (they were produced by differentiation or truncation).
#[derive(Clone, Debug)]
pub struct MultiJet {
    pub layout: Arc<Layout>,
    pub c: Vec<f64>,
    pub valid: usize,
}

fn mono_degree(m: &[u8; 4]) -> usize {
    m.iter().map(|&x| x as usize).sum()
}

impl MultiJet {
    pub fn constant(layout: &Arc<Layout>, v: f64) -> Self {
        let mut c = vec![0.0; layout.len()];
        c[0] = v;
        MultiJet {
            layout: layout.clone(),
            c,
            valid: layout.degree,
        }
    }

    /// `x0 + X_var`.
    pub fn variable(layout: &Arc<Layout>, var: usize, x0: f64) -> Self {
        let mut j = Self::constant(layout, x0);
        let mut e = [0u8; 4];
        e[var] = 1;
        if let Some(i) = layout.index(&e) {
            j.c[i] = 1.0;
        }
        j
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Taylor coefficient of the monomial with exponents `e`.
    pub fn coeff(&self, e: [u8; 4]) -> f64 {
        self.layout.index(&e).map_or(0.0, |i| self.c[i])
    }

    /// Mixed partial derivative at the base point.
    pub fn partial(&self, e: [u8; 4]) -> f64 {
        let f: f64 = e
            .iter()
            .map(|&k| (1..=k as usize).map(|i| i as f64).product::<f64>())
            .product();
        self.coeff(e) * f
    }

    fn zip(&self, o: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        MultiJet {
            layout: self.layout.clone(),
            c: self.c.iter().zip(&o.c).map(|(&a, &b)| f(a, b)).collect(),
            valid: self.valid.min(o.valid),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, k: f64) -> Self {
        MultiJet {
            layout: self.layout.clone(),
            c: self.c.iter().map(|a| a * k).collect(),
            valid: self.valid,
        }
    }

    pub fn add_scalar(&self, k: f64) -> Self {
        let mut out = self.clone();
        out.c[0] += k;
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut c = vec![0.0; self.c.len()];
        for &(i, j, k) in &self.layout.products {
            let (a, b) = (self.c[i as usize], o.c[j as usize]);
            if a != 0.0 && b != 0.0 {
                c[k as usize] += a * b;
            }
        }
        MultiJet {
            layout: self.layout.clone(),
            c,
            valid: self.valid.min(o.valid),
        }
    }

    /// `g(self)` where `g` has Taylor coefficients `g[k]` at `self.value()`.
    pub fn compose(&self, g: &[f64]) -> Self {
        let mut v = self.clone();
        v.c[0] = 0.0;
        let deg = self.valid.min(g.len() - 1);
        // Horner in the nilpotent v
        let mut acc = Self::constant(&self.layout, g[deg]);
        acc.valid = self.valid;
        for k in (0..deg).rev() {
            acc = acc.mul(&v).add_scalar(g[k]);
        }
        acc
    }

    pub fn unary(&self, f: impl Fn(&Jet<f64>) -> Jet<f64>) -> Self {
        let j = f(&Jet::variable(self.c[0], self.layout.degree));
        self.compose(&j.c)
    }

    pub fn recip(&self) -> Self {
        self.unary(|j| j.lift(1.0).div(j))
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    /// Partial derivative with respect to one variable; validity drops by one.
    pub fn diff(&self, var: usize) -> Self {
        let mut c = vec![0.0; self.c.len()];
        for (i, m) in self.layout.monos.iter().enumerate() {
            if m[var] == 0 || mono_degree(m) > self.valid {
                continue;
            }
            let mut e = *m;
            e[var] -= 1;
            if let Some(k) = self.layout.index(&e) {
                c[k] += self.c[i] * m[var] as f64;
            }
        }
        MultiJet {
            layout: self.layout.clone(),
            c,
            valid: self.valid.saturating_sub(1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn layout_sizes() {
        let l = Layout::new(4, 6);
        assert_eq!(l.len(), 210);
        let l = Layout::new(2, 3);
        assert_eq!(l.len(), 10);
    }

    #[test]
    fn mixed_partials_of_exp_product() {
        // f = exp(x y) at (1, 2): f_xy = (1 + xy) e^{xy} = 3 e^2
        let l = Layout::new(2, 4);
        let x = MultiJet::variable(&l, 0, 1.0);
        let y = MultiJet::variable(&l, 1, 2.0);
        let f = x.mul(&y).unary(|j| j.exp());
        assert_relative_eq!(f.partial([1, 1, 0, 0]), 3.0 * 2f64.exp(), max_relative = 1e-13);
        // f_xxy = (2y + x y^2) e^{xy} = (4 + 4) e^2
        assert_relative_eq!(f.partial([2, 1, 0, 0]), 8.0 * 2f64.exp(), max_relative = 1e-13);
    }

    #[test]
    fn diff_commutes_with_partial() {
        let l = Layout::new(3, 5);
        let x = MultiJet::variable(&l, 0, 0.5);
        let y = MultiJet::variable(&l, 1, 0.25);
        let z = MultiJet::variable(&l, 2, 1.5);
        let f = x.mul(&y).add(&z).unary(|j| j.ln()).mul(&z);
        let d = f.diff(0).diff(2);
        assert_eq!(d.valid, 3);
        assert_relative_eq!(d.partial([0, 1, 0, 0]), f.partial([1, 1, 1, 0]), max_relative = 1e-12);
        assert_relative_eq!(d.value(), f.partial([1, 0, 1, 0]), max_relative = 1e-12);
    }
}
