//! Exact polynomials `P_k(y)` with
//! `e^{-f} d^k e^f / dr^k = (psi P_k + y(y-1)...(y-k+1)) / r^k`
//! for `psi = A y^2 + y + B`, with coefficients in `Q[A, B]`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// Polynomial in `(A, B, y)`; keys are the exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<(u32, u32, u32), BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn monomial(a: u32, b: u32, y: u32, c: i64) -> Self {
        let mut p = Poly::zero();
        p.add_term((a, b, y), BigRational::from_integer(BigInt::from(c)));
        p
    }

    pub fn constant(c: i64) -> Self {
        Poly::monomial(0, 0, 0, c)
    }

    /// `A y^2 + y + B`
    pub fn psi() -> Self {
        Poly::monomial(1, 0, 2, 1).add(&Poly::monomial(0, 0, 1, 1)).add(&Poly::monomial(0, 1, 0, 1))
    }

    /// `y (y-1) ... (y-k+1)`
    pub fn falling(k: usize) -> Self {
        (0..k).fold(Poly::constant(1), |acc, i| acc.mul(&Poly::monomial(0, 0, 1, 1).add(&Poly::constant(-(i as i64)))))
    }

    fn add_term(&mut self, key: (u32, u32, u32), c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(&BigRational::from_integer(BigInt::from(-1))))
    }

    pub fn scale(&self, s: &BigRational) -> Poly {
        let mut out = Poly::zero();
        for (k, c) in &self.terms {
            out.add_term(*k, c * s);
        }
        out
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for ((a1, b1, y1), c1) in &self.terms {
            for ((a2, b2, y2), c2) in &o.terms {
                out.add_term((a1 + a2, b1 + b2, y1 + y2), c1 * c2);
            }
        }
        out
    }

    /// `d/dy`
    pub fn dy(&self) -> Poly {
        let mut out = Poly::zero();
        for ((a, b, y), c) in &self.terms {
            if *y > 0 {
                out.add_term((*a, *b, y - 1), c * BigRational::from_integer(BigInt::from(*y)));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree_y(&self) -> u32 {
        self.terms.keys().map(|k| k.2).max().unwrap_or(0)
    }

    pub fn eval(&self, a: f64, b: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|((ea, eb, ey), c)| c.to_f64().unwrap_or(f64::NAN) * a.powi(*ea as i32) * b.powi(*eb as i32) * y.powi(*ey as i32))
            .sum()
    }

    /// Exact evaluation at rational `(A, B, y)`.
    pub fn eval_exact(&self, a: &BigRational, b: &BigRational, y: &BigRational) -> BigRational {
        self.terms
            .iter()
            .fold(BigRational::zero(), |acc, ((ea, eb, ey), c)| acc + c * pow(a, *ea) * pow(b, *eb) * pow(y, *ey))
    }

    /// Exact evaluation at rational `(A, B)`, leaving a polynomial in `y`
    /// (coefficient `i` of `y^i`).
    pub fn at_ab(&self, a: &BigRational, b: &BigRational) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.degree_y() as usize + 1];
        for ((ea, eb, ey), c) in &self.terms {
            out[*ey as usize] += c * pow(a, *ea) * pow(b, *eb);
        }
        out
    }
}

fn pow(x: &BigRational, e: u32) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        let mut order: Vec<_> = self.terms.iter().collect();
        order.sort_by_key(|((a, b, y), _)| std::cmp::Reverse((*y, *a, *b)));
        for ((a, b, y), c) in order {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mag = c.abs();
            let mut factors = Vec::new();
            for (name, e) in [("A", *a), ("B", *b), ("y", *y)] {
                match e {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            if !mag.is_one() || factors.is_empty() {
                factors.insert(0, mag.to_string());
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PkPolynomial {
    pub k: usize,
    pub coefficients: Poly,
}

/// `P_1, ..., P_{k_max}` from `P_{k+1} = psi' P_k + psi P_k' + (y-k) P_k + d/dy (y)_k`,
/// which is the recursion `psi d/dy Q_k + (y - k) Q_k = psi P_{k+1} + (y)_{k+1}`
/// for `Q_k = psi P_k + (y)_k` with the division by `psi` carried out.
pub fn pk_recursion(k_max: usize) -> Vec<PkPolynomial> {
    let psi = Poly::psi();
    let dpsi = psi.dy();
    let mut out = Vec::with_capacity(k_max);
    let mut p = Poly::zero();
    for k in 1..=k_max {
        out.push(PkPolynomial { k, coefficients: p.clone() });
        let y_minus_k = Poly::monomial(0, 0, 1, 1).add(&Poly::constant(-(k as i64)));
        p = dpsi.mul(&p).add(&psi.mul(&p.dy())).add(&y_minus_k.mul(&p)).add(&Poly::falling(k).dy());
    }
    out
}

/// `psi P_k + (y)_k`, the numerator of `r^k e^{-f} d^k e^f / dr^k`.
pub fn numerator(pk: &PkPolynomial) -> Poly {
    Poly::psi().mul(&pk.coefficients).add(&Poly::falling(pk.k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_polynomials() {
        let ps = pk_recursion(3);
        assert!(ps[0].coefficients.is_zero());
        assert_eq!(ps[1].coefficients, Poly::constant(1));
        // psi' + 3y - 3
        let want = Poly::psi().dy().add(&Poly::monomial(0, 0, 1, 3)).add(&Poly::constant(-3));
        assert_eq!(ps[2].coefficients, want);
    }

    #[test]
    fn third_numerator_is_third_inequality() {
        let ps = pk_recursion(3);
        let lhs = numerator(&ps[2]);
        // (2Ay + 3y - 2)(Ay^2 + y + B) + 2y - 3y^2 + y^3
        let rhs = Poly::monomial(1, 0, 1, 2)
            .add(&Poly::monomial(0, 0, 1, 3))
            .add(&Poly::constant(-2))
            .mul(&Poly::psi())
            .add(&Poly::monomial(0, 0, 1, 2))
            .add(&Poly::monomial(0, 0, 2, -3))
            .add(&Poly::monomial(0, 0, 3, 1));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(Poly::psi().to_string(), "A*y^2 + y + B");
        assert_eq!(Poly::falling(2).to_string(), "y^2 - y");
    }
}
