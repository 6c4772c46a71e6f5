//! Composition trees for potentials. Evaluated generically so one tree gives
//! values, jets, double-double values and complex values.

use std::fmt;
use std::ops;

use serde::{Deserialize, Serialize};

use crate::series::Series;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr {
    Const(f64),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, f64),
    Ln(Box<Expr>),
    Exp(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
}

impl Expr {
    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    pub fn c(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn ln(self) -> Expr {
        Expr::Ln(Box::new(self))
    }

    pub fn exp(self) -> Expr {
        Expr::Exp(Box::new(self))
    }

    pub fn cos(self) -> Expr {
        Expr::Cos(Box::new(self))
    }

    pub fn sin(self) -> Expr {
        Expr::Sin(Box::new(self))
    }

    pub fn pow(self, p: f64) -> Expr {
        Expr::Pow(Box::new(self), p)
    }

    pub fn eval<T: Series>(&self, vars: &[T]) -> T {
        match self {
            Expr::Const(v) => vars[0].lift(*v),
            Expr::Var(i) => vars[*i].clone(),
            Expr::Add(a, b) => a.eval(vars).add(&b.eval(vars)),
            Expr::Sub(a, b) => a.eval(vars).sub(&b.eval(vars)),
            Expr::Mul(a, b) => a.eval(vars).mul(&b.eval(vars)),
            Expr::Div(a, b) => a.eval(vars).div(&b.eval(vars)),
            Expr::Neg(a) => a.eval(vars).neg(),
            Expr::Pow(a, p) => a.eval(vars).powf(*p),
            Expr::Ln(a) => a.eval(vars).ln(),
            Expr::Exp(a) => a.eval(vars).exp(),
            Expr::Sin(a) => a.eval(vars).sin(),
            Expr::Cos(a) => a.eval(vars).cos(),
        }
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
            Expr::Neg(a)
            | Expr::Pow(a, _)
            | Expr::Ln(a)
            | Expr::Exp(a)
            | Expr::Sin(a)
            | Expr::Cos(a) => a.max_var(),
        }
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, o: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(o))
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, o: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(o))
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(o))
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, o: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(o))
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl ops::Mul<Expr> for f64 {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        Expr::c(self) * o
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) => write!(f, "{v}"),
            Expr::Var(0) => write!(f, "r"),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Div(a, b) => write!(f, "{a}/{b}"),
            Expr::Neg(a) => write!(f, "-{a}"),
            Expr::Pow(a, p) => write!(f, "{a}^{p}"),
            Expr::Ln(a) => write!(f, "log({a})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{Dd, Jet, Scalar};
    use approx::assert_relative_eq;

    #[test]
    fn evaluates_over_several_number_types() {
        let r = Expr::var(0);
        let e = r.clone() + r.ln();
        assert_relative_eq!(e.eval(&[2.0]), 2.0 + 2f64.ln());
        let d = e.eval(&[Dd::from(2.0)]);
        assert_relative_eq!(d.to_f64(), 2.0 + 2f64.ln());
        let j = e.eval(&[Jet::variable(1.0, 2)]);
        assert_eq!(j.c, vec![1.0, 2.0, -0.5]);
    }

    #[test]
    fn json_roundtrip() {
        let e = -(Expr::c(1.0) - Expr::var(0)).ln();
        let s = serde_json::to_string(&e).unwrap();
        let back: Expr = serde_json::from_str(&s).unwrap();
        assert_eq!(e, back);
        assert_eq!(back.max_var(), Some(0));
    }
}
