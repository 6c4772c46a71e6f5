//! Number-like types an expression tree can be evaluated over.

pub mod bi2;
pub mod jet;
pub mod multi;
pub mod scalar;

pub use bi2::Bi2;
pub use jet::Jet;
pub use multi::{Layout, MultiJet};
pub use scalar::{Dd, Scalar};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Arithmetic used for jets and near-endpoint integrand evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    #[default]
    Double,
    /// double-double, about 32 significant digits
    Extended,
}

impl Precision {
    /// Reads `TYCZ_PRECISION` (`double` or `extended`); defaults to double.
    pub fn from_env() -> Precision {
        match std::env::var("TYCZ_PRECISION").as_deref() {
            Ok("extended") => Precision::Extended,
            _ => Precision::Double,
        }
    }
}

/// Arithmetic closed under the operations appearing in potentials.
pub trait Series: Clone {
    /// A constant with the same shape (order, layout) as `self`.
    fn lift(&self, c: f64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn powf(&self, p: f64) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
}

macro_rules! scalar_series {
    ($t:ty) => {
        impl Series for $t {
            fn lift(&self, c: f64) -> Self {
                <$t as Scalar>::from_f64(c)
            }
            fn add(&self, o: &Self) -> Self {
                *self + *o
            }
            fn sub(&self, o: &Self) -> Self {
                *self - *o
            }
            fn mul(&self, o: &Self) -> Self {
                *self * *o
            }
            fn div(&self, o: &Self) -> Self {
                *self / *o
            }
            fn neg(&self) -> Self {
                -*self
            }
            fn ln(&self) -> Self {
                Scalar::ln(*self)
            }
            fn exp(&self) -> Self {
                Scalar::exp(*self)
            }
            fn powf(&self, p: f64) -> Self {
                Scalar::powf(*self, p)
            }
            fn sin(&self) -> Self {
                Scalar::sin(*self)
            }
            fn cos(&self) -> Self {
                Scalar::cos(*self)
            }
        }
    };
}

scalar_series!(f64);
scalar_series!(Dd);

impl Series for Complex64 {
    fn lift(&self, c: f64) -> Self {
        Complex64::new(c, 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn ln(&self) -> Self {
        Complex64::ln(*self)
    }
    fn exp(&self) -> Self {
        Complex64::exp(*self)
    }
    fn powf(&self, p: f64) -> Self {
        // integer powers stay single valued
        if p.fract() == 0.0 && p.abs() <= 64.0 {
            self.powi(p as i32)
        } else {
            Complex64::powf(*self, p)
        }
    }
    fn sin(&self) -> Self {
        Complex64::sin(*self)
    }
    fn cos(&self) -> Self {
        Complex64::cos(*self)
    }
}

impl<S: Scalar> Series for Jet<S> {
    fn lift(&self, c: f64) -> Self {
        Jet::lift(self, c)
    }
    fn add(&self, o: &Self) -> Self {
        Jet::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Jet::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Jet::mul(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        Jet::div(self, o)
    }
    fn neg(&self) -> Self {
        Jet::neg(self)
    }
    fn ln(&self) -> Self {
        Jet::ln(self)
    }
    fn exp(&self) -> Self {
        Jet::exp(self)
    }
    fn powf(&self, p: f64) -> Self {
        if p.fract() == 0.0 && (0.0..=8.0).contains(&p) {
            // exact products keep zero base values legal
            let mut acc = self.lift(1.0);
            for _ in 0..p as usize {
                acc = Jet::mul(&acc, self);
            }
            return acc;
        }
        Jet::powf(self, p)
    }
    fn sin(&self) -> Self {
        self.sin_cos().0
    }
    fn cos(&self) -> Self {
        self.sin_cos().1
    }
}

impl<S: Scalar> Series for Bi2<S> {
    fn lift(&self, c: f64) -> Self {
        Bi2::constant(S::from_f64(c))
    }
    fn add(&self, o: &Self) -> Self {
        Bi2::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Bi2::add(self, &o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        Bi2::mul(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        Bi2::mul(self, &o.unary(|j| j.lift(1.0).div(j)))
    }
    fn neg(&self) -> Self {
        Bi2::neg(self)
    }
    fn ln(&self) -> Self {
        self.unary(|j| j.ln())
    }
    fn exp(&self) -> Self {
        self.unary(|j| j.exp())
    }
    fn powf(&self, p: f64) -> Self {
        self.unary(|j| Series::powf(j, p))
    }
    fn sin(&self) -> Self {
        self.unary(|j| j.sin_cos().0)
    }
    fn cos(&self) -> Self {
        self.unary(|j| j.sin_cos().1)
    }
}

impl Series for MultiJet {
    fn lift(&self, c: f64) -> Self {
        MultiJet::constant(&self.layout, c)
    }
    fn add(&self, o: &Self) -> Self {
        MultiJet::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        MultiJet::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        MultiJet::mul(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        MultiJet::div(self, o)
    }
    fn neg(&self) -> Self {
        self.scale(-1.0)
    }
    fn ln(&self) -> Self {
        self.unary(|j| j.ln())
    }
    fn exp(&self) -> Self {
        self.unary(|j| j.exp())
    }
    fn powf(&self, p: f64) -> Self {
        if p.fract() == 0.0 && (0.0..=8.0).contains(&p) {
            let mut acc = self.lift(1.0);
            for _ in 0..p as usize {
                acc = MultiJet::mul(&acc, self);
            }
            return acc;
        }
        self.unary(|j| j.powf(p))
    }
    fn sin(&self) -> Self {
        self.unary(|j| j.sin_cos().0)
    }
    fn cos(&self) -> Self {
        self.unary(|j| j.sin_cos().1)
    }
}
