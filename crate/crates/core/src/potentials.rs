//! Radial and Reinhardt Kähler potentials, and the closed-form catalog of
//! radial cscK potentials in complex dimension two.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::series::scalar::PI_2;
use crate::series::{Dd, Jet, Precision, Scalar};

/// Default cap on jet orders.
pub const DEFAULT_ORDER_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyId {
    Flat,
    Simanca,
    A03,
    FubiniStudy,
    Hyperbolic,
    /// tangent solutions, `psi` has no real root
    Case11a,
    /// two negative roots, bounded annulus
    Case6,
    /// one positive root `mu lambda / 2`
    Case7,
    /// `A < 0`, one positive and one negative root, exterior domain
    Case8,
    /// `A < 0`, two positive roots
    Case9,
    /// double negative root
    Case10a,
}

impl FamilyId {
    pub const ALL: [FamilyId; 11] = [
        FamilyId::Flat,
        FamilyId::Simanca,
        FamilyId::A03,
        FamilyId::FubiniStudy,
        FamilyId::Hyperbolic,
        FamilyId::Case11a,
        FamilyId::Case6,
        FamilyId::Case7,
        FamilyId::Case8,
        FamilyId::Case9,
        FamilyId::Case10a,
    ];

    /// Short name used on the command line.
    pub fn slug(self) -> &'static str {
        match self {
            FamilyId::Flat => "flat",
            FamilyId::Simanca => "simanca",
            FamilyId::A03 => "a03",
            FamilyId::FubiniStudy => "fs",
            FamilyId::Hyperbolic => "hyp",
            FamilyId::Case11a => "an0iii",
            FamilyId::Case6 => "an0iv",
            FamilyId::Case7 => "an0v",
            FamilyId::Case8 => "an0vi",
            FamilyId::Case9 => "an0vii",
            FamilyId::Case10a => "an0viii",
        }
    }

    /// Parameters the family needs, in CLI order.
    pub fn required(self) -> &'static [&'static str] {
        match self {
            FamilyId::Flat => &[],
            FamilyId::Simanca | FamilyId::A03 => &["lambda", "mu"],
            FamilyId::FubiniStudy | FamilyId::Hyperbolic => &["mu"],
            FamilyId::Case11a => &["lambda", "mu", "kappa"],
            FamilyId::Case6 => &["zeta", "mu", "xi"],
            FamilyId::Case7 | FamilyId::Case8 => &["lambda", "mu", "xi"],
            FamilyId::Case9 => &["zeta", "mu"],
            FamilyId::Case10a => &["mu", "kappa"],
        }
    }

    /// Families that also make sense on a complex curve.
    pub fn allows_dim_one(self) -> bool {
        matches!(
            self,
            FamilyId::Flat | FamilyId::FubiniStudy | FamilyId::Hyperbolic
        )
    }

    /// A parameter set accepted by `family_potential`.
    pub fn default_params(self) -> FamilyParams {
        let p = FamilyParams::default();
        match self {
            FamilyId::Flat => p,
            FamilyId::Simanca | FamilyId::A03 => p.with_lambda(1.0).with_mu(1.0),
            FamilyId::FubiniStudy | FamilyId::Hyperbolic => p.with_mu(1.0),
            FamilyId::Case11a => p.with_lambda(1.0).with_mu(1.0).with_kappa(0.0),
            FamilyId::Case6 => p.with_zeta(0.5).with_mu(2.0).with_xi(1.0),
            FamilyId::Case7 => p.with_lambda(2.0).with_mu(4.0).with_xi(0.5),
            FamilyId::Case8 => p.with_lambda(1.0).with_mu(2.0).with_xi(1.0),
            FamilyId::Case9 => p.with_zeta(1.0 / 3.0).with_mu(3.0),
            FamilyId::Case10a => p.with_mu(2.0).with_kappa(1.0),
        }
    }

    /// Maps `u` in the unit cube onto an admissible parameter set, one
    /// coordinate per entry of `required()`.
    pub fn sample_params(self, u: [f64; 3]) -> FamilyParams {
        let lerp = |i: usize, a: f64, b: f64| a + (b - a) * u[i].clamp(0.0, 1.0);
        let p = FamilyParams::default();
        match self {
            FamilyId::Flat => p,
            FamilyId::Simanca | FamilyId::A03 => p.with_lambda(lerp(0, 0.5, 3.0)).with_mu(lerp(1, 0.5, 3.0)),
            FamilyId::FubiniStudy | FamilyId::Hyperbolic => p.with_mu(lerp(0, 0.5, 4.0)),
            FamilyId::Case11a => p.with_lambda(lerp(0, 0.3, 2.0)).with_mu(lerp(1, 0.5, 3.0)).with_kappa(lerp(2, -1.0, 1.0)),
            FamilyId::Case6 => p.with_zeta(lerp(0, 0.1, 0.9)).with_mu(lerp(1, 0.5, 3.0)).with_xi(lerp(2, 0.5, 2.0)),
            FamilyId::Case7 | FamilyId::Case8 => p.with_lambda(lerp(0, 0.5, 3.0)).with_mu(lerp(1, 0.5, 4.0)).with_xi(lerp(2, 0.3, 2.0)),
            FamilyId::Case9 => p.with_zeta(lerp(0, 0.1, 0.9)).with_mu(lerp(1, 0.5, 3.0)),
            FamilyId::Case10a => p.with_mu(lerp(0, 0.5, 3.0)).with_kappa(lerp(1, -1.0, 1.0)),
        }
    }

    /// Coefficients `(A, B)` of `psi(y) = A y^2 + y + B`.
    pub fn profile_coeffs(self, p: &FamilyParams) -> Result<(f64, f64)> {
        let l = || p.get("lambda");
        let m = || p.get("mu");
        let z = || p.get("zeta");
        Ok(match self {
            FamilyId::Flat => (0.0, 0.0),
            FamilyId::Simanca => (0.0, -l()?),
            FamilyId::A03 => (0.0, l()?),
            FamilyId::FubiniStudy => (-1.0 / m()?, 0.0),
            FamilyId::Hyperbolic => (1.0 / m()?, 0.0),
            FamilyId::Case11a => {
                let (l, m) = (l()?, m()?);
                (1.0 / m, m * (0.25 + l * l))
            }
            FamilyId::Case6 => {
                let (z, m) = (z()?, m()?);
                (1.0 / m, m * (1.0 - z * z) / 4.0)
            }
            FamilyId::Case7 => {
                let (l, m) = (l()?, m()?);
                (1.0 / m, -m * l * (l + 2.0) / 4.0)
            }
            FamilyId::Case8 => {
                let (l, m) = (l()?, m()?);
                (-1.0 / m, m * l * (l + 2.0) / 4.0)
            }
            FamilyId::Case9 => {
                let (z, m) = (z()?, m()?);
                (-1.0 / m, -m * (1.0 - z * z) / 4.0)
            }
            FamilyId::Case10a => {
                let m = m()?;
                (1.0 / m, m / 4.0)
            }
        })
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyId::Flat => "Flat",
            FamilyId::Simanca => "Simanca",
            FamilyId::A03 => "A03",
            FamilyId::FubiniStudy => "FubiniStudy",
            FamilyId::Hyperbolic => "Hyperbolic",
            FamilyId::Case11a => "Case11a(An0iii)",
            FamilyId::Case6 => "Case6(An0iv)",
            FamilyId::Case7 => "Case7(An0v)",
            FamilyId::Case8 => "Case8(An0vi)",
            FamilyId::Case9 => "Case9(An0vii)",
            FamilyId::Case10a => "Case10a(An0viii)",
        };
        f.write_str(s)
    }
}

impl FromStr for FamilyId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let k = s.to_ascii_lowercase().replace(['-', '_', ' '], "");
        Ok(match k.as_str() {
            "flat" | "a01" => FamilyId::Flat,
            "simanca" | "a02" => FamilyId::Simanca,
            "a03" => FamilyId::A03,
            "fs" | "fubinistudy" | "an0fs" => FamilyId::FubiniStudy,
            "hyp" | "hyperbolic" | "an0hyp" => FamilyId::Hyperbolic,
            "an0iii" | "case11a" => FamilyId::Case11a,
            "an0iv" | "case6" => FamilyId::Case6,
            "an0v" | "case7" => FamilyId::Case7,
            "an0vi" | "case8" => FamilyId::Case8,
            "an0vii" | "case9" => FamilyId::Case9,
            "an0viii" | "case10a" => FamilyId::Case10a,
            _ => return Err(Error::UnknownFamily(s.to_string())),
        })
    }
}

/// Catalog parameters; each is present only when the family uses it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub xi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub zeta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kappa: Option<f64>,
}

impl FamilyParams {
    pub fn with_lambda(mut self, v: f64) -> Self {
        self.lambda = Some(v);
        self
    }
    pub fn with_mu(mut self, v: f64) -> Self {
        self.mu = Some(v);
        self
    }
    pub fn with_xi(mut self, v: f64) -> Self {
        self.xi = Some(v);
        self
    }
    pub fn with_zeta(mut self, v: f64) -> Self {
        self.zeta = Some(v);
        self
    }
    pub fn with_kappa(mut self, v: f64) -> Self {
        self.kappa = Some(v);
        self
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        let v = match name {
            "lambda" => self.lambda,
            "mu" => self.mu,
            "xi" => self.xi,
            "zeta" => self.zeta,
            "kappa" => self.kappa,
            _ => None,
        };
        v.ok_or_else(|| Error::ParamOutOfRange(format!("missing parameter {name}")))
    }

    /// Keeps only the parameters `id` uses.
    pub fn restricted_to(&self, id: FamilyId) -> FamilyParams {
        let mut out = FamilyParams::default();
        for name in id.required() {
            let v = self.get(name).ok();
            match *name {
                "lambda" => out.lambda = v,
                "mu" => out.mu = v,
                "xi" => out.xi = v,
                "zeta" => out.zeta = v,
                _ => out.kappa = v,
            }
        }
        out
    }
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, v) in [
            ("lambda", self.lambda),
            ("mu", self.mu),
            ("xi", self.xi),
            ("zeta", self.zeta),
            ("kappa", self.kappa),
        ] {
            if let Some(v) = v {
                parts.push(format!("{k}={v}"));
            }
        }
        f.write_str(&parts.join(" "))
    }
}

/// `f(r)` with `r = |z|^2` on `lo < r < hi` (or `0 <= r` when the potential
/// extends smoothly over the origin).
#[derive(Clone, Debug)]
pub struct RadialPotential {
    pub label: String,
    pub n: usize,
    pub expr: Expr,
    pub lo: Dd,
    pub hi: Option<Dd>,
    pub origin_ok: bool,
    pub family: Option<(FamilyId, FamilyParams)>,
    /// constant added to the catalog expression by [`RadialPotential::shifted`]
    pub offset: f64,
}

impl RadialPotential {
    pub fn custom(expr: Expr, n: usize, lo: f64, hi: Option<f64>, origin_ok: bool) -> Result<Self> {
        if !(1..=2).contains(&n) {
            return Err(Error::ParamOutOfRange(format!("dimension n={n}; 1 or 2 supported")));
        }
        if lo < 0.0 || hi.is_some_and(|h| h <= lo) {
            return Err(Error::ParamOutOfRange("empty radial domain".into()));
        }
        if expr.max_var().unwrap_or(0) > 0 {
            return Err(Error::InvalidInput("radial expression may only use variable 0".into()));
        }
        Ok(RadialPotential {
            label: "custom".into(),
            n,
            expr,
            lo: Dd::from(lo),
            hi: hi.map(Dd::from),
            origin_ok: origin_ok && lo == 0.0,
            family: None,
            offset: 0.0,
        })
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64()
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.map_or(f64::INFINITY, |h| h.to_f64())
    }

    pub fn contains(&self, r: f64) -> bool {
        let lo = self.lo_f64();
        let above = if self.origin_ok && r == 0.0 { true } else { r > lo };
        above && r < self.hi_f64() && r.is_finite()
    }

    pub fn domain_string(&self) -> String {
        let open = if self.origin_ok { "[" } else { "(" };
        format!("{open}{}, {})", self.lo_f64(), self.hi_f64())
    }

    pub fn check(&self, r: f64) -> Result<()> {
        if self.contains(r) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                point: format!("r={r}"),
                domain: self.domain_string(),
            })
        }
    }

    /// An interior point used as the default base of grids.
    pub fn reference_point(&self) -> f64 {
        let lo = self.lo_f64();
        match self.hi {
            Some(h) => lo + 0.5 * (h.to_f64() - lo),
            None => lo + lo.max(1.0),
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.expr.eval(&[r])
    }

    /// Taylor coefficients of `f` at `r0` up to `order` in the given scalar.
    pub fn jet_in<S: Scalar>(&self, r0: S, order: usize) -> Jet<S> {
        self.expr.eval(&[Jet::variable(r0, order)])
    }

    /// Taylor jet of `f` at `r0`; coefficient k is `f^{(k)}(r0)/k!`.
    pub fn jet(&self, r0: f64, order: usize) -> Result<Jet<f64>> {
        self.jet_with(r0, order, DEFAULT_ORDER_CAP, Precision::Double)
    }

    pub fn jet_with(&self, r0: f64, order: usize, cap: usize, prec: Precision) -> Result<Jet<f64>> {
        self.check(r0)?;
        if order > cap {
            return Err(Error::OrderTooLarge { order, cap });
        }
        let j = match prec {
            Precision::Double => self.jet_in(r0, order),
            Precision::Extended => self.jet_in(Dd::from(r0), order).to_f64(),
        };
        if !j.is_finite() {
            return Err(Error::JetOverflow { order });
        }
        Ok(j)
    }

    /// `(f', (r f')')` at `r`, the two radial metric eigenvalue factors.
    pub fn eigen_factors(&self, r: f64) -> Result<(f64, f64)> {
        let j = self.jet(r, 2)?;
        let f1 = j.c[1];
        let f2 = 2.0 * j.c[2];
        Ok((f1, f1 + r * f2))
    }

    /// The same potential with `f` replaced by `f + c`.
    pub fn shifted(&self, c: f64) -> RadialPotential {
        let mut out = self.clone();
        out.expr = self.expr.clone() + Expr::c(c);
        out.label = format!("{}+{c}", self.label);
        out.offset += c;
        out
    }
}

/// `Phi(x1, x2)` with `x_i = |z_i|^2` on `0 <= x1 < x1_max`, `0 <= x2 < upper(x1)`.
#[derive(Clone, Debug)]
pub struct ReinhardtPotential {
    pub label: String,
    pub expr: Expr,
    pub x1_max: Dd,
    /// upper boundary of x2 as an expression in variable 0 (= x1)
    pub upper: Expr,
    pub p: Option<f64>,
    pub offset: f64,
}

impl ReinhardtPotential {
    pub fn upper_at(&self, x1: f64) -> f64 {
        self.upper.eval(&[x1])
    }

    pub fn contains(&self, x1: f64, x2: f64) -> bool {
        x1 >= 0.0 && x2 >= 0.0 && x1 < self.x1_max.to_f64() && x2 < self.upper_at(x1)
    }

    pub fn domain_string(&self) -> String {
        format!(
            "0 <= x1 < {}, 0 <= x2 < {}",
            self.x1_max.to_f64(),
            self.upper
        )
    }

    pub fn check(&self, x1: f64, x2: f64) -> Result<()> {
        if self.contains(x1, x2) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                point: format!("(x1={x1}, x2={x2})"),
                domain: self.domain_string(),
            })
        }
    }

    pub fn value(&self, x1: f64, x2: f64) -> f64 {
        self.expr.eval(&[x1, x2])
    }

    pub fn shifted(&self, c: f64) -> ReinhardtPotential {
        let mut out = self.clone();
        out.expr = self.expr.clone() + Expr::c(c);
        out.offset += c;
        out
    }
}

/// Either kind of potential.
#[derive(Clone, Debug)]
pub enum Potential {
    Radial(RadialPotential),
    Reinhardt(ReinhardtPotential),
}

impl Potential {
    pub fn label(&self) -> &str {
        match self {
            Potential::Radial(p) => &p.label,
            Potential::Reinhardt(p) => &p.label,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Potential::Radial(p) => p.n,
            Potential::Reinhardt(_) => 2,
        }
    }

    pub fn shifted(&self, c: f64) -> Potential {
        match self {
            Potential::Radial(p) => Potential::Radial(p.shifted(c)),
            Potential::Reinhardt(p) => Potential::Reinhardt(p.shifted(c)),
        }
    }
}

/// A point of the domain: `r = |z|^2` for radial potentials, `(x1, x2)` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    R(f64),
    X(f64, f64),
}

impl Point {
    /// `(x1, x2)` coordinates; a radial point sits at `z = (sqrt r, 0)`.
    pub fn coords(&self) -> (f64, f64) {
        match *self {
            Point::R(r) => (r, 0.0),
            Point::X(a, b) => (a, b),
        }
    }

    pub fn radius2(&self) -> f64 {
        let (a, b) = self.coords();
        a + b
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::R(r) => write!(f, "r={r}"),
            Point::X(a, b) => write!(f, "x1={a};x2={b}"),
        }
    }
}

impl FromStr for Point {
    type Err = Error;
    /// Accepts `r=0.5`, `x1=0.1,x2=0.2` or a bare number.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("cannot parse point '{s}'"));
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
        let s = s.trim();
        if let Some(v) = s.strip_prefix("r=") {
            return Ok(Point::R(num(v)?));
        }
        if s.contains("x1=") {
            let mut x1 = None;
            let mut x2 = None;
            for part in s.split([',', ';']) {
                let (k, v) = part.split_once('=').ok_or_else(bad)?;
                match k.trim() {
                    "x1" => x1 = Some(num(v)?),
                    "x2" => x2 = Some(num(v)?),
                    _ => return Err(bad()),
                }
            }
            return Ok(Point::X(x1.ok_or_else(bad)?, x2.unwrap_or(0.0)));
        }
        Ok(Point::R(num(s)?))
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::ParamOutOfRange(format!("{name} must be > 0, got {v}")))
    }
}

fn dd(x: f64) -> Dd {
    Dd::from(x)
}

/// Builds the closed-form potential of a catalog family with its maximal
/// radial domain.
pub fn family_potential(id: FamilyId, params: &FamilyParams, n: usize) -> Result<RadialPotential> {
    if n == 1 && !id.allows_dim_one() {
        return Err(Error::ParamOutOfRange(format!("{id} is only defined for n = 2")));
    }
    if !(1..=2).contains(&n) {
        return Err(Error::ParamOutOfRange(format!("dimension n={n}; 1 or 2 supported")));
    }
    let r = || Expr::var(0);
    let ln_r = || Expr::var(0).ln();
    let c = Expr::c;
    let get = |k: &str| params.get(k);
    let (expr, lo, hi, origin_ok): (Expr, Dd, Option<Dd>, bool) = match id {
        FamilyId::Flat => (r(), dd(0.0), None, true),
        FamilyId::Simanca => {
            let l = positive("lambda", get("lambda")?)?;
            let m = positive("mu", get("mu")?)?;
            (m * r() + l * ln_r(), dd(0.0), None, false)
        }
        FamilyId::A03 => {
            let l = positive("lambda", get("lambda")?)?;
            let m = positive("mu", get("mu")?)?;
            (m * r() - l * ln_r(), dd(l) / dd(m), None, false)
        }
        FamilyId::FubiniStudy => {
            let m = positive("mu", get("mu")?)?;
            (m * (c(1.0) + r()).ln(), dd(0.0), None, true)
        }
        FamilyId::Hyperbolic => {
            let m = positive("mu", get("mu")?)?;
            (-(m * (c(1.0) - r()).ln()), dd(0.0), Some(dd(1.0)), true)
        }
        FamilyId::Case11a => {
            let l = positive("lambda", get("lambda")?)?;
            let m = positive("mu", get("mu")?)?;
            let k = get("kappa")?;
            // theta = lambda log r + kappa in (atan(1/(2 lambda)), pi/2)
            let th_lo = Dd::atan(dd(1.0) / dd(2.0 * l));
            let lo = ((th_lo - dd(k)) / dd(l)).exp();
            let hi = ((PI_2 - dd(k)) / dd(l)).exp();
            let theta = l * ln_r() + c(k);
            (
                -(m * theta.cos().ln()) - (m / 2.0) * ln_r(),
                lo,
                Some(hi),
                false,
            )
        }
        FamilyId::Case6 => {
            let z = get("zeta")?;
            if !(z > 0.0 && z < 1.0) {
                return Err(Error::ParamOutOfRange(format!("zeta must lie in (0,1), got {z}")));
            }
            let m = positive("mu", get("mu")?)?;
            let xi = positive("xi", get("xi")?)?;
            // (1-zeta)/(1+zeta) < xi r^zeta < 1
            let lo = ((dd(1.0) - dd(z)) / ((dd(1.0) + dd(z)) * dd(xi))).powf(1.0 / z);
            let hi = dd(xi).powf(-1.0 / z);
            (
                -(m * (c(1.0) - xi * r().pow(z)).ln()) - (m * (1.0 - z) / 2.0) * ln_r(),
                lo,
                Some(hi),
                false,
            )
        }
        FamilyId::Case7 => {
            let l = positive("lambda", get("lambda")?)?;
            let m = positive("mu", get("mu")?)?;
            let xi = positive("xi", get("xi")?)?;
            let hi = dd(xi).powf(-1.0 / (l + 1.0));
            (
                (m * l / 2.0) * ln_r() - m * (c(1.0) - xi * r().pow(l + 1.0)).ln(),
                dd(0.0),
                Some(hi),
                false,
            )
        }
        FamilyId::Case8 => {
            let l = positive("lambda", get("lambda")?)?;
            let m = positive("mu", get("mu")?)?;
            let xi = positive("xi", get("xi")?)?;
            // y > 0 iff r^{lambda+1} > xi lambda / (lambda + 2)
            let lo = (dd(xi) * dd(l) / (dd(l) + dd(2.0))).powf(1.0 / (l + 1.0));
            (
                (m * (l + 2.0) / 2.0) * ln_r() + m * (c(1.0) + xi * r().pow(-(l + 1.0))).ln(),
                lo,
                None,
                false,
            )
        }
        FamilyId::Case9 => {
            let z = get("zeta")?;
            if !(z > 0.0 && z < 1.0) {
                return Err(Error::ParamOutOfRange(format!("zeta must lie in (0,1), got {z}")));
            }
            let m = positive("mu", get("mu")?)?;
            (
                (m * (1.0 + z) / 2.0) * ln_r() + m * (c(1.0) + r().pow(-z)).ln(),
                dd(0.0),
                None,
                false,
            )
        }
        FamilyId::Case10a => {
            let m = positive("mu", get("mu")?)?;
            let k = get("kappa")?;
            (
                -(m * (c(k) - ln_r()).ln()) - (m / 2.0) * ln_r(),
                dd(k - 2.0).exp(),
                Some(dd(k).exp()),
                false,
            )
        }
    };
    for (name, v) in [
        ("lambda", params.lambda),
        ("mu", params.mu),
        ("xi", params.xi),
        ("zeta", params.zeta),
        ("kappa", params.kappa),
    ] {
        if let Some(v) = v {
            if !v.is_finite() {
                return Err(Error::ParamOutOfRange(format!("{name} is not finite")));
            }
        }
    }
    Ok(RadialPotential {
        label: id.slug().to_string(),
        n,
        expr,
        lo,
        hi,
        origin_ok,
        family: Some((id, params.restricted_to(id))),
        offset: 0.0,
    })
}

/// `Phi = -log((1 - x1)^p - x2)` on `x1 + x2^{1/p} < 1`.
pub fn pdomain_potential(p: f64) -> Result<ReinhardtPotential> {
    let p = positive("p", p)?;
    let x1 = Expr::var(0);
    let x2 = Expr::var(1);
    let b = (Expr::c(1.0) - x1).pow(p);
    Ok(ReinhardtPotential {
        label: format!("pdomain(p={p})"),
        expr: -(b - x2).ln(),
        x1_max: Dd::from(1.0),
        upper: (Expr::c(1.0) - Expr::var(0)).pow(p),
        p: Some(p),
        offset: 0.0,
    })
}

/// `c = (1 - 1/p)(1 - x2 / (1 - x1)^p)`, the point-dependent constant in
/// the p-domain kernel.
pub fn pdomain_c(p: f64, x1: f64, x2: f64) -> f64 {
    (1.0 - 1.0 / p) * (1.0 - x2 / (1.0 - x1).powf(p))
}

/// Serializable description of a potential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    Family {
        family: FamilyId,
        #[serde(default)]
        params: FamilyParams,
        #[serde(default = "two")]
        n: usize,
    },
    Pdomain {
        p: f64,
    },
    Custom {
        expr: Expr,
        n: usize,
        lo: f64,
        #[serde(default)]
        hi: Option<f64>,
        #[serde(default)]
        origin_ok: bool,
    },
}

fn two() -> usize {
    2
}

impl PotentialSpec {
    pub fn build(&self) -> Result<Potential> {
        Ok(match self {
            PotentialSpec::Family { family, params, n } => {
                Potential::Radial(family_potential(*family, params, *n)?)
            }
            PotentialSpec::Pdomain { p } => Potential::Reinhardt(pdomain_potential(*p)?),
            PotentialSpec::Custom {
                expr,
                n,
                lo,
                hi,
                origin_ok,
            } => Potential::Radial(RadialPotential::custom(expr.clone(), *n, *lo, *hi, *origin_ok)?),
        })
    }
}

/// Convenience: `jet_radial` as a free function.
pub fn jet_radial(pot: &RadialPotential, r0: f64, order: usize) -> Result<Jet<f64>> {
    pot.jet(r0, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fam(id: FamilyId) -> RadialPotential {
        family_potential(id, &id.default_params(), 2).unwrap()
    }

    #[test]
    fn simanca_jet_at_one() {
        let p = family_potential(FamilyId::Simanca, &FamilyParams::default().with_lambda(1.0).with_mu(1.0), 2).unwrap();
        let j = jet_radial(&p, 1.0, 2).unwrap();
        assert_relative_eq!(j.c[0], 1.0);
        assert_relative_eq!(j.c[1], 2.0);
        assert_relative_eq!(j.c[2], -0.5);
    }

    #[test]
    fn flat_jet() {
        let j = jet_radial(&fam(FamilyId::Flat), 3.0, 3).unwrap();
        assert_eq!(j.c, vec![3.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn an0v_value_and_domain() {
        let pr = FamilyParams::default().with_lambda(2.0).with_mu(4.0).with_xi(0.5);
        let p = family_potential(FamilyId::Case7, &pr, 2).unwrap();
        assert_relative_eq!(p.value(1.0), 4.0 * 2f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(p.hi_f64(), 2f64.powf(1.0 / 3.0), max_relative = 1e-15);
        assert!(p.jet(1.3, 2).is_err());
    }

    #[test]
    fn pdomain_values() {
        let p = pdomain_potential(2.0).unwrap();
        assert_eq!(p.value(0.0, 0.0), 0.0);
        assert_relative_eq!(p.value(0.5, 0.1), -(0.15f64).ln(), max_relative = 1e-14);
        let ball = pdomain_potential(1.0).unwrap();
        assert_relative_eq!(ball.value(0.2, 0.3), -(0.5f64).ln(), max_relative = 1e-15);
        assert!(pdomain_potential(0.0).is_err());
    }

    #[test]
    fn order_cap_and_domain_errors() {
        let p = fam(FamilyId::Simanca);
        assert!(matches!(p.jet(1.0, 65), Err(Error::OrderTooLarge { .. })));
        assert!(matches!(p.jet(-1.0, 2), Err(Error::OutOfDomain { .. })));
        assert!(matches!(
            "nope".parse::<FamilyId>(),
            Err(Error::UnknownFamily(_))
        ));
        let bad = FamilyParams::default().with_zeta(1.5).with_mu(1.0);
        assert!(matches!(
            family_potential(FamilyId::Case9, &bad, 2),
            Err(Error::ParamOutOfRange(_))
        ));
    }

    #[test]
    fn positivity_on_every_family() {
        for id in FamilyId::ALL {
            let p = fam(id);
            let (lo, hi) = (p.lo_f64(), p.hi_f64().min(p.lo_f64() + 50.0));
            for i in 1..20 {
                let r = lo + (hi - lo) * i as f64 / 20.0;
                let (a, b) = p.eigen_factors(r).unwrap();
                assert!(a > 0.0 && b > 0.0, "{id} at r={r}: {a} {b}");
            }
        }
    }

    #[test]
    fn potential_spec_json_roundtrip() {
        let s = PotentialSpec::Family {
            family: FamilyId::Case7,
            params: FamilyId::Case7.default_params(),
            n: 2,
        };
        let txt = serde_json::to_string(&s).unwrap();
        let back: PotentialSpec = serde_json::from_str(&txt).unwrap();
        assert_eq!(s, back);
        assert!(back.build().is_ok());
    }

    #[test]
    fn point_parsing() {
        assert_eq!("r=1".parse::<Point>().unwrap(), Point::R(1.0));
        assert_eq!("x1=0.1,x2=0.2".parse::<Point>().unwrap(), Point::X(0.1, 0.2));
        assert!("r=abc".parse::<Point>().is_err());
    }
}
