//! Flags shared by several subcommands.

use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};
use tycz_core::bergman::BergmanOptions;
use tycz_core::potentials::{FamilyId, FamilyParams, Point, Potential, PotentialSpec, RadialPotential};

use crate::output::Format;
use crate::CliError;

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
pub struct PotentialArgs {
    /// catalog family (see `tycz families`)
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub zeta: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// exponent of the p-domain (used when no family is given)
    #[arg(long)]
    pub p: Option<f64>,
    /// complex dimension of a radial family
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// JSON file holding a potential description instead of the flags
    #[arg(long, conflicts_with_all = ["family", "p"])]
    pub potential: Option<PathBuf>,
}

impl PotentialArgs {
    pub fn family_id(&self) -> Result<Option<FamilyId>, CliError> {
        self.family.as_deref().map(|f| f.parse::<FamilyId>().map_err(CliError::usage)).transpose()
    }

    pub fn params(&self) -> FamilyParams {
        FamilyParams { lambda: self.lambda, mu: self.mu, xi: self.xi, zeta: self.zeta, kappa: self.kappa }
    }

    pub fn spec(&self) -> Result<PotentialSpec, CliError> {
        if let Some(path) = &self.potential {
            let text = std::fs::read_to_string(path)?;
            return serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())));
        }
        match (self.family_id()?, self.p) {
            (Some(family), _) => Ok(PotentialSpec::Family { family, params: self.params(), n: self.n }),
            (None, Some(p)) => Ok(PotentialSpec::Pdomain { p }),
            (None, None) => Err(CliError::Usage("give --family, --p or --potential".into())),
        }
    }

    /// Parameters left out fall back to the family defaults.
    pub fn build(&self) -> Result<Potential, CliError> {
        let mut spec = self.spec()?;
        if let PotentialSpec::Family { family, params, .. } = &mut spec {
            let defaults = family.default_params();
            for name in family.required() {
                if params.get(name).is_err() {
                    let v = defaults.get(name)?;
                    log::warn!("{} without --{name}; using {name} = {v}", family.slug());
                    match *name {
                        "lambda" => params.lambda = Some(v),
                        "mu" => params.mu = Some(v),
                        "xi" => params.xi = Some(v),
                        "zeta" => params.zeta = Some(v),
                        _ => params.kappa = Some(v),
                    }
                }
            }
        }
        Ok(spec.build()?)
    }

    pub fn radial(&self) -> Result<RadialPotential, CliError> {
        match self.build()? {
            Potential::Radial(p) => Ok(p),
            Potential::Reinhardt(_) => Err(CliError::Usage("this command needs a radial potential".into())),
        }
    }
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
pub struct KernelArgs {
    /// relative tolerance of the kernel sum
    #[arg(long)]
    pub tol: Option<f64>,
    /// degrees summed per block before the tail test
    #[arg(long)]
    pub degree_cap: Option<usize>,
    /// ignore closed-form norms and integrate everything
    #[arg(long)]
    pub quadrature_only: bool,
}

impl KernelArgs {
    pub fn options(&self) -> BergmanOptions {
        let mut o = BergmanOptions::default();
        if let Some(t) = self.tol {
            o = o.with_tol(t);
        }
        if let Some(c) = self.degree_cap {
            o.degree_cap = c;
        }
        if self.quadrature_only {
            o = o.quadrature_only();
        }
        o
    }
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
pub struct OutputArgs {
    /// write to this file instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// `A..B` (inclusive), `A..=B` or a single value.
pub fn parse_m_range(s: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse m range '{s}' (expected A..B)"));
    let num = |v: &str| v.trim().parse::<u32>().map_err(|_| bad());
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if a == 0 || b < a {
        return Err(CliError::Usage(format!("m range '{s}' must satisfy 1 <= A <= B")));
    }
    Ok((a..=b).collect())
}

pub fn parse_points(v: &[String]) -> Result<Vec<Point>, CliError> {
    v.iter().map(|s| s.parse::<Point>().map_err(CliError::usage)).collect()
}

pub fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| CliError::Usage(format!("cannot parse {what} '{s}'"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_m_range("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_m_range("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_m_range("5").unwrap(), vec![5]);
        assert!(parse_m_range("0..3").is_err());
        assert!(parse_m_range("4..2").is_err());
        assert!(parse_m_range("a..b").is_err());
    }
}
