use std::io::Write;

use log::info;
use serde::Serialize;
use tycz_core::bergman::{distortion_series, fit_poly_in_m};
use tycz_core::geometry::curvature_report;
use tycz_core::potentials::{FamilyId, FamilyParams};
use tycz_core::projectivity::{
    balanced_check, certified_induced, default_grid, derivative_sign_scan, integer_root_test_for, BalancedReason, BalancedStatus,
    BalancedVerdict, InducibilityStatus, InducibilityVerdict, NotInducedReason, RootVerdict,
};
use tycz_core::psi::{classify_psi, free_params, PsiProfile};
use tycz_core::series::Precision;
use tycz_core::szego::{default_t_grid, eulerian_q, logterm_fit, phi_series, psi_h_probe, DistortionProfile};

use crate::args::{parse_list, parse_m_range, parse_points, OutputArgs};
use crate::output::{open, write_json, Cell, Format, Table};
use crate::{CliError, Command, SzegoCommand};

fn format_or(o: &OutputArgs, default: Format, allowed: &[Format]) -> Result<Format, CliError> {
    let f = o.format.unwrap_or(default);
    if !allowed.contains(&f) {
        return Err(CliError::Usage(format!("format {f:?} is not available for this command")));
    }
    Ok(f)
}

fn emit_table(o: &OutputArgs, t: &Table) -> Result<(), CliError> {
    let f = format_or(o, Format::Csv, &[Format::Csv, Format::Json])?;
    let mut w = open(o.out.as_deref())?;
    t.write(&mut *w, f)?;
    w.flush()?;
    Ok(())
}

/// Text summary by default, the full record with `--format json`.
fn emit_verdict<T: Serialize>(o: &OutputArgs, text: &str, record: &T) -> Result<(), CliError> {
    let f = format_or(o, Format::Text, &[Format::Text, Format::Json])?;
    let mut w = open(o.out.as_deref())?;
    match f {
        Format::Json => write_json(&mut *w, record)?,
        _ => writeln!(w, "{text}")?,
    }
    w.flush()?;
    Ok(())
}

fn greek(name: &str) -> &str {
    match name {
        "lambda" => "λ",
        "mu" => "μ",
        "xi" => "ξ",
        "zeta" => "ζ",
        "kappa" => "κ",
        other => other,
    }
}

fn params_text(p: &FamilyParams) -> String {
    [("lambda", p.lambda), ("mu", p.mu), ("xi", p.xi), ("zeta", p.zeta), ("kappa", p.kappa)]
        .iter()
        .filter_map(|(k, v)| v.map(|v| format!("{}={v}", greek(k))))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn execute(cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::Families { output } => {
            let mut t = Table::new(&["slug", "name", "params", "curve"]);
            for id in FamilyId::ALL {
                t.push(vec![id.slug().into(), id.to_string().into(), id.required().join(" ").into(), id.allows_dim_one().to_string().into()]);
            }
            emit_table(output, &t)
        }
        Command::Classify { a, b, c, n, output } => {
            let cls = classify_psi(&PsiProfile::new(*a, *b, *c, *n))?;
            let mut text = cls.family.to_string();
            let p = params_text(&cls.params);
            if !p.is_empty() {
                text = format!("{text}, {p}");
            }
            let free = free_params(cls.family);
            if !free.is_empty() {
                let names: Vec<&str> = free.iter().map(|f| greek(f)).collect();
                info!("free parameters: {}", names.join(", "));
            }
            emit_verdict(output, &text, &cls)
        }
        Command::Tmg { potential, m, points, kernel, output } => {
            let pot = potential.build()?;
            let ms = parse_m_range(m)?;
            let points = parse_points(points)?;
            let mut t = Table::new(&["point", "m", "T", "truncation_degree", "tail_bound"]);
            for p in &points {
                info!("point {p}");
                let s = distortion_series(&pot, &ms, p, kernel.options())?;
                for (m, v) in s.m_grid.iter().zip(&s.values) {
                    t.push(vec![p.to_string().into(), (*m).into(), (*v).into(), s.truncation_degree.into(), s.tail_bound.into()]);
                }
            }
            emit_table(output, &t)
        }
        Command::Fit { potential, m, point, basis, fit_tol, kernel, output } => {
            let pot = potential.build()?;
            let ms = parse_m_range(m)?;
            let basis: Vec<i32> = parse_list(basis, "basis")?;
            let p = point.parse().map_err(CliError::usage)?;
            let s = distortion_series(&pot, &ms, &p, kernel.options())?;
            let fit = fit_poly_in_m(&s, &basis, *fit_tol)?;
            let f = format_or(output, Format::Csv, &[Format::Csv, Format::Json])?;
            if f == Format::Json {
                let mut w = open(output.out.as_deref())?;
                write_json(&mut *w, &fit)?;
                return Ok(w.flush()?);
            }
            let mut t = Table::new(&["power", "coefficient"]);
            for (b, c) in fit.basis.iter().zip(&fit.coefficients) {
                t.push(vec![Cell::Int(*b as i64), (*c).into()]);
            }
            info!("residual {:e}, condition {:e}, finite expansion {}", fit.residual, fit.condition, fit.finite_expansion);
            emit_table(output, &t)
        }
        Command::Curvature { potential, points, output } => {
            let pot = potential.build()?;
            let mut t = Table::new(&["point", "scal", "a1", "a2", "ric_norm2", "riem_norm2", "lap_scal"]);
            for p in parse_points(points)? {
                let c = curvature_report(&pot, &p)?;
                t.push(vec![p.to_string().into(), c.scal.into(), c.a1.into(), c.a2.into(), c.ric_norm2.into(), c.riem_norm2.into(), c.lap_scal.into()]);
            }
            emit_table(output, &t)
        }
        Command::Inducible { potential, h_max, grid_points, output } => {
            let pot = potential.radial()?;
            let grid = default_grid(&pot, *grid_points);
            let scan = derivative_sign_scan(&pot, &grid, *h_max, Precision::from_env())?;
            let roots = integer_root_test_for(&pot).ok();
            let certified = pot.family.as_ref().is_some_and(|(id, p)| pot.n == 2 && certified_induced(*id, p));
            let text = inducible_text(&scan, roots.as_ref(), certified);
            #[derive(Serialize)]
            struct Record<'a> {
                scan: &'a InducibilityVerdict,
                integer_root_test: Option<&'a RootVerdict>,
                certified_induced: bool,
            }
            emit_verdict(output, &text, &Record { scan: &scan, integer_root_test: roots.as_ref(), certified_induced: certified })
        }
        Command::Balanced { potential, max_degree, kernel, output } => {
            let pot = potential.build()?;
            let v = balanced_check(&pot, *max_degree, kernel.options())?;
            emit_verdict(output, &balanced_text(&v), &v)
        }
        Command::Szego { what } => szego(what),
        Command::Selftest { only } => {
            let ids: Vec<u32> = if only.is_empty() { (1..=10).collect() } else { only.clone() };
            let mut unexpected = 0;
            for id in ids {
                let r = tycz_core::acceptance::run_criterion(id);
                println!("{}", r.line());
                if !r.passed && !r.known_failure() {
                    unexpected += 1;
                }
            }
            if unexpected > 0 {
                return Err(CliError::Compute(tycz_core::Error::InvalidInput(format!("{unexpected} acceptance criteria failed"))));
            }
            Ok(())
        }
        Command::Run { .. } => Err(CliError::Usage("nested run".into())),
    }
}

fn inducible_text(scan: &InducibilityVerdict, roots: Option<&RootVerdict>, certified: bool) -> String {
    let mut lines = Vec::new();
    lines.push(match &scan.status {
        InducibilityStatus::Obstructed { r, h, value } => {
            format!("Obstructed: d^{h} e^f / dr^{h} = {value:e} < 0 at r = {r:e}; not projectively induced")
        }
        InducibilityStatus::NoObstructionFound { h_max, r_grid } => {
            format!("NoObstructionFound up to h = {h_max} on {} grid points (not a proof)", r_grid.len())
        }
    });
    match roots {
        Some(RootVerdict::NotInduced { reason: NotInducedReason::NonIntegerRoot { y0 } }) => {
            lines.push(format!("integer-root test: NotInduced, the limit y0 = {y0} of y is a non-integer root of psi"))
        }
        Some(RootVerdict::NotInduced { reason: NotInducedReason::NonzeroBAtZero { b } }) => {
            lines.push(format!("integer-root test: NotInduced, y tends to 0 but B = {b}"))
        }
        Some(RootVerdict::Inconclusive) => lines.push("integer-root test: Inconclusive".into()),
        None => lines.push("integer-root test: not applicable".into()),
    }
    lines.push(if certified { "catalog: certified induced".into() } else { "catalog: not among the certified induced metrics".to_string() });
    lines.join("\n")
}

fn balanced_text(v: &BalancedVerdict) -> String {
    match &v.status {
        BalancedStatus::Balanced { constant, checked_to } => format!("Balanced: C = {constant} (checked to degree {checked_to})"),
        BalancedStatus::NotBalanced { reason: BalancedReason::MissingMonomialDegree { degree } } => {
            format!("NotBalanced: missing monomial degree {degree}")
        }
        BalancedStatus::NotBalanced { reason: BalancedReason::CoefficientMismatch { degree, lhs, rhs } } => {
            format!("NotBalanced: coefficient mismatch at degree {degree} (kernel {lhs:e}, C e^Phi {rhs:e})")
        }
    }
}

fn szego(what: &SzegoCommand) -> Result<(), CliError> {
    match what {
        SzegoCommand::Phi { profile, n, t0, t, order, output } => {
            let prof = DistortionProfile::parse(*n, *t0, profile).map_err(CliError::usage)?;
            let ts = match t {
                Some(s) => parse_list::<f64>(s, "t values")?,
                None => default_t_grid(20),
            };
            let order = order.unwrap_or(prof.n + prof.k0_max());
            let mut header = vec!["t".to_string()];
            header.extend((0..=order).map(|h| format!("phi_{h}")));
            let mut tab = Table::new(&header);
            for &t in &ts {
                let v = phi_series(&prof, t, Some(order))?;
                let mut row = vec![Cell::Num(t)];
                row.extend(v.derivatives.iter().map(|d| Cell::Num(*d)));
                tab.push(row);
            }
            emit_table(output, &tab)
        }
        SzegoCommand::Logterm { profile, n, t0, window, points, output } => {
            let prof = DistortionProfile::parse(*n, *t0, profile).map_err(CliError::usage)?;
            let w: Vec<f64> = parse_list(window, "window")?;
            if w.len() != 2 {
                return Err(CliError::Usage("--window takes two values, e.g. 0.5,0.999".into()));
            }
            prof.check_positive(64)?;
            let fit = logterm_fit(&prof, *n, (w[0], w[1]), *points)?;
            let text = format!("b = {:e} (a = {:e}, held-out residual {:e})", fit.b_estimate, fit.a_boundary, fit.residual);
            emit_verdict(output, &text, &fit)
        }
        SzegoCommand::PsiH { n, k0, h, grid_points, output } => {
            let probe = psi_h_probe(*n, *k0, *h, &default_t_grid(*grid_points))?;
            emit_verdict(output, &format!("{:?}", probe.classification), &probe)
        }
        SzegoCommand::Eulerian { k, output } => {
            let mut t = Table::new(&["power", "coefficient"]);
            for (i, c) in eulerian_q(*k).iter().enumerate() {
                t.push(vec![i.into(), c.to_string().into()]);
            }
            emit_table(output, &t)
        }
    }
}
