use weylbound::counting::{
    global_counting_bounds, local_counting_bounds, local_counting_bounds_lowdim, BoundPair, Dimension, LocalGeometry,
};
use weylbound::eigenfunction::{
    grad_bound, grad_bound_preset, sup_bound, surface_deriv_bound, surface_gl_constant, surface_gl_constant_printed,
    EigenfunctionQuery, SurfaceDensityTable,
};
use weylbound::heat::{
    heat_trace_upper, local_heat_trace_upper, remainder_upper_surface, spectral_partial_sums, HeatQuery,
    HyperbolicSurface,
};
use weylbound::io::{parse_eigenvalue_file, Cell, Chart, EigenvalueFile, ParseOptions, Series, Table};
use weylbound::kernel::{
    counting_pairing, diagonal_value, kernel_f_even, kernel_odd, mehler_fock_roundtrip_with, shifted_to_unshifted,
    KernelCase, PointPairInvariant, TestFunction,
};
use weylbound::nu::nu;
use weylbound::specfun::QuadratureSpec;
use weylbound::zeta::{det_bounds, l2_term_with, DetQuery};
use weylbound::{Error, Result};

use crate::args::{Command, EigenInput, Grid, SurfaceArgs};

/// What a subcommand produced.
pub struct Report {
    pub table: Table,
    /// plain rendering when no format was asked for
    pub text: Option<String>,
    pub chart: Option<Chart>,
    pub warnings: Vec<String>,
}

impl Report {
    fn table(table: Table) -> Self {
        Report { table, text: None, chart: None, warnings: Vec::new() }
    }
}

/// Runs a subcommand; `tol` overrides the default quadrature tolerances.
pub fn run(cmd: &Command, tol: Option<f64>) -> Result<Report> {
    let spec = &match tol {
        Some(t) => QuadratureSpec::default().with_abs(t).with_rel(t),
        None => QuadratureSpec::default(),
    };
    match cmd {
        Command::Nu { m } => nu_cmd(*m),
        Command::Count { dim, d, tau, tau_grid, refined, global, volume } => {
            let taus = values("tau", *tau, tau_grid)?;
            count(*dim, *d, &taus, *refined, global.then_some(volume.unwrap_or(f64::NAN)))
        }
        Command::Eigfn { dim, d, lambda, deriv, surface, l, table } => {
            if *table {
                return surface_table(l.unwrap_or(1));
            }
            let (d, lambda) = (d.unwrap_or(f64::NAN), lambda.unwrap_or(f64::NAN));
            if *surface {
                surface_deriv(l.unwrap_or(1), d, lambda)
            } else {
                eigfn(*dim, d, lambda, *deriv)
            }
        }
        Command::Heat { dim, global, d, volume, systole, t, t_grid, .. } => {
            let ts = values("t", *t, t_grid)?;
            let target = if *global {
                HeatTarget::Global { volume: volume.unwrap_or(f64::NAN), systole: systole.unwrap_or(f64::NAN) }
            } else {
                HeatTarget::Local(d.unwrap_or(f64::NAN))
            };
            heat(*dim, target, &ts)
        }
        Command::HeatRemainder { input, surface, c, t_grid, log_y, .. } => {
            heat_remainder(input, surface, *c, &t_grid.0, *log_y)
        }
        Command::Detzeta { input, surface, c, eps, big_t } => {
            detzeta(input, surface, *c, *eps, *big_t, tol.is_some().then_some(spec))
        }
        Command::VerifyKernel { n, roundtrip } => verify_kernel(*n, *roundtrip, spec),
    }
}

fn values(name: &str, single: Option<f64>, grid: &Option<Grid>) -> Result<Vec<f64>> {
    match (single, grid) {
        (Some(x), None) => Ok(vec![x]),
        (None, Some(g)) => Ok(g.0.clone()),
        _ => Err(Error::domain(format!("give either --{name} or --{name}-grid"))),
    }
}

pub fn surface(args: &SurfaceArgs) -> Result<HyperbolicSurface> {
    let bolza = HyperbolicSurface::bolza();
    HyperbolicSurface::new(args.genus, args.systole.unwrap_or(bolza.systole))
}

pub fn load(input: &EigenInput) -> Result<EigenvalueFile> {
    parse_eigenvalue_file(&input.eigs, ParseOptions { closed: input.closed, sqrt_input: input.sqrt_input })
}

fn nu_cmd(m: u32) -> Result<Report> {
    let v = nu(m)?.value;
    let mut t = Table::new(&["m", "nu"]);
    t.push(vec![Cell::Num(m as f64), Cell::Num(v)])?;
    let mut r = Report::table(t);
    r.text = Some(format!("{v:.10}"));
    Ok(r)
}

fn count(n: u32, d: f64, taus: &[f64], refined: bool, volume: Option<f64>) -> Result<Report> {
    let dim = Dimension::new(n)?;
    let mut t = Table::new(&["n", "d", "tau", "lower", "upper"]);
    for &tau in taus {
        let b: BoundPair = match volume {
            Some(v) => global_counting_bounds(dim, v, d, tau)?,
            None if refined => local_counting_bounds_lowdim(n, LocalGeometry::new(d)?, tau)?,
            None => local_counting_bounds(dim, LocalGeometry::new(d)?, tau)?,
        };
        t.push(vec![(n as f64).into(), d.into(), tau.into(), b.lower.into(), b.upper.into()])?;
    }
    let kind = match volume {
        Some(_) => "global",
        None if refined => "refined",
        None => "local",
    };
    Ok(Report::table(t.with_meta("bounds", kind)))
}

fn eigfn(n: u32, d: f64, lambda: f64, deriv: bool) -> Result<Report> {
    let geom = LocalGeometry::new(d)?;
    let q = EigenfunctionQuery::new(lambda, geom, Dimension::new(n)?)?;
    let mut cols = vec!["n", "d", "lambda", "sup_sq"];
    let mut row: Vec<Cell> = vec![(n as f64).into(), d.into(), lambda.into(), sup_bound(&q)?.into()];
    if deriv {
        cols.push("grad_sq");
        row.push(grad_bound(&q)?.into());
        if (2..=4).contains(&n) {
            cols.push("grad_sq_preset");
            row.push(grad_bound_preset(n, geom, lambda)?.into());
        }
    }
    let mut t = Table::new(&cols);
    t.push(row)?;
    Ok(Report::table(t))
}

fn surface_deriv(l: u32, d: f64, lambda: f64) -> Result<Report> {
    let v = surface_deriv_bound(l, LocalGeometry::new(d)?, lambda)?;
    let mut t = Table::new(&["l", "d", "lambda", "deriv_sq"]);
    t.push(vec![(l as f64).into(), d.into(), lambda.into(), v.into()])?;
    Ok(Report::table(t))
}

fn surface_table(l: u32) -> Result<Report> {
    let table = SurfaceDensityTable::get(l)?;
    let mut t = Table::new(&["l", "power", "density_coefficient", "polynomial_coefficient"]);
    for (&(k, c), (p, a)) in table.coefficients.iter().zip(table.polynomial()) {
        t.push(vec![(l as f64).into(), (k as f64).into(), (c as f64).into(), a.into()])?;
        debug_assert_eq!(p, k + 1);
    }
    let mut t = t.with_meta("G_computed", surface_gl_constant(l)?);
    if let Some(p) = surface_gl_constant_printed(l) {
        t = t.with_meta("G_printed", p);
    }
    Ok(Report::table(t))
}

enum HeatTarget {
    Local(f64),
    Global { volume: f64, systole: f64 },
}

fn heat(n: u32, target: HeatTarget, ts: &[f64]) -> Result<Report> {
    let dim = Dimension::new(n)?;
    let mut t = Table::new(&["n", "t", "trace_upper"]);
    for &time in ts {
        let v = match target {
            HeatTarget::Local(d) => local_heat_trace_upper(dim, LocalGeometry::new(d)?, time)?,
            HeatTarget::Global { volume, systole } => heat_trace_upper(dim, volume, systole, time)?,
        };
        t.push(vec![(n as f64).into(), time.into(), v.into()])?;
    }
    let kind = if matches!(target, HeatTarget::Local(_)) { "local" } else { "global" };
    Ok(Report::table(t.with_meta("trace", kind)))
}

fn heat_remainder(input: &EigenInput, surf: &SurfaceArgs, c: f64, ts: &[f64], log_y: bool) -> Result<Report> {
    let s = surface(surf)?;
    let file = load(input)?;
    let mut warnings = file.warnings.clone();
    if file.parsed.max_known() < c {
        return Err(Error::domain(format!(
            "eigenvalues are known up to {} only, below c = {c}",
            file.parsed.max_known()
        )));
    }
    let geom = LocalGeometry::new(s.systole)?;
    let mut t = Table::new(&["t", "head", "remainder_upper", "known_tail", "trace_upper"]);
    let (mut rem, mut trace) = (Vec::new(), Vec::new());
    for &time in ts {
        let bound = s.area() * remainder_upper_surface(geom, HeatQuery::new(time, c)?)?;
        let (head, tail) = spectral_partial_sums(&file.parsed, time, c)?;
        if tail > bound {
            warnings.push(format!("t = {time}: known eigenvalues above c exceed the remainder bound"));
        }
        t.push(vec![time.into(), head.into(), bound.into(), tail.into(), (head + bound).into()])?;
        rem.push((time, bound));
        trace.push((time, head));
    }
    let chart = Chart {
        title: format!("R_t^{c} and the truncated heat trace"),
        x_label: "t".into(),
        y_label: if log_y { "log10 value".into() } else { "value".into() },
        log_y,
        series: vec![
            Series { name: format!("area x R_t^{c} bound"), points: rem },
            Series { name: format!("sum over eigenvalues <= {c}"), points: trace },
        ],
    };
    let table = t
        .with_meta("c", c)
        .with_meta("genus", s.genus)
        .with_meta("systole", s.systole)
        .with_meta("eigenvalues", file.parsed.len());
    Ok(Report { table, text: None, chart: Some(chart), warnings })
}

fn detzeta(
    input: &EigenInput,
    surf: &SurfaceArgs,
    c: f64,
    eps: f64,
    big_t: f64,
    spec: Option<&QuadratureSpec>,
) -> Result<Report> {
    let s = surface(surf)?;
    let file = load(input)?;
    let q = DetQuery::new(c, eps, big_t, s, file.parsed)?;
    let r = det_bounds(&q)?;
    let mut warnings = file.warnings;
    warnings.extend(r.warnings.iter().cloned());
    let l2 = match spec {
        Some(spec) => l2_term_with(s.area(), eps, spec)?,
        None => r.parts.l2,
    };
    let mut t = Table::new(&[
        "c", "eps", "T", "l1_head", "l1_tail_bound", "l2", "l3_bound", "det_lower", "det_upper",
    ]);
    // only L₂ depends on the tolerance; move the bracket with it
    let shift = l2 - r.parts.l2;
    let (lower, upper) = ((-(r.neg_log_det.upper + shift)).exp(), (-(r.neg_log_det.lower + shift)).exp());
    t.push(vec![
        c.into(),
        eps.into(),
        big_t.into(),
        r.parts.l1_head.into(),
        r.parts.l1_tail_bound.into(),
        l2.into(),
        r.parts.l3_bound.into(),
        lower.into(),
        upper.into(),
    ])?;
    let table = t.with_meta("genus", s.genus).with_meta("systole", s.systole);
    Ok(Report { table, text: None, chart: None, warnings })
}

fn verify_kernel(n: u32, roundtrip: bool, spec: &QuadratureSpec) -> Result<Report> {
    let g = TestFunction::standard();
    let h = |t: f64| g.cosine_transform(t);
    let mut t = Table::new(&["n", "check", "value", "reference", "error"]);
    let origin = PointPairInvariant::new(0.0)?;
    let diag = diagonal_value(n, h, spec)?;
    let at_origin = match n {
        2 => Some(kernel_f_even(&g, origin, spec)?),
        1 | 3 | 5 => Some(kernel_odd(&g, origin, (n - 1) / 2)?),
        _ => None,
    };
    if let Some(k) = at_origin {
        t.push(vec![(n as f64).into(), "diagonal".into(), k.into(), diag.into(), (k - diag).abs().into()])?;
    }
    if n >= 2 {
        let lhs = diagonal_value(n, shifted_to_unshifted(h, n), spec)?;
        let rhs = counting_pairing(Dimension::new(n)?, h, spec)?;
        t.push(vec![(n as f64).into(), "counting".into(), lhs.into(), rhs.into(), (lhs / rhs - 1.0).abs().into()])?;
    }
    if roundtrip {
        let (m, case) = if n % 2 == 1 { ((n - 1) / 2, KernelCase::Odd) } else { ((n - 2) / 2, KernelCase::Even) };
        let tol = spec.rel_tol.clamp(1e-12, 1e-3);
        let rt = mehler_fock_roundtrip_with(m, case, &g, &[0.0, 0.5, 1.0], tol)?;
        t.push(vec![
            (n as f64).into(),
            format!("roundtrip m={m} {case:?} (t_max, tol)").to_lowercase().into(),
            Cell::Num(rt.t_max),
            Cell::Num(tol),
            rt.max_error.into(),
        ])?;
    }
    Ok(Report::table(t))
}
