//! Quick self-checks run by `--seed-check` before the subcommand itself.

use std::f64::consts::PI;

use weylbound::counting::{local_counting_bounds, Dimension, LocalGeometry};
use weylbound::eigenfunction::{sup_bound, tanh_moment, EigenfunctionQuery};
use weylbound::heat::{local_heat_trace_upper, remainder_upper_surface, selberg_identity_term, HeatQuery};
use weylbound::io::{parse_eigenvalues, ParseOptions};
use weylbound::kernel::{mehler_fock_roundtrip, KernelCase, TestFunction};
use weylbound::nu::nu;
use weylbound::specfun::{euclidean_ball_volume, gamma};
use weylbound::Result;

use crate::args::Command;

/// Names of the checks that failed; empty when all hold.
pub fn seed_check(cmd: &Command) -> Result<Vec<String>> {
    let mut failed = Vec::new();
    let mut check = |ok: bool, what: &str| {
        if !ok {
            failed.push(what.to_string());
        }
    };
    match cmd {
        Command::Nu { .. } => {
            check((nu(1)?.value - PI).abs() < 1e-10, "nu(1) = π");
            check((nu(3)?.value - 2.0 * PI).abs() < 1e-10, "nu(3) = 2π");
        }
        Command::Count { dim, d, .. } => {
            let dim = Dimension::new(*dim)?;
            let geom = LocalGeometry::new(d.max(0.2))?;
            for tau in [0.0, 1.0, 10.0, 100.0] {
                let b = local_counting_bounds(dim, geom, tau)?;
                check(b.lower <= b.upper, "lower ≤ upper");
            }
            let n = dim.n() as i32;
            let lead = euclidean_ball_volume(dim.n()) / (2.0 * PI).powi(n);
            let tau: f64 = 1e7;
            let b = local_counting_bounds(dim, geom, tau)?;
            check((b.upper / (lead * tau.powi(n)) - 1.0).abs() < 1e-2, "Weyl leading term");
        }
        Command::Eigfn { dim, .. } => {
            check((tanh_moment(1)? + 17.0 / 960.0).abs() < 1e-9, "I_1 = -17/960");
            let q = EigenfunctionQuery::new(0.0, LocalGeometry::new(1.0)?, Dimension::new(*dim)?)?;
            check(sup_bound(&q)? > 0.0, "sup bound positive");
        }
        Command::Heat { dim, .. } => {
            let n = *dim;
            let t = 1e-10;
            let v = local_heat_trace_upper(Dimension::new(n)?, LocalGeometry::new(1.0)?, t)? * t.powf(n as f64 / 2.0);
            let lead = euclidean_ball_volume(n) * gamma((n as f64 + 2.0) / 2.0) / (2.0 * PI).powi(n as i32);
            check((v / lead - 1.0).abs() < 1e-2, "small-time heat asymptotics");
        }
        Command::HeatRemainder { .. } | Command::Detzeta { .. } => {
            let id = selberg_identity_term(4.0 * PI, 1.0)?;
            check((id - 0.7230156234921474).abs() < 1e-12, "Selberg identity term");
            let r = remainder_upper_surface(LocalGeometry::new(3.0)?, HeatQuery::new(1.0, 400.0)?)?;
            check((0.0..1e-150).contains(&r), "remainder vanishes for large c");
            let (a, _, _) = parse_eigenvalues("5.4\n0\n3.8\n", ParseOptions::default())?;
            let (b, _, _) = parse_eigenvalues("3.8\n5.4\n0\n", ParseOptions::default())?;
            check(a == b, "parsing is order independent");
        }
        Command::VerifyKernel { .. } => {
            let e = mehler_fock_roundtrip(0, KernelCase::Odd, &TestFunction::standard(), &[0.0, 0.5])?;
            check(e < 1e-8, "cosine round trip");
        }
    }
    Ok(failed)
}
