use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "weylbound", version, about = "Explicit local Weyl law, heat-trace and determinant bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output format; `nu` prints a bare number when omitted, everything else CSV.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,

    /// Run the self-checks relevant to the subcommand before it.
    #[arg(long, global = true)]
    pub seed_check: bool,

    /// Quadrature tolerance (absolute and relative) for the integrals that take one.
    #[arg(long, env = "WEYLBOUND_TOL", global = true, value_parser = parse_tol)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// An eigenvalue file and how to read it.
#[derive(Debug, Args)]
pub struct EigenInput {
    /// One eigenvalue λ² per line; `#` comments and blank lines are skipped.
    #[arg(long)]
    pub eigs: PathBuf,

    /// The list belongs to a closed manifold; insert λ₀² = 0 if missing.
    #[arg(long)]
    pub closed: bool,

    /// The file lists λ instead of λ².
    #[arg(long)]
    pub sqrt_input: bool,
}

/// A hyperbolic surface. Defaults to the Bolza surface.
#[derive(Debug, Args)]
pub struct SurfaceArgs {
    #[arg(long, default_value_t = 2)]
    pub genus: u32,

    /// Length of the shortest closed geodesic [default: 2 arccosh(1+√2)]
    #[arg(long)]
    pub systole: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The constant ν_m.
    Nu {
        #[arg(long)]
        m: u32,
    },
    /// Bounds on the local counting function N_x(τ).
    Count {
        #[arg(long)]
        dim: u32,
        /// Hyperbolicity datum d(x); with --global, the systole.
        #[arg(long)]
        d: f64,
        #[arg(long, conflicts_with = "tau_grid")]
        tau: Option<f64>,
        /// Grid a:b:k of k equally spaced values.
        #[arg(long, value_parser = parse_grid)]
        tau_grid: Option<Grid>,
        /// The sharper bounds available for n = 2, 3, 4.
        #[arg(long, conflicts_with = "global")]
        refined: bool,
        /// Counting bounds for a closed manifold of the given volume.
        #[arg(long, requires = "volume")]
        global: bool,
        #[arg(long)]
        volume: Option<f64>,
    },
    /// Sup-norm bounds on eigenfunctions and their derivatives.
    Eigfn {
        #[arg(long, default_value_t = 2)]
        dim: u32,
        #[arg(long, required_unless_present = "table")]
        d: Option<f64>,
        /// Square root of the eigenvalue.
        #[arg(long, required_unless_present = "table")]
        lambda: Option<f64>,
        /// Add the gradient bound.
        #[arg(long)]
        deriv: bool,
        /// Bound on |∇^l φ|² on a surface.
        #[arg(long, requires = "l")]
        surface: bool,
        #[arg(long)]
        l: Option<u32>,
        /// Print the density coefficients and G constant of order l instead.
        #[arg(long, requires = "l")]
        table: bool,
    },
    /// Upper bounds on local or global heat traces.
    Heat {
        #[arg(long)]
        dim: u32,
        #[arg(long, conflicts_with = "global")]
        local: bool,
        #[arg(long, requires_all = ["volume", "systole"])]
        global: bool,
        #[arg(long, required_unless_present = "global")]
        d: Option<f64>,
        #[arg(long)]
        volume: Option<f64>,
        #[arg(long)]
        systole: Option<f64>,
        #[arg(long, conflicts_with = "t_grid")]
        t: Option<f64>,
        #[arg(long, value_parser = parse_grid)]
        t_grid: Option<Grid>,
    },
    /// Truncated heat trace of a surface and the bound on what was cut off.
    HeatRemainder {
        #[command(flatten)]
        input: EigenInput,
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Eigenvalues λ² ≤ c are summed.
        #[arg(long)]
        c: f64,
        #[arg(long, value_parser = parse_grid, default_value = "0.05:2:40")]
        t_grid: Grid,
        /// Same as --format svg.
        #[arg(long)]
        svg: bool,
        /// Logarithmic ordinate in SVG output.
        #[arg(long)]
        log_y: bool,
    },
    /// Two-sided bounds on the ζ-regularised determinant of a surface.
    Detzeta {
        #[command(flatten)]
        input: EigenInput,
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long = "T")]
        big_t: f64,
    },
    /// Numerical consistency checks of the wave kernel in dimension n.
    VerifyKernel {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=5))]
        n: u32,
        /// Also run the Mehler–Fock round trip.
        #[arg(long)]
        roundtrip: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, k] = parts[..] else {
        return Err(format!("expected a:b:k, got {s:?}"));
    };
    let a: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    let k: usize = k.trim().parse().map_err(|e| format!("{k:?}: {e}"))?;
    if k == 0 || !a.is_finite() || !b.is_finite() {
        return Err(format!("grid {s:?} needs finite ends and at least one point"));
    }
    if k == 1 {
        return Ok(Grid(vec![a]));
    }
    let step = (b - a) / (k - 1) as f64;
    Ok(Grid((0..k).map(|i| if i + 1 == k { b } else { a + step * i as f64 }).collect()))
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("tolerance must lie in (0, 1), got {v}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:3").unwrap(), Grid(vec![0.0, 0.5, 1.0]));
        assert_eq!(parse_grid("2:9:1").unwrap(), Grid(vec![2.0]));
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("x:1:2").is_err());
    }

    #[test]
    fn tolerances() {
        assert_eq!(parse_tol("1e-8").unwrap(), 1e-8);
        assert!(parse_tol("0").is_err());
        assert!(parse_tol("2").is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
