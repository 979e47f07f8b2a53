//! Pointwise bounds on L²-normalised eigenfunctions and their covariant
//! derivatives, and the surface C^l densities for l ≤ 8.
//!
//! The l = 4..8 two-sided bounds are an extrapolation: they are assembled
//! monomial by monomial exactly as the l = 2, 3 bounds are, with ν_{p/2+1}
//! attached to τ^p.

use std::f64::consts::PI;

use crate::counting::{g_norm, BoundPair, Dimension, LocalGeometry};
use crate::error::{Error, Result};
use crate::nu::nu_cached;
use crate::specfun::{euclidean_ball_volume, quad_semi_infinite, tanh_complement, QuadratureSpec};

pub const MAX_SURFACE_ORDER: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenfunctionQuery {
    /// square root of the eigenvalue, Δφ = λ²φ
    pub lambda: f64,
    pub geom: LocalGeometry,
    pub dim: Dimension,
}

impl EigenfunctionQuery {
    pub fn new(lambda: f64, geom: LocalGeometry, dim: Dimension) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::domain(format!("lambda must be finite and nonnegative, got {lambda}")));
        }
        Ok(EigenfunctionQuery { lambda, geom, dim })
    }
}

/// Bound on |φ(x)|².
pub fn sup_bound(q: &EigenfunctionQuery) -> Result<f64> {
    let n = q.dim.n();
    let nu = nu_cached((n + 2) / 2)?;
    let d = q.geom.d;
    let w = euclidean_ball_volume(n);
    let nf = n as f64;
    Ok(8.0 * nf * nu * nu * w / (d * (2.0 * PI).powi(n as i32 + 1)) * (q.lambda + nu / d).powi(n as i32 - 1)
        + g_norm(q.dim))
}

/// The ‖G¹_n‖∞ table.
pub fn g1_norm(dim: Dimension) -> f64 {
    let m = dim.m();
    let mf = m as f64;
    let fact = |k: u32| (1..=k).map(|j| j as f64).product::<f64>();
    match dim.n() {
        2 => 17.0 / (1920.0 * PI),
        3 => 11.0 / (240.0 * PI * PI),
        4 => 367.0 / (64512.0 * PI * PI),
        n if n % 2 == 0 => {
            let f = fact(2 * m + 3) / fact(m);
            let a = 2.0 * ((mf - 0.5).powi(2) + 1.0 / (4.0 * PI * PI)).powi(m as i32) * f
                / (PI * (4.0 * PI).powi(m as i32 + 4));
            let b = (2.0 * PI * (mf + 0.5)).exp() * f * PI.powi(2 * m as i32 + 5) / 2f64.powi(4 * m as i32 + 5);
            a.min(b)
        }
        _ => {
            let df: f64 = (1..2 * m).step_by(2).map(|j| j as f64).product();
            let den = (2.0 * PI).powi(m as i32 + 1) * df * (1.0 - mf.powi(4));
            let tail = if m % 2 == 1 {
                fact(2 * m - 1) * mf.powi(4) * (1.0 + mf.powi(2 * m as i32 - 2))
            } else {
                fact(2 * m - 1) * mf.powi(6) * (1.0 + mf.powi(2 * m as i32 - 4))
            };
            11.0 / 60.0 * (mf.powi(2 * m as i32 + 3) * (1.0 - mf.powi(4)) + tail) / den
        }
    }
}

/// Bound on |∇φ(x)|².
pub fn grad_bound(q: &EigenfunctionQuery) -> Result<f64> {
    let n = q.dim.n();
    let nu = nu_cached((n + 4) / 2)?;
    let d = q.geom.d;
    let w = euclidean_ball_volume(n);
    let nf = n as f64;
    Ok(8.0 * (nf + 2.0) * nu * nu * w / (d * (2.0 * PI).powi(n as i32 + 1))
        * (q.lambda + nu / d).powi(n as i32 + 1)
        + g1_norm(q.dim))
}

/// The worked-out gradient bounds for n = 2, 3, 4.
pub fn grad_bound_preset(n: u32, geom: LocalGeometry, lambda: f64) -> Result<f64> {
    let d = geom.d;
    let (nu3, nu4) = (nu_cached(3)?, nu_cached(4)?);
    match n {
        2 => Ok(4.0 * nu3 * nu3 / (d * PI * PI) * (lambda + nu3 / d).powi(3) + 17.0 / (1920.0 * PI)),
        3 => Ok(10.0 * nu3 * nu3 / (3.0 * d * PI.powi(3)) * (lambda + nu3 / d).powi(4) + 11.0 / (240.0 * PI * PI)),
        4 => Ok(3.0 * nu4 * nu4 / (4.0 * d * PI.powi(3)) * (lambda + nu4 / d).powi(5)
            + 367.0 / (64512.0 * PI * PI)),
        _ => Err(Error::Unsupported(format!("no gradient preset for n = {n}"))),
    }
}

/// Integer coefficients of ∂_τ F_2^l on |τ|³, |τ|⁵, ...
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceDensityTable {
    pub l: u32,
    /// (odd power, coefficient)
    pub coefficients: Vec<(u32, u64)>,
}

const SURFACE_COEFFS: [&[u64]; 8] = [
    &[1],
    &[1, 1],
    &[4, 3, 1],
    &[32, 23, 6, 1],
    &[328, 280, 75, 10, 1],
    &[5752, 5040, 1399, 185, 15, 1],
    &[140944, 125864, 36096, 4893, 385, 21, 1],
    &[4883472, 4419704, 1299288, 181275, 7231, 189, 15, 1],
];

impl SurfaceDensityTable {
    pub fn get(l: u32) -> Result<Self> {
        check_order(l)?;
        let coefficients = SURFACE_COEFFS[l as usize - 1]
            .iter()
            .enumerate()
            .map(|(k, &c)| (2 * k as u32 + 3, c))
            .collect();
        Ok(SurfaceDensityTable { l, coefficients })
    }

    /// Coefficients A_p of the leading polynomial Σ A_p |τ|^p, p = 4, 6, ...
    pub fn polynomial(&self) -> Vec<(u32, f64)> {
        self.coefficients
            .iter()
            .map(|&(k, c)| (k + 1, c as f64 / (2.0 * PI * (k + 1) as f64)))
            .collect()
    }
}

fn check_order(l: u32) -> Result<()> {
    if l == 0 || l > MAX_SURFACE_ORDER {
        return Err(Error::Unsupported(format!("surface order l must be in 1..=8, got {l}")));
    }
    Ok(())
}

/// ∂_τ F_2^l(τ).
pub fn surface_density_fprime(l: u32, tau: f64) -> Result<f64> {
    let table = SurfaceDensityTable::get(l)?;
    let t = tau.abs();
    if t * t <= 0.25 {
        return Ok(0.0);
    }
    let th = (PI * (t * t - 0.25).sqrt()).tanh();
    let poly: f64 = table.coefficients.iter().map(|&(p, c)| c as f64 * t.powi(p as i32)).sum();
    Ok(th * poly / (2.0 * PI))
}

/// I_k = ∫_{1/2}^∞ τ^{2k+1} (tanh(π√(τ²-1/4)) - 1) dτ.
pub fn tanh_moment(k: u32) -> Result<f64> {
    if !(1..=8).contains(&k) {
        return Err(Error::domain(format!("tanh_moment needs 1 ≤ k ≤ 8, got {k}")));
    }
    // s = √(τ² - 1/4) turns τ dτ into s ds
    let spec = QuadratureSpec::new(1e-13, 1e-12, 4000)?;
    let v = quad_semi_infinite(|s| s * (s * s + 0.25).powi(k as i32) * tanh_complement(PI * s), 0.0, &spec)?;
    Ok(-v)
}

/// ‖G_2^l‖∞ by the jump-plus-tail evaluation: the Taylor polynomial's value at
/// the onset plus the tanh defect of every monomial.
///
/// l = 1 follows the counting-function convention, where the polynomial is
/// anchored at the onset and the jump is 0.
pub fn surface_gl_constant(l: u32) -> Result<f64> {
    let table = SurfaceDensityTable::get(l)?;
    let jump = if l == 1 {
        0.0
    } else {
        table.polynomial().iter().map(|&(p, a)| a * 0.5f64.powi(p as i32)).sum::<f64>()
    };
    let mut tail = 0.0;
    for (k, &(_, c)) in table.coefficients.iter().enumerate() {
        tail += c as f64 * tanh_moment(k as u32 + 1)?.abs();
    }
    Ok(jump + tail / (2.0 * PI))
}

/// The printed constants for l = 2, 3; `None` elsewhere.
pub fn surface_gl_constant_printed(l: u32) -> Option<f64> {
    match l {
        2 => Some(29.0 / (1260.0 * PI)),
        3 => Some(2467.0 / (26880.0 * PI)),
        _ => None,
    }
}

// G constant used in the assembled bounds: printed where printed.
fn surface_g_used(l: u32) -> Result<f64> {
    match surface_gl_constant_printed(l) {
        Some(v) => Ok(v),
        None => surface_gl_constant(l),
    }
}

/// Two-sided bounds on N^l_{2,x}(τ) for l = 2..8.
pub fn surface_nl_bounds(l: u32, geom: LocalGeometry, tau: f64) -> Result<BoundPair> {
    check_order(l)?;
    if l == 1 {
        return Err(Error::Unsupported("surface_nl_bounds covers l = 2..8".into()));
    }
    if !(tau >= 0.0) {
        return Err(Error::domain(format!("tau must be nonnegative, got {tau}")));
    }
    let d = geom.d;
    let g = surface_g_used(l)?;
    let (mut lower, mut upper) = (-g, g);
    for (p, a) in SurfaceDensityTable::get(l)?.polynomial() {
        let nu = nu_cached(p / 2 + 1)?;
        let pf = p as f64;
        let shifted = (tau + nu / d).powi(p as i32 - 1);
        let lead = tau.powi(p as i32);
        upper += a * (lead + pf * (2.0 * nu * nu / PI + nu) / d * shifted);
        lower += a * (lead - pf * 2.0 * nu * nu / (PI * d) * shifted);
    }
    BoundPair::new(lower, upper)
}

/// Bound on |∇^l φ(x)|² on a surface, l = 2..8: the jump of the N^l bracket.
pub fn surface_deriv_bound(l: u32, geom: LocalGeometry, lambda: f64) -> Result<f64> {
    Ok(surface_nl_bounds(l, geom, lambda)?.width())
}
