//! Counting densities F'_n, asymptotic polynomials p_a, the error norms
//! ‖G_n‖∞, and two-sided bounds on the local and global counting function.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::nu::nu_cached;
use crate::specfun::{euclidean_ball_volume, quad_semi_infinite, tanh_complement, QuadratureSpec};

/// Largest n for which `asymptotic_polynomial` is emitted.
pub const MAX_POLYNOMIAL_DIM: u32 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

/// Ambient dimension n ≥ 2 with n = 2m+1 or n = 2m+2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dimension {
    n: u32,
}

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("dimension must be at least 2, got {n}")));
        }
        Ok(Dimension { n })
    }

    pub fn n(self) -> u32 {
        self.n
    }

    pub fn m(self) -> u32 {
        (self.n - 1) / 2
    }

    pub fn parity(self) -> Parity {
        if self.n % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    /// Onset (n-1)/2 of the counting density.
    pub fn threshold(self) -> f64 {
        (self.n as f64 - 1.0) / 2.0
    }

    fn nf(self) -> f64 {
        self.n as f64
    }
}

/// Hyperbolicity datum d(x): twice the radius of the hyperbolic ball at x.
///
/// `d = ∞` is allowed and gives the limit in which every remainder vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalGeometry {
    pub d: f64,
}

impl LocalGeometry {
    pub fn new(d: f64) -> Result<Self> {
        if !(d > 0.0) {
            return Err(Error::domain(format!("d must be positive, got {d}")));
        }
        Ok(LocalGeometry { d })
    }

    pub fn unbounded() -> Self {
        LocalGeometry { d: f64::INFINITY }
    }
}

/// A validated two-sided estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPair {
    pub lower: f64,
    pub upper: f64,
}

impl BoundPair {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() {
            return Err(Error::domain("bound is NaN"));
        }
        if lower > upper {
            return Err(Error::domain(format!("lower bound {lower} exceeds upper bound {upper}")));
        }
        Ok(BoundPair { lower, upper })
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    /// Replace a negative lower bound by 0 (counting functions are nonnegative).
    pub fn clamped(self) -> Self {
        BoundPair {
            lower: self.lower.max(0.0),
            upper: self.upper.max(0.0),
        }
    }

    pub fn scaled(self, s: f64) -> Self {
        debug_assert!(s >= 0.0);
        BoundPair {
            lower: s * self.lower,
            upper: s * self.upper,
        }
    }
}

/// Piecewise polynomial `H(τ - offset) Σ c τ^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityPolynomial {
    pub heaviside_offset: f64,
    /// (power, coefficient), ascending powers
    pub coefficients: Vec<(i32, f64)>,
}

impl DensityPolynomial {
    pub fn eval(&self, tau: f64) -> f64 {
        if tau < self.heaviside_offset {
            return 0.0;
        }
        self.coefficients.iter().map(|&(p, c)| c * tau.powi(p)).sum()
    }

    pub fn derivative(&self, tau: f64) -> f64 {
        if tau < self.heaviside_offset {
            return 0.0;
        }
        self.coefficients
            .iter()
            .filter(|&&(p, _)| p != 0)
            .map(|&(p, c)| c * p as f64 * tau.powi(p - 1))
            .sum()
    }

    pub fn coefficient(&self, power: i32) -> f64 {
        self.coefficients.iter().filter(|&&(p, _)| p == power).map(|&(_, c)| c).sum()
    }
}

fn double_factorial(k: i64) -> f64 {
    let mut p = 1.0;
    let mut j = k;
    while j > 1 {
        p *= j as f64;
        j -= 2;
    }
    p
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    c
}

// Prefactor of F'_n in front of the tanh (even) or square-root (odd) factor.
fn density_constant(dim: Dimension) -> f64 {
    let m = dim.m();
    match dim.parity() {
        Parity::Even => 2.0 / ((4.0 * PI).powi(m as i32 + 1) * factorial(m)),
        Parity::Odd => 2.0 / ((2.0 * PI).powi(m as i32 + 1) * double_factorial(2 * m as i64 - 1)),
    }
}

// ∏ factors as a polynomial in τ (coefficients by power of τ).
fn product_polynomial(dim: Dimension) -> Vec<f64> {
    let m = dim.m() as f64;
    let mut p = vec![1.0];
    match dim.parity() {
        Parity::Even => {
            for l in 0..dim.m() {
                let l = l as f64;
                p = poly_mul(&p, &[-m * m + l * l - m + l, 0.0, 1.0]);
            }
        }
        Parity::Odd => {
            for l in 1..dim.m() {
                let l = l as f64;
                p = poly_mul(&p, &[-m * m + l * l, 0.0, 1.0]);
            }
        }
    }
    p
}

/// The counting density F'_n(τ).
pub fn f_prime(dim: Dimension, tau: f64) -> f64 {
    let m = dim.m() as f64;
    let c = density_constant(dim);
    let prod: f64 = product_polynomial(dim).iter().enumerate().map(|(k, a)| a * tau.powi(k as i32)).sum();
    match dim.parity() {
        Parity::Even => {
            let t0 = m + 0.5;
            if tau < t0 {
                return 0.0;
            }
            let s = ((tau - t0) * (tau + t0)).sqrt();
            c * (PI * s).tanh() * tau * prod
        }
        Parity::Odd => {
            if tau < m {
                return 0.0;
            }
            c * tau * ((tau - m) * (tau + m)).sqrt() * prod
        }
    }
}

/// Zero-constant antiderivative of the Taylor part of F'_n, by power of τ.
fn taylor_antiderivative(dim: Dimension) -> Vec<f64> {
    let c = density_constant(dim);
    let prod = product_polynomial(dim);
    // F'_n / c as a power series with nonnegative powers only
    let deriv: Vec<f64> = match dim.parity() {
        Parity::Even => {
            let mut d = vec![0.0];
            d.extend(prod.iter().copied());
            d
        }
        Parity::Odd => {
            // τ√(τ²-m²) = Σ_j s_j τ^{2-2j}, s_0 = 1, s_j = -½ m^{2j} (½)_{j-1} / j!
            let m = dim.m() as f64;
            let deg = prod.len() + 1;
            let mut s = vec![1.0];
            let mut poch = 1.0;
            for j in 1..=deg {
                if j > 1 {
                    poch *= 0.5 + (j - 2) as f64;
                }
                s.push(-0.5 * m.powi(2 * j as i32) * poch / factorial(j as u32));
            }
            let mut d = vec![0.0; prod.len() + 2];
            for (i, p) in prod.iter().enumerate() {
                if i % 2 == 1 || *p == 0.0 {
                    continue;
                }
                // τ^i · τ^{2-2j}: keep powers ≥ 0
                for (j, sj) in s.iter().enumerate() {
                    let pow = i as i64 + 2 - 2 * j as i64;
                    if pow < 0 {
                        break;
                    }
                    d[pow as usize] += p * sj;
                }
            }
            d
        }
    };
    let mut q = vec![0.0; deriv.len() + 1];
    for (k, a) in deriv.iter().enumerate() {
        q[k + 1] = c * a / (k as f64 + 1.0);
    }
    q
}

fn eval_poly(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// The asymptotic polynomial p_a(n, ·).
///
/// Its positive powers are the Taylor part of the Laurent expansion of F_n.
/// The constant anchors p_a to vanish at the onset (n-1)/2, which is the
/// convention under which G_n = F_n - p_a starts at 0 and the norms
/// ‖G_2‖ = 1/(48π), ‖G_3‖ = 1/(12π²), ‖G_4‖ = 17/(7680π²) hold.
pub fn asymptotic_polynomial(dim: Dimension) -> Result<DensityPolynomial> {
    if dim.n() > MAX_POLYNOMIAL_DIM {
        return Err(Error::Unsupported(format!(
            "asymptotic polynomial is emitted for n ≤ {MAX_POLYNOMIAL_DIM}, got {}",
            dim.n()
        )));
    }
    let q = taylor_antiderivative(dim);
    let t0 = dim.threshold();
    let mut coefficients = vec![(0, -eval_poly(&q, t0))];
    for (p, c) in q.iter().enumerate().skip(1) {
        if c.abs() > 0.0 {
            coefficients.push((p as i32, *c));
        }
    }
    Ok(DensityPolynomial {
        heaviside_offset: t0,
        coefficients,
    })
}

/// The ‖G_n‖∞ table as printed.
pub fn g_norm_printed(dim: Dimension) -> f64 {
    let m = dim.m();
    let mf = m as f64;
    match (dim.n(), dim.parity()) {
        (2, _) => 1.0 / (48.0 * PI),
        (3, _) => 1.0 / (12.0 * PI * PI),
        (_, Parity::Even) => {
            let f = factorial(2 * m + 1) / factorial(m);
            let a = 2.0 * ((mf - 0.5).powi(2) + 1.0 / (4.0 * PI * PI)).powi(m as i32) * f
                / (PI * (4.0 * PI).powi(m as i32 + 2));
            let b = 2.0 * f * (PI * (2.0 * mf - 1.0)).exp() / (16.0 * PI.powi(3)).powi(m as i32 + 1);
            a.min(b)
        }
        (_, Parity::Odd) => {
            let base = mf.powi(2 * m as i32 + 1) * (1.0 - mf.powi(4));
            let df = double_factorial(2 * m as i64 - 1);
            let f = factorial(2 * m - 1);
            let den = (2.0 * PI).powi(m as i32 + 1) * df;
            if m % 2 == 1 {
                (base + f * mf * mf * (1.0 + mf.powi(2 * m as i32 - 2))) / (den * (1.0 - mf.powi(4)))
            } else {
                (base + f * mf.powi(4) * (1.0 + mf.powi(2 * m as i32 - 4))) / den
            }
        }
    }
}

/// Exact ‖F_n - p_a‖∞.
///
/// Even n: G_n is monotone, so the norm is |∫ G'_n|, evaluated after the
/// substitution s = √(τ² - (m+½)²). Odd n: the norm is |Q(m)|, the limit of
/// G_n at infinity (Q the Taylor antiderivative).
pub fn g_norm_exact(dim: Dimension) -> Result<f64> {
    match dim.parity() {
        Parity::Odd => Ok(odd_limit(dim)),
        Parity::Even => {
            let t0sq = dim.threshold().powi(2);
            let prod = product_polynomial(dim);
            let c = density_constant(dim);
            let spec = QuadratureSpec::tight();
            let v = quad_semi_infinite(
                |s| s * eval_poly(&prod, (s * s + t0sq).sqrt()) * tanh_complement(PI * s),
                0.0,
                &spec,
            )?;
            Ok(c * v)
        }
    }
}

fn odd_limit(dim: Dimension) -> f64 {
    eval_poly(&taylor_antiderivative(dim), dim.m() as f64).abs()
}

/// ‖G_n‖∞ used by the bounds.
///
/// The printed table, except where a printed odd-n entry is below the exact
/// norm (it is negative for n = 5); there the exact value is used.
/// n = 4 uses the sharp value 17/(7680π²).
pub fn g_norm(dim: Dimension) -> f64 {
    if dim.n() == 4 {
        return 17.0 / (7680.0 * PI * PI);
    }
    let printed = g_norm_printed(dim);
    if dim.parity() == Parity::Odd && dim.n() > 3 {
        let exact = odd_limit(dim);
        if !(printed >= exact) {
            return exact;
        }
    }
    printed
}

fn weyl_constant(dim: Dimension) -> f64 {
    euclidean_ball_volume(dim.n()) / (2.0 * PI).powi(dim.n() as i32)
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::domain(format!("tau must be finite and nonnegative, got {tau}")));
    }
    Ok(())
}

/// Upper bound on N_x(τ).
pub fn local_counting_upper(dim: Dimension, geom: LocalGeometry, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    let n = dim.nf();
    let nu = nu_cached((dim.n() + 2) / 2)?;
    let d = geom.d;
    Ok(weyl_constant(dim)
        * (tau.powf(n) + n / d * (2.0 / PI * nu * nu + nu) * (tau + nu / d).powf(n - 1.0)))
}

/// Lower bound on N_x(τ); may be negative.
pub fn local_counting_lower(dim: Dimension, geom: LocalGeometry, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    let m = dim.m();
    let mf = m as f64;
    let n = dim.nf();
    let d = geom.d;
    let w = weyl_constant(dim);
    let g = g_norm(dim);
    match dim.parity() {
        Parity::Even => {
            let nu = nu_cached(m + 2)?;
            let h = mf + 0.5;
            let brace = (tau - h).powf(n)
                - h.powf(n)
                - n * nu / d * ((h + nu / d).powf(n - 1.0) + 2.0 * nu / PI * (tau + nu / d).powf(n - 1.0));
            Ok(-g + w * brace)
        }
        Parity::Odd => {
            let nu = nu_cached(m + 1)?;
            let lead = if tau <= mf { tau.powf(n) } else { (tau - mf).powf(n) };
            let rem = (4.0 * mf + 2.0) * nu * nu / (d * PI) * (tau + nu / d).powf(n - 1.0);
            Ok(w * (lead - rem) - g)
        }
    }
}

pub fn local_counting_bounds(dim: Dimension, geom: LocalGeometry, tau: f64) -> Result<BoundPair> {
    BoundPair::new(local_counting_lower(dim, geom, tau)?, local_counting_upper(dim, geom, tau)?)
}

/// The refined bounds for n = 2, 3, 4.
pub fn local_counting_bounds_lowdim(n: u32, geom: LocalGeometry, tau: f64) -> Result<BoundPair> {
    check_tau(tau)?;
    let d = geom.d;
    let pi2 = PI * PI;
    let (nu1, nu2, nu3) = (nu_cached(1)?, nu_cached(2)?, nu_cached(3)?);
    let (lower, upper) = match n {
        2 => {
            let upper = (tau * tau + (4.0 * nu2 * nu2 + 2.0 * nu2 * PI) / (PI * d) * (tau + nu2 / d)) / (4.0 * PI);
            let lower = (tau * tau - 4.0 * nu2 * nu2 / (PI * d) * (tau + nu2 / d) - 1.0 / 12.0) / (4.0 * PI);
            (lower, upper)
        }
        3 => {
            let sq = (tau + nu2 / d).powi(2);
            let upper = (tau.powi(3) + (6.0 * nu2 * nu2 + 3.0 * PI * nu3) / (PI * d) * sq) / (6.0 * pi2)
                - (tau - 2.0 * nu1 * nu1 / (PI * d)) / (4.0 * pi2);
            let lower = (tau.powi(3) - 6.0 * nu2 * nu2 / (PI * d) * sq) / (6.0 * pi2)
                - (tau + (2.0 * nu1 * nu1 + PI * nu1) / (PI * d)) / (4.0 * pi2)
                - 1.0 / (12.0 * pi2);
            (lower, upper)
        }
        4 => {
            let cube = (tau + nu3 / d).powi(3);
            let lin = tau + nu2 / d;
            let upper = (tau.powi(4) + (8.0 * nu3 * nu3 + 4.0 * PI * nu3) / (PI * d) * cube) / (32.0 * pi2)
                - (tau * tau - 4.0 * nu2 * nu2 / (PI * d) * lin) / (8.0 * pi2);
            let lower = (tau.powi(4) - 8.0 * nu3 * nu3 / (PI * d) * cube) / (32.0 * pi2)
                - (tau * tau + (4.0 * nu2 * nu2 + 2.0 * PI * nu2) / (PI * d) * lin) / (8.0 * pi2)
                - 17.0 / (7680.0 * pi2);
            (lower, upper)
        }
        _ => {
            return Err(Error::Unsupported(format!("refined bounds exist for n = 2, 3, 4, got {n}")));
        }
    };
    BoundPair::new(lower, upper)
}

/// Bounds on the counting function of a compact hyperbolic manifold.
pub fn global_counting_bounds(dim: Dimension, volume: f64, systole: f64, tau: f64) -> Result<BoundPair> {
    if !(volume > 0.0) {
        return Err(Error::domain(format!("volume must be positive, got {volume}")));
    }
    let geom = LocalGeometry::new(systole)?;
    Ok(local_counting_bounds(dim, geom, tau)?.scaled(volume))
}
