//! Shifted wave kernel on hyperbolic space.
//!
//! The operator ∫ cos(√(Δ − (n−1)²/4) t) g(t) dt has a radial kernel k̃_{n,g}
//! depending only on the point-pair invariant u = sinh²(ρ/2). This module
//! evaluates that kernel, its value on the diagonal through the spectral
//! densities, and the generalised Mehler–Fock transform pairing the two.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::counting::{f_prime, Dimension};
use crate::specfun::{
    gamma, gauss_legendre, hyp2f1_neg_axis_with, quad_finite, Jet, QuadratureSpec,
};

// Finest trapezoid grid for the cosine transform, in intervals over [-a, a].
const TRAPEZOID_MAX: usize = 8192;
// Spectral integrals give up beyond this t.
const SPECTRAL_CUTOFF: f64 = 4000.0;
const GL_NODES: usize = 16;
// Nodes of the Abel profile on [0, a] for the forward transform.
const PROFILE_NODES: usize = 512;
// Panels of the fixed rule used inside the round trip.
const FIXED_PANELS: usize = 8;

// Beyond this t the cosine transform is taken from the fourth derivative of g.
const FOURTH_DERIVATIVE_FROM: f64 = 30.0;

/// Even, smooth test function g(x) = exp(−s / (1 − (x/a)²)) on |x| < a.
///
/// `sharpness` s = 1 with a = 1 is the standard bump.
#[derive(Debug, Clone)]
pub struct TestFunction {
    support: f64,
    sharpness: f64,
    // g and g'''' at x_j = j·2a/TRAPEZOID_MAX, j = 0..=TRAPEZOID_MAX/2
    samples: [Vec<f64>; 2],
}

impl TestFunction {
    pub fn new(support: f64, sharpness: f64) -> Result<Self> {
        if !(support > 0.0 && support.is_finite()) || !(sharpness > 0.0 && sharpness.is_finite()) {
            return Err(Error::domain(format!(
                "test function needs positive support and sharpness, got ({support}, {sharpness})"
            )));
        }
        let mut g = TestFunction {
            support,
            sharpness,
            samples: [Vec::new(), Vec::new()],
        };
        let dx = 2.0 * support / TRAPEZOID_MAX as f64;
        let jets: Vec<Jet<5>> = (0..=TRAPEZOID_MAX / 2).map(|j| g.jet(j as f64 * dx)).collect();
        g.samples = [
            jets.iter().map(|j| j.value()).collect(),
            jets.iter().map(|j| j.derivative(4)).collect(),
        ];
        Ok(g)
    }

    pub fn standard() -> Self {
        Self::new(1.0, 1.0).expect("standard bump parameters are valid")
    }

    /// The bump with support `(-a, a)` and unit sharpness.
    pub fn bump(a: f64) -> Result<Self> {
        Self::new(a, 1.0)
    }

    pub fn support_bound(&self) -> f64 {
        self.support
    }

    pub fn sharpness(&self) -> f64 {
        self.sharpness
    }

    pub fn value(&self, x: f64) -> f64 {
        let y = x / self.support;
        if y.abs() >= 1.0 {
            return 0.0;
        }
        (-self.sharpness / (1.0 - y * y)).exp()
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let y = x / self.support;
        if y.abs() >= 1.0 {
            return 0.0;
        }
        let q = 1.0 - y * y;
        -2.0 * self.sharpness * y / (self.support * q * q) * (-self.sharpness / q).exp()
    }

    /// g′(x)/sinh x, continued to x = 0.
    pub fn derivative_over_sinh(&self, x: f64) -> f64 {
        let y = x / self.support;
        if y.abs() >= 1.0 {
            return 0.0;
        }
        let q = 1.0 - y * y;
        let x_over_sinh = if x.abs() < 1e-8 { 1.0 } else { x / x.sinh() };
        -2.0 * self.sharpness / (self.support * self.support * q * q) * x_over_sinh * (-self.sharpness / q).exp()
    }

    /// g as a function of w = x², propagated through a jet.
    pub fn profile_sq<const N: usize>(&self, w: Jet<N>) -> Jet<N> {
        let a2 = self.support * self.support;
        if w.value() >= a2 {
            return Jet::constant(0.0);
        }
        let q = -(w.scale(1.0 / a2)) + 1.0;
        q.recip().scale(-self.sharpness).exp()
    }

    fn jet<const N: usize>(&self, x: f64) -> Jet<N> {
        let x = Jet::<N>::variable(x);
        self.profile_sq(x * x)
    }

    /// h(t) = ∫ g(x) cos(tx) dx.
    ///
    /// Trapezoid sums on [−a, a] converge faster than any power here because
    /// g is flat at both ends; the grid is doubled until two levels agree.
    /// For large t the sum of g(x) cos(tx) is dominated by rounding in the
    /// cosine arguments, so h = t⁻⁴ ∫ g''''(x) cos(tx) dx is used there.
    pub fn cosine_transform(&self, t: f64) -> f64 {
        let t = t.abs();
        if t >= FOURTH_DERIVATIVE_FROM {
            self.converged_trapezoid(1, t) / t.powi(4)
        } else {
            self.converged_trapezoid(0, t)
        }
    }

    fn converged_trapezoid(&self, which: usize, t: f64) -> f64 {
        let mut n = 64;
        while (n as f64) < 2.0 * self.support * t && n < TRAPEZOID_MAX {
            n *= 2;
        }
        let (mut prev, _) = self.trapezoid(which, t, n);
        while 2 * n <= TRAPEZOID_MAX {
            n *= 2;
            let (next, scale) = self.trapezoid(which, t, n);
            if (next - prev).abs() <= 1e-16 * scale {
                return next;
            }
            prev = next;
        }
        prev
    }

    // Trapezoid sum and the sum of absolute terms.
    fn trapezoid(&self, which: usize, t: f64, n: usize) -> (f64, f64) {
        let v = &self.samples[which];
        let stride = TRAPEZOID_MAX / n;
        let dx = 2.0 * self.support / n as f64;
        let mut s = v[0];
        let mut scale = v[0].abs();
        for j in 1..n / 2 {
            let y = v[j * stride];
            s += 2.0 * y * (t * j as f64 * dx).cos();
            scale += 2.0 * y.abs();
        }
        (s * dx, scale * dx)
    }
}

/// u = sinh²(ρ/2) for a pair of points at hyperbolic distance ρ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointPairInvariant(f64);

impl PointPairInvariant {
    pub fn new(u: f64) -> Result<Self> {
        if !(u >= 0.0 && u.is_finite()) {
            return Err(Error::domain(format!("point-pair invariant must be finite and ≥ 0, got {u}")));
        }
        Ok(PointPairInvariant(u))
    }

    pub fn from_distance(rho: f64) -> Result<Self> {
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::domain(format!("distance must be finite and ≥ 0, got {rho}")));
        }
        Ok(PointPairInvariant((0.5 * rho).sinh().powi(2)))
    }

    pub fn u(self) -> f64 {
        self.0
    }

    pub fn rho(self) -> f64 {
        2.0 * self.0.sqrt().asinh()
    }
}

/// k̃_{2,g} at invariant u:
/// −(1/(√2 π)) ∫_ρ^∞ g′(t) / √(cosh t − cosh ρ) dt.
///
/// With cosh t = cosh ρ + w² this is −(√2/π) ∫ g′(t)/sinh t dw, and
/// g′(t)/sinh t is a smooth function of cosh t, so the integrand is smooth
/// for every ρ.
pub fn kernel_f_even(g: &TestFunction, u: PointPairInvariant, spec: &QuadratureSpec) -> Result<f64> {
    let Some(wmax) = even_range(g, u.u()) else {
        return Ok(0.0);
    };
    let v = quad_finite(even_integrand(g, u.u()), 0.0, wmax, spec)?;
    Ok(-2f64.sqrt() * v / PI)
}

// Same value by a fixed composite rule. Its error varies smoothly with ρ,
// which matters when the result is transformed again.
fn kernel_f_even_fixed(g: &TestFunction, rho: f64) -> f64 {
    let u = (0.5 * rho).sinh().powi(2);
    match even_range(g, u) {
        Some(wmax) => -2f64.sqrt() * fixed_rule(even_integrand(g, u), wmax) / PI,
        None => 0.0,
    }
}

// Upper limit √(cosh a − cosh ρ), or None outside the support.
fn even_range(g: &TestFunction, u: f64) -> Option<f64> {
    let top = (0.5 * g.support_bound()).sinh().powi(2);
    (u < top).then(|| (2.0 * (top - u)).sqrt())
}

// w ↦ g′(t)/sinh t with cosh t = 1 + 2u + w².
fn even_integrand(g: &TestFunction, u: f64) -> impl Fn(f64) -> f64 + '_ {
    move |w: f64| {
        let t = 2.0 * (u + 0.5 * w * w).sqrt().asinh();
        g.derivative_over_sinh(t)
    }
}

// Composite 16-point Gauss–Legendre over [0, b].
fn fixed_rule<F: Fn(f64) -> f64>(f: F, b: f64) -> f64 {
    thread_local! {
        static GL: (Vec<f64>, Vec<f64>) = gauss_legendre(GL_NODES);
    }
    GL.with(|(gx, gw)| {
        let h = b / FIXED_PANELS as f64;
        let mut total = 0.0;
        for p in 0..FIXED_PANELS {
            for (x, w) in gx.iter().zip(gw) {
                total += w * f((p as f64 + 0.5 * (x + 1.0)) * h);
            }
        }
        0.5 * h * total
    })
}

// ρ² = 4 asinh²(√u), with jet derivatives in u. Near u = 0 the square root
// is not differentiable, so the even power series
// ρ² = 2 Σ_{k≥1} (−1)^{k−1} (4u)^k / (k² C(2k, k)) is used instead.
fn rho_squared_jet<const N: usize>(u: f64) -> Jet<N> {
    let x = Jet::<N>::variable(u);
    if u >= 0.25 {
        let r = x.sqrt().asinh();
        return (r * r).scale(4.0);
    }
    let mut coeffs = Vec::with_capacity(48);
    let mut central = 1.0; // C(2k, k)
    for k in 1..48u32 {
        let kf = k as f64;
        central *= (2.0 * kf - 1.0) * 2.0 / kf;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        coeffs.push(sign * 2.0 * 4f64.powi(k as i32) / (kf * kf * central));
    }
    let mut acc = Jet::<N>::constant(0.0);
    for c in coeffs.iter().rev() {
        acc = (acc + *c) * x;
    }
    acc
}

/// k̃_{2m+1,g} = (−4π)^{−m} ∂_u^m g(ρ(u)) for m ≤ 2.
pub fn kernel_odd(g: &TestFunction, u: PointPairInvariant, m: u32) -> Result<f64> {
    if m > 2 {
        return Err(Error::Unsupported(format!("odd kernel derivatives only up to m = 2, got {m}")));
    }
    let j = g.profile_sq(rho_squared_jet::<3>(u.u()));
    Ok(j.derivative(m as usize) / (-4.0 * PI).powi(m as i32))
}

/// Spectral density of the diagonal k̃_{n,g}(x, x) = ∫_R h(t) density(t) dt.
pub fn diagonal_density(n: u32, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    let m = ((n - 1) / 2) as i32;
    if n.is_multiple_of(2) {
        let poly: f64 = (0..m).map(|j| (0.5 + j as f64).powi(2) + t * t).product();
        let fact: f64 = (1..=m).map(|j| j as f64).product();
        Ok((PI * t).tanh() * t * poly / ((4.0 * PI).powi(m + 1) * fact))
    } else {
        let poly: f64 = (0..m).map(|j| (j * j) as f64 + t * t).product();
        let dfact: f64 = (1..=m).map(|j| (2 * j - 1) as f64).product();
        Ok(poly / ((2.0 * PI).powi(m + 1) * dfact))
    }
}

// ∫_0^∞ f by panels of slowly growing width; stops after three quiet panels.
fn integrate_spectrum<F: Fn(f64) -> f64>(f: F, spec: &QuadratureSpec) -> Result<f64> {
    let mut lo = 0.0;
    let mut width = 1.0;
    let mut total: f64 = 0.0;
    let mut quiet = 0;
    while lo < SPECTRAL_CUTOFF {
        // accuracy is wanted relative to the whole integral, not per panel
        let panel = spec.with_abs(spec.abs_tol.max(spec.rel_tol * total.abs()));
        let part = quad_finite(&f, lo, lo + width, &panel)?;
        total += part;
        if part.abs() <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            quiet += 1;
            if quiet >= 3 {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
        lo += width;
        width = (width * 1.2).min(8.0);
    }
    Err(Error::convergence("spectral integral truncation", total.abs()))
}

/// k̃_{n,g}(x, x) from the cosine transform h, by quadrature over t.
pub fn diagonal_value<H: Fn(f64) -> f64>(n: u32, h: H, spec: &QuadratureSpec) -> Result<f64> {
    diagonal_density(n, 0.0)?;
    let half = integrate_spectrum(|t| h(t) * diagonal_density(n, t).unwrap_or(0.0), spec)?;
    Ok(2.0 * half)
}

/// ∫ F'_n(τ) h(τ) dτ over the spectrum τ ≥ (n−1)/2.
///
/// This is the counting-function side of the diagonal: it agrees with
/// `diagonal_value(n, shifted_to_unshifted(h, n))`.
pub fn counting_pairing<H: Fn(f64) -> f64>(dim: Dimension, h: H, spec: &QuadratureSpec) -> Result<f64> {
    let t0 = dim.threshold();
    // τ = t0 + s² smooths the square-root onset of the density
    integrate_spectrum(
        |s| {
            let tau = t0 + s * s;
            2.0 * s * f_prime(dim, tau) * h(tau)
        },
        spec,
    )
}

/// h̃(t) = h(√(t² + (n−1)²/4)): the spectral function in the shifted variable.
pub fn shifted_to_unshifted<H: Fn(f64) -> f64>(h: H, n: u32) -> impl Fn(f64) -> f64 {
    let s0 = 0.5 * (n as f64 - 1.0);
    move |t| h((t * t + s0 * s0).sqrt())
}

/// Which family of the generalised Mehler–Fock transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelCase {
    /// f_e = k̃_{2,g}, spherical functions of H^{2m+2}.
    Even,
    /// f_o = g(ρ), spherical functions of H^{2m+1}.
    Odd,
}

/// Spherical function of the rank-m transform at distance ρ.
///
/// Even: ₂F₁(½+m+it, ½+m−it; m+1; −u). Odd: ₂F₁(m+it, m−it; m+½; −u).
pub fn spherical_function(case: KernelCase, m: u32, t: f64, rho: f64, spec: &QuadratureSpec) -> Result<f64> {
    let u = (0.5 * rho).sinh().powi(2);
    match (case, m) {
        (KernelCase::Odd, 0) => Ok((t * rho).cos()),
        (KernelCase::Odd, 1) if rho > 0.0 => {
            if t == 0.0 {
                Ok(rho / rho.sinh())
            } else {
                Ok((t * rho).sin() / (t * rho.sinh()))
            }
        }
        (KernelCase::Odd, _) => {
            let a = Complex64::new(m as f64, t);
            hyp2f1_neg_axis_with(a, a.conj(), m as f64 + 0.5, -u, spec)
        }
        (KernelCase::Even, _) => {
            let a = Complex64::new(m as f64 + 0.5, t);
            hyp2f1_neg_axis_with(a, a.conj(), m as f64 + 1.0, -u, spec)
        }
    }
}

fn plancherel_density(case: KernelCase, m: u32, t: f64) -> f64 {
    match case {
        KernelCase::Even => {
            let poly: f64 = (0..m).map(|j| (0.5 + j as f64).powi(2) + t * t).product();
            (PI * t).tanh() * t * poly
        }
        KernelCase::Odd => (0..m).map(|j| (j * j) as f64 + t * t).product(),
    }
}

fn inverse_prefactor(case: KernelCase, m: u32) -> f64 {
    let g = match case {
        KernelCase::Even => gamma(m as f64 + 1.0),
        KernelCase::Odd => gamma(m as f64 + 0.5),
    };
    1.0 / (g * g)
}

// Rank-m spherical functions as Mehler–Dirichlet integrals,
//   F(t, ρ) = c sinh^{−2m}ρ ∫_0^ρ cos(tθ) (cosh ρ − cosh θ)^β dθ   (even, β = m − ½)
//   F(t, ρ) = c sinh^{1−2m}ρ ∫_0^ρ cos(tθ) (cosh ρ − cosh θ)^β dθ  (odd, β = m − 1, m ≥ 1)
// with c fixed by F(t, 0) = 1. Returns (β, c).
fn mehler_dirichlet(case: KernelCase, m: u32) -> (f64, f64) {
    let mf = m as f64;
    let beta_fn = |x: f64, y: f64| gamma(x) * gamma(y) / gamma(x + y);
    match case {
        KernelCase::Even => (mf - 0.5, 2f64.powf(mf + 0.5) / beta_fn(0.5, mf + 0.5)),
        KernelCase::Odd => (mf - 1.0, 2f64.powf(mf) / beta_fn(0.5, mf)),
    }
}

// ∫_θ^a f(ρ) sinh ρ (cosh ρ − cosh θ)^β dρ. With cosh ρ = cosh θ + w² this
// is 2 ∫ f(ρ) w^{2β+1} dw, smooth in w because f is radial.
fn abel_profile<F: Fn(f64) -> f64>(f: &F, beta: f64, theta: f64, a: f64) -> f64 {
    if theta >= a {
        return 0.0;
    }
    let u = (0.5 * theta).sinh().powi(2);
    let top = (0.5 * a).sinh().powi(2);
    let integrand = |w: f64| {
        let rho = 2.0 * (u + 0.5 * w * w).sqrt().asinh();
        2.0 * f(rho) * w.powf(2.0 * beta + 1.0)
    };
    fixed_rule(integrand, (2.0 * (top - u)).sqrt())
}

// Node tables for F(·, ρ) in Mehler–Dirichlet form at one fixed ρ, so that
// F(t, ρ) for many t is a cosine sum. θ = ρ − s² removes the endpoint
// singularity; finer levels resolve larger t.
struct DirichletNodes {
    rho: f64,
    levels: Vec<(usize, Vec<(f64, f64)>)>,
}

impl DirichletNodes {
    fn new(case: KernelCase, m: u32, rho: f64) -> Self {
        let (beta, c) = mehler_dirichlet(case, m);
        let power = match case {
            KernelCase::Even => 2 * m as i32,
            KernelCase::Odd => 2 * m as i32 - 1,
        };
        let pref = c / rho.sinh().powi(power);
        let (gx, gw) = gauss_legendre(GL_NODES);
        let smax = rho.sqrt();
        let levels = (0..4)
            .map(|k| {
                let panels = 16usize << (2 * k);
                let h = smax / panels as f64;
                let mut nodes = Vec::with_capacity(panels * GL_NODES);
                for p in 0..panels {
                    for (x, w) in gx.iter().zip(&gw) {
                        let s = (p as f64 + 0.5 * (x + 1.0)) * h;
                        let theta = rho - s * s;
                        // cosh ρ − cosh θ without cancellation
                        let gap = 2.0 * (rho - 0.5 * s * s).sinh() * (0.5 * s * s).sinh();
                        let weight = if beta < 0.0 {
                            // 2s / √gap stays bounded as s → 0
                            let half = 0.5 * s * s;
                            let sinhc = if half < 1e-6 { 1.0 + half * half / 6.0 } else { half.sinh() / half };
                            2.0 / ((rho - half).sinh() * sinhc).sqrt()
                        } else {
                            2.0 * s * gap.powf(beta)
                        };
                        nodes.push((theta, pref * 0.5 * h * w * weight));
                    }
                }
                (panels, nodes)
            })
            .collect();
        DirichletNodes { rho, levels }
    }

    fn eval(&self, t: f64) -> f64 {
        let need = (t * self.rho / PI).ceil() as usize + 8;
        let nodes = self
            .levels
            .iter()
            .find(|(p, _)| *p >= need)
            .unwrap_or_else(|| self.levels.last().expect("levels are never empty"));
        nodes.1.iter().map(|(th, w)| w * (t * th).cos()).sum()
    }
}

// Forward transform t ↦ ∫ f(v) F(t, v) w(v) dv as c 2^{−k} ∫_0^a cos(tθ) A(θ) dθ.
// A extends evenly, so a trapezoid sum over [−a, a] converges spectrally.
struct ForwardTransform {
    profile: Vec<f64>,
    scale: f64,
    dx: f64,
}

impl ForwardTransform {
    fn new<F: Fn(f64) -> f64>(case: KernelCase, m: u32, g: &TestFunction, radial: &F) -> Self {
        let a = g.support_bound();
        let dx = a / PROFILE_NODES as f64;
        let (profile, scale) = if case == KernelCase::Odd && m == 0 {
            ((0..=PROFILE_NODES).map(|j| radial(j as f64 * dx)).collect(), 1.0)
        } else {
            let (beta, c) = mehler_dirichlet(case, m);
            let k = match case {
                KernelCase::Even => 2 * m + 1,
                KernelCase::Odd => 2 * m,
            };
            let p = (0..=PROFILE_NODES)
                .map(|j| abel_profile(radial, beta, j as f64 * dx, a))
                .collect();
            (p, c / 2f64.powi(k as i32))
        };
        ForwardTransform { profile, scale, dx }
    }

    fn eval(&self, t: f64) -> f64 {
        let mut s = 0.5 * self.profile[0];
        for (j, v) in self.profile.iter().enumerate().skip(1) {
            s += v * (t * j as f64 * self.dx).cos();
        }
        self.scale * s * self.dx
    }

    // Rounding level of one value; with the growing Plancherel density this
    // eventually dominates the true tail.
    fn noise(&self) -> f64 {
        4.0 * f64::EPSILON * self.scale.abs() * self.dx * self.profile.iter().map(|v| v.abs()).sum::<f64>()
    }
}

/// Outcome of a forward-then-inverse Mehler–Fock pass.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTrip {
    pub max_error: f64,
    /// Where the t-integral was truncated.
    pub t_max: f64,
    pub reconstructed: Vec<f64>,
    pub exact: Vec<f64>,
}

/// Max reconstruction error of the rank-m transform of f_e or f_o built from g.
pub fn mehler_fock_roundtrip(m: u32, case: KernelCase, g: &TestFunction, u_samples: &[f64]) -> Result<f64> {
    Ok(mehler_fock_roundtrip_with(m, case, g, u_samples, 1e-10)?.max_error)
}

/// As [`mehler_fock_roundtrip`], with `tol` driving every quadrature layer
/// and the truncation of the t-integral.
///
/// The forward transform ∫ f(v) F(t, v) w(v) dv is evaluated with the
/// Mehler–Dirichlet form of F and the order of integration swapped, so it
/// becomes a cosine transform of a profile A(θ) computed once. The inverse
/// evaluates the spherical functions at the sample points from the same
/// representation, tabulated per point.
pub fn mehler_fock_roundtrip_with(
    m: u32,
    case: KernelCase,
    g: &TestFunction,
    u_samples: &[f64],
    tol: f64,
) -> Result<RoundTrip> {
    if m > 2 {
        return Err(Error::Unsupported(format!("Mehler–Fock round trip only up to m = 2, got {m}")));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::domain(format!("tolerance must lie in (0, 1), got {tol}")));
    }
    if u_samples.iter().any(|&u| u > 4.0) {
        return Err(Error::domain("round-trip samples must satisfy u ≤ 4"));
    }
    let rhos: Vec<f64> = u_samples
        .iter()
        .map(|&u| PointPairInvariant::new(u).map(|p| p.rho()))
        .collect::<Result<_>>()?;
    // inner layers a little tighter than the target, but not below what
    // double precision quadrature can certify
    let inner = QuadratureSpec::default()
        .with_abs((tol * 1e-2).max(1e-12))
        .with_rel((tol * 1e-1).max(1e-10));
    let radial = |rho: f64| -> f64 {
        match case {
            KernelCase::Odd => g.value(rho),
            KernelCase::Even => kernel_f_even_fixed(g, rho),
        }
    };
    // the reference values come from the adaptive evaluator
    let exact: Vec<f64> = rhos
        .iter()
        .map(|&r| match case {
            KernelCase::Odd => Ok(g.value(r)),
            KernelCase::Even => kernel_f_even(g, PointPairInvariant::from_distance(r)?, &inner),
        })
        .collect::<Result<_>>()?;

    let fwd = ForwardTransform::new(case, m, g, &radial);
    let forward_noise = fwd.noise();
    let forward = |t: f64| fwd.eval(t);

    // closed forms where they exist, otherwise Mehler–Dirichlet tables
    let tables: Vec<Option<DirichletNodes>> = rhos
        .iter()
        .map(|&r| (r > 0.0 && !(case == KernelCase::Odd && m < 2)).then(|| DirichletNodes::new(case, m, r)))
        .collect();
    let inverse_kernel = |i: usize, t: f64| -> Result<f64> {
        match &tables[i] {
            Some(table) => Ok(table.eval(t)),
            None => spherical_function(case, m, t, rhos[i], &inner),
        }
    };

    let (gx, gw) = gauss_legendre(GL_NODES);
    let pref = inverse_prefactor(case, m);
    let mut acc = vec![0.0; rhos.len()];
    let mut lo = 0.0;
    let width = 4.0;
    let mut quiet = 0;
    loop {
        if lo > SPECTRAL_CUTOFF {
            return Err(Error::convergence("Mehler–Fock t truncation", tol));
        }
        let mut part = vec![0.0; rhos.len()];
        for (x, w) in gx.iter().zip(&gw) {
            let t = lo + 0.5 * (x + 1.0) * width;
            let weight = 0.5 * width * w * pref * plancherel_density(case, m, t) * forward(t);
            for (i, p) in part.iter_mut().enumerate() {
                *p += weight * inverse_kernel(i, t)?;
            }
        }
        lo += width;
        let biggest = part.iter().fold(0.0f64, |s, p| s.max(p.abs()));
        for (a, p) in acc.iter_mut().zip(&part) {
            *a += p;
        }
        let noise = 10.0 * width * pref * plancherel_density(case, m, lo) * forward_noise;
        if biggest <= tol.max(noise) {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    let reconstructed: Vec<f64> = acc.iter().map(|v| 2.0 * v).collect();
    let max_error = reconstructed
        .iter()
        .zip(&exact)
        .fold(0.0f64, |s, (r, e)| s.max((r - e).abs()));
    Ok(RoundTrip {
        max_error,
        t_max: lo,
        reconstructed,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::cosine_transform;
    use proptest::prelude::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn cosine_transform_matches_quadrature() {
        let g = TestFunction::standard();
        let s = QuadratureSpec::tight();
        for &t in &[0.0, 1.0, 7.5, 40.0, 150.0] {
            let q = cosine_transform(|x| g.value(x), t, 1.0, &s).unwrap();
            assert!((g.cosine_transform(t) - q).abs() < 1e-13, "t={t}");
        }
    }

    #[test]
    fn cosine_transform_continuous_at_switch() {
        for g in [TestFunction::standard(), TestFunction::new(1.5, 2.0).unwrap()] {
            let below = g.converged_trapezoid(0, FOURTH_DERIVATIVE_FROM);
            let above = g.cosine_transform(FOURTH_DERIVATIVE_FROM);
            assert!((below - above).abs() < 1e-15, "{below} vs {above}");
        }
    }

    #[test]
    fn fixed_and_adaptive_even_kernels_agree() {
        let g = TestFunction::new(1.5, 2.0).unwrap();
        for &rho in &[0.0, 1e-6, 1e-3, 0.2, 0.9, 1.45] {
            let u = PointPairInvariant::from_distance(rho).unwrap();
            let a = kernel_f_even(&g, u, &QuadratureSpec::tight()).unwrap();
            assert!((kernel_f_even_fixed(&g, rho) - a).abs() < 1e-13, "ρ={rho}");
        }
    }

    #[test]
    fn derivative_matches_jet() {
        let g = TestFunction::new(1.5, 2.0).unwrap();
        for &x in &[0.1, 0.7, 1.3] {
            // d/dx Φ(x²) = 2x Φ'(x²)
            let j = g.profile_sq(Jet::<2>::variable(x * x));
            assert!((g.value(x) - j.value()).abs() < 1e-15);
            assert!((g.derivative(x) - 2.0 * x * j.derivative(1)).abs() < 1e-13);
        }
    }

    #[test]
    fn even_kernel_vanishes_outside_support() {
        let g = TestFunction::standard();
        let u = PointPairInvariant::from_distance(1.2).unwrap();
        assert_eq!(kernel_f_even(&g, u, &spec()).unwrap(), 0.0);
        assert_eq!(kernel_odd(&g, u, 1).unwrap(), 0.0);
    }

    #[test]
    fn even_kernel_diagonal() {
        let g = TestFunction::standard();
        let k = kernel_f_even(&g, PointPairInvariant::new(0.0).unwrap(), &spec()).unwrap();
        let d = diagonal_value(2, |t| g.cosine_transform(t), &spec()).unwrap();
        assert!((k - d).abs() < 1e-6 * d.abs(), "{k} vs {d}");
    }

    #[test]
    fn even_kernel_off_diagonal_inverse() {
        // (1/4π) ∫ h(t) ₂F₁(½+it, ½−it; 1; −u) tanh(πt) t dt at u = 0.5,
        // which sits at ρ ≈ 1.32, so the support must be wider than 1
        let g = TestFunction::bump(1.5).unwrap();
        let u = PointPairInvariant::new(0.5).unwrap();
        let rho = u.rho();
        let s = spec();
        let inv = integrate_spectrum(
            |t| {
                g.cosine_transform(t)
                    * spherical_function(KernelCase::Even, 0, t, rho, &QuadratureSpec::default()).unwrap()
                    * (PI * t).tanh()
                    * t
            },
            &s,
        )
        .unwrap()
            * 2.0
            / (4.0 * PI);
        let k = kernel_f_even(&g, u, &s).unwrap();
        assert!((k - inv).abs() < 1e-6 * k.abs(), "{k} vs {inv}");
    }

    #[test]
    fn odd_kernel_rank_zero_is_g() {
        let g = TestFunction::new(1.5, 2.0).unwrap();
        for &u in &[0.0, 0.1, 0.3] {
            let p = PointPairInvariant::new(u).unwrap();
            assert!((kernel_odd(&g, p, 0).unwrap() - g.value(p.rho())).abs() < 1e-15);
        }
        // g(0) = (1/2π) ∫ h
        let d = diagonal_value(1, |t| g.cosine_transform(t), &spec()).unwrap();
        assert!((d - g.value(0.0)).abs() < 1e-10);
    }

    #[test]
    fn odd_kernel_diagonals() {
        let g = TestFunction::standard();
        let zero = PointPairInvariant::new(0.0).unwrap();
        let h = |t: f64| g.cosine_transform(t);
        let s = spec();
        // n = 3: (1/4π²) ∫ h t²
        let k3 = kernel_odd(&g, zero, 1).unwrap();
        let d3 = 2.0 * integrate_spectrum(|t| h(t) * t * t, &s).unwrap() / (4.0 * PI * PI);
        assert!((k3 - d3).abs() < 1e-6 * d3.abs(), "{k3} vs {d3}");
        assert!((k3 - diagonal_value(3, h, &s).unwrap()).abs() < 1e-6 * d3.abs());
        // n = 5 through the same density
        let k5 = kernel_odd(&g, zero, 2).unwrap();
        let d5 = diagonal_value(5, h, &s).unwrap();
        assert!((k5 - d5).abs() < 1e-6 * d5.abs(), "{k5} vs {d5}");
    }

    #[test]
    fn odd_kernel_matches_finite_differences() {
        let g = TestFunction::standard();
        let k1 = |u: f64| g.value(2.0 * u.sqrt().asinh());
        for &u in &[0.05, 0.2, 0.25, 0.4] {
            let e = 1e-4;
            let d1 = (k1(u + e) - k1(u - e)) / (2.0 * e);
            let d2 = (k1(u + e) - 2.0 * k1(u) + k1(u - e)) / (e * e);
            let p = PointPairInvariant::new(u).unwrap();
            assert!((kernel_odd(&g, p, 1).unwrap() * -4.0 * PI - d1).abs() < 1e-6);
            assert!((kernel_odd(&g, p, 2).unwrap() * 16.0 * PI * PI - d2).abs() < 1e-4);
        }
    }

    #[test]
    fn unsupported_rank() {
        let g = TestFunction::standard();
        let p = PointPairInvariant::new(0.1).unwrap();
        assert!(matches!(kernel_odd(&g, p, 3), Err(Error::Unsupported(_))));
        assert!(mehler_fock_roundtrip(3, KernelCase::Odd, &g, &[0.0]).is_err());
        assert!(PointPairInvariant::new(-1.0).is_err());
    }

    #[test]
    fn diagonal_density_examples() {
        let t: f64 = 1.7;
        let d2 = diagonal_density(2, t).unwrap();
        assert!((d2 - t * (PI * t).tanh() / (4.0 * PI)).abs() < 1e-15);
        let d3 = diagonal_density(3, t).unwrap();
        assert!((d3 - t * t / (4.0 * PI * PI)).abs() < 1e-15);
        let d4 = diagonal_density(4, t).unwrap();
        assert!((d4 - (PI * t).tanh() * t * (0.25 + t * t) / (16.0 * PI * PI)).abs() < 1e-15);
    }

    #[test]
    fn shifted_examples() {
        let h = |x: f64| x * x + 3.0;
        assert_eq!(shifted_to_unshifted(|_| 2.5, 4)(3.0), 2.5);
        assert!((shifted_to_unshifted(h, 2)(0.0) - h(0.5)).abs() < 1e-15);
        assert!((shifted_to_unshifted(h, 3)(3f64.sqrt()) - h(2.0)).abs() < 1e-14);
    }

    #[test]
    fn spherical_closed_forms_agree_with_hypergeometric() {
        let s = spec();
        for &(t, rho) in &[(0.5f64, 0.3f64), (3.0, 1.0), (25.0, 0.8)] {
            let u = (0.5 * rho).sinh().powi(2);
            let a = Complex64::new(1.0, t);
            let f = hyp2f1_neg_axis_with(a, a.conj(), 1.5, -u, &s).unwrap();
            let c = spherical_function(KernelCase::Odd, 1, t, rho, &s).unwrap();
            assert!((f - c).abs() < 1e-9, "t={t} ρ={rho}: {f} vs {c}");
        }
    }

    #[test]
    fn mehler_dirichlet_matches_hypergeometric() {
        let s = spec();
        for case in [KernelCase::Even, KernelCase::Odd] {
            for m in 0..3u32 {
                if case == KernelCase::Odd && m == 0 {
                    continue;
                }
                let (beta, c) = mehler_dirichlet(case, m);
                let power = match case {
                    KernelCase::Even => 2 * m as i32,
                    KernelCase::Odd => 2 * m as i32 - 1,
                };
                for &(t, rho) in &[(0.0f64, 0.7f64), (2.5, 0.4), (9.0, 1.3)] {
                    let f = |th: f64| (t * th).cos() * (rho.cosh() - th.cosh()).powf(beta);
                    // θ = ρ − s² removes the endpoint singularity
                    let q = quad_finite(|s2: f64| 2.0 * s2 * f(rho - s2 * s2), 0.0, rho.sqrt(), &s).unwrap();
                    let md = c * q / rho.sinh().powi(power);
                    let hf = spherical_function(case, m, t, rho, &s).unwrap();
                    assert!((md - hf).abs() < 1e-8 * (1.0 + hf.abs()), "{case:?} m={m} t={t} ρ={rho}: {md} vs {hf}");
                }
            }
        }
    }

    #[test]
    fn dirichlet_tables_match_hypergeometric() {
        let s = spec();
        for (case, m) in [(KernelCase::Even, 0), (KernelCase::Even, 1), (KernelCase::Odd, 2)] {
            let table = DirichletNodes::new(case, m, 1.1);
            for &t in &[0.0, 3.0, 40.0, 150.0] {
                let hf = spherical_function(case, m, t, 1.1, &s).unwrap();
                assert!((table.eval(t) - hf).abs() < 1e-9, "{case:?} m={m} t={t}");
            }
        }
    }

    #[test]
    fn forward_transform_recovers_h() {
        // with the full sphere area n ω_n, the forward transform of k̃_n is
        // h(t) / (n ω_n 2^{n−1}); here n = 2 (even, m = 0) and n = 1 (odd, m = 0)
        let g = TestFunction::standard();
        let even = ForwardTransform::new(KernelCase::Even, 0, &g, &|r| kernel_f_even_fixed(&g, r));
        let odd = ForwardTransform::new(KernelCase::Odd, 0, &g, &|r| g.value(r));
        for &t in &[0.0, 0.5, 3.0, 20.0, 80.0] {
            let h = g.cosine_transform(t);
            assert!((even.eval(t) - h / (4.0 * PI)).abs() < 1e-13, "t={t}: {} vs {}", even.eval(t), h / (4.0 * PI));
            assert!((odd.eval(t) - h / 2.0).abs() < 1e-14, "t={t}");
        }
    }

    #[test]
    fn roundtrip_rank_zero_odd() {
        let g = TestFunction::standard();
        let e = mehler_fock_roundtrip(0, KernelCase::Odd, &g, &[0.0, 0.5, 1.0]).unwrap();
        assert!(e < 1e-8, "error {e}");
    }

    #[test]
    fn roundtrip_error_shrinks_with_tolerance() {
        let g = TestFunction::standard();
        let errs: Vec<f64> = [1e-3, 1e-5, 1e-7]
            .iter()
            .map(|&tol| mehler_fock_roundtrip_with(0, KernelCase::Odd, &g, &[0.0, 0.5], tol).unwrap().max_error)
            .collect();
        assert!(errs[0] >= errs[1] && errs[1] >= errs[2], "{errs:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rho_series_and_closed_form_agree(u in 0.0f64..0.25) {
            let a = rho_squared_jet::<3>(u);
            let r = 2.0 * u.sqrt().asinh();
            prop_assert!((a.value() - r * r).abs() < 1e-14);
            if u > 0.05 {
                let x = Jet::<3>::variable(u).sqrt().asinh();
                let b = (x * x).scale(4.0);
                for k in 0..3 {
                    prop_assert!((a.derivative(k) - b.derivative(k)).abs() < 1e-10 * (1.0 + b.derivative(k).abs()));
                }
            }
        }

        #[test]
        fn bump_is_even_and_supported(x in -3.0f64..3.0, a in 0.3f64..2.0) {
            let g = TestFunction::bump(a).unwrap();
            prop_assert_eq!(g.value(x), g.value(-x));
            if x.abs() >= a {
                prop_assert_eq!(g.value(x), 0.0);
            }
        }
    }
}
