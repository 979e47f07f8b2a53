use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::{gamma, gamma_complex};
use super::quad::{quad_finite, QuadratureSpec};
use crate::error::{Error, Result};

/// Complex number carrying a spectral parameter such as `m + it`.
pub type ComplexValue = Complex64;

// Beyond this the power series loses too many digits to cancellation.
const SERIES_PHASE_LIMIT: f64 = 12.0;

/// Gauss hypergeometric ₂F₁(α, ᾱ; c; z) for conjugate upper parameters and z ≤ 0.
///
/// The value is real. Small |z| with moderate Im α uses the power series.
/// Otherwise, when `c = Re α + 1/2` (the case of every hyperbolic spherical
/// function used here), a Laplace-type integral over [0, π] with a bounded,
/// non-cancelling integrand is used; other parameters fall back to Euler's
/// integral.
pub fn hyp2f1_neg_axis(alpha: ComplexValue, alpha_bar: ComplexValue, c: f64, z: f64) -> Result<f64> {
    hyp2f1_neg_axis_with(alpha, alpha_bar, c, z, &QuadratureSpec::default())
}

pub fn hyp2f1_neg_axis_with(
    alpha: ComplexValue,
    alpha_bar: ComplexValue,
    c: f64,
    z: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(alpha.re.is_finite() && alpha.im.is_finite() && c.is_finite() && z.is_finite()) {
        return Err(Error::domain("hyp2f1 arguments must be finite"));
    }
    if (alpha.conj() - alpha_bar).norm() > 1e-12 * (1.0 + alpha.norm()) {
        return Err(Error::domain("hyp2f1_neg_axis needs conjugate upper parameters"));
    }
    if z > 0.0 {
        return Err(Error::domain(format!("hyp2f1_neg_axis needs z ≤ 0, got {z}")));
    }
    if !(c > 0.0) {
        return Err(Error::domain(format!("hyp2f1_neg_axis needs c > 0, got {c}")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let (a, b) = (alpha.re, alpha.im);
    let u = -z;
    if a == 0.0 && (c - 0.5).abs() < 1e-15 {
        return Ok((2.0 * b * u.sqrt().asinh()).cos());
    }
    let laplace_ok = a > 0.0 && (c - a - 0.5).abs() < 1e-14;
    if u < 0.75 && 2.0 * b.abs() * u.sqrt() <= SERIES_PHASE_LIMIT {
        if let Some(v) = series(a, b, c, z) {
            return Ok(v);
        }
    }
    if laplace_ok {
        return laplace(a, b, u, spec);
    }
    if c > a && a > 0.0 {
        return euler(alpha, c, z, spec);
    }
    if u < 1.0 {
        if let Some(v) = series(a, b, c, z) {
            return Ok(v);
        }
    }
    Err(Error::Unsupported(format!(
        "hyp2f1 with Re α = {a}, c = {c}, z = {z} is outside the implemented region"
    )))
}

/// Power series; `None` when cancellation would cost more than six digits.
pub(crate) fn series(a: f64, b: f64, c: f64, z: f64) -> Option<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut biggest: f64 = 1.0;
    for k in 0..20000 {
        let kf = k as f64;
        term *= ((a + kf) * (a + kf) + b * b) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        biggest = biggest.max(term.abs());
        if term.abs() <= 1e-17 * sum.abs() && kf > 2.0 * b.abs() {
            if biggest > 1e6 * sum.abs() {
                return None;
            }
            return Some(sum);
        }
    }
    None
}

fn laplace(a: f64, b: f64, u: f64, spec: &QuadratureSpec) -> Result<f64> {
    let rho = 2.0 * u.sqrt().asinh();
    let sh = rho.sinh();
    let pref = gamma(a + 0.5) / (PI.sqrt() * gamma(a));
    let f = |th: f64| {
        // cosh ρ - sinh ρ cos θ without cancellation near θ = 0
        let x = (-rho).exp() + 2.0 * sh * (0.5 * th).sin().powi(2);
        let lx = x.ln();
        (-a * lx).exp() * (b * lx).cos() * th.sin().powf(2.0 * a - 1.0)
    };
    let scale = (a * rho).exp() * PI;
    let inner = QuadratureSpec {
        // never below the rounding floor of an integrand of size `scale`
        abs_tol: (spec.abs_tol * 1e-3).clamp(1e-13, 1e-10) * scale,
        rel_tol: spec.rel_tol.min(1e-10),
        max_subdivisions: spec.max_subdivisions.max(4000),
    };
    let v = quad_finite(f, 0.0, PI, &inner)?;
    Ok(pref * v)
}

fn euler(alpha: Complex64, c: f64, z: f64, spec: &QuadratureSpec) -> Result<f64> {
    // F(α, ᾱ; c; z) = Γ(c)/(Γ(ᾱ)Γ(c-ᾱ)) ∫ s^{ᾱ-1} (1-s)^{c-ᾱ-1} (1-zs)^{-α} ds
    let one = Complex64::new(1.0, 0.0);
    let beta = alpha.conj();
    let cm = Complex64::new(c, 0.0) - beta;
    let pref = gamma(c) / (gamma_complex(beta) * gamma_complex(cm));
    let integrand = |s: f64| -> Complex64 {
        let ls = Complex64::new(s.ln(), 0.0);
        let l1 = Complex64::new((1.0 - s).ln(), 0.0);
        let lz = Complex64::new((1.0 - z * s).ln(), 0.0);
        ((beta - one) * ls + (cm - one) * l1 - alpha * lz).exp()
    };
    let inner = QuadratureSpec {
        abs_tol: spec.abs_tol * 1e-3,
        rel_tol: spec.rel_tol * 1e-2,
        max_subdivisions: spec.max_subdivisions.max(4000),
    };
    let re = quad_finite(|s| integrand(s).re, 0.0, 1.0, &inner)?;
    let im = quad_finite(|s| integrand(s).im, 0.0, 1.0, &inner)?;
    Ok((pref * Complex64::new(re, im)).re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(a: f64, b: f64, c: f64, z: f64) -> f64 {
        hyp2f1_neg_axis(Complex64::new(a, b), Complex64::new(a, -b), c, z).unwrap()
    }

    fn rel(x: f64, y: f64) -> f64 {
        (x - y).abs() / y.abs().max(1e-300)
    }

    #[test]
    fn value_at_origin() {
        assert_eq!(f(1.5, 3.0, 2.0, 0.0), 1.0);
    }

    #[test]
    fn cosine_closed_form() {
        let u: f64 = 1.0;
        let v = f(0.0, 1.0, 0.5, -u);
        assert!((v - (2.0 * u.sqrt().asinh()).cos()).abs() < 1e-14);
    }

    #[test]
    fn series_oracle() {
        // 200-term truncated series, no early exit
        let (a, b, c, z) = (0.5, 1.0, 1.0, -0.5);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 0..200 {
            let kf = k as f64;
            term *= ((a + kf) * (a + kf) + b * b) / ((c + kf) * (kf + 1.0)) * z;
            sum += term;
        }
        assert!(rel(f(a, b, c, z), sum) < 1e-12);
        // mpmath: hyp2f1(0.5+1j, 0.5-1j, 1, -0.5)
        assert!(rel(sum, 0.55641354893507601368) < 1e-13);
    }

    #[test]
    fn laplace_branch_matches_reference() {
        // mpmath reference values
        assert!(rel(f(1.0, 3.0, 1.5, -1.0), -0.098845084642044460064) < 1e-9);
        assert!(rel(f(1.5, 7.0, 2.0, -2.5), -0.0047013748525740829446) < 1e-9);
        assert!(rel(f(0.5, 40.0, 1.0, -1.0), 0.061649693251159404109) < 1e-9);
    }

    #[test]
    fn euler_fallback_matches_reference() {
        let v = f(2.0, 1.0, 3.5, -3.0);
        assert!(rel(v, 0.10046334687025837021) < 1e-9, "{v}");
    }

    #[test]
    fn odd_spherical_function_closed_form() {
        // ₂F₁(1+it, 1-it; 3/2; -sinh²(ρ/2)) = sin(tρ) / (t sinh ρ)
        for &t in &[0.5, 4.0, 25.0, 90.0] {
            for &rho in &[0.3, 1.0, 2.2] {
                let u = (0.5f64 * rho).sinh().powi(2);
                let expect = (t * rho).sin() / (t * rho.sinh());
                let got = f(1.0, t, 1.5, -u);
                assert!((got - expect).abs() < 1e-11, "t={t} rho={rho}: {got} vs {expect}");
            }
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(20))]
        #[test]
        fn laplace_agrees_with_series(m in 1u32..=3, half in proptest::bool::ANY, b in -5.0f64..5.0, u in 0.01f64..0.5) {
            let a = m as f64 + if half { 0.5 } else { 0.0 };
            let s = series(a, b, a + 0.5, -u).unwrap();
            let l = laplace(a, b, u, &QuadratureSpec::default()).unwrap();
            proptest::prop_assert!((s - l).abs() < 1e-8 * (1.0 + s.abs()), "{} vs {}", s, l);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let a = Complex64::new(0.5, 1.0);
        assert!(hyp2f1_neg_axis(a, a, 1.0, -0.5).is_err());
        assert!(hyp2f1_neg_axis(a, a.conj(), 1.0, 0.5).is_err());
    }
}
