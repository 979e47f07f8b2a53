//! Two-sided bounds on log det_ζ(Δ) for compact hyperbolic surfaces.
//!
//! ζ'_Δ(0) = L₁ + L₂ + L₃: L₁ is split into a head over the known eigenvalues
//! and a tail bounded through R_t^c, L₂ is computed by quadrature, and L₃ (the
//! geodesic part) is bounded through the envelope F_T. The two estimates of
//! -log det are
//!
//! ```text
//! L₂ + head - L₃bound  ≤  -log det  ≤  L₂ + head + tail + L₃bound
//! ```

use std::f64::consts::PI;

use crate::counting::{global_counting_bounds, BoundPair, Dimension};
use crate::error::{Error, Result};
use crate::heat::{check_window, genus_bracket, HyperbolicSurface, Spectrum};
use crate::nu::nu_cached;
use crate::specfun::{exp_integral_en, gamma_upper, quad_semi_infinite, QuadratureSpec, EULER_GAMMA};

#[derive(Debug, Clone, PartialEq)]
pub struct DetQuery {
    /// eigenvalues λ² ≤ c are taken as known
    pub c: f64,
    pub eps: f64,
    pub big_t: f64,
    pub surface: HyperbolicSurface,
    pub spectrum: Spectrum,
}

impl DetQuery {
    pub fn new(c: f64, eps: f64, big_t: f64, surface: HyperbolicSurface, spectrum: Spectrum) -> Result<Self> {
        let q = DetQuery { c, eps, big_t, surface, spectrum };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) {
            return Err(Error::domain(format!("c must be positive, got {}", self.c)));
        }
        check_window(&self.surface, self.eps, self.big_t)?;
        if self.spectrum.max_known() < self.c {
            return Err(Error::domain(format!(
                "eigenvalues are known up to {} only, below c = {}",
                self.spectrum.max_known(),
                self.c
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetParts {
    pub l1_head: f64,
    pub l1_tail_bound: f64,
    pub l2: f64,
    pub l3_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetResult {
    /// bracket on -log det_ζ(Δ) = ζ'(0)
    pub neg_log_det: BoundPair,
    pub det: BoundPair,
    pub parts: DetParts,
    pub warnings: Vec<String>,
}

/// ∑_{0<λ²≤c} Γ(0, ελ²).
pub fn l1_head(spectrum: &Spectrum, c: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::domain(format!("eps must be positive, got {eps}")));
    }
    let mut s = 0.0;
    for &v in spectrum.eigenvalues().iter().filter(|&&v| v > 0.0 && v <= c) {
        s += gamma_upper(0.0, eps * v)?;
    }
    Ok(s)
}

/// Bound on ∫_ε^∞ t^{-1} R_t^c dt integrated over the surface.
pub fn l1_tail_bound(surface: &HyperbolicSurface, c: f64, eps: f64) -> Result<f64> {
    if !(c > 0.0) || !(eps > 0.0) {
        return Err(Error::domain(format!("need c, eps > 0 (got {c}, {eps})")));
    }
    let nu = nu_cached(2)?;
    let l = surface.systole;
    let ce = c * eps;
    let coef = -c + c.sqrt() * 4.0 * nu * nu / (PI * l) + (8.0 * nu.powi(3) + 2.0 * nu * nu * PI) / (PI * l * l)
        + 1.0 / 12.0;
    let bracket = coef * gamma_upper(0.0, ce)?
        + (-ce).exp() / eps
        + gamma_upper(0.5, ce)? * (4.0 * nu * nu + 2.0 * nu * PI) / (eps.sqrt() * PI * l);
    Ok((surface.genus as f64 - 1.0) * bracket)
}

/// L₂^ε.
pub fn l2_term(surface: &HyperbolicSurface, eps: f64) -> Result<f64> {
    l2_term_with(surface.area(), eps, &QuadratureSpec::tight())
}

pub fn l2_term_with(area: f64, eps: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::domain(format!("eps must be positive, got {eps}")));
    }
    let integrand = |r: f64| -> f64 {
        let e = (-2.0 * PI * r).exp();
        let sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
        sech2 * l2_bracket(r * r + 0.25, eps)
    };
    let integral = quad_semi_infinite(integrand, 0.0, spec)?;
    if !integral.is_finite() {
        return Err(Error::convergence("l2_term", f64::NAN));
    }
    Ok(-area / (4.0 * PI * eps) - (area / (12.0 * PI) + 1.0) * (EULER_GAMMA + eps.ln()) + area / 4.0 * integral)
}

// (1 - E₂(εq))/ε + q(γ - 1 + log εq). For small x = εq the two parts cancel
// to O(x); there the E₂ series gives q Σ_{k≥2} (-1)^k x^{k-1} / ((k-1) k!).
fn l2_bracket(q: f64, eps: f64) -> f64 {
    let x = eps * q;
    if x < 1.0 {
        let mut term = 1.0; // (-x)^{k-1} / k!, starting at k = 1
        let mut sum = 0.0;
        for k in 2..60 {
            term *= -x / k as f64;
            let d = -term / (k - 1) as f64;
            sum += d;
            if d.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        return q * sum;
    }
    let e2 = exp_integral_en(2, x).unwrap_or(f64::NAN);
    (1.0 - e2) / eps + q * (EULER_GAMMA - 1.0 + x.ln())
}

/// Bound on |L₃^ε|.
pub fn l3_bound(surface: &HyperbolicSurface, eps: f64, big_t: f64) -> Result<f64> {
    check_window(surface, eps, big_t)?;
    let l = surface.systole;
    let pre = (surface.genus as f64 - 1.0) / l * (big_t / 4.0 + l * l / (4.0 * big_t)).exp();
    Ok(pre * genus_bracket(l, big_t)? * gamma_upper(0.5, l * l / (4.0 * eps))?)
}

pub fn det_bounds(q: &DetQuery) -> Result<DetResult> {
    q.validate()?;
    let s = &q.surface;
    let parts = DetParts {
        l1_head: l1_head(&q.spectrum, q.c, q.eps)?,
        l1_tail_bound: l1_tail_bound(s, q.c, q.eps)?,
        l2: l2_term(s, q.eps)?,
        l3_bound: l3_bound(s, q.eps, q.big_t)?,
    };
    let base = parts.l2 + parts.l1_head;
    let neg_log_det = BoundPair::new(base - parts.l3_bound, base + parts.l1_tail_bound + parts.l3_bound)?;
    let det = BoundPair::new((-neg_log_det.upper).exp(), (-neg_log_det.lower).exp())?;

    let mut warnings = Vec::new();
    let count = q.spectrum.count_up_to(q.c) as f64;
    let expected = global_counting_bounds(Dimension::new(2)?, s.area(), s.systole, q.c.sqrt())?;
    if !expected.contains(count) {
        warnings.push(format!(
            "{count} eigenvalues ≤ {}, outside the counting bracket [{:.3}, {:.3}]; the list may be incomplete",
            q.c, expected.lower, expected.upper
        ));
    }
    Ok(DetResult { neg_log_det, det, parts, warnings })
}

/// det_bounds over an (ε, T) grid; pairs outside the admissible window are skipped.
pub fn det_sweep(base: &DetQuery, eps_grid: &[f64], t_grid: &[f64]) -> Result<Vec<(f64, f64, DetResult)>> {
    let mut out = Vec::new();
    for &eps in eps_grid {
        for &big_t in t_grid {
            let q = DetQuery { eps, big_t, ..base.clone() };
            match det_bounds(&q) {
                Ok(r) => out.push((eps, big_t, r)),
                Err(Error::Window(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}
