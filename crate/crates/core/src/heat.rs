//! Heat-trace bounds, the truncation remainder R_t^c and the Selberg
//! geometric-side envelope F_T.

use std::f64::consts::PI;

use crate::counting::{Dimension, LocalGeometry};
use crate::error::{Error, Result};
use crate::nu::nu_cached;
use crate::specfun::{euclidean_ball_volume, gamma, gamma_upper, quad_semi_infinite, QuadratureSpec};

/// A compact hyperbolic surface described by its genus and systole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicSurface {
    pub genus: u32,
    pub systole: f64,
}

impl HyperbolicSurface {
    pub fn new(genus: u32, systole: f64) -> Result<Self> {
        if genus < 2 {
            return Err(Error::domain(format!("a hyperbolic surface has genus ≥ 2, got {genus}")));
        }
        if !(systole > 0.0) || !systole.is_finite() {
            return Err(Error::domain(format!("systole must be positive, got {systole}")));
        }
        Ok(HyperbolicSurface { genus, systole })
    }

    /// The Bolza surface: genus 2, systole 2 arccosh(1+√2).
    pub fn bolza() -> Self {
        HyperbolicSurface {
            genus: 2,
            systole: 2.0 * (1.0 + 2f64.sqrt()).acosh(),
        }
    }

    /// Gauss–Bonnet area 4π(g-1).
    pub fn area(&self) -> f64 {
        4.0 * PI * (self.genus as f64 - 1.0)
    }

    fn gm1(&self) -> f64 {
        self.genus as f64 - 1.0
    }

    /// Upper end √(l²+1) - 1 of the admissible T window.
    pub fn window(&self) -> f64 {
        (self.systole * self.systole + 1.0).sqrt() - 1.0
    }
}

/// Sorted eigenvalues λ² of the Laplacian, with multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    max_known: f64,
}

impl Spectrum {
    /// Sorts the values. The completeness horizon defaults to the largest value.
    pub fn new(mut eigenvalues: Vec<f64>, max_known: Option<f64>) -> Result<Self> {
        if let Some(bad) = eigenvalues.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::domain(format!("eigenvalues must be finite and nonnegative, got {bad}")));
        }
        eigenvalues.sort_by(|a, b| a.total_cmp(b));
        let top = eigenvalues.last().copied().unwrap_or(0.0);
        let max_known = max_known.unwrap_or(top);
        if !(max_known >= 0.0) {
            return Err(Error::domain(format!("completeness horizon must be nonnegative, got {max_known}")));
        }
        Ok(Spectrum { eigenvalues, max_known })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn max_known(&self) -> f64 {
        self.max_known
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Number of eigenvalues λ² ≤ c.
    pub fn count_up_to(&self, c: f64) -> usize {
        self.eigenvalues.partition_point(|&v| v <= c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatQuery {
    pub t: f64,
    /// truncation level in λ² units
    pub c: f64,
}

impl HeatQuery {
    pub fn new(t: f64, c: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::domain(format!("heat time must be positive, got {t}")));
        }
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::domain(format!("truncation level must be nonnegative, got {c}")));
        }
        Ok(HeatQuery { t, c })
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("heat time must be positive, got {t}")));
    }
    Ok(())
}

/// Upper bound on the local heat trace k_t(x).
pub fn local_heat_trace_upper(dim: Dimension, geom: LocalGeometry, t: f64) -> Result<f64> {
    check_time(t)?;
    let n = dim.n();
    let nf = n as f64;
    let nu = nu_cached((n + 2) / 2)?;
    let d = geom.d;
    let c1 = euclidean_ball_volume(n) / (2.0 * PI).powi(n as i32);
    Ok(c1
        * (gamma((nf + 2.0) / 2.0) * t.powf(-nf / 2.0)
            + nf * gamma((nf + 1.0) / 2.0) * (2.0 * nu * nu + PI * nu) / (d * PI)
                * (1.0 / t.sqrt() + nu / d).powi(n as i32 - 1)))
}

/// Upper bound on tr(e^{-tΔ}) for a closed hyperbolic manifold.
pub fn heat_trace_upper(dim: Dimension, volume: f64, systole: f64, t: f64) -> Result<f64> {
    if !(volume > 0.0) {
        return Err(Error::domain(format!("volume must be positive, got {volume}")));
    }
    Ok(volume * local_heat_trace_upper(dim, LocalGeometry::new(systole)?, t)?)
}

/// Bound on R_t^c(x) for surfaces.
pub fn remainder_upper_surface(geom: LocalGeometry, q: HeatQuery) -> Result<f64> {
    let nu = nu_cached(2)?;
    let (t, c, d) = (q.t, q.c, geom.d);
    let c1 = (4.0 * nu * nu + 2.0 * nu * PI) / (PI * d);
    let tc = t * c;
    let bracket = gamma_upper(2.0, tc)? / t
        + c1 * gamma_upper(1.5, tc)? / t.sqrt()
        + (-tc).exp()
            * (-c + c.sqrt() * 4.0 * nu * nu / (PI * d) + (8.0 * nu.powi(3) + 2.0 * nu * nu * PI) / (PI * d * d)
                + 1.0 / 12.0);
    Ok(bracket / (4.0 * PI))
}

/// Bound on R_t^c(x) in any dimension.
///
/// `n_lower_at_c` must be a lower bound for N_x(√c), e.g.
/// `local_counting_lower(dim, geom, c.sqrt())`. The counting function enters
/// with a minus sign, so an upper bound there would break the inequality.
pub fn remainder_upper_general(dim: Dimension, geom: LocalGeometry, q: HeatQuery, n_lower_at_c: f64) -> Result<f64> {
    let n = dim.n();
    let nf = n as f64;
    let nu = nu_cached((n + 2) / 2)?;
    let d = geom.d;
    let (t, c) = (q.t, q.c);
    let tc = t * c;
    let c1 = euclidean_ball_volume(n) / (2.0 * PI).powi(n as i32);
    let c2 = nf * (2.0 * nu * nu + PI * nu) / (d * PI);
    let c3 = nu / d;
    let mut sum = 0.0;
    let mut binom = 1.0;
    for l in 0..n {
        let lf = l as f64;
        sum += binom * c3.powi((n - 1 - l) as i32) * t.powf(-lf / 2.0) * gamma_upper(lf / 2.0 + 1.0, tc)?;
        binom *= (n - 1 - l) as f64 / (l + 1) as f64;
    }
    Ok(-n_lower_at_c * (-tc).exp() + c1 * t.powf(-nf / 2.0) * gamma_upper(nf / 2.0 + 1.0, tc)? + c1 * c2 * sum)
}

/// Identity term (|M| e^{-t/4} / 4πt) ∫_0^∞ π e^{-r²t} sech²(πr) dr of the trace formula.
pub fn selberg_identity_term(area: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    let sech2 = |x: f64| {
        let e = (-2.0 * x).exp();
        4.0 * e / ((1.0 + e) * (1.0 + e))
    };
    let spec = QuadratureSpec::tight();
    let integral = quad_semi_infinite(|r| PI * (-r * r * t).exp() * sech2(PI * r), 0.0, &spec)?;
    Ok(area * (-t / 4.0).exp() / (4.0 * PI * t) * integral)
}

// 1/√T + (2ν²+νπ)/(√π l) + √T (4ν³+2ν²π)/(π l²)
pub(crate) fn genus_bracket(systole: f64, big_t: f64) -> Result<f64> {
    let nu = nu_cached(2)?;
    let l = systole;
    Ok(1.0 / big_t.sqrt()
        + (2.0 * nu * nu + nu * PI) / (PI.sqrt() * l)
        + big_t.sqrt() * (4.0 * nu.powi(3) + 2.0 * nu * nu * PI) / (PI * l * l))
}

pub(crate) fn check_window(surface: &HyperbolicSurface, lo: f64, big_t: f64) -> Result<()> {
    let w = surface.window();
    if !(lo > 0.0) || !(lo <= big_t) || !(big_t < w) {
        return Err(Error::Window(format!(
            "0 < {lo} ≤ T = {big_t} < √(l²+1) - 1 = {w}"
        )));
    }
    Ok(())
}

/// Envelope F_T(t) of the geodesic terms of the trace formula.
///
/// With a known trace at T this is √(T/t) tr(e^{-TΔ}) e^{T/4 + l²/4T - l²/4t};
/// otherwise the genus form obtained from the heat-trace bound at T.
pub fn geodesic_term_envelope(
    surface: &HyperbolicSurface,
    t: f64,
    big_t: f64,
    trace_at_t: Option<f64>,
) -> Result<f64> {
    check_window(surface, t, big_t)?;
    let l2 = surface.systole * surface.systole;
    let expo = big_t / 4.0 + l2 / (4.0 * big_t) - l2 / (4.0 * t);
    match trace_at_t {
        Some(tr) => Ok((big_t / t).sqrt() * tr * expo.exp()),
        None => Ok(surface.gm1() / t.sqrt() * expo.exp() * genus_bracket(surface.systole, big_t)?),
    }
}

/// (∑_{λ²≤c} e^{-λ²t}, ∑_{c<λ²≤c_max} e^{-λ²t}) over the known eigenvalues.
pub fn spectral_partial_sums(spec: &Spectrum, t: f64, c: f64) -> Result<(f64, f64)> {
    check_time(t)?;
    let (mut head, mut tail) = (0.0, 0.0);
    for &v in spec.eigenvalues() {
        if v <= c {
            head += (-v * t).exp();
        } else if v <= spec.max_known() {
            tail += (-v * t).exp();
        }
    }
    Ok((head, tail))
}
