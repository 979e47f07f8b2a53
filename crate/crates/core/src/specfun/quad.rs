use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Error targets for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions == 0 {
            return Err(Error::domain(format!(
                "quadrature spec needs positive tolerances and subdivisions, got ({abs_tol}, {rel_tol}, {max_subdivisions})"
            )));
        }
        Ok(QuadratureSpec {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }

    pub fn tight() -> Self {
        QuadratureSpec {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_subdivisions: 4000,
        }
    }

    pub fn with_abs(self, abs_tol: f64) -> Self {
        QuadratureSpec { abs_tol, ..self }
    }

    pub fn with_rel(self, rel_tol: f64) -> Self {
        QuadratureSpec { rel_tol, ..self }
    }
}

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208636477100,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

// 21-point Kronrod rule with the QUADPACK error heuristic.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// The integrand is never evaluated at the endpoints, so integrable
/// singularities there (such as `(t-a)^{-1/2}`) are fine.
pub fn quad_finite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::domain("quad_finite needs finite limits"));
    }
    let (v, e) = gk21(&f, a, b);
    if !v.is_finite() {
        return Err(Error::convergence("quad_finite (non-finite integrand)", f64::INFINITY));
    }
    let mut total = v;
    let mut total_err = e;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value: v, err: e });
    // panels that hit the resolution floor are parked here
    let mut frozen_value = 0.0;
    let mut frozen_err = 0.0;
    let mut count = 1;
    loop {
        let target = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= target {
            return Ok(total);
        }
        if count >= spec.max_subdivisions {
            return Err(Error::convergence("quad_finite", total_err));
        }
        let Some(worst) = heap.pop() else {
            // everything is at the resolution floor
            if frozen_err <= 10.0 * target {
                return Ok(total);
            }
            return Err(Error::convergence("quad_finite (resolution floor)", total_err));
        };
        let mid = 0.5 * (worst.a + worst.b);
        let tiny = 100.0 * f64::EPSILON * (worst.a.abs().max(worst.b.abs()) + f64::MIN_POSITIVE);
        if (worst.b - worst.a).abs() <= tiny {
            frozen_value += worst.value;
            frozen_err += worst.err;
            continue;
        }
        let (v1, e1) = gk21(&f, worst.a, mid);
        let (v2, e2) = gk21(&f, mid, worst.b);
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(Error::convergence("quad_finite (non-finite integrand)", f64::INFINITY));
        }
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2 });
        count += 1;
        if count % 64 == 0 {
            // refresh the running sums against drift
            total = heap.iter().map(|p| p.value).sum::<f64>() + frozen_value;
            total_err = heap.iter().map(|p| p.err).sum::<f64>() + frozen_err;
        }
    }
}

/// Integral over `[a, ∞)` by panels of doubling width.
///
/// Stops once two consecutive panels each contribute less than `abs_tol/10`.
pub fn quad_semi_infinite<F: Fn(f64) -> f64>(f: F, a: f64, spec: &QuadratureSpec) -> Result<f64> {
    let mut lo = a;
    let mut width = 1.0;
    let mut total = 0.0;
    let mut quiet = 0;
    for _ in 0..80 {
        let hi = lo + width;
        let part = quad_finite(&f, lo, hi, spec)?;
        total += part;
        if part.abs() < spec.abs_tol / 10.0 {
            quiet += 1;
            if quiet >= 2 {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
        lo = hi;
        width *= 2.0;
    }
    Err(Error::convergence("quad_semi_infinite (no decay)", f64::INFINITY))
}

/// Integral over `[a, ∞)` where `tail(T)` bounds `∫_T^∞ |f|`.
///
/// The cutoff is the first point of a doubling grid where the tail bound
/// drops below `abs_tol/10`.
pub fn quad_semi_infinite_bounded<F, B>(f: F, a: f64, tail: B, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
    B: Fn(f64) -> f64,
{
    let goal = spec.abs_tol / 10.0;
    let mut cut = a + 1.0;
    let mut steps = 0;
    while !(tail(cut) < goal) {
        cut = a + 2.0 * (cut - a);
        steps += 1;
        if steps > 60 {
            return Err(Error::convergence("quad_semi_infinite_bounded (tail bound never small)", tail(cut)));
        }
    }
    // integrate in unit-ish panels so oscillation or sharp decay is resolved
    let mut total = 0.0;
    let mut lo = a;
    let mut width = 1.0;
    while lo < cut {
        let hi = (lo + width).min(cut);
        total += quad_finite(&f, lo, hi, spec)?;
        lo = hi;
        width *= 2.0;
    }
    Ok(total)
}

/// Bound on `∫_T^∞ τ^p (1 - tanh(π√(τ² - 1/4))) dτ`, valid for `T ≥ 1`.
///
/// Uses `1 - tanh y ≤ 2e^{-2y}` and `√(τ² - 1/4) ≥ τ - 1/4`.
pub fn tanh_defect_tail(p: f64, t: f64) -> f64 {
    let t = t.max(1.0);
    2.0 * (std::f64::consts::FRAC_PI_2).exp() * super::gamma_upper_unchecked(p + 1.0, 2.0 * std::f64::consts::PI * t)
        / (2.0 * std::f64::consts::PI).powf(p + 1.0)
}

/// `1 - tanh(y)` without cancellation for large `y`.
pub fn tanh_complement(y: f64) -> f64 {
    if y > 0.0 {
        let e = (-2.0 * y).exp();
        2.0 * e / (1.0 + e)
    } else {
        1.0 - y.tanh()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                let jf = j as f64;
                p0 = ((2.0 * jf + 1.0) * z * p1 - jf * p2) / (jf + 1.0);
            }
            dp = nf * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}
