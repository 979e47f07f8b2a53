use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.57721566490153286061;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments (Lanczos, with reflection below 1/2).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    if x == x.floor() && x <= 171.0 {
        let mut p = 1.0;
        let mut k = 2.0;
        while k < x {
            p *= k;
            k += 1.0;
        }
        return p;
    }
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * a
}

pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin().abs()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// Gamma function of a complex argument.
pub fn gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return Complex64::new(PI, 0.0) / (s * gamma_complex(Complex64::new(1.0, 0.0) - z));
    }
    let z = z - 1.0;
    let mut a = Complex64::new(LANCZOS[0], 0.0);
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += *c / (z + i as f64);
    }
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * a
}

/// Volume of the unit ball in R^n.
pub fn euclidean_ball_volume(n: u32) -> f64 {
    let h = n as f64 / 2.0;
    PI.powf(h) / gamma(h + 1.0)
}

// E_1 by its power series, x small.
fn e1_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        term *= -x / k as f64;
        let d = term / k as f64;
        sum += d;
        if d.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

// Γ(s, x) by continued fraction, x ≥ s + 1 (modified Lentz).
fn upper_cf(s: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x + s * x.ln()).exp() * h
}

// γ(s, x) by its power series.
fn lower_series(s: f64, x: f64) -> f64 {
    let mut ap = s;
    let mut del = 1.0 / s;
    let mut sum = del;
    for _ in 0..2000 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum * (-x + s * x.ln()).exp()
}

pub(crate) fn gamma_upper_unchecked(s: f64, x: f64) -> f64 {
    if x == 0.0 {
        return gamma(s);
    }
    if s == 0.0 {
        return if x < 1.0 { e1_series(x) } else { upper_cf(0.0, x) };
    }
    if x < s + 1.0 {
        gamma(s) - lower_series(s, x)
    } else {
        upper_cf(s, x)
    }
}

/// Upper incomplete gamma function Γ(s, x) = ∫_x^∞ e^{-t} t^{s-1} dt.
pub fn gamma_upper(s: f64, x: f64) -> Result<f64> {
    if !(s >= 0.0) || !(x >= 0.0) {
        return Err(Error::domain(format!("gamma_upper needs s, x ≥ 0 (got {s}, {x})")));
    }
    if s == 0.0 && x == 0.0 {
        return Err(Error::domain("gamma_upper(0, 0) diverges"));
    }
    Ok(gamma_upper_unchecked(s, x))
}

/// Generalised exponential integral E_n(x) = ∫_1^∞ e^{-xt} t^{-n} dt.
pub fn exp_integral_en(n: u32, x: f64) -> Result<f64> {
    if n == 0 || !(x >= 0.0) {
        return Err(Error::domain(format!("exp_integral_en needs n ≥ 1, x ≥ 0 (got {n}, {x})")));
    }
    if x == 0.0 {
        if n == 1 {
            return Err(Error::domain("E_1(0) diverges"));
        }
        return Ok(1.0 / (n as f64 - 1.0));
    }
    let nm1 = n as i64 - 1;
    if x > 1.0 {
        let tiny = 1e-300;
        let mut b = x + n as f64;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..2000 {
            let an = -(i as f64) * (nm1 as f64 + i as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        return Ok(h * (-x).exp());
    }
    let mut ans = if nm1 != 0 { 1.0 / nm1 as f64 } else { -x.ln() - EULER_GAMMA };
    let mut fact = 1.0;
    for i in 1..2000i64 {
        fact *= -x / i as f64;
        let del = if i != nm1 {
            -fact / (i - nm1) as f64
        } else {
            let psi = -EULER_GAMMA + (1..=nm1).map(|k| 1.0 / k as f64).sum::<f64>();
            fact * (-x.ln() + psi)
        };
        ans += del;
        if del.abs() < ans.abs() * 1e-17 {
            break;
        }
    }
    Ok(ans)
}
