//! The constants ν_m: ν_m^{2m} is the first eigenvalue of (-d²/dx²)^m on
//! (-1/2, 1/2) with clamped conditions u = u' = … = u^(m-1) = 0 at both ends.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::specfun::find_root_bracketed;

/// Largest supported operator power.
pub const NU_MAX_M: u32 = 10;

const SCAN_STEP: f64 = 0.05;
const SCAN_UPPER: f64 = 20.0;
// Below this the determinant of the nearly dependent small-ν basis is rounding noise.
const NOISE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuConstant {
    pub m: u32,
    pub value: f64,
}

fn determinant(mut a: Vec<Vec<Complex64>>) -> Complex64 {
    let n = a.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        if a[piv][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for r in col + 1..n {
            let f = a[r][col] / p;
            if f.norm() == 0.0 {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[r][k] -= f * v;
            }
        }
    }
    det
}

/// Boundary determinant for the clamped problem at spectral parameter ν.
///
/// Columns are exp(ν ω_k x) with ω_k^{2m} = (-1)^m, scaled to unit size at
/// the larger endpoint; rows are the derivatives of order j < m at x = ±1/2.
pub fn clamped_determinant(m: u32, nu: f64) -> Complex64 {
    let n = 2 * m as usize;
    let omegas: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.0, PI * (m as f64 + 2.0 * k as f64) / (2.0 * m as f64)))
        .collect();
    let mut rows = Vec::with_capacity(n);
    for &x in &[-0.5, 0.5] {
        for j in 0..m as i32 {
            let row = omegas
                .iter()
                .map(|w| w.powi(j) * (nu * w * x - 0.5 * nu * w.re.abs()).exp())
                .collect();
            rows.push(row);
        }
    }
    determinant(rows)
}

// The column set is closed under conjugation, so the determinant is purely
// real or purely imaginary; the sum of both parts is a signed scan function.
fn signed(m: u32, nu: f64) -> f64 {
    let d = clamped_determinant(m, nu);
    d.re + d.im
}

/// Compute ν_m by a sign-change scan of the boundary determinant.
pub fn nu(m: u32) -> Result<NuConstant> {
    if m == 0 || m > NU_MAX_M {
        return Err(Error::Unsupported(format!("nu(m) is implemented for 1 ≤ m ≤ {NU_MAX_M}, got {m}")));
    }
    let mut lo = SCAN_STEP;
    let mut f_lo = signed(m, lo);
    while lo < SCAN_UPPER {
        let hi = lo + SCAN_STEP;
        let f_hi = signed(m, hi);
        if f_lo * f_hi < 0.0 && f_lo.abs().max(f_hi.abs()) > NOISE_FLOOR {
            let r = find_root_bracketed(|x| signed(m, x), lo, hi, 1e-13)?;
            let scale = clamped_determinant(m, lo).norm().max(clamped_determinant(m, hi).norm());
            if clamped_determinant(m, r).norm() <= 1e-6 * scale {
                return Ok(NuConstant { m, value: r });
            }
        }
        lo = hi;
        f_lo = f_hi;
    }
    Err(Error::RootScan { upper: SCAN_UPPER })
}

static CACHE: [OnceLock<f64>; NU_MAX_M as usize] = [const { OnceLock::new() }; NU_MAX_M as usize];

/// Memoised ν_m.
pub fn nu_cached(m: u32) -> Result<f64> {
    if m == 0 || m > NU_MAX_M {
        return nu(m).map(|c| c.value);
    }
    let slot = &CACHE[m as usize - 1];
    if let Some(v) = slot.get() {
        return Ok(*v);
    }
    let v = nu(m)?.value;
    Ok(*slot.get_or_init(|| v))
}
