//! Special functions and numerical primitives.

pub mod gamma;
pub mod hyper;
pub mod jet;
pub mod quad;
pub mod roots;

pub use gamma::{
    euclidean_ball_volume, exp_integral_en, gamma, gamma_complex, gamma_upper, ln_gamma, EULER_GAMMA,
};
pub(crate) use gamma::gamma_upper_unchecked;
pub use hyper::{hyp2f1_neg_axis, hyp2f1_neg_axis_with, ComplexValue};
pub use jet::Jet;
pub use quad::{
    gauss_legendre, quad_finite, quad_semi_infinite, quad_semi_infinite_bounded, tanh_complement, tanh_defect_tail,
    QuadratureSpec,
};
pub use roots::find_root_bracketed;

use crate::error::{Error, Result};

/// Cosine transform h(t) = ∫ g(x) cos(tx) dx of an even function supported in
/// `(-support_bound, support_bound)`, by quadrature over `[0, support_bound]`.
pub fn cosine_transform<G: Fn(f64) -> f64>(g: G, t: f64, support_bound: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(support_bound > 0.0) {
        return Err(Error::domain("cosine_transform needs a positive support bound"));
    }
    let half = quad_finite(|x| g(x) * (t * x).cos(), 0.0, support_bound, spec)?;
    Ok(2.0 * half)
}
