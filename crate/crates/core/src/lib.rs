//! Explicit two-sided bounds for spectral quantities of manifolds that are
//! hyperbolic near a point: local and global eigenvalue counting functions,
//! pointwise eigenfunction bounds, heat traces, and the zeta-regularised
//! determinant of the Laplacian on hyperbolic surfaces. The kernel identities
//! behind the bounds are checked by independent quadrature in `kernel`.

pub mod error;
pub mod specfun;
pub mod nu;
pub mod counting;
pub mod eigenfunction;
pub mod heat;
pub mod io;
pub mod zeta;
pub mod kernel;

pub use error::{Error, Result};
