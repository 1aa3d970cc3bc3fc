//! Special functions and quadrature for the BER analytics.
//!
//! Everything here is a pure function of its inputs and safe to call from
//! any number of threads.

mod bessel;
pub(crate) mod dd;
mod erf;
mod marcum;
mod quad;

pub use bessel::{bessel_i0, bessel_i0_scaled};
pub use erf::{erf, erfc};
pub use marcum::{marcum_default_spec, marcum_q1};
pub use quad::{integrate, integrate_segmented, QuadResult, QuadratureSpec, UpperBound};

/// Errors from the special-function layer.
#[derive(Debug, Clone, thiserror::Error)]
pub enum SpecfunError {
    #[error("{what} (got {value})")]
    Domain { what: &'static str, value: f64 },
    #[error("quadrature did not converge: value ~ {value:e}, error estimate {error_estimate:e} after {subdivisions} subdivisions")]
    QuadratureNonConvergence {
        value: f64,
        error_estimate: f64,
        subdivisions: usize,
    },
}

/// ln(I0(x)) without overflow, valid for any x >= 0.
pub fn ln_bessel_i0(x: f64) -> Result<f64, SpecfunError> {
    Ok(x + bessel_i0_scaled(x)?.ln())
}
