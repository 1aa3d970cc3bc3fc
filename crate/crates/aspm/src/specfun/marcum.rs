//! Marcum Q-function of order one.

use super::{bessel_i0_scaled, integrate, QuadratureSpec, SpecfunError, UpperBound};

/// Q1(a, b) = integral from b to infinity of x exp(-(x^2+a^2)/2) I0(ax) dx.
///
/// Evaluated by quadrature of the defining integral with the Bessel factor
/// in scaled form, x exp(-(x-a)^2/2) * i0e(ax), which keeps the integrand
/// in range for any a. The result is clamped to [0, 1].
pub fn marcum_q1(a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64, SpecfunError> {
    if !(a >= 0.0) || !(b >= 0.0) {
        return Err(SpecfunError::Domain {
            what: "marcum_q1 requires a, b >= 0",
            value: if a < 0.0 { a } else { b },
        });
    }
    let integrand = move |x: f64| {
        let i0e = bessel_i0_scaled(a * x).expect("a*x >= 0");
        let d = x - a;
        x * (-0.5 * d * d).exp() * i0e
    };
    let mut q = *spec;
    q.lower = b;
    q.upper = UpperBound::EffectivelyInfinite {
        decay_from: a.max(b) + 1.0,
    };
    let r = integrate(integrand, &q)?;
    Ok(r.value.clamp(0.0, 1.0))
}

/// Default quadrature settings for Marcum Q evaluations.
pub fn marcum_default_spec() -> QuadratureSpec {
    QuadratureSpec::to_infinity(0.0, 1.0).with_tols(1e-12, 1e-12)
}
