//! Modified Bessel function of the first kind, order zero.
//!
//! The power series (all-positive terms, no cancellation) covers x < 20;
//! above that the asymptotic expansion of the exponentially scaled
//! function is truncated at its smallest term, which at the crossover is
//! already below 1e-15 relative.

use super::SpecfunError;

const SERIES_CROSSOVER: f64 = 20.0;

/// exp(-x) * I0(x) for x >= 0, finite for arbitrarily large x.
pub fn bessel_i0_scaled(x: f64) -> Result<f64, SpecfunError> {
    if !(x >= 0.0) {
        return Err(SpecfunError::Domain {
            what: "bessel_i0 requires x >= 0",
            value: x,
        });
    }
    if x < SERIES_CROSSOVER {
        Ok(i0_series(x) * (-x).exp())
    } else {
        Ok(i0e_asymptotic(x))
    }
}

/// I0(x) for x >= 0. Overflows to +inf for x beyond ~713.
pub fn bessel_i0(x: f64) -> Result<f64, SpecfunError> {
    if !(x >= 0.0) {
        return Err(SpecfunError::Domain {
            what: "bessel_i0 requires x >= 0",
            value: x,
        });
    }
    if x < SERIES_CROSSOVER {
        Ok(i0_series(x))
    } else {
        Ok(i0e_asymptotic(x) * x.exp())
    }
}

fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / ((k * k) as f64);
        sum += term;
        if term < f64::EPSILON * sum {
            break;
        }
    }
    sum
}

fn i0e_asymptotic(x: f64) -> f64 {
    // I0(x) ~ e^x / sqrt(2 pi x) * sum_k prod_{j<=k} (2j-1)^2 / (8 j x)
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let j = k as f64;
        term *= (2.0 * j - 1.0) * (2.0 * j - 1.0) / (8.0 * j * x);
        if term >= prev {
            break; // divergent tail reached
        }
        sum += term;
        prev = term;
        if term < f64::EPSILON * sum {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oracle: plain power series with a fixed generous term count.
    fn i0_series_oracle(x: f64, terms: usize) -> f64 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..=terms {
            term *= q / ((k * k) as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn i0_at_zero_is_one() {
        assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
        assert_eq!(bessel_i0_scaled(0.0).unwrap(), 1.0);
    }

    #[test]
    fn i0_of_one_matches_series_oracle() {
        let oracle = i0_series_oracle(1.0, 25);
        let v = bessel_i0(1.0).unwrap();
        assert!((v - oracle).abs() / oracle < 1e-15);
        // first digits of the known value
        assert!((v - 1.266_065_877_752_008_3).abs() < 1e-14);
    }

    #[test]
    fn i0_negative_is_domain_error() {
        assert!(bessel_i0(-0.5).is_err());
        assert!(bessel_i0_scaled(-1.0).is_err());
        assert!(bessel_i0(f64::NAN).is_err());
    }

    #[test]
    fn i0_monotone_increasing() {
        let mut prev = 0.0;
        for i in 0..300 {
            let v = bessel_i0(i as f64 * 0.25).unwrap();
            assert!(v > prev || i == 0);
            prev = v;
        }
    }

    #[test]
    fn scaled_consistent_with_unscaled_across_crossover() {
        for &x in &[0.5, 5.0, 14.0, 19.9, 20.1, 25.0, 60.0, 300.0] {
            let a = bessel_i0_scaled(x).unwrap();
            let b = bessel_i0(x).unwrap() * (-x).exp();
            assert!((a - b).abs() / a < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn series_and_asymptotic_agree_near_crossover() {
        for &x in &[16.0, 18.0, 20.0, 22.0, 26.0] {
            let series = i0_series_oracle(x, 80) * (-x).exp();
            let asym = i0e_asymptotic(x);
            let rel = (series - asym).abs() / series;
            assert!(rel < 5e-14, "x = {x}: rel = {rel:e}");
        }
    }

    #[test]
    fn scaled_i0_finite_and_consistent_at_700() {
        let scaled = bessel_i0_scaled(700.0).unwrap();
        assert!(scaled.is_finite() && scaled > 0.0);
        let unscaled = bessel_i0(700.0).unwrap();
        assert!(unscaled.is_finite());
        let rel = (scaled - unscaled * (-700.0_f64).exp()).abs() / scaled;
        assert!(rel < 1e-12, "rel = {rel:e}");
    }
}
