//! Closed-form bit error rates and operating-point conversions.
//!
//! Four variants are covered: noncoherent (unipolar, envelope detection),
//! coherent bipolar (position + polarity), coherent unipolar, and the
//! binary reductions of each. All probabilities are clamped to
//! [1e-300, 0.5] after evaluation for log-scale plotting.
//!
//! The noncoherent expression exists in two algebraically equivalent
//! forms: an alternating binomial sum and an integral against the
//! noncentral chi-square density. The sum cancels catastrophically as the
//! binomial coefficients grow, so it is evaluated in double-double
//! arithmetic and used only for M <= 30; larger alphabets use the
//! integral. The two paths are required to agree to 1e-10 relative on
//! their common range, which the test suite checks.

use crate::specfun::{
    bessel_i0_scaled, erf, erfc, integrate_segmented, QuadratureSpec, SpecfunError, UpperBound,
};
use crate::specfun::dd::Dd;

/// Errors from BER evaluation and unit conversions.
#[derive(Debug, Clone, thiserror::Error)]
pub enum AnalyticsError {
    #[error("alphabet size must be a power of two >= 2, got {0}")]
    InvalidAlphabet(u32),
    #[error("{what} (got {value})")]
    InvalidParameter { what: &'static str, value: f64 },
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

const P_FLOOR: f64 = 1e-300;
const P_CEIL: f64 = 0.5;

fn clamp_p(p: f64) -> f64 {
    p.clamp(P_FLOOR, P_CEIL)
}

fn check_alphabet(m: u32) -> Result<(), AnalyticsError> {
    if m < 2 || !m.is_power_of_two() {
        return Err(AnalyticsError::InvalidAlphabet(m));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<(), AnalyticsError> {
    if !(lambda >= 0.0) {
        return Err(AnalyticsError::InvalidParameter {
            what: "noncentrality lambda must be >= 0",
            value: lambda,
        });
    }
    Ok(())
}

/// One operating point with every SNR representation populated.
///
/// The conversion chain is lambda = N_p * Gamma = 2 * (Eb/N0) * log2(M),
/// and the coherent statistic mean is mu = sqrt(lambda / 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    /// Noncentrality parameter, peak signal power over noise power after
    /// matched filtering.
    pub lambda: f64,
    /// SNR Gamma = (Eb/N0) * (f_b / B), linear.
    pub snr: f64,
    pub snr_db: f64,
    /// Eb/N0, linear.
    pub ebn0: f64,
    pub ebn0_db: f64,
    /// Coherent detection statistic mean, sqrt(lambda/2).
    pub mu: f64,
    pub m: u32,
    pub n_p: u32,
}

/// Which single quantity defines an operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointInput {
    Lambda(f64),
    Snr(f64),
    SnrDb(f64),
    Ebn0(f64),
    Ebn0Db(f64),
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Populate every representation of an operating point from one input.
pub fn convert(input: PointInput, m: u32, n_p: u32) -> Result<OperatingPoint, AnalyticsError> {
    check_alphabet(m)?;
    if n_p == 0 {
        return Err(AnalyticsError::InvalidParameter {
            what: "interpulse interval N_p must be >= 1",
            value: 0.0,
        });
    }
    let bits = (m as f64).log2();
    let lambda = match input {
        PointInput::Lambda(l) => l,
        PointInput::Snr(snr) => n_p as f64 * snr,
        PointInput::SnrDb(db) => n_p as f64 * db_to_linear(db),
        PointInput::Ebn0(g) => 2.0 * g * bits,
        PointInput::Ebn0Db(db) => 2.0 * db_to_linear(db) * bits,
    };
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(AnalyticsError::InvalidParameter {
            what: "operating point must be positive and finite",
            value: lambda,
        });
    }
    let snr = lambda / n_p as f64;
    let ebn0 = lambda / (2.0 * bits);
    Ok(OperatingPoint {
        lambda,
        snr,
        snr_db: linear_to_db(snr),
        ebn0,
        ebn0_db: linear_to_db(ebn0),
        mu: (lambda / 2.0).sqrt(),
        m,
        n_p,
    })
}

/// Spreading factor B / f_b = N_p / (2 log2 M).
pub fn spreading_factor(m: u32, n_p: u32) -> Result<f64, AnalyticsError> {
    check_alphabet(m)?;
    Ok(n_p as f64 / (2.0 * (m as f64).log2()))
}

const SUM_PATH_MAX_M: u32 = 30;

/// Noncoherent M-ASPM bit error probability at noncentrality `lambda`.
pub fn ber_noncoherent(lambda: f64, m: u32) -> Result<f64, AnalyticsError> {
    check_alphabet(m)?;
    check_lambda(lambda)?;
    let p = if m <= SUM_PATH_MAX_M {
        ber_noncoherent_sum(lambda, m)?
    } else {
        ber_noncoherent_integral(lambda, m)?
    };
    Ok(clamp_p(p))
}

/// Alternating binomial-sum form,
/// P_b = 1/(2(M-1)) * sum_{k=2}^{M} (-1)^k C(M,k) exp(-(k-1) lambda / (2k)),
/// evaluated in double-double arithmetic. Unclamped.
pub fn ber_noncoherent_sum(lambda: f64, m: u32) -> Result<f64, AnalyticsError> {
    // the dual-path agreement check runs this for every M >= 2, so unlike
    // ber_noncoherent this does not insist on a power of two
    if m < 2 {
        return Err(AnalyticsError::InvalidAlphabet(m));
    }
    check_lambda(lambda)?;
    let lambda_dd = Dd::from_f64(lambda);
    // binomial coefficients: C(m,2) first, then the ratio recurrence
    let mut binom = Dd::from_f64((m as f64) * (m as f64 - 1.0) / 2.0);
    let mut sum = Dd::ZERO;
    for k in 2..=m {
        if k > 2 {
            binom = binom.mul_f64((m - k + 1) as f64).div_f64(k as f64);
        }
        let expo = lambda_dd
            .mul_f64(-((k - 1) as f64))
            .div_f64(2.0 * k as f64);
        let term = binom.mul(expo.exp());
        sum = if k % 2 == 0 { sum.add(term) } else { sum.sub(term) };
    }
    Ok(sum.to_f64() / (2.0 * (m as f64 - 1.0)))
}

/// Integral form: P_s = integral of the noncentral chi-square density of
/// the correct-slot statistic times the probability that the best wrong
/// slot beats it, assembled as
/// P_s = int_0^inf (1/2) e^{-(sqrt(x)-sqrt(lambda))^2/2} i0e(sqrt(lambda x))
///       * [1 - (1 - e^{-x/2})^{M-1}] dx,
/// then P_b = M / (2(M-1)) * P_s. The bracket uses expm1/ln_1p so the
/// deep tail keeps relative accuracy. Unclamped.
pub fn ber_noncoherent_integral(lambda: f64, m: u32) -> Result<f64, AnalyticsError> {
    if m < 2 {
        return Err(AnalyticsError::InvalidAlphabet(m));
    }
    check_lambda(lambda)?;
    let m_minus_1 = (m - 1) as f64;
    let sqrt_l = lambda.sqrt();
    let integrand = move |x: f64| {
        if x <= 0.0 {
            return 0.5 * (-0.5 * lambda).exp();
        }
        let sx = x.sqrt();
        let gauss = (-0.5 * (sx - sqrt_l) * (sx - sqrt_l)).exp();
        let i0e = bessel_i0_scaled(sqrt_l * sx).expect("nonnegative argument");
        let lose = {
            let e = (-0.5 * x).exp();
            if e >= 1.0 {
                1.0
            } else {
                -(m_minus_1 * (-e).ln_1p()).exp_m1()
            }
        };
        0.5 * gauss * i0e * lose
    };
    let upper = lambda + 40.0 + 10.0 * (lambda + 1.0).sqrt();
    let spec = QuadratureSpec {
        abs_tol: 1e-280,
        rel_tol: 2e-12,
        max_subdivisions: 400,
        lower: 0.0,
        upper: UpperBound::Finite(upper),
    };
    let breaks = [lambda / 4.0, lambda / 2.0, lambda, 2.0 * lambda];
    let ps = integrate_segmented(integrand, &breaks, &spec)?.value;
    Ok(m as f64 / (2.0 * m_minus_1) * ps)
}

/// Probability of correctly detecting the arrival time of a coherent
/// bipolar pulse:
/// P(|X1| > max) = int_0^inf erf(x)^(M/2-1)
///                 * (1/sqrt(pi)) [e^{-(x+mu)^2} + e^{-(x-mu)^2}] dx.
/// Equals 2/M at mu = 0.
pub fn arrival_time_correct_prob(mu: f64, m: u32) -> Result<f64, AnalyticsError> {
    check_alphabet(m)?;
    check_mu(mu)?;
    let k = (m / 2 - 1) as f64;
    let integrand = move |x: f64| erf(x).max(0.0).powf(k) * folded_normal_density(x, mu);
    let r = integrate_segmented(
        integrand,
        &[0.25 * mu, 0.5 * mu, 0.75 * mu, mu],
        &arrival_spec(mu),
    )?;
    Ok(r.value)
}

fn check_mu(mu: f64) -> Result<(), AnalyticsError> {
    if !(mu >= 0.0) {
        return Err(AnalyticsError::InvalidParameter {
            what: "mu must be >= 0",
            value: mu,
        });
    }
    Ok(())
}

/// Density of |X| for X ~ N(mu, 1/2).
fn folded_normal_density(x: f64, mu: f64) -> f64 {
    let a = x + mu;
    let b = x - mu;
    std::f64::consts::FRAC_1_PI.sqrt() * ((-a * a).exp() + (-b * b).exp())
}

fn arrival_spec(mu: f64) -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-280,
        rel_tol: 2e-12,
        max_subdivisions: 400,
        lower: 0.0,
        upper: UpperBound::Finite(mu + 10.0),
    }
}

/// 1 - erf(x)^k with relative accuracy preserved when erf(x) is close
/// to one.
fn one_minus_erf_pow(x: f64, k: f64) -> f64 {
    if k == 0.0 {
        return 0.0;
    }
    let e = erf(x);
    if e <= 0.0 {
        return 1.0;
    }
    let ln_erf = if x > 0.5 { (-erfc(x)).ln_1p() } else { e.ln() };
    -(k * ln_erf).exp_m1()
}

/// Coherent bipolar M-ASPM bit error probability at noncentrality
/// `lambda` (so mu = sqrt(lambda/2)).
///
/// P_b = M/(2(M-1)) * [1 - (1/2)erfc(-mu) P(|X1| > max)] is rearranged as
/// q + D - qD with q = (1/2)erfc(mu) (polarity error) and
/// D = P(|X1| <= max) (arrival-time error), which avoids the cancellation
/// in 1 - (1-q)(1-D) and reduces to exactly (1/2)erfc(mu) at M = 2.
pub fn ber_coherent(lambda: f64, m: u32) -> Result<f64, AnalyticsError> {
    check_alphabet(m)?;
    check_lambda(lambda)?;
    let mu = (lambda / 2.0).sqrt();
    let q = 0.5 * erfc(mu);
    let d = arrival_time_error_prob(mu, m)?;
    let p = m as f64 / (2.0 * (m as f64 - 1.0)) * (q + d - q * d);
    Ok(clamp_p(p))
}

/// D = P(|X1| <= max of the M/2 - 1 wrong slots), the complement of the
/// arrival-time integral, computed directly so no unit cancellation
/// occurs in the tail.
fn arrival_time_error_prob(mu: f64, m: u32) -> Result<f64, AnalyticsError> {
    let k = (m / 2 - 1) as f64;
    if k == 0.0 {
        return Ok(0.0);
    }
    let integrand = move |x: f64| one_minus_erf_pow(x, k) * folded_normal_density(x, mu);
    let r = integrate_segmented(
        integrand,
        &[0.25 * mu, 0.5 * mu, 0.75 * mu, mu],
        &arrival_spec(mu),
    )?;
    Ok(r.value)
}

/// Coherent unipolar M-ASPM bit error probability (all M slots carry
/// amplitude +1):
/// P_b = (M/4) int_0^inf (2/sqrt(pi)) e^{-x^2} erf(x)^(M-2)
///       [erf(x+mu) + erf(x-mu)] dx.
pub fn ber_coherent_unipolar(lambda: f64, m: u32) -> Result<f64, AnalyticsError> {
    check_alphabet(m)?;
    check_lambda(lambda)?;
    let mu = (lambda / 2.0).sqrt();
    let k = (m - 2) as f64;
    let integrand = move |x: f64| {
        let w = 2.0 * std::f64::consts::FRAC_1_PI.sqrt() * (-x * x).exp();
        w * erf(x).max(0.0).powf(k) * erf_sum(x, mu)
    };
    let r = integrate_segmented(
        integrand,
        &[0.25 * mu, 0.5 * mu, 0.75 * mu, mu],
        &arrival_spec(mu),
    )?;
    Ok(clamp_p(0.25 * m as f64 * r.value))
}

/// erf(x + mu) + erf(x - mu) for x, mu >= 0 without cancellation: equal to
/// erfc(mu - x) - erfc(mu + x) when x < mu.
fn erf_sum(x: f64, mu: f64) -> f64 {
    if x >= mu {
        erf(x + mu) + erf(x - mu)
    } else {
        erfc(mu - x) - erfc(mu + x)
    }
}

/// Binary detection mode for the M = 2 closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryMode {
    Coherent,
    Noncoherent,
}

/// Binary ASPM bit error probability:
/// coherent (1/2) erfc(sqrt(N_p Gamma / 2)), noncoherent
/// (1/2) exp(-N_p Gamma / 4), both expressed through lambda = N_p Gamma.
pub fn ber_binary(lambda: f64, mode: BinaryMode) -> Result<f64, AnalyticsError> {
    check_lambda(lambda)?;
    let p = match mode {
        BinaryMode::Coherent => 0.5 * erfc((lambda / 2.0).sqrt()),
        BinaryMode::Noncoherent => 0.5 * (-lambda / 4.0).exp(),
    };
    Ok(clamp_p(p))
}

/// All analytic BER variants, as selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BerVariant {
    Coherent,
    Noncoherent,
    CoherentUnipolar,
    BinaryCoherent,
    BinaryNoncoherent,
}

/// Evaluate the analytic BER of `variant` at noncentrality `lambda`.
pub fn ber(variant: BerVariant, lambda: f64, m: u32) -> Result<f64, AnalyticsError> {
    match variant {
        BerVariant::Coherent => ber_coherent(lambda, m),
        BerVariant::Noncoherent => ber_noncoherent(lambda, m),
        BerVariant::CoherentUnipolar => ber_coherent_unipolar(lambda, m),
        BerVariant::BinaryCoherent => ber_binary(lambda, BinaryMode::Coherent),
        BerVariant::BinaryNoncoherent => ber_binary(lambda, BinaryMode::Noncoherent),
    }
}

/// Numerical check of the integration-by-parts identity behind the
/// binomial-sum BER: for integer k >= 1,
/// int_0^inf e^{-kx/2} d/dx Q1(sqrt(lambda), sqrt(x)) dx
///   = -1/(k+1) exp(-k lambda / (2(k+1))).
/// Returns (lhs by quadrature, rhs closed form, |lhs - rhs|).
pub fn verify_appendix_identity(lambda: f64, k: u32) -> Result<(f64, f64, f64), AnalyticsError> {
    check_lambda(lambda)?;
    if k < 1 {
        return Err(AnalyticsError::InvalidParameter {
            what: "k must be >= 1",
            value: k as f64,
        });
    }
    let sqrt_l = lambda.sqrt();
    let kf = k as f64;
    let integrand = move |x: f64| {
        let sx = x.max(0.0).sqrt();
        let gauss = (-0.5 * (sx - sqrt_l) * (sx - sqrt_l)).exp();
        let i0e = bessel_i0_scaled(sqrt_l * sx).expect("nonnegative argument");
        -0.5 * (-0.5 * kf * x).exp() * gauss * i0e
    };
    let upper = lambda + 40.0 + 10.0 * (lambda + 1.0).sqrt();
    let spec = QuadratureSpec {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_subdivisions: 400,
        lower: 0.0,
        upper: UpperBound::Finite(upper),
    };
    let lhs = integrate_segmented(integrand, &[lambda / 4.0, lambda, 2.0 * lambda], &spec)?.value;
    let rhs = -1.0 / (kf + 1.0) * (-kf * lambda / (2.0 * (kf + 1.0))).exp();
    Ok((lhs, rhs, (lhs - rhs).abs()))
}
