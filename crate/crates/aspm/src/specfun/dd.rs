//! Double-double arithmetic (~31 significant digits).
//!
//! The alternating binomial sum for the noncoherent bit error rate cancels
//! catastrophically in plain f64 once the binomial coefficients grow past
//! ~1e6, so the sum is evaluated in double-double precision. Only the
//! handful of operations that sum needs are implemented.

use std::sync::OnceLock;

/// Unevaluated sum `hi + lo` of two doubles with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, other.hi);
        let s2 = s2 + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, other.hi);
        let p2 = p2 + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, b);
        let p2 = p2 + self.lo * b;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul_f64(q1));
        let q2 = r.hi / other.hi;
        let r = r.sub(other.mul_f64(q2));
        let q3 = r.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from_f64(q3))
    }

    #[inline]
    pub fn div_f64(self, b: f64) -> Dd {
        self.div(Dd::from_f64(b))
    }

    /// Scale by a power of two (exact).
    #[inline]
    fn ldexp(self, e: i32) -> Dd {
        let s = (2.0_f64).powi(e);
        Dd {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    /// exp(x), accurate to roughly 1e-30 relative for |x| <= 745.
    pub fn exp(self) -> Dd {
        let x = self;
        if x.hi < -745.0 {
            return Dd::ZERO;
        }
        let ln2 = ln2_dd();
        let m = (x.hi / ln2.hi).round();
        let r = x.sub(ln2.mul_f64(m));
        // Taylor series of exp(r) for |r| <= ln2/2
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for k in 1..=26 {
            term = term.mul(r).div_f64(k as f64);
            sum = sum.add(term);
            if term.hi.abs() < 1e-35 * sum.hi.abs() {
                break;
            }
        }
        sum.ldexp(m as i32)
    }
}

/// Parse a decimal string of the form `0.d...d` or `d.d...d` into a Dd.
///
/// Digits are accumulated exactly in double-double, then divided by the
/// appropriate power of ten, so the result is accurate to ~1e-32 relative.
pub(crate) fn dd_from_decimal(s: &str) -> Dd {
    let mut value = Dd::ZERO;
    let mut frac_digits = 0i32;
    let mut seen_point = false;
    for c in s.chars() {
        match c {
            '.' => seen_point = true,
            '0'..='9' => {
                value = value.mul_f64(10.0).add(Dd::from_f64((c as u8 - b'0') as f64));
                if seen_point {
                    frac_digits += 1;
                }
            }
            _ => panic!("invalid decimal literal: {s}"),
        }
    }
    let mut div = Dd::ONE;
    for _ in 0..frac_digits {
        div = div.mul_f64(10.0);
    }
    value.div(div)
}

/// ln 2 to double-double precision.
pub(crate) fn ln2_dd() -> Dd {
    static LN2: OnceLock<Dd> = OnceLock::new();
    *LN2.get_or_init(|| dd_from_decimal("0.693147180559945309417232121458176568075500134360255254120680"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln2_matches_atanh_series() {
        // ln 2 = 2 atanh(1/3) = 2 sum_k (1/3)^(2k+1) / (2k+1)
        let mut p = Dd::ONE.div_f64(3.0);
        let mut sum = Dd::ZERO;
        for k in 0..40 {
            sum = sum.add(p.div_f64((2 * k + 1) as f64));
            p = p.div_f64(9.0);
        }
        let ln2 = sum.mul_f64(2.0);
        let diff = ln2.sub(ln2_dd());
        assert!(diff.to_f64().abs() < 1e-30, "diff = {:e}", diff.to_f64());
    }

    #[test]
    fn exp_one_matches_reference_digits() {
        let e = Dd::ONE.exp();
        let reference = dd_from_decimal("2.718281828459045235360287471352662497757247093699959574966968");
        let rel = e.sub(reference).to_f64().abs() / reference.to_f64();
        assert!(rel < 1e-28, "rel = {rel:e}");
    }

    #[test]
    fn exp_agrees_with_f64_exp() {
        for &x in &[-30.0, -3.2, -0.4, 0.0, 0.7, 4.1, 24.9, 300.0] {
            let d = Dd::from_f64(x).exp().to_f64();
            let f = x.exp();
            assert!(
                (d - f).abs() <= 4.0 * f64::EPSILON * f.abs(),
                "x = {x}: dd {d:e} vs f64 {f:e}"
            );
        }
    }

    #[test]
    fn exp_underflow_is_zero() {
        assert_eq!(Dd::from_f64(-800.0).exp().to_f64(), 0.0);
    }

    #[test]
    fn sum_with_cancellation_keeps_extra_bits() {
        // (1e16 + 1) - 1e16 in Dd must recover 1 exactly.
        let a = Dd::from_f64(1e16).add(Dd::ONE);
        let b = a.sub(Dd::from_f64(1e16));
        assert_eq!(b.to_f64(), 1.0);
    }
}
