//! Standard-normal primitives and closed-form Gaussian integrals.
//!
//! Everything downstream (curve evaluation, L1 norms, stability constants,
//! moment fingerprints) reduces to the standard normal pdf `phi`, its cdf
//! `Phi`, and a handful of integrals of products and differences of shifted
//! cdfs that admit exact closed forms. Each closed form here has a
//! quadrature twin in the test suites; the closed forms are the canonical
//! evaluation path.

// The erfc coefficients below keep their published full-precision decimal
// expansions; each literal is bit-exact for the intended f64.
#![allow(clippy::excessive_precision)]

use thiserror::Error;

use crate::util::neumaier_sum;

/// 1/sqrt(2*pi).
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
/// 1/sqrt(pi); `sigma * FRAC_1_SQRT_PI` recurs in every stability constant.
pub const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Largest moment order accepted by [`normal_raw_moment`]. Keeps every
/// binomial/double-factorial term finite for |a| <= 1e3, sigma <= 1e2.
pub const MAX_MOMENT_ORDER: u32 = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GaussianError {
    #[error("moment order {requested} exceeds the cap {cap}")]
    OrderTooLarge { requested: u32, cap: u32 },
}

// ---------------------------------------------------------------------------
// erfc: rational approximations from FreeBSD msun s_erf.c (SunPro), the
// same evaluation scheme used by Go's math.Erfc. Max error below 1 ulp in
// each branch; tails saturate to exact 0/2 instead of subnormal noise.
// ---------------------------------------------------------------------------

const ERX: f64 = 8.450_629_115_104_675_3e-1;

// |x| < 0.84375
const PP0: f64 = 1.283_791_670_955_125_6e-1;
const PP1: f64 = -3.250_421_072_470_015e-1;
const PP2: f64 = -2.848_174_957_559_851e-2;
const PP3: f64 = -5.770_270_296_489_442e-3;
const PP4: f64 = -2.376_301_665_665_016_3e-5;
const QQ1: f64 = 3.979_172_239_591_553_4e-1;
const QQ2: f64 = 6.502_224_998_876_729e-2;
const QQ3: f64 = 5.081_306_281_875_766e-3;
const QQ4: f64 = 1.324_947_380_043_216_4e-4;
const QQ5: f64 = -3.960_228_278_775_368e-6;

// 0.84375 <= |x| < 1.25
const PA0: f64 = -2.362_118_560_752_659_4e-3;
const PA1: f64 = 4.148_561_186_837_483_3e-1;
const PA2: f64 = -3.722_078_760_357_013_3e-1;
const PA3: f64 = 3.183_466_199_011_617_5e-1;
const PA4: f64 = -1.108_946_942_823_966_8e-1;
const PA5: f64 = 3.547_830_432_561_823_6e-2;
const PA6: f64 = -2.166_375_594_868_791e-3;
const QA1: f64 = 1.064_208_804_008_442_3e-1;
const QA2: f64 = 5.403_979_177_021_710_3e-1;
const QA3: f64 = 7.182_865_441_419_627e-2;
const QA4: f64 = 1.261_712_198_087_616_4e-1;
const QA5: f64 = 1.363_708_391_202_905e-2;
const QA6: f64 = 1.198_449_984_679_910_7e-2;

// 1.25 <= |x| < 1/0.35
const RA0: f64 = -9.864_944_034_847_148e-3;
const RA1: f64 = -6.938_585_727_071_818e-1;
const RA2: f64 = -1.055_862_622_532_329_1e1;
const RA3: f64 = -6.237_533_245_032_600_6e1;
const RA4: f64 = -1.623_966_694_625_734_7e2;
const RA5: f64 = -1.846_050_929_067_110_4e2;
const RA6: f64 = -8.128_743_550_630_659e1;
const RA7: f64 = -9.814_329_344_169_145e0;
const SA1: f64 = 1.965_127_166_743_925_7e1;
const SA2: f64 = 1.376_577_541_435_190_4e2;
const SA3: f64 = 4.345_658_774_752_292_3e2;
const SA4: f64 = 6.453_872_717_332_679e2;
const SA5: f64 = 4.290_081_400_275_678_4e2;
const SA6: f64 = 1.086_350_055_417_794_4e2;
const SA7: f64 = 6.570_249_770_319_282e0;
const SA8: f64 = -6.042_441_521_485_81e-2;

// 1/0.35 <= |x| < 28
const RB0: f64 = -9.864_942_924_700_099e-3;
const RB1: f64 = -7.992_832_376_805_23e-1;
const RB2: f64 = -1.775_795_491_775_475_2e1;
const RB3: f64 = -1.606_363_848_558_219_2e2;
const RB4: f64 = -6.375_664_433_683_896e2;
const RB5: f64 = -1.025_095_131_611_077_2e3;
const RB6: f64 = -4.835_191_916_086_514e2;
const SB1: f64 = 3.033_806_074_348_246e1;
const SB2: f64 = 3.257_925_129_965_739e2;
const SB3: f64 = 1.536_729_586_084_437e3;
const SB4: f64 = 3.199_858_219_508_595_4e3;
const SB5: f64 = 2.553_050_406_433_164_3e3;
const SB6: f64 = 4.745_285_412_069_553_7e2;
const SB7: f64 = -2.244_095_244_658_582e1;

// 2^-56
const TINY: f64 = 1.387_778_780_781_445_7e-17;

/// Complementary error function, `erfc(x) = 1 - erf(x)`.
pub(crate) fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if x == f64::NEG_INFINITY {
        return 2.0;
    }
    let sign = x < 0.0;
    let x = x.abs();
    if x < 0.84375 {
        let temp = if x < TINY {
            x
        } else {
            let z = x * x;
            let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
            let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
            let y = r / s;
            if x < 0.25 {
                x + x * y
            } else {
                0.5 + (x * y + (x - 0.5))
            }
        };
        return if sign { 1.0 + temp } else { 1.0 - temp };
    }
    if x < 1.25 {
        let s = x - 1.0;
        let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
        let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
        return if sign {
            1.0 + ERX + p / q
        } else {
            1.0 - ERX - p / q
        };
    }
    if x < 28.0 {
        let s = 1.0 / (x * x);
        let (r, q) = if x < 1.0 / 0.35 {
            (
                RA0 + s
                    * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7)))))),
                1.0 + s
                    * (SA1
                        + s * (SA2
                            + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8))))))),
            )
        } else {
            if sign && x > 6.0 {
                return 2.0;
            }
            (
                RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6))))),
                1.0 + s
                    * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7)))))),
            )
        };
        // Split x into a 20-bit head to evaluate exp(-x*x - 0.5625 + R/Q)
        // without cancellation in the exponent.
        let z = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
        let r = f64::exp(-z * z - 0.5625) * f64::exp((z - x) * (z + x) + r / q);
        return if sign { 2.0 - r / x } else { r / x };
    }
    if sign {
        2.0
    } else {
        0.0
    }
}

/// Density of the standard normal distribution.
pub fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Cumulative distribution function of the standard normal distribution.
///
/// Absolute error stays below 1e-15 everywhere; deep tails saturate to
/// exact 0 and 1 rather than subnormal noise.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// `∫ Phi((b-t)/sigma) * Phi((t-b)/sigma) dt` over the whole line.
///
/// The value is `sigma / sqrt(pi)`, independent of the centering `b`.
pub fn cdf_product_integral(sigma: f64) -> f64 {
    assert!(sigma > 0.0, "sigma must be positive");
    sigma * FRAC_1_SQRT_PI
}

/// `∫ |Phi((t-d2)/sigma) - Phi((t-d)/sigma)| dt` over the whole line.
///
/// Equals `|d - d2|` for every positive bandwidth.
pub fn cdf_shift_l1(d: f64, d2: f64, sigma: f64) -> f64 {
    assert!(sigma > 0.0, "sigma must be positive");
    (d - d2).abs()
}

/// `∫ Phi(a*t + b1) * (Phi(a*t + b2) - Phi(a*t + b3)) dt` in closed form:
/// `(-sqrt(2)/a) * [v*Phi(v) + phi(v)]` evaluated between
/// `v = (b1-b3)/sqrt(2)` and `v = (b1-b2)/sqrt(2)`.
///
/// The closed form is valid for `a > 0`; every use in this crate has
/// `a = 1/sigma`.
pub fn cdf_diff_product_integral(a: f64, b1: f64, b2: f64, b3: f64) -> f64 {
    assert!(a != 0.0, "scale must be nonzero");
    let g = |v: f64| v * std_normal_cdf(v) + std_normal_pdf(v);
    let hi = (b1 - b2) * std::f64::consts::FRAC_1_SQRT_2;
    let lo = (b1 - b3) * std::f64::consts::FRAC_1_SQRT_2;
    (-std::f64::consts::SQRT_2 / a) * (g(hi) - g(lo))
}

/// Raw moment `E[X^n]` of `X ~ N(a, sigma^2)`:
/// sum over even `k <= n` of `C(n,k) * a^(n-k) * sigma^k * (k-1)!!`.
///
/// All terms share the sign of `a^(n-k)`, so compensated summation keeps
/// the relative error near machine precision.
pub fn normal_raw_moment(n: u32, a: f64, sigma: f64) -> Result<f64, GaussianError> {
    assert!(sigma > 0.0, "sigma must be positive");
    if n > MAX_MOMENT_ORDER {
        return Err(GaussianError::OrderTooLarge {
            requested: n,
            cap: MAX_MOMENT_ORDER,
        });
    }
    let mut terms = Vec::with_capacity(n as usize / 2 + 1);
    let mut binom = 1.0f64; // C(n, k) for the current even k
    let mut sig_pow = 1.0f64; // sigma^k
    let mut dfact = 1.0f64; // (k-1)!!
    let mut k = 0u32;
    loop {
        terms.push(binom * a.powi((n - k) as i32) * sig_pow * dfact);
        if k + 2 > n {
            break;
        }
        // advance k by 2: C(n,k+2) = C(n,k) * (n-k)(n-k-1) / ((k+1)(k+2))
        binom *= ((n - k) as f64) * ((n - k - 1) as f64) / (((k + 1) as f64) * ((k + 2) as f64));
        sig_pow *= sigma * sigma;
        dfact *= (k + 1) as f64;
        k += 2;
    }
    Ok(neumaier_sum(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, integrate_l1, QuadratureSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_close(got: f64, want: f64, tol: f64) {
        assert!(
            (got - want).abs() <= tol,
            "got {got}, want {want} (tol {tol})"
        );
    }

    fn assert_rel(got: f64, want: f64, rel: f64) {
        let scale = want.abs().max(1e-300);
        assert!(
            (got - want).abs() <= rel * scale,
            "got {got}, want {want} (rel {rel})"
        );
    }

    #[test]
    fn pdf_spot_values() {
        assert_close(std_normal_pdf(0.0), 0.3989422804014327, 1e-16);
        // cross-checked against a 50-digit arbitrary-precision evaluation
        assert_close(std_normal_pdf(1.0), 0.24197072451914337, 1e-16);
        assert_eq!(std_normal_pdf(1.0), std_normal_pdf(-1.0));
    }

    #[test]
    #[allow(clippy::approx_constant)] // 0.70710678 is the literal probe input, not 1/sqrt(2)
    fn cdf_spot_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        // erf-based arbitrary-precision oracle: Phi(1/sqrt(2))
        assert_close(std_normal_cdf(0.70710678), 0.7602499389, 5e-10);
        assert_close(std_normal_cdf(1.0), 0.8413447460685429, 1e-14);
        assert_close(std_normal_cdf(-1.0), 0.15865525393145705, 1e-14);
        // deep tails saturate
        assert_eq!(std_normal_cdf(-40.0), 0.0);
        assert_eq!(std_normal_cdf(40.0), 1.0);
        assert!(std_normal_cdf(-39.5) < 1e-300);
    }

    #[test]
    fn cdf_reflection_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..2000 {
            let x: f64 = rng.gen_range(-12.0..12.0);
            let lhs = std_normal_cdf(-x);
            let rhs = 1.0 - std_normal_cdf(x);
            assert_close(lhs, rhs, 1e-14);
        }
    }

    #[test]
    fn cdf_monotone_and_bounded() {
        let mut prev = 0.0;
        let mut x = -45.0;
        while x <= 45.0 {
            let v = std_normal_cdf(x);
            assert!((0.0..=1.0).contains(&v));
            assert!(v >= prev, "cdf must be nondecreasing at x={x}");
            prev = v;
            x += 0.083;
        }
    }

    #[test]
    #[allow(clippy::approx_constant)] // the expected values are frozen decimals of sigma/sqrt(pi)
    fn product_integral_closed_form() {
        assert_close(cdf_product_integral(1.0), 0.5641895835477563, 1e-16);
        assert_close(cdf_product_integral(2.0), 1.1283791670955126, 1e-15);
        assert_close(cdf_product_integral(0.5), 0.28209479177387814, 1e-16);
    }

    #[test]
    fn product_integral_matches_quadrature_including_nonpositive_b() {
        // The closed form is independent of b; hypothesis b > 0 is vestigial.
        let spec = QuadratureSpec::default();
        for &sigma in &[0.1, 0.5, 1.0, 2.0, 10.0] {
            for &b in &[-5.0, 0.0, 7.0] {
                let f = |t: f64| std_normal_cdf((b - t) / sigma) * std_normal_cdf((t - b) / sigma);
                let (lo, hi) = (b - 12.0 * sigma, b + 12.0 * sigma);
                let numeric = integrate(f, lo, hi, &spec).unwrap();
                assert_rel(numeric, cdf_product_integral(sigma), 1e-7);
            }
        }
    }

    #[test]
    fn shift_l1_examples() {
        assert_eq!(cdf_shift_l1(0.0, 1.0, 2.0), 1.0);
        assert_eq!(cdf_shift_l1(3.25, 3.25, 0.7), 0.0);
        assert_eq!(cdf_shift_l1(-3.0, 2.0, 0.1), 5.0);
    }

    #[test]
    fn shift_l1_matches_quadrature() {
        let spec = QuadratureSpec::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..40 {
            let d: f64 = rng.gen_range(-4.0..4.0);
            let d2: f64 = rng.gen_range(-4.0..4.0);
            let sigma: f64 = rng.gen_range(0.1..3.0);
            let f = |t: f64| std_normal_cdf((t - d2) / sigma) - std_normal_cdf((t - d) / sigma);
            let lo = d.min(d2) - 12.0 * sigma;
            let hi = d.max(d2) + 12.0 * sigma;
            let numeric = integrate_l1(f, lo, hi, &spec).unwrap();
            assert_close(
                numeric,
                cdf_shift_l1(d, d2, sigma),
                1e-7 * (1.0 + (d - d2).abs()),
            );
        }
    }

    #[test]
    fn diff_product_vanishes_when_limits_coincide() {
        assert_eq!(cdf_diff_product_integral(3.7, 1.2, 0.4, 0.4), 0.0);
    }

    #[test]
    fn diff_product_matches_quadrature_spot() {
        // a=1, b1=0, b2=0, b3=1
        let spec = QuadratureSpec::default();
        let f = |t: f64| std_normal_cdf(t) * (std_normal_cdf(t) - std_normal_cdf(t + 1.0));
        let numeric = integrate(f, -14.0, 14.0, &spec).unwrap();
        let closed = cdf_diff_product_integral(1.0, 0.0, 0.0, 1.0);
        assert_close(numeric, closed, 1e-8);
    }

    #[test]
    fn diff_product_matches_quadrature_random() {
        let spec = QuadratureSpec::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let a: f64 = rng.gen_range(0.1..10.0);
            let b1: f64 = rng.gen_range(-3.0..3.0);
            let b2: f64 = rng.gen_range(-3.0..3.0);
            let b3: f64 = rng.gen_range(-3.0..3.0);
            let f = |t: f64| {
                std_normal_cdf(a * t + b1)
                    * (std_normal_cdf(a * t + b2) - std_normal_cdf(a * t + b3))
            };
            // all three cdf arguments sweep [-12, 12] within these bounds
            let lo = (-12.0 - 3.0) / a;
            let hi = (12.0 + 3.0) / a;
            let numeric = integrate(f, lo, hi, &spec).unwrap();
            let closed = cdf_diff_product_integral(a, b1, b2, b3);
            let scale = closed.abs().max(1e-6);
            assert!(
                (numeric - closed).abs() <= 1e-7 * scale,
                "a={a} b=({b1},{b2},{b3}): quadrature {numeric} vs closed {closed}"
            );
        }
    }

    #[test]
    fn diff_product_reproduces_l1_norm_term() {
        // With a = 1/sigma and (b1,b2,b3) = (-b/sigma, -b/sigma, -d/sigma) the
        // closed form equals
        //   (d-b)*Phi((d-b)/(sqrt(2) sigma)) + sqrt(2) sigma phi(...) - sigma/sqrt(pi)
        let (b, d, sigma) = (0.0f64, 1.0f64, 1.0f64);
        let got = cdf_diff_product_integral(1.0 / sigma, -b / sigma, -b / sigma, -d / sigma);
        let x = (d - b) / (std::f64::consts::SQRT_2 * sigma);
        let want = (d - b) * std_normal_cdf(x)
            + std::f64::consts::SQRT_2 * sigma * std_normal_pdf(x)
            - cdf_product_integral(sigma);
        assert_close(got, want, 1e-14);
    }

    #[test]
    fn moment_spot_values() {
        assert_eq!(normal_raw_moment(1, 3.0, 2.0).unwrap(), 3.0);
        assert_eq!(normal_raw_moment(2, 0.0, 1.0).unwrap(), 1.0);
        // double-factorial term: 3!! = 3
        assert_eq!(normal_raw_moment(4, 0.0, 1.0).unwrap(), 3.0);
        assert_eq!(normal_raw_moment(0, 5.0, 3.0).unwrap(), 1.0);
    }

    #[test]
    fn moment_rejects_excessive_order() {
        assert_eq!(
            normal_raw_moment(65, 0.0, 1.0),
            Err(GaussianError::OrderTooLarge {
                requested: 65,
                cap: 64
            })
        );
    }

    #[test]
    fn moment_matches_three_term_recursion() {
        // m_n = a*m_{n-1} + (n-1)*sigma^2*m_{n-2}
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let a: f64 = rng.gen_range(-5.0..5.0);
            let sigma: f64 = rng.gen_range(0.1..4.0);
            let mut prev = 1.0f64; // m_0
            let mut cur = a; // m_1
            for n in 2..=24u32 {
                let next = a * cur + ((n - 1) as f64) * sigma * sigma * prev;
                prev = cur;
                cur = next;
                let closed = normal_raw_moment(n, a, sigma).unwrap();
                assert_rel(closed, cur, 1e-12);
            }
        }
    }
}
