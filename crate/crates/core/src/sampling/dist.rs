//! Inverse CDFs and the special functions behind them.
//!
//! Everything here is self-contained f64 numerics: the standard normal
//! quantile is Acklam's rational approximation polished with one Halley step
//! against an erfc-based CDF, and the Poisson quantile is cumulative
//! summation of the pmf with a Cornish-Fisher starting guess once the rate is
//! too large for a scan from zero.

use super::SamplingError;

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Complementary error function, |relative error| around 1e-15.
///
/// Maclaurin series below 1.5, Lentz continued fraction above.
pub(crate) fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 1.5 {
        return 1.0 - erf_series(x);
    }
    // erfc(x) = exp(-x^2)/sqrt(pi) / F, F the continued fraction
    // x + (1/2)/(x + 1/(x + (3/2)/(x + ...))), via modified Lentz.
    let mut f = x;
    let mut c = f;
    let mut d = 0.0;
    let mut n = 1u32;
    loop {
        let a = f64::from(n) / 2.0;
        d = x + a * d;
        d = tiny_guard(d).recip();
        c = x + a / c;
        c = tiny_guard(c);
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-15 || n > 300 {
            break;
        }
        n += 1;
    }
    (-x * x).exp() * FRAC_1_SQRT_PI / f
}

fn tiny_guard(v: f64) -> f64 {
    if v.abs() < 1e-300 {
        1e-300
    } else {
        v
    }
}

/// erf by its Maclaurin series; adequate for |x| < 1.5 where cancellation
/// stays mild.
fn erf_series(x: f64) -> f64 {
    let z2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0u32;
    loop {
        n += 1;
        let nf = f64::from(n);
        term *= -z2 / nf;
        let contrib = term / (2.0 * nf + 1.0);
        sum += contrib;
        if contrib.abs() < sum.abs() * 1e-16 || n > 120 {
            break;
        }
    }
    sum * 2.0 * FRAC_1_SQRT_PI
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal quantile.
///
/// Monotone in `p`, antisymmetric about `p = 0.5`; absolute error is bounded
/// well inside 1e-8 over the whole open interval.
pub fn normal_inv_cdf(p: f64) -> Result<f64, SamplingError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(SamplingError::ProbabilityOutOfRange(p));
    }
    let x0 = acklam(p);
    // One Halley iteration takes the rational approximation to close to
    // machine precision. Skipped if the density underflows in the far tail.
    let pdf = normal_pdf(x0);
    if pdf > 0.0 && pdf.is_finite() {
        let u = (normal_cdf(x0) - p) / pdf;
        let x1 = x0 - u / (1.0 + x0 * u / 2.0);
        if x1.is_finite() {
            return Ok(x1);
        }
    }
    Ok(x0)
}

/// Acklam's rational approximation to the normal quantile
/// (|relative error| < 1.15e-9).
fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -39.696_830_286_653_76,
        220.946_098_424_521,
        -275.928_510_446_969,
        138.357_751_867_269,
        -30.664_798_066_147_2,
        2.506_628_277_459_24,
    ];
    const B: [f64; 5] = [
        -54.476_098_798_224_1,
        161.585_836_858_041,
        -155.698_979_859_887,
        66.801_311_887_719_7,
        -13.280_681_552_885_7,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_29e-3,
        -0.322_396_458_041_136,
        -2.400_758_277_161_84,
        -2.549_732_539_343_73,
        4.374_664_141_464_97,
        2.938_163_982_698_78,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_46e-3,
        0.322_467_129_070_04,
        2.445_134_137_143,
        3.754_408_661_907_42,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// ln Γ(x) for x > 0, Lanczos approximation (g = 7, 9 terms).
pub(crate) fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
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
    debug_assert!(x > 0.0);
    let z = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

// Above this rate exp(-lambda) underflows the scan-from-zero path.
const POISSON_SCAN_LIMIT: f64 = 700.0;

/// Smallest integer k with `CDF(k; lambda) >= p`.
pub fn poisson_inv_cdf(p: f64, lambda: f64) -> Result<u64, SamplingError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(SamplingError::ProbabilityOutOfRange(p));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(SamplingError::RateOutOfRange(lambda));
    }
    if lambda <= POISSON_SCAN_LIMIT {
        return Ok(poisson_scan_up(p, lambda));
    }
    Ok(poisson_from_guess(p, lambda))
}

fn poisson_upper_bound(lambda: f64) -> u64 {
    (lambda + 50.0 * lambda.sqrt() + 200.0) as u64
}

fn poisson_scan_up(p: f64, lambda: f64) -> u64 {
    let bound = poisson_upper_bound(lambda);
    let mut pmf = (-lambda).exp();
    let mut cdf = pmf;
    let mut k = 0u64;
    while cdf < p && k < bound {
        k += 1;
        pmf *= lambda / k as f64;
        cdf += pmf;
    }
    k
}

/// Cornish-Fisher starting guess, then local pmf summation around it.
fn poisson_from_guess(p: f64, lambda: f64) -> u64 {
    let z = normal_inv_cdf(p).expect("p validated");
    let guess = lambda + lambda.sqrt() * z + (z * z - 1.0) / 6.0;
    let mut k = guess.max(0.0).floor() as u64;
    let bound = poisson_upper_bound(lambda);
    k = k.min(bound);

    let ln_pmf_k = k as f64 * lambda.ln() - lambda - ln_gamma(k as f64 + 1.0);
    let mut pmf = ln_pmf_k.exp();
    // CDF(k): sum downward until terms stop mattering.
    let mut cdf = pmf;
    {
        let mut t = pmf;
        let mut j = k;
        while j > 0 {
            t *= j as f64 / lambda;
            cdf += t;
            j -= 1;
            if t < cdf * 1e-18 {
                break;
            }
        }
    }
    if cdf >= p {
        // Walk down while the predecessor still satisfies the inequality.
        while k > 0 && cdf - pmf >= p {
            cdf -= pmf;
            pmf *= k as f64 / lambda;
            k -= 1;
        }
    } else {
        while cdf < p && k < bound {
            k += 1;
            pmf *= lambda / k as f64;
            cdf += pmf;
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent CDF oracle: composite Simpson integration of the standard
    /// normal density from 0 to |x|, 40 panels per unit.
    fn cdf_oracle(x: f64) -> f64 {
        let a = x.abs();
        let n = ((a * 40.0).ceil() as usize).max(8) * 2;
        let h = a / n as f64;
        let f = |t: f64| (-0.5 * t * t).exp();
        let mut s = f(0.0) + f(a);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(h * i as f64);
        }
        let half = s * h / 3.0 / (2.0 * std::f64::consts::PI).sqrt();
        if x >= 0.0 {
            0.5 + half
        } else {
            0.5 - half
        }
    }

    /// Independent Poisson CDF: direct cumulative pmf summation with
    /// factorials from a plain ln-sum.
    fn poisson_quantile_oracle(p: f64, lambda: f64) -> u64 {
        let mut ln_fact = 0.0;
        let mut cdf = 0.0;
        for k in 0..2_000_000u64 {
            if k > 0 {
                ln_fact += (k as f64).ln();
            }
            cdf += (k as f64 * lambda.ln() - lambda - ln_fact).exp();
            if cdf >= p {
                return k;
            }
        }
        unreachable!("oracle did not reach p");
    }

    #[test]
    fn quantile_at_half_is_zero() {
        assert_eq!(normal_inv_cdf(0.5).unwrap(), 0.0);
    }

    #[test]
    fn quantile_known_points() {
        assert!((normal_inv_cdf(0.975).unwrap() - 1.959_963_985).abs() < 1e-8);
        assert!((normal_inv_cdf(0.0013499).unwrap() - (-3.0)).abs() < 1e-4);
    }

    #[test]
    fn quantile_round_trip_on_grid() {
        let mut x = -6.0;
        while x <= 6.0 {
            let p = cdf_oracle(x);
            let z = normal_inv_cdf(p).unwrap();
            assert!(
                (z - x).abs() <= 1e-6,
                "x={x} p={p} z={z} err={}",
                (z - x).abs()
            );
            x += 0.0625;
        }
    }

    #[test]
    fn quantile_antithetic_mean_is_zero() {
        for &p in &[1e-12, 1e-6, 0.0013499, 0.02425, 0.1, 0.3, 0.49, 0.499999] {
            let a = normal_inv_cdf(p).unwrap();
            let b = normal_inv_cdf(1.0 - p).unwrap();
            assert!(
                (0.5 * (a + b)).abs() <= 1e-12,
                "p={p} a={a} b={b} mean={}",
                0.5 * (a + b)
            );
        }
    }

    #[test]
    fn quantile_monotone() {
        let mut prev = f64::NEG_INFINITY;
        for i in 1..2000 {
            let p = i as f64 / 2000.0;
            let z = normal_inv_cdf(p).unwrap();
            assert!(z >= prev);
            prev = z;
        }
    }

    #[test]
    fn quantile_rejects_out_of_range() {
        for p in [0.0, 1.0, -0.5, 2.0, f64::NAN] {
            assert!(normal_inv_cdf(p).is_err());
        }
    }

    #[test]
    fn quantile_finite_in_extreme_tails() {
        let lo = normal_inv_cdf(1e-300).unwrap();
        assert!(lo.is_finite() && lo < -37.0);
        let hi = normal_inv_cdf(1.0 - 1e-14).unwrap();
        assert!(hi.is_finite() && hi > 7.0);
    }

    #[test]
    fn erfc_matches_simpson_cdf() {
        for i in -24..=24 {
            let x = i as f64 / 4.0;
            let got = normal_cdf(x);
            let want = cdf_oracle(x);
            assert!((got - want).abs() < 1e-12, "x={x} got={got} want={want}");
        }
    }

    #[test]
    fn poisson_examples() {
        assert_eq!(poisson_inv_cdf(0.36, 1.0).unwrap(), 0);
        assert_eq!(poisson_inv_cdf(0.37, 1.0).unwrap(), 1);
        assert_eq!(poisson_inv_cdf(0.5, 100.0).unwrap(), 100);
    }

    #[test]
    fn poisson_matches_oracle_across_rates() {
        for &lambda in &[0.3, 1.0, 4.5, 100.0, 650.0, 701.0, 1200.0] {
            for &p in &[1e-6, 0.025, 0.37, 0.5, 0.77, 0.975, 1.0 - 1e-9] {
                assert_eq!(
                    poisson_inv_cdf(p, lambda).unwrap(),
                    poisson_quantile_oracle(p, lambda),
                    "lambda={lambda} p={p}"
                );
            }
        }
    }

    #[test]
    fn poisson_monotone_in_p() {
        let lambda = 7.3;
        let mut prev = 0u64;
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            let k = poisson_inv_cdf(p, lambda).unwrap();
            assert!(k >= prev);
            prev = k;
        }
    }

    #[test]
    fn poisson_rejects_bad_arguments() {
        assert!(poisson_inv_cdf(0.0, 1.0).is_err());
        assert!(poisson_inv_cdf(1.0, 1.0).is_err());
        assert!(poisson_inv_cdf(0.5, 0.0).is_err());
        assert!(poisson_inv_cdf(0.5, -1.0).is_err());
        assert!(poisson_inv_cdf(0.5, f64::INFINITY).is_err());
    }

    #[test]
    fn ln_gamma_factorials() {
        let mut f = 1.0f64;
        for n in 1..20u32 {
            if n > 1 {
                f *= f64::from(n - 1);
            }
            assert!((ln_gamma(f64::from(n)) - f.ln()).abs() < 1e-10);
        }
    }
}
