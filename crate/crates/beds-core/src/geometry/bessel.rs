//! Modified Bessel ratio `A(κ) = I₁(κ)/I₀(κ)` and its derivatives.
//!
//! Implemented in-house so results are deterministic across platforms.
//! Below the switchover the ratio is computed from the power series of
//! `I₀` and `I₁`; above it from a 12-term asymptotic expansion. The two
//! branches agree to better than 1e-10 at the switchover (see tests).

/// Branch switchover for [`bessel_ratio`].
const SWITCHOVER: f64 = 15.0;

/// Coefficients `c_k` of the asymptotic expansion `A(κ) ~ Σ c_k κ⁻ᵏ`,
/// obtained by formal division of the asymptotic series of `I₁` and `I₀`.
/// Exact values: 1, -1/2, -1/8, -1/8, -25/128, -13/32, -1073/1024,
/// -103/32, -375733/32768, -23797/512, -55384775/262144, -2180461/2048.
const ASYMPTOTIC: [f64; 12] = [
    1.0,
    -0.5,
    -0.125,
    -0.125,
    -0.195_312_5,
    -0.406_25,
    -1.047_851_562_5,
    -3.218_75,
    -11.466_461_181_640_625,
    -46.478_515_625,
    -211.276_149_749_755_86,
    -1_064.678_222_656_25,
];

/// `A(κ) = I₁(κ)/I₀(κ)`.
///
/// `A(0) = 0`, strictly increasing, `A(κ) → 1` as `κ → ∞`.
pub fn bessel_ratio(kappa: f64) -> f64 {
    debug_assert!(kappa >= 0.0, "bessel_ratio requires kappa >= 0");
    if kappa < SWITCHOVER {
        kappa * series_ratio_over_kappa(kappa)
    } else {
        asymptotic_ratio(kappa)
    }
}

/// `R(κ) = A(κ)/κ`, extended by its limit `R(0) = 1/2`.
///
/// Working with `R` instead of `A` keeps the von Mises metric components
/// free of 0/0 indeterminacy at `κ = 0`.
pub fn bessel_ratio_over_kappa(kappa: f64) -> f64 {
    debug_assert!(kappa >= 0.0);
    if kappa < SWITCHOVER {
        series_ratio_over_kappa(kappa)
    } else {
        asymptotic_ratio(kappa) / kappa
    }
}

/// Power-series branch: `R(κ) = I₁(κ)/(κ I₀(κ))` via the ratio of the two
/// ascending series. Both series share the argument `x = κ²/4`, so the
/// ratio is computed term by term without overflow for κ below the
/// switchover.
pub(crate) fn series_ratio_over_kappa(kappa: f64) -> f64 {
    let x = kappa * kappa / 4.0;
    // I0 = Σ xʲ/(j!)², I1/(κ/2) = Σ xʲ/(j!(j+1)!)
    let mut t0 = 1.0;
    let mut s0 = 1.0;
    let mut t1 = 1.0;
    let mut s1 = 1.0;
    let mut j = 1.0_f64;
    loop {
        t0 *= x / (j * j);
        t1 *= x / (j * (j + 1.0));
        s0 += t0;
        s1 += t1;
        if t0 < 1e-18 * s0 && t1 < 1e-18 * s1 {
            break;
        }
        j += 1.0;
        if j > 500.0 {
            break;
        }
    }
    0.5 * s1 / s0
}

/// Asymptotic branch, evaluated by Horner in `1/κ`.
pub(crate) fn asymptotic_ratio(kappa: f64) -> f64 {
    let u = 1.0 / kappa;
    let mut s = 0.0;
    for &c in ASYMPTOTIC.iter().rev() {
        s = s * u + c;
    }
    s
}

/// `A'(κ) = 1 - A(κ)² - A(κ)/κ`, the classical derivative identity for the
/// Bessel ratio. Extended by its limit `A'(0) = 1/2`.
pub fn bessel_ratio_derivative(kappa: f64) -> f64 {
    let r = bessel_ratio_over_kappa(kappa);
    1.0 - kappa * kappa * r * r - r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_argument() {
        assert_eq!(bessel_ratio(0.0), 0.0);
        assert_eq!(bessel_ratio_over_kappa(0.0), 0.5);
    }

    #[test]
    fn small_kappa_matches_truncated_series_oracle() {
        // Oracle: ratio of the two ascending series truncated to 8 terms.
        let oracle = |k: f64| {
            let x = k * k / 4.0;
            let mut i0 = 0.0;
            let mut i1 = 0.0;
            let mut fact = 1.0_f64;
            for j in 0..8 {
                let jf = j as f64;
                if j > 0 {
                    fact *= jf;
                }
                i0 += x.powi(j as i32) / (fact * fact);
                i1 += x.powi(j as i32) / (fact * fact * (jf + 1.0));
            }
            (k / 2.0) * i1 / i0
        };
        let a = bessel_ratio(0.1);
        assert!((a - oracle(0.1)).abs() < 1e-14, "A(0.1)={a}");
        assert!((a - 0.049_937_603_987_938_92).abs() < 1e-12);
    }

    #[test]
    fn large_kappa_matches_asymptotic_oracle() {
        // Two-term asymptotic oracle: 1 - 1/(2κ) - 1/(8κ²).
        let k = 100.0;
        let oracle = 1.0 - 1.0 / (2.0 * k) - 1.0 / (8.0 * k * k);
        assert!((bessel_ratio(k) - oracle).abs() < 1e-6);
        assert!((bessel_ratio(k) - 0.994_987_373_005_168_8).abs() < 1e-12);
    }

    #[test]
    fn switchover_continuity() {
        let jump = (series_ratio_over_kappa(SWITCHOVER) * SWITCHOVER
            - asymptotic_ratio(SWITCHOVER))
        .abs();
        assert!(jump <= 1e-10, "branch jump at switchover: {jump:.3e}");
    }

    #[test]
    fn monotone_and_bounded_on_grid() {
        let mut prev = -1.0;
        for i in 0..10_000 {
            let kappa = i as f64 * 0.02; // covers both branches up to 200
            let a = bessel_ratio(kappa);
            assert!((0.0..1.0).contains(&a), "A({kappa}) = {a} out of [0,1)");
            assert!(a > prev, "A not strictly increasing at kappa={kappa}");
            prev = a;
        }
    }

    #[test]
    fn derivative_identity_matches_central_differences() {
        for &kappa in &[0.3, 1.0, 3.0, 10.0, 20.0, 50.0] {
            let h = 1e-6 * (1.0 + kappa);
            let fd = (bessel_ratio(kappa + h) - bessel_ratio(kappa - h)) / (2.0 * h);
            let an = bessel_ratio_derivative(kappa);
            assert!(
                (fd - an).abs() < 1e-7 * (1.0 + an.abs()),
                "A'({kappa}): fd={fd} analytic={an}"
            );
        }
    }
}
