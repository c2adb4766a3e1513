//! Gamma and Mittag-Leffler kernels used by every other module.
//!
//! `mittag_leffler` evaluates M_beta(x) = sum_n x^n / Gamma(1 + beta n) on
//! the closed negative real axis with a requested relative tolerance. Two
//! regimes are combined: the power series (with an explicit cancellation
//! budget) for small |x|, and adaptive quadrature of the spectral
//! representation — the single-term case of [`crate::relax`] — beyond the
//! switch point, where the alternating series loses all precision.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::relax::{self, OperatorTerm};

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;

// Stirling series coefficients B_{2k} / (2k (2k-1)), k = 1..8; applied only
// for arguments >= 10 where the ninth term is below 2e-18.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

fn stirling_series(x: f64) -> f64 {
    let w = 1.0 / (x * x);
    let mut s = STIRLING[7];
    for k in (0..7).rev() {
        s = s * w + STIRLING[k];
    }
    s / x
}

/// Gamma function on (0, 171), relative error below 1e-13.
///
/// Arguments are shifted up to [10, 11) by the recurrence and finished with
/// the Stirling form; the large power is split so intermediate factors stay
/// inside f64 range.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || x >= 171.0 || !x.is_finite() {
        return Err(Error::Domain(format!(
            "gamma_fn requires 0 < x < 171, got {x}"
        )));
    }
    Ok(gamma_unchecked(x))
}

pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    if x < 10.0 {
        // Gamma(x) = Gamma(x + n) / (x (x+1) ... (x+n-1))
        let n = (10.0 - x).ceil() as usize;
        let mut denom = 1.0;
        for k in 0..n {
            denom *= x + k as f64;
        }
        return gamma_unchecked(x + n as f64) / denom;
    }
    let correction = stirling_series(x).exp();
    let exponent = (x - 0.5) * x.ln();
    let sqrt_two_pi = (2.0 * PI).sqrt();
    if exponent - x < 700.0 {
        x.powf(x - 0.5) * (-x).exp() * sqrt_two_pi * correction
    } else {
        // split the power so neither factor overflows
        let half = x.powf(0.5 * (x - 0.5));
        let damp = (-0.5 * x).exp();
        (half * damp) * (half * damp) * sqrt_two_pi * correction
    }
}

/// Natural log of Gamma(x) for x > 0, used where Gamma itself would
/// overflow (series term estimates, switch-point scans).
pub(crate) fn lgamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 10.0 {
        let n = (10.0 - x).ceil() as usize;
        let mut log_denom = 0.0;
        for k in 0..n {
            log_denom += (x + k as f64).ln();
        }
        return lgamma(x + n as f64) - log_denom;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_TWO_PI + stirling_series(x)
}

/// A Mittag-Leffler evaluation request on the negative real axis.
#[derive(Debug, Clone, Copy)]
pub struct MlQuery {
    beta: f64,
    x: f64,
    rel_tol: f64,
}

impl MlQuery {
    /// Checks 0 < beta <= 1, x <= 0 and 0 < rel_tol < 1e-3.
    pub fn new(beta: f64, x: f64, rel_tol: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::Domain(format!("beta must be in (0,1], got {beta}")));
        }
        if !(x <= 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!("argument must be <= 0, got {x}")));
        }
        if !(rel_tol > 0.0 && rel_tol < 1e-3) {
            return Err(Error::Domain(format!(
                "rel_tol must lie in (0, 1e-3), got {rel_tol}"
            )));
        }
        Ok(Self { beta, x, rel_tol })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }
}

/// M_beta(x) for x <= 0. Result lies in (0, 1]; relative error is at most
/// `q.rel_tol` or an [`Error::Convergence`] reports what was achieved.
pub fn mittag_leffler(q: &MlQuery) -> Result<f64> {
    let MlQuery { beta, x, rel_tol } = *q;
    if x == 0.0 {
        return Ok(1.0);
    }
    if beta == 1.0 {
        // M_1(x) = e^x exactly (Gamma(1+n) = n!)
        return Ok(x.exp());
    }
    let switch = ml_switch(beta, rel_tol);
    let (first, second): (
        fn(f64, f64, f64) -> (f64, f64),
        fn(f64, f64, f64) -> (f64, f64),
    ) = if -x <= switch {
        (ml_series, ml_integral)
    } else {
        (ml_integral, ml_series)
    };
    let (value, achieved) = first(beta, x, rel_tol);
    if achieved <= rel_tol {
        return Ok(value.min(1.0));
    }
    let (value2, achieved2) = second(beta, x, rel_tol);
    if achieved2 <= rel_tol {
        return Ok(value2.min(1.0));
    }
    Err(Error::Convergence {
        context: "mittag_leffler",
        achieved: achieved.min(achieved2),
        requested: rel_tol,
    })
}

/// Largest |x| the power series is allowed to handle at this tolerance.
///
/// The series is admissible while its largest intermediate term stays below
/// `budget` times the result magnitude, where `budget` caps the summation
/// cancellation at a tenth of `rel_tol` (and never exceeds 1e12), and while
/// the term count stays well under the hard cap.
pub fn ml_switch(beta: f64, rel_tol: f64) -> f64 {
    if beta >= 1.0 {
        return f64::INFINITY;
    }
    let budget = (rel_tol / (100.0 * f64::EPSILON)).min(1e12).max(1.0);
    let log_budget = budget.ln();
    let gamma_tail = gamma_unchecked(1.0 - beta);
    let mut good = 0.25;
    let mut x = 0.25;
    while x <= 80.0 {
        // estimated result magnitude: min(1, leading asymptotic term)
        let log_est = (1.0 / (x * gamma_tail)).min(1.0).ln();
        // series peak near n* where (beta n)^beta ~ x
        let n_peak = ((x.powf(1.0 / beta) - 1.0) / beta).max(0.0);
        if n_peak > 2000.0 {
            break;
        }
        let log_max_term = if n_peak < 1.0 {
            0.0
        } else {
            n_peak * x.ln() - lgamma(1.0 + beta * n_peak)
        };
        if log_max_term > log_budget + log_est {
            break;
        }
        good = x;
        x += 0.25;
    }
    good
}

/// Power-series evaluation. Returns (value, achieved relative error); the
/// estimate combines the first omitted term with the cancellation floor.
/// Exposed so the regime handover can be cross-checked directly.
pub fn ml_series(beta: f64, x: f64, rel_tol: f64) -> (f64, f64) {
    debug_assert!(x <= 0.0);
    if x == 0.0 {
        return (1.0, 0.0);
    }
    let log_ax = (-x).ln();
    let mut sum = 1.0_f64; // n = 0 term
    let mut max_term = 1.0_f64;
    let mut prev = 1.0_f64;
    let mut omitted = f64::INFINITY;
    let mut terms = 1.0_f64;
    for n in 1..10_000_u32 {
        let nf = f64::from(n);
        let magnitude = (nf * log_ax - lgamma(1.0 + beta * nf)).exp();
        let term = if n % 2 == 0 { magnitude } else { -magnitude };
        sum += term;
        terms += 1.0;
        max_term = max_term.max(magnitude);
        let decreasing = magnitude <= prev;
        prev = magnitude;
        if decreasing && magnitude < 0.1 * rel_tol * sum.abs() {
            omitted = magnitude;
            break;
        }
    }
    let scale = sum.abs().max(f64::MIN_POSITIVE);
    let cancellation = f64::EPSILON * max_term * terms.sqrt() / scale;
    let achieved = omitted / scale + cancellation;
    (sum, achieved)
}

/// Quadrature of the spectral representation (the shared relaxation kernel
/// with a single unit-weight term at t = 1). Returns (value, achieved
/// relative error). Exposed so the regime handover can be cross-checked.
pub fn ml_integral(beta: f64, x: f64, rel_tol: f64) -> (f64, f64) {
    debug_assert!(x < 0.0 && beta < 1.0);
    let lambda = -x;
    let terms = [OperatorTerm {
        order: beta,
        weight: 1.0,
    }];
    let q = relax::h_relaxation(&terms, 1.0, lambda, 1e-300, 0.2 * rel_tol);
    let scale = q.value.abs().max(f64::MIN_POSITIVE);
    (q.value, q.abs_error / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn gamma_trivial_values() {
        assert!((gamma_fn(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(rel(gamma_fn(0.5).unwrap(), SQRT_PI) < 1e-14);
        assert!(rel(gamma_fn(5.0).unwrap(), 24.0) < 1e-14);
    }

    #[test]
    fn gamma_against_high_precision_references() {
        // 30-digit references
        let cases = [
            (0.001, 999.423_772_484_595_466_1),
            (0.1, 9.513_507_698_668_731_836),
            (0.25, 3.625_609_908_221_908_312),
            (0.75, 1.225_416_702_465_177_645),
            (1.5, 0.886_226_925_452_758_013_6),
            (2.5, 1.329_340_388_179_137_02),
            (10.5, 1_133_278.388_948_785_567),
            (33.7, 3.032_162_654_739_841_602e36),
            (99.9, 5.891_732_151_644_361_657e155),
            (170.5, 5.562_092_414_559_999_611e305),
        ];
        for (x, want) in cases {
            let got = gamma_fn(x).unwrap();
            assert!(rel(got, want) < 1e-13, "x={x}: got {got}, want {want}");
        }
    }

    #[test]
    fn gamma_rejects_out_of_domain() {
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.0).is_err());
        assert!(gamma_fn(171.0).is_err());
        assert!(gamma_fn(f64::NAN).is_err());
    }

    #[test]
    fn lgamma_against_references() {
        let cases = [
            (0.001, 6.907_178_885_383_853_683),
            (0.37, 0.876_946_819_484_879_289_9),
            (12.34, 18.337_787_022_900_233),
            (500.0, 2_605.115_850_361_733_893),
            (25_000.0, 228_161.633_222_573_057_9),
        ];
        for (x, want) in cases {
            let got = lgamma(x);
            assert!(
                (got - want).abs() < 1e-10 * want.abs().max(1.0),
                "x={x}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn ml_query_validation() {
        assert!(MlQuery::new(0.5, -1.0, 1e-8).is_ok());
        assert!(MlQuery::new(0.0, -1.0, 1e-8).is_err());
        assert!(MlQuery::new(1.1, -1.0, 1e-8).is_err());
        assert!(MlQuery::new(0.5, 0.5, 1e-8).is_err());
        assert!(MlQuery::new(0.5, -1.0, 1e-3).is_err());
        assert!(MlQuery::new(0.5, -1.0, 0.0).is_err());
    }

    #[test]
    fn ml_at_zero_is_exactly_one() {
        for beta in [0.1, 0.3, 0.5, 0.7, 0.9, 1.0] {
            let q = MlQuery::new(beta, 0.0, 1e-10).unwrap();
            assert_eq!(mittag_leffler(&q).unwrap(), 1.0);
        }
    }

    #[test]
    fn ml_order_one_is_exponential() {
        let q = MlQuery::new(1.0, -1.0, 1e-10).unwrap();
        assert!(rel(mittag_leffler(&q).unwrap(), (-1.0_f64).exp()) < 1e-12);
    }

    #[test]
    fn ml_half_against_erfc_identity_values() {
        // M_{1/2}(-y) = e^{y^2} erfc(y); frozen high-precision references
        let cases = [
            (-1.0, 0.427_583_576_155_807),
            (-2.0, 0.255_395_676_310_505_744),
            (-5.0, 0.110_704_637_733_068_626),
        ];
        for (x, want) in cases {
            let q = MlQuery::new(0.5, x, 1e-9).unwrap();
            let got = mittag_leffler(&q).unwrap();
            assert!(rel(got, want) < 1e-9, "x={x}: got {got}, want {want}");
        }
    }

    #[test]
    fn ml_half_deep_asymptotic_argument() {
        // quadrature reference for x = -1e6 (leading term 1/(1e6 sqrt(pi)))
        let q = MlQuery::new(0.5, -1e6, 1e-9).unwrap();
        let got = mittag_leffler(&q).unwrap();
        assert!(rel(got, 5.641_895_835_474_743_09e-7) < 1e-8, "got {got}");
    }

    #[test]
    fn ml_monotone_and_bounded_on_log_grid() {
        for beta in [0.3, 0.5, 0.8] {
            let mut last = 1.0 + 1e-12;
            for i in 0..50 {
                let y = 10f64.powf(-6.0 + 14.0 * i as f64 / 49.0);
                let q = MlQuery::new(beta, -y, 1e-9).unwrap();
                let v = mittag_leffler(&q).unwrap();
                assert!(v > 0.0 && v <= 1.0, "beta={beta} y={y} v={v}");
                assert!(v < last, "not decreasing at beta={beta} y={y}");
                last = v;
            }
        }
    }

    #[test]
    fn regime_switch_continuity() {
        for beta in [0.3, 0.5, 0.7, 0.9] {
            let rel_tol = 1e-9;
            let switch = ml_switch(beta, rel_tol);
            let x = -switch;
            let (series, err_s) = ml_series(beta, x, rel_tol);
            let (integral, err_i) = ml_integral(beta, x, rel_tol);
            assert!(err_s <= rel_tol, "series err {err_s} at beta={beta}");
            assert!(err_i <= rel_tol, "integral err {err_i} at beta={beta}");
            assert!(
                (series - integral).abs() <= 10.0 * rel_tol * series.abs(),
                "beta={beta} switch={switch}: series={series} integral={integral}"
            );
        }
    }

    proptest! {
        #[test]
        fn ml_stays_in_unit_interval(beta in 0.05f64..1.0, logy in -4.0f64..4.0) {
            let q = MlQuery::new(beta, -(10f64.powf(logy)), 1e-7).unwrap();
            let v = mittag_leffler(&q).unwrap();
            prop_assert!(v > 0.0 && v <= 1.0);
        }
    }
}
