//! Relaxation function h(t, lambda) for weighted sums of Caputo derivatives.
//!
//! For an operator L = sum_i gamma_i d^{beta_i}/dt^{beta_i} with gamma_i > 0
//! and beta_i in (0,1), the solution of L h = -lambda h, h(0) = 1 has the
//! real-axis inverse-Laplace representation
//!
//! ```text
//! h(t, lambda) = (lambda/pi) int_0^inf r^-1 e^{-tr} S(r) / [(lambda + C(r))^2 + S(r)^2] dr
//! S(r) = sum_i gamma_i r^{beta_i} sin(pi beta_i)
//! C(r) = sum_i gamma_i r^{beta_i} cos(pi beta_i)
//! ```
//!
//! A single term with gamma = 1 recovers the Mittag-Leffler relaxation
//! M_beta(-lambda t^beta), so one quadrature kernel serves both `specfun`
//! and `distorder`. The integrand is smooth and strictly positive on
//! (0, inf); S > 0 keeps the denominator away from zero even where
//! lambda + C changes sign.

use std::f64::consts::PI;

use crate::quad::{self, Quadrature};

/// One Caputo term of the operator: order in (0,1) and positive weight.
#[derive(Debug, Clone, Copy)]
pub(crate) struct OperatorTerm {
    pub order: f64,
    pub weight: f64,
}

/// Evaluate h(t, lambda) by adaptive quadrature with the given error targets.
/// `abs_tol`/`rel_tol` bound the reported `Quadrature::abs_error`.
pub(crate) fn h_relaxation(
    terms: &[OperatorTerm],
    t: f64,
    lambda: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Quadrature {
    debug_assert!(t > 0.0 && lambda > 0.0);
    let parts: Vec<(f64, f64, f64)> = terms
        .iter()
        .map(|term| {
            let angle = PI * term.order;
            (
                term.order,
                term.weight * angle.sin(),
                term.weight * angle.cos(),
            )
        })
        .collect();
    let scale = lambda / PI;

    let mut integrand = |r: f64| {
        if t * r > 745.0 {
            return 0.0;
        }
        let mut s = 0.0;
        let mut c = 0.0;
        for &(order, ws, wc) in &parts {
            let rb = r.powf(order);
            s += ws * rb;
            c += wc * rb;
        }
        let shifted = lambda + c;
        let denom = shifted * shifted + s * s;
        scale * (-t * r).exp() / r * s / denom
    };
    quad::integrate_half_line(&mut integrand, abs_tol, rel_tol)
}
