//! Stable subordinator D(t) and its inverse E(t): exact marginal sampling,
//! densities, and a renewal-count demonstrator for the heavy-tailed CTRW
//! limit.
//!
//! D(1) follows the normalized positive stable law with Laplace transform
//! E[e^{-s D(1)}] = e^{-s^beta}; marginals scale as D(t) = t^{1/beta} D(1)
//! and the inverse E(t) = inf{x : D(x) > t} satisfies
//! {E(t) <= x} = {D(x) >= t}, which gives the exact draw
//! E(t) = (t / D(1))^beta.

use std::f64::consts::PI;

use crate::accum;
use crate::error::{Error, Result};
use crate::quad;
use crate::rng::RngStream;
use crate::specfun;

/// Stability index; beta = 1 denotes the degenerate subordinator D(t) = t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableIndex {
    beta: f64,
}

impl StableIndex {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::Domain(format!("beta must be in (0,1], got {beta}")));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn require_strictly_stable(&self) -> Result<f64> {
        if self.beta >= 1.0 {
            return Err(Error::Domain(
                "density requires beta < 1 (beta = 1 is the unit drift)".into(),
            ));
        }
        Ok(self.beta)
    }
}

/// Sample count, mean, and standard error of the mean.
#[derive(Debug, Clone, Copy)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    pub std_error: f64,
}

impl SampleSummary {
    pub fn from_values(values: &[f64]) -> Self {
        let (mean, std_error) = accum::mean_and_stderr(values);
        Self {
            n: values.len(),
            mean,
            std_error,
        }
    }
}

/// One draw of D(1) via the exact one-uniform-one-exponential construction,
/// normalized so that E[e^{-s D(1)}] = e^{-s^beta}.
pub fn sample_stable(idx: StableIndex, stream: &mut RngStream) -> f64 {
    let beta = idx.beta();
    if beta >= 1.0 {
        return 1.0;
    }
    let u = stream.uniform_open01() * PI;
    let w = stream.exponential();
    let s1 = (beta * u).sin() / u.sin().powf(1.0 / beta);
    let s2 = (((1.0 - beta) * u).sin() / w).powf((1.0 - beta) / beta);
    s1 * s2
}

/// One draw of D(t) = t^{1/beta} D(1).
pub fn sample_stable_at(idx: StableIndex, t: f64, stream: &mut RngStream) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("time must be positive, got {t}")));
    }
    if idx.beta() >= 1.0 {
        return Ok(t);
    }
    Ok(t.powf(1.0 / idx.beta()) * sample_stable(idx, stream))
}

/// One draw of the inverse subordinator E(t) = (t / D(1))^beta.
pub fn sample_inverse(idx: StableIndex, t: f64, stream: &mut RngStream) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("time must be positive, got {t}")));
    }
    if idx.beta() >= 1.0 {
        return Ok(t);
    }
    Ok((t / sample_stable(idx, stream)).powf(idx.beta()))
}

/// Density of D(1) at x > 0.
///
/// beta = 1/2 uses the closed form (4 pi)^{-1/2} x^{-3/2} e^{-1/(4x)}; other
/// indices use the single-integral representation
///
/// ```text
/// f(x) = beta / ((1-beta) pi) x^{-1/(1-beta)} int_0^pi A(u) e^{-A(u) c} du,
/// c = x^{-beta/(1-beta)},
/// A(u) = [sin(beta u)/sin u]^{beta/(1-beta)} sin((1-beta) u)/sin u
/// ```
///
/// evaluated adaptively to relative error 1e-8.
pub fn stable_density(idx: StableIndex, x: f64) -> Result<f64> {
    let beta = idx.require_strictly_stable()?;
    if !(x > 0.0) {
        return Err(Error::Domain(format!("argument must be positive, got {x}")));
    }
    if beta == 0.5 {
        // essential singularity kills everything below ~1e-4
        if 1.0 / (4.0 * x) > 745.0 {
            return Ok(0.0);
        }
        return Ok((4.0 * PI).powf(-0.5) * x.powf(-1.5) * (-1.0 / (4.0 * x)).exp());
    }
    stable_density_integral(beta, x)
}

/// Integral-representation evaluation, also used to cross-check the
/// beta = 1/2 closed form.
pub(crate) fn stable_density_integral(beta: f64, x: f64) -> Result<f64> {
    let ratio = beta / (1.0 - beta);
    let c = x.powf(-ratio);
    if c > 1e290 {
        // e^{-A c} underflows for every u: the density is flat zero here
        return Ok(0.0);
    }
    if c < 1e-280 {
        // so deep in the tail that the one-term expansion is exact to f64:
        // f(x) ~ beta x^{-1-beta} / Gamma(1-beta)
        return Ok(beta * x.powf(-1.0 - beta) / specfun::gamma_unchecked(1.0 - beta));
    }
    let log_c = c.ln();
    let a_limit = beta.powf(ratio) * (1.0 - beta);
    let mut integrand = |u: f64| {
        if u < 1e-12 || u > PI - 1e-12 {
            return if u < 1e-12 {
                a_limit * (-a_limit * c).exp()
            } else {
                0.0
            };
        }
        let log_sin_u = u.sin().ln();
        let log_a = ratio * ((beta * u).sin().ln() - log_sin_u)
            + ((1.0 - beta) * u).sin().ln()
            - log_sin_u;
        let log_ac = log_a + log_c;
        if log_ac > 700.0 {
            return 0.0;
        }
        let ac = log_ac.exp();
        (log_a - ac).exp()
    };
    let q = quad::adaptive(&mut integrand, 0.0, PI, 1e-300, 1e-9, 16);
    let prefactor = ratio / PI * x.powf(-1.0 / (1.0 - beta));
    let value = prefactor * q.value;
    if q.abs_error > 1e-8 * q.value.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::Quadrature {
            context: "stable_density",
            achieved: q.abs_error / q.value.abs().max(f64::MIN_POSITIVE),
            budget: 1e-8,
        });
    }
    Ok(value)
}

/// Density of E(t) at l > 0:
/// f_{E(t)}(l) = (t/beta) f_{D(1)}(t l^{-1/beta}) l^{-1-1/beta}.
pub fn inverse_density(idx: StableIndex, t: f64, l: f64) -> Result<f64> {
    let beta = idx.require_strictly_stable()?;
    if !(t > 0.0) || !(l > 0.0) {
        return Err(Error::Domain(format!(
            "inverse_density requires t > 0 and l > 0, got t={t}, l={l}"
        )));
    }
    let arg = t * l.powf(-1.0 / beta);
    if !arg.is_finite() || arg > 1e290 {
        return Ok(0.0);
    }
    let tail = l.powf(-1.0 - 1.0 / beta);
    Ok(t / beta * stable_density(idx, arg)? * tail)
}

/// Rescaled renewal count c^{-beta} N(ct) for Pareto waiting times
/// J = U^{-1/beta} (so P(J > u) = u^{-beta} for u >= 1).
pub fn ctrw_count(
    idx: StableIndex,
    scale: f64,
    t: f64,
    stream: &mut RngStream,
    max_steps: u64,
) -> Result<f64> {
    let beta = idx.require_strictly_stable()?;
    if !(scale >= 1.0) {
        return Err(Error::Domain(format!("scale must be >= 1, got {scale}")));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("time must be positive, got {t}")));
    }
    let horizon = scale * t;
    let mut elapsed = 0.0;
    let mut count: u64 = 0;
    loop {
        elapsed += stream.uniform_open01().powf(-1.0 / beta);
        if elapsed > horizon {
            break;
        }
        count += 1;
        if count > max_steps {
            return Err(Error::Budget(format!(
                "ctrw renewal loop passed {max_steps} steps before reaching t = {t}"
            )));
        }
    }
    Ok(scale.powf(-beta) * count as f64)
}
