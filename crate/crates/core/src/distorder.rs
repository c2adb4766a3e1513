//! Distributed-order machinery: order measures on (0,1), their Laplace
//! exponent and Levy tail, the relaxation function h(t, lambda) of the
//! weighted Caputo operator, and the composite subordinator W with its
//! inverse.
//!
//! An [`OrderMeasure`] carries a finite atom list and/or a continuous
//! density with a fixed quadrature rule. Atom weights are the jump weights
//! of the operator itself, while the density enters through its
//! order-distribution profile, so the operator reads
//!
//! ```text
//! L u = sum_i w_i d^{beta_i} u + int Gamma(1-beta) p(beta) (d^beta u) dbeta
//! ```
//!
//! (a unit atom is therefore exactly one Caputo derivative). The matching
//! subordinator W(x) = sum_i a_i D_i(x) with scales a_i = w_i^{1/beta_i}
//! satisfies E[e^{-s W(x)}] = e^{-x psi_W(s)} with psi_W from [`psi_w`], and
//! E^nu(t) = inf{x : W(x) > t} is its inverse first-passage time, whose
//! Laplace transform in lambda is again [`h_eigen`].

use rayon::prelude::*;

use crate::accum;
use crate::error::{Error, Result};
use crate::quad;
use crate::relax::{self, OperatorTerm};
use crate::rng::RngStream;
use crate::specfun;
use crate::subord::{sample_stable, StableIndex};

/// Ceiling for the quadrature of p(beta)/(1-beta); measures beyond it are
/// rejected as numerically ill-posed.
pub const WELLPOSED_CEILING: f64 = 1e6;

const MIN_DENSITY_NODES: usize = 32;

/// Named built-in density profiles for the continuous part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityKind {
    /// p(beta) = 1 on [lo, hi]
    Uniform,
    /// p(beta) = (beta - lo)/(hi - lo), a ramp from 0 to 1
    Linear,
}

impl DensityKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "uniform" => Ok(Self::Uniform),
            "linear" => Ok(Self::Linear),
            other => Err(Error::Measure(format!(
                "unknown density profile '{other}' (expected 'uniform' or 'linear')"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
struct DensityPart {
    lo: f64,
    hi: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<f64>,
    label: String,
}

/// A finite measure on (0,1): atoms plus an optional continuous density.
#[derive(Debug, Clone)]
pub struct OrderMeasure {
    atoms: Vec<(f64, f64)>,
    density: Option<DensityPart>,
}

/// Report produced by [`OrderMeasure::validate`].
#[derive(Debug, Clone, Copy)]
pub struct MeasureDiagnostics {
    /// Total mass: sum of atom weights plus the integral of p.
    pub total_mass: f64,
    /// Quadrature of 1/(1-beta) against the measure (well-posedness check).
    pub inv_one_minus_beta: f64,
    /// For the continuous part: int sin(pi beta) Gamma(1-beta) p(beta) dbeta.
    pub sine_weighted_mass: Option<f64>,
}

impl OrderMeasure {
    /// Measure made of atoms `(beta_i, w_i)` with strictly increasing
    /// beta_i in (0,1) and positive weights.
    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Measure("measure needs at least one atom".into()));
        }
        for &(beta, weight) in &atoms {
            if !(beta > 0.0 && beta < 1.0) {
                return Err(Error::Measure(format!(
                    "atom order must lie in (0,1), got {beta}"
                )));
            }
            if !(weight > 0.0) {
                return Err(Error::Measure(format!(
                    "atom weight must be positive, got {weight}"
                )));
            }
        }
        if atoms.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Measure(
                "atom orders must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            atoms,
            density: None,
        })
    }

    /// Single atom delta_{beta} with the given weight.
    pub fn single_atom(beta: f64, weight: f64) -> Result<Self> {
        Self::from_atoms(vec![(beta, weight)])
    }

    /// Pure density measure with a built-in profile on [lo, hi] and an
    /// `n>=32`-node Gauss-Legendre rule.
    pub fn from_density(kind: DensityKind, lo: f64, hi: f64, n: usize) -> Result<Self> {
        let label = match kind {
            DensityKind::Uniform => "uniform".to_string(),
            DensityKind::Linear => "linear".to_string(),
        };
        let profile = move |beta: f64| match kind {
            DensityKind::Uniform => 1.0,
            DensityKind::Linear => (beta - lo) / (hi - lo),
        };
        Self::from_density_fn(lo, hi, n, profile, label)
    }

    /// Pure density measure with an arbitrary nonnegative profile.
    pub fn from_density_fn(
        lo: f64,
        hi: f64,
        n: usize,
        p: impl Fn(f64) -> f64,
        label: String,
    ) -> Result<Self> {
        if !(lo > 0.0 && hi < 1.0 && lo < hi) {
            return Err(Error::Measure(format!(
                "density support must satisfy 0 < lo < hi < 1, got [{lo}, {hi}]"
            )));
        }
        if n < MIN_DENSITY_NODES {
            return Err(Error::Measure(format!(
                "density rule needs at least {MIN_DENSITY_NODES} nodes, got {n}"
            )));
        }
        let (nodes, weights) = quad::gauss_legendre_on(n, lo, hi);
        let values: Vec<f64> = nodes.iter().map(|&b| p(b)).collect();
        if values.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::Measure(
                "density profile must be nonnegative and finite on its support".into(),
            ));
        }
        Ok(Self {
            atoms: Vec::new(),
            density: Some(DensityPart {
                lo,
                hi,
                nodes,
                weights,
                values,
                label,
            }),
        })
    }

    /// Attach atoms to a density measure (or vice versa).
    pub fn with_atoms(mut self, atoms: Vec<(f64, f64)>) -> Result<Self> {
        let parsed = Self::from_atoms(atoms)?;
        self.atoms = parsed.atoms;
        Ok(self)
    }

    /// Parse the measure-file grammar: one `atom <beta> <weight>` line per
    /// atom, at most one `density <uniform|linear> <beta0> <beta1> <nodes>`
    /// line, `#` comments and blank lines ignored. Atom lines may appear in
    /// any order; orders must be pairwise distinct.
    pub fn parse(text: &str) -> Result<Self> {
        let mut atoms: Vec<(f64, f64)> = Vec::new();
        let mut density: Option<DensityPart> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse_f64 = |s: &str, what: &str| -> Result<f64> {
                s.parse::<f64>().map_err(|_| {
                    Error::Measure(format!("line {}: bad {what} '{s}'", lineno + 1))
                })
            };
            match fields[0] {
                "atom" => {
                    if fields.len() != 3 {
                        return Err(Error::Measure(format!(
                            "line {}: expected 'atom <beta> <weight>'",
                            lineno + 1
                        )));
                    }
                    atoms.push((
                        parse_f64(fields[1], "order")?,
                        parse_f64(fields[2], "weight")?,
                    ));
                }
                "density" => {
                    if density.is_some() {
                        return Err(Error::Measure(format!(
                            "line {}: only one density line is allowed",
                            lineno + 1
                        )));
                    }
                    if fields.len() != 5 {
                        return Err(Error::Measure(format!(
                            "line {}: expected 'density <uniform|linear> <beta0> <beta1> <nodes>'",
                            lineno + 1
                        )));
                    }
                    let kind = DensityKind::parse(fields[1])?;
                    let lo = parse_f64(fields[2], "beta0")?;
                    let hi = parse_f64(fields[3], "beta1")?;
                    let n: usize = fields[4].parse().map_err(|_| {
                        Error::Measure(format!("line {}: bad node count '{}'", lineno + 1, fields[4]))
                    })?;
                    density = Self::from_density(kind, lo, hi, n)?.density;
                }
                other => {
                    return Err(Error::Measure(format!(
                        "line {}: unknown directive '{other}'",
                        lineno + 1
                    )));
                }
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut measure = if atoms.is_empty() {
            if density.is_none() {
                return Err(Error::Measure("measure file defines nothing".into()));
            }
            OrderMeasure {
                atoms: Vec::new(),
                density: None,
            }
        } else {
            Self::from_atoms(atoms)?
        };
        measure.density = density;
        if measure.atoms.is_empty() && measure.density.is_none() {
            return Err(Error::Measure("measure file defines nothing".into()));
        }
        Ok(measure)
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn has_density(&self) -> bool {
        self.density.is_some()
    }

    pub fn atoms_only(&self) -> bool {
        self.density.is_none() && !self.atoms.is_empty()
    }

    /// Support bounds of the continuous part, when present.
    pub fn density_support(&self) -> Option<(f64, f64)> {
        self.density.as_ref().map(|d| (d.lo, d.hi))
    }

    pub fn density_label(&self) -> Option<&str> {
        self.density.as_ref().map(|d| d.label.as_str())
    }

    /// Sum of weight * f(beta) over the atoms.
    fn sum_atoms(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|&(beta, w)| w * f(beta)).sum()
    }

    /// Quadrature of p(beta) f(beta) over the continuous part.
    fn sum_density(&self, f: impl Fn(f64) -> f64) -> f64 {
        let Some(d) = &self.density else {
            return 0.0;
        };
        d.nodes
            .iter()
            .zip(&d.weights)
            .zip(&d.values)
            .map(|((&b, &w), &p)| w * p * f(b))
            .sum()
    }

    /// Check every measure invariant; returns the diagnostics on success.
    ///
    /// Accepts iff the total mass is positive and finite, the quadrature of
    /// p(beta)/(1-beta) stays below [`WELLPOSED_CEILING`] (well-posedness of
    /// the weighted operator), and — when a density is present — the
    /// sine-weighted mass C = int sin(pi b) Gamma(1-b) p(b) db is positive.
    pub fn validate(&self) -> Result<MeasureDiagnostics> {
        let total_mass = self.sum_atoms(|_| 1.0) + self.sum_density(|_| 1.0);
        if !(total_mass > 0.0) || !total_mass.is_finite() {
            return Err(Error::Measure(format!(
                "total mass must be positive and finite, got {total_mass}"
            )));
        }
        let inv_one_minus_beta =
            self.sum_atoms(|b| 1.0 / (1.0 - b)) + self.sum_density(|b| 1.0 / (1.0 - b));
        if !inv_one_minus_beta.is_finite() || inv_one_minus_beta > WELLPOSED_CEILING {
            return Err(Error::Measure(format!(
                "integral of 1/(1-beta) is {inv_one_minus_beta:.3e}, above the ceiling {WELLPOSED_CEILING:.1e}: operator is not well-defined"
            )));
        }
        let sine_weighted_mass = self.density.as_ref().map(|d| {
            d.nodes
                .iter()
                .zip(&d.weights)
                .zip(&d.values)
                .map(|((&b, &w), &p)| {
                    w * p * (std::f64::consts::PI * b).sin() * specfun::gamma_unchecked(1.0 - b)
                })
                .sum::<f64>()
        });
        if let Some(c) = sine_weighted_mass {
            if !(c > 0.0) {
                return Err(Error::Measure(format!(
                    "sine-weighted density mass must be positive, got {c}"
                )));
            }
        }
        Ok(MeasureDiagnostics {
            total_mass,
            inv_one_minus_beta,
            sine_weighted_mass,
        })
    }

    /// Operator terms (order, coefficient) of
    /// `L u = sum_i w_i d^{b_i} u + int Gamma(1-b) p(b) d^b u db`.
    pub(crate) fn operator_terms(&self) -> Vec<OperatorTerm> {
        let mut terms: Vec<OperatorTerm> = self
            .atoms
            .iter()
            .map(|&(beta, weight)| OperatorTerm {
                order: beta,
                weight,
            })
            .collect();
        if let Some(d) = &self.density {
            for ((&b, &w), &p) in d.nodes.iter().zip(&d.weights).zip(&d.values) {
                if w * p > 0.0 {
                    terms.push(OperatorTerm {
                        order: b,
                        weight: w * p * specfun::gamma_unchecked(1.0 - b),
                    });
                }
            }
        }
        terms
    }

    /// Composite-subordinator scales a_i = w_i^{1/b_i}, chosen so that
    /// E[e^{-s W(x)}] = e^{-x psi_w(s)} holds exactly.
    fn composite_scales(&self) -> Result<Vec<(f64, f64)>> {
        if !self.atoms_only() {
            return Err(Error::Domain(
                "composite subordinator sampling needs an atoms-only measure".into(),
            ));
        }
        Ok(self
            .atoms
            .iter()
            .map(|&(beta, weight)| (beta, weight.powf(1.0 / beta)))
            .collect())
    }
}

/// Laplace exponent of the composite subordinator:
/// psi_W(s) = sum_i w_i s^{beta_i} + int s^beta Gamma(1-beta) p(beta) dbeta,
/// s >= 0.
pub fn psi_w(measure: &OrderMeasure, s: f64) -> f64 {
    assert!(s >= 0.0, "psi_w requires s >= 0");
    measure.sum_atoms(|b| s.powf(b))
        + measure.sum_density(|b| s.powf(b) * specfun::gamma_unchecked(1.0 - b))
}

/// Levy-measure tail of the composite subordinator:
/// phi_W(t, inf) = sum_i w_i t^{-beta_i} / Gamma(1-beta_i)
///               + int t^{-beta} p(beta) dbeta, t > 0.
pub fn levy_tail(measure: &OrderMeasure, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("levy_tail requires t > 0, got {t}")));
    }
    Ok(
        measure.sum_atoms(|b| t.powf(-b) / specfun::gamma_unchecked(1.0 - b))
            + measure.sum_density(|b| t.powf(-b)),
    )
}

/// Eigenvalue relaxation record: h(t, lambda) with its quadrature error.
#[derive(Debug, Clone, Copy)]
pub struct EigenSolution {
    pub t: f64,
    pub lambda: f64,
    pub value: f64,
    pub est_error: f64,
}

const H_EIGEN_BUDGET: f64 = 1e-8;

/// Relaxation function h(t, lambda) of the weighted Caputo operator, by
/// adaptive quadrature of the shared inverse-Laplace kernel. The absolute
/// error estimate is certified below 1e-8 or the call fails.
pub fn h_eigen(measure: &OrderMeasure, t: f64, lambda: f64) -> Result<EigenSolution> {
    if !(t > 0.0) || !(lambda > 0.0) {
        return Err(Error::Domain(format!(
            "h_eigen requires t > 0 and lambda > 0, got t={t}, lambda={lambda}"
        )));
    }
    measure.validate()?;
    let terms = measure.operator_terms();
    let q = relax::h_relaxation(&terms, t, lambda, 0.1 * H_EIGEN_BUDGET, 0.0);
    if q.abs_error > H_EIGEN_BUDGET {
        return Err(Error::Quadrature {
            context: "h_eigen",
            achieved: q.abs_error,
            budget: H_EIGEN_BUDGET,
        });
    }
    Ok(EigenSolution {
        t,
        lambda,
        value: q.value.min(1.0),
        est_error: q.abs_error,
    })
}

/// Derivative envelope k(t) for measures with a continuous part:
/// |d/dt h(t, lambda)| <= lambda k(t) with
/// k(t) = [C pi]^{-1} [Gamma(1-b1) t^{b1-1} + Gamma(1-b0) t^{b0-1}].
pub fn k_bound(measure: &OrderMeasure, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("k_bound requires t > 0, got {t}")));
    }
    let Some((lo, hi)) = measure.density_support() else {
        return Err(Error::Domain(
            "k_bound needs a measure with a continuous part".into(),
        ));
    };
    let diag = measure.validate()?;
    let c = diag
        .sine_weighted_mass
        .expect("density present implies sine-weighted mass");
    let g_hi = specfun::gamma_unchecked(1.0 - hi);
    let g_lo = specfun::gamma_unchecked(1.0 - lo);
    Ok((g_hi * t.powf(hi - 1.0) + g_lo * t.powf(lo - 1.0)) / (c * std::f64::consts::PI))
}

/// One draw of the composite subordinator W(x) = sum_i a_i D_i(x) for an
/// atoms-only measure; E[e^{-s W(x)}] = e^{-x psi_W(s)}.
pub fn sample_composite_subordinator(
    measure: &OrderMeasure,
    x: f64,
    stream: &mut RngStream,
) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("position must be positive, got {x}")));
    }
    let scales = measure.composite_scales()?;
    let mut total = 0.0;
    for &(beta, a) in &scales {
        let idx = StableIndex::new(beta).expect("validated atom order");
        total += a * x.powf(1.0 / beta) * sample_stable(idx, stream);
    }
    Ok(total)
}

/// First passage of a simulated W path above level t, walked with
/// independent increments of length `dx`; the returned x* carries a
/// one-sided O(dx) discretization bias.
pub fn sample_inverse_composite(
    measure: &OrderMeasure,
    t: f64,
    stream: &mut RngStream,
    dx: f64,
    max_steps: u64,
) -> Result<f64> {
    if !(t > 0.0) || !(dx > 0.0) {
        return Err(Error::Domain(format!(
            "inverse sampling requires t > 0 and dx > 0, got t={t}, dx={dx}"
        )));
    }
    let scales = measure.composite_scales()?;
    let increments: Vec<(StableIndex, f64)> = scales
        .iter()
        .map(|&(beta, a)| {
            (
                StableIndex::new(beta).expect("validated atom order"),
                a * dx.powf(1.0 / beta),
            )
        })
        .collect();
    let mut level = 0.0;
    let mut steps: u64 = 0;
    while level <= t {
        steps += 1;
        if steps > max_steps {
            return Err(Error::Budget(format!(
                "first-passage walk exceeded {max_steps} steps (t={t}, dx={dx})"
            )));
        }
        for &(idx, scale) in &increments {
            level += scale * sample_stable(idx, stream);
        }
    }
    Ok(steps as f64 * dx)
}

/// Monte-Carlo estimate of the inverse-subordinator density
/// g(t, x) = E[phi_W(t - W(x), inf); W(x) < t], with its standard error.
pub fn g_density_mc(
    measure: &OrderMeasure,
    t: f64,
    x: f64,
    n_paths: usize,
    base: &RngStream,
) -> Result<(f64, f64)> {
    if !(t > 0.0) || !(x > 0.0) {
        return Err(Error::Domain(format!(
            "g_density_mc requires t > 0 and x > 0, got t={t}, x={x}"
        )));
    }
    if n_paths < 2 {
        return Err(Error::Domain("need at least two paths".into()));
    }
    measure.composite_scales()?; // atoms-only check up front
    let values: Vec<f64> = (0..n_paths)
        .into_par_iter()
        .map(|path| {
            let mut stream = base.substream(path as u64);
            let w = sample_composite_subordinator(measure, x, &mut stream)
                .expect("validated measure and positive x");
            if w < t {
                levy_tail(measure, t - w).expect("t - w > 0")
            } else {
                0.0
            }
        })
        .collect();
    let (mean, stderr) = accum::mean_and_stderr(&values);
    Ok((mean, stderr))
}
