//! Upper bounds on `E (α + Y)^{-β}` for a nonnegative random variable `Y`.

use serde::Serialize;

use super::constants::c_tilde;
use crate::dist::AtomicDistribution;
use crate::error::{Error, Result};

/// Relative slack allowed in the check `Var Y ≤ E Y`.
const VARIANCE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentBounds {
    pub mean: f64,
    pub variance: f64,
    /// `E (α + Y)^{-β}`.
    pub exact: f64,
    /// Second-order Taylor bound around `c`.
    pub taylor_rhs: f64,
    /// `C̃(α, β) / (α + μ)^β`, present when `Var Y ≤ E Y`.
    pub cor_rhs: Option<f64>,
    /// The bound at the optimal expansion point `c = μ + σ²/μ`; present when
    /// `μ > 0`.
    pub opt_rhs: Option<f64>,
}

pub fn inverse_power_moment_bounds(
    y: &AtomicDistribution,
    alpha: f64,
    beta: f64,
    c: f64,
) -> Result<MomentBounds> {
    if let Some(&(x, _)) = y.atoms().iter().find(|a| a.0 < 0.0) {
        return Err(Error::Precondition(format!(
            "Y must be nonnegative, found an atom at {x}"
        )));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Domain {
            name: "c",
            value: c,
            domain: "(0, inf)",
        });
    }
    // also validates alpha and beta
    let constant = c_tilde(alpha, beta)?.value;

    let mu = y.mean();
    let var = y.variance();
    let exact = y
        .atoms()
        .iter()
        .map(|&(x, p)| p * (alpha + x).powf(-beta))
        .sum();
    let ac = alpha + c;
    let taylor_rhs = ac.powf(-beta)
        + beta * (c - mu) / ac.powf(beta + 1.0)
        + (var + (c - mu).powi(2)) / (c * c)
            * (alpha.powf(-beta) - (alpha + c * (beta + 1.0)) / ac.powf(beta + 1.0));
    let cor_rhs = (var <= mu + VARIANCE_SLACK * mu.max(1.0))
        .then(|| constant / (alpha + mu).powf(beta));
    let opt_rhs = (mu > 0.0).then(|| {
        let kappa = mu / (var + mu * (alpha + mu));
        (kappa.powf(beta) * mu * mu + var / alpha.powf(beta)) / (mu * mu + var)
    });
    Ok(MomentBounds {
        mean: mu,
        variance: var,
        exact,
        taylor_rhs,
        cor_rhs,
        opt_rhs,
    })
}

/// The two-point law `P(Y = 1 + μ) = μ/(1 + μ)`, `P(Y = 0) = 1/(1 + μ)`,
/// whose variance equals its mean `μ`.
pub fn two_point_extremal(mu: f64) -> Result<AtomicDistribution> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::Domain {
            name: "mu",
            value: mu,
            domain: "(0, inf)",
        });
    }
    AtomicDistribution::new(vec![(0.0, 1.0 / (1.0 + mu)), (1.0 + mu, mu / (1.0 + mu))])
}
