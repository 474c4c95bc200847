//! Smoothness and concentration upper bounds for `S_n`.
//!
//! All bounds share the shape
//! `C(1/(8ε))/√π · (1/8 + ⌊m/2⌋·A)^{-1/2}` where `m = ⌊n/2⌋` and `A` is an
//! average over pair mixtures `R(j,k,r,s)` (or a lower estimate of it), and
//! `ε ∈ (0, 1]` must dominate every averaged term. When `ε` is not supplied
//! it is set to the largest averaged term, floored at [`EPSILON_FLOOR`].

use std::cell::{OnceCell, RefCell};
use std::f64::consts::PI;

use serde::Serialize;

use super::constants::c_of_alpha;
use super::pairs::stats_unchecked;
use crate::diag_sum::{
    enum_cap, exact_distribution_capped, pair_mixture_unchecked, MatrixModel, Permutation,
};
use crate::dist::{Distribution, Kind};
use crate::error::{Error, PairIndex, Result};

/// Smallest `ε` chosen automatically.
pub const EPSILON_FLOOR: f64 = 1e-9;

/// Rounding allowance when checking `ε` and lower-bound preconditions.
const CHECK_SLACK: f64 = 1e-12;

/// Tolerance for [`BoundReport::holds`].
pub const DOMINANCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundName {
    Smoothness,
    Concentration,
    BernoulliSmoothness,
    BernoulliConcentration,
    GeneralizedSmoothness,
    GeneralizedConcentration,
    RelaxedSmoothness,
    RelaxedConcentration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_name: BoundName,
    pub n: usize,
    pub epsilon: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// 1-based images of `φ` for the generalized bounds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<usize>>,
    /// `ξ`, `η(t)`, `χ`, `ψ`, `ξ₁(φ)` or `η₁(φ, t)`.
    pub aggregate: f64,
    /// `C(1/(8ε))`.
    pub constant: f64,
    /// `C(1/(8ε))/√π`.
    pub constant_over_sqrt_pi: f64,
    pub bound_value: f64,
    /// `min(1, bound_value)`.
    pub clipped_value: f64,
    pub exact_value: Option<f64>,
    /// `bound_value − exact_value`.
    pub slack: Option<f64>,
}

impl BoundReport {
    /// Whether the bound dominates the exact value (vacuously when absent).
    pub fn holds(&self) -> bool {
        self.slack.is_none_or(|s| s >= -DOMINANCE_TOL)
    }

    fn with_exact(mut self, exact: Option<f64>) -> Self {
        self.exact_value = exact;
        self.slack = exact.map(|e| self.bound_value - e);
        self
    }
}

/// `C(1/(8ε))/√π · (1/8 + ⌊m/2⌋·aggregate)^{-1/2}` as a report without an
/// exact comparison.
pub fn bound_from_aggregate(
    name: BoundName,
    n: usize,
    epsilon: f64,
    aggregate: f64,
) -> Result<BoundReport> {
    check_epsilon(epsilon)?;
    let constant = c_of_alpha(1.0 / (8.0 * epsilon))?.value;
    let half_m = (n / 2 / 2) as f64;
    let bound_value = constant / PI.sqrt() / (0.125 + half_m * aggregate).sqrt();
    Ok(BoundReport {
        bound_name: name,
        n,
        epsilon,
        t: None,
        phi: None,
        aggregate,
        constant,
        constant_over_sqrt_pi: constant / PI.sqrt(),
        bound_value,
        clipped_value: bound_value.min(1.0),
        exact_value: None,
        slack: None,
    })
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Domain {
            name: "epsilon",
            value: epsilon,
            domain: "(0, 1]",
        });
    }
    Ok(())
}

/// `√(2/π) / √(1/4 + Σ_j (1 − q_j))` for per-summand smoothness or
/// concentration values `q_j`.
pub fn kr_bound(q: &[f64]) -> Result<f64> {
    let mut deficit = 0.0;
    for &x in q {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain {
                name: "q",
                value: x,
                domain: "[0, 1]",
            });
        }
        deficit += 1.0 - x;
    }
    Ok((2.0 / PI).sqrt() / (0.25 + deficit).sqrt())
}

/// Values indexed by `(j, k, r, s)` with `j ≠ k`, `r ≠ s` (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct PairTable {
    n: usize,
    values: Vec<f64>,
}

impl PairTable {
    /// Entries with `j = k` or `r = s` are never read.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut values = vec![f64::NAN; n.pow(4)];
        for (j, k, r, s) in pair_indices(n) {
            values[((j * n + k) * n + r) * n + s] = f(j, k, r, s);
        }
        Self { n, values }
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self::from_fn(n, |_, _, _, _| value)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, k: usize, r: usize, s: usize) -> f64 {
        let n = self.n;
        self.values[((j * n + k) * n + r) * n + s]
    }

    /// `((j, k, r, s), value)` over all valid indices, lexicographically.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize, usize, usize), f64)> + '_ {
        pair_indices(self.n).map(move |(j, k, r, s)| ((j, k, r, s), self.get(j, k, r, s)))
    }

    /// Average over all `n²(n−1)²` valid entries.
    pub fn mean(&self) -> f64 {
        let count = (self.n * self.n * (self.n - 1) * (self.n - 1)) as f64;
        self.iter().map(|(_, v)| v).sum::<f64>() / count
    }

    /// Largest entry and the first index attaining it.
    pub fn max(&self) -> (f64, PairIndex) {
        let mut best = (f64::NEG_INFINITY, (0, 0, 0, 0));
        for (idx, v) in self.iter() {
            if v > best.0 {
                best = (v, idx);
            }
        }
        (best.0, one_based(best.1))
    }

    /// `(ξ₁(φ), ξ₂(φ))`: first and second moments of the entries on the row
    /// pairs `(φ(2ℓ−1), φ(2ℓ))`, `ℓ = 1..m`, over all column pairs.
    pub fn phi_moments(&self, phi: &Permutation) -> (f64, f64) {
        let n = self.n;
        let m = n / 2;
        let count = (m * n * (n - 1)) as f64;
        let (mut first, mut second) = (0.0, 0.0);
        for l in 0..m {
            let (j, k) = (phi.image(2 * l), phi.image(2 * l + 1));
            for r in 0..n {
                for s in (0..n).filter(|&s| s != r) {
                    let v = self.get(j, k, r, s);
                    first += v;
                    second += v * v;
                }
            }
        }
        (first / count, second / count)
    }
}

fn pair_indices(n: usize) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..n).flat_map(move |j| {
        (0..n).filter(move |&k| k != j).flat_map(move |k| {
            (0..n).flat_map(move |r| {
                (0..n)
                    .filter(move |&s| s != r)
                    .map(move |s| (j, k, r, s))
            })
        })
    })
}

fn one_based((j, k, r, s): (usize, usize, usize, usize)) -> PairIndex {
    PairIndex {
        j: j + 1,
        k: k + 1,
        r: r + 1,
        s: s + 1,
    }
}

/// `ε` from the caller, checked against the largest averaged term, or the
/// largest term itself when the caller gives none.
fn resolve_epsilon(
    requested: Option<f64>,
    table: &PairTable,
    quantity: &'static str,
) -> Result<f64> {
    let (max, at) = table.max();
    match requested {
        Some(eps) => {
            check_epsilon(eps)?;
            if max > eps + CHECK_SLACK {
                let (_, value) = table
                    .iter()
                    .find(|&(_, v)| v > eps + CHECK_SLACK)
                    .expect("max exceeds epsilon");
                return Err(Error::EpsilonViolated {
                    quantity,
                    at,
                    value,
                    epsilon: eps,
                });
            }
            Ok(eps)
        }
        None => Ok(max.clamp(EPSILON_FLOOR, 1.0)),
    }
}

/// Pair mixtures keyed by `(j, k, r, s)` with `j < k`, `r < s`.
type Mixtures = Vec<((usize, usize, usize, usize), Distribution)>;

/// Which functional of `S_n` a bound controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Functional {
    /// `d_TV(S_n, 1 + S_n)`.
    Smoothness,
    /// `Q(S_n; t)`.
    Concentration(f64),
}

/// Bound evaluation for one model, caching the pair mixtures and the exact
/// law of `S_n` across calls.
pub struct ModelBounds<'a> {
    model: &'a MatrixModel,
    cap: usize,
    mixtures: OnceCell<Mixtures>,
    exact: OnceCell<Option<Distribution>>,
    nu: OnceCell<PairTable>,
    zeta: RefCell<Vec<(u64, PairTable)>>,
}

impl<'a> ModelBounds<'a> {
    /// Uses [`enum_cap`] for the exact comparison.
    pub fn new(model: &'a MatrixModel) -> Self {
        Self::with_cap(model, enum_cap())
    }

    /// Exact values are computed only when `n <= cap`.
    pub fn with_cap(model: &'a MatrixModel, cap: usize) -> Self {
        Self {
            model,
            cap,
            mixtures: OnceCell::new(),
            exact: OnceCell::new(),
            nu: OnceCell::new(),
            zeta: RefCell::new(Vec::new()),
        }
    }

    pub fn model(&self) -> &MatrixModel {
        self.model
    }

    /// Law of `S_n`, or `None` above the enumeration cap.
    pub fn exact(&self) -> Option<&Distribution> {
        self.exact
            .get_or_init(|| exact_distribution_capped(self.model, self.cap).ok())
            .as_ref()
    }

    pub fn exact_functional(&self, functional: Functional) -> Option<f64> {
        let exact = self.exact()?;
        match functional {
            Functional::Smoothness => exact.as_lattice().map(|d| d.smoothness()),
            Functional::Concentration(t) => exact.concentration(t).ok(),
        }
    }

    /// One mixture per unordered pair of rows and unordered pair of columns;
    /// `R(j,k,r,s)` is symmetric in `j ↔ k` and in `r ↔ s`.
    fn mixtures(&self) -> &Mixtures {
        self.mixtures.get_or_init(|| {
            let n = self.model.n();
            let mut out = Vec::with_capacity((n * (n - 1) / 2).pow(2));
            for j in 0..n {
                for k in j + 1..n {
                    for r in 0..n {
                        for s in r + 1..n {
                            let d = pair_mixture_unchecked(self.model, j, k, r, s);
                            out.push(((j, k, r, s), d));
                        }
                    }
                }
            }
            out
        })
    }

    fn table_from_mixtures(&self, f: impl Fn(&Distribution) -> f64) -> PairTable {
        let n = self.model.n();
        let mut values = vec![f64::NAN; n.pow(4)];
        let idx = |j: usize, k: usize, r: usize, s: usize| ((j * n + k) * n + r) * n + s;
        for &((j, k, r, s), ref d) in self.mixtures() {
            let v = f(d);
            values[idx(j, k, r, s)] = v;
            values[idx(k, j, r, s)] = v;
            values[idx(j, k, s, r)] = v;
            values[idx(k, j, s, r)] = v;
        }
        PairTable { n, values }
    }

    fn require_integer(&self, operation: &'static str) -> Result<()> {
        if self.model.kind() != Kind::Integer {
            return Err(Error::KindRequired {
                operation,
                required: Kind::Integer,
                found: self.model.kind(),
            });
        }
        Ok(())
    }

    /// `ν(j,k,r,s) = 1 − d_TV(R, δ_1 * R)` for every pair mixture.
    pub fn nu_table(&self) -> Result<&PairTable> {
        self.require_integer("smoothness bound")?;
        Ok(self.nu.get_or_init(|| {
            self.table_from_mixtures(|d| 1.0 - d.as_lattice().expect("integer model").smoothness())
        }))
    }

    /// `ζ(j,k,r,s; t) = 1 − Q(R; t)` for every pair mixture.
    pub fn zeta_table(&self, t: f64) -> Result<PairTable> {
        // validates t
        self.model.entry(0, 0).concentration(t)?;
        if let Some((_, table)) = self.zeta.borrow().iter().find(|(key, _)| *key == t.to_bits()) {
            return Ok(table.clone());
        }
        let table = self.table_from_mixtures(|d| 1.0 - d.concentration(t).expect("t checked"));
        self.zeta.borrow_mut().push((t.to_bits(), table.clone()));
        Ok(table)
    }

    fn table_for(&self, functional: Functional) -> Result<PairTable> {
        match functional {
            Functional::Smoothness => self.nu_table().cloned(),
            Functional::Concentration(t) => self.zeta_table(t),
        }
    }

    /// Bound on `d_TV(S_n, 1 + S_n)` from the average `ξ` of `ν`.
    pub fn smoothness(&self, epsilon: Option<f64>) -> Result<BoundReport> {
        let nu = self.nu_table()?;
        let eps = resolve_epsilon(epsilon, nu, "nu")?;
        let report = bound_from_aggregate(BoundName::Smoothness, self.model.n(), eps, nu.mean())?;
        Ok(report.with_exact(self.exact_functional(Functional::Smoothness)))
    }

    /// Bound on `Q(S_n; t)` from the average `η(t)` of `ζ`.
    pub fn concentration(&self, t: f64, epsilon: Option<f64>) -> Result<BoundReport> {
        let zeta = self.zeta_table(t)?;
        let eps = resolve_epsilon(epsilon, &zeta, "zeta")?;
        let mut report =
            bound_from_aggregate(BoundName::Concentration, self.model.n(), eps, zeta.mean())?;
        report.t = Some(t);
        Ok(report.with_exact(self.exact_functional(Functional::Concentration(t))))
    }

    /// Bound built from lower estimates `lower ≤ ν` (or `≤ ζ(t)`) along the
    /// row pairing given by `phi`, under `ξ₂ − ξ₁² ≤ ε ξ₁`.
    pub fn generalized(
        &self,
        phi: &Permutation,
        lower: &PairTable,
        functional: Functional,
        epsilon: Option<f64>,
    ) -> Result<BoundReport> {
        let n = self.model.n();
        if phi.len() != n || lower.n() != n {
            return Err(Error::Precondition(format!(
                "phi has length {} and the lower-bound table has order {}, model has n = {n}",
                phi.len(),
                lower.n()
            )));
        }
        let actual = self.table_for(functional)?;
        let quantity = match functional {
            Functional::Smoothness => "nu",
            Functional::Concentration(_) => "zeta",
        };
        for (idx, v) in lower.iter() {
            let real = actual.get(idx.0, idx.1, idx.2, idx.3);
            if !(0.0..=1.0).contains(&v) || v > real + CHECK_SLACK {
                return Err(Error::LowerBoundViolated {
                    quantity,
                    at: one_based(idx),
                    lower: v,
                    actual: real,
                });
            }
        }

        let (first, second) = lower.phi_moments(phi);
        let spread = second - first * first;
        let eps = match epsilon {
            Some(e) => {
                check_epsilon(e)?;
                e
            }
            None if first > 0.0 => (spread / first).clamp(EPSILON_FLOOR, 1.0),
            None => 1.0,
        };
        if spread > eps * first + CHECK_SLACK {
            return Err(Error::VarianceCondition {
                first,
                first_sq: first * first,
                second,
                epsilon: eps,
            });
        }

        let (name, t) = match functional {
            Functional::Smoothness => (BoundName::GeneralizedSmoothness, None),
            Functional::Concentration(t) => (BoundName::GeneralizedConcentration, Some(t)),
        };
        let mut report = bound_from_aggregate(name, n, eps, first)?;
        report.t = t;
        report.phi = Some(phi.to_one_based());
        Ok(report.with_exact(self.exact_functional(functional)))
    }

    /// Entrywise averages that lower-bound `ξ` and `η(t)`.
    pub fn relaxation(&self, t: Option<f64>) -> Result<Relaxation> {
        let n = self.model.n();
        let count = (n * n) as f64;
        let entries = || self.model.rows().flatten();
        let xi_relaxed = match self.model.kind() {
            Kind::Integer => Some(
                entries()
                    .map(|d| 1.0 - d.as_lattice().expect("integer model").smoothness())
                    .sum::<f64>()
                    / count,
            ),
            Kind::Real => None,
        };
        let eta_relaxed = match t {
            Some(t) => {
                let mut total = 0.0;
                for d in entries() {
                    total += 1.0 - d.concentration(t)?;
                }
                Some(total / count)
            }
            None => None,
        };
        Ok(Relaxation {
            xi_relaxed,
            eta_relaxed,
        })
    }
}

/// Entrywise relaxations of `ξ` (integer models only) and `η(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Relaxation {
    pub xi_relaxed: Option<f64>,
    pub eta_relaxed: Option<f64>,
}

pub fn theorem_smoothness_bound(model: &MatrixModel, epsilon: Option<f64>) -> Result<BoundReport> {
    ModelBounds::new(model).smoothness(epsilon)
}

pub fn theorem_concentration_bound(
    model: &MatrixModel,
    t: f64,
    epsilon: Option<f64>,
) -> Result<BoundReport> {
    ModelBounds::new(model).concentration(t, epsilon)
}

pub fn generalized_bounds(
    model: &MatrixModel,
    phi: &Permutation,
    lower: &PairTable,
    functional: Functional,
    epsilon: Option<f64>,
) -> Result<BoundReport> {
    ModelBounds::new(model).generalized(phi, lower, functional, epsilon)
}

pub fn entrywise_relaxation(model: &MatrixModel, t: Option<f64>) -> Result<Relaxation> {
    ModelBounds::new(model).relaxation(t)
}

/// Explicit bounds for a Bernoulli matrix `Q_{j,r} = Be(p_{j,r})`: the
/// smoothness bound from the average `χ` of `τ`, and the bound on
/// `Q(S_n; 0)` from `ψ`, the average of `σ²/2`.
///
/// A supplied `epsilon` must dominate both `τ` and `σ²/2`; otherwise each
/// branch picks its own.
pub fn theorem_bernoulli_bounds(
    p: &[Vec<f64>],
    epsilon: Option<f64>,
) -> Result<(BoundReport, BoundReport)> {
    let model = MatrixModel::bernoulli(p)?;
    let n = model.n();
    let tau = PairTable::from_fn(n, |j, k, r, s| {
        stats_unchecked(p[j][r], p[k][s], p[k][r], p[j][s]).tau
    });
    let half_sigma2 = PairTable::from_fn(n, |j, k, r, s| {
        stats_unchecked(p[j][r], p[k][s], p[k][r], p[j][s]).sigma2 / 2.0
    });
    let eps_smooth = resolve_epsilon(epsilon, &tau, "tau")?;
    let eps_conc = resolve_epsilon(epsilon, &half_sigma2, "sigma2/2")?;

    let bounds = ModelBounds::new(&model);
    let smooth = bound_from_aggregate(BoundName::BernoulliSmoothness, n, eps_smooth, tau.mean())?
        .with_exact(bounds.exact_functional(Functional::Smoothness));
    let mut conc =
        bound_from_aggregate(BoundName::BernoulliConcentration, n, eps_conc, half_sigma2.mean())?
            .with_exact(bounds.exact_functional(Functional::Concentration(0.0)));
    conc.t = Some(0.0);
    Ok((smooth, conc))
}
