//! Seeded randomized campaigns over the library's inequalities and
//! identities. Reports depend only on the seed and the campaign size.

use clap::ValueEnum;
use diagsum::bounds::{
    bernoulli_pair_stats, c_tilde, inverse_power_moment_bounds, theorem_bernoulli_bounds,
    BoundReport, Functional, ModelBounds, DOMINANCE_TOL,
};
use diagsum::hafnian::{gnhaf, gnhaf_bound, partition_sum_oracle, PARTITION_MAX_N};
use diagsum::{
    exact_distribution, pairing_decomposition, random, tv_distance, Kind, LatticeDistribution,
    MatrixModel, Permutation,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::CliError;

/// Rounding allowance for identities and inequalities that hold with
/// equality at some inputs.
const ROUNDING_TOL: f64 = 1e-12;
const GNHAF_REL_TOL: f64 = 1e-9;
const HAFNIAN_MAX_N: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Bounds,
    Hafnian,
    Pairs,
    Decomposition,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckSummary {
    pub name: &'static str,
    pub evaluated: usize,
    pub violations: usize,
    /// Smallest `rhs − lhs` seen (inequalities).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_slack: Option<f64>,
    /// Largest discrepancy seen (identities).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_discrepancy: Option<f64>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_case: Option<String>,
}

impl CheckSummary {
    fn inequality(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            evaluated: 0,
            violations: 0,
            min_slack: None,
            max_discrepancy: None,
            tolerance,
            worst_case: None,
        }
    }

    fn identity(name: &'static str, tolerance: f64) -> Self {
        Self::inequality(name, tolerance)
    }

    fn slack(&mut self, slack: f64, case: impl FnOnce() -> String) {
        self.evaluated += 1;
        // NaN counts as a violation and as the worst case
        if slack.is_nan() || slack < -self.tolerance {
            self.violations += 1;
        }
        if self.min_slack.is_none_or(|m| slack.is_nan() || slack < m) {
            self.min_slack = Some(slack);
            self.worst_case = Some(case());
        }
    }

    fn discrepancy(&mut self, d: f64, case: impl FnOnce() -> String) {
        self.evaluated += 1;
        if d.is_nan() || d > self.tolerance {
            self.violations += 1;
        }
        if self.max_discrepancy.is_none_or(|m| d.is_nan() || d > m) {
            self.max_discrepancy = Some(d);
            self.worst_case = Some(case());
        }
    }

    fn failure(&mut self, case: String) {
        self.evaluated += 1;
        self.violations += 1;
        self.worst_case = Some(case);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub violations: usize,
    /// Smallest slack over the suite's inequality checks.
    pub worst_slack: Option<f64>,
    pub checks: Vec<CheckSummary>,
}

impl SuiteSummary {
    fn new(suite: Suite, checks: Vec<CheckSummary>) -> Self {
        Self {
            suite,
            violations: checks.iter().map(|c| c.violations).sum(),
            worst_slack: checks
                .iter()
                .filter_map(|c| c.min_slack)
                .reduce(f64::min),
            checks,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub instances: usize,
    pub nmax: usize,
    pub violations: usize,
    pub suites: Vec<SuiteSummary>,
}

pub fn run(suite: Suite, seed: u64, instances: usize, nmax: usize) -> Result<VerifyReport, CliError> {
    if nmax < 2 {
        return Err(CliError::Usage(format!("--nmax must be at least 2, got {nmax}")));
    }
    let selected: Vec<Suite> = match suite {
        Suite::All => vec![Suite::Bounds, Suite::Hafnian, Suite::Pairs, Suite::Decomposition],
        s => vec![s],
    };
    let mut suites = Vec::new();
    for (offset, s) in [Suite::Bounds, Suite::Hafnian, Suite::Pairs, Suite::Decomposition]
        .into_iter()
        .enumerate()
    {
        if !selected.contains(&s) {
            continue;
        }
        // each suite draws from its own stream so that `all` agrees with
        // the individual runs
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(offset as u64 + 1);
        let summary = match s {
            Suite::Bounds => bounds_suite(&mut rng, instances, nmax)?,
            Suite::Hafnian => hafnian_suite(&mut rng, instances, nmax),
            Suite::Pairs => pairs_suite(&mut rng, instances),
            Suite::Decomposition => decomposition_suite(&mut rng, instances, nmax)?,
            Suite::All => unreachable!(),
        };
        suites.push(summary);
    }
    Ok(VerifyReport {
        seed,
        instances,
        nmax,
        violations: suites.iter().map(|s| s.violations).sum(),
        suites,
    })
}

fn check_cap(nmax: usize) -> Result<(), CliError> {
    let cap = diagsum::diag_sum::enum_cap();
    if nmax > cap {
        return Err(CliError::Usage(format!(
            "--nmax {nmax} exceeds the enumeration cap {cap}; raise {}",
            diagsum::diag_sum::ENUM_CAP_ENV
        )));
    }
    Ok(())
}

fn random_model(i: usize, nmax: usize, rng: &mut ChaCha8Rng) -> (MatrixModel, String) {
    let n = 2 + i % (nmax - 1);
    let (model, label) = match i % 3 {
        0 => (random::bernoulli_model(n, rng), "bernoulli"),
        1 => (random::three_atom_model(n, Kind::Integer, rng), "integer-3-atom"),
        _ => (random::three_atom_model(n, Kind::Real, rng), "real-3-atom"),
    };
    (model, format!("instance {i}: {label} n={n}"))
}

fn bounds_suite(rng: &mut ChaCha8Rng, instances: usize, nmax: usize) -> Result<SuiteSummary, CliError> {
    check_cap(nmax)?;
    let mut dominance = CheckSummary::inequality("theorem_bound_minus_exact", DOMINANCE_TOL);
    let mut moments = CheckSummary::inequality("moment_bound_minus_exact_relative", ROUNDING_TOL);
    let mut bracket = CheckSummary::inequality("constant_bracket", 1e-9);
    let mut monotone = CheckSummary::inequality("constant_decreasing_in_alpha", 1e-9);

    for i in 0..instances {
        let (model, case) = random_model(i, nmax, rng);
        let phi = Permutation::random(model.n(), rng);
        let b = ModelBounds::new(&model);
        let mut record = |r: diagsum::Result<BoundReport>, what: &str| match r {
            Ok(r) => {
                if let Some(s) = r.slack {
                    dominance.slack(s, || format!("{case} {:?}", r.bound_name));
                }
            }
            Err(e) => dominance.failure(format!("{case} {what}: {e}")),
        };
        for t in [0.0, 0.5, 1.0, 2.0] {
            record(b.concentration(t, None), "concentration");
            match b.zeta_table(t) {
                Ok(zeta) => record(
                    b.generalized(&phi, &zeta, Functional::Concentration(t), None),
                    "generalized concentration",
                ),
                Err(e) => record(Err(e), "zeta"),
            }
        }
        if model.kind() == Kind::Integer {
            record(b.smoothness(None), "smoothness");
            match b.nu_table() {
                Ok(nu) => {
                    let nu = nu.clone();
                    record(
                        b.generalized(&phi, &nu, Functional::Smoothness, None),
                        "generalized smoothness",
                    )
                }
                Err(e) => record(Err(e), "nu"),
            }
        }
        if let Some(p) = model.bernoulli_probabilities() {
            match theorem_bernoulli_bounds(&p, None) {
                Ok((s, c)) => {
                    record(Ok(s), "bernoulli");
                    record(Ok(c), "bernoulli");
                }
                Err(e) => record(Err(e), "bernoulli"),
            }
        }

        let y = random::nonnegative_law(rng);
        let alpha = 10f64.powf(rng.gen_range(-2.0..=2.0));
        let beta = 1.0 - rng.gen::<f64>();
        let c = rng.gen_range(0.01..10.0);
        let case = || format!("instance {i}: alpha={alpha} beta={beta} c={c}");
        match inverse_power_moment_bounds(&y, alpha, beta, c) {
            Ok(m) => {
                moments.slack((m.taylor_rhs - m.exact) / m.exact, || format!("{} taylor", case()));
                if let Some(cor) = m.cor_rhs {
                    moments.slack((cor - m.exact) / m.exact, || format!("{} corollary", case()));
                }
            }
            Err(e) => moments.failure(format!("{}: {e}", case())),
        }

        let larger = alpha * (1.0 + rng.gen_range(0.0..3.0));
        match (c_tilde(alpha, beta), c_tilde(larger, beta)) {
            (Ok(a), Ok(l)) => {
                let slack = (a.value - 1.0).min(1.0 + beta / alpha - a.value);
                bracket.slack(slack, || format!("instance {i}: alpha={alpha} beta={beta}"));
                monotone.slack(a.value - l.value, || {
                    format!("instance {i}: alpha={alpha} vs {larger}, beta={beta}")
                });
            }
            (Err(e), _) | (_, Err(e)) => bracket.failure(format!("instance {i}: {e}")),
        }
    }
    Ok(SuiteSummary::new(Suite::Bounds, vec![dominance, moments, bracket, monotone]))
}

fn hafnian_suite(rng: &mut ChaCha8Rng, instances: usize, nmax: usize) -> SuiteSummary {
    let mut bound = CheckSummary::inequality("gnhaf_abs_le_rhs_sym_relative", GNHAF_REL_TOL);
    let mut sym = CheckSummary::inequality("rhs_sym_le_rhs_plain_relative", GNHAF_REL_TOL);
    let mut partition = CheckSummary::inequality("partition_rhs_minus_lhs_relative", ROUNDING_TOL);
    let top = nmax.min(HAFNIAN_MAX_N);
    let shapes: Vec<(usize, usize)> = (2..=top)
        .flat_map(|n| (1..=(n / 2).min(2)).map(move |k| (k, n)))
        .collect();
    let pmax = nmax.min(PARTITION_MAX_N);

    for i in 0..instances {
        let (k, n) = shapes[i % shapes.len()];
        let z = random::tensor(k, n, rng);
        let case = || format!("instance {i}: k={k} n={n}");
        match gnhaf(&z) {
            Ok(g) => {
                let b = gnhaf_bound(&z);
                bound.slack((b.rhs_sym - g.norm()) / b.rhs_sym, case);
                sym.slack((b.rhs_plain - b.rhs_sym) / b.rhs_plain, case);
            }
            Err(e) => bound.failure(format!("{}: {e}", case())),
        }

        let pn = 1 + i % pmax;
        let inst = random::partition_instance(pn, false, rng);
        match partition_sum_oracle(&inst) {
            Ok(s) => partition.slack((s.rhs - s.lhs) / s.rhs.max(f64::MIN_POSITIVE), || {
                format!("instance {i}: n={pn} w={:?}", inst.composition())
            }),
            Err(e) => partition.failure(format!("instance {i}: {e}")),
        }
    }
    SuiteSummary::new(Suite::Hafnian, vec![bound, sym, partition])
}

fn pairs_suite(rng: &mut ChaCha8Rng, instances: usize) -> SuiteSummary {
    let mut sandwich = CheckSummary::inequality("pair_inequalities", ROUNDING_TOL);
    let mut formula = CheckSummary::identity("closed_form_vs_distribution", ROUNDING_TOL);

    let grid = (0..11usize.pow(4)).map(|code| {
        let digit = |p: u32| (code / 11usize.pow(p) % 11) as f64 / 10.0;
        [digit(0), digit(1), digit(2), digit(3)]
    });
    let random: Vec<[f64; 4]> = (0..instances).map(|_| rng.gen()).collect();
    for q in grid.chain(random) {
        let [a, b, c, d] = q;
        let s = bernoulli_pair_stats(a, b, c, d).expect("inputs in [0, 1]");
        for (name, slack) in s.inequality_slacks() {
            sandwich.slack(slack, || format!("{name} at ({a}, {b}, {c}, {d})"));
        }
        let be = |p: f64| LatticeDistribution::bernoulli(p).expect("p in [0, 1]");
        let r = LatticeDistribution::mixture(&[
            (0.5, &be(a).convolve(&be(b))),
            (0.5, &be(c).convolve(&be(d))),
        ])
        .expect("valid mixture");
        let diff = (s.tv_smooth - r.smoothness())
            .abs()
            .max((s.conc0 - r.concentration(0.0).expect("t = 0")).abs());
        formula.discrepancy(diff, || format!("({a}, {b}, {c}, {d})"));
    }
    SuiteSummary::new(Suite::Pairs, vec![sandwich, formula])
}

fn decomposition_suite(
    rng: &mut ChaCha8Rng,
    instances: usize,
    nmax: usize,
) -> Result<SuiteSummary, CliError> {
    check_cap(nmax)?;
    let mut pairing = CheckSummary::identity("pairing_decomposition_tv", ROUNDING_TOL);
    let mut mean = CheckSummary::identity("mean_identity", 1e-10);
    for i in 0..instances {
        let (model, case) = random_model(i, nmax, rng);
        let phi = Permutation::random(model.n(), rng);
        let exact = exact_distribution(&model)?;
        let dec = pairing_decomposition(&model, &phi)?;
        pairing.discrepancy(tv_distance(&exact, &dec), || {
            format!("{case} phi={:?}", phi.to_one_based())
        });
        let expected =
            model.rows().flatten().map(|d| d.mean()).sum::<f64>() / model.n() as f64;
        mean.discrepancy((exact.mean() - expected).abs(), || case.clone());
    }
    Ok(SuiteSummary::new(Suite::Decomposition, vec![pairing, mean]))
}
