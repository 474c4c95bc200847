use std::path::PathBuf;

use clap::{Parser, Subcommand};
use diagsum::bounds::{
    c_tilde, theorem_bernoulli_bounds, BoundReport, ConstantResult, Functional, ModelBounds,
};
use diagsum::hafnian::{gnhaf, gnhaf_bound};
use diagsum::{exact_distribution, Kind, MatrixModel, Permutation};
use serde::Serialize;

use crate::error::CliError;
use crate::model_file::read_model;
use crate::output::{emit, to_json};
use crate::tensor_file::read_tensor;
use crate::verify::{self, Suite, VerifyReport};

const DEFAULT_T: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

#[derive(Debug, Parser)]
#[command(name = "diagsum", version, about = "Exact laws and smoothness/concentration bounds for random diagonal sums")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact law of S_n with its smoothness and concentration.
    Exact {
        model: PathBuf,
        /// Window lengths for the concentration function.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_T)]
        t: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Every applicable upper bound, compared with the exact value when n is
    /// within the enumeration cap.
    Bounds {
        model: PathBuf,
        /// Fixed epsilon in (0, 1]; chosen per bound when absent.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_T)]
        t: Vec<f64>,
        /// Row pairing for the generalized bounds: `identity` or 1-based
        /// images such as `2,1,4,3`.
        #[arg(long)]
        phi: Option<String>,
        /// Also write one CSV row per bound.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Table of the constants C~(alpha, beta).
    Constants {
        #[arg(long, value_delimiter = ',', required = true)]
        alpha_list: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded randomized checks of the library's inequalities.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generalized normalized hafnian of a tensor file and its bounds.
    Hafnian {
        tensor: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Report {
    Exact(ExactReport),
    Bounds(BoundsReport),
    Constants(ConstantsReport),
    Verify(VerifyReport),
    Hafnian(HafnianReport),
}

#[derive(Debug, Serialize)]
pub struct TValue {
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct ExactReport {
    pub n: usize,
    pub kind: Kind,
    /// `[location, mass]` pairs in increasing order.
    pub distribution: Vec<(f64, f64)>,
    pub mean: f64,
    pub variance: f64,
    pub smoothness: Option<f64>,
    pub concentration: Vec<TValue>,
}

#[derive(Debug, Serialize)]
pub struct RelaxationRow {
    pub t: f64,
    pub xi_relaxed: Option<f64>,
    pub eta_relaxed: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Skipped {
    pub bound: &'static str,
    pub t: Option<f64>,
    pub reason: String,
}

#[derive(Debug, Serialize)]
pub struct BoundsReport {
    pub n: usize,
    pub kind: Kind,
    pub exact_available: bool,
    pub violations: usize,
    pub bounds: Vec<BoundReport>,
    pub skipped: Vec<Skipped>,
    pub relaxation: Vec<RelaxationRow>,
}

#[derive(Debug, Serialize)]
pub struct ConstantRow {
    #[serde(flatten)]
    pub result: ConstantResult,
    /// `C~/√π`.
    pub over_sqrt_pi: f64,
}

#[derive(Debug, Serialize)]
pub struct ConstantsReport {
    pub beta: f64,
    pub constants: Vec<ConstantRow>,
}

#[derive(Debug, Serialize)]
pub struct HafnianReport {
    pub k: usize,
    pub n: usize,
    /// `[re, im]`.
    pub gnhaf: [f64; 2],
    pub abs: f64,
    pub rhs_sym: f64,
    pub rhs_plain: f64,
    pub holds: bool,
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    n: usize,
    bound_name: &'a str,
    t: Option<f64>,
    epsilon: f64,
    aggregate: f64,
    constant_over_sqrt_pi: f64,
    bound_value: f64,
    clipped_value: f64,
    exact_value: Option<f64>,
    slack: Option<f64>,
}

/// Runs a command and returns its exit status: 0 when every checked
/// inequality holds, 1 otherwise.
pub fn run(command: Command) -> Result<u8, CliError> {
    let (report, violations, out) = match command {
        Command::Exact { model, t, out } => (Report::Exact(exact(&read_model(&model)?, &t)?), 0, out),
        Command::Bounds {
            model,
            epsilon,
            t,
            phi,
            csv,
            out,
        } => {
            let model = read_model(&model)?;
            let phi = phi.map(|p| parse_phi(&p, model.n())).transpose()?;
            let report = bounds(&model, epsilon, &t, phi.as_ref())?;
            if let Some(path) = csv {
                emit(Some(&path), &bounds_csv(&report.bounds)?)?;
            }
            let v = report.violations;
            (Report::Bounds(report), v, out)
        }
        Command::Constants {
            alpha_list,
            beta,
            out,
        } => (Report::Constants(constants(&alpha_list, beta)?), 0, out),
        Command::Verify {
            seed,
            instances,
            nmax,
            suite,
            out,
        } => {
            let report = verify::run(suite, seed, instances, nmax)?;
            let v = report.violations;
            (Report::Verify(report), v, out)
        }
        Command::Hafnian { tensor, out } => {
            let report = hafnian(&read_tensor(&tensor)?)?;
            let v = usize::from(!report.holds);
            (Report::Hafnian(report), v, out)
        }
    };
    emit(out.as_deref(), to_json(&report).as_bytes())?;
    Ok(if violations > 0 { 1 } else { 0 })
}

fn check_t(t: &[f64]) -> Result<(), CliError> {
    match t.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        Some(x) => Err(CliError::Usage(format!("--t values must be finite and >= 0, got {x}"))),
        None => Ok(()),
    }
}

pub fn exact(model: &MatrixModel, t: &[f64]) -> Result<ExactReport, CliError> {
    check_t(t)?;
    let d = exact_distribution(model)?;
    let mut concentration = Vec::with_capacity(t.len());
    for &t in t {
        concentration.push(TValue {
            t,
            value: d.concentration(t)?,
        });
    }
    Ok(ExactReport {
        n: model.n(),
        kind: model.kind(),
        distribution: d.points(),
        mean: d.mean(),
        variance: d.variance(),
        smoothness: d.as_lattice().map(|l| l.smoothness()),
        concentration,
    })
}

pub fn parse_phi(text: &str, n: usize) -> Result<Permutation, CliError> {
    if text.trim() == "identity" {
        return Ok(Permutation::identity(n));
    }
    let images = text
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("--phi {text:?}: {e}")))?;
    if images.len() != n {
        return Err(CliError::Usage(format!(
            "--phi has {} images, model has n = {n}",
            images.len()
        )));
    }
    Ok(Permutation::from_one_based(&images)?)
}

pub fn bounds(
    model: &MatrixModel,
    epsilon: Option<f64>,
    t: &[f64],
    phi: Option<&Permutation>,
) -> Result<BoundsReport, CliError> {
    check_t(t)?;
    if let Some(e) = epsilon {
        if !(e > 0.0 && e <= 1.0) {
            return Err(CliError::Usage(format!("--epsilon must lie in (0, 1], got {e}")));
        }
    }
    let b = ModelBounds::new(model);
    let mut bounds = Vec::new();
    let mut skipped = Vec::new();
    let mut push = |bound: &'static str, t: Option<f64>, r: diagsum::Result<BoundReport>| match r {
        Ok(r) => bounds.push(r),
        Err(e) => {
            eprintln!("{bound}: {e}");
            skipped.push(Skipped {
                bound,
                t,
                reason: e.to_string(),
            });
        }
    };

    if model.kind() == Kind::Integer {
        push("smoothness", None, b.smoothness(epsilon));
    }
    for &t in t {
        push("concentration", Some(t), b.concentration(t, epsilon));
    }
    if let Some(p) = model.bernoulli_probabilities() {
        match theorem_bernoulli_bounds(&p, epsilon) {
            Ok((s, c)) => {
                push("bernoulli_smoothness", None, Ok(s));
                push("bernoulli_concentration", Some(0.0), Ok(c));
            }
            Err(e) => push("bernoulli", None, Err(e)),
        }
    }
    if let Some(phi) = phi {
        if model.kind() == Kind::Integer {
            let nu = b.nu_table()?.clone();
            push(
                "generalized_smoothness",
                None,
                b.generalized(phi, &nu, Functional::Smoothness, epsilon),
            );
        }
        for &t in t {
            let zeta = b.zeta_table(t)?;
            push(
                "generalized_concentration",
                Some(t),
                b.generalized(phi, &zeta, Functional::Concentration(t), epsilon),
            );
        }
    }

    let mut relaxation = Vec::with_capacity(t.len());
    for &t in t {
        let r = b.relaxation(Some(t))?;
        relaxation.push(RelaxationRow {
            t,
            xi_relaxed: r.xi_relaxed,
            eta_relaxed: r.eta_relaxed,
        });
    }

    if bounds.is_empty() {
        let reasons: Vec<String> = skipped.iter().map(|s| s.reason.clone()).collect();
        return Err(CliError::Usage(format!(
            "no bound applies: {}",
            reasons.join("; ")
        )));
    }
    Ok(BoundsReport {
        n: model.n(),
        kind: model.kind(),
        exact_available: b.exact().is_some(),
        violations: bounds.iter().filter(|r| !r.holds()).count(),
        bounds,
        skipped,
        relaxation,
    })
}

pub fn bounds_csv(reports: &[BoundReport]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        let name = serde_json::to_value(r.bound_name).expect("enum serializes");
        w.serialize(CsvRow {
            n: r.n,
            bound_name: name.as_str().unwrap_or_default(),
            t: r.t,
            epsilon: r.epsilon,
            aggregate: r.aggregate,
            constant_over_sqrt_pi: r.constant_over_sqrt_pi,
            bound_value: r.bound_value,
            clipped_value: r.clipped_value,
            exact_value: r.exact_value,
            slack: r.slack,
        })?;
    }
    w.into_inner()
        .map_err(|e| CliError::Csv(csv::Error::from(e.into_error())))
}

pub fn constants(alphas: &[f64], beta: f64) -> Result<ConstantsReport, CliError> {
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let result = c_tilde(alpha, beta)?;
        let over_sqrt_pi = result.value / std::f64::consts::PI.sqrt();
        rows.push(ConstantRow {
            result,
            over_sqrt_pi,
        });
    }
    Ok(ConstantsReport {
        beta,
        constants: rows,
    })
}

pub fn hafnian(z: &diagsum::hafnian::HafnianTensor) -> Result<HafnianReport, CliError> {
    let g = gnhaf(z)?;
    let b = gnhaf_bound(z);
    let abs = g.norm();
    let slack = 1e-9;
    Ok(HafnianReport {
        k: z.k(),
        n: z.n(),
        gnhaf: [g.re, g.im],
        abs,
        rhs_sym: b.rhs_sym,
        rhs_plain: b.rhs_plain,
        holds: abs <= b.rhs_sym * (1.0 + slack) && b.rhs_sym <= b.rhs_plain * (1.0 + slack),
    })
}
