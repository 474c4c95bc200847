//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::time::{Duration, Instant};

use diagsum::bounds::{
    bernoulli_pair_stats, c_of_alpha, c_tilde, inverse_power_moment_bounds, kr_bound,
    theorem_bernoulli_bounds, two_point_extremal, Functional, ModelBounds, BoundReport,
};
use diagsum::hafnian::{gnhaf, gnhaf_bound, partition_sum_oracle};
use diagsum::random;
use diagsum::{
    exact_distribution, pairing_decomposition, tv_distance, Kind, LatticeDistribution,
    MatrixModel, Permutation,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn constants_regression() -> Outcome {
    let a = c_of_alpha(0.125).map_err(|e| e.to_string())?;
    let b = c_of_alpha(0.25).map_err(|e| e.to_string())?;
    check((a.value - 1.9241).abs() <= 1e-3, || format!("C(1/8) = {}", a.value))?;
    check((a.maximizer - 1.97329).abs() <= 1e-3, || {
        format!("argmax C(1/8) = {}", a.maximizer)
    })?;
    check((b.value - 1.5593).abs() <= 1e-3, || format!("C(1/4) = {}", b.value))?;
    check((b.maximizer - 2.544854).abs() <= 1e-4, || {
        format!("argmax C(1/4) = {}", b.maximizer)
    })?;
    Ok(format!(
        "C(1/8) = {:.6} at {:.7}, C(1/4) = {:.6} at {:.7}",
        a.value, a.maximizer, b.value, b.maximizer
    ))
}

fn constant_brackets() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let tol = 1e-9;
    for _ in 0..100 {
        let alpha = 10f64.powf(rng.gen_range(-2.0..=2.0));
        let beta = 1.0 - rng.gen::<f64>();
        let c = c_tilde(alpha, beta).map_err(|e| e.to_string())?;
        check(
            c.value >= 1.0 - tol && c.value <= 1.0 + beta / alpha + tol,
            || format!("C~({alpha}, {beta}) = {} outside [1, 1+beta/alpha]", c.value),
        )?;
        let larger = alpha * (1.0 + rng.gen_range(0.0..3.0));
        let d = c_tilde(larger, beta).map_err(|e| e.to_string())?;
        check(d.value <= c.value + tol, || {
            format!(
                "C~({larger}, {beta}) = {} exceeds C~({alpha}, {beta}) = {}",
                d.value, c.value
            )
        })?;
    }
    Ok("100 random (alpha, beta): bracket and monotonicity hold".into())
}

struct Worst {
    count: usize,
    slack: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Self {
            count: 0,
            slack: f64::INFINITY,
            at: String::new(),
        }
    }

    fn record(&mut self, r: &BoundReport, label: &str) {
        self.count += 1;
        if let Some(s) = r.slack {
            if s < self.slack {
                self.slack = s;
                self.at = format!("{label} {:?} n={}", r.bound_name, r.n);
            }
        }
    }
}

fn theorem_dominance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = Worst::new();
    let per_config = 500;
    for n in 2..=6 {
        for config in ["bernoulli", "integer-3-atom", "real-3-atom"] {
            for _ in 0..per_config {
                let p = random::bernoulli_probabilities(n, &mut rng);
                let model = match config {
                    "bernoulli" => MatrixModel::bernoulli(&p).unwrap(),
                    "integer-3-atom" => random::three_atom_model(n, Kind::Integer, &mut rng),
                    _ => random::three_atom_model(n, Kind::Real, &mut rng),
                };
                let phi = Permutation::random(n, &mut rng);
                let b = ModelBounds::with_cap(&model, 9);
                let err = |e: diagsum::Error| format!("{config} n={n}: {e}");
                for t in [0.0, 0.5, 1.0] {
                    worst.record(&b.concentration(t, None).map_err(err)?, config);
                    let zeta = b.zeta_table(t).map_err(err)?;
                    let r = b
                        .generalized(&phi, &zeta, Functional::Concentration(t), None)
                        .map_err(err)?;
                    worst.record(&r, config);
                }
                if model.kind() == Kind::Integer {
                    worst.record(&b.smoothness(None).map_err(err)?, config);
                    let nu = b.nu_table().map_err(err)?.clone();
                    let r = b
                        .generalized(&phi, &nu, Functional::Smoothness, None)
                        .map_err(err)?;
                    worst.record(&r, config);
                }
                if config == "bernoulli" {
                    let (s, c) = theorem_bernoulli_bounds(&p, None).map_err(err)?;
                    worst.record(&s, config);
                    worst.record(&c, config);
                }
            }
        }
    }
    check(worst.slack >= -1e-10, || {
        format!("bound - exact = {:e} at {}", worst.slack, worst.at)
    })?;
    Ok(format!(
        "{} bound evaluations, min(bound - exact) = {:.3e} ({})",
        worst.count, worst.slack, worst.at
    ))
}

fn pairing_equality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut max_tv: f64 = 0.0;
    for i in 0..100 {
        let n = 2 + i % 5;
        let model = match i % 3 {
            0 => random::bernoulli_model(n, &mut rng),
            1 => random::three_atom_model(n, Kind::Integer, &mut rng),
            _ => random::three_atom_model(n, Kind::Real, &mut rng),
        };
        let exact = exact_distribution(&model).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let phi = Permutation::random(n, &mut rng);
            let dec = pairing_decomposition(&model, &phi).map_err(|e| e.to_string())?;
            max_tv = max_tv.max(tv_distance(&dec, &exact));
        }
    }
    check(max_tv <= 1e-12, || format!("max TV = {max_tv:e}"))?;
    Ok(format!("500 (model, phi) pairs, max TV = {max_tv:.3e}"))
}

fn bernoulli_pair_algebra() -> Outcome {
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let mut max_diff: f64 = 0.0;
    let mut float_slack = f64::INFINITY;
    let mut points = 0;
    for &a in &grid {
        for &b in &grid {
            for &c in &grid {
                for &d in &grid {
                    points += 1;
                    let s = bernoulli_pair_stats(a, b, c, d).map_err(|e| e.to_string())?;
                    let be = |p: f64| LatticeDistribution::bernoulli(p).unwrap();
                    let r = LatticeDistribution::mixture(&[
                        (0.5, &be(a).convolve(&be(b))),
                        (0.5, &be(c).convolve(&be(d))),
                    ])
                    .map_err(|e| e.to_string())?;
                    max_diff = max_diff
                        .max((s.tv_smooth - r.smoothness()).abs())
                        .max((s.conc0 - r.concentration(0.0).unwrap()).abs());
                    for (_, slack) in s.inequality_slacks() {
                        float_slack = float_slack.min(slack);
                    }
                }
            }
        }
    }
    check(max_diff <= 1e-12, || format!("formula vs oracle differ by {max_diff:e}"))?;
    exact_sandwiches()?;

    // columns (u,v) = (0,0),(1,0),(2,0),(2,1),(3,1),(4,2); rows 1-tv, w, 1-Q(R;0), sigma^2
    let columns = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (2.0, 1.0), (3.0, 1.0), (4.0, 2.0)];
    let rows = [
        [0.0, 0.5, 0.0, 0.0, 0.5, 0.0],
        [0.0, 0.5, 1.0, 0.0, 0.5, 0.0],
        [0.0, 0.5, 0.0, 0.5, 0.5, 0.0],
        [0.0, 0.25, 0.0, 1.0, 0.25, 0.0],
    ];
    let mut hits = [0usize; 6];
    for bits in 0..16u32 {
        let x = |i: u32| f64::from((bits >> i) & 1);
        let s = bernoulli_pair_stats(x(0), x(1), x(2), x(3)).unwrap();
        let col = columns
            .iter()
            .position(|&uv| uv == (s.u, s.v))
            .ok_or_else(|| format!("(u,v) = ({}, {}) not in table", s.u, s.v))?;
        hits[col] += 1;
        let got = [1.0 - s.tv_smooth, s.w, 1.0 - s.conc0, s.sigma2];
        for (row, value) in rows.iter().zip(got) {
            check(row[col] == value, || {
                format!("table mismatch at (u,v) = {:?}: {value} vs {}", columns[col], row[col])
            })?;
        }
    }
    check(hits.iter().all(|&h| h > 0), || format!("unreached columns: {hits:?}"))?;
    Ok(format!(
        "{points} grid points, max formula/oracle diff = {max_diff:.1e}, sandwiches exact \
         (f64 min slack {float_slack:.1e}), table reproduced"
    ))
}

/// The sandwich inequalities on the decimal grid in exact integer
/// arithmetic, in units of 1/1600.
fn exact_sandwiches() -> Result<(), String> {
    let one: i64 = 1600;
    for code in 0..11i64.pow(4) {
        let [a, b, c, d] = [code % 11, code / 11 % 11, code / 121 % 11, code / 1331];
        let sum = a + b + c + d;
        let u = 160 * sum;
        let v = 16 * (a * b + c * d);
        let w = u / 2 - v;
        let sigma2 = u / 2 + v - 4 * sum * sum;
        let tv4 = 2 * (one - w) + (2 * one - 4 * w - v).abs() + (2 * w - v).abs();
        let nu4 = 4 * one - tv4;
        let conc0 = (one - w - v / 2).max(w).max(v / 2);
        let zeta = one - conc0;

        let s = bernoulli_pair_stats(
            a as f64 / 10.0,
            b as f64 / 10.0,
            c as f64 / 10.0,
            d as f64 / 10.0,
        )
        .unwrap();
        let scale = one as f64;
        let drift = [
            (s.tv_smooth - tv4 as f64 / (4.0 * scale)).abs(),
            (s.conc0 - conc0 as f64 / scale).abs(),
            (s.sigma2 - sigma2 as f64 / scale).abs(),
        ];
        check(drift.iter().all(|&x| x <= 1e-12), || {
            format!("float and exact forms disagree at ({a},{b},{c},{d})/10: {drift:?}")
        })?;

        let holds = [
            ("min{w,1-w} <= 1-tv", 4 * w.min(one - w) <= nu4),
            ("1-tv <= min{2w,1-w}", nu4 <= 4 * (2 * w).min(one - w)),
            ("sigma2/2 <= 1-conc0", sigma2 <= 2 * zeta),
            ("1-conc0 <= 2 sigma2", 2 * zeta <= 4 * sigma2),
            ("max{u-2,0} <= v", (u - 2 * one).max(0) <= v),
            (
                "v <= min{u^2/4, 2-u+u^2/4}",
                v <= (4 * sum * sum).min(2 * one - u + 4 * sum * sum),
            ),
        ];
        for (name, ok) in holds {
            check(ok, || format!("{name} fails at ({a},{b},{c},{d})/10"))?;
        }
    }
    Ok(())
}

fn gnhaf_inequality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = f64::INFINITY;
    let shapes: Vec<(usize, usize)> = (2..=6)
        .flat_map(|n| (1..=(n / 2).min(2)).map(move |k| (k, n)))
        .collect();
    for i in 0..1000 {
        let (k, n) = shapes[i % shapes.len()];
        let z = random::tensor(k, n, &mut rng);
        let g = gnhaf(&z).map_err(|e| e.to_string())?.norm();
        let b = gnhaf_bound(&z);
        let rel_a = (b.rhs_sym - g) / b.rhs_sym.max(f64::MIN_POSITIVE);
        let rel_b = (b.rhs_plain - b.rhs_sym) / b.rhs_plain.max(f64::MIN_POSITIVE);
        worst = worst.min(rel_a).min(rel_b);
    }
    check(worst >= -1e-9, || format!("relative slack {worst:e}"))?;

    let mut max_gap: f64 = 0.0;
    for i in 0..100 {
        let (k, n) = shapes[i % shapes.len()];
        let z = random::constant_slice_tensor(k, n, &mut rng);
        let g = gnhaf(&z).map_err(|e| e.to_string())?.norm();
        max_gap = max_gap.max((g - gnhaf_bound(&z).rhs_sym).abs());
    }
    check(max_gap <= 1e-12, || format!("constant-slice gap {max_gap:e}"))?;

    for n in 2..=6 {
        for k in 1..=n / 2 {
            let ones = diagsum::hafnian::HafnianTensor::from_fn(k, n, |_, _, _| {
                Complex64::new(1.0, 0.0)
            })
            .unwrap();
            let g = gnhaf(&ones).unwrap();
            check((g - Complex64::new(1.0, 0.0)).norm() <= 1e-12, || {
                format!("all-ones k={k} n={n} gives {g}")
            })?;
        }
    }
    Ok(format!(
        "1000 random tensors, min relative slack = {worst:.3e}; constant-slice gap = {max_gap:.1e}"
    ))
}

fn partition_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = f64::INFINITY;
    for i in 0..500 {
        let n = 1 + i % 6;
        let inst = random::partition_instance(n, false, &mut rng);
        let s = partition_sum_oracle(&inst).map_err(|e| e.to_string())?;
        worst = worst.min(s.rhs - s.lhs);
        check(s.lhs <= s.rhs * (1.0 + 1e-12), || {
            format!("lhs {} > rhs {} for w = {:?}", s.lhs, s.rhs, inst.composition())
        })?;
    }
    let mut max_gap: f64 = 0.0;
    for i in 0..100 {
        let inst = random::partition_instance(1 + i % 6, true, &mut rng);
        let s = partition_sum_oracle(&inst).map_err(|e| e.to_string())?;
        max_gap = max_gap.max((s.rhs - s.lhs).abs() / s.rhs.max(1.0));
    }
    check(max_gap <= 1e-12, || format!("constant-g gap {max_gap:e}"))?;
    Ok(format!(
        "500 instances, min(rhs - lhs) = {worst:.3e}; constant g relative gap = {max_gap:.1e}"
    ))
}

fn moment_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut with_cor = 0;
    let mut worst: f64 = f64::INFINITY;
    for _ in 0..1000 {
        let y = random::nonnegative_law(&mut rng);
        let alpha = 10f64.powf(rng.gen_range(-2.0..=2.0));
        let beta = 1.0 - rng.gen::<f64>();
        let c = rng.gen_range(0.01..10.0);
        let b = inverse_power_moment_bounds(&y, alpha, beta, c).map_err(|e| e.to_string())?;
        let tol = 1e-12 * b.exact;
        check(b.exact <= b.taylor_rhs + tol, || {
            format!("taylor: exact {} > {} (alpha {alpha}, beta {beta}, c {c})", b.exact, b.taylor_rhs)
        })?;
        worst = worst.min(b.taylor_rhs - b.exact);
        if let Some(cor) = b.cor_rhs {
            with_cor += 1;
            check(b.exact <= cor + tol, || {
                format!("corollary: exact {} > {cor} (alpha {alpha}, beta {beta})", b.exact)
            })?;
        }
    }
    let mut max_gap: f64 = 0.0;
    let mut family = 0;
    while family < 100 {
        let alpha = 10f64.powf(rng.gen_range(-2.0..=2.0));
        let beta = rng.gen_range(0.01..1.0);
        let c = c_tilde(alpha, beta).map_err(|e| e.to_string())?;
        if !c.attained || c.maximizer <= 0.0 {
            continue;
        }
        family += 1;
        let y = two_point_extremal(c.maximizer).map_err(|e| e.to_string())?;
        let b = inverse_power_moment_bounds(&y, alpha, beta, 1.0).map_err(|e| e.to_string())?;
        let cor = b.cor_rhs.ok_or("two-point law must satisfy Var = E")?;
        max_gap = max_gap.max((b.exact - cor).abs());
    }
    check(max_gap <= 1e-10, || format!("two-point gap {max_gap:e}"))?;
    Ok(format!(
        "1000 random laws ({with_cor} with Var <= E), min taylor slack = {worst:.3e}; two-point gap = {max_gap:.1e}"
    ))
}

fn kr_consistency() -> Outcome {
    let half = LatticeDistribution::bernoulli(0.5).unwrap();
    let mut sum = half.clone();
    let mut worst: f64 = f64::INFINITY;
    for n in 2..=12 {
        sum = sum.convolve(&half);
        let smooth = kr_bound(&vec![half.smoothness(); n]).unwrap();
        worst = worst.min(smooth - sum.smoothness());
        for t in [0.0, 0.5, 1.0, 2.0] {
            let q = half.concentration(t).unwrap();
            let bound = kr_bound(&vec![q; n]).unwrap();
            worst = worst.min(bound - sum.concentration(t).unwrap());
        }
    }
    check(worst >= 0.0, || format!("min slack {worst:e}"))?;
    Ok(format!("n = 2..12, t in {{0, 0.5, 1, 2}}, min slack = {worst:.4}"))
}

fn trend_report() -> Outcome {
    let mut line = Vec::new();
    let mut previous = f64::INFINITY;
    let mut decreasing = true;
    for n in 2..=9 {
        let model = MatrixModel::bernoulli(&vec![vec![0.5; n]; n]).unwrap();
        let r = ModelBounds::with_cap(&model, 9)
            .smoothness(None)
            .map_err(|e| e.to_string())?;
        decreasing &= r.bound_value <= previous;
        previous = r.bound_value;
        line.push(format!(
            "n={n}: {:.4}/{:.4}",
            r.bound_value,
            r.exact_value.unwrap_or(f64::NAN)
        ));
    }
    Ok(format!(
        "logged only (bound/exact smoothness, all Be(1/2)); non-increasing: {decreasing}; {}",
        line.join(", ")
    ))
}

/// Name, time budget in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("constants regression", 1, constants_regression),
        ("constant brackets and monotonicity", 10, constant_brackets),
        ("theorem oracle dominance", 300, theorem_dominance),
        ("pairing decomposition equality", 120, pairing_equality),
        ("Bernoulli pair algebra", 30, bernoulli_pair_algebra),
        ("gnhaf inequality", 60, gnhaf_inequality),
        ("partition oracle", 60, partition_oracle),
        ("inverse-power-moment bounds", 30, moment_bounds),
        ("Kolmogorov-Rogozin consistency", 10, kr_consistency),
        ("order-of-magnitude trend", 60, trend_report),
    ];
    let mut failures = 0;
    for (i, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if outcome.is_ok() && elapsed > Duration::from_secs(budget) {
            outcome = Err(format!("took {elapsed:.2?}, budget {budget}s"));
        }
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        if outcome.is_err() {
            failures += 1;
        }
        println!(
            "[{tag}] criterion {:>2} {name}: {detail} ({elapsed:.2?})",
            i + 1
        );
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
