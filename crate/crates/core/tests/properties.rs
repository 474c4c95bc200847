use diagsum::bounds::{
    bernoulli_pair_stats, c_tilde, entrywise_relaxation, inverse_power_moment_bounds, kr_bound,
    theorem_bernoulli_bounds, Functional, ModelBounds,
};
use diagsum::hafnian::{gnhaf, gnhaf_bound, haf, partition_sum_oracle, HafnianTensor};
use diagsum::{
    exact_distribution, pairing_decomposition, random, sample, tv_distance, AtomicDistribution,
    Distribution, Kind, LatticeDistribution, MatrixModel, Permutation,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lattice() -> impl Strategy<Value = LatticeDistribution> {
    (-3i64..=3, prop::collection::vec(0.01f64..1.0, 1..6)).prop_map(|(offset, w)| {
        let total: f64 = w.iter().sum();
        LatticeDistribution::new(offset, w.into_iter().map(|x| x / total).collect()).unwrap()
    })
}

fn atomic() -> impl Strategy<Value = AtomicDistribution> {
    prop::collection::vec((-3.0f64..3.0, 0.01f64..1.0), 1..5).prop_map(|atoms| {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        AtomicDistribution::new(atoms.into_iter().map(|(x, p)| (x, p / total)).collect()).unwrap()
    })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn model(n: usize, variant: u8, seed: u64) -> MatrixModel {
    let mut rng = rng(seed);
    match variant % 3 {
        0 => random::bernoulli_model(n, &mut rng),
        1 => random::three_atom_model(n, Kind::Integer, &mut rng),
        _ => random::three_atom_model(n, Kind::Real, &mut rng),
    }
}

fn total_mass(d: &Distribution) -> f64 {
    d.points().iter().map(|p| p.1).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolve_and_shift_preserve_mass(a in lattice(), b in lattice(), h in -5i64..5) {
        let c = a.convolve(&b).shift(h);
        prop_assert!((c.masses().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!((c.mean() - a.mean() - b.mean() - h as f64).abs() <= 1e-10);
    }

    #[test]
    fn atomic_convolve_preserves_mass(a in atomic(), b in atomic()) {
        let c: Distribution = a.convolve(&b).into();
        prop_assert!((total_mass(&c) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn tv_triangle(a in atomic(), b in atomic(), c in atomic()) {
        prop_assert!(a.tv_distance(&c) <= a.tv_distance(&b) + b.tv_distance(&c) + 1e-12);
    }

    #[test]
    fn concentration_monotone_in_t(a in atomic(), s in 0.0f64..3.0, d in 0.0f64..3.0) {
        prop_assert!(a.concentration(s).unwrap() <= a.concentration(s + d).unwrap() + 1e-12);
    }

    #[test]
    fn convolution_smooths(a in lattice(), b in lattice()) {
        let c = a.convolve(&b);
        prop_assert!(c.smoothness() <= a.smoothness().min(b.smoothness()) + 1e-12);
    }

    #[test]
    fn convolution_spreads(a in atomic(), b in atomic(), t in 0.0f64..2.0) {
        let c = a.convolve(&b);
        let bound = a.concentration(t).unwrap().min(b.concentration(t).unwrap());
        prop_assert!(c.concentration(t).unwrap() <= bound + 1e-12);
    }

    #[test]
    fn lattice_and_atomic_functionals_agree(a in lattice(), t in 0.0f64..3.0) {
        let atoms = a.to_atomic();
        prop_assert!((a.concentration(t).unwrap() - atoms.concentration(t).unwrap()).abs() <= 1e-12);
        prop_assert!(a.tv_distance(&a.shift(1)) - a.smoothness() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn pairing_matches_enumeration(n in 2usize..=5, variant in 0u8..3, seed: u64) {
        let model = model(n, variant, seed);
        let exact = exact_distribution(&model).unwrap();
        let phi = Permutation::random(n, &mut rng(seed ^ 0x5eed));
        let dec = pairing_decomposition(&model, &phi).unwrap();
        prop_assert!(tv_distance(&exact, &dec) <= 1e-12);
    }

    #[test]
    fn exact_law_ignores_row_and_column_order(n in 2usize..=5, variant in 0u8..3, seed: u64) {
        let model = model(n, variant, seed);
        let exact = exact_distribution(&model).unwrap();
        let mut r = rng(seed.wrapping_add(1));
        let rows = model.permute_rows(&Permutation::random(n, &mut r)).unwrap();
        let cols = model.permute_columns(&Permutation::random(n, &mut r)).unwrap();
        prop_assert!(tv_distance(&exact, &exact_distribution(&rows).unwrap()) <= 1e-12);
        prop_assert!(tv_distance(&exact, &exact_distribution(&cols).unwrap()) <= 1e-12);
    }

    #[test]
    fn exact_mean_is_average_row_sum(n in 2usize..=5, variant in 0u8..3, seed: u64) {
        let model = model(n, variant, seed);
        let expected = model.rows().flatten().map(|d| d.mean()).sum::<f64>() / n as f64;
        prop_assert!((exact_distribution(&model).unwrap().mean() - expected).abs() <= 1e-10);
    }

    #[test]
    fn theorem_bounds_dominate(n in 2usize..=5, variant in 0u8..3, seed: u64) {
        let model = model(n, variant, seed);
        let b = ModelBounds::new(&model);
        let phi = Permutation::random(n, &mut rng(!seed));
        for t in [0.0, 0.5, 1.0, 2.0] {
            prop_assert!(b.concentration(t, None).unwrap().holds());
            let zeta = b.zeta_table(t).unwrap();
            prop_assert!(b.generalized(&phi, &zeta, Functional::Concentration(t), None).unwrap().holds());
        }
        if model.kind() == Kind::Integer {
            prop_assert!(b.smoothness(None).unwrap().holds());
            prop_assert!(b.smoothness(Some(1.0)).unwrap().holds());
            let nu = b.nu_table().unwrap().clone();
            prop_assert!(b.generalized(&phi, &nu, Functional::Smoothness, Some(1.0)).unwrap().holds());
        }
        if let Some(p) = model.bernoulli_probabilities() {
            let (s, c) = theorem_bernoulli_bounds(&p, None).unwrap();
            prop_assert!(s.holds() && c.holds());
        }
    }

    #[test]
    fn relaxation_lower_bounds_averages(n in 2usize..=5, variant in 0u8..3, seed: u64) {
        let model = model(n, variant, seed);
        let b = ModelBounds::new(&model);
        for t in [0.0, 1.0] {
            let rel = entrywise_relaxation(&model, Some(t)).unwrap();
            prop_assert!(rel.eta_relaxed.unwrap() <= b.zeta_table(t).unwrap().mean() + 1e-12);
            if let Some(xi) = rel.xi_relaxed {
                prop_assert!(xi <= b.nu_table().unwrap().mean() + 1e-12);
            }
        }
    }
}

// 3/sqrt(count) is a sound statistical bound only for supports of a few
// dozen points, so real-valued models (hundreds of atoms) are excluded.
#[test]
fn sampler_converges() {
    for (i, (n, variant)) in [(3, 0u8), (4, 0), (5, 0), (3, 1), (4, 1)].into_iter().enumerate() {
        let model = model(n, variant, 40 + i as u64);
        let exact = exact_distribution(&model).unwrap().to_atomic();
        let count = 10_000;
        let passes = (0..3)
            .filter(|&s| {
                let empirical = sample(&model, 1000 * i as u64 + s, count).unwrap();
                empirical.tv_distance(&exact) <= 3.0 / (count as f64).sqrt()
            })
            .count();
        assert!(passes >= 2, "variant {variant}: {passes}/3 seeds within bound");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gnhaf_bounded(n in 2usize..=6, k in 1usize..=2, seed: u64) {
        let k = k.min(n / 2);
        let z = random::tensor(k, n, &mut rng(seed));
        let g = gnhaf(&z).unwrap().norm();
        let b = gnhaf_bound(&z);
        prop_assert!(g <= b.rhs_sym * (1.0 + 1e-9));
        prop_assert!(b.rhs_sym <= b.rhs_plain * (1.0 + 1e-9));
    }

    #[test]
    fn gnhaf_invariant_under_symmetrization(n in 2usize..=6, k in 1usize..=2, seed: u64) {
        let z = random::tensor(k.min(n / 2), n, &mut rng(seed));
        let diff = (gnhaf(&z).unwrap() - gnhaf(&z.symmetrized()).unwrap()).norm();
        prop_assert!(diff <= 1e-12);
    }

    #[test]
    fn gnhaf_multilinear(n in 2usize..=6, seed: u64, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let k = (n / 2).min(2);
        let z = random::tensor(k, n, &mut rng(seed));
        let lambda = Complex64::new(re, im);
        let l = (seed % k as u64) as usize;
        let scaled = gnhaf(&z.scale_slice(l, lambda)).unwrap();
        prop_assert!((scaled - lambda * gnhaf(&z).unwrap()).norm() <= 1e-12);
    }

    #[test]
    fn gnhaf_matches_hafnian(k in 1usize..=3, seed: u64) {
        let n = 2 * k;
        let mut r = rng(seed);
        let mut a = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            for j in i + 1..n {
                let x = Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
                a[i][j] = x;
                a[j][i] = x;
            }
        }
        let z = HafnianTensor::from_fn(k, n, |_, i, j| a[i][j]).unwrap();
        let factor = (1..=k).map(|i| i as f64).product::<f64>() * 2f64.powi(k as i32)
            / (1..=n).map(|i| i as f64).product::<f64>();
        prop_assert!((gnhaf(&z).unwrap() - haf(&a).unwrap() * factor).norm() <= 1e-12);
    }

    #[test]
    fn partition_inequality(n in 1usize..=6, seed: u64) {
        let s = partition_sum_oracle(&random::partition_instance(n, false, &mut rng(seed))).unwrap();
        prop_assert!(s.lhs <= s.rhs * (1.0 + 1e-12));
        let s = partition_sum_oracle(&random::partition_instance(n, true, &mut rng(seed))).unwrap();
        prop_assert!((s.lhs - s.rhs).abs() <= 1e-12 * s.rhs.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constant_bracket_and_monotonicity(
        log_alpha in -2.0f64..2.0,
        factor in 1.0f64..5.0,
        beta in 0.01f64..=1.0,
    ) {
        let alpha = 10f64.powf(log_alpha);
        let c = c_tilde(alpha, beta).unwrap();
        prop_assert!(c.value >= 1.0 && c.value <= 1.0 + beta / alpha + 1e-9);
        prop_assert!(c_tilde(alpha * factor, beta).unwrap().value <= c.value + 1e-9);
    }

    #[test]
    fn pair_stats_invariants(a in 0.0f64..=1.0, b in 0.0f64..=1.0, c in 0.0f64..=1.0, d in 0.0f64..=1.0) {
        let s = bernoulli_pair_stats(a, b, c, d).unwrap();
        prop_assert!((0.0..=1.0).contains(&s.w));
        prop_assert!((0.0..=1.0 + 1e-15).contains(&s.sigma2) && s.sigma2 >= -1e-15);
        prop_assert!(s.tau <= 0.5);
        for (name, slack) in s.inequality_slacks() {
            prop_assert!(slack >= -1e-12, "{} by {}", name, slack);
        }
        let be = |p: f64| LatticeDistribution::bernoulli(p).unwrap();
        let r = LatticeDistribution::mixture(&[
            (0.5, &be(a).convolve(&be(b))),
            (0.5, &be(c).convolve(&be(d))),
        ]).unwrap();
        prop_assert!((s.tv_smooth - r.smoothness()).abs() <= 1e-12);
        prop_assert!((s.conc0 - r.concentration(0.0).unwrap()).abs() <= 1e-12);
        prop_assert!((s.one_minus_tv_piecewise() - (1.0 - s.tv_smooth)).abs() <= 1e-12);
        prop_assert!((s.one_minus_conc0_alt() - (1.0 - s.conc0)).abs() <= 1e-12);
    }

    #[test]
    fn moment_bounds_dominate(seed: u64, log_alpha in -2.0f64..2.0, beta in 0.01f64..=1.0, c in 0.01f64..10.0) {
        let y = random::nonnegative_law(&mut rng(seed));
        let alpha = 10f64.powf(log_alpha);
        let b = inverse_power_moment_bounds(&y, alpha, beta, c).unwrap();
        prop_assert!(b.exact <= b.taylor_rhs * (1.0 + 1e-12));
        if let Some(cor) = b.cor_rhs {
            prop_assert!(b.exact <= cor * (1.0 + 1e-12));
        }
    }

    #[test]
    fn kr_bound_decreasing(q in prop::collection::vec(0.0f64..=1.0, 1..8), i in 0usize..8, drop in 0.0f64..=1.0) {
        let i = i % q.len();
        let mut lower = q.clone();
        lower[i] *= 1.0 - drop;
        prop_assert!(kr_bound(&lower).unwrap() <= kr_bound(&q).unwrap() + 1e-15);
    }
}
