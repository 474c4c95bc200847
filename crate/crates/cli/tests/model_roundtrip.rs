use diagsum::{random, Distribution, Kind};
use diagsum_cli::model_file::{model_to_json, parse_model};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn max_entry_gap(a: &Distribution, b: &Distribution) -> f64 {
    let (pa, pb) = (a.points(), b.points());
    assert_eq!(pa.len(), pb.len());
    pa.iter()
        .zip(&pb)
        .map(|(x, y)| (x.0 - y.0).abs().max((x.1 - y.1).abs()))
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_write_round_trip(n in 2usize..=5, variant in 0u8..3, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = match variant {
            0 => random::bernoulli_model(n, &mut rng),
            1 => random::three_atom_model(n, Kind::Integer, &mut rng),
            _ => random::three_atom_model(n, Kind::Real, &mut rng),
        };
        let again = parse_model(&model_to_json(&model)).unwrap();
        prop_assert_eq!(again.n(), n);
        prop_assert_eq!(again.kind(), model.kind());
        for j in 0..n {
            for r in 0..n {
                prop_assert!(max_entry_gap(model.entry(j, r), again.entry(j, r)) <= 1e-15);
            }
        }
    }
}
