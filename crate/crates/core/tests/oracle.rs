use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use roughsupport::comb::{
    brute_force_support_pair, brute_force_support_triple, sample_circular_comb_with, sample_line_comb_with,
    support_pair, support_triple, HeightDistribution, Placement,
};

fn placement(k: u8) -> Placement {
    [Placement::MidpointGrid, Placement::PaperGrid, Placement::UniformRandom][k as usize % 3]
}

fn dist(k: u8) -> HeightDistribution {
    match k % 3 {
        0 => HeightDistribution::Uniform01,
        1 => HeightDistribution::Beta { alpha: 2.0, beta: 2.0 },
        _ => HeightDistribution::Triangular { mode: 0.8 },
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn hull_walk_matches_pair_oracle(seed in any::<u64>(), n in 2usize..=60, p in 0u8..3, d in 0u8..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // random placement can leave one side of the centre empty
        let comb = sample_line_comb_with::<f64, _>(n, &dist(d).sampler().unwrap(), placement(p), &mut rng);
        prop_assume!(comb.is_ok());
        let comb = comb.unwrap();
        match (support_pair(&comb), brute_force_support_pair(&comb, 200)) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!((a.left_index, a.right_index), (b.left_index, b.right_index));
                prop_assert!(a.a1 < 0.0 && a.a2 > 0.0);
            }
            (Err(a), Err(b)) => prop_assert!(a.is_degenerate() && b.is_degenerate(), "{a} / {b}"),
            (a, b) => prop_assert!(false, "disagreement: {a:?} vs {b:?}"),
        }
    }

    #[test]
    fn pivoting_matches_triple_oracle(seed in any::<u64>(), n in 3usize..=20, p in 0u8..3, d in 0u8..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let comb = sample_circular_comb_with::<f64, _>(n, &dist(d).sampler().unwrap(), placement(p), &mut rng);
        prop_assume!(comb.is_ok());
        let comb = comb.unwrap();
        match (support_triple(&comb), brute_force_support_triple(&comb, 60)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.indices, b.indices),
            (Err(a), Err(b)) => prop_assert!(a.is_degenerate() && b.is_degenerate(), "{a} / {b}"),
            (a, b) => prop_assert!(false, "disagreement: {a:?} vs {b:?}"),
        }
    }

    #[test]
    fn support_is_invariant_under_height_scaling(seed in any::<u64>(), n in 3usize..=40, factor in 0.1f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let comb = sample_line_comb_with::<f64, _>(n, &dist(0).sampler().unwrap(), Placement::MidpointGrid, &mut rng)
            .unwrap();
        if let (Ok(a), Ok(b)) = (support_pair(&comb), support_pair(&comb.scaled(factor))) {
            prop_assert_eq!((a.left_index, a.right_index), (b.left_index, b.right_index));
        }
    }
}

#[test]
fn oracles_refuse_large_combs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let heights = HeightDistribution::Uniform01.sampler().unwrap();
    let line = sample_line_comb_with::<f64, _>(201, &heights, Placement::MidpointGrid, &mut rng).unwrap();
    assert!(brute_force_support_pair(&line, 200).is_err());
    let circle = sample_circular_comb_with::<f64, _>(61, &heights, Placement::MidpointGrid, &mut rng).unwrap();
    assert!(brute_force_support_triple(&circle, 60).is_err());
}
