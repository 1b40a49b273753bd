mod common;

use common::max_abs_diff;
use mrhinf::ltisys::{delay, lift, series};
use mrhinf::multirate::{block, decimate, expand, polyphase_interpolate, selection_matrix, unblock};
use mrhinf::synthesis::extract_filterbank;
use mrhinf::DecimationPattern;
use proptest::prelude::*;
use rand::SeedableRng;

fn pattern() -> impl Strategy<Value = DecimationPattern> {
    prop::collection::vec(0u8..2, 1..10)
        .prop_filter("needs a retained sample", |b| b.contains(&1))
        .prop_map(|b| DecimationPattern::from_bits(&b).unwrap())
}

fn samples(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, len)
}

fn pattern_and_segments() -> impl Strategy<Value = (DecimationPattern, usize)> {
    (pattern(), 0usize..6)
}

proptest! {
    #[test]
    fn decimation_is_blocked_selection((p, segs) in pattern_and_segments(), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let x = common::random_signal(&mut rng, segs * p.len());
        let e = selection_matrix(&p);
        let via_matrix: Vec<f64> = unblock(&block(&x, p.len()).unwrap().iter().map(|v| &e * v).collect::<Vec<_>>());
        prop_assert_eq!(decimate(&x, &p), via_matrix);
    }

    #[test]
    fn expansion_is_blocked_transpose((p, segs) in pattern_and_segments(), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let y = common::random_signal(&mut rng, segs * p.retained());
        let et = selection_matrix(&p).transpose();
        let via_matrix: Vec<f64> = unblock(&block(&y, p.retained()).unwrap().iter().map(|v| &et * v).collect::<Vec<_>>());
        prop_assert_eq!(expand(&y, &p), via_matrix);
    }

    #[test]
    fn decimate_undoes_expand(p in pattern(), y in samples(24)) {
        let y = &y[..y.len() / p.retained() * p.retained()];
        prop_assert_eq!(decimate(&expand(y, &p), &p), y.to_vec());
    }

    #[test]
    fn expand_decimate_masks((p, segs) in pattern_and_segments(), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let x = common::random_signal(&mut rng, segs * p.len());
        let masked: Vec<f64> = x.iter().enumerate().map(|(k, &v)| if p.is_retained(k) { v } else { 0.0 }).collect();
        prop_assert_eq!(expand(&decimate(&x, &p), &p), masked);
    }

    #[test]
    fn selection_rows_are_orthonormal(p in pattern()) {
        let e = selection_matrix(&p);
        prop_assert_eq!(&e * e.transpose(), nalgebra::DMatrix::identity(p.retained(), p.retained()));
    }

    #[test]
    fn lifting_commutes_with_blocking(seed in any::<u64>(), nx in 0usize..5, n in 1usize..6, frames in 1usize..12) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_stable(&mut rng, nx, 1, 1);
        let u = common::random_signal(&mut rng, n * frames);
        let lifted = lift(&g, n).unwrap();
        let y = unblock(&lifted.simulate(&block(&u, n).unwrap()));
        prop_assert!(max_abs_diff(&y, &g.simulate_siso(&u)) < 1e-10);
        prop_assert_eq!(lifted.period(), Some(n as f64));
    }

    #[test]
    fn delays_compose_additively(a in 0usize..6, b in 0usize..6, x in samples(20)) {
        let composed = series(&delay(a, 1.0), &delay(b, 1.0)).unwrap();
        let y = composed.simulate_siso(&x);
        let expected: Vec<f64> = (0..x.len()).map(|k| if k >= a + b { x[k - a - b] } else { 0.0 }).collect();
        prop_assert_eq!(y, expected);
    }

    #[test]
    fn rotation_keeps_class_invariants(p in pattern(), k in 0usize..20) {
        let r = p.rotate_left(k);
        prop_assert_eq!(r.canonical(), p.canonical());
        prop_assert!(r.is_cyclic_equivalent(&p));
        prop_assert_eq!(r.max_zero_run(), p.max_zero_run());
        let mut g1 = p.cyclic_gaps();
        let mut g2 = r.cyclic_gaps();
        g1.sort_unstable();
        g2.sort_unstable();
        prop_assert_eq!(g1, g2);
        prop_assert_eq!(p.cyclic_gaps().iter().sum::<usize>(), p.len() - p.retained());
    }

    #[test]
    fn canonical_is_smallest_rotation(p in pattern()) {
        let c = p.canonical();
        prop_assert!(p.rotations().iter().all(|r| c.bits() <= r.bits()));
        prop_assert_eq!(p.len() % p.rotations().len(), 0);
    }

    #[test]
    fn filterbank_matches_blocked_filter(p in pattern(), seed in any::<u64>(), nx in 0usize..4, segs in 1usize..8) {
        let mut rng = common::rng(seed);
        let k = common::random_stable(&mut rng, nx, p.retained(), p.len());
        let y = common::random_signal(&mut rng, segs * p.retained());
        let bank = extract_filterbank(&k, &p).unwrap();
        let direct = polyphase_interpolate(&k, &y, &p).unwrap();
        prop_assert!(max_abs_diff(&bank.interpolate(&y), &direct) < 1e-10);
        let positions: Vec<usize> = bank.branches.iter().map(|b| b.delay_index).collect();
        prop_assert_eq!(positions, p.ones_indices().to_vec());
    }
}
