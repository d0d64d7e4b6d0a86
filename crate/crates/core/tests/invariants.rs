//! Property tests over randomly drawn small instances.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use hallscope_core::config::ExperimentConfig;
use hallscope_core::enumerate::{count_lht_int, EnumerationSpec, ExactSampler};
use hallscope_core::mcmc::chain_rng;
use hallscope_core::schur::{schur_bialternant, schur_eval};
use hallscope_core::stats::Moments;
use hallscope_core::{level_partitions, paths_to_tableau, tableau_to_paths, LectureHallTableau, Partition};

fn partition(max_len: usize, max_part: u32) -> impl Strategy<Value = Partition> {
    prop::collection::vec(0..=max_part, 0..=max_len).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(v).unwrap()
    })
}

/// A small instance `(λ, n, t)` with `ℓ(λ) <= n`.
fn instance() -> impl Strategy<Value = (Partition, u32, u32)> {
    (1u32..=4, 1u32..=4).prop_flat_map(|(n, t)| (partition(n as usize, 3), Just(n), Just(t)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_tableaux_are_valid_and_round_trip((lambda, n, t) in instance(), seed in any::<u64>()) {
        let spec = EnumerationSpec::new(lambda, n, t);
        let sampler = ExactSampler::new(&spec).unwrap();
        let l = sampler.sample_tableau(&mut chain_rng(seed, 0)).unwrap();
        prop_assert!(l.validate().unwrap());
        let paths = tableau_to_paths(&l).unwrap();
        prop_assert!(paths.validate().is_ok());
        prop_assert_eq!(&paths_to_tableau(&paths).unwrap(), &l);
        prop_assert_eq!(&LectureHallTableau::from_json(&l.to_json()).unwrap(), &l);
    }

    #[test]
    fn levels_shrink_and_both_readings_agree((lambda, n, t) in instance(), seed in any::<u64>()) {
        let spec = EnumerationSpec::new(lambda.clone(), n, t);
        let l = ExactSampler::new(&spec).unwrap().sample_tableau(&mut chain_rng(seed, 1)).unwrap();
        let levels = level_partitions(&tableau_to_paths(&l).unwrap()).unwrap();
        prop_assert_eq!(levels.len(), t as usize);
        prop_assert_eq!(levels[0].trimmed(), lambda.trimmed());
        for (kappa, lv) in levels.iter().enumerate() {
            prop_assert_eq!(lv, &l.level(kappa as u32).unwrap());
            if kappa > 0 {
                prop_assert!(levels[kappa - 1].contains(lv));
            }
        }
    }

    #[test]
    fn count_is_monotone_in_t((lambda, n, t) in instance()) {
        let a = count_lht_int(&EnumerationSpec::new(lambda.clone(), n, t)).unwrap();
        let b = count_lht_int(&EnumerationSpec::new(lambda, n, t + 1)).unwrap();
        prop_assert!(a >= BigInt::from(1) && b >= a);
    }

    #[test]
    fn schur_is_symmetric_and_routes_agree(lambda in partition(3, 3), vals in prop::collection::vec(-9i64..=9, 3), shift in 0usize..3) {
        let x: Vec<BigRational> = vals.iter().enumerate().map(|(i, &v)| BigRational::new(BigInt::from(v * 7 + i as i64), BigInt::from(3 + i as i64))).collect();
        let mut y = x.clone();
        y.rotate_left(shift);
        y.swap(0, 2);
        let a = schur_eval(&lambda, &x);
        prop_assert_eq!(&a, &schur_eval(&lambda, &y));
        let distinct = x[0] != x[1] && x[1] != x[2] && x[0] != x[2];
        if distinct {
            prop_assert_eq!(&a, &schur_bialternant(&lambda, &x).unwrap());
        }
    }

    #[test]
    fn moments_merge_like_a_single_pass(xs in prop::collection::vec(-100.0f64..100.0, 2..200), cut in 0usize..200) {
        let cut = cut.min(xs.len());
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(x));
        let (mut a, mut b) = (Moments::default(), Moments::default());
        xs[..cut].iter().for_each(|&x| a.push(x));
        xs[cut..].iter().for_each(|&x| b.push(x));
        a.merge_from(&b);
        prop_assert_eq!(a.count, whole.count);
        prop_assert!((a.mean - whole.mean).abs() < 1e-9);
        prop_assert!((a.variance() - whole.variance()).abs() < 1e-6 * whole.variance().max(1.0));
    }

    #[test]
    fn config_text_round_trips(n in 1u64..50, t in 1u64..50, seed in any::<u64>(), s in 0.01f64..0.99, method in prop::sample::select(vec!["exact", "mcmc"])) {
        let mut c = ExperimentConfig::new("sample").unwrap();
        c.set("lambda", "3,1").unwrap();
        c.set("seed", &seed.to_string()).unwrap();
        c.set("t", &t.to_string()).unwrap();
        c.set("n", &n.to_string()).unwrap();
        c.set("s", &s.to_string()).unwrap();
        c.set("method", method).unwrap();
        let back = ExperimentConfig::parse(&c.to_text()).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.hash(), c.hash());
    }
}
