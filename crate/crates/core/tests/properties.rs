mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sparse_ldp::mechanism::{KernelFamily, MechanismSpec, TruncatedMechanism, TruncatedParams};
use sparse_ldp::privacy::{
    defect_profile, ordered_defect, pure_ldp_bound, pure_ldp_epsilon, worst_case_defect,
};
use sparse_ldp::sample;

fn family() -> impl Strategy<Value = KernelFamily> {
    prop_oneof![
        (0.01f64..5.0).prop_map(|l| KernelFamily::laplace(l).unwrap()),
        (0.1f64..6.0).prop_map(|s| KernelFamily::gaussian(s).unwrap()),
    ]
}

fn odd_size() -> impl Strategy<Value = u64> {
    (0u64..30).prop_map(|t| 2 * t + 1)
}

fn spec() -> impl Strategy<Value = MechanismSpec> {
    any::<u64>().prop_map(|seed| common::random_spec(&mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Random spec where every input shares one support.
fn common_support_spec() -> impl Strategy<Value = MechanismSpec> {
    spec().prop_map(|s| {
        let shared = s.supports()[&s.inputs()[0]].clone();
        let supports = s.inputs().iter().map(|&x| (x, shared.clone())).collect();
        MechanismSpec::new(
            s.kernel(),
            s.inputs().to_vec(),
            s.outputs().to_vec(),
            supports,
            s.distance_model().clone(),
        )
        .unwrap()
    })
}

proptest! {
    #[test]
    fn truncated_pmf_normalized_symmetric_translation_invariant(
        family in family(), s in odd_size(), x in -1000i64..1000
    ) {
        let m = TruncatedMechanism::new(family, s).unwrap();
        let at0 = m.pmf(0);
        let atx = m.pmf(x);
        prop_assert!((atx.values().sum::<f64>() - 1.0).abs() < 1e-12);
        let t = m.radius() as i64;
        prop_assert_eq!(atx.len() as u64, s);
        for k in -t..=t {
            prop_assert_eq!(atx[&(x + k)], at0[&k]);
            prop_assert_eq!(at0[&k], at0[&-k]);
        }
    }

    #[test]
    fn spec_pmf_normalized(spec in spec()) {
        for &x in spec.inputs() {
            let pmf = spec.pmf(x).unwrap();
            prop_assert!((pmf.values().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(pmf.values().all(|&p| p > 0.0));
            prop_assert_eq!(pmf.len(), spec.support(x).unwrap().len());
            prop_assert!(spec.normalizer(x).unwrap() > 0.0);
        }
    }

    #[test]
    fn defect_in_unit_interval_and_nonincreasing_in_epsilon(
        spec in spec(), e1 in 0.0f64..4.0, e2 in 0.0f64..4.0
    ) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        for &x in spec.inputs() {
            for &xp in spec.inputs() {
                let a = ordered_defect(&spec, x, xp, lo).unwrap();
                let b = ordered_defect(&spec, x, xp, hi).unwrap();
                for d in [a, b] {
                    prop_assert!((0.0..=1.0).contains(&d.total));
                    prop_assert!((0.0..=1.0).contains(&d.support_leakage));
                    prop_assert!((0.0..=1.0).contains(&d.overlap_excess));
                    prop_assert!((d.total - d.support_leakage - d.overlap_excess).abs() < 1e-12);
                }
                prop_assert!(b.total <= a.total + 1e-15);
            }
        }
    }

    #[test]
    fn pure_ldp_level_is_the_zero_defect_threshold(spec in common_support_spec()) {
        let r = pure_ldp_epsilon(&spec);
        prop_assert!(r.finite);
        let eps = r.epsilon_star.unwrap();
        for &x in spec.inputs() {
            for &xp in spec.inputs() {
                prop_assert_eq!(ordered_defect(&spec, x, xp, eps).unwrap().total, 0.0);
                prop_assert_eq!(ordered_defect(&spec, x, xp, eps + 0.5).unwrap().total, 0.0);
            }
        }
        if eps > 1e-9 {
            let below = eps * 0.9;
            let positive = spec.inputs().iter().any(|&x| {
                spec.inputs()
                    .iter()
                    .any(|&xp| ordered_defect(&spec, x, xp, below).unwrap().total > 0.0)
            });
            prop_assert!(positive);
        }
    }

    #[test]
    fn mismatched_supports_are_never_pure(spec in spec()) {
        let r = pure_ldp_epsilon(&spec);
        let mismatch = spec.inputs().iter().any(|&x| {
            spec.inputs().iter().any(|&xp| spec.support(x).unwrap() != spec.support(xp).unwrap())
        });
        prop_assert_eq!(r.finite, !mismatch);
        if let (false, Some(w)) = (r.finite, r.witness) {
            prop_assert!(spec.support(w.x).unwrap().contains(&w.output));
            prop_assert!(!spec.support(w.x_prime).unwrap().contains(&w.output));
        }
    }

    #[test]
    fn diameter_bound_dominates_exact_level(
        lambda in 0.01f64..3.0,
        inputs in prop::collection::btree_set(-6i64..6, 1..5),
        support in prop::collection::btree_set(-8i64..8, 1..10),
    ) {
        let inputs: Vec<i64> = inputs.into_iter().collect();
        let mut outputs: std::collections::BTreeSet<i64> = support.clone();
        outputs.extend(inputs.iter().copied());
        let support: Vec<i64> = support.into_iter().collect();
        let kernel = KernelFamily::laplace(lambda).unwrap();
        let spec = MechanismSpec::with_abs_distance(
            kernel,
            inputs.clone(),
            outputs.into_iter().collect(),
            inputs.iter().map(|&x| (x, support.clone())).collect(),
        ).unwrap();
        let exact = pure_ldp_epsilon(&spec).epsilon_star.unwrap();
        let diameter = (inputs[inputs.len() - 1] - inputs[0]) as f64;
        let mut bound = f64::NEG_INFINITY;
        for &x in &inputs {
            for &xp in &inputs {
                let ratio = (spec.normalizer(xp).unwrap() / spec.normalizer(x).unwrap()).ln();
                bound = bound.max(pure_ldp_bound(lambda, diameter, ratio).unwrap());
            }
        }
        prop_assert!(bound >= exact - 1e-12, "bound {} < exact {}", bound, exact);
    }

    #[test]
    fn worst_case_is_max_of_profile(
        family in family(), s in odd_size(), range in 0u64..40, eps in 0.0f64..5.0
    ) {
        let p = TruncatedParams::new(family, s, range, eps).unwrap();
        let w = worst_case_defect(&p);
        let profile = defect_profile(&p);
        let max = profile.iter().map(|(_, b)| b.total).fold(0.0, f64::max);
        prop_assert_eq!(w.delta_star, max);
        let first = profile.iter().find(|(_, b)| b.total == max).unwrap().0;
        prop_assert_eq!(w.argmax_h, first);
    }

    #[test]
    fn spec_json_round_trip(spec in spec()) {
        let again = MechanismSpec::from_json(&spec.to_json()).unwrap();
        prop_assert_eq!(spec, again);
    }

    #[test]
    fn samples_stay_in_support(family in family(), s in odd_size(), x in -50i64..50, seed in any::<u64>()) {
        let m = TruncatedMechanism::new(family, s).unwrap();
        let t = m.radius() as i64;
        let draws = sample(&m, x, seed, 200).unwrap();
        prop_assert!(draws.iter().all(|y| (y - x).abs() <= t));
        prop_assert_eq!(draws, sample(&m, x, seed, 200).unwrap());
    }
}
