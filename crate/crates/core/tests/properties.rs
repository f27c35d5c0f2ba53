//! Property tests for the combinatorial and algebraic invariants.

use bosim_core::events::{enumerate_events, multiset_count, rank_event, unrank_event};
use bosim_core::linalg::{make_haar_random, perturb};
use bosim_core::permanent::{boson_probability, permanent_naive, permanent_ryser, Submatrix};
use bosim_core::rng::StreamRng;
use bosim_core::{InputConfig, OccupationEvent};
use num_complex::Complex64;
use proptest::prelude::*;

fn random_entries(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = StreamRng::new(seed, 0);
    (0..n * n)
        .map(|_| {
            let (re, im) = rng.next_gaussian_pair();
            Complex64::new(re, im)
        })
        .collect()
}

proptest! {
    #[test]
    fn unrank_then_rank_is_identity(n in 1usize..6, m in 1u64..20, salt in 0u64..1000) {
        let total = multiset_count(n, m).unwrap();
        let rank = (salt as u128 * 7919) % total;
        let event = unrank_event(n, m, rank).unwrap();
        prop_assert_eq!(event.particle_count(), n);
        prop_assert!(event.modes().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(*event.modes().last().unwrap() <= m);
        prop_assert_eq!(rank_event(&event, m).unwrap(), rank);
    }

    #[test]
    fn enumerated_events_satisfy_their_invariants(n in 1usize..5, m in 1u64..10) {
        let mut previous: Option<Vec<u64>> = None;
        let mut count = 0u128;
        for event in enumerate_events(n, m, 1_000_000).unwrap() {
            count += 1;
            let occ_total: u32 = event.occupations().values().sum();
            prop_assert_eq!(occ_total as usize, n);
            prop_assert!(event.modes().windows(2).all(|w| w[0] <= w[1]));
            if let Some(prev) = &previous {
                prop_assert!(prev.as_slice() < event.modes(), "lexicographic order");
            }
            previous = Some(event.modes().to_vec());
        }
        prop_assert_eq!(count, multiset_count(n, m).unwrap());
    }

    #[test]
    fn multiplicity_factor_is_full_factorial_only_when_bunched(
        n in 1usize..6, m in 1u64..8, salt in 0u64..500,
    ) {
        let total = multiset_count(n, m).unwrap();
        let event = unrank_event(n, m, (salt as u128) % total).unwrap();
        let n_fact: u128 = (1..=n as u128).product();
        let single_mode = event.occupations().len() == 1;
        prop_assert_eq!(event.multiplicity_factor() == n_fact && n > 1, single_mode && n > 1);
    }

    #[test]
    fn permanent_is_permutation_invariant(seed in 0u64..300, n in 2usize..5) {
        let entries = random_entries(n, seed);
        let m = Submatrix::from_entries(n, entries.clone()).unwrap();
        let base = permanent_ryser(&m).unwrap();
        // Rotate rows and swap two columns; the permanent must not move.
        let mut permuted = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in 0..n {
                let (r2, c2) = ((r + 1) % n, if c < 2 { 1 - c } else { c });
                permuted[r2 * n + c2] = entries[r * n + c];
            }
        }
        let alt = permanent_ryser(&Submatrix::from_entries(n, permuted).unwrap()).unwrap();
        let rel = (base - alt).norm_sqr().sqrt() / base.norm_sqr().sqrt().max(1e-300);
        prop_assert!(rel <= 1e-10, "rel {}", rel);
    }

    #[test]
    fn ryser_equals_naive(seed in 0u64..200, n in 2usize..6) {
        let m = Submatrix::from_entries(n, random_entries(n, seed)).unwrap();
        let a = permanent_ryser(&m).unwrap();
        let b = permanent_naive(&m).unwrap();
        prop_assert!((a - b).norm_sqr().sqrt() <= 1e-10 * b.norm_sqr().sqrt().max(1.0));
    }

    #[test]
    fn boson_weight_ignores_input_ordering(seed in 0u64..100) {
        let u = make_haar_random(6, seed).unwrap();
        let fwd = InputConfig::indistinguishable(vec![1, 3, 5]).unwrap();
        let rev = InputConfig::indistinguishable(vec![5, 1, 3]).unwrap();
        for event in enumerate_events(3, 6, 100).unwrap().take(20) {
            let a = boson_probability(&u, &fwd, &event).unwrap();
            let b = boson_probability(&u, &rev, &event).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn perturbation_reproduces_its_target_average(
        target in 0.0f64..0.9, seed in 0u64..200,
    ) {
        let u = make_haar_random(5, 1234).unwrap();
        let (w, field) = perturb(&u, target, seed).unwrap();
        prop_assert!((field.recompute_avg() - target).abs() <= 1e-12);
        // W = U ∘ (1 + δ), entry by entry.
        for (i, (&wz, &uz)) in w.entries().iter().zip(u.entries().iter()).enumerate() {
            let expect = uz * (Complex64::new(1.0, 0.0) + field.entries()[i]);
            prop_assert!((wz - expect).norm_sqr().sqrt() <= 1e-15);
        }
    }
}

#[test]
fn event_equality_uses_the_sorted_form() {
    let a = OccupationEvent::new(vec![4, 1, 4], 5).unwrap();
    let b = OccupationEvent::new(vec![4, 4, 1], 5).unwrap();
    assert_eq!(a, b);
}
