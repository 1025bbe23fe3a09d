use causal_vc::bounds::{gap_binary, gap_real, min_training_sets, vc_upper_bound, ModelClass};
use proptest::prelude::*;

fn hand_gap(h: f64, k: f64, eta: f64) -> f64 {
    let t = h * ((2.0 * k / h).ln() + 1.0) - (eta / 9.0).ln();
    (2.0 * (t / k).sqrt()).min(1.0)
}

proptest! {
    #[test]
    fn gap_matches_closed_form(h in 1.0f64..200.0, k in 1u64..1_000_000, eta in 0.001f64..0.999) {
        let g = gap_binary(h, k, eta).unwrap();
        prop_assert!((0.0..=1.0).contains(&g));
        if 2.0 * k as f64 > h {
            prop_assert!((g - hand_gap(h, k as f64, eta)).abs() < 1e-12);
        } else {
            prop_assert_eq!(g, 1.0);
        }
    }

    #[test]
    fn gap_monotone(h in 1.0f64..50.0, k in 1000u64..100_000, eta in 0.01f64..0.5) {
        prop_assume!(gap_binary(h, k, eta).unwrap() < 1.0);
        prop_assert!(gap_binary(h, k + 100, eta).unwrap() < gap_binary(h, k, eta).unwrap());
        prop_assert!(gap_binary(h, k, eta / 2.0).unwrap() > gap_binary(h, k, eta).unwrap());
        prop_assert!(gap_real(h, k * 10, eta, 0.0, 1.0).unwrap() < gap_real(h, k, eta, 0.0, 1.0).unwrap());
    }

    #[test]
    fn min_k_is_minimal(n in 3usize..40, eps in 0.05f64..0.9, eta in 0.01f64..0.5) {
        let h = vc_upper_bound(ModelClass::Polytrees, n).unwrap();
        let k = min_training_sets(ModelClass::Polytrees, n, eps, eta).unwrap();
        prop_assert!(gap_binary(h, k, eta).unwrap() <= eps);
        if k > 1 {
            prop_assert!(gap_binary(h, k - 1, eta).unwrap() > eps);
        }
    }
}
