use nonlocal_core::solvers::knorm::split_cost;
use nonlocal_core::solvers::{j_norm, k_norm};
use proptest::prelude::*;

fn vector() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 1..8)
}

fn norms(x: &[f64]) -> (f64, f64, f64) {
    let inf = x.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let two = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let one = x.iter().map(|v| v.abs()).sum();
    (inf, two, one)
}

proptest! {
    #[test]
    fn primal_and_dual_agree(x in vector(), t in 0.01f64..10.0) {
        let k = k_norm(&x, t).unwrap();
        let scale = k.value.max(1.0);
        prop_assert!((k.primal - k.value).abs() <= 1e-9 * scale);
        // The split is a valid decomposition with the reported cost.
        for i in 0..x.len() {
            prop_assert!((k.split[0][i] + k.split[1][i] + k.split[2][i] - x[i]).abs() <= 1e-12 * scale);
        }
        prop_assert!((split_cost(&k.split[0], &k.split[1], &k.split[2], t) - k.primal).abs() <= 1e-12 * scale);
        // The dual vector lies in the unit ball of J(·; 1/t) and attains the value.
        prop_assert!(j_norm(&k.dual_vector, 1.0 / t).unwrap() <= 1.0 + 1e-12);
        let attained: f64 = x.iter().zip(&k.dual_vector).map(|(a, b)| a * b).sum();
        prop_assert!((attained - k.value).abs() <= 1e-9 * scale);
    }

    #[test]
    fn bounded_by_pure_splittings(x in vector(), t in 0.01f64..10.0) {
        let (inf, two, one) = norms(&x);
        let k = k_norm(&x, t).unwrap().value;
        prop_assert!(k <= inf.min(t.sqrt() * two).min(t * one) * (1.0 + 1e-12));
        // Each of the three norms dominates its weighted share.
        prop_assert!(k >= inf.min(t.sqrt() * two).min(t * one) / 3.0 - 1e-12);
    }

    #[test]
    fn is_a_norm(x in prop::collection::vec(-5.0f64..5.0, 4), y in prop::collection::vec(-5.0f64..5.0, 4),
                 c in -3.0f64..3.0, t in 0.05f64..5.0) {
        let kx = k_norm(&x, t).unwrap().value;
        let ky = k_norm(&y, t).unwrap().value;
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        prop_assert!(k_norm(&sum, t).unwrap().value <= kx + ky + 1e-9);
        let scaled: Vec<f64> = x.iter().map(|v| c * v).collect();
        prop_assert!((k_norm(&scaled, t).unwrap().value - c.abs() * kx).abs() <= 1e-9 * kx.max(1.0));
    }

    #[test]
    fn nondecreasing_in_t(x in vector(), t in 0.01f64..5.0, factor in 1.0f64..4.0) {
        let a = k_norm(&x, t).unwrap().value;
        let b = k_norm(&x, t * factor).unwrap().value;
        prop_assert!(b >= a - 1e-9 * a.max(1.0));
    }

    #[test]
    fn holder_pairing(x in prop::collection::vec(-5.0f64..5.0, 5), a in prop::collection::vec(-5.0f64..5.0, 5),
                      t in 0.01f64..10.0) {
        let pairing: f64 = x.iter().zip(&a).map(|(p, q)| p * q).sum();
        let bound = k_norm(&x, t).unwrap().value * j_norm(&a, 1.0 / t).unwrap();
        prop_assert!(pairing.abs() <= bound * (1.0 + 1e-12) + 1e-12);
    }
}
