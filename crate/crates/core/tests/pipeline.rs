mod common;

use common::*;
use gda_core::bruhat::{bruhat_decompose, reconstruct};
use gda_core::cli::{load_matrix, matrix_to_json};
use gda_core::dieudonne::{det_e, in_kernel};
use gda_core::sk;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn decomposition_determines_the_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, s) in contexts(&["quaternion13", "cubic7", "cyclo8"], &[2, 3]) {
        for _ in 0..20 {
            let a = s.random_unit(&mut rng, 4, 2).unwrap();
            let f = bruhat_decompose(&s, &a).unwrap();
            let up = s.monomial_matrix(&f.monomial()).unwrap();
            assert_eq!(det_e(&s, &a).unwrap(), det_e(&s, &up).unwrap(), "{name}");
        }
    }
}

#[test]
fn kernel_witness_evaluates_to_the_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (name, s) in contexts(&["twosym13", "gf5"], &[2, 3]) {
        let alg = s.algebra();
        for _ in 0..20 {
            let a = s.random_degree_zero(&mut rng, 6).unwrap();
            let v = in_kernel(&s, &a).unwrap();
            let trivial = det_e(&s, &a).unwrap() == alg.identity_class();
            assert_eq!(v.in_kernel, trivial, "{name}");
            if let Some(w) = v.witness {
                assert_eq!(w.evaluate(&s).unwrap(), a, "{name}");
            }
        }
    }
}

#[test]
fn exact_sequence_orders_multiply() {
    for name in ["quaternion13", "twosym13", "cubic7", "gf5"] {
        let a = algebra(name);
        for n in 1..=5usize {
            let h = sk::sk_h_unshifted(&a, n).unwrap().order().unwrap();
            let k = sk::kernel_group(&a, n as u64).order().unwrap();
            let e = sk::sk_e(&a).order().unwrap();
            assert_eq!(h, k * e, "{name} n={n}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn matrix_json_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (_, s) in contexts(&["quaternion13", "cyclo8"], &[2]) {
            let a = s.random_unit(&mut rng, 3, 2).unwrap();
            let text = serde_json::to_string(&matrix_to_json(s.algebra(), &a)).unwrap();
            prop_assert_eq!(load_matrix(s.algebra(), &text).unwrap(), a);
        }
    }

    #[test]
    fn certificate_rebuilds_the_lower_factor(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (_, s) in contexts(&["twosym13"], &[3]) {
            let a = s.random_unit(&mut rng, 5, 2).unwrap();
            let f = bruhat_decompose(&s, &a).unwrap();
            let mut t = s.identity();
            for e in &f.certificate {
                t = s.mat_multiply(&t, &s.elementary(e.i, e.j, &e.x).unwrap()).unwrap();
            }
            prop_assert_eq!(t, f.t.clone());
            prop_assert_eq!(reconstruct(&s, &f).unwrap(), a);
        }
    }
}
