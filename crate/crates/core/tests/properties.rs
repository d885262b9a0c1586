//! Cross-module invariants, property-tested over randomized inputs.

use num_complex::Complex64;
use onebit_mimo::rng::Rng;
use onebit_mimo::{
    binary_entropy, design_constellation, max_margin_symbol, miso_capacity, mutual_information,
    q_func, quantize, real_lift, transition_matrix, ComplexMatrix, QuantPattern,
    TransitionMatrix,
};
use proptest::prelude::*;

fn complex_matrix(rows: usize, cols: usize, entries: &[(f64, f64)]) -> ComplexMatrix {
    let data = entries
        .iter()
        .map(|&(re, im)| Complex64::new(re, im))
        .collect();
    ComplexMatrix::new(rows, cols, data).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig {
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn q_symmetry(x in -30.0f64..30.0) {
        prop_assert!((q_func(x) + q_func(-x) - 1.0).abs() < 1e-12);
    }

    // Strictly decreasing wherever the drop is representable in f64; in the
    // saturated tails only non-strict monotonicity can hold.
    #[test]
    fn q_strictly_monotone_in_band(a in -6.0f64..20.0, delta in 1e-6f64..5.0) {
        prop_assert!(q_func(a + delta) < q_func(a));
    }

    #[test]
    fn q_nonincreasing_globally(a in -40.0f64..40.0, delta in 0.0f64..10.0) {
        prop_assert!(q_func(a + delta) <= q_func(a));
    }

    #[test]
    fn entropy_symmetric_and_bounded(p in 0.0f64..=1.0) {
        let h = binary_entropy(p).unwrap();
        let h_mirror = binary_entropy(1.0 - p).unwrap();
        prop_assert!((h - h_mirror).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&h));
    }

    #[test]
    fn lift_morphism(
        entries_a in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 6),
        entries_b in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 6),
    ) {
        // A is 2x3, B is 3x2: lift of the product equals product of lifts.
        let a = complex_matrix(2, 3, &entries_a);
        let b = complex_matrix(3, 2, &entries_b);
        let lhs = real_lift(&a.matmul(&b).unwrap());
        let rhs = real_lift(&a).matmul(&real_lift(&b)).unwrap();
        for i in 0..lhs.rows() {
            for j in 0..lhs.cols() {
                prop_assert!((lhs.get(i, j) - rhs.get(i, j)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn quantize_matches_componentwise_signs(
        entries in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..6)
    ) {
        let y: Vec<Complex64> = entries.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        let pattern = quantize(&y);
        let n = y.len();
        for (i, z) in y.iter().enumerate() {
            prop_assert_eq!(pattern.signs()[i], if z.re < 0.0 { -1 } else { 1 });
            prop_assert_eq!(pattern.signs()[n + i], if z.im < 0.0 { -1 } else { 1 });
        }
    }

    #[test]
    fn pattern_index_round_trip(rails in 1usize..=12, seed in any::<u64>()) {
        let index = (seed as usize) & ((1usize << rails) - 1);
        let pattern = QuantPattern::from_index(index, rails);
        prop_assert_eq!(pattern.index(), index);
        prop_assert_eq!(pattern.rails(), rails);
    }

    #[test]
    fn mutual_information_bounds_and_relabeling(
        raw_rows in prop::collection::vec(prop::collection::vec(0.01f64..1.0, 4), 2..6),
        raw_probs in prop::collection::vec(0.01f64..1.0, 2..6),
        mask in 0usize..4,
    ) {
        prop_assume!(raw_rows.len() == raw_probs.len());
        let rows: Vec<Vec<f64>> = raw_rows
            .iter()
            .map(|r| {
                let s: f64 = r.iter().sum();
                r.iter().map(|v| v / s).collect()
            })
            .collect();
        let total: f64 = raw_probs.iter().sum();
        let probs: Vec<f64> = raw_probs.iter().map(|p| p / total).collect();
        let t = TransitionMatrix::from_rows(rows.clone(), 2).unwrap();
        let mi = mutual_information(&t, &probs).unwrap();
        prop_assert!(mi >= 0.0);
        prop_assert!(mi <= (rows.len() as f64).log2() + 1e-9);
        prop_assert!(mi <= 2.0 + 1e-9);

        let permuted: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| (0..4).map(|c| r[c ^ mask]).collect())
            .collect();
        let tp = TransitionMatrix::from_rows(permuted, 2).unwrap();
        let mi_p = mutual_information(&tp, &probs).unwrap();
        prop_assert!((mi - mi_p).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 16,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn miso_constellation_mi_matches_closed_form(seed in any::<u64>(), pt in 0.05f64..20.0) {
        let mut rng = Rng::new(seed);
        let h: Vec<Complex64> = (0..2).map(|_| rng.complex_gaussian()).collect();
        prop_assume!(h.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-6);
        let (capacity, constellation) = miso_capacity(&h, pt);
        let channel = ComplexMatrix::miso_row(&h);
        let t = transition_matrix(&channel, &constellation).unwrap();
        let mi = mutual_information(&t, &constellation.probs).unwrap();
        prop_assert!((mi - capacity).abs() < 1e-9, "MI {} vs capacity {}", mi, capacity);
    }

    #[test]
    fn margin_solutions_scale_with_power(seed in any::<u64>(), ratio in 1.5f64..16.0) {
        let mut rng = Rng::new(seed);
        let data: Vec<Complex64> = (0..4).map(|_| rng.complex_gaussian()).collect();
        let h = ComplexMatrix::new(2, 2, data).unwrap();
        let hhat = real_lift(&h);
        for index in 0..16 {
            let pattern = QuantPattern::from_index(index, 4);
            let base = max_margin_symbol(&hhat, &pattern, 1.0);
            let scaled = max_margin_symbol(&hhat, &pattern, ratio);
            match (base, scaled) {
                (Ok(a), Ok(b)) => {
                    prop_assert!((b.d_star / a.d_star - ratio.sqrt()).abs() < 1e-6 * ratio.sqrt());
                }
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "feasibility changed with power: {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn designed_symbols_decode_noiselessly(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let data: Vec<Complex64> = (0..4).map(|_| rng.complex_gaussian()).collect();
        let h = ComplexMatrix::new(2, 2, data).unwrap();
        let design = design_constellation(&h, 9.0).unwrap();
        for (symbol, pattern) in design.constellation.symbols.iter().zip(&design.patterns) {
            prop_assert_eq!(&quantize(&h.matvec(symbol)), pattern);
        }
        prop_assert!(design.constellation.average_power() <= 9.0 * (1.0 + 1e-9));
    }
}
