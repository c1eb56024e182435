use eisenzero::approx::{self, LineSeries};
use eisenzero::arithmetic::{jacobi, squarefree_decompose};
use eisenzero::domains::{
    circle_deviation, map_from_f0, map_from_fhalf, map_to_f0, map_to_fhalf, regions_containing,
    relation_residual, Relation,
};
use eisenzero::series::{eval_lattice, LatticeOptions, Series};
use eisenzero::{ComplexPoint, TruncationPolicy, Weight};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn odd_positive() -> impl Strategy<Value = i64> {
    (0i64..5000).prop_map(|n| 2 * n + 1)
}

proptest! {
    #[test]
    fn jacobi_is_multiplicative_in_the_top(a in -10_000i64..10_000, b in -10_000i64..10_000, n in odd_positive()) {
        prop_assert_eq!(jacobi(a * b, n).unwrap(), jacobi(a, n).unwrap() * jacobi(b, n).unwrap());
    }

    #[test]
    fn jacobi_is_multiplicative_in_the_bottom(a in -10_000i64..10_000, m in odd_positive(), n in odd_positive()) {
        prop_assert_eq!(jacobi(a, m * n).unwrap(), jacobi(a, m).unwrap() * jacobi(a, n).unwrap());
    }

    #[test]
    fn jacobi_reciprocity(m in odd_positive(), n in odd_positive()) {
        let lhs = jacobi(m, n).unwrap() * jacobi(n, m).unwrap();
        if eisenzero::arithmetic::gcd(m, n) == 1 {
            let expected = if (m % 4 == 3) && (n % 4 == 3) { -1 } else { 1 };
            prop_assert_eq!(lhs, expected);
        } else {
            prop_assert_eq!(lhs, 0);
        }
    }

    #[test]
    fn jacobi_is_periodic(a in -10_000i64..10_000, n in odd_positive()) {
        prop_assert_eq!(jacobi(a, n).unwrap(), jacobi(a + n, n).unwrap());
    }

    #[test]
    fn squarefree_ladder_reconstructs(l in 1u64..2_000_000) {
        let d = squarefree_decompose(l).unwrap();
        let mut v = d.squarefree_part;
        for step in d.ladder.iter().rev() {
            prop_assert_eq!(step.cofactor, v);
            v *= step.prime.pow(2 * step.exponent);
        }
        prop_assert_eq!(v, l);
        // squarefree part has no square divisor
        let s = d.squarefree_part;
        let mut p = 2;
        while p * p <= s {
            prop_assert!(!s.is_multiple_of(p * p));
            p += 1;
        }
    }

    #[test]
    fn f0_round_trip(x in -2.0f64..2.0, y in 0.01f64..5.0) {
        let z = ComplexPoint::new(x, y).unwrap();
        let back = map_from_f0(map_to_f0(z).unwrap()).unwrap();
        prop_assert!((back.x - x).abs() <= 1e-12 * (1.0 + x.abs()));
        prop_assert!((back.y - y).abs() <= 1e-12 * (1.0 + y));
    }

    #[test]
    fn fhalf_round_trip(x in -2.0f64..2.0, y in 0.01f64..5.0) {
        let z = ComplexPoint::new(x, y).unwrap();
        let back = map_from_fhalf(map_to_fhalf(z).unwrap()).unwrap();
        prop_assert!((back.x - x).abs() <= 1e-12 * (1.0 + x.abs()));
        prop_assert!((back.y - y).abs() <= 1e-12 * (1.0 + y));
    }

    #[test]
    fn approximants_are_bounded_by_two(y in 0.5f64..4.0, k in (2i64..200).prop_map(|n| 2 * n + 1)) {
        let k = Weight::new(k).unwrap();
        prop_assert!(approx::m0(y, k).abs() <= 2.0);
        prop_assert!(approx::m_half(y, k).abs() <= 2.0);
    }
}

#[test]
fn regions_are_pairwise_disjoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..10_000 {
        let z = ComplexPoint::new(rng.gen_range(-1.0..=1.0), rng.gen_range(1e-9..=2.0)).unwrap();
        let hits = regions_containing(z);
        assert!(hits.len() <= 1, "{z:?} lies in {hits:?}");
    }
}

#[test]
fn circle_maps_onto_the_two_lines() {
    for i in 1..=100 {
        // |z − ¼| = ¼ without the origin
        let phi = std::f64::consts::PI * i as f64 / 101.0;
        let z = ComplexPoint::new(0.25 + 0.25 * phi.cos(), 0.25 * phi.sin()).unwrap();
        assert!(circle_deviation(z) < 1e-15);
        assert!((map_to_f0(z).unwrap().x + 0.5).abs() < 1e-12);
        assert!((map_to_fhalf(z).unwrap().x - 0.5).abs() < 1e-12);
    }
}

#[test]
fn lines_pull_back_to_the_circle() {
    for i in 0..100 {
        let y = 0.05 + 0.1 * i as f64;
        let a = map_from_f0(ComplexPoint::new(-0.5, y).unwrap()).unwrap();
        let b = map_from_fhalf(ComplexPoint::new(0.5, y).unwrap()).unwrap();
        assert!(circle_deviation(a) < 1e-12 && circle_deviation(b) < 1e-12);
        if y >= 0.5 {
            // the two half-lines land on opposite halves of the circle
            assert!(a.x <= 0.25 + 1e-15 && b.x >= 0.25 - 1e-15);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn relations_hold_at_random_points(x in -0.5f64..0.5, y in 0.6f64..1.4, big in any::<bool>()) {
        let k = Weight::new(if big { 101 } else { 15 }).unwrap();
        let z = ComplexPoint::new(x, y).unwrap();
        for rel in Relation::ALL {
            let r = relation_residual(rel, z, k, &TruncationPolicy::default()).unwrap();
            prop_assert!(r.certified);
            prop_assert!(r.residual < 1e-8, "{:?} at {:?}: {}", rel, z, r.residual);
        }
    }

    #[test]
    fn doubling_the_cutoffs_stays_within_the_tail(x in -0.5f64..0.5, y in 0.4f64..1.5, which in 0usize..3) {
        let series = [Series::EZero, Series::EHalf, Series::EInfinity][which];
        let k = Weight::new(15).unwrap();
        let z = ComplexPoint::new(x, y).unwrap();
        let p = TruncationPolicy::fixed(20, 16, 1);
        let a = eval_lattice(series, z, k, &p, LatticeOptions::default()).unwrap();
        let b = eval_lattice(series, z, k, &p.doubled(), LatticeOptions::default()).unwrap();
        prop_assert!((a.value - b.value).norm() <= a.tail_estimate);
    }

    #[test]
    fn scaled_line_values_are_real(y in 0.5f64..1.6, line in prop::sample::select(LineSeries::ALL.to_vec())) {
        let k = Weight::new(15).unwrap();
        let v = approx::line_value(line, y, k, &TruncationPolicy::default()).unwrap();
        prop_assert!(v.imag_ratio < 1e-9);
    }
}
