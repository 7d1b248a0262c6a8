mod common;

use co1as::decomp::*;
use co1as::report::{format_sci, Sci};
use common::random_rotation;
use proptest::prelude::*;

fn ids() -> impl Strategy<Value = SubmoduleId> {
    prop::sample::select(SubmoduleId::FINE.into_iter().chain(SubmoduleId::COARSE).collect::<Vec<_>>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_structures_are_members(n in 2usize..=6, seed in any::<u64>()) {
        let s = random_structure(n, seed).unwrap();
        prop_assert_eq!(s.worst_violation().0, 0.0);
    }

    #[test]
    fn projections_are_idempotent(n in 2usize..=6, seed in any::<u64>(), id in ids()) {
        let s = random_structure(n, seed).unwrap();
        let p = project(&s, id).unwrap();
        let pp = project(&p, id).unwrap();
        prop_assert!(pp.sub(&p).max_abs() <= 1e-12);
    }

    #[test]
    fn fine_projections_are_orthogonal(n in 2usize..=6, seed in any::<u64>()) {
        let s = random_structure(n, seed).unwrap();
        let parts: Vec<_> = SubmoduleId::FINE.iter().map(|&id| project(&s, id).unwrap()).collect();
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                prop_assert!(parts[i].dot(&parts[j]).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn fine_projections_sum_to_input(n in 2usize..=6, seed in any::<u64>()) {
        let s = random_structure(n, seed).unwrap();
        let sum = SubmoduleId::FINE
            .iter()
            .map(|&id| project(&s, id).unwrap())
            .fold(AlgebraicStructure::zeros(n).unwrap(), |acc, p| acc.add(&p));
        prop_assert!(sum.sub(&s).max_abs() <= 1e-12);
    }

    #[test]
    fn projections_commute_with_rotations(n in 2usize..=6, seed in any::<u64>(), rot in any::<u64>(), id in ids()) {
        let s = random_structure(n, seed).unwrap();
        let q = random_rotation(n, rot);
        let lhs = project(&s.rotate(&q).unwrap(), id).unwrap();
        let rhs = project(&s, id).unwrap().rotate(&q).unwrap();
        prop_assert!(lhs.sub(&rhs).max_abs() <= 1e-10);
    }

    #[test]
    fn classification_scales(n in 2usize..=5, seed in any::<u64>(), c in prop_oneof![-50.0..-0.02f64, 0.02..50.0f64]) {
        let s = random_structure(n, seed).unwrap();
        let a = classify(&s, CLASSIFY_TOL).unwrap();
        let b = classify(&s.scale(c), CLASSIFY_TOL).unwrap();
        prop_assert_eq!(a.present_ids(), b.present_ids());
        for (x, y) in a.components.iter().zip(&b.components) {
            prop_assert!((y.norm - c.abs() * x.norm).abs() <= 1e-10 * (1.0 + y.norm));
        }
    }

    #[test]
    fn template_of_first_trace_module_is_fixed(theta in prop::collection::vec(-3.0..3.0f64, 2..=6)) {
        let s = t1_template(&theta).unwrap();
        let p = project(&s, SubmoduleId::T1).unwrap();
        prop_assert!(p.sub(&s).max_abs() <= 1e-12);
        let back = s.theta();
        for (a, b) in back.iter().zip(&theta) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn scientific_floats_round_trip(x in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let text = format_sci(x);
        let parsed: f64 = text.parse().unwrap();
        prop_assert_eq!(format_sci(parsed), text.clone());
        let json = serde_json::to_string(&Sci(x)).unwrap();
        prop_assert_eq!(json, text);
    }
}
