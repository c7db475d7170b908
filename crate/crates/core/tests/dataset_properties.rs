use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use proptest::prelude::*;
use qsvm_core::dataset::{
    gen_bipartite, gen_ghz_class, gen_separable, gen_two_qubit, ghz_normalizer, ghz_unnormalized, make_split,
    read_records, write_records, BipartiteSplit, DatasetSplit, Label, Regime, SplitPlan,
};
use qsvm_core::metrics::meyer_wallach_q;
use qsvm_core::sim::{subsystem_purity, DensityMatrix};

fn open_upper(hi: f64) -> impl Strategy<Value = f64> {
    (0.0..1.0f64).prop_map(move |u| hi * (1.0 - u))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn closed_form_concurrence_matches_wootters(t0 in 0.0..TAU, t1 in 0.0..TAU) {
        let s = gen_two_qubit(t0, t1);
        let oracle = DensityMatrix::from_pure(&s.state).wootters_concurrence().unwrap();
        prop_assert!((oracle - s.witness_value).abs() < 1e-9, "c = {} vs {}", s.witness_value, oracle);
        prop_assert_eq!(s.label == Label::Separable, s.witness_value == 0.0);
    }

    #[test]
    fn separable_products_are_pure_per_qubit(angles in prop::collection::vec((0.0..TAU, 0.0..TAU), 3)) {
        let s = gen_separable(3, &angles).unwrap();
        for q in 0..3 {
            prop_assert!((subsystem_purity(&s.state, &[q]).unwrap() - 1.0).abs() < 1e-10);
        }
        prop_assert!(meyer_wallach_q(&s.state).unwrap() < 1e-10);
        prop_assert_eq!(s.label, Label::Separable);
    }

    #[test]
    fn ghz_normaliser_is_the_norm(
        v in open_upper(FRAC_PI_4), phi in 0.0..TAU,
        a in open_upper(FRAC_PI_2), b in open_upper(FRAC_PI_2), c in open_upper(FRAC_PI_2),
    ) {
        let raw: f64 = ghz_unnormalized(v, phi, [a, b, c]).iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((ghz_normalizer(v, phi, [a, b, c]) - raw).abs() < 1e-10);
        let s = gen_ghz_class(v, phi, a, b, c).unwrap();
        prop_assert!((s.state.norm_sqr() - 1.0).abs() < 1e-10);
        prop_assert_eq!(s.label, Label::Entangled);
    }

    #[test]
    fn interior_ghz_states_are_entangled(
        v in 0.05..FRAC_PI_4, phi in 0.0..TAU,
        a in 0.05..FRAC_PI_2 - 0.05, b in 0.05..FRAC_PI_2 - 0.05, c in 0.05..FRAC_PI_2 - 0.05,
    ) {
        prop_assert!(meyer_wallach_q(&gen_ghz_class(v, phi, a, b, c).unwrap().state).unwrap() > 0.0);
    }

    #[test]
    fn bipartite_q_follows_product_structure(t0 in 0.1..3.0f64, t1 in 0.1..6.0f64, la in 0.0..TAU, lb in 0.0..TAU, k in 0usize..3) {
        let split = BipartiteSplit::ALL[k];
        let s = gen_bipartite(split, (t0, t1), (la, lb)).unwrap();
        let (lone, p0, _) = split.layout();
        let member = subsystem_purity(&s.state, &[p0]).unwrap();
        prop_assert!((subsystem_purity(&s.state, &[lone]).unwrap() - 1.0).abs() < 1e-10);
        let expected = 2.0 / 3.0 * (2.0 * (1.0 - member));
        prop_assert!((meyer_wallach_q(&s.state).unwrap() - expected).abs() < 1e-10);
        prop_assert!(expected > 0.0);
    }

    #[test]
    fn records_round_trip(seed in any::<u64>(), k in 0usize..6) {
        let split = make_split(&SplitPlan::new(Regime::ALL[k], 4, 4), seed).unwrap();
        let mut buf = Vec::new();
        write_records(&mut buf, &split.records()).unwrap();
        let back = DatasetSplit::from_records(&read_records(buf.as_slice()).unwrap()).unwrap();
        for (x, y) in back.train.iter().chain(&back.test).zip(split.train.iter().chain(&split.test)) {
            prop_assert_eq!(&x.gen_params, &y.gen_params);
            for (p, q) in x.state.amplitudes().iter().zip(y.state.amplitudes()) {
                prop_assert!((p - q).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn three_qubit_split_of_eight() {
    let split = make_split(&SplitPlan::new(Regime::ThreeQubitGhz, 8, 20), 1).unwrap();
    assert_eq!(split.train.len(), 8);
    assert_eq!(split.train.iter().filter(|s| s.label == Label::Entangled).count(), 4);
}
