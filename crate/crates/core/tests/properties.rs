use flimits_core::grigorchuk::random_word;
use flimits_core::hnn::{britton_reduce, oracle_h_lt1, random_hnn_word};
use flimits_core::limits::distance;
use flimits_core::thompson::random_element;
use flimits_core::{
    iota, Dyadic, GrigWord, Group, Letter, MarkedTuple, MixedWord, PlHomeo, VarLetter, Vertex,
};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn elem() -> impl Strategy<Value = PlHomeo> {
    (any::<u64>(), 0usize..12).prop_map(|(s, l)| random_element(s, l))
}

fn grig() -> impl Strategy<Value = GrigWord> {
    (any::<u64>(), 0usize..30).prop_map(|(s, l)| random_word(&mut ChaCha8Rng::seed_from_u64(s), l))
}

fn mixed() -> impl Strategy<Value = MixedWord<PlHomeo>> {
    let letter = prop_oneof![
        (1usize..=2, any::<bool>()).prop_map(|(i, inv)| Letter::Var(VarLetter::new(i, inv))),
        elem().prop_map(Letter::Const),
    ];
    prop::collection::vec(letter, 0..8).prop_map(|ls| MixedWord::new(ls, 2))
}

fn is_pow2(num: &num_bigint::BigInt) -> bool {
    use num_traits::{One, Zero};
    num > &num_bigint::BigInt::zero() && (num & (num - num_bigint::BigInt::one())).is_zero()
}

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn group_axioms(a in elem(), b in elem(), c in elem()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert!(a.mul(&a.inverse()).is_identity());
        prop_assert_eq!(a.mul(&PlHomeo::identity()), a.clone());
        prop_assert_eq!(a.inverse().inverse(), a);
    }

    #[test]
    fn dyadic_points_stay_dyadic(f in elem(), g in elem(), n in 0i64..=256) {
        let h = f.mul(&g);
        let img = h.evaluate(&Dyadic::new(n, 8).to_rational()).unwrap();
        prop_assert!(is_pow2(img.denom()));
        for w in h.breakpoints().windows(2) {
            let slope = (w[1].1.to_rational() - w[0].1.to_rational())
                / (w[1].0.to_rational() - w[0].0.to_rational());
            let (p, q) = (slope.numer(), slope.denom());
            prop_assert!(is_pow2(p) && is_pow2(q) && (p == &1.into() || q == &1.into()));
        }
    }

    #[test]
    fn support_of_conjugate(f in elem(), g in elem()) {
        let gi = g.inverse();
        prop_assert_eq!(
            f.conjugate(&g).support(),
            f.support().map_monotone(|q| gi.evaluate(q).unwrap())
        );
    }

    #[test]
    fn disjoint_supports_commute(f in elem(), g in elem(), cut in 1i64..32) {
        let c = Dyadic::new(cut, 5);
        let f = iota(&Dyadic::zero(), &c, &f).unwrap();
        let g = iota(&c, &Dyadic::one(), &g).unwrap();
        prop_assert!(f.commutator(&g).is_identity());
    }

    #[test]
    fn elements_round_trip(f in elem()) {
        prop_assert_eq!(f.to_string().parse::<PlHomeo>().unwrap(), f.clone());
        let json = serde_json::to_string(&f).unwrap();
        prop_assert_eq!(serde_json::from_str::<PlHomeo>(&json).unwrap(), f);
    }
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn evaluation_is_a_homomorphism(u in mixed(), v in mixed(), a in elem(), b in elem()) {
        let args = [a, b];
        let uv = u.mul(&v).evaluate(&args).unwrap();
        prop_assert_eq!(uv, u.evaluate(&args).unwrap().mul(&v.evaluate(&args).unwrap()));
        prop_assert!(u.mul(&u.inverse()).is_empty());
    }

    #[test]
    fn reduced_form_is_a_conjugate(w in mixed(), a in elem(), b in elem()) {
        if let Ok(f) = w.to_reduced_form() {
            let args = [a, b];
            let c = f.conjugator.clone().with_arity(2).evaluate(&args).unwrap();
            let form = f.to_word().with_arity(2).evaluate(&args).unwrap();
            prop_assert_eq!(w.evaluate(&args).unwrap(), form.conjugate(&c.inverse()));
        }
    }

    #[test]
    fn grigorchuk_action_is_a_left_action(u in grig(), v in grig(), bits in prop::collection::vec(any::<bool>(), 0..10)) {
        let x = Vertex(bits);
        prop_assert_eq!(u.mul(&v).act(&x), u.act(&v.act(&x)));
        prop_assert!(u.mul(&u.inverse()).is_identity());
        prop_assert_eq!(u.to_string().parse::<GrigWord>().unwrap(), u);
    }

    #[test]
    fn grigorchuk_identity_matches_portrait(u in grig(), v in grig()) {
        let w = u.commutator(&v).commutator(&u);
        prop_assert_eq!(w.is_identity(), w.portrait(10).is_trivial());
    }

    #[test]
    fn britton_reduction_is_idempotent(seed in any::<u64>(), k in 0usize..5) {
        let o = oracle_h_lt1();
        let w = random_hnn_word(&mut ChaCha8Rng::seed_from_u64(seed), k, 3);
        let r = britton_reduce(&w, &o).unwrap();
        prop_assert_eq!(britton_reduce(&r, &o).unwrap(), r.clone());
        prop_assert!(!r.has_pinch(&o));
    }
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn distance_is_symmetric(a in elem(), b in elem(), c in elem(), d in elem()) {
        let m = MarkedTuple::new(vec![a, b]).unwrap();
        let n = MarkedTuple::new(vec![c, d]).unwrap();
        prop_assert_eq!(distance(&m, &n, 4).unwrap(), distance(&n, &m, 4).unwrap());
        prop_assert_eq!(distance(&m, &m, 4).unwrap().radius(), 4);
    }
}
