use ckah::oracle::{all_orders, all_sp_pomsets_upto, down_closure_oracle, subsumes_by_search};
use ckah::pomset::{lbl, par, seq, Label, SpPomset};
use ckah::poset::{from_poset, is_n_free, iso, to_poset, LabelledPoset};
use ckah::sample::{self, alphabet};
use ckah::subsume::{
    downward_closure, downward_closure_by_exchange, subsumes, subsumes_structural,
};
use ckah::term::parse_pomset;
use proptest::prelude::*;
use rand::Rng;

fn abc() -> Vec<Label> {
    alphabet(&["a", "b", "c"])
}

#[test]
fn down_closure_matches_oracle_up_to_five_leaves() {
    for v in all_sp_pomsets_upto(&abc(), 5) {
        let oracle = down_closure_oracle(&v);
        assert_eq!(downward_closure(&v), oracle, "{v}");
    }
}

#[test]
fn exchange_route_matches_oracle_up_to_four_leaves() {
    for v in all_sp_pomsets_upto(&abc(), 4) {
        assert_eq!(
            downward_closure_by_exchange(&v),
            down_closure_oracle(&v),
            "{v}"
        );
    }
}

#[test]
fn from_poset_fails_exactly_on_n_shapes() {
    for n in 1..=4 {
        for leq in all_orders(n) {
            for labels in [
                vec![lbl("a"); n],
                (0..n).map(|i| lbl(["a", "b", "c", "d"][i])).collect(),
            ] {
                let p = LabelledPoset::from_matrix(labels, leq.clone()).unwrap();
                match from_poset(&p) {
                    Ok(u) => {
                        assert!(is_n_free(&p));
                        assert!(iso(&to_poset(&u), &p));
                    }
                    Err(_) => assert!(!is_n_free(&p)),
                }
            }
        }
    }
}

#[test]
fn structural_and_search_subsumption_agree_exhaustively() {
    let all: Vec<SpPomset> = all_sp_pomsets_upto(&alphabet(&["a", "b"]), 4)
        .into_iter()
        .collect();
    for v in &all {
        for u in &all {
            let expected = subsumes_by_search(v, u);
            assert_eq!(subsumes_structural(v, u), expected, "{u} ⊑ {v}");
            assert_eq!(subsumes(v, u), expected, "{u} ⊑ {v}");
        }
    }
}

#[test]
fn print_parse_round_trip_on_all_small_pomsets() {
    for u in all_sp_pomsets_upto(&abc(), 4) {
        assert_eq!(parse_pomset(&u.to_string()).unwrap(), u);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn poset_round_trip(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let u = sample::pomset(&mut r, &abc(), 8);
        let p = to_poset(&u);
        prop_assert!(is_n_free(&p));
        prop_assert_eq!(from_poset(&p).unwrap(), u.clone());
        prop_assert!(u.is_canonical());
    }

    #[test]
    fn composition_laws(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let [u, v, w] = [0; 3].map(|_| sample::pomset(&mut r, &abc(), 4));
        prop_assert_eq!(seq(&seq(&u, &v), &w), seq(&u, &seq(&v, &w)));
        prop_assert_eq!(par(&par(&u, &v), &w), par(&u, &par(&v, &w)));
        prop_assert_eq!(par(&u, &v), par(&v, &u));
        prop_assert_eq!(seq(&u, &SpPomset::Empty), u.clone());
        prop_assert_eq!(seq(&SpPomset::Empty, &u), u.clone());
        prop_assert_eq!(par(&u, &SpPomset::Empty), u);
    }

    #[test]
    fn subsumption_is_a_partial_order(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let ab = alphabet(&["a", "b"]);
        let n = r.gen_range(0..=6);
        let [u, v, w] = [0; 3].map(|_| sample::pomset_with(&mut r, &ab, n, 3));
        prop_assert!(subsumes(&u, &u));
        if subsumes(&v, &u) && subsumes(&w, &v) {
            prop_assert!(subsumes(&w, &u));
        }
        if subsumes(&v, &u) && subsumes(&u, &v) {
            prop_assert_eq!(u, v);
        }
    }

    #[test]
    fn exchange_instance_is_subsumed(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let [u, v, w, x] = [0; 4].map(|_| sample::pomset(&mut r, &abc(), 3));
        let big = par(&seq(&u, &w), &seq(&v, &x));
        let small = seq(&par(&u, &v), &par(&w, &x));
        prop_assert!(subsumes(&big, &small));
    }

    #[test]
    fn members_of_the_down_closure_are_subsumed(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let v = sample::pomset(&mut r, &abc(), 6);
        for u in downward_closure(&v).iter() {
            prop_assert!(subsumes(&v, u));
        }
    }
}
