use ckah::context::{
    context_subsumes, context_subsumes_general, erase_to, factor_parallel, is_sequential,
    occurrences, plug, plug_general, spify_context, subsume_to, Side,
};
use ckah::oracle::{
    all_general_contexts, all_sp_contexts_upto, all_sp_pomsets_upto, occurrences_oracle,
};
use ckah::pomset::{lbl, par, seq, Label, SpPomset};
use ckah::poset::{find_n_pattern, from_poset, iso, to_poset};
use ckah::sample::{self, alphabet};
use ckah::subsume::{downward_closure, subsumes};
use proptest::prelude::*;
use rand::seq::IteratorRandom;
use rand::Rng;

fn abc() -> Vec<Label> {
    alphabet(&["a", "b", "c"])
}

#[test]
fn spify_on_every_small_general_context() {
    let mut checked = 0;
    for n in 4..=6 {
        for c in all_general_contexts(n) {
            let empty = plug_general(&c, &SpPomset::Empty);
            if find_n_pattern(&empty).is_some() {
                assert!(spify_context(&c).is_err());
                continue;
            }
            let out = spify_context(&c).unwrap();
            assert!(out.is_well_formed());
            assert!(context_subsumes_general(&c, &out), "{out}");
            assert!(iso(&to_poset(&plug(&out, &SpPomset::Empty)), &empty));
            checked += 1;
        }
    }
    assert!(checked > 1000);
}

#[test]
fn occurrences_match_oracle() {
    let ab = alphabet(&["a", "b"]);
    let ws: Vec<SpPomset> = all_sp_pomsets_upto(&ab, 4).into_iter().collect();
    let vs: Vec<SpPomset> = all_sp_pomsets_upto(&ab, 2).into_iter().collect();
    for w in &ws {
        for v in &vs {
            assert_eq!(
                occurrences(w, v),
                occurrences_oracle(w, v),
                "w = {w}, v = {v}"
            );
        }
    }
}

#[test]
fn sequential_contexts_and_words_exhaustive() {
    let ab = alphabet(&["a", "b"]);
    let contexts = all_sp_contexts_upto(&ab, 4);
    let pomsets: Vec<SpPomset> = all_sp_pomsets_upto(&ab, 4).into_iter().collect();
    for c in &contexts {
        for u in pomsets.iter().filter(|u| c.size() + u.size() <= 5) {
            let w = plug(c, u);
            if is_sequential(c) && u.is_word() {
                assert!(w.is_word(), "{c} [{u}]");
            }
            if w.is_word() && !u.is_empty() {
                assert!(u.is_word() && is_sequential(c), "{c} [{u}]");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn plug_is_canonical_and_agrees_with_poset_substitution(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let c = sample::context(&mut r, &abc(), 4);
        let u = sample::pomset(&mut r, &abc(), 4);
        let w = plug(&c, &u);
        prop_assert!(w.is_canonical());
        prop_assert_eq!(from_poset(&plug_general(&c.to_general(), &u)).unwrap(), w);
    }

    #[test]
    fn monotonicity(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let d = sample::context(&mut r, &abc(), 4);
        let c = sample::stronger_context(&mut r, &d, 3);
        prop_assert!(context_subsumes(&d, &c));
        let u = sample::pomset(&mut r, &abc(), 4);
        prop_assert!(subsumes(&plug(&d, &u), &plug(&c, &u)));
    }

    #[test]
    fn parallel_factorisation(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let c = sample::context(&mut r, &abc(), 5);
        let u = sample::word(&mut r, &abc(), 2);
        let whole = plug(&c, &u);
        let parts = whole.par_factors();
        let mut v_parts = Vec::new();
        let mut w_parts = Vec::new();
        for p in parts {
            if r.gen_bool(0.5) { v_parts.push(p) } else { w_parts.push(p) }
        }
        let v = SpPomset::par_all(v_parts);
        let w = SpPomset::par_all(w_parts);
        let (side, c2) = factor_parallel(&c, &u, &v, &w).unwrap();
        match side {
            Side::Left => {
                prop_assert_eq!(plug(&c2, &u), v);
                prop_assert_eq!(c2.par_with(&w), c);
            }
            Side::Right => {
                prop_assert_eq!(plug(&c2, &u), w);
                prop_assert_eq!(c2.par_with(&v), c);
            }
        }
    }

    #[test]
    fn erasure(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let c = sample::context(&mut r, &abc(), 5);
        let empty = plug(&c, &SpPomset::Empty);
        let v = downward_closure(&empty).into_iter().choose(&mut r).unwrap();
        let c2 = erase_to(&c, &v).unwrap();
        prop_assert!(c2.is_well_formed());
        prop_assert!(context_subsumes(&c, &c2));
        prop_assert_eq!(plug(&c2, &SpPomset::Empty), v);
    }

    #[test]
    fn subsumption_construction(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let c = sample::context(&mut r, &abc(), 4);
        let a = lbl(["a", "b", "c"][r.gen_range(0..3)]);
        let filled = plug(&c, &SpPomset::prim(a.clone()));
        let v = downward_closure(&filled).into_iter().choose(&mut r).unwrap();
        let c2 = subsume_to(&c, &a, &v).unwrap();
        prop_assert!(c2.is_well_formed());
        prop_assert!(context_subsumes(&c, &c2));
        prop_assert_eq!(plug(&c2, &SpPomset::prim(a)), v);
    }

    #[test]
    fn substitution_identities(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let c = sample::context(&mut r, &abc(), 3);
        let u = sample::pomset(&mut r, &abc(), 3);
        let v = sample::pomset(&mut r, &abc(), 3);
        prop_assert_eq!(plug(&c.then(&v), &u), seq(&plug(&c, &u), &v));
        prop_assert_eq!(plug(&c.after(&v), &u), seq(&v, &plug(&c, &u)));
        prop_assert_eq!(plug(&c.par_with(&v), &u), par(&plug(&c, &u), &v));
    }

    #[test]
    fn occurrences_plug_back(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let c = sample::context(&mut r, &abc(), 4);
        let v = sample::pomset(&mut r, &abc(), 2);
        let w = plug(&c, &v);
        let occ = occurrences(&w, &v);
        prop_assert!(occ.contains(&c));
        for d in &occ {
            prop_assert_eq!(plug(d, &v), w.clone());
        }
    }
}
