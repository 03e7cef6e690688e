use ckah::closure::{
    close, close_alternating, close_exch, close_factorized, close_naive, close_seq, close_with,
    Budget, ClosureResult, HypothesisSet,
};
use ckah::context::plug_lang;
use ckah::oracle::{all_sp_pomsets_upto, in_exch_closure};
use ckah::pomset::{lang_par, lang_seq, lang_union, Label, PomsetLanguage};
use ckah::sample::{self, alphabet};
use ckah::subsume::{downward_closure, is_down_closed};
use proptest::prelude::*;
use rand::Rng;

fn ab() -> Vec<Label> {
    alphabet(&["a", "b"])
}

fn cl(l: &PomsetLanguage, h: &HypothesisSet) -> Option<PomsetLanguage> {
    let r: ClosureResult = close(l, h, Budget::default()).unwrap();
    r.is_complete().then_some(r.language)
}

#[test]
fn exch_closure_is_membership_by_subsumption() {
    let universe: Vec<_> = all_sp_pomsets_upto(&ab(), 3).into_iter().collect();
    for (i, x) in universe.iter().enumerate() {
        for y in &universe[i..] {
            let l: PomsetLanguage = [x.clone(), y.clone()].into_iter().collect();
            let closed = close_exch(&l);
            for u in &universe {
                assert_eq!(
                    closed.contains(u),
                    in_exch_closure(&l, u),
                    "{u} in close_exch({l:?})"
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn engine_agrees_with_naive_fixpoint(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let h = sample::grounded_hypotheses(&mut r, &ab(), 2, false);
        let l = sample::language(&mut r, &ab(), 3, 3);
        let fast = close(&l, &h, Budget::default()).unwrap();
        let slow = close_naive(&l, &h, Budget::default()).unwrap();
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn closure_operator_laws(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let h = sample::grounded_hypotheses(&mut r, &ab(), 2, false);
        let l = sample::language(&mut r, &ab(), 2, 3);
        let k = sample::language(&mut r, &ab(), 2, 3);
        let (Some(cl_l), Some(cl_k)) = (cl(&l, &h), cl(&k, &h)) else { return Ok(()) };
        prop_assert!(l.is_subset(&cl_l));
        prop_assert_eq!(cl(&cl_l, &h).unwrap(), cl_l.clone());
        // 1
        prop_assert_eq!(l.is_subset(&cl_k), cl_l.is_subset(&cl_k));
        // 2
        let lk = lang_union(&l, &k);
        let cl_lk = cl(&lk, &h).unwrap();
        prop_assert!(cl_l.is_subset(&cl_lk));
        // 3
        prop_assert_eq!(cl(&lang_union(&cl_l, &cl_k), &h).unwrap(), cl_lk);
        // 4
        prop_assert_eq!(cl(&lang_seq(&l, &k), &h).unwrap(), cl(&lang_seq(&cl_l, &cl_k), &h).unwrap());
        // 5
        prop_assert_eq!(cl(&lang_par(&l, &k), &h).unwrap(), cl(&lang_par(&cl_l, &cl_k), &h).unwrap());
        // 7
        let c = sample::context(&mut r, &ab(), 2);
        let big = lang_union(&l, &k);
        let cl_big = cl(&big, &h).unwrap();
        prop_assert!(cl_l.is_subset(&cl_big));
        prop_assert!(cl(&plug_lang(&c, &l), &h).unwrap().is_subset(&cl(&plug_lang(&c, &big), &h).unwrap()));
        for u in cl_l.iter() {
            prop_assert!(u.is_canonical());
        }
    }

    #[test]
    fn implication(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let h = sample::grounded_hypotheses(&mut r, &ab(), 3, false);
        let sub = HypothesisSet::from_hypotheses(
            h.hypotheses().iter().filter(|_| r.gen_bool(0.5)).cloned().collect(),
        );
        let l = sample::language(&mut r, &ab(), 3, 3);
        let (Some(small), Some(large)) = (cl(&l, &sub), cl(&l, &h)) else { return Ok(()) };
        prop_assert!(small.is_subset(&large));
    }

    #[test]
    fn factorised_closure_is_down_closed(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let h = sample::simple_lhs_hypotheses(&mut r, &ab(), 2);
        let l = sample::language(&mut r, &ab(), 2, 3);
        let f = close_factorized(&l, &h, Budget::default()).unwrap();
        prop_assume!(f.is_complete());
        prop_assert!(is_down_closed(&f.language));
        for v in f.language.iter() {
            for u in downward_closure(v).iter() {
                prop_assert!(f.language.contains(u));
            }
        }
        let alt = close_alternating(&l, &h, Budget::default()).unwrap();
        prop_assert_eq!(alt.language, f.language);
    }

    #[test]
    fn lifting(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let h = sample::grounded_hypotheses(&mut r, &ab(), 2, true);
        let words = sample::word_language(&mut r, &ab(), 3, 4);
        let (Some(full), Ok(seq)) = (cl(&words, &h), close_seq(&words, &h, Budget::default())) else {
            return Ok(());
        };
        prop_assert!(seq.is_complete());
        prop_assert_eq!(full, seq.language);

        let hg = sample::grounded_hypotheses(&mut r, &ab(), 2, false);
        let l = sample::language(&mut r, &ab(), 2, 3);
        let k = sample::language(&mut r, &ab(), 2, 3);
        let (Some(cl_l), Some(cl_k)) = (cl(&l, &hg), cl(&k, &hg)) else { return Ok(()) };
        prop_assert_eq!(cl(&lang_par(&l, &k), &hg).unwrap(), lang_par(&cl_l, &cl_k));
    }

    #[test]
    fn exch_only_closure(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let l = sample::language(&mut r, &ab(), 3, 4);
        let e = close_with(&l, &HypothesisSet::exch(), Budget::default()).unwrap();
        prop_assert!(e.is_complete());
        prop_assert_eq!(e.language, close_exch(&l));
    }
}
