use std::collections::BTreeSet;
use std::time::Instant;

use ckah::ckao::{
    bool_letter, check_reification_conditions, decide_ckao, group_reify, letterize,
    obs_reification, reduced_obs_pack, reify, sampled_obs_pack, BoolTerm, GroupTerm, Omega,
    ReificationSample,
};
use ckah::closure::{close_with, Budget, HypothesisSet};
use ckah::decide::{DecideOptions, Verdict};
use ckah::pomset::{lbl, Label, PomsetLanguage};
use ckah::sample::{self, TermShape};
use ckah::term::{parse_term, semantics_starfree, Term};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn letters_of(h: &HypothesisSet) -> BTreeSet<Label> {
    h.hypotheses()
        .iter()
        .flat_map(|x| x.lhs().letters().into_iter().chain(x.rhs().letters()))
        .collect()
}

fn ckao_shape(omega: &Omega, max_leaves: usize) -> TermShape {
    TermShape {
        omega: Some(omega.clone()),
        par_weight: 0.2,
        max_par_nodes: 2,
        ..TermShape::plain(vec![lbl("a"), lbl("b")], max_leaves)
    }
}

fn omega(r: &mut impl Rng) -> Omega {
    match r.gen_range(0..3) {
        0 => Omega::new(Vec::<String>::new()).unwrap(),
        1 => Omega::new(["o"]).unwrap(),
        _ => Omega::new(["o", "p"]).unwrap(),
    }
}

#[test]
fn observation_reification_conditions() {
    for names in [vec!["o"], vec!["o", "p"]] {
        let om = Omega::new(names).unwrap();
        let seeds = [BoolTerm::not(BoolTerm::prim("o"))];
        let h = sampled_obs_pack(&om, &seeds).unwrap();
        let mut letters = letters_of(&h);
        letters.insert(lbl("a"));
        let r = obs_reification(&letters, &om).unwrap();
        let gamma: Vec<Label> = r.gamma().iter().cloned().collect();
        let mut rng = sample::rng(5);
        let gamma_languages = (0..6)
            .map(|_| sample::language(&mut rng, &gamma, 2, 3))
            .collect();
        let all: Vec<Label> = letters.iter().cloned().collect();
        let terms = (0..10)
            .map(|_| letterize(&sample::term(&mut rng, &TermShape::plain(all.clone(), 5))))
            .collect();
        let s = ReificationSample {
            gamma_languages,
            terms,
            budget: Budget::default(),
        };
        let report = check_reification_conditions(&r, &h, &reduced_obs_pack(&om), &s).unwrap();
        assert!(report.all_pass(), "{report}");
    }
}

#[test]
fn group_example() {
    let g = |s: &str| Term::Act(GroupTerm::parse(s).unwrap().label());
    let e = Term::par(g("a∘~a"), g("b∘c∘~c"));
    assert_eq!(group_reify(&e).unwrap().to_string(), "u||b");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn reflexivity_and_rewrite_congruence(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let om = omega(&mut r);
        let e = sample::term(&mut r, &ckao_shape(&om, 12));
        let mut f = e.clone();
        for _ in 0..2 {
            f = if r.gen_bool(0.5) { sample::cka_rewrite(&mut r, &f) } else { sample::bool_rewrite(&mut r, &f) };
        }
        let o = DecideOptions::default();
        let start = Instant::now();
        prop_assert_eq!(decide_ckao(&e, &e, &om, &o).unwrap().verdict, Verdict::Equivalent);
        prop_assert_eq!(decide_ckao(&e, &f, &om, &o).unwrap().verdict, Verdict::Equivalent, "{} vs {}", e, f);
        prop_assert!(start.elapsed().as_secs() < 10);
    }

    #[test]
    fn reification_commutes_with_semantics(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let om = omega(&mut r);
        let e = sample::term(&mut r, &ckao_shape(&om, 8));
        let letters = letterize(&e).letters();
        let reif = obs_reification(&letters, &om).unwrap();
        let via_pomsets = reif.apply_language(&semantics_starfree(&letterize(&e)).unwrap()).unwrap();
        prop_assert_eq!(via_pomsets, semantics_starfree(&reify(&e, &om).unwrap()).unwrap());
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn reified_closure_covers_the_observation_closure(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let wide = r.gen_bool(0.3);
        let om = if wide { Omega::new(["o", "p"]).unwrap() } else { Omega::new(["o"]).unwrap() };
        let h = sampled_obs_pack(&om, &[]).unwrap();
        let mut letters: Vec<Label> = letters_of(&h).into_iter().collect();
        letters.push(lbl("a"));
        letters.shuffle(&mut r);
        let pool = &letters[..4];
        let l = sample::language(&mut r, pool, 2, if wide { 2 } else { 3 });
        let reif = obs_reification(&letters, &om).unwrap();
        let left = close_with(&l, &h, Budget::default()).unwrap();
        let right = close_with(&reif.apply_language(&l).unwrap(), &reduced_obs_pack(&om), Budget::default()).unwrap();
        prop_assume!(right.is_complete());
        let image: PomsetLanguage = reif.apply_language(&left.language).unwrap();
        prop_assert!(image.is_subset(&right.language));
    }
}

#[test]
fn bool_letters_round_trip() {
    let p = BoolTerm::or(BoolTerm::prim("o"), BoolTerm::not(BoolTerm::prim("p")));
    assert_eq!(
        parse_term(bool_letter(&p).as_str()).unwrap().to_string(),
        "{o|!p}"
    );
}
