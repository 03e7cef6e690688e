use ckah::ckao::Omega;
use ckah::closure::{close, Budget};
use ckah::pomset::Label;
use ckah::sample::{self, alphabet, TermShape};
use ckah::term::{parse_term, semantics_bounded, semantics_starfree, UnrollBudget};
use ckah::Error;
use proptest::prelude::*;

fn abc() -> Vec<Label> {
    alphabet(&["a", "b", "c"])
}

#[test]
fn golden_grammar_corpus() {
    let corpus = include_str!("golden/grammar.tsv");
    let mut rows = 0;
    for line in corpus
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
    {
        let (input, expected) = line.split_once('\t').unwrap();
        match expected.strip_prefix("error@") {
            Some(offset) => match parse_term(input) {
                Err(Error::Syntax { offset: got, .. }) => {
                    assert_eq!(got.to_string(), offset, "{input}")
                }
                other => panic!("{input}: expected a syntax error, got {other:?}"),
            },
            None => {
                let t = parse_term(input).unwrap();
                assert_eq!(t.to_string(), expected, "{input}");
                assert_eq!(parse_term(expected).unwrap(), t, "{input}");
            }
        }
        rows += 1;
    }
    assert!(rows >= 30);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn print_parse_round_trip(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let shape = TermShape {
            omega: Some(Omega::new(["o", "p"]).unwrap()),
            allow_star: true,
            ..TermShape::plain(abc(), 10)
        };
        let t = sample::term(&mut r, &shape);
        prop_assert_eq!(parse_term(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn axiom_rewrites_preserve_semantics_and_closures(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let e = sample::term(&mut r, &TermShape::plain(alphabet(&["a", "b"]), 6));
        let mut f = e.clone();
        for _ in 0..3 {
            f = sample::cka_rewrite(&mut r, &f);
        }
        let le = semantics_starfree(&e).unwrap();
        let lf = semantics_starfree(&f).unwrap();
        prop_assert_eq!(&le, &lf);
        let h = sample::grounded_hypotheses(&mut r, &alphabet(&["a", "b"]), 2, false);
        let ce = close(&le, &h, Budget::default()).unwrap();
        let cf = close(&lf, &h, Budget::default()).unwrap();
        prop_assert_eq!(ce, cf);
    }

    #[test]
    fn bounded_semantics(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let shape = TermShape { allow_star: true, ..TermShape::plain(abc(), 5) };
        let e = sample::term(&mut r, &shape);
        let mut prev = semantics_bounded(&e, UnrollBudget::new(0)).unwrap();
        for k in 1..=6 {
            let cur = semantics_bounded(&e, UnrollBudget::new(k)).unwrap();
            prop_assert!(prev.is_subset(&cur));
            prop_assert!(cur.iter().all(|u| u.size() <= k));
            prev = cur;
        }
        if !e.has_star() {
            let exact = semantics_starfree(&e).unwrap();
            prop_assert_eq!(semantics_bounded(&e, UnrollBudget::new(e.leaf_count())).unwrap(), exact);
        }
    }
}
