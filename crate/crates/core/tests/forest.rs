mod common;

use common::{base_grammar, fixture, inputs_for, random_grammar, ss_a, with_big_stack};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use reflective_core::forest::{build_sppf, count_parses, extract_unambiguous, ForestError, ParseCount};
use reflective_core::oracle::Oracle;
use reflective_core::{recognize, GrammarId, Limits};

fn catalan(n: u64) -> u64 {
    (0..n).fold(1, |c, k| c * 2 * (2 * k + 1) / (k + 2))
}

#[test]
fn catalan_numbers_for_ss_a() {
    let g = ss_a();
    for n in 1..=8u64 {
        let s = "a".repeat(n as usize);
        let r = recognize(&g, &s, Limits::default()).unwrap();
        let c = count_parses(&build_sppf(&r).unwrap(), 1_000_000);
        assert_eq!(c, ParseCount::Exactly(catalan(n - 1)), "n={n}");
        let brute = with_big_stack(move || {
            Oracle::new(&s).count_derivations(&ss_a(), 1_000_000).unwrap()
        });
        assert_eq!(c, brute, "n={n}");
        assert_eq!(extract_unambiguous(&r).is_ok(), catalan(n - 1) == 1);
    }
}

#[test]
fn extraction_fails_exactly_when_count_is_not_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..60 {
        let case = random_grammar(&mut rng);
        for input in inputs_for(&case, &mut rng, 4) {
            let r = recognize(&case.grammar, &input, Limits::default()).unwrap();
            if !r.accepted {
                assert_eq!(extract_unambiguous(&r).unwrap_err(), ForestError::NotAccepted);
                continue;
            }
            let count = count_parses(&build_sppf(&r).unwrap(), 16);
            match extract_unambiguous(&r) {
                Ok(t) => {
                    assert_eq!(count, ParseCount::Exactly(1), "{input:?}");
                    assert_eq!(t.span(), (0, r.accept_position));
                }
                Err(ForestError::Ambiguous(a)) => {
                    assert_ne!(count, ParseCount::Exactly(1), "{input:?}");
                    assert!(a.span.1 <= r.accept_position);
                }
                Err(e) => panic!("{e}"),
            }
        }
    }
}

#[test]
fn sppf_json_is_stable() {
    let text = fixture("lambda_infix.txt");
    let render = || {
        let r = recognize(&base_grammar(), &text, Limits::default()).unwrap();
        serde_json::to_string(&build_sppf(&r).unwrap()).unwrap()
    };
    let first = render();
    for _ in 0..3 {
        assert_eq!(render(), first);
    }
}

#[test]
fn packed_children_point_inside_their_parent() {
    let r = recognize(&base_grammar(), &fixture("infix.txt"), Limits::default()).unwrap();
    let f = build_sppf(&r).unwrap();
    for n in &f.nodes {
        for p in &n.packed {
            assert!(n.start <= p.pivot && p.pivot <= n.end);
            if let Some(l) = p.left {
                assert_eq!((f.node(l).start, f.node(l).end), (n.start, p.pivot));
            }
            if let Some(rt) = p.right {
                assert_eq!(f.node(rt).end, n.end);
                assert_eq!(f.node(rt).start, p.pivot);
            }
        }
    }
}

#[test]
fn interned_grammars_are_pairwise_distinct() {
    for name in ["infix.txt", "lambda_infix.txt"] {
        let r = recognize(&base_grammar(), &fixture(name), Limits::default()).unwrap();
        let t = r.table();
        let ids: Vec<GrammarId> = t.ids().collect();
        for &a in &ids {
            for &b in &ids {
                let same_origin = t.get(a).origin == t.get(b).origin;
                assert_eq!(a == b, same_origin, "{name}: {a} {b}");
            }
            if let reflective_core::Origin::Extended { parent, location } = t.get(a).origin {
                assert!(parent < a);
                assert_eq!(t.lookup(parent, location), Some(a));
            }
        }
    }
}
