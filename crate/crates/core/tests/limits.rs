mod common;

use common::nested_extensions;
use reflective_core::{audit_grammar_origins, Limits, RecognizeError, Recognizer};

#[test]
fn nested_extensions_coexist_in_one_set() {
    let (g, input) = nested_extensions();
    let r = Recognizer::new(&g).run(input).unwrap();
    assert!(r.accepted);
    assert_eq!(r.stats().grammars_created, 3);
    assert_eq!(r.stats().max_m_seen, 4);
    let last = r.set(r.accept_position);
    assert_eq!(last.grammars().len(), 4);
    assert!(audit_grammar_origins(&r).is_empty());
}

#[test]
fn max_m_aborts() {
    let (g, input) = nested_extensions();
    match Recognizer::new(&g).max_m(2).run(input) {
        Err(RecognizeError::MLimitExceeded { count, limit, .. }) => {
            assert_eq!(limit, 2);
            assert_eq!(count, 3);
        }
        other => panic!("{other:?}"),
    }
    assert!(Recognizer::new(&g).max_m(4).run(input).unwrap().accepted);
    assert!(Recognizer::new(&g)
        .limits(Limits { max_m: Some(1) })
        .run("")
        .is_ok());
}
