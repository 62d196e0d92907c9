mod common;

use common::{nullable_suite, with_big_stack};
use reflective_core::oracle::Oracle;
use reflective_core::{recognize, Limits};

#[test]
fn nullable_suite_matches_expectations() {
    with_big_stack(|| {
        for case in nullable_suite() {
            for (input, want) in &case.inputs {
                let r = recognize(&case.grammar, input, Limits::default()).unwrap();
                assert_eq!(r.accepted, *want, "{}: {input:?}", case.name);
                let o = Oracle::new(input).accepts(&case.grammar).unwrap();
                assert_eq!(o, *want, "oracle, {}: {input:?}", case.name);
            }
        }
    });
}

#[test]
fn nullable_sets() {
    let suite = nullable_suite();
    let chain = suite.iter().find(|c| c.name == "chain").unwrap();
    let got: Vec<String> = chain.grammar.nullable_set().into_iter().collect();
    assert!(["A", "B", "C", "Prods", "RhsItems"].iter().all(|n| got.contains(&n.to_string())));
    assert!(!got.contains(&"S".to_string()));
}
