#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use reflective_core::oracle::{enumerate, Oracle};
use reflective_core::{
    audit_grammar_origins, build_sppf, count_parses, parse_grammar_source, Grammar, ParseCount, Production,
    Recognizer, Symbol,
};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn base_grammar() -> Grammar {
    parse_grammar_source(&fixture("base.gram")).unwrap()
}

/// The base grammar with `SimpleExpr → ℝ` in place of the braced form.
pub fn bare_refl_grammar() -> Grammar {
    parse_grammar_source(&fixture("base_bare_refl.gram")).unwrap()
}

pub fn lit(t: &str) -> Symbol {
    Symbol::literal(t).unwrap()
}

pub fn grammar(start: &str, prods: Vec<(&str, Vec<Symbol>)>) -> Grammar {
    Grammar::with_meta(
        start,
        prods.into_iter().map(|(l, r)| Production::new(l, r)).collect(),
    )
}

/// `S → S S | a`.
pub fn ss_a() -> Grammar {
    grammar(
        "S",
        vec![
            ("S", vec![Symbol::nt("S"), Symbol::nt("S")]),
            ("S", vec![lit("a")]),
        ],
    )
}

/// Runs `f` on a thread with a large stack; the oracle recurses deeply.
pub fn with_big_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new()
        .stack_size(512 << 20)
        .spawn(f)
        .unwrap()
        .join()
        .unwrap()
}

const NAMES: [&str; 4] = ["S", "A", "B", "C"];

/// Extension blocks used as single tokens when building inputs for
/// reflective grammars.
pub const CANNED_EXTENSIONS: [&str; 5] = [
    "gram <S> <S> ::= \"b\" ; end_gram",
    "gram <A> end_gram",
    "gram <S> <S> ::= \"c\" <S> ; <S> ::= ; end_gram",
    "gram <B> <B> ::= \"a\" REFL ; end_gram",
    "gram <T> <T> ::= <A> \"c\" ; end_gram",
];

#[derive(Debug, Clone)]
pub struct RandomCase {
    pub grammar: Grammar,
    pub alphabet: Vec<&'static str>,
    pub reflective: bool,
}

/// A random base grammar over 1 to 4 nonterminals with user size at most 25.
/// Roughly one in five contains `ℝ`.
pub fn random_grammar(rng: &mut impl Rng) -> RandomCase {
    let alphabet: Vec<&'static str> = if rng.gen_bool(0.5) {
        vec!["a", "b"]
    } else {
        vec!["a", "b", "c"]
    };
    let reflective = rng.gen_bool(0.2);
    let n = rng.gen_range(1..=NAMES.len());
    let names = &NAMES[..n];
    loop {
        let mut prods = Vec::new();
        for &lhs in names {
            for _ in 0..rng.gen_range(1..=3) {
                let len = rng.gen_range(0..=3);
                let rhs: Vec<Symbol> = (0..len)
                    .map(|_| {
                        if rng.gen_bool(0.5) {
                            lit(alphabet.choose(rng).unwrap())
                        } else {
                            Symbol::nt(names.choose(rng).unwrap())
                        }
                    })
                    .collect();
                prods.push(Production::new(lhs, rhs));
            }
        }
        if reflective {
            let k = rng.gen_range(0..prods.len());
            let at = rng.gen_range(0..=prods[k].rhs.len());
            prods[k].rhs.insert(at, Symbol::Refl);
        }
        if reflective_core::grammar::size_of(&prods) > 25 {
            continue;
        }
        let g = Grammar::with_meta("S", prods);
        if g.validate().is_empty() {
            return RandomCase {
                grammar: g,
                alphabet,
                reflective,
            };
        }
    }
}

fn all_strings(tokens: &[&str], max_len: usize, sep: &str) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![Vec::<&str>::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for t in tokens {
                let mut v = w.clone();
                v.push(t);
                out.push(v.join(sep));
                next.push(v);
            }
        }
        layer = next;
    }
    out
}

/// Test inputs for a case: every string over its alphabet up to
/// `exhaustive_len` letters, some with irregular spacing, and members
/// enumerated from the grammar. Reflective cases also get pairs of tokens
/// drawn from the alphabet and the canned extensions.
pub fn inputs_for(case: &RandomCase, rng: &mut impl Rng, exhaustive_len: usize) -> Vec<String> {
    let mut inputs = all_strings(&case.alphabet, exhaustive_len, "");
    if case.reflective {
        let mut toks: Vec<&str> = case.alphabet.clone();
        toks.extend(CANNED_EXTENSIONS);
        inputs.extend(all_strings(&toks, 2, " "));
    }
    for _ in 0..10 {
        let k = rng.gen_range(0..inputs.len());
        let spaced: String = inputs[k]
            .chars()
            .flat_map(|c| {
                let pad = if rng.gen_bool(0.3) { " \n" } else { "" };
                pad.chars().chain(std::iter::once(c))
            })
            .collect();
        inputs.push(format!("{spaced} "));
    }
    let max_tokens = if case.reflective { 12 } else { 10 };
    if let Ok(members) = enumerate::enumerate_with(
        &case.grammar,
        max_tokens,
        &reflective_vocabulary(&case.grammar),
        20_000,
    ) {
        let mut members: Vec<String> = members.into_iter().collect();
        members.shuffle(rng);
        inputs.extend(members.into_iter().take(40));
    }
    inputs.sort();
    inputs.dedup();
    inputs
}

pub fn reflective_vocabulary(g: &Grammar) -> enumerate::Vocabulary {
    let mut v = enumerate::Vocabulary::for_grammar(g);
    v.quoted = vec!["a".into(), "b".into(), "c".into()];
    v.names = vec!["S".into(), "A".into()];
    v
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Agree { accepted: bool },
    Disagree { engine: bool, oracle: bool },
    CountMismatch { forest: ParseCount, oracle: ParseCount },
    OracleFuel,
    OriginViolations(usize),
    ReflectiveFiring,
}

/// Recognizer against oracle on one input; for accepted inputs the parse
/// counts are compared too.
pub fn compare(grammar: &Grammar, input: &str) -> Verdict {
    let r = Recognizer::new(grammar).run(input).unwrap();
    let audit = audit_grammar_origins(&r);
    if !audit.is_empty() {
        return Verdict::OriginViolations(audit.len());
    }
    let f = &r.stats().rule_firings;
    if !grammar.contains_refl() && f.parse_grammar + f.refl_call + f.refl_return != 0 {
        return Verdict::ReflectiveFiring;
    }
    let mut oracle = Oracle::new(input).with_fuel(2_000_000);
    let o = match oracle.accepts(grammar) {
        Ok(v) => v,
        Err(_) => return Verdict::OracleFuel,
    };
    if o != r.accepted {
        return Verdict::Disagree {
            engine: r.accepted,
            oracle: o,
        };
    }
    if r.accepted {
        let forest = count_parses(&build_sppf(&r).unwrap(), 64);
        let expected = match oracle.count_derivations(grammar, 64) {
            Ok(c) => c,
            Err(_) => return Verdict::OracleFuel,
        };
        if forest != expected {
            return Verdict::CountMismatch {
                forest,
                oracle: expected,
            };
        }
    }
    Verdict::Agree { accepted: o }
}

pub struct NullableCase {
    pub name: &'static str,
    pub grammar: Grammar,
    pub inputs: Vec<(&'static str, bool)>,
}

/// Grammars whose parses depend on nullable completions, with hand-checked
/// memberships.
pub fn nullable_suite() -> Vec<NullableCase> {
    let nt = Symbol::nt;
    vec![
        NullableCase {
            name: "more-args",
            grammar: base_grammar(),
            inputs: vec![
                ("f(1)", true),
                ("f(1,2)", true),
                ("f(1, 2, 3)", true),
                ("f(g(1),2)", true),
                ("f()", false),
                ("f(1,)", false),
                ("f(1 2)", false),
            ],
        },
        NullableCase {
            name: "unit-to-empty",
            grammar: grammar(
                "S",
                vec![
                    ("S", vec![nt("A"), lit("x"), nt("A")]),
                    ("A", vec![nt("B")]),
                    ("B", vec![]),
                    ("B", vec![lit("b")]),
                ],
            ),
            inputs: vec![
                ("x", true),
                ("bx", true),
                ("xb", true),
                ("b x b", true),
                ("bbx", false),
                ("", false),
            ],
        },
        NullableCase {
            name: "chain",
            grammar: grammar(
                "S",
                vec![
                    ("S", vec![nt("A"), nt("B"), nt("C"), lit("z")]),
                    ("A", vec![nt("B")]),
                    ("B", vec![nt("C")]),
                    ("C", vec![]),
                ],
            ),
            inputs: vec![("z", true), ("", false), ("zz", false)],
        },
        NullableCase {
            name: "nullable-start",
            grammar: grammar(
                "S",
                vec![
                    ("S", vec![nt("A"), nt("A")]),
                    ("A", vec![]),
                    ("A", vec![lit("a")]),
                ],
            ),
            inputs: vec![("", true), ("  ", true), ("a", true), ("aa", true), ("aaa", false)],
        },
        NullableCase {
            name: "empty-after-complete",
            grammar: grammar(
                "S",
                vec![("S", vec![nt("A"), nt("A"), lit("c")]), ("A", vec![])],
            ),
            inputs: vec![("c", true), ("cc", false)],
        },
        NullableCase {
            name: "hidden-left-recursion",
            grammar: grammar(
                "S",
                vec![
                    ("S", vec![nt("N"), nt("S"), lit("a")]),
                    ("S", vec![lit("b")]),
                    ("N", vec![]),
                ],
            ),
            inputs: vec![("b", true), ("ba", true), ("baa", true), ("a", false), ("ab", false)],
        },
        NullableCase {
            name: "nullable-unit-cycle",
            grammar: grammar(
                "S",
                vec![
                    ("S", vec![nt("S"), nt("E")]),
                    ("S", vec![lit("s")]),
                    ("E", vec![]),
                ],
            ),
            inputs: vec![("s", true), ("ss", false), ("", false)],
        },
        NullableCase {
            name: "long-chain",
            grammar: grammar(
                "S",
                vec![
                    ("S", vec![nt("A1"), lit("q"), nt("A1")]),
                    ("A1", vec![nt("A2")]),
                    ("A2", vec![nt("A3")]),
                    ("A3", vec![nt("A4")]),
                    ("A4", vec![nt("A5")]),
                    ("A5", vec![]),
                    ("A5", vec![lit("p")]),
                ],
            ),
            inputs: vec![("q", true), ("pq", true), ("qp", true), ("pqp", true), ("ppq", false)],
        },
        NullableCase {
            name: "nullable-before-refl",
            grammar: grammar(
                "S",
                vec![
                    ("S", vec![nt("N"), Symbol::Refl, nt("N")]),
                    ("N", vec![]),
                ],
            ),
            inputs: vec![
                ("gram <T> <T> ::= ; end_gram", true),
                ("gram <T> <T> ::= \"t\" ; end_gram t", true),
                ("gram <T> <T> ::= \"t\" ; end_gram", false),
            ],
        },
    ]
}

/// Base `S → ℝ` and an input nesting three extensions; the final set holds
/// items from all three extended grammars and the base.
pub fn nested_extensions() -> (Grammar, &'static str) {
    (
        grammar("S", vec![("S", vec![Symbol::Refl])]),
        "gram <S> <S> ::= REFL ; end_gram \
         gram <S> <S> ::= REFL ; end_gram \
         gram <S> <S> ::= \"x\" ; end_gram x",
    )
}
