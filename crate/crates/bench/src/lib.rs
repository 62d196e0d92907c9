//! Workloads for benchmarking the recognizer.

use reflective_core::{parse_grammar_source, Grammar};

pub const BASE_GRAMMAR: &str = r#"gram <Expr>
  <Expr> ::= <SimpleExpr> "(" <Expr> <MoreArgs> ")" ;
  <Expr> ::= <SimpleExpr> ;
  <SimpleExpr> ::= <Identifier> ;
  <SimpleExpr> ::= <NaturalNumber> ;
  <SimpleExpr> ::= "{{" REFL "}}" ;
  <MoreArgs> ::= ;
  <MoreArgs> ::= "," <Expr> <MoreArgs> ;
end_gram"#;

const INFIX_EXTENSION: &str = r#"gram <Expr>
  <Expr> ::= <SimpleExpr> <Op> <Expr> ;
  <Op> ::= "+" ;
end_gram"#;

pub fn base_grammar() -> Grammar {
    parse_grammar_source(BASE_GRAMMAR).expect("built-in grammar")
}

/// `S → S S | a`, highly ambiguous.
pub fn ss_a() -> Grammar {
    parse_grammar_source(r#"gram <S> <S> ::= <S> <S> ; <S> ::= "a" ; end_gram"#)
        .expect("built-in grammar")
}

/// `f(1, f(2, ... f(n) ...))` for the base grammar; no reflection.
pub fn nested_calls(n: usize) -> String {
    let mut s = String::new();
    for k in 0..n {
        s.push_str(&format!("f({k}, "));
    }
    s.push('0');
    s.push_str(&")".repeat(n));
    s
}

/// `f(1, 2, ..., n)` for the base grammar.
pub fn flat_call(n: usize) -> String {
    let args: Vec<String> = (0..n).map(|k| k.to_string()).collect();
    format!("f({})", args.join(", "))
}

/// `f({{ infix-extension 1 + 2 + ... + n }})`: one extension, then a long
/// sentence in the extended grammar.
pub fn infix_sum(n: usize) -> String {
    let terms: Vec<String> = (0..n).map(|k| k.to_string()).collect();
    format!("f({{{{ {INFIX_EXTENSION} {} }}}})", terms.join(" + "))
}

/// `f({{ ext 1 }}, {{ ext 2 }}, ...)`: `n` separate extensions.
pub fn many_extensions(n: usize) -> String {
    let args: Vec<String> = (0..n)
        .map(|k| format!("{{{{ {INFIX_EXTENSION} {k} + {k} }}}}"))
        .collect();
    format!("f({})", args.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use reflective_core::Recognizer;

    #[test]
    fn workloads_are_sentences() {
        let g = base_grammar();
        for input in [nested_calls(5), flat_call(5), infix_sum(5), many_extensions(3)] {
            let r = Recognizer::new(&g).run(&input).unwrap();
            assert!(r.accepted, "{input}");
        }
        let r = Recognizer::new(&g).run(&many_extensions(3)).unwrap();
        assert_eq!(r.stats().grammars_created, 3);
        assert!(Recognizer::new(&ss_a()).run("aaaa").unwrap().accepted);
    }
}
