//! The fixed meta-syntax for grammars and its interpretation.
//!
//! ```text
//! gram <Start>
//!   <A> ::= "lit" <B> <Identifier> REFL ;
//! end_gram
//! ```
//!
//! The same notation describes in-language extensions (strings derived from
//! `Gram`) and base-grammar files.

pub mod lex;

use std::fmt;

use crate::grammar::{Extension, Grammar, LexClass, Production, Symbol, Violation, GRAM};
use lex::{lex_class, line_col, match_literal, skip_ws};

fn lit(t: &str) -> Symbol {
    Symbol::Literal(t.to_owned())
}

fn nt(n: &str) -> Symbol {
    Symbol::Nonterminal(n.to_owned())
}

/// The eight productions of `Gram`, `Prods`, `Prod` and `RhsItems`.
///
/// `REFL` is an ordinary literal here; it only becomes [`Symbol::Refl`] when
/// a `Gram` string is interpreted.
pub fn meta_productions() -> Vec<Production> {
    let name = || Symbol::Lex(LexClass::Nonterm);
    vec![
        Production::new(
            GRAM,
            vec![lit("gram"), lit("<"), name(), lit(">"), nt("Prods"), lit("end_gram")],
        ),
        Production::new("Prods", vec![]),
        Production::new("Prods", vec![nt("Prod"), nt("Prods")]),
        Production::new(
            "Prod",
            vec![lit("<"), name(), lit(">"), lit("::="), nt("RhsItems"), lit(";")],
        ),
        Production::new("RhsItems", vec![]),
        Production::new("RhsItems", vec![lit("<"), name(), lit(">"), nt("RhsItems")]),
        Production::new(
            "RhsItems",
            vec![Symbol::Lex(LexClass::QuotedString), nt("RhsItems")],
        ),
        Production::new("RhsItems", vec![lit("REFL"), nt("RhsItems")]),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("expected {expected} at offset {position}")]
pub struct InterpretError {
    pub position: usize,
    pub expected: &'static str,
}

struct Cursor<'a> {
    input: &'a [char],
    pos: usize,
}

impl Cursor<'_> {
    fn fail<T>(&self, expected: &'static str) -> Result<T, InterpretError> {
        Err(InterpretError {
            position: skip_ws(self.input, self.pos),
            expected,
        })
    }

    fn peek_lit(&self, text: &str) -> Option<usize> {
        let lit: Vec<char> = text.chars().collect();
        match_literal(self.input, skip_ws(self.input, self.pos), &lit)
    }

    fn eat(&mut self, text: &'static str) -> Result<(), InterpretError> {
        match self.peek_lit(text) {
            Some(end) => {
                self.pos = end;
                Ok(())
            }
            None => self.fail(text),
        }
    }

    fn class(&mut self, class: LexClass, what: &'static str) -> Result<String, InterpretError> {
        match lex_class(self.input, skip_ws(self.input, self.pos), class) {
            Some(m) => {
                self.pos = m.end;
                Ok(m.value)
            }
            None => self.fail(what),
        }
    }

    fn bracketed(&mut self) -> Result<String, InterpretError> {
        self.eat("<")?;
        let name = self.class(LexClass::Nonterm, "nonterminal name")?;
        self.eat(">")?;
        Ok(name)
    }
}

/// Interprets `input[span.0..span.1]`, which must be exactly one
/// `gram … end_gram` block (surrounding whitespace allowed).
///
/// Deterministic recursive descent over the meta productions, using the same
/// token rules as the recognizer, so any span the recognizer derives from
/// `Gram` is accepted here.
pub fn interpret(input: &[char], span: (usize, usize)) -> Result<Extension, InterpretError> {
    let (start, end) = span;
    let mut c = Cursor {
        input: &input[..end],
        pos: start,
    };
    c.eat("gram")?;
    let start_name = c.bracketed()?;
    let mut productions = Vec::new();
    while c.peek_lit("<").is_some() {
        let lhs = c.bracketed()?;
        c.eat("::=")?;
        let mut rhs = Vec::new();
        loop {
            let at = skip_ws(c.input, c.pos);
            if c.peek_lit("<").is_some() {
                rhs.push(Symbol::named(&c.bracketed()?));
            } else if c.input.get(at) == Some(&'"') {
                let text = c.class(LexClass::QuotedString, "closing quote")?;
                rhs.extend(text.split(lex::is_ws).filter(|t| !t.is_empty()).map(lit));
            } else if c.peek_lit("REFL").is_some() {
                c.eat("REFL")?;
                rhs.push(Symbol::Refl);
            } else {
                break;
            }
        }
        c.eat(";")?;
        productions.push(Production::new(lhs, rhs));
    }
    c.eat("end_gram")?;
    if skip_ws(c.input, c.pos) != end {
        return c.fail("end of grammar");
    }
    Ok(Extension {
        start: start_name,
        productions,
    })
}

impl fmt::Display for Extension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gram <{}>", self.start)?;
        for p in &self.productions {
            writeln!(f, "  {p}")?;
        }
        f.write_str("end_gram")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SourceError {
    #[error("{line}:{column}: expected {expected}")]
    Syntax {
        line: usize,
        column: usize,
        expected: &'static str,
    },
    #[error("invalid grammar: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

/// Reads a base-grammar file: one meta-syntax block. The meta productions
/// are added automatically.
pub fn parse_grammar_source(text: &str) -> Result<Grammar, SourceError> {
    let chars: Vec<char> = text.chars().collect();
    let ext = interpret(&chars, (0, chars.len())).map_err(|e| {
        let (line, column) = line_col(&chars, e.position);
        SourceError::Syntax {
            line,
            column,
            expected: e.expected,
        }
    })?;
    let grammar = Grammar::from_extension(ext);
    let violations = grammar.validate();
    if violations.is_empty() {
        Ok(grammar)
    } else {
        Err(SourceError::Invalid(violations))
    }
}
