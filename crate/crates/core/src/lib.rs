//! Recognition and parsing for reflective grammars: context-free grammars
//! whose sentences can extend the grammar part-way through the input.
//!
//! The pipeline is [`recognize`] (an Earley recognizer extended with
//! reflection rules), then either [`forest::extract_unambiguous`] for a single
//! tree or [`forest::build_sppf`] for a shared packed parse forest. The
//! [`oracle`] module is a slow, direct implementation of the language
//! definition used to check the recognizer.

pub mod engine;
pub mod forest;
pub mod grammar;
pub mod meta;
pub mod oracle;

pub use engine::{
    audit_grammar_origins, recognize, Cause, Item, ItemRef, ItemSet, Limits, Link,
    RecognitionResult, RecognizeError, Recognizer, Stats,
};
pub use grammar::{
    Extension, Grammar, GrammarId, GrammarTable, LexClass, Origin, Production, Symbol, Violation,
};
pub use meta::{interpret, meta_productions, parse_grammar_source};
pub use forest::{build_sppf, count_parses, extract_unambiguous, ParseCount, ParseTree, Sppf};
pub use oracle::{DerivationQuery, Oracle};
