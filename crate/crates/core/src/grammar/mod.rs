//! Grammars, symbols and the composition operator.
//!
//! A reflective grammar is an ordinary context-free grammar whose right-hand
//! sides may also contain [`Symbol::Refl`]. Grammars created while parsing
//! are stored in a [`GrammarTable`] and compared by identity: two extended
//! grammars are the same grammar exactly when they were built from the same
//! parent at the same input location.

pub(crate) mod table;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

pub use table::{ExtendError, GrammarTable};

/// Nonterminal defined by the fixed meta-syntax. Its strings describe grammar
/// extensions.
pub const GRAM: &str = "Gram";

/// Nonterminals owned by the meta-syntax. User grammars and extensions may
/// reference them but never add productions for them.
pub const RESERVED_NONTERMINALS: [&str; 4] = [GRAM, "Prods", "Prod", "RhsItems"];

/// Built-in lexical classes, written `<Identifier>` etc. in the meta-syntax.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LexClass {
    Identifier,
    NaturalNumber,
    QuotedString,
    Nonterm,
}

impl LexClass {
    pub const ALL: [LexClass; 4] = [
        LexClass::Identifier,
        LexClass::NaturalNumber,
        LexClass::QuotedString,
        LexClass::Nonterm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LexClass::Identifier => "Identifier",
            LexClass::NaturalNumber => "NaturalNumber",
            LexClass::QuotedString => "QuotedString",
            LexClass::Nonterm => "Nonterm",
        }
    }

    pub fn from_name(name: &str) -> Option<LexClass> {
        LexClass::ALL.into_iter().find(|c| c.name() == name)
    }
}

impl fmt::Display for LexClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One element of a right-hand side.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    /// A literal token. Never empty, never contains whitespace.
    Literal(String),
    Lex(LexClass),
    Nonterminal(String),
    /// The reflection marker: a `Gram` string followed by a sentence of the
    /// grammar it describes.
    Refl,
}

impl Symbol {
    /// Builds a literal, rejecting empty or whitespace-containing text.
    pub fn literal(text: impl Into<String>) -> Option<Symbol> {
        let text = text.into();
        if text.is_empty() || text.chars().any(char::is_whitespace) {
            None
        } else {
            Some(Symbol::Literal(text))
        }
    }

    /// Resolves a bracketed name: lexical class names win over nonterminals.
    pub fn named(name: &str) -> Symbol {
        match LexClass::from_name(name) {
            Some(class) => Symbol::Lex(class),
            None => Symbol::Nonterminal(name.to_owned()),
        }
    }

    pub fn nt(name: &str) -> Symbol {
        Symbol::Nonterminal(name.to_owned())
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, Symbol::Literal(_) | Symbol::Lex(_))
    }

    pub fn as_nonterminal(&self) -> Option<&str> {
        match self {
            Symbol::Nonterminal(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    /// Meta-syntax spelling.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Literal(t) => write!(f, "\"{t}\""),
            Symbol::Lex(c) => write!(f, "<{c}>"),
            Symbol::Nonterminal(n) => write!(f, "<{n}>"),
            Symbol::Refl => f.write_str("REFL"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Production {
    pub lhs: String,
    pub rhs: Vec<Symbol>,
}

impl Production {
    pub fn new(lhs: impl Into<String>, rhs: Vec<Symbol>) -> Self {
        Production { lhs: lhs.into(), rhs }
    }
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}> ::=", self.lhs)?;
        for s in &self.rhs {
            write!(f, " {s}")?;
        }
        f.write_str(" ;")
    }
}

/// Dense handle into a [`GrammarTable`]. Id 0 is always the base grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct GrammarId(pub u32);

impl GrammarId {
    pub const BASE: GrammarId = GrammarId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for GrammarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    Base,
    /// Built by extending `parent` with the `Gram` text at `location`
    /// (half-open character range of the input).
    Extended {
        parent: GrammarId,
        location: (usize, usize),
    },
}

/// The result of interpreting a `Gram` string: a new start nonterminal and
/// the productions to add.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Extension {
    pub start: String,
    pub productions: Vec<Production>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    pub productions: Vec<Production>,
    pub start: String,
    pub origin: Origin,
}

impl Grammar {
    /// Base grammar: the meta-syntax productions followed by `productions`.
    pub fn with_meta(start: impl Into<String>, productions: Vec<Production>) -> Grammar {
        let mut all = crate::meta::meta_productions();
        all.extend(productions);
        Grammar {
            productions: all,
            start: start.into(),
            origin: Origin::Base,
        }
    }

    /// Base grammar built from an already interpreted extension.
    pub fn from_extension(ext: Extension) -> Grammar {
        Grammar::with_meta(ext.start, ext.productions)
    }

    pub fn productions_for<'a>(&'a self, lhs: &'a str) -> impl Iterator<Item = &'a Production> {
        self.productions.iter().filter(move |p| p.lhs == lhs)
    }

    pub fn contains_refl(&self) -> bool {
        self.productions
            .iter()
            .any(|p| p.rhs.contains(&Symbol::Refl))
    }

    /// Number of productions plus the total length of all right-hand sides.
    pub fn size(&self) -> usize {
        size_of(&self.productions)
    }

    /// Nonterminals that derive the empty string.
    pub fn nullable_set(&self) -> BTreeSet<String> {
        nullable_set(&self.productions)
    }

    /// Structural restrictions on a grammar. An empty list means the grammar
    /// is usable as a base grammar.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let meta: HashSet<Production> = crate::meta::meta_productions().into_iter().collect();

        let grams: Vec<usize> = self
            .productions
            .iter()
            .enumerate()
            .filter(|(_, p)| p.lhs == GRAM)
            .map(|(i, _)| i)
            .collect();
        if grams.len() != 1 {
            out.push(Violation {
                production: grams.get(1).copied(),
                kind: ViolationKind::GramNotUnique { count: grams.len() },
            });
        }
        if self.nullable_set().contains(GRAM) {
            out.push(Violation {
                production: grams.first().copied(),
                kind: ViolationKind::GramNullable,
            });
        }

        for (i, p) in self.productions.iter().enumerate() {
            if p.lhs.is_empty() {
                out.push(Violation {
                    production: Some(i),
                    kind: ViolationKind::EmptyName,
                });
            }
            let lexical = LexClass::from_name(&p.lhs).is_some();
            if lexical || (p.lhs != GRAM && is_reserved(&p.lhs) && !meta.contains(p)) {
                out.push(Violation {
                    production: Some(i),
                    kind: ViolationKind::ReservedExtended(p.lhs.clone()),
                });
            }
            for s in &p.rhs {
                match s {
                    Symbol::Literal(t) if Symbol::literal(t.clone()).is_none() => {
                        out.push(Violation {
                            production: Some(i),
                            kind: ViolationKind::BadLiteral(t.clone()),
                        })
                    }
                    Symbol::Nonterminal(n) if n.is_empty() => out.push(Violation {
                        production: Some(i),
                        kind: ViolationKind::EmptyName,
                    }),
                    _ => {}
                }
            }
        }

        let defined: HashSet<&str> = self.productions.iter().map(|p| p.lhs.as_str()).collect();
        let mut undefined = BTreeSet::new();
        for (i, p) in self.productions.iter().enumerate() {
            for n in p.rhs.iter().filter_map(Symbol::as_nonterminal) {
                if !defined.contains(n) && undefined.insert(n) {
                    out.push(Violation {
                        production: Some(i),
                        kind: ViolationKind::Undefined(n.to_owned()),
                    });
                }
            }
        }
        if !defined.contains(self.start.as_str()) {
            out.push(Violation {
                production: None,
                kind: ViolationKind::Undefined(self.start.clone()),
            });
        }
        out
    }
}

pub fn is_reserved(name: &str) -> bool {
    RESERVED_NONTERMINALS.contains(&name) || LexClass::from_name(name).is_some()
}

pub fn size_of(productions: &[Production]) -> usize {
    productions.len() + productions.iter().map(|p| p.rhs.len()).sum::<usize>()
}

/// Least fixed point of "some production has an all-nullable rhs".
pub fn nullable_set(productions: &[Production]) -> BTreeSet<String> {
    let mut nullable = BTreeSet::new();
    loop {
        let mut changed = false;
        for p in productions {
            if nullable.contains(&p.lhs) {
                continue;
            }
            let all = p.rhs.iter().all(|s| match s {
                Symbol::Nonterminal(n) => nullable.contains(n),
                _ => false,
            });
            if all {
                nullable.insert(p.lhs.clone());
                changed = true;
            }
        }
        if !changed {
            return nullable;
        }
    }
}

/// Restrictions every extension must satisfy before it is composed.
pub fn validate_extension(ext: &Extension) -> Vec<Violation> {
    let mut out = Vec::new();
    if ext.start.is_empty() {
        out.push(Violation {
            production: None,
            kind: ViolationKind::EmptyName,
        });
    }
    for (i, p) in ext.productions.iter().enumerate() {
        if is_reserved(&p.lhs) {
            out.push(Violation {
                production: Some(i),
                kind: ViolationKind::ReservedExtended(p.lhs.clone()),
            });
        }
    }
    out
}

/// `parent ⊕ ext`: parent productions followed by the extension's (exact
/// duplicates dropped), with the extension's start. The origin is left as
/// `Base`; [`GrammarTable::extend`] fills it in.
pub fn compose(parent: &Grammar, ext: &Extension) -> Result<Grammar, Vec<Violation>> {
    let violations = validate_extension(ext);
    if !violations.is_empty() {
        return Err(violations);
    }
    let mut seen: HashSet<&Production> = parent.productions.iter().collect();
    let mut productions = parent.productions.clone();
    for p in &ext.productions {
        if seen.insert(p) {
            productions.push(p.clone());
        }
    }
    Ok(Grammar {
        productions,
        start: ext.start.clone(),
        origin: Origin::Base,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Index of the offending production, when there is one.
    pub production: Option<usize>,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    GramNullable,
    GramNotUnique { count: usize },
    ReservedExtended(String),
    Undefined(String),
    BadLiteral(String),
    EmptyName,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ViolationKind::GramNullable => f.write_str("Gram nullable")?,
            ViolationKind::GramNotUnique { count } => {
                write!(f, "Gram must have exactly one production, found {count}")?
            }
            ViolationKind::ReservedExtended(n) => {
                write!(f, "reserved nonterminal extended: {n}")?
            }
            ViolationKind::Undefined(n) => write!(f, "nonterminal {n} has no productions")?,
            ViolationKind::BadLiteral(t) => write!(f, "invalid literal {t:?}")?,
            ViolationKind::EmptyName => f.write_str("empty nonterminal name")?,
        }
        if let Some(i) = self.production {
            write!(f, " (production {i})")?;
        }
        Ok(())
    }
}
