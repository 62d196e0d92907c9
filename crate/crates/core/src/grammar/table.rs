use std::collections::HashMap;
use std::sync::Arc;

use super::{compose, Extension, Grammar, GrammarId, LexClass, Origin, Symbol, Violation, GRAM};

/// Interned nonterminal name, shared by every grammar in one table.
pub(crate) type NameId = u32;

/// Right-hand-side symbol in the form the recognizer works with.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum Sym {
    Lit(Arc<[char]>),
    Lex(LexClass),
    Nt(NameId),
    Refl,
}

#[derive(Debug)]
pub(crate) struct Rule {
    pub lhs: NameId,
    pub rhs: Box<[Sym]>,
}

#[derive(Debug)]
struct Entry {
    grammar: Grammar,
    rules: Vec<Arc<Rule>>,
    by_lhs: HashMap<NameId, Vec<u32>>,
    start: NameId,
    gram_rule: Option<u32>,
}

#[derive(Debug, thiserror::Error)]
#[error("extension rejected: {}", violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ExtendError {
    pub violations: Vec<Violation>,
}

/// Append-only store of every grammar seen during one parse.
///
/// Extended grammars are interned on `(parent, location)`, so ids compare
/// equal exactly when the grammars were built at the same place from the
/// same parent. Parents always have smaller ids than their children.
#[derive(Debug)]
pub struct GrammarTable {
    entries: Vec<Entry>,
    index: HashMap<(GrammarId, (usize, usize)), GrammarId>,
    children: Vec<Vec<GrammarId>>,
    names: Vec<String>,
    name_ids: HashMap<String, NameId>,
}

impl GrammarTable {
    /// A table whose entry 0 is `base`.
    pub fn new(base: Grammar) -> Self {
        let mut table = GrammarTable {
            entries: Vec::new(),
            index: HashMap::new(),
            children: Vec::new(),
            names: Vec::new(),
            name_ids: HashMap::new(),
        };
        table.insert_root(base);
        table
    }

    /// Adds an unrelated root grammar. The recognizer only ever has one root;
    /// the oracle registers every grammar it is asked about this way.
    pub fn insert_root(&mut self, mut grammar: Grammar) -> GrammarId {
        grammar.origin = Origin::Base;
        let rules = grammar
            .productions
            .iter()
            .map(|p| Arc::new(self.compile(&p.lhs, &p.rhs)))
            .collect();
        self.push(grammar, rules)
    }

    /// `parent ⊕ ext` at `location`, or the grammar already built there.
    pub fn extend(
        &mut self,
        parent: GrammarId,
        ext: &Extension,
        location: (usize, usize),
    ) -> Result<GrammarId, ExtendError> {
        if let Some(&id) = self.index.get(&(parent, location)) {
            return Ok(id);
        }
        let parent_entry = &self.entries[parent.index()];
        let mut grammar =
            compose(&parent_entry.grammar, ext).map_err(|violations| ExtendError { violations })?;
        grammar.origin = Origin::Extended { parent, location };

        // Parent rules are shared; only the appended tail is compiled.
        let inherited = parent_entry.rules.len();
        let mut rules: Vec<Arc<Rule>> = parent_entry.rules.clone();
        let tail: Vec<_> = grammar.productions[inherited..].to_vec();
        for p in &tail {
            rules.push(Arc::new(self.compile(&p.lhs, &p.rhs)));
        }
        let id = self.push(grammar, rules);
        self.index.insert((parent, location), id);
        self.children[parent.index()].push(id);
        Ok(id)
    }

    fn push(&mut self, grammar: Grammar, rules: Vec<Arc<Rule>>) -> GrammarId {
        let mut by_lhs: HashMap<NameId, Vec<u32>> = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            by_lhs.entry(r.lhs).or_default().push(i as u32);
        }
        let start = self.intern(&grammar.start);
        let gram = self.intern(GRAM);
        let gram_rule = by_lhs.get(&gram).and_then(|v| v.first().copied());
        let id = GrammarId(self.entries.len() as u32);
        self.entries.push(Entry {
            grammar,
            rules,
            by_lhs,
            start,
            gram_rule,
        });
        self.children.push(Vec::new());
        id
    }

    fn compile(&mut self, lhs: &str, rhs: &[Symbol]) -> Rule {
        let lhs = self.intern(lhs);
        let rhs = rhs
            .iter()
            .map(|s| match s {
                Symbol::Literal(t) => Sym::Lit(t.chars().collect()),
                Symbol::Lex(c) => Sym::Lex(*c),
                Symbol::Nonterminal(n) => Sym::Nt(self.intern(n)),
                Symbol::Refl => Sym::Refl,
            })
            .collect();
        Rule { lhs, rhs }
    }

    fn intern(&mut self, name: &str) -> NameId {
        if let Some(&id) = self.name_ids.get(name) {
            return id;
        }
        let id = self.names.len() as NameId;
        self.names.push(name.to_owned());
        self.name_ids.insert(name.to_owned(), id);
        id
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: GrammarId) -> &Grammar {
        &self.entries[id.index()].grammar
    }

    pub fn ids(&self) -> impl Iterator<Item = GrammarId> {
        (0..self.entries.len() as u32).map(GrammarId)
    }

    /// Grammars built directly from `parent`, in creation order.
    pub fn children(&self, parent: GrammarId) -> &[GrammarId] {
        &self.children[parent.index()]
    }

    pub fn lookup(&self, parent: GrammarId, location: (usize, usize)) -> Option<GrammarId> {
        self.index.get(&(parent, location)).copied()
    }

    pub(crate) fn rule_arc(&self, g: GrammarId, rule: u32) -> Arc<Rule> {
        Arc::clone(&self.entries[g.index()].rules[rule as usize])
    }

    pub(crate) fn rules_for(&self, g: GrammarId, lhs: NameId) -> &[u32] {
        self.entries[g.index()]
            .by_lhs
            .get(&lhs)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub(crate) fn start_name(&self, g: GrammarId) -> NameId {
        self.entries[g.index()].start
    }

    pub(crate) fn gram_rule(&self, g: GrammarId) -> Option<u32> {
        self.entries[g.index()].gram_rule
    }

    #[cfg(test)]
    pub(crate) fn name(&self, id: NameId) -> &str {
        &self.names[id as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::Production;

    fn base() -> Grammar {
        Grammar::with_meta("S", vec![Production::new("S", vec![Symbol::Refl])])
    }

    fn ext(start: &str, lits: &[&str]) -> Extension {
        Extension {
            start: start.into(),
            productions: lits
                .iter()
                .map(|t| Production::new(start, vec![Symbol::literal(*t).unwrap()]))
                .collect(),
        }
    }

    #[test]
    fn interning_is_idempotent() {
        let mut t = GrammarTable::new(base());
        let a = t.extend(GrammarId::BASE, &ext("T", &["x"]), (0, 5)).unwrap();
        let b = t.extend(GrammarId::BASE, &ext("T", &["x"]), (0, 5)).unwrap();
        assert_eq!(a, b);
        assert_eq!(t.len(), 2);
        let c = t.extend(GrammarId::BASE, &ext("T", &["x"]), (0, 6)).unwrap();
        assert_ne!(a, c);
        let d = t.extend(a, &ext("T", &["x"]), (0, 5)).unwrap();
        assert_ne!(a, d);
        assert!(d > a);
        assert_eq!(t.children(GrammarId::BASE), &[a, c]);
    }

    #[test]
    fn extend_keeps_parent_rules_and_sets_origin() {
        let mut t = GrammarTable::new(base());
        let id = t.extend(GrammarId::BASE, &ext("T", &["x", "y"]), (2, 9)).unwrap();
        let g = t.get(id);
        assert_eq!(g.start, "T");
        assert_eq!(
            g.origin,
            Origin::Extended {
                parent: GrammarId::BASE,
                location: (2, 9)
            }
        );
        assert_eq!(g.size(), t.get(GrammarId::BASE).size() + 4);
        assert!(t.gram_rule(id).is_some());
        assert_eq!(t.name(t.start_name(id)), "T");
    }

    #[test]
    fn empty_extension_only_changes_start() {
        let mut t = GrammarTable::new(base());
        let id = t
            .extend(GrammarId::BASE, &Extension { start: "S".into(), productions: vec![] }, (0, 3))
            .unwrap();
        assert_eq!(t.get(id).productions, t.get(GrammarId::BASE).productions);
    }

    #[test]
    fn reserved_extension_fails() {
        let mut t = GrammarTable::new(base());
        let e = Extension {
            start: "S".into(),
            productions: vec![Production::new("Prod", vec![])],
        };
        let err = t.extend(GrammarId::BASE, &e, (0, 3)).unwrap_err();
        assert_eq!(err.violations.len(), 1);
        assert_eq!(t.len(), 1);
    }
}
