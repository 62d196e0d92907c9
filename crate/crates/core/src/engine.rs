//! The reflective Earley recognizer.
//!
//! Item sets are closed strictly left to right. Each set is seeded by
//! R-Start (set 0) or by shifts out of earlier sets, then closed over
//! R-Call, R-Return, R-Parse-grammar, R-Refl-call and R-Refl-return until no
//! new items appear. Rules with two item antecedents fire from whichever
//! antecedent is processed second, which covers nullable completions without
//! any precomputation.

use std::collections::HashMap;
use std::mem;
use std::sync::Arc;

use serde::Serialize;

use crate::grammar::table::{NameId, Rule, Sym};
use crate::grammar::{
    ExtendError, Grammar, GrammarId, GrammarTable, Origin, Production, Symbol, Violation,
};
use crate::meta::{self, lex};

/// `⟨origin, rule · dot, grammar⟩`. `rule` indexes the grammar's production
/// list; all four fields are small integers so equality is constant-time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Item {
    pub origin: u32,
    pub rule: u32,
    pub dot: u32,
    pub grammar: GrammarId,
}

impl Item {
    fn advanced(self) -> Item {
        Item {
            dot: self.dot + 1,
            ..self
        }
    }

    pub fn production<'t>(&self, table: &'t GrammarTable) -> &'t Production {
        &table.get(self.grammar).productions[self.rule as usize]
    }

    pub fn is_complete(&self, table: &GrammarTable) -> bool {
        self.dot as usize == self.production(table).rhs.len()
    }

    /// Symbol immediately left of the dot.
    pub fn last_consumed<'t>(&self, table: &'t GrammarTable) -> Option<&'t Symbol> {
        let dot = self.dot as usize;
        (dot > 0).then(|| &self.production(table).rhs[dot - 1])
    }

    pub fn display(&self, table: &GrammarTable) -> String {
        let p = self.production(table);
        let mut s = format!("<{}, {} ->", self.origin, p.lhs);
        for (i, sym) in p.rhs.iter().enumerate() {
            if i == self.dot as usize {
                s.push_str(" .");
            }
            s.push(' ');
            s.push_str(&sym.to_string());
        }
        if self.dot as usize == p.rhs.len() {
            s.push_str(" .");
        }
        s.push_str(&format!(", {}>", self.grammar));
        s
    }
}

/// Address of an item: set position plus index within the set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ItemRef {
    pub set: u32,
    pub index: u32,
}

impl ItemRef {
    fn new(set: usize, index: usize) -> Self {
        ItemRef {
            set: set as u32,
            index: index as u32,
        }
    }
}

/// Why the symbol left of the dot was consumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cause {
    /// A terminal spanning from the predecessor's set to this item's set
    /// (leading whitespace included).
    Token,
    /// A completed item for the nonterminal (reduction pointer).
    Reduction(ItemRef),
    /// The completed `Gram` item and the completed start item of the
    /// extended grammar it produced.
    Reflection { gram: ItemRef, body: ItemRef },
}

/// One derivation step into an item: the item with the dot one symbol to the
/// left, and what justified moving it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Link {
    pub predecessor: ItemRef,
    pub cause: Cause,
}

/// The set `S_j`.
#[derive(Debug, Default)]
pub struct ItemSet {
    position: usize,
    items: Vec<Item>,
    links: Vec<Vec<Link>>,
    /// `buckets[i]` lists the items with origin `i`.
    buckets: Vec<Vec<u32>>,
    grammars: Vec<GrammarId>,
}

impl ItemSet {
    pub fn position(&self) -> usize {
        self.position
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn links(&self, index: usize) -> &[Link] {
        &self.links[index]
    }

    /// Indices of items whose origin is `origin`.
    pub fn with_origin(&self, origin: usize) -> &[u32] {
        self.buckets.get(origin).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Distinct grammars among this set's items.
    pub fn grammars(&self) -> &[GrammarId] {
        &self.grammars
    }

    pub fn find(&self, item: &Item) -> Option<usize> {
        self.with_origin(item.origin as usize)
            .iter()
            .map(|&k| k as usize)
            .find(|&k| self.items[k] == *item)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RuleFirings {
    pub start: u64,
    pub shift: u64,
    pub call: u64,
    #[serde(rename = "return")]
    pub return_: u64,
    pub parse_grammar: u64,
    pub refl_call: u64,
    pub refl_return: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub items_total: u64,
    pub items_processed: u64,
    pub rule_firings: RuleFirings,
    pub grammars_created: u64,
    pub max_m_seen: u64,
}

/// An extension that was recognized as a `Gram` string but could not be
/// applied. The corresponding reflection simply does not match there.
#[derive(Debug, Clone)]
pub struct ExtensionDiagnostic {
    pub parent: GrammarId,
    pub location: (usize, usize),
    pub message: String,
    pub violations: Vec<Violation>,
}

#[derive(Debug, thiserror::Error)]
pub enum RecognizeError {
    #[error("{count} candidate grammars at offset {position} exceed the limit of {limit}")]
    MLimitExceeded {
        position: usize,
        count: usize,
        limit: usize,
    },
    #[error("invalid base grammar: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidGrammar(Vec<Violation>),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Limits {
    /// Abort once any set holds items from more than this many grammars.
    pub max_m: Option<usize>,
}

#[derive(Debug)]
pub struct RecognitionResult {
    pub accepted: bool,
    /// Start of the trailing whitespace; acceptance is checked in this set.
    pub accept_position: usize,
    /// Rightmost non-empty set.
    pub furthest: usize,
    input: Vec<char>,
    sets: Vec<ItemSet>,
    table: GrammarTable,
    stats: Stats,
    diagnostics: Vec<ExtensionDiagnostic>,
    origin_items: Vec<Option<ItemRef>>,
    annotated: bool,
}

impl RecognitionResult {
    pub fn input(&self) -> &[char] {
        &self.input
    }

    pub fn sets(&self) -> &[ItemSet] {
        &self.sets
    }

    pub fn set(&self, j: usize) -> &ItemSet {
        &self.sets[j]
    }

    pub fn table(&self) -> &GrammarTable {
        &self.table
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn diagnostics(&self) -> &[ExtensionDiagnostic] {
        &self.diagnostics
    }

    /// Whether derivation links were recorded (needed for parse trees).
    pub fn annotated(&self) -> bool {
        self.annotated
    }

    pub fn item(&self, r: ItemRef) -> Item {
        self.sets[r.set as usize].items[r.index as usize]
    }

    pub fn links(&self, r: ItemRef) -> &[Link] {
        &self.sets[r.set as usize].links[r.index as usize]
    }

    /// The completed `Gram` item that created extended grammar `g`.
    pub fn gram_item_for(&self, g: GrammarId) -> Option<ItemRef> {
        self.origin_items.get(g.index()).copied().flatten()
    }

    /// Completed `⟨0, start → δ·, base⟩` items in the acceptance set.
    pub fn accepting_items(&self) -> Vec<ItemRef> {
        let start = &self.table.get(GrammarId::BASE).start;
        let set = &self.sets[self.accept_position];
        set.with_origin(0)
            .iter()
            .map(|&k| ItemRef::new(self.accept_position, k as usize))
            .filter(|r| {
                let it = self.item(*r);
                it.grammar == GrammarId::BASE
                    && it.is_complete(&self.table)
                    && it.production(&self.table).lhs == *start
            })
            .collect()
    }

    pub fn item_count(&self) -> usize {
        self.sets.iter().map(ItemSet::len).sum()
    }
}

/// Recognizes `input` against `base`, recording derivation links.
pub fn recognize(
    base: &Grammar,
    input: &str,
    limits: Limits,
) -> Result<RecognitionResult, RecognizeError> {
    Recognizer::new(base).limits(limits).run(input)
}

/// Configurable entry point. Link recording can be switched off when only
/// the yes/no answer is wanted; links cost memory proportional to the number
/// of derivation steps.
#[derive(Debug, Clone)]
pub struct Recognizer<'g> {
    base: &'g Grammar,
    limits: Limits,
    annotate: bool,
}

impl<'g> Recognizer<'g> {
    pub fn new(base: &'g Grammar) -> Self {
        Recognizer {
            base,
            limits: Limits::default(),
            annotate: true,
        }
    }

    pub fn limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn max_m(mut self, max_m: usize) -> Self {
        self.limits.max_m = Some(max_m);
        self
    }

    pub fn annotate(mut self, annotate: bool) -> Self {
        self.annotate = annotate;
        self
    }

    pub fn run(&self, input: &str) -> Result<RecognitionResult, RecognizeError> {
        let violations = self.base.validate();
        if !violations.is_empty() {
            return Err(RecognizeError::InvalidGrammar(violations));
        }
        let input: Vec<char> = input.chars().collect();
        let n = input.len();
        let mut run = Run {
            chart: Chart {
                sets: (0..=n)
                    .map(|position| ItemSet {
                        position,
                        ..ItemSet::default()
                    })
                    .collect(),
                stats: Stats::default(),
                annotate: self.annotate,
                max_m: self.limits.max_m,
                current: 0,
            },
            index: (0..=n).map(|_| SetIndex::default()).collect(),
            table: GrammarTable::new(self.base.clone()),
            input,
            diagnostics: Vec::new(),
            origin_items: vec![None],
        };
        run.execute()?;
        Ok(run.finish())
    }
}

/// Lookup structures for one set, filled as items are processed.
#[derive(Default)]
struct SetIndex {
    /// Items waiting on a nonterminal: `⟨i, A → α·Bβ, G⟩` keyed by `(B, G)`.
    waiting: HashMap<(NameId, GrammarId), Vec<u32>>,
    /// Items waiting on `ℝ`, keyed by grammar.
    refl_waiting: HashMap<GrammarId, Vec<u32>>,
    /// Completed items whose origin is this set's own position.
    done_here: HashMap<(NameId, GrammarId), Vec<u32>>,
}

struct Run {
    input: Vec<char>,
    table: GrammarTable,
    chart: Chart,
    index: Vec<SetIndex>,
    diagnostics: Vec<ExtensionDiagnostic>,
    origin_items: Vec<Option<ItemRef>>,
}

/// The item sets plus the counters updated on insertion.
struct Chart {
    sets: Vec<ItemSet>,
    stats: Stats,
    annotate: bool,
    max_m: Option<usize>,
    current: usize,
}

impl Run {
    fn execute(&mut self) -> Result<(), RecognizeError> {
        let start = self.table.start_name(GrammarId::BASE);
        for &rule in self.table.rules_for(GrammarId::BASE, start).iter() {
            self.chart.stats.rule_firings.start += 1;
            self.chart.insert(
                0,
                Item {
                    origin: 0,
                    rule,
                    dot: 0,
                    grammar: GrammarId::BASE,
                },
                None,
            )?;
        }
        for j in 0..self.chart.sets.len() {
            self.chart.current = j;
            let mut cursor = 0;
            while cursor < self.chart.sets[j].items.len() {
                self.process(j, cursor)?;
                self.chart.stats.items_processed += 1;
                cursor += 1;
            }
        }
        Ok(())
    }

    fn rule(&self, item: &Item) -> Arc<Rule> {
        self.table.rule_arc(item.grammar, item.rule)
    }

    fn process(&mut self, j: usize, idx: usize) -> Result<(), RecognizeError> {
        let item = self.chart.sets[j].items[idx];
        let here = ItemRef::new(j, idx);
        let rule = self.rule(&item);
        let g = item.grammar;

        if let Some(next) = rule.rhs.get(item.dot as usize) {
            match next {
                Sym::Lit(text) => {
                    let p = lex::skip_ws(&self.input, j);
                    if let Some(end) = lex::match_literal(&self.input, p, text) {
                        self.shift(item, here, end)?;
                    }
                }
                Sym::Lex(class) => {
                    let p = lex::skip_ws(&self.input, j);
                    if let Some(end) = lex::lex_class_end(&self.input, p, *class) {
                        self.shift(item, here, end)?;
                    }
                }
                Sym::Nt(b) => {
                    let key = (*b, g);
                    self.index[j].waiting.entry(key).or_default().push(idx as u32);
                    // R-Call
                    for &r in self.table.rules_for(g, *b).iter() {
                        self.chart.stats.rule_firings.call += 1;
                        let seed = Item {
                            origin: j as u32,
                            rule: r,
                            dot: 0,
                            grammar: g,
                        };
                        self.chart.insert(j, seed, None)?;
                    }
                    // R-Return, for completions of B already seen in this set
                    // (only possible when B derived the empty string).
                    let done = self.index[j].done_here.get(&key).cloned().unwrap_or_default();
                    for c in done {
                        self.chart.stats.rule_firings.return_ += 1;
                        let link = Link {
                            predecessor: here,
                            cause: Cause::Reduction(ItemRef::new(j, c as usize)),
                        };
                        self.chart.insert(j, item.advanced(), Some(link))?;
                    }
                }
                Sym::Refl => {
                    self.index[j].refl_waiting.entry(g).or_default().push(idx as u32);
                    // R-Parse-grammar
                    if let Some(gram) = self.table.gram_rule(g) {
                        self.chart.stats.rule_firings.parse_grammar += 1;
                        let seed = Item {
                            origin: j as u32,
                            rule: gram,
                            dot: 0,
                            grammar: g,
                        };
                        self.chart.insert(j, seed, None)?;
                    }
                }
            }
            return Ok(());
        }

        // Completed item ⟨i, A → δ·, G⟩ in S_j.
        let i = item.origin as usize;
        let key = (rule.lhs, g);
        if i == j {
            self.index[j].done_here.entry(key).or_default().push(idx as u32);
        }

        // R-Return. The waiting list is detached while inserting; inserts
        // never touch the index, only processing does.
        if let Some(waiting) = self.index[i].waiting.get_mut(&key) {
            let waiting = mem::take(waiting);
            let mut result = Ok(());
            for &w in &waiting {
                self.chart.stats.rule_firings.return_ += 1;
                let pred = ItemRef::new(i, w as usize);
                let link = Link {
                    predecessor: pred,
                    cause: Cause::Reduction(here),
                };
                let advanced = self.chart.sets[i].items[w as usize].advanced();
                result = self.chart.insert(j, advanced, Some(link));
                if result.is_err() {
                    break;
                }
            }
            self.index[i].waiting.insert(key, waiting);
            result?;
        }

        // R-Refl-call
        if i < j && self.table.gram_rule(g) == Some(item.rule) {
            let has_waiting = self.index[i]
                .refl_waiting
                .get(&g)
                .is_some_and(|w| !w.is_empty());
            if has_waiting {
                self.refl_call(g, (i, j), here)?;
            }
        }

        // R-Refl-return
        if let Origin::Extended {
            parent,
            location: (jj, kk),
        } = self.table.get(g).origin
        {
            if i == kk && rule.lhs == self.table.start_name(g) {
                let gram = self.origin_items[g.index()].expect("extended grammar without origin");
                if let Some(waiting) = self.index[jj].refl_waiting.get_mut(&parent) {
                    let waiting = mem::take(waiting);
                    let mut result = Ok(());
                    for &w in &waiting {
                        self.chart.stats.rule_firings.refl_return += 1;
                        let link = Link {
                            predecessor: ItemRef::new(jj, w as usize),
                            cause: Cause::Reflection { gram, body: here },
                        };
                        let advanced = self.chart.sets[jj].items[w as usize].advanced();
                        result = self.chart.insert(j, advanced, Some(link));
                        if result.is_err() {
                            break;
                        }
                    }
                    self.index[jj].refl_waiting.insert(parent, waiting);
                    result?;
                }
            }
        }
        Ok(())
    }

    fn shift(&mut self, item: Item, from: ItemRef, end: usize) -> Result<(), RecognizeError> {
        self.chart.stats.rule_firings.shift += 1;
        let link = Link {
            predecessor: from,
            cause: Cause::Token,
        };
        self.chart.insert(end, item.advanced(), Some(link))
    }

    fn refl_call(
        &mut self,
        parent: GrammarId,
        location: (usize, usize),
        gram_item: ItemRef,
    ) -> Result<(), RecognizeError> {
        let ext = match meta::interpret(&self.input, location) {
            Ok(ext) => ext,
            Err(e) => {
                // The recognizer derived this span from Gram, so the
                // interpreter should always accept it.
                debug_assert!(false, "interpreter rejected a recognized Gram span: {e}");
                self.diagnostics.push(ExtensionDiagnostic {
                    parent,
                    location,
                    message: e.to_string(),
                    violations: Vec::new(),
                });
                return Ok(());
            }
        };
        let before = self.table.len();
        let g2 = match self.table.extend(parent, &ext, location) {
            Ok(id) => id,
            Err(ExtendError { violations }) => {
                let message = ExtendError {
                    violations: violations.clone(),
                }
                .to_string();
                self.diagnostics.push(ExtensionDiagnostic {
                    parent,
                    location,
                    message,
                    violations,
                });
                return Ok(());
            }
        };
        if self.table.len() > before {
            self.chart.stats.grammars_created += 1;
            self.origin_items.push(Some(gram_item));
        }
        let k = location.1;
        let start = self.table.start_name(g2);
        for &r in self.table.rules_for(g2, start).iter() {
            self.chart.stats.rule_firings.refl_call += 1;
            let seed = Item {
                origin: k as u32,
                rule: r,
                dot: 0,
                grammar: g2,
            };
            self.chart.insert(k, seed, None)?;
        }
        Ok(())
    }

    fn finish(self) -> RecognitionResult {
        let n = self.input.len();
        let accept_position = (0..=n)
            .find(|&p| lex::only_ws_after(&self.input, p))
            .unwrap_or(n);
        let furthest = (0..=n).rev().find(|&j| !self.chart.sets[j].is_empty()).unwrap_or(0);
        let mut result = RecognitionResult {
            accepted: false,
            accept_position,
            furthest,
            input: self.input,
            sets: self.chart.sets,
            table: self.table,
            stats: self.chart.stats,
            diagnostics: self.diagnostics,
            origin_items: self.origin_items,
            annotated: self.chart.annotate,
        };
        result.accepted = !result.accepting_items().is_empty();
        result
    }
}

impl Chart {
    fn insert(&mut self, set: usize, item: Item, link: Option<Link>) -> Result<(), RecognizeError> {
        debug_assert!(set >= self.current, "insertion left of the current set");
        debug_assert!(item.origin as usize <= set);
        let annotate = self.annotate;
        let s = &mut self.sets[set];
        let o = item.origin as usize;
        if s.buckets.len() <= o {
            s.buckets.resize_with(o + 1, Vec::new);
        }
        for &k in &s.buckets[o] {
            if s.items[k as usize] == item {
                if let (true, Some(link)) = (annotate, link) {
                    s.links[k as usize].push(link);
                }
                return Ok(());
            }
        }
        let k = s.items.len() as u32;
        s.items.push(item);
        s.links.push(match (annotate, link) {
            (true, Some(link)) => vec![link],
            _ => Vec::new(),
        });
        s.buckets[o].push(k);
        self.stats.items_total += 1;
        if !s.grammars.contains(&item.grammar) {
            s.grammars.push(item.grammar);
            let count = s.grammars.len();
            self.stats.max_m_seen = self.stats.max_m_seen.max(count as u64);
            if let Some(limit) = self.max_m {
                if count > limit {
                    return Err(RecognizeError::MLimitExceeded {
                        position: set,
                        count,
                        limit,
                    });
                }
            }
        }
        Ok(())
    }
}

/// A failure of the invariant that every extended grammar was built from a
/// `Gram` completion at its location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OriginViolation {
    pub grammar: GrammarId,
    pub location: (usize, usize),
}

/// Checks every extended grammar `G' = G ⊕ ⟦x[j..k]⟧` in the table against
/// the item sets: `S_k` must hold a completed `⟨j, Gram → γ·, G⟩`. Looks at
/// the sets directly rather than at the recorded origin items.
pub fn audit_grammar_origins(result: &RecognitionResult) -> Vec<OriginViolation> {
    let table = result.table();
    let mut out = Vec::new();
    for g in table.ids() {
        let Origin::Extended {
            parent,
            location: (j, k),
        } = table.get(g).origin
        else {
            continue;
        };
        let found = k < result.sets().len()
            && result.set(k).with_origin(j).iter().any(|&idx| {
                let it = result.set(k).items()[idx as usize];
                it.grammar == parent
                    && it.is_complete(table)
                    && it.production(table).lhs == crate::grammar::GRAM
            });
        if !found {
            out.push(OriginViolation {
                grammar: g,
                location: (j, k),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::Production;

    fn lit(t: &str) -> Symbol {
        Symbol::literal(t).unwrap()
    }

    fn g(start: &str, prods: Vec<(&str, Vec<Symbol>)>) -> Grammar {
        Grammar::with_meta(
            start,
            prods.into_iter().map(|(l, r)| Production::new(l, r)).collect(),
        )
    }

    #[test]
    fn epsilon_grammar_accepts_empty_and_blank() {
        let gr = g("S", vec![("S", vec![])]);
        assert!(recognize(&gr, "", Limits::default()).unwrap().accepted);
        assert!(recognize(&gr, "  \n", Limits::default()).unwrap().accepted);
        assert!(!recognize(&gr, "a", Limits::default()).unwrap().accepted);
    }

    #[test]
    fn insert_dedups() {
        // S -> A | B, A -> "a", B -> "a": one completed S item per production,
        // but only one ⟨0, S→A·⟩ even though A is reached once.
        let gr = g(
            "S",
            vec![
                ("S", vec![Symbol::nt("A"), Symbol::nt("A")]),
                ("A", vec![lit("a")]),
                ("A", vec![Symbol::nt("B")]),
                ("B", vec![lit("a")]),
            ],
        );
        let r = recognize(&gr, "a a", Limits::default()).unwrap();
        assert!(r.accepted);
        let set = r.set(3);
        let mut seen = std::collections::HashSet::new();
        for it in set.items() {
            assert!(seen.insert(*it), "duplicate {it:?}");
        }
        // ⟨0, S → A A·⟩ reached through both A alternatives of the second A:
        // stored once with two links.
        let acc = r.accepting_items();
        assert_eq!(acc.len(), 1);
        assert_eq!(r.links(acc[0]).len(), 2);
    }

    #[test]
    fn items_differing_in_grammar_are_distinct() {
        let a = Item {
            origin: 0,
            rule: 0,
            dot: 0,
            grammar: GrammarId(0),
        };
        let b = Item {
            grammar: GrammarId(1),
            ..a
        };
        let set = ItemSet {
            items: vec![a, b],
            buckets: vec![vec![0, 1]],
            ..ItemSet::default()
        };
        assert_eq!(set.find(&a), Some(0));
        assert_eq!(set.find(&b), Some(1));
    }

    #[test]
    fn furthest_position_on_prefix() {
        let gr = g(
            "S",
            vec![("S", vec![Symbol::Lex(crate::grammar::LexClass::Identifier), lit("("), lit(")")])],
        );
        let r = recognize(&gr, "plus(", Limits::default()).unwrap();
        assert!(!r.accepted);
        assert_eq!(r.furthest, 5);
    }

    #[test]
    fn invalid_base_is_reported() {
        let gr = g("S", vec![("S", vec![Symbol::nt("Nope")])]);
        assert!(matches!(
            recognize(&gr, "", Limits::default()),
            Err(RecognizeError::InvalidGrammar(_))
        ));
    }

    #[test]
    fn single_processing_and_leftward_links() {
        let gr = g(
            "S",
            vec![
                ("S", vec![Symbol::nt("S"), Symbol::nt("S")]),
                ("S", vec![lit("a")]),
                ("S", vec![]),
            ],
        );
        let r = recognize(&gr, "a a a", Limits::default()).unwrap();
        assert!(r.accepted);
        assert_eq!(r.stats().items_total, r.stats().items_processed);
        for (j, set) in r.sets().iter().enumerate() {
            for k in 0..set.len() {
                for l in set.links(k) {
                    assert!(l.predecessor.set as usize <= j);
                    if let Cause::Reduction(c) = l.cause {
                        assert_eq!(c.set as usize, j);
                    }
                }
            }
        }
    }
}
