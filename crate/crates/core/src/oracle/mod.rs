//! Brute-force reference semantics.
//!
//! [`Oracle`] decides `α ⇒*_G x[i..j)` by direct search over split points,
//! one case per derivation rule (empty, terminal, nonterminal, reflection).
//! It shares nothing with the recognizer except the grammar table (for
//! `⊕`), the meta-syntax interpreter (for `⟦−⟧`) and the token matchers.
//! It is exponential in the worst case and only meant for small inputs.
//!
//! Cyclic queries (a nonterminal needed to derive its own span, through unit
//! or nullable chains) are resolved by iterating to the least fixed point.

pub mod enumerate;

use std::collections::{HashMap, HashSet};

use crate::forest::ParseCount;
use crate::grammar::{Grammar, GrammarId, GrammarTable, LexClass, Symbol, GRAM};
use crate::meta::{interpret, lex};

pub use enumerate::{enumerate, enumerate_with, EnumerateError, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("oracle ran out of fuel")]
pub struct FuelExhausted;

/// Does `rhs` derive `input[span.0..span.1]` under `grammar`?
#[derive(Debug, Clone, Copy)]
pub struct DerivationQuery<'a> {
    pub grammar: &'a Grammar,
    pub rhs: &'a [Symbol],
    pub span: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum OSym {
    Lit(Vec<char>),
    Lex(LexClass),
    Nt(u32),
    Refl,
}

#[derive(Debug)]
struct Compiled {
    prods: Vec<Vec<OSym>>,
    by_lhs: HashMap<u32, Vec<u32>>,
    start: u32,
}

/// A right-hand side being matched: a production of a grammar, or an ad-hoc
/// query sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Seq {
    Prod(u32, u32),
    Query(u32, u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    /// First `len` symbols of `seq` derive `[i, j)`.
    Seq { seq: Seq, len: u32, i: u32, j: u32 },
    /// Nonterminal `name` of grammar `g` derives `[i, j)`.
    Nt { g: u32, name: u32, i: u32, j: u32 },
    /// `ℝ` in grammar `g` derives `[i, j)`.
    Refl { g: u32, i: u32, j: u32 },
}

pub struct Oracle {
    input: Vec<char>,
    table: Option<GrammarTable>,
    compiled: Vec<Compiled>,
    roots: Vec<(Grammar, GrammarId)>,
    names: HashMap<String, u32>,
    queries: Vec<Vec<OSym>>,
    /// Extensions already attempted: `(parent, location)` → new grammar.
    extended: HashMap<(u32, (usize, usize)), Option<u32>>,

    memo: HashMap<Key, bool>,
    known_true: HashSet<Key>,
    round: HashMap<Key, bool>,
    in_progress: HashSet<Key>,
    cycle: bool,
    new_true: bool,
    fuel_limit: u64,
    fuel: u64,

    counts: HashMap<Key, ParseCount>,
    counting: HashSet<Key>,
    count_cap: u128,
}

impl Oracle {
    pub fn new(input: &str) -> Self {
        Oracle {
            input: input.chars().collect(),
            table: None,
            compiled: Vec::new(),
            roots: Vec::new(),
            names: HashMap::new(),
            queries: Vec::new(),
            extended: HashMap::new(),
            memo: HashMap::new(),
            known_true: HashSet::new(),
            round: HashMap::new(),
            in_progress: HashSet::new(),
            cycle: false,
            new_true: false,
            fuel_limit: 50_000_000,
            fuel: 0,
            counts: HashMap::new(),
            counting: HashSet::new(),
            count_cap: u128::MAX,
        }
    }

    /// Maximum number of fresh sub-queries one call may evaluate.
    pub fn with_fuel(mut self, fuel: u64) -> Self {
        self.fuel_limit = fuel;
        self
    }

    pub fn input(&self) -> &[char] {
        &self.input
    }

    fn name(&mut self, n: &str) -> u32 {
        let next = self.names.len() as u32;
        *self.names.entry(n.to_owned()).or_insert(next)
    }

    fn compile_seq(&mut self, rhs: &[Symbol]) -> Vec<OSym> {
        rhs.iter()
            .map(|s| match s {
                Symbol::Literal(t) => OSym::Lit(t.chars().collect()),
                Symbol::Lex(c) => OSym::Lex(*c),
                Symbol::Nonterminal(n) => OSym::Nt(self.name(n)),
                Symbol::Refl => OSym::Refl,
            })
            .collect()
    }

    fn compile(&mut self, g: GrammarId) {
        let grammar = self.table.as_ref().expect("table").get(g).clone();
        let mut prods = Vec::new();
        let mut by_lhs: HashMap<u32, Vec<u32>> = HashMap::new();
        for (k, p) in grammar.productions.iter().enumerate() {
            let lhs = self.name(&p.lhs);
            by_lhs.entry(lhs).or_default().push(k as u32);
            prods.push(self.compile_seq(&p.rhs));
        }
        let start = self.name(&grammar.start);
        debug_assert_eq!(self.compiled.len(), g.index());
        self.compiled.push(Compiled {
            prods,
            by_lhs,
            start,
        });
    }

    /// Registers a grammar as a root of the oracle's own table.
    fn register(&mut self, grammar: &Grammar) -> u32 {
        if let Some((_, id)) = self.roots.iter().find(|(g, _)| g == grammar) {
            return id.0;
        }
        let id = match &mut self.table {
            None => {
                self.table = Some(GrammarTable::new(grammar.clone()));
                GrammarId::BASE
            }
            Some(t) => t.insert_root(grammar.clone()),
        };
        self.compile(id);
        self.roots.push((grammar.clone(), id));
        id.0
    }

    /// `G ⊕ ⟦x[j..k]⟧`, or `None` when the extension is rejected.
    fn extend(&mut self, g: u32, loc: (usize, usize)) -> Option<u32> {
        if let Some(&r) = self.extended.get(&(g, loc)) {
            return r;
        }
        let result = interpret(&self.input, loc).ok().and_then(|ext| {
            let table = self.table.as_mut().expect("table");
            let before = table.len();
            let id = table.extend(GrammarId(g), &ext, loc).ok()?;
            if table.len() > before {
                self.compile(id);
            }
            Some(id.0)
        });
        self.extended.insert((g, loc), result);
        result
    }

    fn seq_syms(&self, seq: Seq) -> &[OSym] {
        match seq {
            Seq::Prod(g, p) => &self.compiled[g as usize].prods[p as usize],
            Seq::Query(q, _) => &self.queries[q as usize],
        }
    }

    fn seq_grammar(seq: Seq) -> u32 {
        match seq {
            Seq::Prod(g, _) | Seq::Query(_, g) => g,
        }
    }

    pub fn derives(&mut self, query: DerivationQuery<'_>) -> Result<bool, FuelExhausted> {
        let (i, j) = query.span;
        if i > j || j > self.input.len() {
            return Ok(false);
        }
        let g = self.register(query.grammar);
        let syms = self.compile_seq(query.rhs);
        let q = match self.queries.iter().position(|s| *s == syms) {
            Some(q) => q,
            None => {
                self.queries.push(syms);
                self.queries.len() - 1
            }
        } as u32;
        let key = Key::Seq {
            seq: Seq::Query(q, g),
            len: query.rhs.len() as u32,
            i: i as u32,
            j: j as u32,
        };
        self.solve(key)
    }

    /// Membership: the start symbol derives the input up to trailing
    /// whitespace.
    pub fn accepts(&mut self, grammar: &Grammar) -> Result<bool, FuelExhausted> {
        let g = self.register(grammar);
        let start = self.compiled[g as usize].start;
        for p in 0..=self.input.len() {
            if !lex::only_ws_after(&self.input, p) {
                continue;
            }
            let key = Key::Nt {
                g,
                name: start,
                i: 0,
                j: p as u32,
            };
            if self.solve(key)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn solve(&mut self, key: Key) -> Result<bool, FuelExhausted> {
        self.fuel = self.fuel_limit;
        loop {
            self.round.clear();
            self.in_progress.clear();
            self.cycle = false;
            self.new_true = false;
            let r = self.eval(key);
            let Ok(v) = r else {
                self.round.clear();
                return r;
            };
            if !self.cycle || !self.new_true {
                let round = std::mem::take(&mut self.round);
                self.memo.extend(round);
                return Ok(v);
            }
        }
    }

    fn eval(&mut self, key: Key) -> Result<bool, FuelExhausted> {
        if self.known_true.contains(&key) {
            return Ok(true);
        }
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        if let Some(&v) = self.round.get(&key) {
            return Ok(v);
        }
        if self.in_progress.contains(&key) {
            self.cycle = true;
            return Ok(false);
        }
        if self.fuel == 0 {
            return Err(FuelExhausted);
        }
        self.fuel -= 1;
        self.in_progress.insert(key);
        let v = self.compute(key);
        self.in_progress.remove(&key);
        let v = v?;
        if v && self.known_true.insert(key) {
            self.new_true = true;
        }
        self.round.insert(key, v);
        Ok(v)
    }

    fn compute(&mut self, key: Key) -> Result<bool, FuelExhausted> {
        match key {
            Key::Nt { g, name, i, j } => {
                let prods = self.compiled[g as usize]
                    .by_lhs
                    .get(&name)
                    .cloned()
                    .unwrap_or_default();
                for p in prods {
                    let len = self.compiled[g as usize].prods[p as usize].len() as u32;
                    let sub = Key::Seq {
                        seq: Seq::Prod(g, p),
                        len,
                        i,
                        j,
                    };
                    if self.eval(sub)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Key::Seq { seq, len, i, j } => {
                if len == 0 {
                    return Ok(i == j);
                }
                let g = Self::seq_grammar(seq);
                let last = self.seq_syms(seq)[len as usize - 1].clone();
                let prefix = |m: u32| Key::Seq {
                    seq,
                    len: len - 1,
                    i,
                    j: m,
                };
                for m in i..=j {
                    let ok = match &last {
                        OSym::Lit(_) | OSym::Lex(_) => {
                            self.terminal_ends(&last, m as usize) == Some(j as usize)
                                && self.eval(prefix(m))?
                        }
                        OSym::Nt(b) => {
                            self.eval(prefix(m))?
                                && self.eval(Key::Nt {
                                    g,
                                    name: *b,
                                    i: m,
                                    j,
                                })?
                        }
                        OSym::Refl => self.eval(prefix(m))? && self.eval(Key::Refl { g, i: m, j })?,
                    };
                    if ok {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Key::Refl { g, i, j } => {
                let gram = self.name(GRAM);
                for k in i + 1..=j {
                    let is_gram = self.eval(Key::Nt {
                        g,
                        name: gram,
                        i,
                        j: k,
                    })?;
                    if !is_gram {
                        continue;
                    }
                    let Some(g2) = self.extend(g, (i as usize, k as usize)) else {
                        continue;
                    };
                    let start = self.compiled[g2 as usize].start;
                    if self.eval(Key::Nt {
                        g: g2,
                        name: start,
                        i: k,
                        j,
                    })? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// Where a terminal that starts after the whitespace following `m` ends.
    fn terminal_ends(&self, sym: &OSym, m: usize) -> Option<usize> {
        let p = lex::skip_ws(&self.input, m);
        match sym {
            OSym::Lit(t) => lex::match_literal(&self.input, p, t),
            OSym::Lex(c) => lex::lex_class_end(&self.input, p, *c),
            _ => None,
        }
    }

    /// Number of distinct derivation trees of the whole input, capped.
    pub fn count_derivations(
        &mut self,
        grammar: &Grammar,
        cap: u64,
    ) -> Result<ParseCount, FuelExhausted> {
        self.count_cap = cap as u128;
        self.counts.clear();
        let g = self.register(grammar);
        let start = self.compiled[g as usize].start;
        let mut total = ParseCount::Exactly(0);
        for p in 0..=self.input.len() {
            if !lex::only_ws_after(&self.input, p) {
                continue;
            }
            self.fuel = self.fuel_limit;
            let c = self.count(Key::Nt {
                g,
                name: start,
                i: 0,
                j: p as u32,
            })?;
            total = total.add(c, cap);
        }
        Ok(total)
    }

    fn count(&mut self, key: Key) -> Result<ParseCount, FuelExhausted> {
        if let Some(&c) = self.counts.get(&key) {
            return Ok(c);
        }
        if self.counting.contains(&key) {
            let saved = self.fuel;
            let derives = self.solve(key)?;
            self.fuel = saved;
            return Ok(if derives {
                ParseCount::Infinite
            } else {
                ParseCount::Exactly(0)
            });
        }
        if self.fuel == 0 {
            return Err(FuelExhausted);
        }
        self.fuel -= 1;
        self.counting.insert(key);
        let c = self.count_compute(key);
        self.counting.remove(&key);
        let c = c?;
        self.counts.insert(key, c);
        Ok(c)
    }

    fn count_compute(&mut self, key: Key) -> Result<ParseCount, FuelExhausted> {
        let cap = self.count_cap as u64;
        let zero = ParseCount::Exactly(0);
        match key {
            Key::Nt { g, name, i, j } => {
                let prods = self.compiled[g as usize]
                    .by_lhs
                    .get(&name)
                    .cloned()
                    .unwrap_or_default();
                let mut total = zero;
                for p in prods {
                    let len = self.compiled[g as usize].prods[p as usize].len() as u32;
                    let c = self.count(Key::Seq {
                        seq: Seq::Prod(g, p),
                        len,
                        i,
                        j,
                    })?;
                    total = total.add(c, cap);
                }
                Ok(total)
            }
            Key::Seq { seq, len, i, j } => {
                if len == 0 {
                    return Ok(ParseCount::Exactly((i == j) as u64));
                }
                let g = Self::seq_grammar(seq);
                let last = self.seq_syms(seq)[len as usize - 1].clone();
                let mut total = zero;
                for m in i..=j {
                    let prefix = Key::Seq {
                        seq,
                        len: len - 1,
                        i,
                        j: m,
                    };
                    let right = match &last {
                        OSym::Lit(_) | OSym::Lex(_) => {
                            if self.terminal_ends(&last, m as usize) != Some(j as usize) {
                                continue;
                            }
                            ParseCount::Exactly(1)
                        }
                        OSym::Nt(b) => {
                            if !self.solve_keep_fuel(prefix)? {
                                continue;
                            }
                            self.count(Key::Nt {
                                g,
                                name: *b,
                                i: m,
                                j,
                            })?
                        }
                        OSym::Refl => {
                            if !self.solve_keep_fuel(prefix)? {
                                continue;
                            }
                            self.count(Key::Refl { g, i: m, j })?
                        }
                    };
                    if right.is_zero() {
                        continue;
                    }
                    let left = self.count(prefix)?;
                    total = total.add(left.mul(right, cap), cap);
                }
                Ok(total)
            }
            Key::Refl { g, i, j } => {
                let gram = self.name(GRAM);
                let mut total = zero;
                for k in i + 1..=j {
                    let gram_key = Key::Nt {
                        g,
                        name: gram,
                        i,
                        j: k,
                    };
                    if !self.solve_keep_fuel(gram_key)? {
                        continue;
                    }
                    let Some(g2) = self.extend(g, (i as usize, k as usize)) else {
                        continue;
                    };
                    let start = self.compiled[g2 as usize].start;
                    let body = self.count(Key::Nt {
                        g: g2,
                        name: start,
                        i: k,
                        j,
                    })?;
                    if body.is_zero() {
                        continue;
                    }
                    let grams = self.count(gram_key)?;
                    total = total.add(grams.mul(body, cap), cap);
                }
                Ok(total)
            }
        }
    }

    fn solve_keep_fuel(&mut self, key: Key) -> Result<bool, FuelExhausted> {
        let saved = self.fuel;
        let r = self.solve(key);
        self.fuel = saved;
        r
    }
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
    fn empty_rhs_only_derives_empty_span() {
        let gr = g("S", vec![("S", vec![lit("a")])]);
        let mut o = Oracle::new("a");
        let q = |span| DerivationQuery {
            grammar: &gr,
            rhs: &[],
            span,
        };
        assert_eq!(o.derives(q((0, 1))), Ok(false));
        assert_eq!(o.derives(q((1, 1))), Ok(true));
    }

    #[test]
    fn unit_and_nullable_cycles_resolve() {
        // S -> S | A ; A -> B "a" ; B -> S | ε
        let gr = g(
            "S",
            vec![
                ("S", vec![Symbol::nt("S")]),
                ("S", vec![Symbol::nt("A")]),
                ("A", vec![Symbol::nt("B"), lit("a")]),
                ("B", vec![Symbol::nt("S")]),
                ("B", vec![]),
            ],
        );
        for (s, want) in [("a", true), ("aa", true), ("aaa", true), ("", false), ("b", false)] {
            assert_eq!(Oracle::new(s).accepts(&gr), Ok(want), "{s}");
        }
    }

    #[test]
    fn left_recursion_and_whitespace() {
        let gr = g(
            "E",
            vec![("E", vec![Symbol::nt("E"), lit("+"), lit("n")]), ("E", vec![lit("n")])],
        );
        assert_eq!(Oracle::new(" n + n+n ").accepts(&gr), Ok(true));
        assert_eq!(Oracle::new("n +").accepts(&gr), Ok(false));
    }

    #[test]
    fn reflection_rule() {
        let gr = g("S", vec![("S", vec![lit("{"), Symbol::Refl, lit("}")])]);
        let ok = "{ gram <T> <T> ::= \"t\" <T> ; <T> ::= ; end_gram t t }";
        assert_eq!(Oracle::new(ok).accepts(&gr), Ok(true));
        assert_eq!(Oracle::new("{ gram <T> end_gram }").accepts(&gr), Ok(false));
        // T has no productions after an empty extension
        let bad = "{ gram <T> <Prods> ::= ; end_gram }";
        assert_eq!(Oracle::new(bad).accepts(&gr), Ok(false));
    }

    #[test]
    fn fuel_is_reported() {
        let gr = g("S", vec![("S", vec![Symbol::nt("S"), lit("a")]), ("S", vec![lit("a")])]);
        let mut o = Oracle::new("a a a a a a").with_fuel(3);
        assert_eq!(o.accepts(&gr), Err(FuelExhausted));
        let mut o = Oracle::new("a a a a a a");
        assert_eq!(o.accepts(&gr), Ok(true));
    }

    #[test]
    fn counts() {
        let ss = g(
            "S",
            vec![("S", vec![Symbol::nt("S"), Symbol::nt("S")]), ("S", vec![lit("a")])],
        );
        let catalan = [1, 1, 2, 5, 14, 42];
        for (n, want) in catalan.iter().enumerate() {
            let s = vec!["a"; n + 1].join("");
            assert_eq!(
                Oracle::new(&s).count_derivations(&ss, 1_000).unwrap(),
                ParseCount::Exactly(*want),
                "n={}",
                n + 1
            );
        }
        let unit = g("S", vec![("S", vec![Symbol::nt("S")]), ("S", vec![lit("a")])]);
        assert_eq!(
            Oracle::new("a").count_derivations(&unit, 10).unwrap(),
            ParseCount::Infinite
        );
        assert_eq!(
            Oracle::new("b").count_derivations(&unit, 10).unwrap(),
            ParseCount::Exactly(0)
        );
        assert_eq!(
            Oracle::new("aaaaaa").count_derivations(&ss, 10).unwrap(),
            ParseCount::AtLeast(10)
        );
    }
}
