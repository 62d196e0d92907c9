//! Bounded enumeration of a grammar's language.
//!
//! Works on token strings: literals are their own tokens and each lexical
//! class is represented by a fixed vocabulary. The result joins tokens with
//! single spaces, which the recognizer reads back token for token.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use crate::grammar::{compose, Grammar, LexClass, Symbol, GRAM};
use crate::meta::{interpret, meta_productions};

/// Sample lexemes for each lexical class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    pub identifiers: Vec<String>,
    pub numbers: Vec<String>,
    /// Contents of quoted strings, without the quotes.
    pub quoted: Vec<String>,
    /// Spellings for `Nonterm`.
    pub names: Vec<String>,
}

impl Vocabulary {
    /// `x`, `1`, the grammar's own literals and nonterminal names.
    pub fn for_grammar(grammar: &Grammar) -> Self {
        let meta = meta_productions();
        let mut quoted = BTreeSet::new();
        let mut names = BTreeSet::new();
        names.insert(grammar.start.clone());
        for p in grammar.productions.iter().filter(|p| !meta.contains(p)) {
            names.insert(p.lhs.clone());
            for s in &p.rhs {
                if let Symbol::Literal(t) = s {
                    if !t.contains('"') {
                        quoted.insert(t.clone());
                    }
                }
            }
        }
        Vocabulary {
            identifiers: vec!["x".into()],
            numbers: vec!["1".into()],
            quoted: quoted.into_iter().collect(),
            names: names.into_iter().collect(),
        }
    }

    fn tokens(&self, class: LexClass) -> Vec<Tok> {
        let words: Vec<String> = match class {
            LexClass::Identifier => self.identifiers.clone(),
            LexClass::NaturalNumber => self.numbers.clone(),
            LexClass::QuotedString => self.quoted.iter().map(|q| format!("\"{q}\"")).collect(),
            LexClass::Nonterm => self.names.clone(),
        };
        words.into_iter().map(Rc::from).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumerateError {
    #[error("more than {0} strings")]
    CapExceeded(usize),
}

type Tok = Rc<str>;
type Str = Vec<Tok>;
type Lang = BTreeSet<Str>;

/// All members of `L(grammar)` with at most `max_len` tokens.
pub fn enumerate(grammar: &Grammar, max_len: usize) -> Result<BTreeSet<String>, EnumerateError> {
    enumerate_with(grammar, max_len, &Vocabulary::for_grammar(grammar), 100_000)
}

/// As [`enumerate`], with an explicit vocabulary and a bound on the number
/// of strings held per nonterminal.
pub fn enumerate_with(
    grammar: &Grammar,
    max_len: usize,
    vocab: &Vocabulary,
    cap: usize,
) -> Result<BTreeSet<String>, EnumerateError> {
    let mut e = Enumerator { vocab, cap };
    let lang = e.start_language(grammar, max_len)?;
    Ok(lang.into_iter().map(|s| s.join(" ")).collect())
}

struct Enumerator<'v> {
    vocab: &'v Vocabulary,
    cap: usize,
}

impl Enumerator<'_> {
    fn start_language(&mut self, g: &Grammar, budget: usize) -> Result<Lang, EnumerateError> {
        let mut langs = self.languages(g, budget)?;
        Ok(langs.remove(&g.start).unwrap_or_default())
    }

    /// Nonterminals reachable from the start symbol; `ℝ` reaches `Gram`.
    fn reachable(g: &Grammar) -> HashSet<String> {
        let mut seen = HashSet::from([g.start.clone()]);
        let mut todo = vec![g.start.clone()];
        while let Some(a) = todo.pop() {
            for p in g.productions_for(&a) {
                for s in &p.rhs {
                    let next = match s {
                        Symbol::Nonterminal(b) => b.clone(),
                        Symbol::Refl => GRAM.to_owned(),
                        _ => continue,
                    };
                    if seen.insert(next.clone()) {
                        todo.push(next);
                    }
                }
            }
        }
        seen
    }

    /// Shortest token string each nonterminal derives (`ℝ` counts as its
    /// `Gram` part alone).
    fn min_lengths(g: &Grammar) -> HashMap<String, usize> {
        let mut min: HashMap<String, usize> = HashMap::new();
        loop {
            let mut changed = false;
            for p in &g.productions {
                let Some(n) = seq_min(&p.rhs, &min) else { continue };
                if min.get(&p.lhs).is_none_or(|&m| n < m) {
                    min.insert(p.lhs.clone(), n);
                    changed = true;
                }
            }
            if !changed {
                return min;
            }
        }
    }

    /// Fewest tokens that must surround each nonterminal in a sentence.
    fn contexts(g: &Grammar, min: &HashMap<String, usize>) -> HashMap<String, usize> {
        let mut ctx: HashMap<String, usize> = HashMap::from([(g.start.clone(), 0)]);
        loop {
            let mut changed = false;
            for p in &g.productions {
                let Some(&outer) = ctx.get(&p.lhs) else { continue };
                for (k, s) in p.rhs.iter().enumerate() {
                    let name = match s {
                        Symbol::Nonterminal(b) => b.as_str(),
                        Symbol::Refl => GRAM,
                        _ => continue,
                    };
                    let (Some(before), Some(after)) = (seq_min(&p.rhs[..k], min), seq_min(&p.rhs[k + 1..], min))
                    else {
                        continue;
                    };
                    let c = outer + before + after;
                    if ctx.get(name).is_none_or(|&m| c < m) {
                        ctx.insert(name.to_owned(), c);
                        changed = true;
                    }
                }
            }
            if !changed {
                return ctx;
            }
        }
    }

    fn languages(&mut self, g: &Grammar, budget: usize) -> Result<HashMap<String, Lang>, EnumerateError> {
        let live = Self::reachable(g);
        let min = Self::min_lengths(g);
        let ctx = Self::contexts(g, &min);
        let prods: Vec<_> = g
            .productions
            .iter()
            .filter(|p| live.contains(&p.lhs) && ctx.get(&p.lhs).is_some_and(|&c| c <= budget))
            .collect();
        let mut langs: HashMap<String, Lang> = HashMap::new();
        let mut refl_cache: HashMap<Str, Lang> = HashMap::new();
        loop {
            let mut changed = false;
            for p in &prods {
                let room = budget - ctx[&p.lhs];
                let mut acc: Lang = BTreeSet::from([Vec::new()]);
                for (k, s) in p.rhs.iter().enumerate() {
                    let Some(rest) = seq_min(&p.rhs[k + 1..], &min) else {
                        acc.clear();
                        break;
                    };
                    if rest > room {
                        acc.clear();
                        break;
                    }
                    let options: Lang = match s {
                        Symbol::Literal(t) => BTreeSet::from([vec![Rc::from(t.as_str())]]),
                        Symbol::Lex(c) => self.vocab.tokens(*c).into_iter().map(|t| vec![t]).collect(),
                        Symbol::Nonterminal(n) => langs.get(n).cloned().unwrap_or_default(),
                        Symbol::Refl => {
                            let grams = langs.get(GRAM).cloned().unwrap_or_default();
                            self.reflections(g, &grams, budget, &mut refl_cache)?
                        }
                    };
                    acc = concat(&acc, &options, room - rest);
                    if acc.is_empty() {
                        break;
                    }
                }
                let target = langs.entry(p.lhs.clone()).or_default();
                for s in acc {
                    changed |= target.insert(s);
                }
                if target.len() > self.cap {
                    return Err(EnumerateError::CapExceeded(self.cap));
                }
            }
            if !changed {
                return Ok(langs);
            }
        }
    }

    /// `w · s` for every grammar string `w` and every `s` in the language of
    /// `g ⊕ ⟦w⟧`.
    fn reflections(
        &mut self,
        g: &Grammar,
        grams: &Lang,
        budget: usize,
        cache: &mut HashMap<Str, Lang>,
    ) -> Result<Lang, EnumerateError> {
        let mut out = Lang::new();
        for w in grams {
            if !cache.contains_key(w) {
                let text: Vec<char> = w.join(" ").chars().collect();
                let body = match interpret(&text, (0, text.len()))
                    .ok()
                    .and_then(|ext| compose(g, &ext).ok())
                {
                    Some(g2) => self.start_language(&g2, budget - w.len())?,
                    None => Lang::new(),
                };
                cache.insert(w.clone(), body);
            }
            for s in &cache[w] {
                let mut full = w.clone();
                full.extend(s.iter().cloned());
                out.insert(full);
            }
        }
        Ok(out)
    }
}

fn seq_min(rhs: &[Symbol], min: &HashMap<String, usize>) -> Option<usize> {
    rhs.iter().try_fold(0, |n, s| {
        Some(
            n + match s {
                Symbol::Literal(_) | Symbol::Lex(_) => 1,
                Symbol::Nonterminal(b) => *min.get(b)?,
                Symbol::Refl => *min.get(GRAM)?,
            },
        )
    })
}

fn concat(left: &Lang, right: &Lang, budget: usize) -> Lang {
    let mut out = Lang::new();
    for a in left {
        for b in right {
            if a.len() + b.len() <= budget {
                let mut s = a.clone();
                s.extend(b.iter().cloned());
                out.insert(s);
            }
        }
    }
    out
}
