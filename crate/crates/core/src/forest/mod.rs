//! Shared packed parse forests built from recognizer links, and parse trees.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::engine::{Cause, ItemRef, RecognitionResult};
use crate::grammar::{GrammarId, Symbol, GRAM};
use crate::meta::lex;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Label {
    /// A nonterminal of `grammar`.
    Symbol { name: String, grammar: GrammarId },
    /// A matched token; `text` excludes leading whitespace.
    Terminal { text: String },
    /// An occurrence of `ℝ` in `grammar`.
    Refl { grammar: GrammarId },
    /// A proper prefix (at least two symbols) of a production.
    Intermediate {
        grammar: GrammarId,
        production: u32,
        dot: u32,
    },
}

/// One way of deriving the parent: production used, split point and the
/// two halves. Nodes for `ℝ` use `production: None`, left = the `Gram`
/// node, right = the start symbol of the extended grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Packed {
    pub production: Option<u32>,
    pub pivot: usize,
    pub left: Option<NodeId>,
    pub right: Option<NodeId>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Node {
    pub id: NodeId,
    pub label: Label,
    pub start: usize,
    pub end: usize,
    pub packed: Vec<Packed>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Sppf {
    pub root: Option<NodeId>,
    pub nodes: Vec<Node>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ForestError {
    #[error("input was not accepted")]
    NotAccepted,
    #[error("recognizer ran without derivation links")]
    NotAnnotated,
    #[error("{0}")]
    Ambiguous(Ambiguity),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ambiguity {
    pub label: String,
    pub span: (usize, usize),
}

impl fmt::Display for Ambiguity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ambiguous {} over [{}, {})", self.label, self.span.0, self.span.1)
    }
}

/// Number of parse trees; `AtLeast(cap)` once the count reaches the cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ParseCount {
    Exactly(u64),
    AtLeast(u64),
    Infinite,
}

impl ParseCount {
    fn capped(n: u128, cap: u64) -> Self {
        if n >= cap as u128 {
            ParseCount::AtLeast(cap)
        } else {
            ParseCount::Exactly(n as u64)
        }
    }

    pub fn is_zero(self) -> bool {
        self == ParseCount::Exactly(0)
    }

    pub fn add(self, other: Self, cap: u64) -> Self {
        use ParseCount::*;
        match (self, other) {
            (Infinite, _) | (_, Infinite) => Infinite,
            (Exactly(a), Exactly(b)) => Self::capped(a as u128 + b as u128, cap),
            _ => AtLeast(cap),
        }
    }

    pub fn mul(self, other: Self, cap: u64) -> Self {
        use ParseCount::*;
        if self.is_zero() || other.is_zero() {
            return Exactly(0);
        }
        match (self, other) {
            (Infinite, _) | (_, Infinite) => Infinite,
            (Exactly(a), Exactly(b)) => Self::capped(a as u128 * b as u128, cap),
            _ => AtLeast(cap),
        }
    }
}

impl fmt::Display for ParseCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseCount::Exactly(n) => write!(f, "{n}"),
            ParseCount::AtLeast(n) => write!(f, ">={n}"),
            ParseCount::Infinite => f.write_str("infinite"),
        }
    }
}

struct Builder<'r> {
    r: &'r RecognitionResult,
    ids: HashMap<(Label, usize, usize), NodeId>,
    nodes: Vec<Node>,
    packed_seen: HashSet<(NodeId, Packed)>,
    seen: HashSet<ItemRef>,
    queue: Vec<ItemRef>,
}

impl Builder<'_> {
    fn node(&mut self, label: Label, start: usize, end: usize) -> NodeId {
        let key = (label, start, end);
        if let Some(&id) = self.ids.get(&key) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            id,
            label: key.0.clone(),
            start,
            end,
            packed: Vec::new(),
        });
        self.ids.insert(key, id);
        id
    }

    fn pack(&mut self, parent: NodeId, p: Packed) {
        if self.packed_seen.insert((parent, p)) {
            self.nodes[parent].packed.push(p);
        }
    }

    fn enqueue(&mut self, r: ItemRef) {
        if self.seen.insert(r) {
            self.queue.push(r);
        }
    }

    fn symbol_node(&mut self, sym: &Symbol, g: GrammarId, start: usize, end: usize) -> NodeId {
        let label = match sym {
            Symbol::Nonterminal(n) => Label::Symbol {
                name: n.clone(),
                grammar: g,
            },
            Symbol::Literal(_) | Symbol::Lex(_) => {
                let input = self.r.input();
                let from = lex::skip_ws(input, start);
                Label::Terminal {
                    text: input[from..end].iter().collect(),
                }
            }
            Symbol::Refl => Label::Refl { grammar: g },
        };
        self.node(label, start, end)
    }

    fn process(&mut self, here: ItemRef) {
        let r = self.r;
        let table = r.table();
        let item = r.item(here);
        let prod = item.production(table);
        let (i, j, d, g) = (item.origin as usize, here.set as usize, item.dot as usize, item.grammar);
        let owner = if d == prod.rhs.len() {
            Some(self.node(
                Label::Symbol {
                    name: prod.lhs.clone(),
                    grammar: g,
                },
                i,
                j,
            ))
        } else if d >= 2 {
            Some(self.node(
                Label::Intermediate {
                    grammar: g,
                    production: item.rule,
                    dot: item.dot,
                },
                i,
                j,
            ))
        } else {
            None
        };
        if d == 0 {
            if let Some(o) = owner {
                self.pack(
                    o,
                    Packed {
                        production: Some(item.rule),
                        pivot: j,
                        left: None,
                        right: None,
                    },
                );
            }
            return;
        }
        for link in r.links(here) {
            let pred = link.predecessor;
            let k = pred.set as usize;
            let right = self.symbol_node(&prod.rhs[d - 1], g, k, j);
            match link.cause {
                Cause::Token => {}
                Cause::Reduction(c) => self.enqueue(c),
                Cause::Reflection { gram, body } => {
                    self.enqueue(gram);
                    self.enqueue(body);
                    let mid = gram.set as usize;
                    let gram_node = self.node(
                        Label::Symbol {
                            name: GRAM.to_owned(),
                            grammar: g,
                        },
                        k,
                        mid,
                    );
                    let b = r.item(body);
                    let body_node = self.node(
                        Label::Symbol {
                            name: b.production(table).lhs.clone(),
                            grammar: b.grammar,
                        },
                        mid,
                        j,
                    );
                    self.pack(
                        right,
                        Packed {
                            production: None,
                            pivot: mid,
                            left: Some(gram_node),
                            right: Some(body_node),
                        },
                    );
                }
            }
            self.enqueue(pred);
            let Some(o) = owner else { continue };
            let left = match d {
                1 => None,
                2 => Some(self.symbol_node(&prod.rhs[0], g, i, k)),
                _ => Some(self.node(
                    Label::Intermediate {
                        grammar: g,
                        production: item.rule,
                        dot: item.dot - 1,
                    },
                    i,
                    k,
                )),
            };
            self.pack(
                o,
                Packed {
                    production: Some(item.rule),
                    pivot: k,
                    left,
                    right: Some(right),
                },
            );
        }
    }
}

/// Builds the forest of all parses of an accepted input. Node ids are
/// assigned in `(start, end, label)` order, so output is deterministic.
pub fn build_sppf(result: &RecognitionResult) -> Result<Sppf, ForestError> {
    if !result.accepted {
        return Err(ForestError::NotAccepted);
    }
    if !result.annotated() {
        return Err(ForestError::NotAnnotated);
    }
    let mut b = Builder {
        r: result,
        ids: HashMap::new(),
        nodes: Vec::new(),
        packed_seen: HashSet::new(),
        seen: HashSet::new(),
        queue: Vec::new(),
    };
    let base = result.table().get(GrammarId::BASE);
    let root = b.node(
        Label::Symbol {
            name: base.start.clone(),
            grammar: GrammarId::BASE,
        },
        0,
        result.accept_position,
    );
    for r in result.accepting_items() {
        b.enqueue(r);
    }
    while let Some(r) = b.queue.pop() {
        b.process(r);
    }

    let mut order: Vec<NodeId> = (0..b.nodes.len()).collect();
    order.sort_by(|&x, &y| {
        let (a, c) = (&b.nodes[x], &b.nodes[y]);
        (a.start, a.end, &a.label).cmp(&(c.start, c.end, &c.label))
    });
    let mut remap = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new;
    }
    let mut old_nodes: Vec<Option<Node>> = b.nodes.into_iter().map(Some).collect();
    let nodes = order
        .iter()
        .enumerate()
        .map(|(new, &old)| {
            let mut n = old_nodes[old].take().expect("node moved twice");
            n.id = new;
            for p in &mut n.packed {
                p.left = p.left.map(|x| remap[x]);
                p.right = p.right.map(|x| remap[x]);
            }
            n.packed.sort();
            n
        })
        .collect();
    Ok(Sppf {
        root: Some(remap[root]),
        nodes,
    })
}

impl Sppf {
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn packed_count(&self) -> usize {
        self.nodes.iter().map(|n| n.packed.len()).sum()
    }

    /// Leftmost, then shortest, node with more than one packed child.
    pub fn first_ambiguity(&self) -> Option<Ambiguity> {
        self.nodes
            .iter()
            .filter(|n| n.packed.len() > 1)
            .min_by_key(|n| (n.start, n.end - n.start, n.id))
            .map(|n| Ambiguity {
                label: self.describe(n),
                span: (n.start, n.end),
            })
    }

    fn describe(&self, n: &Node) -> String {
        match &n.label {
            Label::Symbol { name, .. } => name.clone(),
            Label::Terminal { text } => format!("{text:?}"),
            Label::Refl { .. } => "REFL".to_owned(),
            Label::Intermediate { dot, .. } => format!("prefix of length {dot}"),
        }
    }
}

/// Number of distinct parse trees below the root, up to `cap`. A cycle
/// reachable from the root makes the count infinite.
pub fn count_parses(sppf: &Sppf, cap: u64) -> ParseCount {
    let Some(root) = sppf.root else {
        return ParseCount::Exactly(0);
    };
    let mut memo = vec![None; sppf.nodes.len()];
    let mut active = vec![false; sppf.nodes.len()];
    count_node(sppf, root, cap, &mut memo, &mut active)
}

fn count_node(
    sppf: &Sppf,
    id: NodeId,
    cap: u64,
    memo: &mut [Option<ParseCount>],
    active: &mut [bool],
) -> ParseCount {
    if let Some(c) = memo[id] {
        return c;
    }
    if active[id] {
        return ParseCount::Infinite;
    }
    let node = &sppf.nodes[id];
    if let Label::Terminal { .. } = node.label {
        return ParseCount::Exactly(1);
    }
    active[id] = true;
    let mut total = ParseCount::Exactly(0);
    for p in &node.packed {
        let mut c = ParseCount::Exactly(1);
        for child in [p.left, p.right].into_iter().flatten() {
            c = c.mul(count_node(sppf, child, cap, memo, active), cap);
        }
        total = total.add(c, cap);
    }
    active[id] = false;
    memo[id] = Some(total);
    total
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParseTree {
    Node {
        nonterminal: String,
        grammar: GrammarId,
        production: u32,
        span: (usize, usize),
        children: Vec<ParseTree>,
    },
    /// `span` includes the whitespace before the token.
    Token { text: String, span: (usize, usize) },
    Refl {
        grammar: GrammarId,
        extended: GrammarId,
        span: (usize, usize),
        gram: Box<ParseTree>,
        body: Box<ParseTree>,
    },
}

impl ParseTree {
    pub fn span(&self) -> (usize, usize) {
        match self {
            ParseTree::Node { span, .. }
            | ParseTree::Token { span, .. }
            | ParseTree::Refl { span, .. } => *span,
        }
    }

    /// Token spans, left to right.
    pub fn leaves(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<(usize, usize)>) {
        match self {
            ParseTree::Token { span, .. } => out.push(*span),
            ParseTree::Node { children, .. } => {
                for c in children {
                    c.collect_leaves(out);
                }
            }
            ParseTree::Refl { gram, body, .. } => {
                gram.collect_leaves(out);
                body.collect_leaves(out);
            }
        }
    }

    fn write_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        match self {
            ParseTree::Node {
                nonterminal,
                grammar,
                span,
                children,
                ..
            } => {
                writeln!(f, "{pad}{nonterminal} [{grammar}] {}..{}", span.0, span.1)?;
                for c in children {
                    c.write_indented(f, depth + 1)?;
                }
                Ok(())
            }
            ParseTree::Token { text, span } => {
                writeln!(f, "{pad}{text:?} {}..{}", span.0, span.1)
            }
            ParseTree::Refl {
                grammar,
                extended,
                span,
                gram,
                body,
            } => {
                writeln!(f, "{pad}REFL [{grammar} -> {extended}] {}..{}", span.0, span.1)?;
                gram.write_indented(f, depth + 1)?;
                body.write_indented(f, depth + 1)
            }
        }
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_indented(f, 0)
    }
}

/// The unique parse tree, or the leftmost-innermost ambiguity.
pub fn extract_unambiguous(result: &RecognitionResult) -> Result<ParseTree, ForestError> {
    let sppf = build_sppf(result)?;
    if count_parses(&sppf, 2) != ParseCount::Exactly(1) {
        let amb = sppf
            .first_ambiguity()
            .expect("more than one parse without a packed choice");
        return Err(ForestError::Ambiguous(amb));
    }
    Ok(tree(&sppf, sppf.root.expect("accepted forest has a root")))
}

fn tree(sppf: &Sppf, id: NodeId) -> ParseTree {
    let n = sppf.node(id);
    let span = (n.start, n.end);
    match &n.label {
        Label::Terminal { text } => ParseTree::Token {
            text: text.clone(),
            span,
        },
        Label::Symbol { name, grammar } => {
            let p = n.packed[0];
            let mut children = Vec::new();
            flatten(sppf, p, &mut children);
            ParseTree::Node {
                nonterminal: name.clone(),
                grammar: *grammar,
                production: p.production.expect("symbol packed without production"),
                span,
                children,
            }
        }
        Label::Refl { grammar } => {
            let p = n.packed[0];
            let body = tree(sppf, p.right.expect("reflection without body"));
            let extended = match &body {
                ParseTree::Node { grammar, .. } => *grammar,
                _ => unreachable!("reflection body is a nonterminal"),
            };
            ParseTree::Refl {
                grammar: *grammar,
                extended,
                span,
                gram: Box::new(tree(sppf, p.left.expect("reflection without Gram"))),
                body: Box::new(body),
            }
        }
        Label::Intermediate { .. } => unreachable!("intermediate nodes are flattened"),
    }
}

fn flatten(sppf: &Sppf, p: Packed, out: &mut Vec<ParseTree>) {
    if let Some(l) = p.left {
        match sppf.node(l).label {
            Label::Intermediate { .. } => flatten(sppf, sppf.node(l).packed[0], out),
            _ => out.push(tree(sppf, l)),
        }
    }
    if let Some(r) = p.right {
        out.push(tree(sppf, r));
    }
}
