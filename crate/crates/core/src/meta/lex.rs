//! Scannerless token matching shared by the recognizer, the meta-syntax
//! interpreter and the oracle.
//!
//! All positions are character indices. Whitespace (space, tab, newline,
//! carriage return) is skipped before every token; lexical classes use
//! maximal munch, literals match their text exactly.

use crate::grammar::LexClass;

pub fn is_ws(c: char) -> bool {
    matches!(c, ' ' | '\t' | '\n' | '\r')
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// First index at or after `pos` that is not whitespace.
pub fn skip_ws(input: &[char], pos: usize) -> usize {
    let mut p = pos.min(input.len());
    while p < input.len() && is_ws(input[p]) {
        p += 1;
    }
    p
}

/// True when nothing but whitespace follows `pos`.
pub fn only_ws_after(input: &[char], pos: usize) -> bool {
    skip_ws(input, pos) == input.len()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexMatch {
    pub class: LexClass,
    pub start: usize,
    pub end: usize,
    /// `input[start..end]`.
    pub text: String,
    /// The captured value: string contents without quotes, otherwise the
    /// whole text.
    pub value: String,
}

/// Maximal-munch match of `class` starting exactly at `pos`.
pub fn lex_class(input: &[char], pos: usize, class: LexClass) -> Option<LexMatch> {
    let end = lex_class_end(input, pos, class)?;
    let text: String = input[pos..end].iter().collect();
    let value = match class {
        LexClass::QuotedString => input[pos + 1..end - 1].iter().collect(),
        _ => text.clone(),
    };
    Some(LexMatch {
        class,
        start: pos,
        end,
        text,
        value,
    })
}

/// End index of the match [`lex_class`] would return, without allocating.
pub fn lex_class_end(input: &[char], pos: usize, class: LexClass) -> Option<usize> {
    let first = *input.get(pos)?;
    match class {
        LexClass::Identifier | LexClass::Nonterm => {
            if !is_ident_start(first) {
                return None;
            }
            let mut p = pos + 1;
            while p < input.len() && is_ident_char(input[p]) {
                p += 1;
            }
            Some(p)
        }
        LexClass::NaturalNumber => {
            let mut p = pos;
            while p < input.len() && input[p].is_ascii_digit() {
                p += 1;
            }
            (p > pos).then_some(p)
        }
        LexClass::QuotedString => {
            if first != '"' {
                return None;
            }
            // Backslash is an ordinary character here, so `"\"` is a
            // one-character string.
            let close = input[pos + 1..].iter().position(|&c| c == '"')?;
            Some(pos + 1 + close + 1)
        }
    }
}

/// End index if `lit` occurs at `pos`.
pub fn match_literal(input: &[char], pos: usize, lit: &[char]) -> Option<usize> {
    let end = pos.checked_add(lit.len())?;
    (end <= input.len() && &input[pos..end] == lit).then_some(end)
}

/// 1-based line and column of a character index.
pub fn line_col(input: &[char], pos: usize) -> (usize, usize) {
    let mut line = 1;
    let mut col = 1;
    for &c in &input[..pos.min(input.len())] {
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}
