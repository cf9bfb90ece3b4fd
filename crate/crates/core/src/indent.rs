//! Indentation handling: INDENT/DEDENT insertion for left-context lexing
//! and a regular-language abstraction of a right context's indentation.
//!
//! A right context seen in isolation does not determine its indentation
//! symbols: the level before its first newline is unknown, and a dedent may
//! pop levels that only exist in the left context. The abstraction therefore
//! emits `(INDENT | DEDENT*)` after the first newline, exact INDENTs for
//! increases, bounded `DEDENT{min,max}` runs for decreases, and records the
//! levels a matching left context must hold on its indentation stack.

use crate::grammar::SymId;
use crate::nfa::Pattern;
use std::collections::BTreeSet;
use thiserror::Error;

/// One symbol of a lexed stream, with newlines carrying the indentation
/// width of the following line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndSym {
    Plain(SymId),
    Newline { sym: SymId, width: u32 },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IndentError {
    #[error("symbol {0}: cannot dedent to level {1}")]
    BadDedent(usize, u32),
}

/// Indentation bookkeeping of a left context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndentState {
    /// None while no indentation-significant newline has been seen.
    pub current: Option<u32>,
    /// Enclosing levels, strictly increasing, all below `current`.
    pub stack: Vec<u32>,
}

impl IndentState {
    pub fn new() -> IndentState {
        IndentState { current: Some(0), stack: Vec::new() }
    }

    /// All levels a dedent could return to.
    pub fn levels(&self) -> BTreeSet<u32> {
        let mut s: BTreeSet<u32> = self.stack.iter().copied().collect();
        if let Some(c) = self.current {
            s.insert(c);
        }
        s
    }

    /// Process one newline's indentation width, returning the emitted
    /// symbol count: +1 for an indent, -k for k dedents.
    pub fn newline(&mut self, pos: usize, width: u32) -> Result<i32, IndentError> {
        let current = self.current.get_or_insert(0);
        if width > *current {
            self.stack.push(*current);
            *current = width;
            return Ok(1);
        }
        let mut dedents = 0;
        while width < *current {
            dedents += 1;
            *current = self.stack.pop().unwrap_or(0);
            if *current < width {
                return Err(IndentError::BadDedent(pos, width));
            }
        }
        Ok(-dedents)
    }
}

impl Default for IndentState {
    fn default() -> Self {
        IndentState::new()
    }
}

/// The classic push/pop insertion of indentation symbols into a lexed
/// stream.
pub fn ind_lex(
    input: &[IndSym],
    indent: SymId,
    dedent: SymId,
) -> Result<Vec<SymId>, IndentError> {
    let mut state = IndentState::new();
    let mut out = Vec::new();
    for (pos, &s) in input.iter().enumerate() {
        match s {
            IndSym::Plain(sym) => out.push(sym),
            IndSym::Newline { sym, width } => {
                out.push(sym);
                match state.newline(pos, width)? {
                    1 => out.push(indent),
                    d => out.extend(std::iter::repeat(dedent).take((-d) as usize)),
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Full,
    /// The first newline indents; the left context must end below the
    /// carried level.
    IndentOnly(u32),
    /// The first newline dedents (possibly zero times); the left context
    /// must hold the carried level.
    DedentOnly(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndentAbstraction {
    /// Concatenation parts of the symbol-level pattern.
    parts: Vec<Pattern>,
    /// Position of the `(INDENT | DEDENT*)` group and the first
    /// post-newline level, when the right context left it ambiguous.
    ambiguous_at: Option<(usize, u32)>,
    /// Levels that must be present on the left context's indentation stack
    /// (or be its current level) for the dedents to resolve.
    pub expected_prev_levels: BTreeSet<u32>,
    pub variant: Variant,
}

impl IndentAbstraction {
    pub fn pattern(&self) -> Pattern {
        Pattern::Concat(self.parts.clone())
    }
}

/// Abstract a right-context stream into the regular language of its
/// possible indentation-symbol insertions. With `initial_level = Some(0)`
/// the previous level is fully known and the result is the exact
/// insertion.
pub fn right_context_to_regular_lang_from(
    input: &[IndSym],
    indent: SymId,
    dedent: SymId,
    initial_level: Option<u32>,
) -> Result<IndentAbstraction, IndentError> {
    let mut parts: Vec<Pattern> = Vec::new();
    let mut ambiguous_at = None;
    let mut expected: BTreeSet<u32> = BTreeSet::new();
    let mut current = initial_level;
    let mut stack: Vec<u32> = Vec::new();
    for (pos, &s) in input.iter().enumerate() {
        match s {
            IndSym::Plain(sym) => parts.push(Pattern::sym(sym)),
            IndSym::Newline { sym, width } => {
                parts.push(Pattern::sym(sym));
                match current {
                    None => {
                        if width > 0 {
                            ambiguous_at = Some((parts.len(), width));
                            parts.push(Pattern::Alt(vec![
                                Pattern::sym(indent),
                                Pattern::Repeat(Box::new(Pattern::sym(dedent)), 0, None),
                            ]));
                        } else {
                            parts.push(Pattern::Repeat(Box::new(Pattern::sym(dedent)), 0, None));
                        }
                        current = Some(width);
                    }
                    Some(ref mut level) => {
                        if width > *level {
                            stack.push(*level);
                            *level = width;
                            parts.push(Pattern::sym(indent));
                        } else {
                            let mut required = 0u32;
                            let mut optional = 0u32;
                            while width < *level {
                                required += 1;
                                match stack.pop() {
                                    // The matching level lives in the left
                                    // context; further pops are its choice.
                                    None => {
                                        optional = *level - width - 1;
                                        expected.insert(width);
                                        *level = width;
                                        break;
                                    }
                                    Some(l) => {
                                        *level = l;
                                        if *level < width {
                                            return Err(IndentError::BadDedent(pos, width));
                                        }
                                    }
                                }
                            }
                            if required + optional > 0 {
                                parts.push(Pattern::Repeat(
                                    Box::new(Pattern::sym(dedent)),
                                    required,
                                    Some(required + optional),
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(IndentAbstraction { parts, ambiguous_at, expected_prev_levels: expected, variant: Variant::Full })
}

pub fn right_context_to_regular_lang(
    input: &[IndSym],
    indent: SymId,
    dedent: SymId,
) -> Result<IndentAbstraction, IndentError> {
    right_context_to_regular_lang_from(input, indent, dedent, None)
}

/// Resolve the first-newline ambiguity into the indent-taking and
/// dedent-taking specializations; an unambiguous abstraction passes
/// through alone.
pub fn split_id(abs: &IndentAbstraction, indent: SymId, dedent: SymId) -> Vec<IndentAbstraction> {
    let Some((at, level)) = abs.ambiguous_at else {
        return vec![abs.clone()];
    };
    let mut ind = abs.clone();
    ind.parts[at] = Pattern::sym(indent);
    ind.ambiguous_at = None;
    ind.variant = Variant::IndentOnly(level);
    let mut ded = abs.clone();
    ded.parts[at] = Pattern::Repeat(Box::new(Pattern::sym(dedent)), 0, None);
    ded.ambiguous_at = None;
    ded.variant = Variant::DedentOnly(level);
    vec![ind, ded]
}

/// The left-context side of a membership test: the right context's
/// unmatched levels must be resolvable, and the chosen first-newline
/// specialization must agree with where the left context actually stands.
pub fn check_indent_constraints(abs: &IndentAbstraction, ind: &IndentState) -> bool {
    let levels = ind.levels();
    if !abs.expected_prev_levels.is_subset(&levels) {
        return false;
    }
    match abs.variant {
        Variant::Full => true,
        Variant::IndentOnly(n) => ind.current.map(|c| c < n).unwrap_or(true),
        Variant::DedentOnly(n) => {
            ind.stack.contains(&n) || ind.current == Some(n)
        }
    }
}
