//! Python 3 bundle: the shipped lexeme set and grammar plus the
//! language-specific analysis a right context needs before quotienting.
//!
//! Python complicates the generic pipeline in three ways. Newlines are only
//! statement terminators at bracket nesting level zero, and the level at the
//! start of the right context is unknown, so bracket hypotheses are tracked
//! as branches while lexing the suffix. Consecutive newlines (blank and
//! comment-only lines) collapse into one logical newline whose indentation
//! is that of the last physical line. A backslash-newline is an ignored
//! lexeme, which makes continuation lines fall out of ordinary lexing.

use crate::earley::{
    accumulate, accumulate_all, init_state, is_incrementally_parsable, is_member,
    scannable_terminals, ParseState,
};
use crate::grammar::{Grammar, SymId};
use crate::indent::{
    check_indent_constraints, right_context_to_regular_lang, split_id, IndSym, IndentAbstraction,
    IndentState,
};
use crate::lcfl::{calculate_boundary_points, spanning_possible, BoundaryTable};
use crate::lexer::{
    advance_frontier, batch_lex, best_precedence, compile_lexemes, fin_of, initial_frontier,
    parse_lexeme_specs, LexMode, LexemeError, LexemeId, LexemeSet, LexerEnv,
};
use crate::nfa::{Nfa, Pattern, StateId};
use crate::quotient::right_quotient;
use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;
use thiserror::Error;

pub const PYTHON_LEXEMES: &str = include_str!("../data/python3.lexemes");
pub const PYTHON_GRAMMAR: &str = include_str!("../data/python3.bnf");

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("lexemes: {0}")]
    Lexemes(#[from] LexemeError),
    #[error("grammar: {0}")]
    Grammar(String),
    #[error("missing symbol {0}")]
    Missing(String),
}

/// The lexeme set and symbol grammar with the ids the Python-specific
/// machinery needs resolved up front.
pub struct PythonBundle {
    pub lexemes: LexemeSet,
    pub grammar: Rc<Grammar>,
    pub nl: LexemeId,
    pub ws: LexemeId,
    pub cont: LexemeId,
    pub comment: LexemeId,
    pub open_lex: BTreeSet<LexemeId>,
    pub close_lex: BTreeSet<LexemeId>,
    pub nl_sym: SymId,
    pub indent_sym: SymId,
    pub dedent_sym: SymId,
}

impl PythonBundle {
    pub fn builtin() -> PythonBundle {
        PythonBundle::load(PYTHON_LEXEMES, PYTHON_GRAMMAR).expect("bundled data is valid")
    }

    pub fn load(lexeme_src: &str, grammar_src: &str) -> Result<PythonBundle, BundleError> {
        let lexemes = compile_lexemes(parse_lexeme_specs(lexeme_src)?)?;
        let grammar =
            Grammar::load(grammar_src).map_err(|e| BundleError::Grammar(e.to_string()))?;
        let lex = |n: &str| {
            lexemes.id_of(n).ok_or_else(|| BundleError::Missing(n.to_string()))
        };
        let sym = |n: &str| {
            grammar.symbol_id(n).ok_or_else(|| BundleError::Missing(n.to_string()))
        };
        let mut open_lex = BTreeSet::new();
        let mut close_lex = BTreeSet::new();
        for n in ["LPAR", "LSQB", "LBRACE"] {
            open_lex.insert(lex(n)?);
        }
        for n in ["RPAR", "RSQB", "RBRACE"] {
            close_lex.insert(lex(n)?);
        }
        Ok(PythonBundle {
            nl: lex("NL")?,
            ws: lex("WS")?,
            cont: lex("CONT")?,
            comment: lex("COMMENT")?,
            open_lex,
            close_lex,
            nl_sym: sym("NL")?,
            indent_sym: sym("INDENT")?,
            dedent_sym: sym("DEDENT")?,
            lexemes,
            grammar: Rc::new(grammar),
        })
    }
}

/// Symbol-level events of a lexed text: newline runs carrying the width of
/// their last physical line, and code symbols carrying a bracket delta.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ev {
    /// A maximal sequence of newlines and comment-only lines.
    Run { width: u32 },
    Code { sym: SymId, delta: i8 },
}

fn span_width(chars: &[char]) -> u32 {
    chars.iter().map(|&c| match c {
        ' ' => 1,
        '\t' => 8,
        _ => 0,
    }).sum()
}

/// Reduce a lexed span stream to events. The final run's width is forced to
/// zero: nothing follows it, so its trailing spaces are not indentation.
pub fn reduce_events(bundle: &PythonBundle, text: &str, spans: &[(LexemeId, usize, usize)]) -> Option<Vec<Ev>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < spans.len() {
        let (g, start, len) = spans[i];
        if g == bundle.nl {
            let mut width = span_width(&chars[start + 1..start + len]);
            i += 1;
            while i < spans.len() {
                let (g2, s2, l2) = spans[i];
                if g2 == bundle.nl {
                    width = span_width(&chars[s2 + 1..s2 + l2]);
                    i += 1;
                } else if g2 == bundle.comment {
                    i += 1;
                } else {
                    break;
                }
            }
            out.push(Ev::Run { width });
        } else if bundle.lexemes.specs[g].ignored {
            i += 1;
        } else {
            let sym = bundle
                .grammar
                .symbol_id(&bundle.lexemes.specs[g].name)
                .filter(|&t| bundle.grammar.is_terminal(t))?;
            let delta = if bundle.open_lex.contains(&g) {
                1
            } else if bundle.close_lex.contains(&g) {
                -1
            } else {
                0
            };
            out.push(Ev::Code { sym, delta });
            i += 1;
        }
    }
    if let Some(Ev::Run { width }) = out.last_mut() {
        *width = 0;
    }
    Some(out)
}

/// One surviving hypothesis about the left context's bracket nesting level:
/// the level the left context must end at, and which newline runs of the
/// right context terminate statements under that hypothesis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParenOutcome {
    pub initial_level: u32,
    pub significant: Vec<bool>,
}

#[derive(Clone)]
enum PBranch {
    /// Exact initial level; current = initial + offset.
    Un { initial: i64, offset: i64, sig: Vec<bool> },
    /// All initial levels making the current level at least `min_cur`.
    Ne { min_cur: i64, offset: i64, sig: Vec<bool> },
}

/// Track the bracket-level hypotheses through the right context's events.
/// The unnested branch dies below level zero; the nested branch splits off
/// an exact branch whenever its minimum current level reaches zero; at end
/// of input only exact branches back at level zero survive.
pub fn analyze_right_context_parens(events: &[Ev]) -> Vec<ParenOutcome> {
    let mut branches = vec![
        PBranch::Un { initial: 0, offset: 0, sig: Vec::new() },
        PBranch::Ne { min_cur: 1, offset: 0, sig: Vec::new() },
    ];
    for ev in events {
        let mut next = Vec::new();
        for b in branches {
            match (b, ev) {
                (PBranch::Un { initial, offset, mut sig }, Ev::Run { .. }) => {
                    sig.push(initial + offset == 0);
                    next.push(PBranch::Un { initial, offset, sig });
                }
                (PBranch::Ne { min_cur, offset, mut sig }, Ev::Run { .. }) => {
                    sig.push(false);
                    next.push(PBranch::Ne { min_cur, offset, sig });
                }
                (b, Ev::Code { delta: 0, .. }) => next.push(b),
                (PBranch::Un { initial, offset, sig }, Ev::Code { delta, .. }) => {
                    let offset = offset + *delta as i64;
                    if initial + offset >= 0 {
                        next.push(PBranch::Un { initial, offset, sig });
                    }
                }
                (PBranch::Ne { min_cur, offset, sig }, Ev::Code { delta, .. }) => {
                    let min_cur = min_cur + *delta as i64;
                    let offset = offset + *delta as i64;
                    if min_cur == 0 {
                        next.push(PBranch::Un { initial: -offset, offset, sig: sig.clone() });
                        next.push(PBranch::Ne { min_cur: 1, offset, sig });
                    } else {
                        next.push(PBranch::Ne { min_cur, offset, sig });
                    }
                }
            }
        }
        branches = next;
    }
    let mut out: Vec<ParenOutcome> = Vec::new();
    for b in branches {
        if let PBranch::Un { initial, offset, sig } = b {
            if initial + offset == 0 {
                let o = ParenOutcome { initial_level: initial as u32, significant: sig };
                if !out.contains(&o) {
                    out.push(o);
                }
            }
        }
    }
    out
}

/// A membership query requires the left context's bracket level to equal the
/// level the right context's surviving hypothesis demands.
pub fn membership_paren_check(required: u32, left_depth: u32) -> bool {
    left_depth == required
}

/// One quotient sublanguage: a boundary skip, a bracket hypothesis, and an
/// indentation specialization, all baked into a quotient grammar.
pub struct PySublanguage {
    pub skip: usize,
    /// Indentation contributed by the skipped characters when the spanning
    /// symbol is a newline.
    pub skip_width: u32,
    pub boundary: BTreeMap<LexemeId, BTreeSet<StateId>>,
    pub required_level: u32,
    pub indent: IndentAbstraction,
    /// The symbol-level language of the remainder, over base-grammar ids.
    pub pattern: Pattern,
    /// Same, before the first-newline split resolved the indent/dedent
    /// ambiguity.
    pub base_pattern: Pattern,
    /// Previous indentation levels the unsplit abstraction expects the left
    /// context to hold.
    pub expected_prev_levels: BTreeSet<u32>,
    /// The remainder starts inside the newline run the left context ends
    /// with, so a trailing held or spanning newline merges into it.
    pub run_continues: bool,
    pub grammar: Rc<Grammar>,
    pub env: LexerEnv,
    q_nl: Option<SymId>,
    q_indent: Option<SymId>,
    q_dedent: Option<SymId>,
}

pub struct PythonQuotient {
    /// The right context, normalized to end with a newline.
    pub suffix: String,
    pub bt: BoundaryTable,
    pub subs: Vec<PySublanguage>,
}

/// Build the sublanguages of the quotient of Python by a right context:
/// boundary analysis, then per skip a lexing of the remainder, the bracket
/// hypotheses, the indentation abstraction and its first-newline split, and
/// finally a right quotient of the symbol grammar per resulting pattern.
pub fn build_python_quotient(bundle: &PythonBundle, right: &str) -> PythonQuotient {
    let mut suffix = right.to_string();
    if !suffix.ends_with('\n') {
        suffix.push('\n');
    }
    let bt = calculate_boundary_points(&bundle.lexemes, &suffix);
    let chars: Vec<char> = suffix.chars().collect();
    let alphabet: BTreeSet<u32> = bundle.grammar.terminals().collect();
    let mut skips: Vec<(usize, BTreeMap<LexemeId, BTreeSet<StateId>>)> =
        vec![(0, BTreeMap::new())];
    for (&n, states) in &bt.boundaries {
        skips.push((n, states.clone()));
    }
    let mut subs = Vec::new();
    for (skip, boundary) in skips {
        let rest: String = chars[skip..].iter().collect();
        let Ok(spans) = batch_lex(&bundle.lexemes, &rest, LexMode::PythonRule) else {
            continue;
        };
        let run_continues = spans
            .first()
            .map(|&(g, _, _)| g == bundle.nl || g == bundle.comment)
            .unwrap_or(false);
        let Some(events) = reduce_events(bundle, &rest, &spans) else {
            continue;
        };
        let skip_width = span_width(&chars[..skip]);
        for outcome in analyze_right_context_parens(&events) {
            let mut indsyms = Vec::new();
            let mut run = 0usize;
            for ev in &events {
                match *ev {
                    Ev::Run { width } => {
                        if outcome.significant[run] {
                            indsyms.push(IndSym::Newline { sym: bundle.nl_sym, width });
                        }
                        run += 1;
                    }
                    Ev::Code { sym, .. } => indsyms.push(IndSym::Plain(sym)),
                }
            }
            let Ok(abs) =
                right_context_to_regular_lang(&indsyms, bundle.indent_sym, bundle.dedent_sym)
            else {
                continue;
            };
            let base_pattern = abs.pattern();
            for variant in split_id(&abs, bundle.indent_sym, bundle.dedent_sym) {
                let pattern = variant.pattern();
                let nfa = Nfa::from_pattern(&pattern, &alphabet);
                let mut q = right_quotient(&bundle.grammar, &nfa);
                // The ends-in-spanning-symbol refinement only applies when
                // every spanning candidate reaches the parser unchanged.
                let plain = boundary
                    .keys()
                    .all(|&g| !bundle.lexemes.specs[g].ignored && g != bundle.nl);
                if skip > 0 && plain {
                    let sigma_end: BTreeSet<SymId> = boundary
                        .keys()
                        .filter_map(|&g| {
                            q.symbol_id(&bundle.lexemes.specs[g].name)
                                .filter(|&t| q.is_terminal(t))
                        })
                        .collect();
                    if sigma_end.is_empty() {
                        continue;
                    }
                    q = q.constrain_last_symbol(&sigma_end);
                }
                if q.check_inhabited().contains(&q.start) {
                    continue;
                }
                let q_nl = q.symbol_id("NL").filter(|&t| q.is_terminal(t));
                let q_indent = q.symbol_id("INDENT").filter(|&t| q.is_terminal(t));
                let q_dedent = q.symbol_id("DEDENT").filter(|&t| q.is_terminal(t));
                let env = LexerEnv::bind(bundle.lexemes.clone(), &q);
                subs.push(PySublanguage {
                    skip,
                    skip_width,
                    boundary: boundary.clone(),
                    required_level: outcome.initial_level,
                    indent: variant,
                    pattern: pattern.clone(),
                    base_pattern: base_pattern.clone(),
                    expected_prev_levels: abs.expected_prev_levels.clone(),
                    run_continues,
                    grammar: Rc::new(q),
                    env,
                    q_nl,
                    q_indent,
                    q_dedent,
                });
            }
        }
    }
    PythonQuotient { suffix, bt, subs }
}

/// Feed the held newline and its indentation symbols to the parser,
/// returning the new state or None if the parse dies.
fn flush(
    sub: &PySublanguage,
    parse: &ParseState,
    ind: &IndentState,
    width: u32,
) -> Option<(ParseState, IndentState)> {
    let mut p = accumulate(parse, sub.q_nl?);
    if !is_incrementally_parsable(&p) {
        return None;
    }
    let mut ind2 = ind.clone();
    match ind2.newline(0, width).ok()? {
        1 => {
            p = accumulate(&p, sub.q_indent?);
            if !is_incrementally_parsable(&p) {
                return None;
            }
        }
        d => {
            for _ in 0..(-d) {
                p = accumulate(&p, sub.q_dedent?);
                if !is_incrementally_parsable(&p) {
                    return None;
                }
            }
        }
    }
    Some((p, ind2))
}

/// Is there any indentation width for which a newline keeps the parse
/// alive? The possible widths reduce to finitely many outcomes: same level,
/// one deeper, or a dedent to each stack level.
fn newline_feasible(sub: &PySublanguage, parse: &ParseState, ind: &IndentState) -> bool {
    let cur = ind.current.unwrap_or(0);
    let mut widths: Vec<u32> = vec![cur, cur + 1];
    widths.extend(ind.stack.iter().copied());
    widths.into_iter().any(|w| flush(sub, parse, ind, w).is_some())
}

/// Per-sublanguage branch state of the left-plus-generated text. Python's
/// lexing rule never forks, so one branch per sublanguage suffices.
#[derive(Clone)]
pub struct PyBranch {
    pub active: Vec<BTreeSet<StateId>>,
    pub sip_len: usize,
    /// Indentation width of the symbol-in-progress, meaningful when it is a
    /// newline.
    pub sip_width: u32,
    pub last_fin: Option<(LexemeId, usize)>,
    /// Committed parse; a held newline is not yet applied.
    pub parse: ParseState,
    pub indent: IndentState,
    pub depth: u32,
    /// An emitted statement-terminating newline waiting for the next code
    /// symbol; a following newline replaces its width (blank-line collapse).
    pub held: Option<u32>,
    scannable: BTreeSet<SymId>,
    newline_ok: bool,
}

pub fn init_py_branch(sub: &PySublanguage) -> PyBranch {
    let parse = init_state(Rc::clone(&sub.grammar));
    let scannable = scannable_terminals(&parse);
    let indent = IndentState::new();
    let newline_ok = newline_feasible(sub, &parse, &indent);
    PyBranch {
        active: initial_frontier(&sub.env),
        sip_len: 0,
        sip_width: 0,
        last_fin: None,
        parse,
        indent,
        depth: 0,
        held: None,
        scannable,
        newline_ok,
    }
}

fn admissible(bundle: &PythonBundle, sub: &PySublanguage, b: &PyBranch, g: LexemeId) -> bool {
    if g == bundle.nl || g == bundle.comment {
        return b.depth > 0 || b.newline_ok;
    }
    if sub.env.lexemes.specs[g].ignored {
        return true;
    }
    match sub.env.term_of[g] {
        Some(t) => b.scannable.contains(&t),
        None => false,
    }
}

fn emit(bundle: &PythonBundle, sub: &PySublanguage, nb: &mut PyBranch, h: LexemeId) -> Option<()> {
    if h == bundle.nl {
        if nb.depth == 0 {
            nb.held = Some(nb.sip_width);
            // The width may still be replaced by a blank line, so the flush
            // is speculative: it only refreshes the code-symbol gate.
            nb.scannable = match flush(sub, &nb.parse, &nb.indent, nb.sip_width) {
                Some((p, _)) => scannable_terminals(&p),
                None => BTreeSet::new(),
            };
        }
        return Some(());
    }
    if sub.env.lexemes.specs[h].ignored {
        return Some(());
    }
    if let Some(w) = nb.held.take() {
        let (p, ind) = flush(sub, &nb.parse, &nb.indent, w)?;
        nb.parse = p;
        nb.indent = ind;
    }
    let t = sub.env.term_of[h]?;
    nb.parse = accumulate(&nb.parse, t);
    if !is_incrementally_parsable(&nb.parse) {
        return None;
    }
    if bundle.open_lex.contains(&h) {
        nb.depth += 1;
    } else if bundle.close_lex.contains(&h) {
        if nb.depth == 0 {
            return None;
        }
        nb.depth -= 1;
    }
    nb.scannable = scannable_terminals(&nb.parse);
    nb.newline_ok = nb.depth > 0 || newline_feasible(sub, &nb.parse, &nb.indent);
    Some(())
}

/// One character of Python's lexing rule with newline interception: emit
/// only when the whole symbol-in-progress is a finished lexeme, hold
/// statement newlines until the next code symbol fixes their width, drop
/// newlines inside brackets.
pub fn py_step(
    bundle: &PythonBundle,
    sub: &PySublanguage,
    b: &PyBranch,
    c: char,
) -> Option<PyBranch> {
    let env = &sub.env;
    let mut nb = b.clone();
    let mut stepped = advance_frontier(env, &nb.active, c as u32);
    if stepped.iter().all(|s| s.is_empty()) {
        let (h, len) = nb.last_fin?;
        if len != nb.sip_len || !admissible(bundle, sub, &nb, h) {
            return None;
        }
        emit(bundle, sub, &mut nb, h)?;
        stepped = advance_frontier(env, &initial_frontier(env), c as u32);
        nb.sip_len = 0;
        nb.last_fin = None;
    }
    let pos: Vec<LexemeId> =
        stepped.iter().enumerate().filter(|(_, s)| !s.is_empty()).map(|(g, _)| g).collect();
    if pos.is_empty() || !pos.iter().any(|&g| admissible(bundle, sub, &nb, g)) {
        return None;
    }
    nb.active = stepped;
    nb.sip_len += 1;
    if nb.sip_len == 1 {
        nb.sip_width = 0;
    }
    nb.sip_width += match c {
        ' ' => 1,
        '\t' => 8,
        _ => 0,
    };
    nb.last_fin = best_precedence(env, &fin_of(env, &nb.active)).map(|h| (h, nb.sip_len));
    Some(nb)
}

/// Membership of the consumed text in this sublanguage: bracket level must
/// match the hypothesis, the boundary conditions of the skip must hold, and
/// the parse extended by the spanning symbol (newlines flushed with their
/// final width) must be a member with consistent indentation.
pub fn py_membership(
    bundle: &PythonBundle,
    sub: &PySublanguage,
    bt: &BoundaryTable,
    b: &PyBranch,
) -> bool {
    let env = &sub.env;
    let (h, extra) = if sub.skip == 0 {
        if b.sip_len == 0 {
            return membership_paren_check(sub.required_level, b.depth)
                && b.held.is_none()
                && is_member(&b.parse)
                && check_indent_constraints(&sub.indent, &b.indent);
        }
        let h = match b.last_fin {
            Some((h, len)) if len == b.sip_len && admissible(bundle, sub, b, h) => h,
            _ => return false,
        };
        if spanning_possible(bt, &b.active, 1) {
            return false;
        }
        (h, 0)
    } else {
        if b.sip_len == 0 {
            return false;
        }
        let cands: Vec<LexemeId> = sub
            .boundary
            .iter()
            .filter(|(&g, states)| b.active[g].iter().any(|s| states.contains(s)))
            .map(|(&g, _)| g)
            .collect();
        let Some(&h) = cands.iter().max_by_key(|&&g| env.lexemes.specs[g].precedence) else {
            return false;
        };
        if spanning_possible(bt, &b.active, sub.skip + 1) {
            return false;
        }
        (h, sub.skip_width)
    };
    // The pending symbol is part of the left context, so it counts toward
    // the bracket level the hypothesis constrains.
    let eff_depth = if bundle.open_lex.contains(&h) {
        b.depth + 1
    } else if bundle.close_lex.contains(&h) {
        match b.depth.checked_sub(1) {
            Some(d) => d,
            None => return false,
        }
    } else {
        b.depth
    };
    if !membership_paren_check(sub.required_level, eff_depth) {
        return false;
    }
    let finish = |p: ParseState, ind: IndentState| {
        is_member(&p) && check_indent_constraints(&sub.indent, &ind)
    };
    if h == bundle.nl {
        if b.depth > 0 || sub.run_continues {
            // Dropped inside brackets, or merged into the remainder's
            // leading newline run.
            return finish(b.parse.clone(), b.indent.clone());
        }
        return match flush(sub, &b.parse, &b.indent, b.sip_width + extra) {
            Some((p, ind)) => finish(p, ind),
            None => false,
        };
    }
    if h == bundle.comment {
        // A comment always runs to a newline, so the run continues right.
        return finish(b.parse.clone(), b.indent.clone());
    }
    let (p, ind) = if let Some(w) = b.held {
        match flush(sub, &b.parse, &b.indent, w) {
            Some(x) => x,
            None => return false,
        }
    } else {
        (b.parse.clone(), b.indent.clone())
    };
    if env.lexemes.specs[h].ignored {
        return finish(p, ind);
    }
    let Some(t) = env.term_of[h] else {
        return false;
    };
    finish(accumulate(&p, t), ind)
}

/// Reference depth counter: the bracket nesting level of a whole left
/// context, with brackets inside strings and comments excluded by lexing.
pub fn paren_depth(bundle: &PythonBundle, text: &str) -> Option<u32> {
    let spans = batch_lex(&bundle.lexemes, text, LexMode::PythonRule).ok()?;
    let mut depth: i64 = 0;
    for (g, _, _) in spans {
        if bundle.open_lex.contains(&g) {
            depth += 1;
        } else if bundle.close_lex.contains(&g) {
            depth -= 1;
            if depth < 0 {
                return None;
            }
        }
    }
    Some(depth as u32)
}

/// Batch reference: lex, reduce, insert indentation at bracket level zero,
/// and parse the whole symbol stream.
pub fn parse_program(bundle: &PythonBundle, text: &str) -> Result<bool, usize> {
    let mut src = text.to_string();
    if !src.ends_with('\n') {
        src.push('\n');
    }
    let spans = batch_lex(&bundle.lexemes, &src, LexMode::PythonRule)?;
    let events = match reduce_events(bundle, &src, &spans) {
        Some(e) => e,
        None => return Ok(false),
    };
    let mut stream: Vec<SymId> = Vec::new();
    let mut ind = IndentState::new();
    let mut depth: i64 = 0;
    for (pos, ev) in events.iter().enumerate() {
        match *ev {
            Ev::Run { width } => {
                if depth == 0 {
                    stream.push(bundle.nl_sym);
                    match ind.newline(pos, width) {
                        Ok(1) => stream.push(bundle.indent_sym),
                        Ok(d) => {
                            stream.extend(std::iter::repeat(bundle.dedent_sym).take((-d) as usize))
                        }
                        Err(_) => return Ok(false),
                    }
                }
            }
            Ev::Code { sym, delta } => {
                stream.push(sym);
                depth += delta as i64;
                if depth < 0 {
                    return Ok(false);
                }
            }
        }
    }
    let s = accumulate_all(&init_state(Rc::clone(&bundle.grammar)), &stream);
    Ok(is_member(&s))
}
