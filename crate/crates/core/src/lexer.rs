//! Incremental, branching lexer over per-lexeme NFAs.
//!
//! Two character-at-a-time disciplines are provided: the strict
//! leftmost-longest rule, which needs a forking branch structure because a
//! finished match may be superseded by a longer one, and the
//! one-character-backtrack rule real Python uses, which never forks. Both
//! consult the parser's scannable terminals after every emission so a
//! character that cannot start any acceptable symbol kills the branch
//! immediately. A non-incremental batch lexer over the same automata serves
//! right-context lexing and acts as the reference for the incremental modes.

use crate::earley::{accumulate, is_member, scannable_terminals, ParseState};
use crate::grammar::{Grammar, SymId};
use crate::nfa::{parse_regex, Nfa, StateId};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub type LexemeId = usize;

#[derive(Debug, Clone)]
pub struct LexemeSpec {
    pub name: String,
    /// Higher wins ties at equal match length; must be unique per set.
    pub precedence: i64,
    pub pattern: String,
    /// Ignored lexemes are dropped from the symbol stream before parsing.
    pub ignored: bool,
    /// Name of a lexeme that must be scannable for this one to be emitted.
    pub follow: Option<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexemeError {
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("lexeme {0}: {1}")]
    Pattern(String, String),
    #[error("lexeme {0} matches the empty string")]
    EpsilonPattern(String),
    #[error("lexemes {0} and {1} share precedence {2}")]
    DuplicatePrecedence(String, String, i64),
    #[error("lexeme {0}: follow requirement {1} is not a lexeme")]
    UnknownFollow(String, String),
}

#[derive(Debug, Clone)]
pub struct LexemeSet {
    pub specs: Vec<LexemeSpec>,
    /// One automaton per lexeme, states that cannot reach a final pruned.
    pub automata: Vec<Nfa>,
    pub alphabet: BTreeSet<u32>,
    /// Follow requirements resolved to ids.
    pub follow_ids: Vec<Option<LexemeId>>,
    /// Inclusion warnings: a higher-precedence lexeme whose language covers
    /// a lower-precedence one can mask valid rejections.
    pub warnings: Vec<String>,
}

/// Printable ASCII plus the whitespace controls the lexemes may mention.
pub fn default_alphabet() -> BTreeSet<u32> {
    let mut a: BTreeSet<u32> = (0x20..0x7f).collect();
    a.extend(['\t' as u32, '\n' as u32, 0x0c, '\r' as u32]);
    a
}

/// Parse a lexeme spec file: one `NAME <precedence> /regex/ [ignore]
/// [follow=NAME]` per line, `#` comments.
pub fn parse_lexeme_specs(src: &str) -> Result<Vec<LexemeSpec>, LexemeError> {
    let mut out = Vec::new();
    for (ln, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: &str| LexemeError::Parse(ln + 1, m.to_string());
        let mut rest = line;
        let name = {
            let end = rest.find(char::is_whitespace).ok_or_else(|| err("missing precedence"))?;
            let (n, r) = rest.split_at(end);
            rest = r.trim_start();
            n.to_string()
        };
        let precedence = {
            let end = rest.find(char::is_whitespace).ok_or_else(|| err("missing pattern"))?;
            let (p, r) = rest.split_at(end);
            rest = r.trim_start();
            p.parse::<i64>().map_err(|_| err("bad precedence"))?
        };
        if !rest.starts_with('/') {
            return Err(err("pattern must be /.../"));
        }
        let body: Vec<char> = rest[1..].chars().collect();
        let mut pat = String::new();
        let mut i = 0;
        let mut closed = false;
        while i < body.len() {
            if body[i] == '\\' && i + 1 < body.len() {
                if body[i + 1] != '/' {
                    pat.push('\\');
                }
                pat.push(body[i + 1]);
                i += 2;
            } else if body[i] == '/' {
                closed = true;
                i += 1;
                break;
            } else {
                pat.push(body[i]);
                i += 1;
            }
        }
        if !closed {
            return Err(err("unterminated pattern"));
        }
        let tail: String = body[i..].iter().collect();
        let mut ignored = false;
        let mut follow = None;
        for tok in tail.split_whitespace() {
            if tok == "ignore" {
                ignored = true;
            } else if let Some(f) = tok.strip_prefix("follow=") {
                follow = Some(f.to_string());
            } else {
                return Err(err(&format!("unknown attribute `{tok}`")));
            }
        }
        out.push(LexemeSpec { name, precedence, pattern: pat, ignored, follow });
    }
    Ok(out)
}

/// Build and prune the per-lexeme automata, validating the set.
pub fn compile_lexemes(specs: Vec<LexemeSpec>) -> Result<LexemeSet, LexemeError> {
    let alphabet = default_alphabet();
    let mut by_prec: BTreeMap<i64, usize> = BTreeMap::new();
    for (i, s) in specs.iter().enumerate() {
        if let Some(&j) = by_prec.get(&s.precedence) {
            return Err(LexemeError::DuplicatePrecedence(
                specs[j].name.clone(),
                s.name.clone(),
                s.precedence,
            ));
        }
        by_prec.insert(s.precedence, i);
    }
    let mut automata = Vec::new();
    for s in &specs {
        let pat = parse_regex(&s.pattern, &alphabet)
            .map_err(|e| LexemeError::Pattern(s.name.clone(), e.to_string()))?;
        if pat.accepts_empty() {
            return Err(LexemeError::EpsilonPattern(s.name.clone()));
        }
        let mut nfa = Nfa::from_pattern(&pat, &alphabet);
        nfa.prune();
        automata.push(nfa);
    }
    let mut follow_ids = Vec::new();
    for s in &specs {
        follow_ids.push(match &s.follow {
            None => None,
            Some(f) => Some(
                specs
                    .iter()
                    .position(|o| &o.name == f)
                    .ok_or_else(|| LexemeError::UnknownFollow(s.name.clone(), f.clone()))?,
            ),
        });
    }
    let mut warnings = Vec::new();
    for (i, a) in automata.iter().enumerate() {
        for (j, b) in automata.iter().enumerate() {
            if i == j || specs[i].precedence <= specs[j].precedence {
                continue;
            }
            // i has higher precedence; warn if L(j) is contained in L(i),
            // the shape where i can mask a rejection that j should force.
            if a.state_count() <= 16 && b.state_count() <= 16 && nfa_includes(a, b, &alphabet) {
                warnings.push(format!(
                    "lexeme {} is subsumed by higher-precedence {}",
                    specs[j].name, specs[i].name
                ));
            }
        }
    }
    Ok(LexemeSet { specs, automata, alphabet, follow_ids, warnings })
}

/// Does L(inner) fit inside L(outer)? Checked by emptiness of the product
/// of inner with outer's determinized complement.
fn nfa_includes(outer: &Nfa, inner: &Nfa, alphabet: &BTreeSet<u32>) -> bool {
    let mut det = outer.clone();
    det.determinize();
    // A missing transition in the DFA means rejection, tracked as `None`.
    let mut frontier: Vec<(BTreeSet<StateId>, Option<StateId>)> =
        vec![([inner.initial].into(), Some(det.initial))];
    let mut seen: BTreeSet<(Vec<StateId>, Option<StateId>)> = BTreeSet::new();
    while let Some((is, os)) = frontier.pop() {
        if !seen.insert((is.iter().copied().collect(), os)) {
            continue;
        }
        let inner_final = is.iter().any(|s| inner.finals.contains(s));
        let outer_final = os.map(|s| det.finals.contains(&s)).unwrap_or(false);
        if inner_final && !outer_final {
            return false;
        }
        for &c in alphabet {
            let ni = inner.step(&is, c);
            if ni.is_empty() {
                continue;
            }
            let no = os.and_then(|s| det.trans[s].get(&c).and_then(|t| t.iter().next().copied()));
            frontier.push((ni, no));
        }
    }
    true
}

impl LexemeSet {
    pub fn id_of(&self, name: &str) -> Option<LexemeId> {
        self.specs.iter().position(|s| s.name == name)
    }
}

/// A lexeme set bound to a grammar: each lexeme resolved to the grammar
/// terminal of the same name, if any. Quotient grammars routinely lack some
/// terminals; unresolved non-ignored lexemes are simply never scannable.
pub struct LexerEnv {
    pub lexemes: LexemeSet,
    pub term_of: Vec<Option<SymId>>,
}

impl LexerEnv {
    pub fn bind(lexemes: LexemeSet, g: &Grammar) -> LexerEnv {
        let term_of = lexemes
            .specs
            .iter()
            .map(|s| g.symbol_id(&s.name).filter(|&t| g.is_terminal(t)))
            .collect();
        LexerEnv { lexemes, term_of }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexMode {
    LeftmostLongest,
    PythonRule,
}

#[derive(Clone)]
pub struct LexerBranch {
    pub id: u64,
    /// Ids of the branches this one was forked from, for cascading kills.
    pub lineage: Vec<u64>,
    /// Live NFA states per lexeme; empty set = lexeme out of the running.
    pub active: Vec<BTreeSet<StateId>>,
    /// Characters consumed since the last emission.
    pub sip_len: usize,
    /// Best finished match over the current symbol-in-progress.
    pub last_fin: Option<(LexemeId, usize)>,
    pub parse: ParseState,
    /// Lexemes currently emittable: scannable non-ignored terminals plus
    /// ignored lexemes whose follow requirement (if any) is scannable.
    pub scannable: BTreeSet<LexemeId>,
    pub mode: LexMode,
    /// The pending emit-branch this branch will kill on a longer match.
    pending_emit: Option<u64>,
}

impl LexerBranch {
    /// Id of the fork that emitted this branch's symbol-in-progress as a
    /// symbol, if that fork is still pending.
    pub fn pending_emit(&self) -> Option<u64> {
        self.pending_emit
    }
}

pub(crate) fn scannable_closure(env: &LexerEnv, parse: &ParseState) -> BTreeSet<LexemeId> {
    let terms = scannable_terminals(parse);
    let mut s = BTreeSet::new();
    for (g, spec) in env.lexemes.specs.iter().enumerate() {
        if !spec.ignored && env.term_of[g].map(|t| terms.contains(&t)).unwrap_or(false) {
            s.insert(g);
        }
    }
    for (g, spec) in env.lexemes.specs.iter().enumerate() {
        if spec.ignored {
            match env.lexemes.follow_ids[g] {
                None => {
                    s.insert(g);
                }
                Some(f) => {
                    if s.contains(&f) {
                        s.insert(g);
                    }
                }
            }
        }
    }
    s
}

pub(crate) fn initial_frontier(env: &LexerEnv) -> Vec<BTreeSet<StateId>> {
    env.lexemes.automata.iter().map(|a| [a.initial].into()).collect()
}

pub(crate) fn advance_frontier(
    env: &LexerEnv,
    active: &[BTreeSet<StateId>],
    c: u32,
) -> Vec<BTreeSet<StateId>> {
    env.lexemes
        .automata
        .iter()
        .zip(active)
        .map(|(a, states)| a.step(states, c))
        .collect()
}

pub(crate) fn fin_of(env: &LexerEnv, active: &[BTreeSet<StateId>]) -> BTreeSet<LexemeId> {
    active
        .iter()
        .enumerate()
        .filter(|(g, states)| states.iter().any(|s| env.lexemes.automata[*g].finals.contains(s)))
        .map(|(g, _)| g)
        .collect()
}

pub(crate) fn best_precedence(env: &LexerEnv, fin: &BTreeSet<LexemeId>) -> Option<LexemeId> {
    fin.iter().copied().max_by_key(|&g| env.lexemes.specs[g].precedence)
}

pub fn init_branch(env: &LexerEnv, parse: ParseState, mode: LexMode, id: u64) -> LexerBranch {
    let scannable = scannable_closure(env, &parse);
    LexerBranch {
        id,
        lineage: Vec::new(),
        active: initial_frontier(env),
        sip_len: 0,
        last_fin: None,
        parse,
        scannable,
        mode,
        pending_emit: None,
    }
}

/// May this lexeme be emitted right now? Non-ignored lexemes must be
/// scannable; ignored ones pass unless an unmet follow requirement gates
/// them.
pub fn emit_gate(env: &LexerEnv, b: &LexerBranch, g: LexemeId) -> bool {
    if !env.lexemes.specs[g].ignored {
        return b.scannable.contains(&g);
    }
    match env.lexemes.follow_ids[g] {
        None => true,
        Some(f) => b.scannable.contains(&f),
    }
}

fn emit(env: &LexerEnv, b: &LexerBranch, g: LexemeId) -> (ParseState, BTreeSet<LexemeId>) {
    if env.lexemes.specs[g].ignored {
        (b.parse.clone(), b.scannable.clone())
    } else {
        let parse = accumulate(&b.parse, env.term_of[g].expect("scannable implies bound"));
        let scannable = scannable_closure(env, &parse);
        (parse, scannable)
    }
}

pub struct StepResult {
    pub survivors: Vec<LexerBranch>,
    /// Branch ids to delete (with their descendants) across the whole set.
    pub kills: Vec<u64>,
}

/// Strict leftmost-longest step. Produces the continuing branch (if some
/// live lexeme remains emittable) and, when the best finished lexeme is
/// emittable, a forked branch that emits it now; a later longer match kills
/// that fork.
pub fn step_leftmost_longest(
    env: &LexerEnv,
    b: &LexerBranch,
    c: char,
    next_id: &mut u64,
) -> StepResult {
    debug_assert_eq!(b.mode, LexMode::LeftmostLongest);
    let active = advance_frontier(env, &b.active, c as u32);
    let pos: BTreeSet<LexemeId> =
        active.iter().enumerate().filter(|(_, s)| !s.is_empty()).map(|(g, _)| g).collect();
    let mut survivors = Vec::new();
    let mut kills = Vec::new();
    if pos.intersection(&b.scannable).next().is_none() {
        return StepResult { survivors, kills };
    }
    let mut long = b.clone();
    long.active = active;
    long.sip_len += 1;
    let fin = fin_of(env, &long.active);
    if let Some(h) = best_precedence(env, &fin) {
        long.last_fin = Some((h, long.sip_len));
        if emit_gate(env, &long, h) {
            if let Some(old) = long.pending_emit.take() {
                kills.push(old);
            }
            let (parse, scannable) = emit(env, &long, h);
            let id = *next_id;
            *next_id += 1;
            let mut lineage = b.lineage.clone();
            lineage.push(id);
            long.pending_emit = Some(id);
            survivors.push(LexerBranch {
                id,
                lineage,
                active: initial_frontier(env),
                sip_len: 0,
                last_fin: None,
                parse,
                scannable,
                mode: b.mode,
                pending_emit: None,
            });
        }
    }
    survivors.push(long);
    StepResult { survivors, kills }
}

/// The one-character-backtrack rule: when the next character kills every
/// in-progress lexeme, emit only if the whole symbol-in-progress is a
/// finished emittable lexeme, then restart on that character. Never forks.
pub fn step_python_rule(env: &LexerEnv, b: &LexerBranch, c: char) -> Option<LexerBranch> {
    debug_assert_eq!(b.mode, LexMode::PythonRule);
    let mut nb = b.clone();
    let mut active = advance_frontier(env, &nb.active, c as u32);
    let mut restarted = false;
    if active.iter().all(|s| s.is_empty()) {
        let (h, len) = nb.last_fin?;
        if nb.sip_len == 0 || len != nb.sip_len || !emit_gate(env, &nb, h) {
            return None;
        }
        let (parse, scannable) = emit(env, &nb, h);
        nb.parse = parse;
        nb.scannable = scannable;
        nb.sip_len = 0;
        active = advance_frontier(env, &initial_frontier(env), c as u32);
        restarted = true;
    }
    let pos: BTreeSet<LexemeId> =
        active.iter().enumerate().filter(|(_, s)| !s.is_empty()).map(|(g, _)| g).collect();
    if pos.intersection(&nb.scannable).next().is_none() {
        return None;
    }
    nb.active = active;
    nb.sip_len = if restarted { 1 } else { nb.sip_len + 1 };
    let fin = fin_of(env, &nb.active);
    nb.last_fin = best_precedence(env, &fin).map(|h| (h, nb.sip_len));
    Some(nb)
}

/// Membership of the text consumed so far, per the branch's mode: either
/// the text ends exactly on the last emission, or (backtrack rule only) the
/// symbol-in-progress is itself a finished emittable lexeme.
pub fn branch_is_member(env: &LexerEnv, b: &LexerBranch) -> bool {
    if b.sip_len == 0 {
        return is_member(&b.parse);
    }
    if b.mode == LexMode::LeftmostLongest {
        return false;
    }
    match b.last_fin {
        Some((h, len)) if len == b.sip_len && emit_gate(env, b, h) => {
            let (parse, _) = emit(env, b, h);
            is_member(&parse)
        }
        _ => false,
    }
}

/// Step every branch on one character, applying cross-branch kills. The
/// lexer+parser combination stays incrementally parsable exactly while this
/// returns a non-empty set.
pub fn step_branches(
    env: &LexerEnv,
    branches: &[LexerBranch],
    c: char,
    next_id: &mut u64,
) -> Vec<LexerBranch> {
    let mut out = Vec::new();
    let mut kills: BTreeSet<u64> = BTreeSet::new();
    for b in branches {
        let r = match b.mode {
            LexMode::LeftmostLongest => step_leftmost_longest(env, b, c, next_id),
            LexMode::PythonRule => StepResult {
                survivors: step_python_rule(env, b, c).into_iter().collect(),
                kills: Vec::new(),
            },
        };
        out.extend(r.survivors);
        kills.extend(r.kills);
    }
    out.retain(|b| !kills.contains(&b.id) && !b.lineage.iter().any(|a| kills.contains(a)));
    out
}

/// Non-incremental lexing of a whole string; the reference for both
/// incremental modes and the workhorse for right-context lexing. Returns
/// `(lexeme, start, length)` triples or the offset where lexing got stuck.
pub fn batch_lex(
    ls: &LexemeSet,
    text: &str,
    mode: LexMode,
) -> Result<Vec<(LexemeId, usize, usize)>, usize> {
    let chars: Vec<u32> = text.chars().map(|c| c as u32).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let mut states: Vec<BTreeSet<StateId>> =
            ls.automata.iter().map(|a| [a.initial].into()).collect();
        let mut best: Option<(usize, LexemeId)> = None;
        let mut j = i;
        while j < chars.len() {
            let stepped: Vec<BTreeSet<StateId>> = ls
                .automata
                .iter()
                .zip(&states)
                .map(|(a, s)| a.step(s, chars[j]))
                .collect();
            if stepped.iter().all(|s| s.is_empty()) {
                break;
            }
            states = stepped;
            j += 1;
            let fin: BTreeSet<LexemeId> = states
                .iter()
                .enumerate()
                .filter(|(g, s)| s.iter().any(|st| ls.automata[*g].finals.contains(st)))
                .map(|(g, _)| g)
                .collect();
            let h = fin.iter().copied().max_by_key(|&g| ls.specs[g].precedence);
            if let Some(h) = h {
                best = Some((j - i, h));
            }
        }
        match (mode, best) {
            (_, None) => return Err(i),
            (LexMode::LeftmostLongest, Some((len, g))) => {
                out.push((g, i, len));
                i += len;
            }
            (LexMode::PythonRule, Some((len, g))) => {
                // Emission requires the entire in-progress text to be one
                // finished lexeme; a shorter stale match is an error.
                if len != j - i {
                    return Err(j);
                }
                out.push((g, i, len));
                i += len;
            }
        }
    }
    Ok(out)
}
