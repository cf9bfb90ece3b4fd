//! Right quotient of a lexed context-free language.
//!
//! A right context may begin mid-symbol, so the quotient is a union of
//! sublanguages indexed by how many of its characters the symbol spanning
//! the boundary consumes. The boundary-point analysis finds, per lexeme,
//! the automaton states at the boundary from which the spanned prefix of
//! the right context completes the symbol; indices whose spanning symbol
//! could always be extended further (the leftmost-longest rule would take
//! the longer match) are eliminated up front. Each surviving index yields a
//! sublanguage: the symbol-level grammar, constrained to end in a lexeme
//! that can span there, right-quotiented by the lexed remainder.

use crate::earley::{accumulate, init_state, is_member};
use crate::grammar::{Grammar, SymId};
use crate::lexer::{
    batch_lex, emit_gate, init_branch, LexMode, LexemeId, LexemeSet, LexerBranch, LexerEnv,
};
use crate::nfa::{Nfa, StateId};
use crate::quotient::right_quotient;
use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

#[derive(Debug)]
pub struct BoundaryTable {
    /// Boundary index n (characters of the suffix the spanning symbol
    /// consumes, n >= 1) to the per-lexeme states it can span from.
    pub boundaries: BTreeMap<usize, BTreeMap<LexemeId, BTreeSet<StateId>>>,
    /// Automaton steps taken, for complexity assertions.
    pub step_calls: usize,
}

/// For each suffix index n, compute the per-lexeme boundary states: states
/// reachable mid-symbol (at least one character consumed before the
/// boundary) from which exactly the first n suffix characters finish the
/// symbol, with no longer completion of the same lexeme possible.
pub fn calculate_boundary_points(ls: &LexemeSet, suffix: &str) -> BoundaryTable {
    let chars: Vec<u32> = suffix.chars().map(|c| c as u32).collect();
    let len = chars.len();
    let mut steps = 0usize;
    let mut boundaries: BTreeMap<usize, BTreeMap<LexemeId, BTreeSet<StateId>>> = BTreeMap::new();
    for (g, nfa) in ls.automata.iter().enumerate() {
        // Position 0 = the boundary. A symbol begun to the left has taken
        // at least one transition, so the possible states are the
        // successors of any state (pruned automata are fully reachable).
        let all: BTreeSet<StateId> = (0..nfa.state_count()).collect();
        let mut here = BTreeSet::new();
        for &c in &ls.alphabet {
            here.extend(nfa.step(&all, c));
            steps += 1;
        }
        let mut states = vec![here];
        for i in 0..len {
            let s = nfa.step(&states[i], chars[i]);
            steps += 1;
            states.push(s);
        }
        // Walk backwards maintaining, per completion index `end`, the
        // states at the current position that reach a final through
        // suffix[pos..end]; newly-final positions seed their own entry and
        // states that also complete at a larger index are dropped.
        let mut active: BTreeMap<usize, BTreeSet<StateId>> = BTreeMap::new();
        if len > 0 {
            let fin: BTreeSet<StateId> =
                states[len].intersection(&nfa.finals).copied().collect();
            if !fin.is_empty() {
                active.insert(len, fin);
            }
        }
        for idx in (0..len).rev() {
            let mut next: BTreeMap<usize, BTreeSet<StateId>> = BTreeMap::new();
            for (&end, set) in &active {
                let back = nfa.step_back(set, chars[idx]);
                steps += 1;
                if !back.is_empty() {
                    next.insert(end, back);
                }
            }
            if idx != 0 {
                let fin: BTreeSet<StateId> =
                    states[idx].intersection(&nfa.finals).copied().collect();
                if !fin.is_empty() {
                    next.entry(idx).or_default().extend(fin);
                }
            }
            let mut seen: BTreeSet<StateId> = BTreeSet::new();
            active = BTreeMap::new();
            for (&end, set) in next.iter().rev() {
                let kept: BTreeSet<StateId> = set.difference(&seen).copied().collect();
                seen.extend(kept.iter().copied());
                if !kept.is_empty() {
                    active.insert(end, kept);
                }
            }
        }
        for (end, set) in active {
            // Only states actually reachable mid-symbol can sit at the
            // boundary; back-propagation may surface others (e.g. the
            // initial state), which no in-progress symbol can occupy.
            let set: BTreeSet<StateId> = set.intersection(&states[0]).copied().collect();
            if !set.is_empty() {
                boundaries.entry(end).or_default().insert(g, set);
            }
        }
    }
    BoundaryTable { boundaries, step_calls: steps }
}

pub struct Sublanguage {
    /// Characters of the suffix consumed by the boundary-spanning symbol;
    /// 0 means the text ends exactly on a symbol boundary.
    pub skip: usize,
    /// Right quotient of the (last-symbol-constrained, when skip > 0)
    /// symbol grammar by the lexed remainder of the suffix.
    pub grammar: Rc<Grammar>,
    pub env: LexerEnv,
    /// Per-lexeme boundary states; empty for skip = 0.
    pub boundary: BTreeMap<LexemeId, BTreeSet<StateId>>,
    /// The filtered symbol stream of the suffix past the boundary.
    pub remainder: Vec<SymId>,
}

/// Build the surviving sublanguages for a suffix: skip 0 plus one per
/// boundary index, minus those whose remainder does not lex or whose
/// quotient is empty.
pub fn build_sublanguages(
    g: &Grammar,
    ls: &LexemeSet,
    bt: &BoundaryTable,
    suffix: &str,
    mode: LexMode,
) -> Vec<Sublanguage> {
    let chars: Vec<char> = suffix.chars().collect();
    let mut out = Vec::new();
    let mut skips: Vec<(usize, BTreeMap<LexemeId, BTreeSet<StateId>>)> =
        vec![(0, BTreeMap::new())];
    for (&n, states) in &bt.boundaries {
        skips.push((n, states.clone()));
    }
    for (skip, boundary) in skips {
        let rest: String = chars[skip..].iter().collect();
        let Ok(stream) = batch_lex(ls, &rest, mode) else {
            continue;
        };
        let mut remainder: Vec<SymId> = Vec::new();
        let mut ok = true;
        for &(lx, _, _) in &stream {
            if ls.specs[lx].ignored {
                continue;
            }
            match g.symbol_id(&ls.specs[lx].name).filter(|&t| g.is_terminal(t)) {
                Some(t) => remainder.push(t),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let alphabet: BTreeSet<u32> = g.terminals().collect();
        let r = Nfa::from_string(&remainder, &alphabet);
        let mut q = right_quotient(g, &r);
        // The text's own symbol stream ends with the boundary-spanning
        // symbol, so constrain the quotient language to end in a lexeme
        // that can span here. An ignored spanning lexeme is filtered from
        // the stream and leaves it unconstrained, so the constraint only
        // applies when every spanning candidate is a real terminal.
        let all_terminal = boundary.keys().all(|&lx| !ls.specs[lx].ignored);
        if skip > 0 && all_terminal {
            let sigma_end: BTreeSet<SymId> = boundary
                .keys()
                .filter_map(|&lx| q.symbol_id(&ls.specs[lx].name).filter(|&t| q.is_terminal(t)))
                .collect();
            if sigma_end.is_empty() {
                continue;
            }
            q = q.constrain_last_symbol(&sigma_end);
        }
        if q.check_inhabited().contains(&q.start) {
            continue;
        }
        let env = LexerEnv::bind(ls.clone(), &q);
        out.push(Sublanguage { skip, grammar: Rc::new(q), env, boundary, remainder });
    }
    out
}

impl Sublanguage {
    /// A fresh lexer branch over this sublanguage's quotient grammar.
    pub fn open_branch(&self, mode: LexMode, id: u64) -> LexerBranch {
        init_branch(&self.env, init_state(Rc::clone(&self.grammar)), mode, id)
    }
}

/// Could the branch's symbol-in-progress complete by consuming at least
/// `min_end` suffix characters? Used as the longest-symbol guard: a claim
/// at boundary n fails if any lexeme could span past n.
pub fn spanning_possible(
    bt: &BoundaryTable,
    active: &[BTreeSet<StateId>],
    min_end: usize,
) -> bool {
    bt.boundaries.iter().filter(|(&end, _)| end >= min_end).any(|(_, per_lexeme)| {
        per_lexeme
            .iter()
            .any(|(&g, states)| active[g].iter().any(|s| states.contains(s)))
    })
}

/// Membership of the accumulated text in one sublanguage, per its branch
/// state. For skip = 0 with an empty symbol-in-progress the caller must
/// separately rule out a sibling branch whose in-progress symbol spans the
/// boundary (the fork that kept lexing past this branch's emission).
pub fn membership_in_sublanguage(
    sub: &Sublanguage,
    bt: &BoundaryTable,
    b: &LexerBranch,
) -> bool {
    let env = &sub.env;
    if sub.skip == 0 {
        if b.sip_len == 0 {
            return is_member(&b.parse);
        }
        // The whole symbol-in-progress must be one finished emittable
        // lexeme that cannot be extended by the suffix.
        match b.last_fin {
            Some((h, len)) if len == b.sip_len && emit_gate(env, b, h) => {
                if spanning_possible(bt, &b.active, 1) {
                    return false;
                }
                if env.lexemes.specs[h].ignored {
                    is_member(&b.parse)
                } else {
                    let t = match env.term_of[h] {
                        Some(t) => t,
                        None => return false,
                    };
                    is_member(&accumulate(&b.parse, t))
                }
            }
            _ => false,
        }
    } else {
        if b.sip_len == 0 {
            return false;
        }
        let candidates: Vec<LexemeId> = sub
            .boundary
            .iter()
            .filter(|(&g, states)| b.active[g].iter().any(|s| states.contains(s)))
            .map(|(&g, _)| g)
            .collect();
        let Some(&h) =
            candidates.iter().max_by_key(|&&g| env.lexemes.specs[g].precedence)
        else {
            return false;
        };
        if spanning_possible(bt, &b.active, sub.skip + 1) {
            return false;
        }
        if env.lexemes.specs[h].ignored {
            is_member(&b.parse)
        } else {
            match env.term_of[h] {
                Some(t) => is_member(&accumulate(&b.parse, t)),
                None => false,
            }
        }
    }
}

/// The optional strict liveness refinement for grammars where a symbol
/// cannot always be finished and a fresh one begun: some boundary state
/// must be reachable from a live in-progress state.
pub fn boundary_reachable(sub: &Sublanguage, b: &LexerBranch) -> bool {
    if sub.skip == 0 {
        return true;
    }
    sub.boundary.iter().any(|(&g, targets)| {
        let nfa = &sub.env.lexemes.automata[g];
        let mut seen = b.active[g].clone();
        let mut frontier: Vec<StateId> = seen.iter().copied().collect();
        while let Some(s) = frontier.pop() {
            if targets.contains(&s) {
                return true;
            }
            for dests in nfa.trans[s].values() {
                for &d in dests {
                    if seen.insert(d) {
                        frontier.push(d);
                    }
                }
            }
        }
        b.active[g].iter().any(|s| targets.contains(s))
    })
}
