//! The fill-in-the-middle completion state machine: open with a left and
//! right context, advance one character at a time, and answer two questions
//! on demand: is the accumulated text still extendable to a member of the
//! quotient language, and may generation stop right now.
//!
//! A session is a union over (sublanguage, branch) pairs. Advancing is
//! functional: the original session stays queryable, and forking is a cheap
//! clone because parse charts are shared append-only.

use crate::grammar::Grammar;
use crate::lcfl::{
    build_sublanguages, calculate_boundary_points, membership_in_sublanguage,
    spanning_possible, BoundaryTable, Sublanguage,
};
use crate::lexer::{
    step_leftmost_longest, step_python_rule, LexMode, LexemeSet, LexerBranch, StepResult,
};
use crate::python3::{
    build_python_quotient, init_py_branch, py_membership, py_step, PyBranch, PythonBundle,
    PythonQuotient,
};
use std::collections::BTreeSet;
use std::rc::Rc;

/// Token-id to character-string expansion. Expansions are non-empty except
/// for the designated EOS token.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    pub tokens: Vec<String>,
    pub eos: usize,
}

impl Vocabulary {
    pub fn new(tokens: Vec<String>, eos: usize) -> Vocabulary {
        assert!(eos < tokens.len() && tokens[eos].is_empty());
        Vocabulary { tokens, eos }
    }
}

pub const DEFAULT_BRANCH_CAP: usize = 64;

enum Backend {
    Lcfl { subs: Vec<Sublanguage>, bt: BoundaryTable },
    Python { bundle: Rc<PythonBundle>, q: PythonQuotient },
}

#[derive(Clone)]
enum BranchState {
    Lcfl(LexerBranch),
    Py(PyBranch),
}

#[derive(Clone)]
pub struct Session {
    backend: Rc<Backend>,
    /// Live (sublanguage index, branch) pairs; empty = dead.
    branches: Vec<(usize, BranchState)>,
    /// Characters advanced since open.
    pub generation: String,
    /// Set when the branch cap forced a drop; results may then be
    /// incomplete (over-strict), never unsound.
    pub saturated: bool,
    cap: usize,
    next_id: u64,
}

impl Session {
    /// Open over an arbitrary grammar/lexeme bundle. The session may come
    /// back dead when the left context is already unparseable.
    pub fn open_lcfl(
        grammar: &Grammar,
        lexemes: &LexemeSet,
        mode: LexMode,
        left: &str,
        right: &str,
        cap: usize,
    ) -> Session {
        let bt = calculate_boundary_points(lexemes, right);
        let subs = build_sublanguages(grammar, lexemes, &bt, right, mode);
        let mut next_id = 0;
        let branches = subs
            .iter()
            .enumerate()
            .map(|(i, sub)| {
                let b = sub.open_branch(mode, next_id);
                next_id += 1;
                (i, BranchState::Lcfl(b))
            })
            .collect();
        let s = Session {
            backend: Rc::new(Backend::Lcfl { subs, bt }),
            branches,
            generation: String::new(),
            saturated: false,
            cap,
            next_id,
        };
        s.advance_str(left)
    }

    /// Open over the Python bundle.
    pub fn open_python(bundle: Rc<PythonBundle>, left: &str, right: &str, cap: usize) -> Session {
        let q = build_python_quotient(&bundle, right);
        let branches = q
            .subs
            .iter()
            .enumerate()
            .map(|(i, sub)| (i, BranchState::Py(init_py_branch(sub))))
            .collect();
        let s = Session {
            backend: Rc::new(Backend::Python { bundle, q }),
            branches,
            generation: String::new(),
            saturated: false,
            cap,
            next_id: 0,
        };
        s.advance_str(left)
    }

    pub fn alive(&self) -> bool {
        !self.branches.is_empty()
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    /// Number of sublanguages the right context produced at open.
    pub fn sublanguage_count(&self) -> usize {
        match &*self.backend {
            Backend::Lcfl { subs, .. } => subs.len(),
            Backend::Python { q, .. } => q.subs.len(),
        }
    }

    /// Step every branch on one character. The original session is left
    /// untouched; a dead result signals rejection of the character.
    pub fn advance(&self, c: char) -> Session {
        let mut next_id = self.next_id;
        let mut out: Vec<(usize, BranchState)> = Vec::new();
        match &*self.backend {
            Backend::Lcfl { subs, .. } => {
                let mut kills: BTreeSet<u64> = BTreeSet::new();
                for (si, st) in &self.branches {
                    let BranchState::Lcfl(b) = st else { unreachable!() };
                    let env = &subs[*si].env;
                    let r = match b.mode {
                        LexMode::LeftmostLongest => {
                            step_leftmost_longest(env, b, c, &mut next_id)
                        }
                        LexMode::PythonRule => StepResult {
                            survivors: step_python_rule(env, b, c).into_iter().collect(),
                            kills: Vec::new(),
                        },
                    };
                    out.extend(r.survivors.into_iter().map(|nb| (*si, BranchState::Lcfl(nb))));
                    kills.extend(r.kills);
                }
                out.retain(|(_, st)| {
                    let BranchState::Lcfl(b) = st else { unreachable!() };
                    !kills.contains(&b.id) && !b.lineage.iter().any(|a| kills.contains(a))
                });
            }
            Backend::Python { bundle, q } => {
                for (si, st) in &self.branches {
                    let BranchState::Py(b) = st else { unreachable!() };
                    if let Some(nb) = py_step(bundle, &q.subs[*si], b, c) {
                        out.push((*si, BranchState::Py(nb)));
                    }
                }
            }
        }
        let mut s = Session {
            backend: Rc::clone(&self.backend),
            branches: out,
            generation: format!("{}{}", self.generation, c),
            saturated: self.saturated,
            cap: self.cap,
            next_id,
        };
        if s.branches.len() > s.cap {
            s.branches.truncate(s.cap);
            s.saturated = true;
        }
        s
    }

    pub fn advance_str(&self, text: &str) -> Session {
        let mut s = self.clone();
        for c in text.chars() {
            s = s.advance(c);
            if !s.alive() {
                break;
            }
        }
        // Record the whole text even when it died partway.
        s.generation = format!("{}{}", self.generation, text);
        s
    }

    /// May generation stop here: some branch's accumulated text is a member
    /// of its sublanguage.
    pub fn may_stop(&self) -> bool {
        match &*self.backend {
            Backend::Lcfl { subs, bt } => {
                self.branches.iter().any(|(si, st)| {
                    let BranchState::Lcfl(b) = st else { unreachable!() };
                    let sub = &subs[*si];
                    if !membership_in_sublanguage(sub, bt, b) {
                        return false;
                    }
                    if sub.skip == 0 && b.sip_len == 0 {
                        // Leftmost-longest only: a sibling fork still lexing
                        // this branch's last symbol may span the boundary,
                        // in which case the longer match wins and stopping
                        // here would mis-lex.
                        let blocked = self.branches.iter().any(|(sj, stj)| {
                            let BranchState::Lcfl(x) = stj else { unreachable!() };
                            sj == si
                                && x.pending_emit() == Some(b.id)
                                && spanning_possible(bt, &x.active, 1)
                        });
                        if blocked {
                            return false;
                        }
                    }
                    true
                })
            }
            Backend::Python { bundle, q } => self.branches.iter().any(|(si, st)| {
                let BranchState::Py(b) = st else { unreachable!() };
                py_membership(bundle, &q.subs[*si], &q.bt, b)
            }),
        }
    }

    /// Allowed next tokens: those whose expansion keeps the session alive,
    /// plus EOS iff stopping is allowed. Each token is validated on a
    /// throwaway fork, so the session itself never mutates.
    pub fn token_mask(&self, v: &Vocabulary) -> BTreeSet<usize> {
        let mut mask = BTreeSet::new();
        if !self.alive() {
            return mask;
        }
        for (t, expansion) in v.tokens.iter().enumerate() {
            if t == v.eos {
                if self.may_stop() {
                    mask.insert(t);
                }
            } else if self.advance_str(expansion).alive() {
                mask.insert(t);
            }
        }
        mask
    }
}
