//! Context-free grammars: loading, validation, reversal, last-symbol
//! constraining, inhabitedness.
//!
//! Symbols are dense integer ids assigned at load time; names live in a side
//! table and are only consulted for diagnostics and dumps. Terminal and
//! nonterminal ids share one id space but the two sets are disjoint.

use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

pub type SymId = u32;

/// A sequence of grammar symbols; may be empty.
pub type SymbolString = Vec<SymId>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub lhs: SymId,
    pub rhs: SymbolString,
}

#[derive(Debug, Clone)]
pub struct Grammar {
    names: Vec<String>,
    is_nonterminal: Vec<bool>,
    pub rules: Vec<Rule>,
    pub start: SymId,
    /// Rule indices grouped by lhs, indexed by symbol id (empty for terminals).
    rules_by_lhs: Vec<Vec<usize>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrammarError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("symbol `{0}` used as both terminal and nonterminal")]
    SymbolKind(String),
    #[error("grammar has no rules")]
    Empty,
}

impl Grammar {
    /// Build a grammar from explicit parts, computing the lhs index.
    /// `is_nonterminal` must be true exactly for symbols appearing as an lhs
    /// (plus any deliberately rule-less nonterminals, which derive nothing).
    pub fn from_parts(
        names: Vec<String>,
        is_nonterminal: Vec<bool>,
        rules: Vec<Rule>,
        start: SymId,
    ) -> Grammar {
        let mut rules_by_lhs = vec![Vec::new(); names.len()];
        for (i, r) in rules.iter().enumerate() {
            rules_by_lhs[r.lhs as usize].push(i);
        }
        Grammar { names, is_nonterminal, rules, start, rules_by_lhs }
    }

    /// Parse the textual grammar format: `LHS: sym sym ... ;` statements,
    /// `|` for alternatives, empty rhs allowed, `#` line comments. The first
    /// statement's lhs is the start symbol; symbols never used as an lhs are
    /// terminals.
    pub fn load(text: &str) -> Result<Grammar, GrammarError> {
        #[derive(Debug, PartialEq)]
        enum Tok {
            Sym(String),
            Colon,
            Semi,
            Pipe,
        }
        let mut toks: Vec<(usize, Tok)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap();
            let mut cur = String::new();
            let flush = |cur: &mut String, toks: &mut Vec<(usize, Tok)>| {
                if !cur.is_empty() {
                    toks.push((lineno + 1, Tok::Sym(std::mem::take(cur))));
                }
            };
            for c in line.chars() {
                match c {
                    ':' => {
                        flush(&mut cur, &mut toks);
                        toks.push((lineno + 1, Tok::Colon));
                    }
                    ';' => {
                        flush(&mut cur, &mut toks);
                        toks.push((lineno + 1, Tok::Semi));
                    }
                    '|' => {
                        flush(&mut cur, &mut toks);
                        toks.push((lineno + 1, Tok::Pipe));
                    }
                    c if c.is_whitespace() => flush(&mut cur, &mut toks),
                    c => cur.push(c),
                }
            }
            flush(&mut cur, &mut toks);
        }

        struct Raw {
            lhs: String,
            alts: Vec<Vec<String>>,
        }
        let mut stmts: Vec<Raw> = Vec::new();
        let mut i = 0;
        while i < toks.len() {
            let (line, t) = &toks[i];
            let lhs = match t {
                Tok::Sym(s) => s.clone(),
                _ => {
                    return Err(GrammarError::Parse {
                        line: *line,
                        msg: "expected rule name".into(),
                    })
                }
            };
            i += 1;
            match toks.get(i) {
                Some((_, Tok::Colon)) => i += 1,
                _ => {
                    return Err(GrammarError::Parse {
                        line: *line,
                        msg: format!("expected `:` after `{lhs}`"),
                    })
                }
            }
            let mut alts = vec![Vec::new()];
            loop {
                match toks.get(i) {
                    Some((_, Tok::Sym(s))) => {
                        alts.last_mut().unwrap().push(s.clone());
                        i += 1;
                    }
                    Some((_, Tok::Pipe)) => {
                        alts.push(Vec::new());
                        i += 1;
                    }
                    Some((_, Tok::Semi)) => {
                        i += 1;
                        break;
                    }
                    Some((l, Tok::Colon)) => {
                        return Err(GrammarError::Parse {
                            line: *l,
                            msg: "unexpected `:` inside rule body".into(),
                        })
                    }
                    None => {
                        return Err(GrammarError::Parse {
                            line: *line,
                            msg: format!("rule `{lhs}` not terminated by `;`"),
                        })
                    }
                }
            }
            stmts.push(Raw { lhs, alts });
        }
        if stmts.is_empty() {
            return Err(GrammarError::Empty);
        }

        let mut ids: HashMap<String, SymId> = HashMap::new();
        let mut names: Vec<String> = Vec::new();
        let intern = |s: &str, ids: &mut HashMap<String, SymId>, names: &mut Vec<String>| {
            *ids.entry(s.to_string()).or_insert_with(|| {
                names.push(s.to_string());
                (names.len() - 1) as SymId
            })
        };
        // Intern lhs names first so nonterminal ids cluster low.
        for s in &stmts {
            intern(&s.lhs, &mut ids, &mut names);
        }
        let nt_count = names.len();
        let mut rules = Vec::new();
        for s in &stmts {
            let lhs = ids[&s.lhs];
            for alt in &s.alts {
                let rhs = alt
                    .iter()
                    .map(|sym| intern(sym, &mut ids, &mut names))
                    .collect();
                rules.push(Rule { lhs, rhs });
            }
        }
        let mut is_nonterminal = vec![false; names.len()];
        for id in 0..nt_count {
            is_nonterminal[id] = true;
        }
        let start = ids[&stmts[0].lhs];
        Ok(Grammar::from_parts(names, is_nonterminal, rules, start))
    }

    pub fn symbol_count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, s: SymId) -> &str {
        &self.names[s as usize]
    }

    pub fn is_nonterminal(&self, s: SymId) -> bool {
        self.is_nonterminal[s as usize]
    }

    pub fn is_terminal(&self, s: SymId) -> bool {
        !self.is_nonterminal[s as usize]
    }

    pub fn nonterminals(&self) -> impl Iterator<Item = SymId> + '_ {
        (0..self.names.len() as SymId).filter(|&s| self.is_nonterminal(s))
    }

    pub fn terminals(&self) -> impl Iterator<Item = SymId> + '_ {
        (0..self.names.len() as SymId).filter(|&s| self.is_terminal(s))
    }

    pub fn symbol_id(&self, name: &str) -> Option<SymId> {
        self.names.iter().position(|n| n == name).map(|i| i as SymId)
    }

    pub fn rules_for(&self, nt: SymId) -> &[usize] {
        &self.rules_by_lhs[nt as usize]
    }

    /// Nonterminals with no terminating expansion. Empty means every rule can
    /// ground out in terminals; callers reject grammars for parsing otherwise.
    pub fn check_inhabited(&self) -> BTreeSet<SymId> {
        let mut inhabited = vec![false; self.names.len()];
        for t in self.terminals() {
            inhabited[t as usize] = true;
        }
        loop {
            let mut changed = false;
            for r in &self.rules {
                if !inhabited[r.lhs as usize]
                    && r.rhs.iter().all(|&s| inhabited[s as usize])
                {
                    inhabited[r.lhs as usize] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.nonterminals()
            .filter(|&n| !inhabited[n as usize])
            .collect()
    }

    /// Reverse the grammar's language by reversing every rule's rhs.
    pub fn reverse(&self) -> Grammar {
        let rules = self
            .rules
            .iter()
            .map(|r| Rule {
                lhs: r.lhs,
                rhs: r.rhs.iter().rev().copied().collect(),
            })
            .collect();
        Grammar::from_parts(
            self.names.clone(),
            self.is_nonterminal.clone(),
            rules,
            self.start,
        )
    }

    /// Restrict the language to non-empty strings whose last symbol is in
    /// `sigma_end`. Adds a starred copy of each nonterminal: the starred
    /// variant derives exactly the suitably-ending strings, and original
    /// rules are retained so interior nonterminals keep their full languages.
    /// The result never derives the empty string.
    pub fn constrain_last_symbol(&self, sigma_end: &BTreeSet<SymId>) -> Grammar {
        let n = self.names.len();
        let mut names = self.names.clone();
        let mut is_nonterminal = self.is_nonterminal.clone();
        let star = |s: SymId| s + n as SymId;
        for id in 0..n {
            names.push(format!("{}*", self.names[id]));
            is_nonterminal.push(self.is_nonterminal[id]);
        }
        // Nullable nonterminals, so a nullable tail can be forced to epsilon
        // and an earlier symbol can supply the final terminal.
        let mut nullable: BTreeSet<SymId> = BTreeSet::new();
        loop {
            let before = nullable.len();
            for r in &self.rules {
                if r.rhs.iter().all(|s| nullable.contains(s)) {
                    nullable.insert(r.lhs);
                }
            }
            if nullable.len() == before {
                break;
            }
        }
        let mut rules = self.rules.clone();
        let mut starred: BTreeSet<(SymId, SymbolString)> = BTreeSet::new();
        for r in &self.rules {
            for i in (0..r.rhs.len()).rev() {
                let sym = r.rhs[i];
                if self.is_terminal(sym) {
                    if sigma_end.contains(&sym) {
                        starred.insert((star(r.lhs), r.rhs[..=i].to_vec()));
                    }
                } else {
                    let mut rhs = r.rhs[..=i].to_vec();
                    *rhs.last_mut().unwrap() = star(sym);
                    starred.insert((star(r.lhs), rhs));
                }
                if !nullable.contains(&sym) {
                    break;
                }
            }
        }
        rules.extend(starred.into_iter().map(|(lhs, rhs)| Rule { lhs, rhs }));
        // Starred terminals get no rules and are unreachable; they exist only
        // to keep the id arithmetic uniform.
        Grammar::from_parts(names, is_nonterminal, rules, star(self.start))
    }

    /// Render in the loadable textual format, one rule per line, start first.
    pub fn dump(&self) -> String {
        let mut order: Vec<SymId> = vec![self.start];
        order.extend(self.nonterminals().filter(|&s| s != self.start));
        let mut out = String::new();
        for nt in order {
            for &ri in self.rules_for(nt) {
                let r = &self.rules[ri];
                out.push_str(self.name(r.lhs));
                out.push(':');
                for &s in &r.rhs {
                    out.push(' ');
                    out.push_str(self.name(s));
                }
                out.push_str(" ;\n");
            }
        }
        out
    }
}
