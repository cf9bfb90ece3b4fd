//! NFAs over an integer symbol alphabet, plus the small regex dialect used
//! for lexeme patterns and the programmatic pattern constructor used for
//! symbol-level languages.
//!
//! The same machinery serves two alphabets: character codes (lexeme
//! automata) and grammar symbol ids (right-context abstractions), so symbols
//! are plain `u32` throughout.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

pub type StateId = usize;

#[derive(Debug, Clone)]
pub struct Nfa {
    pub alphabet: BTreeSet<u32>,
    pub initial: StateId,
    /// Indexed by state id.
    pub trans: Vec<BTreeMap<u32, BTreeSet<StateId>>>,
    pub finals: BTreeSet<StateId>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegexError {
    #[error("offset {0}: {1}")]
    At(usize, String),
}

/// Pattern AST shared by the textual regex parser and programmatic builders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    /// Any one symbol from the set.
    Class(BTreeSet<u32>),
    Concat(Vec<Pattern>),
    Alt(Vec<Pattern>),
    /// min..=max copies; `None` max means unbounded.
    Repeat(Box<Pattern>, u32, Option<u32>),
}

impl Pattern {
    pub fn sym(s: u32) -> Pattern {
        Pattern::Class([s].into())
    }

    pub fn literal(syms: &[u32]) -> Pattern {
        Pattern::Concat(syms.iter().map(|&s| Pattern::sym(s)).collect())
    }

    pub fn accepts_empty(&self) -> bool {
        match self {
            Pattern::Class(_) => false,
            Pattern::Concat(ps) => ps.iter().all(|p| p.accepts_empty()),
            Pattern::Alt(ps) => ps.iter().any(|p| p.accepts_empty()),
            Pattern::Repeat(p, min, _) => *min == 0 || p.accepts_empty(),
        }
    }
}

/// Parse the supported regex dialect: literals, escapes, `[...]` classes
/// with ranges and `^` negation, `.`, `|`, `(...)`, `?`, `*`, `+`, `{m}`,
/// `{m,n}`. Negated classes and `.` expand against `alphabet`.
pub fn parse_regex(src: &str, alphabet: &BTreeSet<u32>) -> Result<Pattern, RegexError> {
    let chars: Vec<char> = src.chars().collect();
    let mut p = Parser { chars: &chars, pos: 0, alphabet };
    let pat = p.alternation()?;
    if p.pos != p.chars.len() {
        return Err(RegexError::At(p.pos, "unexpected trailing input".into()));
    }
    Ok(pat)
}

struct Parser<'a> {
    chars: &'a [char],
    pos: usize,
    alphabet: &'a BTreeSet<u32>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn alternation(&mut self) -> Result<Pattern, RegexError> {
        let mut alts = vec![self.concat()?];
        while self.peek() == Some('|') {
            self.bump();
            alts.push(self.concat()?);
        }
        Ok(if alts.len() == 1 { alts.pop().unwrap() } else { Pattern::Alt(alts) })
    }

    fn concat(&mut self) -> Result<Pattern, RegexError> {
        let mut parts = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            parts.push(self.repeat()?);
        }
        Ok(Pattern::Concat(parts))
    }

    fn repeat(&mut self) -> Result<Pattern, RegexError> {
        let mut base = self.atom()?;
        loop {
            match self.peek() {
                Some('?') => {
                    self.bump();
                    base = Pattern::Repeat(Box::new(base), 0, Some(1));
                }
                Some('*') => {
                    self.bump();
                    base = Pattern::Repeat(Box::new(base), 0, None);
                }
                Some('+') => {
                    self.bump();
                    base = Pattern::Repeat(Box::new(base), 1, None);
                }
                Some('{') => {
                    self.bump();
                    let start = self.pos;
                    let mut body = String::new();
                    while let Some(c) = self.peek() {
                        if c == '}' {
                            break;
                        }
                        body.push(c);
                        self.bump();
                    }
                    if self.bump() != Some('}') {
                        return Err(RegexError::At(start, "unterminated `{`".into()));
                    }
                    let (min, max) = if let Some((lo, hi)) = body.split_once(',') {
                        let lo = lo.trim().parse::<u32>().map_err(|_| {
                            RegexError::At(start, "bad repetition bound".into())
                        })?;
                        let hi = if hi.trim().is_empty() {
                            None
                        } else {
                            Some(hi.trim().parse::<u32>().map_err(|_| {
                                RegexError::At(start, "bad repetition bound".into())
                            })?)
                        };
                        (lo, hi)
                    } else {
                        let n = body.trim().parse::<u32>().map_err(|_| {
                            RegexError::At(start, "bad repetition count".into())
                        })?;
                        (n, Some(n))
                    };
                    if let Some(m) = max {
                        if m < min {
                            return Err(RegexError::At(start, "max below min".into()));
                        }
                    }
                    base = Pattern::Repeat(Box::new(base), min, max);
                }
                _ => break,
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Pattern, RegexError> {
        let at = self.pos;
        match self.bump() {
            Some('(') => {
                let inner = self.alternation()?;
                if self.bump() != Some(')') {
                    return Err(RegexError::At(at, "unterminated `(`".into()));
                }
                Ok(inner)
            }
            Some('[') => self.class(at),
            Some('.') => {
                let set: BTreeSet<u32> =
                    self.alphabet.iter().copied().filter(|&c| c != '\n' as u32).collect();
                Ok(Pattern::Class(set))
            }
            Some('\\') => {
                let set = self.escape(at)?;
                Ok(Pattern::Class(set))
            }
            Some(c) if !"?*+{".contains(c) => Ok(Pattern::sym(c as u32)),
            Some(c) => Err(RegexError::At(at, format!("unexpected `{c}`"))),
            None => Err(RegexError::At(at, "unexpected end of pattern".into())),
        }
    }

    fn escape(&mut self, at: usize) -> Result<BTreeSet<u32>, RegexError> {
        let c = self
            .bump()
            .ok_or_else(|| RegexError::At(at, "dangling backslash".into()))?;
        let by_pred = |keep: &dyn Fn(char) -> bool, alphabet: &BTreeSet<u32>| {
            alphabet
                .iter()
                .copied()
                .filter(|&u| char::from_u32(u).map(|c| keep(c)).unwrap_or(false))
                .collect::<BTreeSet<u32>>()
        };
        Ok(match c {
            'd' => by_pred(&|c| c.is_ascii_digit(), self.alphabet),
            'D' => by_pred(&|c| !c.is_ascii_digit(), self.alphabet),
            'w' => by_pred(&|c| c.is_ascii_alphanumeric() || c == '_', self.alphabet),
            's' => by_pred(&|c| c.is_whitespace(), self.alphabet),
            'S' => by_pred(&|c| !c.is_whitespace(), self.alphabet),
            'n' => ['\n' as u32].into(),
            't' => ['\t' as u32].into(),
            'r' => ['\r' as u32].into(),
            'f' => ['\u{c}' as u32].into(),
            '0' => ['\0' as u32].into(),
            c => [c as u32].into(),
        })
    }

    fn class(&mut self, at: usize) -> Result<Pattern, RegexError> {
        let negated = self.peek() == Some('^');
        if negated {
            self.bump();
        }
        let mut set: BTreeSet<u32> = BTreeSet::new();
        let mut prev: Option<char> = None;
        loop {
            match self.bump() {
                None => return Err(RegexError::At(at, "unterminated `[`".into())),
                Some(']') => break,
                Some('\\') => {
                    let esc = self.escape(self.pos - 1)?;
                    // Multi-char escapes cannot anchor a range.
                    if esc.len() == 1 {
                        prev = char::from_u32(*esc.iter().next().unwrap());
                    } else {
                        prev = None;
                    }
                    set.extend(esc);
                }
                Some('-') if prev.is_some() && self.peek() != Some(']') => {
                    let lo = prev.take().unwrap();
                    let hi = self.bump().unwrap();
                    let hi = if hi == '\\' {
                        let esc = self.escape(self.pos - 1)?;
                        char::from_u32(*esc.iter().next().unwrap()).unwrap()
                    } else {
                        hi
                    };
                    if (hi as u32) < (lo as u32) {
                        return Err(RegexError::At(at, "reversed range".into()));
                    }
                    for u in lo as u32..=hi as u32 {
                        set.insert(u);
                    }
                }
                Some(c) => {
                    set.insert(c as u32);
                    prev = Some(c);
                }
            }
        }
        if negated {
            set = self.alphabet.difference(&set).copied().collect();
        }
        Ok(Pattern::Class(set))
    }
}

/// Thompson-style construction with ε-transitions, followed by
/// ε-elimination, unreachable/dead-state pruning, and a cheap merge of
/// behaviorally identical states.
impl Nfa {
    pub fn from_pattern(pat: &Pattern, alphabet: &BTreeSet<u32>) -> Nfa {
        let mut b = Builder { trans: Vec::new(), eps: Vec::new() };
        let (start, end) = b.compile(pat);
        b.finish(start, end, alphabet)
    }

    /// NFA accepting exactly the one given string (possibly ε).
    pub fn from_string(syms: &[u32], alphabet: &BTreeSet<u32>) -> Nfa {
        Nfa::from_pattern(&Pattern::literal(syms), alphabet)
    }

    pub fn accepting_epsilon_only(alphabet: &BTreeSet<u32>) -> Nfa {
        Nfa {
            alphabet: alphabet.clone(),
            initial: 0,
            trans: vec![BTreeMap::new()],
            finals: [0].into(),
        }
    }

    pub fn state_count(&self) -> usize {
        self.trans.len()
    }

    pub fn step(&self, states: &BTreeSet<StateId>, sym: u32) -> BTreeSet<StateId> {
        let mut out = BTreeSet::new();
        for &s in states {
            if let Some(ts) = self.trans[s].get(&sym) {
                out.extend(ts.iter().copied());
            }
        }
        out
    }

    pub fn accepts(&self, input: &[u32]) -> bool {
        let mut cur: BTreeSet<StateId> = [self.initial].into();
        for &c in input {
            cur = self.step(&cur, c);
            if cur.is_empty() {
                return false;
            }
        }
        cur.iter().any(|s| self.finals.contains(s))
    }

    /// States backward-reachable over one symbol: all p with p --sym--> q for
    /// some q in `states`.
    pub fn step_back(&self, states: &BTreeSet<StateId>, sym: u32) -> BTreeSet<StateId> {
        let mut out = BTreeSet::new();
        for (p, map) in self.trans.iter().enumerate() {
            if let Some(ts) = map.get(&sym) {
                if ts.iter().any(|q| states.contains(q)) {
                    out.insert(p);
                }
            }
        }
        out
    }

    /// Relabel the alphabet, e.g. character codes to grammar symbol ids.
    pub fn map_symbols(&self, f: impl Fn(u32) -> u32) -> Nfa {
        let trans = self
            .trans
            .iter()
            .map(|m| m.iter().map(|(&sym, ts)| (f(sym), ts.clone())).collect())
            .collect();
        Nfa {
            alphabet: self.alphabet.iter().map(|&s| f(s)).collect(),
            initial: self.initial,
            trans,
            finals: self.finals.clone(),
        }
    }

    /// Reverse the language: swap initial and finals. Multiple former finals
    /// become ε-alternatives of a fresh initial, then ε-elimination restores
    /// the single-initial shape.
    pub fn reverse(&self) -> Nfa {
        let n = self.trans.len();
        let mut b = Builder { trans: vec![BTreeMap::new(); n + 1], eps: vec![BTreeSet::new(); n + 1] };
        for (p, map) in self.trans.iter().enumerate() {
            for (&sym, qs) in map {
                for &q in qs {
                    b.trans[q].entry(sym).or_default().insert(p);
                }
            }
        }
        let fresh = n;
        for &f in &self.finals {
            b.eps[fresh].insert(f);
        }
        let mut nfa = b.finish_multi(fresh, &[self.initial].into(), &self.alphabet);
        // Reversal of an ε-accepting language must keep accepting ε.
        if self.finals.contains(&self.initial) {
            nfa.finals.insert(nfa.initial);
        }
        nfa
    }
}

struct Builder {
    trans: Vec<BTreeMap<u32, BTreeSet<StateId>>>,
    eps: Vec<BTreeSet<StateId>>,
}

impl Builder {
    fn fresh(&mut self) -> StateId {
        self.trans.push(BTreeMap::new());
        self.eps.push(BTreeSet::new());
        self.trans.len() - 1
    }

    fn compile(&mut self, pat: &Pattern) -> (StateId, StateId) {
        match pat {
            Pattern::Class(set) => {
                let s = self.fresh();
                let e = self.fresh();
                for &sym in set {
                    self.trans[s].entry(sym).or_default().insert(e);
                }
                (s, e)
            }
            Pattern::Concat(ps) => {
                let s = self.fresh();
                let mut cur = s;
                for p in ps {
                    let (ps_, pe) = self.compile(p);
                    self.eps[cur].insert(ps_);
                    cur = pe;
                }
                (s, cur)
            }
            Pattern::Alt(ps) => {
                let s = self.fresh();
                let e = self.fresh();
                for p in ps {
                    let (ps_, pe) = self.compile(p);
                    self.eps[s].insert(ps_);
                    self.eps[pe].insert(e);
                }
                (s, e)
            }
            Pattern::Repeat(p, min, max) => {
                let s = self.fresh();
                let mut cur = s;
                for _ in 0..*min {
                    let (ps_, pe) = self.compile(p);
                    self.eps[cur].insert(ps_);
                    cur = pe;
                }
                match max {
                    None => {
                        let (ps_, pe) = self.compile(p);
                        self.eps[cur].insert(ps_);
                        self.eps[pe].insert(cur);
                        (s, cur)
                    }
                    Some(m) => {
                        let e = self.fresh();
                        self.eps[cur].insert(e);
                        for _ in *min..*m {
                            let (ps_, pe) = self.compile(p);
                            self.eps[cur].insert(ps_);
                            self.eps[pe].insert(e);
                            cur = pe;
                        }
                        (s, e)
                    }
                }
            }
        }
    }

    fn finish(self, start: StateId, end: StateId, alphabet: &BTreeSet<u32>) -> Nfa {
        self.finish_multi(start, &[end].into(), alphabet)
    }

    fn finish_multi(
        self,
        start: StateId,
        finals: &BTreeSet<StateId>,
        alphabet: &BTreeSet<u32>,
    ) -> Nfa {
        let n = self.trans.len();
        // ε-closures.
        let mut closure: Vec<BTreeSet<StateId>> = Vec::with_capacity(n);
        for s in 0..n {
            let mut seen: BTreeSet<StateId> = [s].into();
            let mut stack = vec![s];
            while let Some(q) = stack.pop() {
                for &r in &self.eps[q] {
                    if seen.insert(r) {
                        stack.push(r);
                    }
                }
            }
            closure.push(seen);
        }
        // ε-elimination on the target side only: transition targets are
        // replaced by their ε-closures, so every reached set is already
        // closed and finality is membership in the original final set. The
        // initial state's closure is folded into one merged initial instead.
        let mut trans: Vec<BTreeMap<u32, BTreeSet<StateId>>> = vec![BTreeMap::new(); n];
        for s in 0..n {
            for (&sym, ts) in &self.trans[s] {
                let entry = trans[s].entry(sym).or_default();
                for &t in ts {
                    entry.extend(closure[t].iter().copied());
                }
            }
        }
        let mut fin: BTreeSet<StateId> = finals.clone();
        let initial = if closure[start].len() == 1 {
            start
        } else {
            let merged = n;
            let mut out: BTreeMap<u32, BTreeSet<StateId>> = BTreeMap::new();
            for &p in &closure[start] {
                for (&sym, ts) in &trans[p] {
                    out.entry(sym).or_default().extend(ts.iter().copied());
                }
            }
            trans.push(out);
            if closure[start].iter().any(|q| finals.contains(q)) {
                fin.insert(merged);
            }
            merged
        };
        let mut nfa = Nfa { alphabet: alphabet.clone(), initial, trans, finals: fin };
        nfa.prune();
        nfa.merge_identical();
        nfa
    }
}

impl Nfa {
    /// Drop states unreachable from the initial state or unable to reach a
    /// final state, renumbering the survivors. The initial state is always
    /// kept, even when the language is empty.
    pub fn prune(&mut self) {
        let n = self.trans.len();
        let mut fwd = vec![false; n];
        let mut stack = vec![self.initial];
        fwd[self.initial] = true;
        while let Some(s) = stack.pop() {
            for ts in self.trans[s].values() {
                for &t in ts {
                    if !fwd[t] {
                        fwd[t] = true;
                        stack.push(t);
                    }
                }
            }
        }
        let mut bwd = vec![false; n];
        let mut stack: Vec<StateId> = self.finals.iter().copied().collect();
        for &f in &self.finals {
            bwd[f] = true;
        }
        while let Some(s) = stack.pop() {
            for (p, map) in self.trans.iter().enumerate() {
                if !bwd[p] && map.values().any(|ts| ts.contains(&s)) {
                    bwd[p] = true;
                    stack.push(p);
                }
            }
        }
        let mut keep: Vec<StateId> = (0..n).filter(|&s| fwd[s] && bwd[s]).collect();
        if !keep.contains(&self.initial) {
            keep.push(self.initial);
            keep.sort_unstable();
        }
        let remap: HashMap<StateId, StateId> =
            keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let mut trans = vec![BTreeMap::new(); keep.len()];
        for (&old, &new) in &remap {
            for (&sym, ts) in &self.trans[old] {
                let mapped: BTreeSet<StateId> =
                    ts.iter().filter_map(|t| remap.get(t).copied()).collect();
                if !mapped.is_empty() {
                    trans[new].insert(sym, mapped);
                }
            }
        }
        self.finals = self.finals.iter().filter_map(|f| remap.get(f).copied()).collect();
        self.initial = remap[&self.initial];
        self.trans = trans;
    }

    /// Subset construction. The construction pipeline determinizes so that
    /// equivalent patterns compile to identical automata regardless of how
    /// the pattern was written; the inputs here are small enough that the
    /// worst-case blowup never materializes.
    pub fn determinize(&mut self) {
        use std::collections::VecDeque;
        let mut ids: HashMap<Vec<StateId>, StateId> = HashMap::new();
        let start: Vec<StateId> = vec![self.initial];
        ids.insert(start.clone(), 0);
        let mut subsets: Vec<Vec<StateId>> = vec![start.clone()];
        let mut trans: Vec<BTreeMap<u32, BTreeSet<StateId>>> = vec![BTreeMap::new()];
        let mut finals: BTreeSet<StateId> = BTreeSet::new();
        let mut queue: VecDeque<StateId> = [0].into();
        while let Some(id) = queue.pop_front() {
            let subset = subsets[id].clone();
            if subset.iter().any(|s| self.finals.contains(s)) {
                finals.insert(id);
            }
            let mut by_sym: BTreeMap<u32, BTreeSet<StateId>> = BTreeMap::new();
            for &s in &subset {
                for (&sym, ts) in &self.trans[s] {
                    by_sym.entry(sym).or_default().extend(ts.iter().copied());
                }
            }
            for (sym, target) in by_sym {
                let key: Vec<StateId> = target.into_iter().collect();
                let tid = match ids.get(&key) {
                    Some(&t) => t,
                    None => {
                        let t = subsets.len();
                        ids.insert(key.clone(), t);
                        subsets.push(key);
                        trans.push(BTreeMap::new());
                        queue.push_back(t);
                        t
                    }
                };
                trans[id].insert(sym, [tid].into());
            }
        }
        self.initial = 0;
        self.trans = trans;
        self.finals = finals;
        self.prune();
    }

    /// Merge states with identical outgoing transitions and finality until a
    /// fixpoint. Keeps the automaton small and diff-stable; not a minimizer.
    fn merge_identical(&mut self) {
        loop {
            let mut sig: HashMap<(bool, Vec<(u32, Vec<StateId>)>), StateId> = HashMap::new();
            let mut remap: HashMap<StateId, StateId> = HashMap::new();
            for s in 0..self.trans.len() {
                let key = (
                    self.finals.contains(&s),
                    self.trans[s]
                        .iter()
                        .map(|(&sym, ts)| (sym, ts.iter().copied().collect::<Vec<_>>()))
                        .collect::<Vec<_>>(),
                );
                match sig.get(&key) {
                    Some(&rep) => {
                        remap.insert(s, rep);
                    }
                    None => {
                        sig.insert(key, s);
                    }
                }
            }
            if remap.is_empty() {
                return;
            }
            let lookup = |s: StateId| *remap.get(&s).unwrap_or(&s);
            for map in &mut self.trans {
                for ts in map.values_mut() {
                    *ts = ts.iter().map(|&t| lookup(t)).collect();
                }
            }
            self.initial = lookup(self.initial);
            self.finals = self.finals.iter().map(|&f| lookup(f)).collect();
            self.prune();
        }
    }
}
