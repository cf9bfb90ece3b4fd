//! Reference implementations used as independent cross-checks in tests.
//!
//! Everything here trades efficiency for obviousness: bounded brute-force
//! enumeration, textbook CYK over a Chomsky-normal-form conversion, and
//! from-scratch batch runs. The engine modules never call into this module;
//! tests compare both routes on shared fixtures.

use crate::grammar::{Grammar, Rule, SymId, SymbolString};
use std::collections::{BTreeSet, HashMap, HashSet};

/// All terminal strings of length <= `max_len` derivable from each symbol,
/// computed by a grow-to-fixpoint iteration.
fn bounded_symbol_languages(g: &Grammar, max_len: usize) -> Vec<BTreeSet<SymbolString>> {
    let mut langs: Vec<BTreeSet<SymbolString>> = vec![BTreeSet::new(); g.symbol_count()];
    for t in g.terminals() {
        if max_len >= 1 {
            langs[t as usize].insert(vec![t]);
        }
    }
    loop {
        let mut changed = false;
        for r in &g.rules {
            // Combine the current languages of the rhs symbols, pruning by
            // total length.
            let mut acc: Vec<SymbolString> = vec![Vec::new()];
            for &s in &r.rhs {
                let mut next = Vec::new();
                for prefix in &acc {
                    for ext in &langs[s as usize] {
                        if prefix.len() + ext.len() <= max_len {
                            let mut w = prefix.clone();
                            w.extend_from_slice(ext);
                            next.push(w);
                        }
                    }
                }
                acc = next;
                if acc.is_empty() {
                    break;
                }
            }
            for w in acc {
                changed |= langs[r.lhs as usize].insert(w);
            }
        }
        if !changed {
            return langs;
        }
    }
}

/// Terminal strings of length <= `max_len` in L(g).
pub fn bounded_language(g: &Grammar, max_len: usize) -> BTreeSet<SymbolString> {
    bounded_symbol_languages(g, max_len)[g.start as usize].clone()
}

/// Whether some string in L(g) of length <= prefix.len() + slack starts with
/// `prefix`. With a slack that covers the grammar's shortest completions this
/// decides incremental parsability exactly.
pub fn is_bounded_prefix(g: &Grammar, prefix: &[SymId], slack: usize) -> bool {
    bounded_language(g, prefix.len() + slack)
        .iter()
        .any(|w| w.len() >= prefix.len() && w[..prefix.len()] == *prefix)
}

/// CYK membership oracle holding a prepared Chomsky-normal-form conversion,
/// so repeated queries against one grammar stay cheap.
pub struct CykOracle {
    cnf: Cnf,
}

impl CykOracle {
    pub fn new(g: &Grammar) -> CykOracle {
        CykOracle { cnf: Cnf::from_grammar(g) }
    }

    pub fn member(&self, s: &[SymId]) -> bool {
        cyk_run(&self.cnf, s)
    }

    /// Does some extension of length <= `k` over `alphabet` make `prefix` a
    /// member? Candidates are tried shortest-first.
    pub fn has_bounded_completion(&self, alphabet: &[SymId], prefix: &[SymId], k: usize) -> bool {
        let mut frontier: Vec<SymbolString> = vec![prefix.to_vec()];
        for _ in 0..=k {
            for w in &frontier {
                if self.member(w) {
                    return true;
                }
            }
            let mut next = Vec::new();
            for w in &frontier {
                for &c in alphabet {
                    let mut v = w.clone();
                    v.push(c);
                    next.push(v);
                }
            }
            frontier = next;
        }
        false
    }
}

/// CYK membership over an on-the-fly Chomsky-normal-form conversion.
pub fn cyk_member(g: &Grammar, s: &[SymId]) -> bool {
    CykOracle::new(g).member(s)
}

fn cyk_run(cnf: &Cnf, s: &[SymId]) -> bool {
    if s.is_empty() {
        return cnf.nullable_start;
    }
    let n = s.len();
    let k = cnf.nt_count;
    // table[i][j][a]: nonterminal a derives s[i..i+j+1].
    let mut table = vec![vec![vec![false; k]; n]; n];
    for (i, &c) in s.iter().enumerate() {
        if let Some(nts) = cnf.term_rules.get(&c) {
            for &a in nts {
                table[0][i][a] = true;
            }
        }
    }
    for span in 2..=n {
        for i in 0..=n - span {
            for split in 1..span {
                for &(a, b, c) in &cnf.bin_rules {
                    if table[split - 1][i][b] && table[span - split - 1][i + split][c] {
                        table[span - 1][i][a] = true;
                    }
                }
            }
        }
    }
    table[n - 1][0][cnf.start]
}

struct Cnf {
    nt_count: usize,
    start: usize,
    nullable_start: bool,
    /// terminal -> nonterminals deriving exactly that terminal
    term_rules: HashMap<SymId, Vec<usize>>,
    /// (a, b, c) meaning a -> b c
    bin_rules: Vec<(usize, usize, usize)>,
}

impl Cnf {
    fn from_grammar(g: &Grammar) -> Cnf {
        // Step 1: map grammar symbols to working ids. Nonterminals keep an
        // id; each terminal also gets a proxy nonterminal.
        let mut id_of: HashMap<SymId, usize> = HashMap::new();
        let mut next = 0usize;
        for nt in g.nonterminals() {
            id_of.insert(nt, next);
            next += 1;
        }
        let mut term_proxy: HashMap<SymId, usize> = HashMap::new();
        for t in g.terminals() {
            term_proxy.insert(t, next);
            next += 1;
        }

        // Step 2: binarize, rewriting rhs terminals to proxies.
        // rules as (lhs, rhs over working ids)
        let mut rules: Vec<(usize, Vec<usize>)> = Vec::new();
        for r in &g.rules {
            let rhs: Vec<usize> = r
                .rhs
                .iter()
                .map(|s| {
                    if g.is_nonterminal(*s) {
                        id_of[s]
                    } else {
                        term_proxy[s]
                    }
                })
                .collect();
            rules.push((id_of[&r.lhs], rhs));
        }
        let mut bin: Vec<(usize, Vec<usize>)> = Vec::new();
        for (lhs, rhs) in rules {
            if rhs.len() <= 2 {
                bin.push((lhs, rhs));
            } else {
                let mut cur = lhs;
                for i in 0..rhs.len() - 2 {
                    let fresh = next;
                    next += 1;
                    bin.push((cur, vec![rhs[i], fresh]));
                    cur = fresh;
                }
                bin.push((cur, vec![rhs[rhs.len() - 2], rhs[rhs.len() - 1]]));
            }
        }
        // Proxy rules: proxy -> terminal (kept separately as "derives char").
        let terminal_of_proxy: HashMap<usize, SymId> =
            term_proxy.iter().map(|(&t, &p)| (p, t)).collect();

        // Step 3: nullable set over working ids (proxies never nullable).
        let mut nullable: HashSet<usize> = HashSet::new();
        loop {
            let before = nullable.len();
            for (lhs, rhs) in &bin {
                if rhs.iter().all(|x| nullable.contains(x)) {
                    nullable.insert(*lhs);
                }
            }
            if nullable.len() == before {
                break;
            }
        }

        // Step 4: ε-elimination — for each rule, add variants dropping
        // nullable symbols; drop now-empty rules.
        let mut no_eps: HashSet<(usize, Vec<usize>)> = HashSet::new();
        for (lhs, rhs) in &bin {
            let subsets: Vec<Vec<usize>> = match rhs.len() {
                0 => vec![],
                1 => vec![rhs.clone()],
                2 => {
                    let mut v = vec![rhs.clone()];
                    if nullable.contains(&rhs[0]) {
                        v.push(vec![rhs[1]]);
                    }
                    if nullable.contains(&rhs[1]) {
                        v.push(vec![rhs[0]]);
                    }
                    v
                }
                _ => unreachable!(),
            };
            for v in subsets {
                no_eps.insert((*lhs, v));
            }
        }

        // Step 5: unit-rule elimination via unit-closure.
        let mut unit_reach: HashMap<usize, HashSet<usize>> = HashMap::new();
        let all_ids: HashSet<usize> = no_eps
            .iter()
            .flat_map(|(l, r)| std::iter::once(*l).chain(r.iter().copied()))
            .chain(terminal_of_proxy.keys().copied())
            .collect();
        for &a in &all_ids {
            unit_reach.entry(a).or_default().insert(a);
        }
        loop {
            let mut changed = false;
            for (lhs, rhs) in &no_eps {
                if rhs.len() == 1 {
                    let targets: Vec<usize> = unit_reach
                        .get(&rhs[0])
                        .map(|s| s.iter().copied().collect())
                        .unwrap_or_default();
                    let entry = unit_reach.entry(*lhs).or_default();
                    for t in targets {
                        changed |= entry.insert(t);
                    }
                }
            }
            if !changed {
                break;
            }
        }

        let mut term_rules: HashMap<SymId, Vec<usize>> = HashMap::new();
        let mut bin_rules: Vec<(usize, usize, usize)> = Vec::new();
        let mut seen_bin: HashSet<(usize, usize, usize)> = HashSet::new();
        for (&a, reach) in &unit_reach {
            for &u in reach {
                // u's non-unit productions become a's.
                if let Some(&t) = terminal_of_proxy.get(&u) {
                    term_rules.entry(t).or_default().push(a);
                }
                for (lhs, rhs) in &no_eps {
                    if *lhs == u && rhs.len() == 2 {
                        let key = (a, rhs[0], rhs[1]);
                        if seen_bin.insert(key) {
                            bin_rules.push(key);
                        }
                    }
                }
            }
        }
        for v in term_rules.values_mut() {
            v.sort_unstable();
            v.dedup();
        }

        let start = id_of[&g.start];
        Cnf {
            nt_count: next,
            start,
            nullable_start: nullable.contains(&start),
            term_rules,
            bin_rules,
        }
    }
}

/// Inhabitedness by direct fixpoint on "all rhs symbols inhabited implies
/// lhs inhabited"; returns the uninhabited nonterminals. Written separately
/// from `Grammar::check_inhabited` on purpose as the independent route.
pub fn fixpoint_uninhabited(g: &Grammar) -> BTreeSet<SymId> {
    let mut known: HashSet<SymId> = g.terminals().collect();
    let mut grew = true;
    while grew {
        grew = false;
        for r in &g.rules {
            if !known.contains(&r.lhs) && r.rhs.iter().all(|s| known.contains(s)) {
                known.insert(r.lhs);
                grew = true;
            }
        }
    }
    g.nonterminals().filter(|n| !known.contains(n)).collect()
}

/// Classic from-scratch Earley recognizer, used as the chart oracle. Charts
/// are plain item sets indexed 0..=n; no incremental machinery shared with
/// the engine.
pub fn classic_earley_charts(g: &Grammar, input: &[SymId]) -> Vec<BTreeSet<(usize, usize, usize)>> {
    // item = (rule index, dot, origin)
    let n = input.len();
    let mut charts: Vec<BTreeSet<(usize, usize, usize)>> = vec![BTreeSet::new(); n + 1];
    for &ri in g.rules_for(g.start) {
        charts[0].insert((ri, 0, 0));
    }
    for i in 0..=n {
        loop {
            let mut additions: Vec<(usize, usize, usize)> = Vec::new();
            let snapshot: Vec<_> = charts[i].iter().copied().collect();
            for (ri, dot, origin) in snapshot {
                let rhs = &g.rules[ri].rhs;
                if dot < rhs.len() {
                    let next_sym = rhs[dot];
                    if g.is_nonterminal(next_sym) {
                        for &pr in g.rules_for(next_sym) {
                            additions.push((pr, 0, i));
                        }
                    }
                } else {
                    // complete: find items in chart `origin` awaiting lhs
                    let lhs = g.rules[ri].lhs;
                    let parent_items: Vec<_> = charts[origin].iter().copied().collect();
                    for (pri, pdot, porig) in parent_items {
                        let prhs = &g.rules[pri].rhs;
                        if pdot < prhs.len() && prhs[pdot] == lhs {
                            additions.push((pri, pdot + 1, porig));
                        }
                    }
                }
            }
            let before = charts[i].len();
            for a in additions {
                charts[i].insert(a);
            }
            if charts[i].len() == before {
                break;
            }
        }
        if i < n {
            let c = input[i];
            let scans: Vec<_> = charts[i]
                .iter()
                .filter(|(ri, dot, _)| {
                    let rhs = &g.rules[*ri].rhs;
                    *dot < rhs.len() && rhs[*dot] == c
                })
                .map(|&(ri, dot, origin)| (ri, dot + 1, origin))
                .collect();
            for s in scans {
                charts[i + 1].insert(s);
            }
        }
    }
    charts
}

/// Build a small random grammar for property fixtures. Deterministic in the
/// provided integer stream.
pub fn random_grammar(rand: &mut impl FnMut(usize) -> usize, max_rules: usize) -> Grammar {
    let nt_names = ["S", "A", "B"];
    let t_names = ["a", "b"];
    let nts = 1 + rand(nt_names.len());
    let mut names: Vec<String> = nt_names[..nts].iter().map(|s| s.to_string()).collect();
    names.extend(t_names.iter().map(|s| s.to_string()));
    let mut is_nt = vec![true; nts];
    is_nt.extend([false, false]);
    let total = names.len();
    let nrules = 1 + rand(max_rules);
    let mut rules = Vec::new();
    for _ in 0..nrules {
        let lhs = rand(nts) as SymId;
        let len = rand(4);
        let rhs: SymbolString = (0..len).map(|_| rand(total) as SymId).collect();
        rules.push(Rule { lhs, rhs });
    }
    // Guarantee each nonterminal has at least one rule so validation-style
    // assumptions hold; grammars may still be uninhabited and callers filter.
    for nt in 0..nts as SymId {
        if !rules.iter().any(|r| r.lhs == nt) {
            rules.push(Rule { lhs: nt, rhs: vec![nts as SymId] });
        }
    }
    Grammar::from_parts(names, is_nt, rules, 0)
}

/// Backtracking matcher directly over the pattern AST; the independent route
/// checked against NFA simulation.
pub fn pattern_matches(pat: &crate::nfa::Pattern, input: &[u32]) -> bool {
    fn go(pat: &crate::nfa::Pattern, input: &[u32], from: usize, k: &mut dyn FnMut(usize) -> bool) -> bool {
        use crate::nfa::Pattern::*;
        match pat {
            Class(set) => {
                from < input.len() && set.contains(&input[from]) && k(from + 1)
            }
            Concat(ps) => {
                fn seq(
                    ps: &[crate::nfa::Pattern],
                    input: &[u32],
                    from: usize,
                    k: &mut dyn FnMut(usize) -> bool,
                ) -> bool {
                    match ps.split_first() {
                        None => k(from),
                        Some((head, rest)) => go(head, input, from, &mut |next| {
                            seq(rest, input, next, k)
                        }),
                    }
                }
                seq(ps, input, from, k)
            }
            Alt(ps) => ps.iter().any(|p| go(p, input, from, k)),
            Repeat(p, min, max) => {
                fn reps(
                    p: &crate::nfa::Pattern,
                    input: &[u32],
                    from: usize,
                    done: u32,
                    min: u32,
                    max: Option<u32>,
                    k: &mut dyn FnMut(usize) -> bool,
                ) -> bool {
                    if done >= min && k(from) {
                        return true;
                    }
                    if max.map(|m| done >= m).unwrap_or(false) {
                        return false;
                    }
                    go(p, input, from, &mut |next| {
                        // Insist on progress so `(a?)*` terminates.
                        next > from && reps(p, input, next, done + 1, min, max, k)
                    }) || (p.accepts_empty() && done < min && {
                        // ε-iterations satisfy any remaining minimum at once.
                        let mut k2 = |f| k(f);
                        k2(from)
                    })
                }
                reps(p, input, from, 0, *min, *max, k)
            }
        }
    }
    go(pat, input, 0, &mut |end| end == input.len())
        || (input.is_empty() && pat.accepts_empty())
}
