//! Left and right quotients of a CFG by a regular language.
//!
//! The recognizer maps every NFA state to an Earley chart and runs scan /
//! predict / complete to a fixpoint over that graph. Because the NFA may
//! have cycles, a complete item can land in a chart before the completable
//! item it should advance exists; each chart therefore keeps completion
//! triggers so the pairing fires in either arrival order. Every item records
//! how it came to exist (possibly several ways), and the extraction walk
//! traces those records backwards from the final-state charts to emit the
//! quotient grammar's fresh rules.

use crate::grammar::{Grammar, Rule, SymId, SymbolString};
use crate::nfa::Nfa;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

/// An Earley item whose origin is an NFA state id rather than a position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QItem {
    pub rule: u32,
    pub dot: u32,
    pub origin: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CreationMethod {
    Initialized,
    /// The pre-advance item and the chart it was scanned out of.
    Scanned { from: QItem, chart: u32 },
    /// The item whose dot-before-nonterminal triggered the prediction; it
    /// lives in the same chart as the predicted item.
    Predicted { parent: QItem },
    /// The completable item that was advanced, and the chart holding it.
    Completed { completable: QItem, chart: u32 },
}

#[derive(Debug, Default)]
pub struct QChart {
    pub items: Vec<QItem>,
    index: HashMap<QItem, usize>,
    pub methods: Vec<BTreeSet<CreationMethod>>,
    /// Item indices with the dot before the keyed symbol.
    by_next: HashMap<SymId, Vec<usize>>,
    /// For nonterminal A: charts holding a complete item [A -> x. (this)],
    /// i.e. charts any future completable awaiting A must advance into.
    triggers: HashMap<SymId, BTreeSet<u32>>,
}

/// One chart per NFA state, indexed by state id.
pub struct ChartMap {
    pub charts: Vec<QChart>,
}

impl QChart {
    fn awaiting(&self, sym: SymId) -> Vec<QItem> {
        self.by_next
            .get(&sym)
            .map(|v| v.iter().map(|&i| self.items[i]).collect())
            .unwrap_or_default()
    }
}

/// Run the generalized Earley fixpoint of grammar `g` against automaton `r`.
pub fn nfa_earley(g: &Grammar, r: &Nfa) -> ChartMap {
    let mut charts: Vec<QChart> = (0..r.state_count()).map(|_| QChart::default()).collect();
    // Worklist of (chart, item) pairs needing processing.
    let mut work: VecDeque<(u32, QItem)> = VecDeque::new();

    fn add(
        charts: &mut [QChart],
        work: &mut VecDeque<(u32, QItem)>,
        chart: u32,
        item: QItem,
        method: CreationMethod,
    ) {
        let c = &mut charts[chart as usize];
        match c.index.get(&item) {
            Some(&idx) => {
                c.methods[idx].insert(method);
            }
            None => {
                let idx = c.items.len();
                c.items.push(item);
                c.index.insert(item, idx);
                c.methods.push([method].into());
                work.push_back((chart, item));
            }
        }
    }

    let s0 = r.initial as u32;
    for &ri in g.rules_for(g.start) {
        add(
            &mut charts,
            &mut work,
            s0,
            QItem { rule: ri as u32, dot: 0, origin: s0 },
            CreationMethod::Initialized,
        );
    }

    while let Some((q, item)) = work.pop_front() {
        let rule = &g.rules[item.rule as usize];
        if (item.dot as usize) < rule.rhs.len() {
            let next = rule.rhs[item.dot as usize];
            // Register as awaiting `next` in chart q (exactly once per item).
            let idx = charts[q as usize].index[&item];
            charts[q as usize].by_next.entry(next).or_default().push(idx);
            if g.is_nonterminal(next) {
                for &ri in g.rules_for(next) {
                    add(
                        &mut charts,
                        &mut work,
                        q,
                        QItem { rule: ri as u32, dot: 0, origin: q },
                        CreationMethod::Predicted { parent: item },
                    );
                }
                // A complete item for `next` with origin q may already sit in
                // some chart j; advance this completable there.
                let targets: Vec<u32> = charts[q as usize]
                    .triggers
                    .get(&next)
                    .map(|s| s.iter().copied().collect())
                    .unwrap_or_default();
                for j in targets {
                    add(
                        &mut charts,
                        &mut work,
                        j,
                        QItem { dot: item.dot + 1, ..item },
                        CreationMethod::Completed { completable: item, chart: q },
                    );
                }
            } else {
                let dests: Vec<u32> = r.trans[q as usize]
                    .get(&next)
                    .map(|s| s.iter().map(|&t| t as u32).collect())
                    .unwrap_or_default();
                for k in dests {
                    add(
                        &mut charts,
                        &mut work,
                        k,
                        QItem { dot: item.dot + 1, ..item },
                        CreationMethod::Scanned { from: item, chart: q },
                    );
                }
            }
        } else {
            let lhs = rule.lhs;
            let origin = item.origin;
            // Advance every completable already waiting in the origin chart.
            for w in charts[origin as usize].awaiting(lhs) {
                add(
                    &mut charts,
                    &mut work,
                    q,
                    QItem { dot: w.dot + 1, ..w },
                    CreationMethod::Completed { completable: w, chart: origin },
                );
            }
            // And arrange for completables that show up later.
            charts[origin as usize].triggers.entry(lhs).or_default().insert(q);
        }
    }
    ChartMap { charts }
}

/// Does some string lie in both languages: a finished start production with
/// origin s0 sits in a final-state chart.
pub fn intersection_nonempty(g: &Grammar, r: &Nfa, charts: &ChartMap) -> bool {
    let s0 = r.initial as u32;
    r.finals.iter().any(|&f| {
        charts.charts[f].items.iter().any(|it| {
            let rule = &g.rules[it.rule as usize];
            rule.lhs == g.start && it.origin == s0 && it.dot as usize == rule.rhs.len()
        })
    })
}

/// Extract an explicit grammar for the left quotient of L(g) by L(r): the
/// strings w such that some prefix in L(r) extends to a member r-prefix + w
/// of L(g). Fresh nonterminals (E, i) stand for "the unfulfilled remainder
/// of E whose recognition started at NFA state i"; the walk over creation
/// methods discovers which remainders matter.
pub fn extract_left_quotient(g: &Grammar, r: &Nfa, charts: &ChartMap) -> Grammar {
    // Fresh-symbol bookkeeping: original symbols keep their ids; (E, i)
    // pairs and the new start get appended.
    let mut names: Vec<String> = (0..g.symbol_count() as SymId).map(|s| g.name(s).to_string()).collect();
    let mut is_nt: Vec<bool> = (0..g.symbol_count() as SymId).map(|s| g.is_nonterminal(s)).collect();
    let mut fresh: BTreeMap<(SymId, u32), SymId> = BTreeMap::new();
    let mut intern_fresh = |e: SymId, i: u32, names: &mut Vec<String>, is_nt: &mut Vec<bool>| {
        *fresh.entry((e, i)).or_insert_with(|| {
            names.push(format!("{}@{}", g.name(e), i));
            is_nt.push(true);
            (names.len() - 1) as SymId
        })
    };

    let mut new_rules: BTreeSet<(SymId, SymbolString)> = BTreeSet::new();
    let mut frontier: VecDeque<(QItem, u32)> = VecDeque::new();
    let mut seen: HashSet<(QItem, u32)> = HashSet::new();

    for &f in &r.finals {
        for &it in &charts.charts[f].items {
            frontier.push_back((it, f as u32));
            let rule = &g.rules[it.rule as usize];
            let remainder: SymbolString = rule.rhs[it.dot as usize..].to_vec();
            let lhs = intern_fresh(rule.lhs, it.origin, &mut names, &mut is_nt);
            new_rules.insert((lhs, remainder));
        }
    }

    let start_name = "S'";
    names.push(start_name.to_string());
    is_nt.push(true);
    let new_start = (names.len() - 1) as SymId;

    while let Some((item, q)) = frontier.pop_front() {
        if !seen.insert((item, q)) {
            continue;
        }
        let idx = charts.charts[q as usize].index[&item];
        let methods: Vec<CreationMethod> =
            charts.charts[q as usize].methods[idx].iter().copied().collect();
        for m in methods {
            match m {
                CreationMethod::Scanned { from, chart } => {
                    frontier.push_back((from, chart));
                }
                CreationMethod::Predicted { parent } => {
                    // parent = [F -> a . E b (i)] in chart q; the remainder
                    // of F from i continues as E's remainder from q, then b.
                    let prule = &g.rules[parent.rule as usize];
                    let e = g.rules[item.rule as usize].lhs;
                    let e_q = intern_fresh(e, q, &mut names, &mut is_nt);
                    let f_i = intern_fresh(prule.lhs, parent.origin, &mut names, &mut is_nt);
                    let mut rhs = vec![e_q];
                    rhs.extend_from_slice(&prule.rhs[parent.dot as usize + 1..]);
                    new_rules.insert((f_i, rhs));
                    frontier.push_back((parent, q));
                }
                CreationMethod::Completed { completable, chart } => {
                    // The complete item is irrelevant to the remainder.
                    frontier.push_back((completable, chart));
                }
                CreationMethod::Initialized => {
                    let s_q = intern_fresh(g.start, q, &mut names, &mut is_nt);
                    new_rules.insert((new_start, vec![s_q]));
                }
            }
        }
    }

    let mut rules: Vec<Rule> = g.rules.clone();
    rules.extend(new_rules.into_iter().map(|(lhs, rhs)| Rule { lhs, rhs }));
    let extracted = Grammar::from_parts(names, is_nt, rules, new_start);
    prune(&extracted)
}

/// Drop rules that cannot participate in any derivation from the start:
/// rules of unreachable nonterminals and rules mentioning uninhabited ones.
/// Language-preserving; the start symbol is kept even when it derives
/// nothing, so callers can detect empty quotients.
fn prune(g: &Grammar) -> Grammar {
    let uninhabited = g.check_inhabited();
    let alive: Vec<&Rule> = g
        .rules
        .iter()
        .filter(|r| !r.rhs.iter().any(|s| uninhabited.contains(s)) && !uninhabited.contains(&r.lhs))
        .collect();
    let mut reachable: BTreeSet<SymId> = [g.start].into();
    loop {
        let before = reachable.len();
        for r in &alive {
            if reachable.contains(&r.lhs) {
                reachable.extend(r.rhs.iter().copied());
            }
        }
        if reachable.len() == before {
            break;
        }
    }
    let rules: Vec<Rule> = alive
        .into_iter()
        .filter(|r| reachable.contains(&r.lhs))
        .cloned()
        .collect();
    let names = (0..g.symbol_count() as SymId).map(|s| g.name(s).to_string()).collect();
    let is_nt = (0..g.symbol_count() as SymId).map(|s| g.is_nonterminal(s)).collect();
    Grammar::from_parts(names, is_nt, rules, g.start)
}

/// Left quotient L(r) \ L(g) in one call.
pub fn left_quotient(g: &Grammar, r: &Nfa) -> Grammar {
    let charts = nfa_earley(g, r);
    extract_left_quotient(g, r, &charts)
}

/// Right quotient L(g) / L(r) via double reversal: reverse both languages,
/// take the left quotient, reverse the result.
pub fn right_quotient(g: &Grammar, r: &Nfa) -> Grammar {
    let rg = g.reverse();
    let rr = r.reverse();
    left_quotient(&rg, &rr).reverse()
}
