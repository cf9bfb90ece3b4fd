//! Incremental Earley recognizer over an append-only chart collection.
//!
//! Accumulating a character never rewrites history: it appends one fresh
//! chart whose scans read from the parse state's tip chart. A parse state is
//! just (collection handle, tip index), so forking is a pointer copy and all
//! forks stay valid forever. Item origins are absolute chart indices in the
//! collection, which makes charts from different forks coexist safely.

use crate::grammar::{Grammar, SymId};
use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Item {
    pub rule: u32,
    pub dot: u32,
    pub origin: u32,
}

#[derive(Debug, Default)]
pub struct Chart {
    pub items: Vec<Item>,
    present: HashSet<Item>,
    /// Item indices whose dot sits before the keyed symbol.
    by_next: HashMap<SymId, Vec<usize>>,
    /// Nonterminals for which this chart holds a complete item whose origin
    /// is this chart itself; used to complete later-arriving awaiting items
    /// (the ε-rule case).
    completed_here: HashSet<SymId>,
}

impl Chart {
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    fn awaiting(&self, sym: SymId) -> &[usize] {
        self.by_next.get(&sym).map(Vec::as_slice).unwrap_or(&[])
    }
}

pub struct ChartCollection {
    pub grammar: Rc<Grammar>,
    pub charts: Vec<Chart>,
}

#[derive(Clone)]
pub struct ParseState {
    pub collection: Rc<RefCell<ChartCollection>>,
    pub tip: usize,
}

/// Build a chart to a predict/complete fixpoint. `earlier` gives read access
/// to already-finalized charts for cross-chart completion.
fn close_chart(g: &Grammar, chart_index: usize, seed: Vec<Item>, earlier: &[Chart]) -> Chart {
    let mut chart = Chart::default();
    let mut work: Vec<Item> = Vec::new();
    let add = |chart: &mut Chart, work: &mut Vec<Item>, it: Item| {
        if chart.present.insert(it) {
            let idx = chart.items.len();
            chart.items.push(it);
            let rhs = &g.rules[it.rule as usize].rhs;
            if (it.dot as usize) < rhs.len() {
                chart.by_next.entry(rhs[it.dot as usize]).or_default().push(idx);
            }
            work.push(it);
        }
    };
    for it in seed {
        add(&mut chart, &mut work, it);
    }
    while let Some(it) = work.pop() {
        let rule = &g.rules[it.rule as usize];
        if (it.dot as usize) < rule.rhs.len() {
            let next = rule.rhs[it.dot as usize];
            if g.is_nonterminal(next) {
                for &ri in g.rules_for(next) {
                    add(
                        &mut chart,
                        &mut work,
                        Item { rule: ri as u32, dot: 0, origin: chart_index as u32 },
                    );
                }
                if chart.completed_here.contains(&next) {
                    add(&mut chart, &mut work, Item { dot: it.dot + 1, ..it });
                }
            }
        } else {
            let lhs = rule.lhs;
            let origin = it.origin as usize;
            if origin == chart_index {
                if chart.completed_here.insert(lhs) {
                    let waiting: Vec<Item> =
                        chart.awaiting(lhs).iter().map(|&i| chart.items[i]).collect();
                    for w in waiting {
                        add(&mut chart, &mut work, Item { dot: w.dot + 1, ..w });
                    }
                }
            } else {
                let waiting: Vec<Item> = earlier[origin]
                    .awaiting(lhs)
                    .iter()
                    .map(|&i| earlier[origin].items[i])
                    .collect();
                for w in waiting {
                    add(&mut chart, &mut work, Item { dot: w.dot + 1, ..w });
                }
            }
        }
    }
    chart
}

/// Chart 0: the predicted closure of every start production; tip = 0.
pub fn init_state(grammar: Rc<Grammar>) -> ParseState {
    let seed: Vec<Item> = grammar
        .rules_for(grammar.start)
        .iter()
        .map(|&ri| Item { rule: ri as u32, dot: 0, origin: 0 })
        .collect();
    let chart = close_chart(&grammar, 0, seed, &[]);
    ParseState {
        collection: Rc::new(RefCell::new(ChartCollection { grammar, charts: vec![chart] })),
        tip: 0,
    }
}

/// Append one chart scanning `t` out of `s`'s tip. The input state remains
/// fully usable; an unscannable `t` produces an empty tip chart.
pub fn accumulate(s: &ParseState, t: SymId) -> ParseState {
    let new_index;
    let chart;
    {
        let coll = s.collection.borrow();
        new_index = coll.charts.len();
        let tip = &coll.charts[s.tip];
        let seed: Vec<Item> = tip
            .awaiting(t)
            .iter()
            .map(|&i| tip.items[i])
            .map(|it| Item { dot: it.dot + 1, ..it })
            .collect();
        chart = close_chart(&coll.grammar, new_index, seed, &coll.charts);
    }
    s.collection.borrow_mut().charts.push(chart);
    ParseState { collection: Rc::clone(&s.collection), tip: new_index }
}

pub fn accumulate_all(s: &ParseState, input: &[SymId]) -> ParseState {
    let mut cur = s.clone();
    for &t in input {
        cur = accumulate(&cur, t);
    }
    cur
}

/// Invariant: the accumulated string is a prefix of some member of the
/// language exactly when the tip chart is non-empty (given an inhabited
/// grammar).
pub fn is_incrementally_parsable(s: &ParseState) -> bool {
    !s.collection.borrow().charts[s.tip].is_empty()
}

/// The accumulated string is itself a member: the tip holds a finished start
/// production spanning from chart 0.
pub fn is_member(s: &ParseState) -> bool {
    let coll = s.collection.borrow();
    let g = &coll.grammar;
    coll.charts[s.tip].items.iter().any(|it| {
        let rule = &g.rules[it.rule as usize];
        rule.lhs == g.start && it.origin == 0 && it.dot as usize == rule.rhs.len()
    })
}

/// Terminals some tip item's dot sits before: the only characters the
/// recognizer can accept next.
pub fn scannable_terminals(s: &ParseState) -> BTreeSet<SymId> {
    let coll = s.collection.borrow();
    let g = &coll.grammar;
    coll.charts[s.tip]
        .by_next
        .keys()
        .copied()
        .filter(|&sym| g.is_terminal(sym))
        .collect()
}

/// Number of charts in the underlying collection; accumulate appends exactly
/// one chart per call, shared across all forks.
pub fn chart_count(s: &ParseState) -> usize {
    s.collection.borrow().charts.len()
}

/// The tip chart's items as a plain set, origins left as absolute indices.
pub fn tip_items(s: &ParseState) -> BTreeSet<Item> {
    s.collection.borrow().charts[s.tip].items.iter().copied().collect()
}
