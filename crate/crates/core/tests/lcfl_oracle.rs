//! Boundary-point analysis pinned against a brute-force search over left
//! fragments, and sublanguage-union membership checked against
//! concatenate-and-batch-parse.

use fimparse_core::grammar::Grammar;
use fimparse_core::lcfl::{
    build_sublanguages, calculate_boundary_points, membership_in_sublanguage, BoundaryTable,
    Sublanguage,
};
use fimparse_core::lexer::{
    batch_lex, compile_lexemes, parse_lexeme_specs, step_python_rule, LexMode, LexemeSet,
};
use fimparse_core::oracle::{self, CykOracle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

fn abc_set() -> LexemeSet {
    compile_lexemes(parse_lexeme_specs("ASEQ 1 /a+/\nBSEQ 2 /b+/\nCSEQ 3 /c+/\n").unwrap())
        .unwrap()
}

fn abc_grammar() -> Grammar {
    Grammar::load("S: ASEQ ; S: BSEQ CSEQ ;").unwrap()
}

/// Brute force over left fragments: a boundary index n >= 1 is feasible
/// when some fragment makes the lexing of fragment + suffix[..n] end on a
/// symbol that starts in the fragment, no lexing with m > n keeps the same
/// symbol count, and no smaller index already satisfies both.
fn boundary_oracle(
    ls: &LexemeSet,
    suffix: &str,
    chars: &[char],
    max_alpha: usize,
) -> BTreeSet<usize> {
    let beta: Vec<char> = suffix.chars().collect();
    let mut feasible = BTreeSet::new();
    let mut alphas: Vec<String> = vec![String::new()];
    for _ in 0..max_alpha {
        let mut next = Vec::new();
        for a in &alphas {
            for &c in chars {
                let mut v = a.clone();
                v.push(c);
                next.push(v);
            }
        }
        alphas.extend(next.iter().cloned());
        alphas = {
            let mut all = alphas;
            all.dedup();
            all
        };
        let _ = &next;
    }
    for alpha in &alphas {
        if alpha.is_empty() {
            continue;
        }
        'ns: for n in 1..=beta.len() {
            let text: String =
                alpha.chars().chain(beta[..n].iter().copied()).collect();
            let Ok(lex) = batch_lex(ls, &text, LexMode::LeftmostLongest) else {
                continue;
            };
            let Some(&(_, start, _)) = lex.last() else {
                continue;
            };
            if start >= alpha.chars().count() {
                continue;
            }
            for m in n + 1..=beta.len() {
                let longer: String =
                    alpha.chars().chain(beta[..m].iter().copied()).collect();
                if let Ok(lex_m) = batch_lex(ls, &longer, LexMode::LeftmostLongest) {
                    if lex_m.len() == lex.len() {
                        continue 'ns;
                    }
                }
            }
            feasible.insert(n);
            break; // first satisfying boundary for this fragment
        }
    }
    feasible
}

fn table_keys(bt: &BoundaryTable) -> BTreeSet<usize> {
    bt.boundaries.keys().copied().collect()
}

#[test]
fn cseq_suffix_boundary_is_only_the_full_span() {
    // A spanning c-run ending after one of two remaining c's would always
    // be extended by the leftmost-longest rule.
    let ls = abc_set();
    let bt = calculate_boundary_points(&ls, "cc");
    assert_eq!(table_keys(&bt), [2].into());
    assert_eq!(boundary_oracle(&ls, "cc", &['a', 'b', 'c'], 4), [2].into());
}

#[test]
fn identifier_suffix_drops_the_subsumed_index() {
    let ls = compile_lexemes(
        parse_lexeme_specs("IDENT 2 /[a-z]+/\nNL 3 /\\n/\nWS 0 /[ ]+/ ignore\n").unwrap(),
    )
    .unwrap();
    let bt = calculate_boundary_points(&ls, "nd b in c\n");
    assert!(!bt.boundaries.contains_key(&1), "index 1 should be subsumed by index 2");
    assert_eq!(table_keys(&bt), [2].into());
    assert_eq!(
        boundary_oracle(&ls, "nd b in c\n", &['a', 'n', 'd', ' '], 3),
        [2].into()
    );
}

#[test]
fn string_and_comment_suffix_matches_the_case_enumeration() {
    // Boundary skips for `"#'#"#"#` + newline: 1 closes a double-quoted
    // string, 3 a single-quoted one, 5 the escaped-first-quote variant,
    // and 8 a comment running to the newline.
    let ls = compile_lexemes(
        parse_lexeme_specs(concat!(
            "STRING 5 /\"([^\"\\n\\\\]|\\\\.)*\"|'([^'\\n\\\\]|\\\\.)*'/\n",
            "COMMENT 1 /#[^\\n]*/ ignore follow=NL\n",
            "NL 4 /\\n/\n",
            "IDENT 2 /[ab]+/\n",
            "WS 0 /[\\t ]+/ ignore\n",
        ))
        .unwrap(),
    )
    .unwrap();
    let suffix = "\"#'#\"#\"#\n";
    let bt = calculate_boundary_points(&ls, suffix);
    assert_eq!(table_keys(&bt), [1, 3, 5, 8].into());
    assert_eq!(
        boundary_oracle(&ls, suffix, &['a', '"', '\'', '\\', '#', '\n'], 3),
        [1, 3, 5, 8].into()
    );
}

#[test]
fn random_suffix_boundaries_match_the_brute_force_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(97);
    let fixtures: Vec<(LexemeSet, Vec<char>)> = vec![
        (abc_set(), vec!['a', 'b', 'c']),
        (
            compile_lexemes(
                parse_lexeme_specs(
                    "DEC 1 /\\d+/\nOCT 2 /0o[0-7]+/\nOR 3 /or/\nWS 0 /[ ]+/ ignore\n",
                )
                .unwrap(),
            )
            .unwrap(),
            vec!['0', 'o', 'r', '7', ' '],
        ),
    ];
    for (ls, chars) in &fixtures {
        for _ in 0..25 {
            let len = rng.gen_range(0..=5);
            let suffix: String =
                (0..len).map(|_| chars[rng.gen_range(0..chars.len())]).collect();
            let bt = calculate_boundary_points(ls, &suffix);
            assert_eq!(
                table_keys(&bt),
                boundary_oracle(ls, &suffix, chars, 4),
                "suffix {suffix:?}"
            );
            // Per lexeme, a state may appear under at most one index.
            for g in 0..ls.automata.len() {
                let mut seen = BTreeSet::new();
                for states in bt.boundaries.values() {
                    if let Some(set) = states.get(&g) {
                        for &s in set {
                            assert!(seen.insert(s), "state {s} duplicated for lexeme {g}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn boundary_computation_is_linear_in_the_suffix() {
    let ls = abc_set();
    let total_states: usize = ls.automata.iter().map(|a| a.state_count()).sum();
    for len in [0, 5, 20, 80] {
        let suffix = "c".repeat(len);
        let bt = calculate_boundary_points(&ls, &suffix);
        let bound = ls.automata.len() * ls.alphabet.len() + (len + 1) * (ls.automata.len() + total_states);
        assert!(bt.step_calls <= bound, "{} steps for |suffix| = {len}", bt.step_calls);
    }
}

fn subs_for(suffix: &str) -> (Vec<Sublanguage>, BoundaryTable) {
    let ls = abc_set();
    let g = abc_grammar();
    let bt = calculate_boundary_points(&ls, suffix);
    let subs = build_sublanguages(&g, &ls, &bt, suffix, LexMode::PythonRule);
    (subs, bt)
}

#[test]
fn empty_suffix_gives_one_unquotiented_sublanguage() {
    let (subs, _) = subs_for("");
    assert_eq!(subs.len(), 1);
    assert_eq!(subs[0].skip, 0);
    let g = abc_grammar();
    assert_eq!(
        oracle::bounded_language(&subs[0].grammar, 4),
        oracle::bounded_language(&g, 4)
    );
}

#[test]
fn constrained_sublanguage_rejects_the_wrong_tail() {
    // Skip 2 for suffix "cc" must end in a c-run, so an a-run cannot even
    // start there.
    let (subs, bt) = subs_for("cc");
    let skips: BTreeSet<usize> = subs.iter().map(|s| s.skip).collect();
    assert_eq!(skips, [0, 2].into());
    for text in ["a", "bbc"] {
        let got = union_member(&subs, &bt, text);
        assert_eq!(got, text == "bbc", "text {text:?}");
    }
}

fn union_member(subs: &[Sublanguage], bt: &BoundaryTable, text: &str) -> bool {
    subs.iter().any(|sub| {
        let mut b = Some(sub.open_branch(LexMode::PythonRule, 0));
        for c in text.chars() {
            b = b.and_then(|br| step_python_rule(&sub.env, &br, c));
        }
        b.map(|br| membership_in_sublanguage(sub, bt, &br)).unwrap_or(false)
    })
}

fn union_alive(subs: &[Sublanguage], text: &str) -> bool {
    subs.iter().any(|sub| {
        let mut b = Some(sub.open_branch(LexMode::PythonRule, 0));
        for c in text.chars() {
            b = b.and_then(|br| step_python_rule(&sub.env, &br, c));
        }
        b.is_some()
    })
}

/// Reference for the whole pipeline: batch-lex text + suffix and test the
/// filtered symbol stream against the symbol grammar.
fn concat_oracle(ls: &LexemeSet, g: &Grammar, cyk: &CykOracle, text: &str, suffix: &str) -> bool {
    let full = format!("{text}{suffix}");
    let Ok(stream) = batch_lex(ls, &full, LexMode::PythonRule) else {
        return false;
    };
    let mut syms = Vec::new();
    for &(lx, _, _) in &stream {
        if ls.specs[lx].ignored {
            continue;
        }
        match g.symbol_id(&ls.specs[lx].name) {
            Some(t) => syms.push(t),
            None => return false,
        }
    }
    cyk.member(&syms)
}

#[test]
fn union_membership_matches_concatenate_and_parse() {
    let ls = abc_set();
    let g = abc_grammar();
    let cyk = CykOracle::new(&g);
    let chars = ['a', 'b', 'c'];
    for suffix in ["", "c", "cc", "bcc", "abc", "ccb"] {
        let bt = calculate_boundary_points(&ls, suffix);
        let subs = build_sublanguages(&g, &ls, &bt, suffix, LexMode::PythonRule);
        let mut texts: Vec<String> = vec![String::new()];
        let mut frontier = texts.clone();
        for _ in 0..5 {
            let mut next = Vec::new();
            for t in &frontier {
                for &c in &chars {
                    let mut v = t.clone();
                    v.push(c);
                    next.push(v);
                }
            }
            texts.extend(next.iter().cloned());
            frontier = next;
        }
        for text in &texts {
            assert_eq!(
                union_member(&subs, &bt, text),
                concat_oracle(&ls, &g, &cyk, text, suffix),
                "text {text:?}, suffix {suffix:?}"
            );
        }
    }
}

#[test]
fn union_liveness_matches_bounded_extension_search() {
    let ls = abc_set();
    let g = abc_grammar();
    let cyk = CykOracle::new(&g);
    let chars = ['a', 'b', 'c'];
    for suffix in ["", "cc", "bcc"] {
        let bt = calculate_boundary_points(&ls, suffix);
        let subs = build_sublanguages(&g, &ls, &bt, suffix, LexMode::PythonRule);
        let mut texts: Vec<String> = vec![String::new()];
        let mut frontier = texts.clone();
        for _ in 0..3 {
            let mut next = Vec::new();
            for t in &frontier {
                for &c in &chars {
                    let mut v = t.clone();
                    v.push(c);
                    next.push(v);
                }
            }
            texts.extend(next.iter().cloned());
            frontier = next;
        }
        for text in &texts {
            let mut extendable = false;
            'ext: for len in 0..=5 {
                let mut gammas: Vec<String> = vec![String::new()];
                for _ in 0..len {
                    let mut next = Vec::new();
                    for t in &gammas {
                        for &c in &chars {
                            let mut v = t.clone();
                            v.push(c);
                            next.push(v);
                        }
                    }
                    gammas = next;
                }
                for gamma in &gammas {
                    if concat_oracle(&ls, &g, &cyk, &format!("{text}{gamma}"), suffix) {
                        extendable = true;
                        break 'ext;
                    }
                }
            }
            assert_eq!(
                union_alive(&subs, text),
                extendable,
                "text {text:?}, suffix {suffix:?}"
            );
        }
    }
}
