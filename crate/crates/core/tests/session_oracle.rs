//! Session behavior against the checked-unconstrained reference: replaying
//! a middle character by character and stopping at the end must agree with
//! batch-parsing the concatenation, rejection must imply no bounded
//! completion, and masking must be reuse- and fork-safe.

use fimparse_core::grammar::Grammar;
use fimparse_core::lexer::{batch_lex, compile_lexemes, parse_lexeme_specs, LexMode, LexemeSet};
use fimparse_core::python3::{parse_program, PythonBundle};
use fimparse_core::session::{Session, Vocabulary, DEFAULT_BRANCH_CAP};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::rc::Rc;

fn abc() -> (Grammar, LexemeSet) {
    let g = Grammar::load("S: ASEQ ; S: BSEQ CSEQ ;").unwrap();
    let ls = compile_lexemes(
        parse_lexeme_specs("ASEQ 1 /a+/\nBSEQ 2 /b+/\nCSEQ 3 /c+/\n").unwrap(),
    )
    .unwrap();
    (g, ls)
}

/// Checked-unconstrained reference: lex the whole string and parse it.
fn batch_accepts(g: &Grammar, ls: &LexemeSet, text: &str, mode: LexMode) -> bool {
    let Ok(stream) = batch_lex(ls, text, mode) else {
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
    fimparse_core::oracle::cyk_member(g, &syms)
}

fn strings_up_to(chars: &[char], len: usize) -> Vec<String> {
    let mut all = vec![String::new()];
    let mut frontier = all.clone();
    for _ in 0..len {
        let mut next = Vec::new();
        for t in &frontier {
            for &c in chars {
                let mut v = t.clone();
                v.push(c);
                next.push(v);
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

#[test]
fn replay_agrees_with_batch_parse_and_rejection_is_final() {
    let (g, ls) = abc();
    let chars = ['a', 'b', 'c'];
    for mode in [LexMode::PythonRule, LexMode::LeftmostLongest] {
        for left in strings_up_to(&chars, 2) {
            for right in strings_up_to(&chars, 2) {
                let open =
                    Session::open_lcfl(&g, &ls, mode, &left, &right, DEFAULT_BRANCH_CAP);
                for middle in strings_up_to(&chars, 3) {
                    let mut s = open.clone();
                    let mut died_at = None;
                    for (i, c) in middle.chars().enumerate() {
                        s = s.advance(c);
                        if !s.alive() {
                            died_at = Some(i);
                            break;
                        }
                    }
                    let whole = format!("{left}{middle}{right}");
                    let batch = batch_accepts(&g, &ls, &whole, mode);
                    match died_at {
                        Some(_) => assert!(
                            !batch,
                            "session rejected a valid triple: {left:?}+{middle:?}+{right:?} ({mode:?})"
                        ),
                        None => assert_eq!(
                            s.may_stop(),
                            batch,
                            "{left:?}+{middle:?}+{right:?} ({mode:?})"
                        ),
                    }
                }
            }
        }
    }
}

#[test]
fn rejection_implies_no_bounded_completion() {
    let (g, ls) = abc();
    let chars = ['a', 'b', 'c'];
    let mode = LexMode::PythonRule;
    for left in ["", "a", "b", "bc"] {
        for right in ["", "c", "cc", "bc"] {
            let open = Session::open_lcfl(&g, &ls, mode, left, right, DEFAULT_BRANCH_CAP);
            for mid in strings_up_to(&chars, 2) {
                let s = open.advance_str(&mid);
                if s.alive() {
                    continue;
                }
                for gamma in strings_up_to(&chars, 3) {
                    let whole = format!("{left}{mid}{gamma}{right}");
                    assert!(
                        !batch_accepts(&g, &ls, &whole, mode),
                        "rejected {mid:?} but {gamma:?} completes it (left {left:?}, right {right:?})"
                    );
                }
            }
        }
    }
}

#[test]
fn token_mask_is_reuse_and_fork_safe() {
    let (g, ls) = abc();
    let v = Vocabulary::new(
        vec!["a".into(), "b".into(), "c".into(), "bc".into(), "cc".into(), "".into()],
        5,
    );
    for (left, right) in [("", ""), ("b", "c"), ("", "cc"), ("a", "")] {
        let s =
            Session::open_lcfl(&g, &ls, LexMode::PythonRule, left, right, DEFAULT_BRANCH_CAP);
        let m1 = s.token_mask(&v);
        // Interleave forks and advances, then recompute on the original.
        let fork = s.clone();
        let _side = fork.advance('b').advance('c');
        let _ = fork.token_mask(&v);
        let m2 = s.token_mask(&v);
        assert_eq!(m1, m2, "left {left:?} right {right:?}");
    }
}

#[test]
fn eos_only_mask_on_a_finite_language() {
    let g = Grammar::load("S: A ;").unwrap();
    let ls = compile_lexemes(parse_lexeme_specs("A 1 /a/\n").unwrap()).unwrap();
    let s = Session::open_lcfl(&g, &ls, LexMode::PythonRule, "a", "", DEFAULT_BRANCH_CAP);
    let v = Vocabulary::new(vec!["a".into(), "".into()], 1);
    assert_eq!(s.token_mask(&v), [1].into());
}

#[test]
fn python_replay_of_three_way_splits() {
    let bundle = Rc::new(PythonBundle::builtin());
    let programs = [
        "x = 1\ny = x + 2\n",
        "def f(a):\n    if a:\n        return a\n    return 0\n",
        "xs = [1,\n  2]\nfor x in xs:\n    print(x)\n",
        "s = 'a#b'  # note\nt = \"\"\"m\nl\"\"\"\n",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for prog in programs {
        assert_eq!(parse_program(&bundle, prog), Ok(true), "{prog:?}");
        let chars: Vec<char> = prog.chars().collect();
        for _ in 0..6 {
            let i = rng.gen_range(0..=chars.len());
            let j = rng.gen_range(i..=chars.len());
            let left: String = chars[..i].iter().collect();
            let middle: String = chars[i..j].iter().collect();
            let right: String = chars[j..].iter().collect();
            let mut s = Session::open_python(Rc::clone(&bundle), &left, &right, 64);
            assert!(s.alive(), "dead at open: {left:?} | {right:?}");
            for c in middle.chars() {
                s = s.advance(c);
                assert!(s.alive(), "died in middle: {left:?}+{middle:?}+{right:?}");
            }
            assert!(s.may_stop(), "cannot stop: {left:?}+{middle:?}+{right:?}");
        }
    }
}

#[test]
fn python_acceptance_is_sound_for_mutated_middles() {
    let bundle = Rc::new(PythonBundle::builtin());
    let prog = "if x:\n    y = 1\nz = (y +\n 2)\n";
    let chars: Vec<char> = prog.chars().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let snippets = ["pass\n", "q", ")", "  ", "#c", "'s'", ""];
    let mut accepted = 0;
    for _ in 0..40 {
        let i = rng.gen_range(0..=chars.len());
        let j = rng.gen_range(i..=chars.len());
        let left: String = chars[..i].iter().collect();
        let right: String = chars[j..].iter().collect();
        let mut middle: String = chars[i..j].iter().collect();
        middle.push_str(snippets[rng.gen_range(0..snippets.len())]);
        let s = Session::open_python(Rc::clone(&bundle), &left, &right, 64);
        let s = s.advance_str(&middle);
        if s.alive() && s.may_stop() {
            let whole = format!("{left}{middle}{right}");
            assert_eq!(parse_program(&bundle, &whole), Ok(true), "{whole:?}");
            accepted += 1;
        }
    }
    assert!(accepted >= 5, "only {accepted} accepted samples");
}
