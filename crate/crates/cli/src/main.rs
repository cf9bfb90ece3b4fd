//! Command-line front end: quotient inspection, one-shot middle checking, a
//! JSON-lines daemon for sampler integration, and corpus-split evaluation.
//!
//! Exit codes: 0 success, 1 rejection (check), 2 unreadable or invalid
//! inputs.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use fimparse_core::grammar::Grammar;
use fimparse_core::lcfl::{build_sublanguages, calculate_boundary_points};
use fimparse_core::lexer::{
    batch_lex, compile_lexemes, parse_lexeme_specs, LexMode, LexemeSet,
};
use fimparse_core::nfa::{parse_regex, Nfa, Pattern};
use fimparse_core::python3::{build_python_quotient, PythonBundle};
use fimparse_core::quotient::{left_quotient, right_quotient};
use fimparse_core::session::{Session, Vocabulary, DEFAULT_BRANCH_CAP};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::rc::Rc;

#[derive(Parser)]
#[command(name = "fimparse", about = "fill-in-the-middle parsing engine")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LexRule {
    /// Strict maximal munch with forking.
    LeftmostLongest,
    /// One-character-backtrack rule.
    Backtrack,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SplitMode {
    Random,
    Boundary,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the sublanguages of the quotient by a right context.
    Quotient {
        #[arg(long)]
        grammar: Option<PathBuf>,
        #[arg(long)]
        lexemes: Option<PathBuf>,
        /// File holding the right context; for character-level grammars a
        /// /regex/ quotients by the regular language instead.
        #[arg(long)]
        right: PathBuf,
        /// Print sublanguage N's grammar in full.
        #[arg(long)]
        dump_grammar: Option<usize>,
        #[arg(long, value_enum, default_value_t = LexRule::LeftmostLongest)]
        lex_rule: LexRule,
        /// Which side to quotient on in /regex/ mode.
        #[arg(long, value_enum, default_value_t = Side::Right)]
        side: Side,
    },
    /// Replay a middle between a left and right context.
    Check {
        #[arg(long)]
        grammar: Option<PathBuf>,
        #[arg(long)]
        lexemes: Option<PathBuf>,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        middle: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long, value_enum, default_value_t = LexRule::LeftmostLongest)]
        lex_rule: LexRule,
    },
    /// JSON-lines daemon on standard input/output.
    Serve {
        #[arg(long)]
        grammar: Option<PathBuf>,
        #[arg(long)]
        lexemes: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = LexRule::LeftmostLongest)]
        lex_rule: LexRule,
    },
    /// Split every corpus file and replay the middles.
    CorpusEval {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        splits: usize,
        #[arg(long, value_enum, default_value_t = SplitMode::Boundary)]
        mode: SplitMode,
    },
}

enum Bundle {
    Generic { grammar: Grammar, lexemes: LexemeSet, mode: LexMode },
    Python(Rc<PythonBundle>),
}

fn load_bundle(
    grammar: &Option<PathBuf>,
    lexemes: &Option<PathBuf>,
    lex_rule: LexRule,
) -> Result<Bundle> {
    match (grammar, lexemes) {
        (None, None) => Ok(Bundle::Python(Rc::new(PythonBundle::builtin()))),
        (Some(g), Some(l)) => {
            let gsrc = std::fs::read_to_string(g)
                .with_context(|| format!("reading {}", g.display()))?;
            let lsrc = std::fs::read_to_string(l)
                .with_context(|| format!("reading {}", l.display()))?;
            let grammar = Grammar::load(&gsrc).map_err(|e| anyhow!("grammar: {e}"))?;
            let lexemes =
                compile_lexemes(parse_lexeme_specs(&lsrc).map_err(|e| anyhow!("lexemes: {e}"))?)
                    .map_err(|e| anyhow!("lexemes: {e}"))?;
            let mode = match lex_rule {
                LexRule::LeftmostLongest => LexMode::LeftmostLongest,
                LexRule::Backtrack => LexMode::PythonRule,
            };
            Ok(Bundle::Generic { grammar, lexemes, mode })
        }
        _ => bail!("--grammar and --lexemes must be given together (or neither, for Python)"),
    }
}

fn open_session(bundle: &Bundle, left: &str, right: &str) -> Session {
    match bundle {
        Bundle::Generic { grammar, lexemes, mode } => {
            Session::open_lcfl(grammar, lexemes, *mode, left, right, DEFAULT_BRANCH_CAP)
        }
        Bundle::Python(b) => Session::open_python(Rc::clone(b), left, right, DEFAULT_BRANCH_CAP),
    }
}

/// Render a symbol-level pattern with grammar symbol names, e.g.
/// `NL (INDENT | DEDENT*) PASS NL DEDENT{1,4}`.
fn pattern_str(g: &Grammar, p: &Pattern) -> String {
    fn atom(g: &Grammar, p: &Pattern) -> String {
        let s = render(g, p);
        match p {
            Pattern::Class(set) if set.len() == 1 => s,
            Pattern::Repeat(..) => s,
            _ => format!("({s})"),
        }
    }
    fn render(g: &Grammar, p: &Pattern) -> String {
        match p {
            Pattern::Class(set) => {
                let names: Vec<&str> = set.iter().map(|&s| g.name(s)).collect();
                if names.len() == 1 {
                    names[0].to_string()
                } else {
                    format!("({})", names.join(" | "))
                }
            }
            Pattern::Concat(ps) => {
                ps.iter().map(|q| render_concat_part(g, q)).collect::<Vec<_>>().join(" ")
            }
            Pattern::Alt(ps) => {
                format!("({})", ps.iter().map(|q| render(g, q)).collect::<Vec<_>>().join(" | "))
            }
            Pattern::Repeat(inner, min, max) => {
                let base = atom(g, inner);
                match (min, max) {
                    (0, None) => format!("{base}*"),
                    (1, None) => format!("{base}+"),
                    (0, Some(1)) => format!("{base}?"),
                    (m, None) => format!("{base}{{{m},}}"),
                    (m, Some(n)) if m == n => format!("{base}{{{m}}}"),
                    (m, Some(n)) => format!("{base}{{{m},{n}}}"),
                }
            }
        }
    }
    fn render_concat_part(g: &Grammar, p: &Pattern) -> String {
        match p {
            Pattern::Concat(_) => format!("({})", render(g, p)),
            _ => render(g, p),
        }
    }
    render(g, p)
}

fn cmd_quotient(
    grammar: &Option<PathBuf>,
    lexemes: &Option<PathBuf>,
    right: &Path,
    dump: Option<usize>,
    lex_rule: LexRule,
    side: Side,
) -> Result<i32> {
    let bundle = load_bundle(grammar, lexemes, lex_rule)?;
    let rtext = std::fs::read_to_string(right)
        .with_context(|| format!("reading {}", right.display()))?;
    match &bundle {
        Bundle::Python(b) => {
            if side == Side::Left {
                bail!("--side left requires a character-level grammar and a /regex/ right context");
            }
            let q = build_python_quotient(b, &rtext);
            let ends: Vec<usize> = q.bt.boundaries.keys().copied().collect();
            println!("right context: {:?}", q.suffix);
            println!("boundary indices: {ends:?}");
            println!("sublanguages: {}", q.subs.len());
            for (i, sub) in q.subs.iter().enumerate() {
                println!(
                    "sublanguage {i}: skip={} paren_level={} variant={:?}",
                    sub.skip, sub.required_level, sub.indent.variant
                );
                println!("  pattern: {}", pattern_str(&b.grammar, &sub.base_pattern));
                println!("  split pattern: {}", pattern_str(&b.grammar, &sub.pattern));
                let levels: Vec<u32> = sub.expected_prev_levels.iter().copied().collect();
                println!("  expected prev levels: {levels:?}");
                println!(
                    "  grammar: {} symbols, {} rules",
                    sub.grammar.symbol_count(),
                    sub.grammar.rules.len()
                );
            }
            if let Some(n) = dump {
                let sub = q.subs.get(n).ok_or_else(|| anyhow!("no sublanguage {n}"))?;
                println!("{}", sub.grammar.dump());
            }
        }
        Bundle::Generic { grammar, lexemes, mode } => {
            let trimmed = rtext.trim_end_matches('\n');
            if trimmed.len() >= 2 && trimmed.starts_with('/') && trimmed.ends_with('/') {
                // Character-level path: quotient by a regular language whose
                // symbols are the grammar's single-character terminals.
                let mut by_char: BTreeMap<u32, u32> = BTreeMap::new();
                for t in grammar.terminals() {
                    let name = grammar.name(t);
                    let mut it = name.chars();
                    match (it.next(), it.next()) {
                        (Some(c), None) => {
                            by_char.insert(c as u32, t);
                        }
                        _ => bail!("terminal {name} is not a single character"),
                    }
                }
                let alphabet: BTreeSet<u32> = by_char.keys().copied().collect();
                let pat = parse_regex(&trimmed[1..trimmed.len() - 1], &alphabet)
                    .map_err(|e| anyhow!("regex: {e}"))?;
                let nfa = Nfa::from_pattern(&pat, &alphabet).map_symbols(|c| by_char[&c]);
                let q = match side {
                    Side::Right => right_quotient(grammar, &nfa),
                    Side::Left => left_quotient(grammar, &nfa),
                };
                println!("{} language: {trimmed}", if side == Side::Left { "left" } else { "right" });
                println!("sublanguages: 1");
                println!(
                    "sublanguage 0: skip=0 grammar: {} symbols, {} rules",
                    q.symbol_count(),
                    q.rules.len()
                );
                println!("{}", q.dump());
            } else {
                if side == Side::Left {
                    bail!("--side left requires a /regex/ right context");
                }
                let bt = calculate_boundary_points(lexemes, trimmed);
                let subs = build_sublanguages(grammar, lexemes, &bt, trimmed, *mode);
                let ends: Vec<usize> = bt.boundaries.keys().copied().collect();
                println!("right context: {trimmed:?}");
                println!("boundary indices: {ends:?}");
                println!("sublanguages: {}", subs.len());
                for (i, sub) in subs.iter().enumerate() {
                    let syms: Vec<&str> =
                        sub.remainder.iter().map(|&s| sub.grammar.name(s)).collect();
                    println!(
                        "sublanguage {i}: skip={} remainder={} grammar: {} symbols, {} rules",
                        sub.skip,
                        syms.join(" "),
                        sub.grammar.symbol_count(),
                        sub.grammar.rules.len()
                    );
                }
                if let Some(n) = dump {
                    let sub = subs.get(n).ok_or_else(|| anyhow!("no sublanguage {n}"))?;
                    println!("{}", sub.grammar.dump());
                }
            }
        }
    }
    Ok(0)
}

fn cmd_check(
    grammar: &Option<PathBuf>,
    lexemes: &Option<PathBuf>,
    left: &Path,
    middle: &Path,
    right: &Path,
    lex_rule: LexRule,
) -> Result<i32> {
    let bundle = load_bundle(grammar, lexemes, lex_rule)?;
    let read = |p: &Path| {
        std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
    };
    let (l, m, r) = (read(left)?, read(middle)?, read(right)?);
    let mut s = open_session(&bundle, &l, &r);
    if !s.alive() {
        println!("left context rejected");
        return Ok(1);
    }
    for (i, c) in m.chars().enumerate() {
        s = s.advance(c);
        if !s.alive() {
            println!("rejected at offset {i}");
            return Ok(1);
        }
    }
    let stop = s.may_stop();
    println!("accepted, may_stop={stop}");
    Ok(if stop { 0 } else { 1 })
}

struct Daemon {
    bundle: Bundle,
    sessions: BTreeMap<u64, Session>,
    next_id: u64,
    vocab: Option<Vocabulary>,
}

impl Daemon {
    fn new(bundle: Bundle) -> Daemon {
        Daemon { bundle, sessions: BTreeMap::new(), next_id: 1, vocab: None }
    }

    fn status(&self, id: u64) -> Value {
        match self.sessions.get(&id) {
            Some(s) => json!({"id": id, "alive": s.alive(), "may_stop": s.may_stop()}),
            None => json!({"id": id, "error": "no such session"}),
        }
    }

    fn vocab_from(&mut self, req: &Value) -> Result<&Vocabulary, String> {
        if let Some(tokens) = req.get("tokens") {
            let tokens: Vec<String> = match serde_json::from_value(tokens.clone()) {
                Ok(t) => t,
                Err(e) => return Err(format!("bad tokens: {e}")),
            };
            let eos = req.get("eos").and_then(Value::as_u64).unwrap_or(0) as usize;
            if eos >= tokens.len() || !tokens[eos].is_empty() {
                return Err("eos must index an empty expansion".into());
            }
            self.vocab = Some(Vocabulary::new(tokens, eos));
        }
        self.vocab.as_ref().ok_or_else(|| "no vocabulary set".into())
    }

    fn handle(&mut self, line: &str) -> Value {
        let req: Value = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(e) => return json!({"id": 0, "error": format!("bad json: {e}")}),
        };
        let op = req.get("op").and_then(Value::as_str).unwrap_or("");
        let id = req.get("id").and_then(Value::as_u64).unwrap_or(0);
        let text = || req.get("text").and_then(Value::as_str).unwrap_or("").to_string();
        match op {
            "open" => {
                let left = req.get("left").and_then(Value::as_str).unwrap_or("");
                let right = req.get("right").and_then(Value::as_str).unwrap_or("");
                let s = open_session(&self.bundle, left, right);
                let id = self.next_id;
                self.next_id += 1;
                self.sessions.insert(id, s);
                self.status(id)
            }
            "advance" | "advance_token" => {
                let t = text();
                match self.sessions.get(&id) {
                    Some(s) => {
                        let ns = s.advance_str(&t);
                        self.sessions.insert(id, ns);
                        self.status(id)
                    }
                    None => json!({"id": id, "error": "no such session"}),
                }
            }
            "may_stop" => self.status(id),
            "mask" => {
                let v = match self.vocab_from(&req) {
                    Ok(v) => v.clone(),
                    Err(e) => return json!({"id": id, "error": e}),
                };
                match self.sessions.get(&id) {
                    Some(s) => {
                        let mask: Vec<usize> = s.token_mask(&v).into_iter().collect();
                        json!({
                            "id": id,
                            "alive": s.alive(),
                            "may_stop": s.may_stop(),
                            "mask": mask,
                        })
                    }
                    None => json!({"id": id, "error": "no such session"}),
                }
            }
            "fork" => match self.sessions.get(&id) {
                Some(s) => {
                    let forked = s.clone();
                    let nid = self.next_id;
                    self.next_id += 1;
                    self.sessions.insert(nid, forked);
                    self.status(nid)
                }
                None => json!({"id": id, "error": "no such session"}),
            },
            "close" => match self.sessions.remove(&id) {
                Some(_) => json!({"id": id, "alive": false, "may_stop": false}),
                None => json!({"id": id, "error": "no such session"}),
            },
            other => json!({"id": id, "error": format!("unknown op {other:?}")}),
        }
    }
}

fn cmd_serve(
    grammar: &Option<PathBuf>,
    lexemes: &Option<PathBuf>,
    lex_rule: LexRule,
) -> Result<i32> {
    let mut daemon = Daemon::new(load_bundle(grammar, lexemes, lex_rule)?);
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for line in stdin.lock().lines() {
        let line = line.context("reading request")?;
        if line.trim().is_empty() {
            continue;
        }
        let resp = daemon.handle(&line);
        writeln!(out, "{resp}").context("writing response")?;
        out.flush().ok();
    }
    Ok(0)
}

/// Character offsets at which the file's lexeme spans start or end;
/// cutting there never lands mid-symbol.
fn boundary_offsets(bundle: &PythonBundle, text: &str) -> Vec<usize> {
    let mut offs: BTreeSet<usize> = [0, text.chars().count()].into();
    if let Ok(spans) = batch_lex(&bundle.lexemes, text, LexMode::PythonRule) {
        for (_, start, len) in spans {
            offs.insert(start);
            offs.insert(start + len);
        }
    }
    offs.into_iter().collect()
}

fn cmd_corpus_eval(corpus: &Path, seed: u64, splits: usize, mode: SplitMode) -> Result<i32> {
    let bundle = Rc::new(PythonBundle::builtin());
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus)
        .with_context(|| format!("reading {}", corpus.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|x| x == "py").unwrap_or(false))
        .collect();
    files.sort();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0usize;
    let mut ok = 0usize;
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    let mut failures: Vec<String> = Vec::new();
    for path in &files {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        if fimparse_core::python3::parse_program(&bundle, &text) != Ok(true) {
            failures.push(format!("{name},-,file,unsupported-construct"));
            continue;
        }
        let chars: Vec<char> = text.chars().collect();
        let n = chars.len();
        let offs = boundary_offsets(&bundle, &text);
        for k in 0..splits {
            let lo = n / 10;
            let hi = (9 * n) / 10;
            let (mut i, mut j) = if hi <= lo {
                (0, n)
            } else {
                let a = rng.gen_range(lo..=hi);
                let b = rng.gen_range(lo..=hi);
                (a.min(b), a.max(b))
            };
            if mode == SplitMode::Boundary {
                let snap = |x: usize| {
                    *offs
                        .iter()
                        .min_by_key(|&&o| (o as i64 - x as i64).abs())
                        .unwrap_or(&x)
                };
                i = snap(i);
                j = snap(j).max(i);
            }
            let left: String = chars[..i].iter().collect();
            let middle: String = chars[i..j].iter().collect();
            let right: String = chars[j..].iter().collect();
            total += 1;
            let mut s = Session::open_python(Rc::clone(&bundle), &left, &right, 64);
            *histogram.entry(s.sublanguage_count()).or_default() += 1;
            if !s.alive() {
                failures.push(format!("{name},{k},open,unclassified"));
                continue;
            }
            let mut rejected = None;
            for (ci, c) in middle.chars().enumerate() {
                s = s.advance(c);
                if !s.alive() {
                    rejected = Some(ci);
                    break;
                }
            }
            if let Some(ci) = rejected {
                failures.push(format!("{name},{k},replay@{ci},unclassified"));
                continue;
            }
            if !s.may_stop() {
                failures.push(format!("{name},{k},may_stop,unclassified"));
                continue;
            }
            ok += 1;
        }
    }
    println!("files: {}", files.len());
    println!("splits: {total}");
    println!("ok: {ok}");
    println!("failed: {}", total - ok);
    println!("histogram:");
    println!("sublanguages,count");
    for (k, v) in &histogram {
        println!("{k},{v}");
    }
    if !failures.is_empty() {
        println!("failures:");
        println!("file,split,stage,class");
        for f in &failures {
            println!("{f}");
        }
    }
    Ok(0)
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Quotient { grammar, lexemes, right, dump_grammar, lex_rule, side } => {
            cmd_quotient(grammar, lexemes, right, *dump_grammar, *lex_rule, *side)
        }
        Cmd::Check { grammar, lexemes, left, middle, right, lex_rule } => {
            cmd_check(grammar, lexemes, left, middle, right, *lex_rule)
        }
        Cmd::Serve { grammar, lexemes, lex_rule } => cmd_serve(grammar, lexemes, *lex_rule),
        Cmd::CorpusEval { corpus, seed, splits, mode } => {
            cmd_corpus_eval(corpus, *seed, *splits, *mode)
        }
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}
