//! Incremental parsing engine for fill-in-the-middle constrained generation.
//!
//! The core pipeline: a BNF grammar over lexeme symbols, a maximal-munch
//! lexer described by per-lexeme NFAs, right-quotient construction that turns
//! a fixed right context into a family of sublanguages, and a forkable
//! session that answers per-character "still a prefix?" and "may we stop
//! here?" queries plus token masks for a sampler vocabulary.

pub mod grammar;
pub mod earley;
pub mod nfa;
pub mod quotient;
pub mod lexer;
pub mod lcfl;
pub mod indent;
pub mod python3;
pub mod session;
pub mod oracle;
