//! Shared fixtures for the benchmarks.

use lbox::checker::{attach_levels, check, Derivation, Mode};
use lbox::corpus::{generate, CorpusConfig, Sample};
use lbox::kernel::Judgment;
use lbox::syntax::parse_judgment;

pub const AXIOM_K: &str = r"|- \x. \y. quo ((unq x) (unq y)) : [](A -> B) -> []A -> []B @ 1";

pub fn leveled(src: &str) -> Judgment {
    let raw = parse_judgment(src).expect("fixture parses");
    attach_levels(&raw.unleveled(), raw.level.unwrap_or(0)).expect("fixture levels")
}

pub fn derivation(src: &str) -> Derivation {
    check(Mode::Fitch, &leveled(src)).expect("fixture checks")
}

/// A fixed corpus of well-typed terms.
pub fn corpus(count: usize) -> Vec<Sample> {
    generate(0x5eed, count, &CorpusConfig::default()).samples
}
