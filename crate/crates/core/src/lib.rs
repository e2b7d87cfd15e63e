//! Leveled modal type theory: kernel, checker, rewriting, translations and
//! co-Kleisli semantics over finite sets.

pub mod binding;
pub mod checker;
pub mod corpus;
pub mod fincat;
pub mod kernel;
pub mod rewrite;
pub mod semantics;
pub mod translate;
pub mod syntax;

pub use checker::{check, CheckError, Derivation, Mode, Rule};
pub use kernel::{alpha_eq, strip_pad, well_formed, Context, Judgment, Level, Stack, Term, Type};
pub use syntax::{parse_file, parse_judgment, parse_term, parse_type, Decl, Signature, SyntaxError};
