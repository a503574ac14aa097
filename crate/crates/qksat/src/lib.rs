//! Satisfiability solving and justification analysis for a quantified
//! multi-modal logic of information sources.
//!
//! Information sources (sensors, rules, goals) are *atoms*; any nonempty set
//! of atoms is an *instance* whose information is the deductive closure of
//! its members' combined information. The library decides satisfiability of
//! formulas that mix per-instance modal operators with bounded quantification
//! over instances, extracts and verifies Kripke models, and answers
//! justifiability, belief, and inconsistent-core queries over a set of
//! asserted sources.
//!
//! Three independent decision routes keep each other honest: a prefixed
//! tableau compiled lazily to Boolean clauses ([`tableau`]), quantifier
//! elimination by finite expansion ([`expansion`]), and a tiny-scale
//! brute-force model search ([`semantics::brute_force_sat`]).
//!
//! See the `book/` guide for a worked tour; its code snippets run as
//! doctests of this crate.

pub mod expansion;
pub mod formula;
pub mod generate;
pub mod justify;
pub mod parser;
pub mod satcore;
pub mod selfcheck;
pub mod semantics;
pub mod signature;
pub mod tableau;

pub use formula::{Formula, Modality, NnfFormula, QuantifierBounds};
pub use parser::{parse_formula, parse_problem, render, Problem, Query};
pub use semantics::{KripkeModel, XValuation};
pub use signature::{Instance, Signature};
pub use tableau::{solve, solve_with, TableauOptions, Verdict};

#[cfg(doctest)]
mod book {
    //! The guide's chapters double as doctests: every fenced Rust block in
    //! `book/src` compiles and runs against the current crate.
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(language, "../../../book/src/language.md");
    chapter!(semantics, "../../../book/src/semantics.md");
    chapter!(quantifiers, "../../../book/src/quantifiers.md");
    chapter!(boolean_core, "../../../book/src/boolean-core.md");
    chapter!(solver, "../../../book/src/solver.md");
    chapter!(justification, "../../../book/src/justification.md");
    chapter!(cli, "../../../book/src/cli.md");
}
