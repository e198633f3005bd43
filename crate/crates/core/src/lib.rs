//! Deletion automata and context rewriting.
//!
//! The crate has three layers. At the bottom, [`word`] gives symbols,
//! alphabets, and words with deterministic shortlex ordering. On top of
//! that sit two machine models: [`gjfa`], automata whose rules delete a
//! factor anywhere in the input, and [`crs`], width-bounded context
//! rewriting systems together with the clearing restriction. The top
//! layer is the substance: [`systems`] holds the two built-in systems,
//! the collapse map between their alphabets, the potential function,
//! and the hand-built derivation chains; [`reduction`] compiles a
//! Greibach grammar into a five-state deletion automaton; [`suites`]
//! bundles the cross-checks that replay and confirm all of it.
//!
//! Machines read and write a small line-based text format, documented
//! on the `parse` functions, so everything here can be driven from
//! files as well as from code.

pub mod crs;
pub mod gjfa;
pub mod gnf;
pub mod reduction;
pub mod suites;
pub mod systems;
mod text;
pub mod word;

pub use crs::{
    validate_trace, ClearingRA, ContextRewritingSystem, CrsError, DerivationTrace, Direction,
    Instruction, TraceError, TraceStep,
};
pub use gjfa::{AcceptWitness, Gjfa, GjfaError, ReplayError};
pub use gnf::{GnfError, GnfGrammar, GnfRule};
pub use reduction::{ReductionArtifacts, ReductionError};
pub use suites::{run_all, run_suite, SuiteName, SuiteReport, DEFAULT_SEED};
pub use systems::{
    absorb_chain, builtin_r01, builtin_ruv, in_k, phi, potential, shift_chain,
    spectrum_certificate, BinaryWord, SystemsError, UvWord, MAX_LEVELS,
};
pub use text::{parse_machine, MachineFile, ParseError};
pub use word::{Alphabet, Symbol, Word, WordError};
