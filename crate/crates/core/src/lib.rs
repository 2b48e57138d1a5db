//! Operational memory-consistency-model engine for SC and TSO.
//!
//! A litmus test is a small per-core program of loads and stores. Under a
//! memory model, its valid executions are the interleavings that keep every
//! program-order pair the model preserves. This crate replays executions,
//! enumerates them, collects the distinct final states they reach, searches
//! for a witness of a final-state condition, and generates every program of
//! a bounded configuration that admits such a witness.

pub mod engine;
pub mod error;
pub mod generator;
pub mod io;
pub mod model;
pub mod ordering;
pub mod semantics;

pub use engine::{
    check_allowed, count_stats, enumerate_executions, oracle_executions, reachable_final_states,
    OutcomeSet, SearchOptions, Stats,
};
pub use error::ModelError;
pub use generator::{compare_models, generate, GenerateOptions, ProgramSpace};
pub use model::{
    EventId, Execution, Expectation, FinalStateSpec, GenerationConfig, LitmusConfig, LitmusTest,
    MachineState, MemoryModel, Names, Operation, Program, RegisterContent, Value,
};
pub use ordering::{is_valid_execution, preserved};
pub use semantics::{apply, initial_state, matches, replay};
