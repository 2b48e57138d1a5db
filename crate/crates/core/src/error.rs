use thiserror::Error;

use crate::model::EventId;

/// Structural errors: ids out of range, malformed programs or executions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("program has no cores")]
    NoCores,
    #[error("core {core} has no operations")]
    EmptyCore { core: usize },
    #[error("core {core} has {len} operations, at most {max} allowed")]
    TooManyOperations { core: usize, len: usize, max: usize },
    #[error("number of {0} must be at least 1")]
    ZeroCount(&'static str),
    #[error("program has {found} cores, configuration declares {expected}")]
    CoreCountMismatch { expected: usize, found: usize },
    #[error("core {core} out of range (cores: {n_cores})")]
    CoreOutOfRange { core: usize, n_cores: usize },
    #[error("register {register} out of range (registers per core: {n_registers})")]
    RegisterOutOfRange { register: usize, n_registers: usize },
    #[error("variable {variable} out of range (variables: {n_variables})")]
    VariableOutOfRange { variable: usize, n_variables: usize },
    #[error("value {value} out of range (values: {n_values})")]
    ValueOutOfRange { value: u64, n_values: usize },
    #[error("event {0} does not exist in the program")]
    EventOutOfRange(EventId),
    #[error("name table lists {names} variables, configuration declares {n_variables}")]
    NameTableMismatch { names: usize, n_variables: usize },
    #[error("unknown memory model `{0}`")]
    UnknownModel(String),
    #[error("execution is not a permutation of the program's events: {0}")]
    NotAPermutation(PermutationDefect),
    #[error("execution has {found} events, program has {expected}")]
    ExecutionLength { expected: usize, found: usize },
}

/// What makes an execution fail to be a permutation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermutationDefect {
    #[error("event {0} is missing")]
    Missing(EventId),
    #[error("event {0} occurs more than once")]
    Duplicated(EventId),
    #[error("event {0} is not part of the program")]
    Unknown(EventId),
}
