//! Domain types shared by the engine, the generator and the I/O layer.
//!
//! Cores, registers, variables and values are dense integer ids. Display
//! names live in [`Names`]; nothing in the engine depends on them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Largest number of operations a single core may carry. Frontiers are
/// per-core bitmasks.
pub const MAX_OPS_PER_CORE: usize = 64;

/// A concrete value from the finite value universe `0..n_values`.
///
/// Index 0 is the conventional variable-initial value. The register
/// sentinel is not a `Value`; see [`RegisterContent`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Value(pub u32);

impl Value {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Contents of one register cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RegisterContent {
    /// Never loaded. No operation can produce this.
    Initial,
    Value(Value),
}

impl fmt::Display for RegisterContent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegisterContent::Initial => f.write_str("INITIAL"),
            RegisterContent::Value(v) => write!(f, "{v}"),
        }
    }
}

impl From<Value> for RegisterContent {
    fn from(v: Value) -> Self {
        RegisterContent::Value(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Operation {
    /// `register <- [variable]` on the issuing core.
    Load { register: usize, variable: usize },
    /// `[variable] <- value`.
    Store { variable: usize, value: Value },
}

impl Operation {
    pub fn is_load(&self) -> bool {
        matches!(self, Operation::Load { .. })
    }

    pub fn is_store(&self) -> bool {
        matches!(self, Operation::Store { .. })
    }

    pub fn variable(&self) -> usize {
        match *self {
            Operation::Load { variable, .. } | Operation::Store { variable, .. } => variable,
        }
    }

    pub fn validate(&self, config: &LitmusConfig) -> Result<(), ModelError> {
        match *self {
            Operation::Load { register, variable } => {
                config.check_register(register)?;
                config.check_variable(variable)
            }
            Operation::Store { variable, value } => {
                config.check_variable(variable)?;
                config.check_value(value)
            }
        }
    }
}

/// Identity of one program event: core id and 1-based position in that
/// core's sequence. Syntactically equal operations at different positions
/// are different events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EventId {
    pub core: usize,
    pub index: usize,
}

impl EventId {
    pub fn new(core: usize, index: usize) -> Self {
        EventId { core, index }
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}.{}", self.core, self.index)
    }
}

/// One operation sequence per core.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Program {
    cores: Vec<Vec<Operation>>,
}

impl Program {
    /// Builds a program without checking it against a configuration. Every
    /// core must be non-empty.
    pub fn new(cores: Vec<Vec<Operation>>) -> Result<Self, ModelError> {
        if cores.is_empty() {
            return Err(ModelError::NoCores);
        }
        for (core, ops) in cores.iter().enumerate() {
            if ops.is_empty() {
                return Err(ModelError::EmptyCore { core });
            }
            if ops.len() > MAX_OPS_PER_CORE {
                return Err(ModelError::TooManyOperations {
                    core,
                    len: ops.len(),
                    max: MAX_OPS_PER_CORE,
                });
            }
        }
        Ok(Program { cores })
    }

    pub fn cores(&self) -> &[Vec<Operation>] {
        &self.cores
    }

    pub fn n_cores(&self) -> usize {
        self.cores.len()
    }

    pub fn core(&self, core: usize) -> &[Operation] {
        &self.cores[core]
    }

    pub fn total_ops(&self) -> usize {
        self.cores.iter().map(Vec::len).sum()
    }

    /// Every event, ordered by (core, index).
    pub fn events(&self) -> Vec<EventId> {
        self.cores
            .iter()
            .enumerate()
            .flat_map(|(core, ops)| (1..=ops.len()).map(move |index| EventId::new(core, index)))
            .collect()
    }

    pub fn operation_at(&self, event: EventId) -> Result<Operation, ModelError> {
        self.cores
            .get(event.core)
            .and_then(|ops| event.index.checked_sub(1).and_then(|i| ops.get(i)))
            .copied()
            .ok_or(ModelError::EventOutOfRange(event))
    }

    /// Checks the program against the bounds of `config`.
    pub fn validate(&self, config: &LitmusConfig) -> Result<(), ModelError> {
        if self.cores.len() != config.n_cores {
            return Err(ModelError::CoreCountMismatch {
                expected: config.n_cores,
                found: self.cores.len(),
            });
        }
        for (core, ops) in self.cores.iter().enumerate() {
            if ops.len() > config.max_ops_per_core {
                return Err(ModelError::TooManyOperations {
                    core,
                    len: ops.len(),
                    max: config.max_ops_per_core,
                });
            }
            for op in ops {
                op.validate(config)?;
            }
        }
        Ok(())
    }
}

/// Enumerates the events of a program in (core, index) order.
pub fn events_of(program: &Program) -> Vec<EventId> {
    program.events()
}

pub fn operation_at(program: &Program, event: EventId) -> Result<Operation, ModelError> {
    program.operation_at(event)
}

/// A memory order: a sequence of events.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Execution(pub Vec<EventId>);

impl Execution {
    pub fn events(&self) -> &[EventId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<EventId>> for Execution {
    fn from(events: Vec<EventId>) -> Self {
        Execution(events)
    }
}

impl fmt::Display for Execution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Register file and variable store at one step.
///
/// The derived ordering compares all register cells (core-major) before the
/// variable cells; this is the canonical order of outcome sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MachineState {
    pub registers: Vec<Vec<RegisterContent>>,
    pub variables: Vec<Value>,
}

impl MachineState {
    pub fn register(&self, core: usize, register: usize) -> RegisterContent {
        self.registers[core][register]
    }

    pub fn variable(&self, variable: usize) -> Value {
        self.variables[variable]
    }
}

/// Partial constraint on a final state. Unmentioned cells are free.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinalStateSpec {
    pub registers: BTreeMap<(usize, usize), RegisterContent>,
    pub variables: BTreeMap<usize, Value>,
}

impl FinalStateSpec {
    pub fn is_empty(&self) -> bool {
        self.registers.is_empty() && self.variables.is_empty()
    }

    pub fn with_register(mut self, core: usize, register: usize, content: RegisterContent) -> Self {
        self.registers.insert((core, register), content);
        self
    }

    pub fn with_variable(mut self, variable: usize, value: Value) -> Self {
        self.variables.insert(variable, value);
        self
    }

    pub fn validate(&self, config: &LitmusConfig) -> Result<(), ModelError> {
        for (&(core, register), content) in &self.registers {
            config.check_core(core)?;
            config.check_register(register)?;
            if let RegisterContent::Value(v) = content {
                config.check_value(*v)?;
            }
        }
        for (&variable, &value) in &self.variables {
            config.check_variable(variable)?;
            config.check_value(value)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MemoryModel {
    SC,
    TSO,
}

impl MemoryModel {
    pub const ALL: [MemoryModel; 2] = [MemoryModel::SC, MemoryModel::TSO];
}

impl fmt::Display for MemoryModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MemoryModel::SC => "SC",
            MemoryModel::TSO => "TSO",
        })
    }
}

impl std::str::FromStr for MemoryModel {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "SC" => Ok(MemoryModel::SC),
            "TSO" => Ok(MemoryModel::TSO),
            _ => Err(ModelError::UnknownModel(s.trim().to_string())),
        }
    }
}

/// Sizes of the finite universes a litmus test lives in.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LitmusConfig {
    pub n_cores: usize,
    pub n_registers_per_core: usize,
    pub n_variables: usize,
    pub n_values: usize,
    pub max_ops_per_core: usize,
    pub initial_value: Value,
}

impl LitmusConfig {
    pub fn new(
        n_cores: usize,
        n_registers_per_core: usize,
        n_variables: usize,
        n_values: usize,
        max_ops_per_core: usize,
    ) -> Result<Self, ModelError> {
        let config = LitmusConfig {
            n_cores,
            n_registers_per_core,
            n_variables,
            n_values,
            max_ops_per_core,
            initial_value: Value(0),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_initial_value(mut self, value: Value) -> Result<Self, ModelError> {
        self.check_value(value)?;
        self.initial_value = value;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (what, n) in [
            ("cores", self.n_cores),
            ("registers per core", self.n_registers_per_core),
            ("variables", self.n_variables),
            ("values", self.n_values),
            ("operations per core", self.max_ops_per_core),
        ] {
            if n == 0 {
                return Err(ModelError::ZeroCount(what));
            }
        }
        if self.max_ops_per_core > MAX_OPS_PER_CORE {
            return Err(ModelError::TooManyOperations {
                core: 0,
                len: self.max_ops_per_core,
                max: MAX_OPS_PER_CORE,
            });
        }
        if self.n_values > u32::MAX as usize {
            return Err(ModelError::ValueOutOfRange {
                value: self.n_values as u64,
                n_values: u32::MAX as usize,
            });
        }
        self.check_value(self.initial_value)
    }

    pub fn check_core(&self, core: usize) -> Result<(), ModelError> {
        if core < self.n_cores {
            Ok(())
        } else {
            Err(ModelError::CoreOutOfRange {
                core,
                n_cores: self.n_cores,
            })
        }
    }

    pub fn check_register(&self, register: usize) -> Result<(), ModelError> {
        if register < self.n_registers_per_core {
            Ok(())
        } else {
            Err(ModelError::RegisterOutOfRange {
                register,
                n_registers: self.n_registers_per_core,
            })
        }
    }

    pub fn check_variable(&self, variable: usize) -> Result<(), ModelError> {
        if variable < self.n_variables {
            Ok(())
        } else {
            Err(ModelError::VariableOutOfRange {
                variable,
                n_variables: self.n_variables,
            })
        }
    }

    pub fn check_value(&self, value: Value) -> Result<(), ModelError> {
        if value.index() < self.n_values {
            Ok(())
        } else {
            Err(ModelError::ValueOutOfRange {
                value: value.0 as u64,
                n_values: self.n_values,
            })
        }
    }

    pub fn values(&self) -> impl Iterator<Item = Value> {
        (0..self.n_values as u32).map(Value)
    }
}

/// Display names for ids. Registers use the x86 names `EAX`, `EBX`, `ECX`,
/// `EDX`; variables are named per test.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Names {
    pub variables: Vec<String>,
}

pub const REGISTER_NAMES: [&str; 4] = ["EAX", "EBX", "ECX", "EDX"];

impl Names {
    /// `x`, `y`, `z`, `w`, then `v4`, `v5`, ...
    pub fn default_for(n_variables: usize) -> Self {
        const BASE: [&str; 4] = ["x", "y", "z", "w"];
        let variables = (0..n_variables)
            .map(|i| {
                BASE.get(i)
                    .map_or_else(|| format!("v{i}"), |s| s.to_string())
            })
            .collect();
        Names { variables }
    }

    pub fn variable(&self, variable: usize) -> String {
        self.variables
            .get(variable)
            .cloned()
            .unwrap_or_else(|| format!("v{variable}"))
    }

    pub fn register(register: usize) -> String {
        REGISTER_NAMES
            .get(register)
            .map_or_else(|| format!("r{register}"), |s| s.to_string())
    }

    pub fn variable_id(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Expectation {
    Allowed,
    Forbidden,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LitmusTest {
    pub name: String,
    pub config: LitmusConfig,
    pub names: Names,
    pub program: Program,
    pub condition: FinalStateSpec,
    pub expectation: Expectation,
}

impl LitmusTest {
    pub fn validate(&self) -> Result<(), ModelError> {
        self.config.validate()?;
        self.program.validate(&self.config)?;
        self.condition.validate(&self.config)?;
        if self.names.variables.len() != self.config.n_variables {
            return Err(ModelError::NameTableMismatch {
                names: self.names.variables.len(),
                n_variables: self.config.n_variables,
            });
        }
        Ok(())
    }
}

/// Inputs to exhaustive generation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationConfig {
    pub config: LitmusConfig,
    pub names: Names,
    pub mcm: MemoryModel,
    pub final_spec: FinalStateSpec,
    pub include: BTreeSet<Program>,
    pub exclude: BTreeSet<Program>,
    /// Stores never write the variable-initial value.
    pub values_exclude_initial: bool,
    /// Skip programs in which one core repeats an identical operation.
    pub distinct_operations: bool,
}

impl GenerationConfig {
    pub fn new(config: LitmusConfig, mcm: MemoryModel, final_spec: FinalStateSpec) -> Self {
        let names = Names::default_for(config.n_variables);
        GenerationConfig {
            config,
            names,
            mcm,
            final_spec,
            include: BTreeSet::new(),
            exclude: BTreeSet::new(),
            values_exclude_initial: false,
            distinct_operations: false,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.config.validate()?;
        self.final_spec.validate(&self.config)?;
        for p in self.include.iter().chain(&self.exclude) {
            p.validate(&self.config)?;
        }
        Ok(())
    }
}
