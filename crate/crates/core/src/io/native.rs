//! Native formats: a one-line program syntax and TOML parameter files.
//!
//! Program syntax, one string per core:
//!
//! ```text
//! st x 1; ld r0 x
//! ```
//!
//! `st <var> <value>` stores, `ld <reg> <var>` loads; registers are `r0`,
//! `r1`, ... (the x86 names `EAX`.. are accepted too). A whole program on
//! one line joins its cores with ` | `.
//!
//! Parameter file schema:
//!
//! ```toml
//! name = "SB000a"                # optional
//! mcm = "SC"                     # SC | TSO
//! cores = 2
//! registers_per_core = 2
//! variables = ["x"]              # names, or a count (x, y, z, w, v4, ...)
//! values = 3                     # value universe 0..values
//! max_ops_per_core = 2
//! initial_value = 0              # optional, default 0
//! values_exclude_initial = false # optional: stores never write initial_value
//! distinct_operations = false    # optional: no core repeats an operation
//! include = [["st x 1; ld r0 x", "st x 2; ld r1 x"]]   # optional
//! exclude = []                                         # optional
//!
//! [final.variables]              # optional
//! x = 2
//! [final.registers]              # optional; "core:register" = value | "INITIAL"
//! "0:r0" = 1
//! "1:r1" = 2
//!
//! [name_map]                     # optional: program text -> test name
//! "st x 1; ld r0 x | st x 2; ld r1 x" = "SB000a"
//! ```

use std::collections::BTreeMap;

use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::error::ModelError;
use crate::model::{
    FinalStateSpec, GenerationConfig, LitmusConfig, MemoryModel, Names, Operation, Program,
    RegisterContent, Value, REGISTER_NAMES,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("malformed parameter file: {0}")]
    Toml(String),
    #[error("missing mandatory key `{0}`")]
    MissingKey(&'static str),
    #[error("unknown memory model `{0}`")]
    UnknownModel(String),
    #[error("invalid register `{0}`")]
    InvalidRegister(String),
    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),
    #[error("invalid register content `{0}`, expected an integer or INITIAL")]
    InvalidContent(String),
    #[error("invalid program `{text}`: {reason}")]
    InvalidProgram { text: String, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn parse_register(s: &str) -> Result<usize, ParamError> {
    let s = s.trim();
    if let Some(i) = REGISTER_NAMES
        .iter()
        .position(|r| r.eq_ignore_ascii_case(s))
    {
        return Ok(i);
    }
    s.strip_prefix('r')
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| ParamError::InvalidRegister(s.to_string()))
}

fn parse_operation(text: &str, names: &Names) -> Result<Operation, String> {
    let words: Vec<&str> = text.split_whitespace().collect();
    let var = |name: &str| {
        names
            .variable_id(name)
            .ok_or_else(|| format!("undeclared variable `{name}`"))
    };
    match words.as_slice() {
        ["st", v, value] => Ok(Operation::Store {
            variable: var(v)?,
            value: Value(
                value
                    .parse()
                    .map_err(|_| format!("invalid value `{value}`"))?,
            ),
        }),
        ["ld", r, v] => Ok(Operation::Load {
            register: parse_register(r).map_err(|e| e.to_string())?,
            variable: var(v)?,
        }),
        _ => Err(format!("cannot read operation `{text}`")),
    }
}

fn parse_core(text: &str, names: &Names) -> Result<Vec<Operation>, String> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|op| parse_operation(op, names))
        .collect()
}

/// Builds a program from one string per core.
pub fn parse_program<S: AsRef<str>>(cores: &[S], names: &Names) -> Result<Program, ParamError> {
    let invalid = |reason: String| ParamError::InvalidProgram {
        text: cores
            .iter()
            .map(AsRef::as_ref)
            .collect::<Vec<_>>()
            .join(" | "),
        reason,
    };
    let ops = cores
        .iter()
        .map(|c| parse_core(c.as_ref(), names))
        .collect::<Result<Vec<_>, _>>()
        .map_err(invalid)?;
    Program::new(ops).map_err(|e| invalid(e.to_string()))
}

/// Parses the one-line form `core0 | core1 | ...`.
pub fn parse_program_line(line: &str, names: &Names) -> Result<Program, ParamError> {
    let cores: Vec<&str> = line.split('|').collect();
    parse_program(&cores, names)
}

fn operation_text(op: &Operation, names: &Names) -> String {
    match *op {
        Operation::Load { register, variable } => {
            format!("ld r{register} {}", names.variable(variable))
        }
        Operation::Store { variable, value } => format!("st {} {value}", names.variable(variable)),
    }
}

/// Per-core program strings.
pub fn core_texts(program: &Program, names: &Names) -> Vec<String> {
    program
        .cores()
        .iter()
        .map(|ops| {
            ops.iter()
                .map(|op| operation_text(op, names))
                .collect::<Vec<_>>()
                .join("; ")
        })
        .collect()
}

/// Canonical one-line program text.
pub fn program_text(program: &Program, names: &Names) -> String {
    core_texts(program, names).join(" | ")
}

/// Stable systematic name: `gen-` and 12 hex digits of the SHA-256 of the
/// canonical program text.
pub fn generated_name(program: &Program, names: &Names) -> String {
    let digest = Sha256::digest(program_text(program, names).as_bytes());
    format!("gen-{}", &hex::encode(digest)[..12])
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawVariables {
    Count(usize),
    Names(Vec<String>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawContent {
    Value(u32),
    Text(String),
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawFinal {
    #[serde(default)]
    registers: BTreeMap<String, RawContent>,
    #[serde(default)]
    variables: BTreeMap<String, u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParam {
    name: Option<String>,
    mcm: Option<String>,
    cores: Option<usize>,
    registers_per_core: Option<usize>,
    variables: Option<RawVariables>,
    values: Option<usize>,
    max_ops_per_core: Option<usize>,
    initial_value: Option<u32>,
    values_exclude_initial: Option<bool>,
    distinct_operations: Option<bool>,
    #[serde(default, rename = "final")]
    final_state: RawFinal,
    #[serde(default)]
    include: Vec<Vec<String>>,
    #[serde(default)]
    exclude: Vec<Vec<String>>,
    #[serde(default)]
    name_map: BTreeMap<String, String>,
}

/// A parsed parameter file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamFile {
    pub name: Option<String>,
    pub generation: GenerationConfig,
    pub name_map: BTreeMap<Program, String>,
}

/// Parses a TOML parameter file.
pub fn parse_param(text: &str) -> Result<ParamFile, ParamError> {
    let raw: RawParam =
        toml::from_str(text).map_err(|e| ParamError::Toml(e.message().to_string()))?;
    let mcm_text = raw.mcm.ok_or(ParamError::MissingKey("mcm"))?;
    let mcm: MemoryModel = mcm_text
        .parse()
        .map_err(|_| ParamError::UnknownModel(mcm_text.clone()))?;
    let names = match raw.variables.ok_or(ParamError::MissingKey("variables"))? {
        RawVariables::Count(n) => Names::default_for(n),
        RawVariables::Names(v) => Names { variables: v },
    };
    let config = LitmusConfig::new(
        raw.cores.ok_or(ParamError::MissingKey("cores"))?,
        raw.registers_per_core
            .ok_or(ParamError::MissingKey("registers_per_core"))?,
        names.variables.len(),
        raw.values.ok_or(ParamError::MissingKey("values"))?,
        raw.max_ops_per_core
            .ok_or(ParamError::MissingKey("max_ops_per_core"))?,
    )?
    .with_initial_value(Value(raw.initial_value.unwrap_or(0)))?;

    let mut spec = FinalStateSpec::default();
    for (cell, content) in &raw.final_state.registers {
        let (core, reg) = cell
            .split_once(':')
            .ok_or_else(|| ParamError::InvalidRegister(cell.clone()))?;
        let core: usize = core
            .trim()
            .parse()
            .map_err(|_| ParamError::InvalidRegister(cell.clone()))?;
        let register = parse_register(reg)?;
        let content = match content {
            RawContent::Value(v) => RegisterContent::Value(Value(*v)),
            RawContent::Text(t) if t == "INITIAL" => RegisterContent::Initial,
            RawContent::Text(t) => return Err(ParamError::InvalidContent(t.clone())),
        };
        spec.registers.insert((core, register), content);
    }
    for (var, &value) in &raw.final_state.variables {
        let id = names
            .variable_id(var)
            .ok_or_else(|| ParamError::UndeclaredVariable(var.clone()))?;
        spec.variables.insert(id, Value(value));
    }

    let programs = |list: &[Vec<String>]| -> Result<Vec<Program>, ParamError> {
        list.iter()
            .map(|cores| {
                let p = parse_program(cores, &names)?;
                p.validate(&config)?;
                Ok(p)
            })
            .collect()
    };
    let include = programs(&raw.include)?.into_iter().collect();
    let exclude = programs(&raw.exclude)?.into_iter().collect();
    let mut name_map = BTreeMap::new();
    for (line, name) in raw.name_map {
        let p = parse_program_line(&line, &names)?;
        name_map.insert(p, name);
    }

    let generation = GenerationConfig {
        config,
        names,
        mcm,
        final_spec: spec,
        include,
        exclude,
        values_exclude_initial: raw.values_exclude_initial.unwrap_or(false),
        distinct_operations: raw.distinct_operations.unwrap_or(false),
    };
    generation.validate()?;
    Ok(ParamFile {
        name: raw.name,
        generation,
        name_map,
    })
}
