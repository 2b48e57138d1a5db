//! `.litmus` text format: the x86 `MOV` subset of the diy7/herd7 syntax.
//!
//! ```text
//! X86 SB000a
//! { x=0; }
//!  P0          | P1          ;
//!  MOV [x],$1  | MOV [x],$2  ;
//!  MOV EAX,[x] | MOV EAX,[x] ;
//! exists (x=2 /\ 0:EAX=1 /\ 1:EAX=2)
//! ```
//!
//! `MOV [loc],$imm` is a store, `MOV reg,[loc]` a load. Registers are
//! `EAX`, `EBX`, `ECX`, `EDX` (ids 0..3 on every core). Variables get ids in
//! order of first appearance. Values are the integers themselves.
//!
//! Two herd-style info lines carry what the text cannot otherwise express:
//! `Universe=registers:R values:N max-ops:M` when the declared universe is
//! larger than what the test uses, and `Expectation=Unknown`.

use thiserror::Error;

use crate::error::ModelError;
use crate::model::{
    Expectation, FinalStateSpec, LitmusConfig, LitmusTest, Names, Operation, Program,
    RegisterContent, Value, REGISTER_NAMES,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LitmusError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: unsupported instruction `{instruction}`")]
    Unsupported {
        line: usize,
        column: usize,
        instruction: String,
    },
    #[error("{line}:{column}: undeclared {what} `{name}` in condition")]
    Undeclared {
        line: usize,
        column: usize,
        what: &'static str,
        name: String,
    },
    #[error("{line}:{column}: value {value} outside the declared universe of {n_values} values")]
    ValueOutOfUniverse {
        line: usize,
        column: usize,
        value: u64,
        n_values: usize,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("cannot emit: {0}")]
    Emit(String),
}

/// A source position for diagnostics (1-based).
#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

impl Pos {
    fn err(self, message: impl Into<String>) -> LitmusError {
        LitmusError::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn shift(self, by: usize) -> Pos {
        Pos {
            line: self.line,
            column: self.column + by,
        }
    }
}

/// A trimmed slice of a source line with its position.
#[derive(Debug, Clone, Copy)]
struct Span<'a> {
    text: &'a str,
    pos: Pos,
}

impl<'a> Span<'a> {
    fn trimmed(text: &'a str, pos: Pos) -> Self {
        let lead = text.len() - text.trim_start().len();
        Span {
            text: text.trim(),
            pos: pos.shift(lead),
        }
    }

    fn split(self, sep: char) -> Vec<Span<'a>> {
        let mut out = Vec::new();
        let mut start = 0;
        for (i, c) in self.text.char_indices() {
            if c == sep {
                out.push(Span::trimmed(&self.text[start..i], self.pos.shift(start)));
                start = i + c.len_utf8();
            }
        }
        out.push(Span::trimmed(&self.text[start..], self.pos.shift(start)));
        out
    }

    fn split_str(self, sep: &str) -> Vec<Span<'a>> {
        let mut out = Vec::new();
        let mut start = 0;
        while let Some(i) = self.text[start..].find(sep) {
            out.push(Span::trimmed(
                &self.text[start..start + i],
                self.pos.shift(start),
            ));
            start += i + sep.len();
        }
        out.push(Span::trimmed(&self.text[start..], self.pos.shift(start)));
        out
    }
}

fn is_location(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn register_id(s: &str) -> Option<usize> {
    REGISTER_NAMES
        .iter()
        .position(|r| r.eq_ignore_ascii_case(s))
}

fn parse_imm(span: Span) -> Result<u32, LitmusError> {
    let digits = span.text.strip_prefix('$').unwrap_or(span.text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(span.pos.err(format!(
            "expected a decimal immediate, found `{}`",
            span.text
        )));
    }
    digits
        .parse::<u32>()
        .map_err(|_| span.pos.err(format!("immediate `{}` too large", span.text)))
}

/// `[x]` or `x` as a location name.
fn parse_location<'a>(span: Span<'a>, bracketed: bool) -> Result<&'a str, LitmusError> {
    let inner = match span
        .text
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
    {
        Some(inner) => inner.trim(),
        None if bracketed => {
            return Err(span
                .pos
                .err(format!("expected `[location]`, found `{}`", span.text)))
        }
        None => span.text,
    };
    if is_location(inner) {
        Ok(inner)
    } else {
        Err(span.pos.err(format!("invalid location `{inner}`")))
    }
}

/// Variable names in order of first appearance.
#[derive(Default)]
struct VarTable {
    names: Vec<String>,
}

impl VarTable {
    fn intern(&mut self, name: &str) -> usize {
        match self.names.iter().position(|n| n == name) {
            Some(i) => i,
            None => {
                self.names.push(name.to_string());
                self.names.len() - 1
            }
        }
    }

    fn get(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

fn parse_instruction(cell: Span, vars: &mut VarTable) -> Result<Operation, LitmusError> {
    let text = cell.text;
    let mnemonic_end = text.find(char::is_whitespace).unwrap_or(text.len());
    let mnemonic = &text[..mnemonic_end];
    if !mnemonic.eq_ignore_ascii_case("MOV") {
        return Err(LitmusError::Unsupported {
            line: cell.pos.line,
            column: cell.pos.column,
            instruction: text.to_string(),
        });
    }
    let args = Span::trimmed(&text[mnemonic_end..], cell.pos.shift(mnemonic_end));
    let parts = args.split(',');
    let [dst, src] = parts.as_slice() else {
        return Err(cell.pos.err(format!("expected two operands in `{text}`")));
    };
    let unsupported = || LitmusError::Unsupported {
        line: cell.pos.line,
        column: cell.pos.column,
        instruction: text.to_string(),
    };
    if dst.text.starts_with('[') {
        let loc = parse_location(*dst, true)?;
        if src.text.starts_with('[') || register_id(src.text).is_some() {
            return Err(unsupported());
        }
        let value = parse_imm(*src)?;
        Ok(Operation::Store {
            variable: vars.intern(loc),
            value: Value(value),
        })
    } else if let Some(register) = register_id(dst.text) {
        if !src.text.starts_with('[') {
            return Err(unsupported());
        }
        let loc = parse_location(*src, true)?;
        Ok(Operation::Load {
            register,
            variable: vars.intern(loc),
        })
    } else if dst.text.chars().all(|c| c.is_ascii_alphabetic()) {
        Err(unsupported())
    } else {
        Err(dst.pos.err(format!("invalid destination `{}`", dst.text)))
    }
}

/// One condition atom before id resolution.
enum Atom<'a> {
    Variable {
        name: &'a str,
        value: u32,
        pos: Pos,
    },
    Register {
        core: usize,
        register: &'a str,
        content: Option<u32>,
        pos: Pos,
    },
}

fn parse_atom(span: Span<'_>) -> Result<Atom<'_>, LitmusError> {
    let parts = span.split('=');
    let [lhs, rhs] = parts.as_slice() else {
        return Err(span
            .pos
            .err(format!("expected `cell=value`, found `{}`", span.text)));
    };
    if let Some((core, reg)) = lhs.text.split_once(':') {
        let core = core
            .trim()
            .parse::<usize>()
            .map_err(|_| lhs.pos.err(format!("invalid processor in `{}`", lhs.text)))?;
        let content = if rhs.text == "INITIAL" {
            None
        } else {
            Some(parse_imm(*rhs)?)
        };
        Ok(Atom::Register {
            core,
            register: reg.trim(),
            content,
            pos: lhs.pos,
        })
    } else {
        let name = parse_location(*lhs, false)?;
        Ok(Atom::Variable {
            name,
            value: parse_imm(*rhs)?,
            pos: lhs.pos,
        })
    }
}

struct Condition<'a> {
    expectation: Expectation,
    atoms: Vec<Atom<'a>>,
}

fn parse_condition(span: Span<'_>) -> Result<Condition<'_>, LitmusError> {
    let (expectation, rest, skip) = if let Some(r) = span.text.strip_prefix("~exists") {
        (Expectation::Forbidden, r, 7)
    } else if let Some(r) = span.text.strip_prefix("exists") {
        (Expectation::Allowed, r, 6)
    } else if span.text.starts_with("forall") {
        return Err(span.pos.err("`forall` conditions are not supported"));
    } else {
        return Err(span.pos.err(format!(
            "expected `exists` or `~exists`, found `{}`",
            span.text
        )));
    };
    let body = Span::trimmed(rest, span.pos.shift(skip));
    let inner = match body
        .text
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
    {
        Some(inner) => Span::trimmed(inner, body.pos.shift(1)),
        None => body,
    };
    if inner.text.contains("\\/") {
        return Err(inner
            .pos
            .err("disjunction in conditions is not supported; split it into separate tests"));
    }
    if inner.text.contains('(') || inner.text.contains(')') {
        return Err(inner
            .pos
            .err("nested parentheses in conditions are not supported"));
    }
    if inner.text.is_empty() {
        return Err(inner
            .pos
            .err("empty condition; write `true` for no constraint"));
    }
    if inner.text == "true" {
        return Ok(Condition {
            expectation,
            atoms: Vec::new(),
        });
    }
    let atoms = inner
        .split_str("/\\")
        .into_iter()
        .map(parse_atom)
        .collect::<Result<_, _>>()?;
    Ok(Condition { expectation, atoms })
}

/// Universe sizes implied by a test's own contents.
fn inferred_universe(
    program: &Program,
    condition: &FinalStateSpec,
    initial: Value,
) -> (usize, usize, usize) {
    let mut regs = 1;
    let mut max_value = initial.0;
    for op in program.cores().iter().flatten() {
        match *op {
            Operation::Load { register, .. } => regs = regs.max(register + 1),
            Operation::Store { value, .. } => max_value = max_value.max(value.0),
        }
    }
    for (&(_, r), content) in &condition.registers {
        regs = regs.max(r + 1);
        if let RegisterContent::Value(v) = content {
            max_value = max_value.max(v.0);
        }
    }
    for v in condition.variables.values() {
        max_value = max_value.max(v.0);
    }
    let max_ops = program.cores().iter().map(Vec::len).max().unwrap_or(1);
    (regs, max_value as usize + 1, max_ops)
}

struct Universe {
    registers: usize,
    values: usize,
    max_ops: usize,
    pos: Pos,
}

fn parse_universe(span: Span) -> Result<Universe, LitmusError> {
    let mut registers = None;
    let mut values = None;
    let mut max_ops = None;
    for word in span.text.split_whitespace() {
        let (k, v) = word
            .split_once(':')
            .ok_or_else(|| span.pos.err(format!("malformed Universe entry `{word}`")))?;
        let n: usize = v
            .parse()
            .map_err(|_| span.pos.err(format!("malformed Universe count `{word}`")))?;
        match k {
            "registers" => registers = Some(n),
            "values" => values = Some(n),
            "max-ops" => max_ops = Some(n),
            _ => return Err(span.pos.err(format!("unknown Universe key `{k}`"))),
        }
    }
    match (registers, values, max_ops) {
        (Some(registers), Some(values), Some(max_ops)) => Ok(Universe {
            registers,
            values,
            max_ops,
            pos: span.pos,
        }),
        _ => Err(span.pos.err("Universe needs registers, values and max-ops")),
    }
}

/// Parses one litmus test.
pub fn parse_litmus(text: &str) -> Result<LitmusTest, LitmusError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| {
            Span::trimmed(
                strip_comment(l),
                Pos {
                    line: i + 1,
                    column: 1,
                },
            )
        })
        .filter(|s| !s.text.is_empty())
        .peekable();
    let end = Pos {
        line: text.lines().count().max(1),
        column: 1,
    };

    let header = lines.next().ok_or_else(|| end.err("empty input"))?;
    let mut words = header.text.split_whitespace();
    let arch = words.next().unwrap_or_default();
    if !arch.eq_ignore_ascii_case("X86") {
        return Err(header
            .pos
            .err(format!("unsupported architecture `{arch}`, expected X86")));
    }
    let name = words
        .next()
        .ok_or_else(|| header.pos.err("missing test name"))?
        .to_string();
    if words.next().is_some() {
        return Err(header.pos.err("test name must be a single word"));
    }

    // Info lines up to the initial state.
    let mut universe = None;
    let mut unknown_expectation = false;
    while let Some(line) = lines.peek().copied() {
        if line.text.starts_with('{') {
            break;
        }
        lines.next();
        if line.text.starts_with('"') {
            continue;
        }
        let Some((key, value)) = line.text.split_once('=') else {
            return Err(line.pos.err(format!(
                "expected `{{` or an info line, found `{}`",
                line.text
            )));
        };
        let value_span = Span::trimmed(value, line.pos.shift(key.len() + 1));
        match key.trim() {
            "Universe" => universe = Some(parse_universe(value_span)?),
            "Expectation" => match value_span.text {
                "Unknown" => unknown_expectation = true,
                "Allowed" | "Forbidden" => {}
                other => return Err(value_span.pos.err(format!("unknown expectation `{other}`"))),
            },
            _ => {}
        }
    }

    // Initial state, possibly over several lines.
    let open = lines
        .next()
        .ok_or_else(|| end.err("missing initial state `{ ... }`"))?;
    let mut init_parts = vec![Span::trimmed(&open.text[1..], open.pos.shift(1))];
    let mut closed = false;
    loop {
        let last = init_parts.last_mut().unwrap();
        if let Some(i) = last.text.find('}') {
            if !last.text[i + 1..].trim().is_empty() {
                return Err(last.pos.shift(i + 1).err("unexpected text after `}`"));
            }
            *last = Span::trimmed(&last.text[..i], last.pos);
            closed = true;
            break;
        }
        match lines.next() {
            Some(l) => init_parts.push(l),
            None => break,
        }
    }
    if !closed {
        return Err(open.pos.err("unterminated initial state"));
    }
    let mut vars = VarTable::default();
    let mut initial: Option<(u32, Pos)> = None;
    for part in init_parts {
        for assign in part.split(';').into_iter().filter(|a| !a.text.is_empty()) {
            let sides = assign.split('=');
            let [lhs, rhs] = sides.as_slice() else {
                return Err(assign.pos.err(format!(
                    "expected `location=value`, found `{}`",
                    assign.text
                )));
            };
            if lhs.text.contains(':') {
                return Err(lhs
                    .pos
                    .err("register initialisation is not supported; registers start INITIAL"));
            }
            let loc = parse_location(*lhs, false)?;
            let value = parse_imm(*rhs)?;
            vars.intern(loc);
            match initial {
                Some((v, _)) if v != value => {
                    return Err(rhs.pos.err("all variables must share one initial value"));
                }
                _ => initial = Some((value, rhs.pos)),
            }
        }
    }
    let initial_value = Value(initial.map_or(0, |(v, _)| v));

    // Column header.
    let head = lines
        .next()
        .ok_or_else(|| end.err("missing program header `P0 | ... ;`"))?;
    let head_text = head
        .text
        .strip_suffix(';')
        .ok_or_else(|| head.pos.err("program header must end with `;`"))?;
    let columns = Span::trimmed(head_text, head.pos).split('|');
    for (i, col) in columns.iter().enumerate() {
        if col.text != format!("P{i}") {
            return Err(col
                .pos
                .err(format!("expected `P{i}`, found `{}`", col.text)));
        }
    }
    let n_cores = columns.len();

    // Instruction rows.
    let mut cores: Vec<Vec<Operation>> = vec![Vec::new(); n_cores];
    let mut gap: Vec<Option<Pos>> = vec![None; n_cores];
    while let Some(line) = lines.peek().copied() {
        if line.text.starts_with("exists")
            || line.text.starts_with("~exists")
            || line.text.starts_with("forall")
        {
            break;
        }
        lines.next();
        let row = line
            .text
            .strip_suffix(';')
            .ok_or_else(|| line.pos.err("instruction row must end with `;`"))?;
        let cells = Span::trimmed(row, line.pos).split('|');
        if cells.len() != n_cores {
            return Err(line.pos.err(format!(
                "row has {} columns, expected {n_cores}",
                cells.len()
            )));
        }
        for (core, cell) in cells.into_iter().enumerate() {
            if cell.text.is_empty() {
                gap[core].get_or_insert(cell.pos);
                continue;
            }
            if let Some(pos) = gap[core] {
                return Err(pos.err(format!("blank cell inside the program of P{core}")));
            }
            cores[core].push(parse_instruction(cell, &mut vars)?);
        }
    }
    for (core, ops) in cores.iter().enumerate() {
        if ops.is_empty() {
            return Err(columns[core]
                .pos
                .err(format!("P{core} has no instructions")));
        }
    }
    let program = Program::new(cores)?;

    // Condition, possibly over several lines.
    let rest: Vec<Span> = lines.collect();
    let (expectation, condition) = if rest.is_empty() {
        (Expectation::Unknown, FinalStateSpec::default())
    } else {
        let joined = rest.iter().map(|s| s.text).collect::<Vec<_>>().join(" ");
        let cond = parse_condition(Span {
            text: &joined,
            pos: rest[0].pos,
        })?;
        let mut spec = FinalStateSpec::default();
        for atom in cond.atoms {
            match atom {
                Atom::Variable { name, value, pos } => {
                    let v = vars.get(name).ok_or(LitmusError::Undeclared {
                        line: pos.line,
                        column: pos.column,
                        what: "variable",
                        name: name.to_string(),
                    })?;
                    if spec
                        .variables
                        .insert(v, Value(value))
                        .is_some_and(|old| old != Value(value))
                    {
                        return Err(pos.err(format!("conflicting values for `{name}`")));
                    }
                }
                Atom::Register {
                    core,
                    register,
                    content,
                    pos,
                } => {
                    let undeclared = || LitmusError::Undeclared {
                        line: pos.line,
                        column: pos.column,
                        what: "register",
                        name: format!("{core}:{register}"),
                    };
                    if core >= n_cores {
                        return Err(undeclared());
                    }
                    let r = register_id(register).ok_or_else(undeclared)?;
                    let content = content.map_or(RegisterContent::Initial, |v| {
                        RegisterContent::Value(Value(v))
                    });
                    if spec
                        .registers
                        .insert((core, r), content)
                        .is_some_and(|old| old != content)
                    {
                        return Err(pos.err(format!("conflicting values for `{core}:{register}`")));
                    }
                }
            }
        }
        (cond.expectation, spec)
    };
    let expectation = if unknown_expectation {
        Expectation::Unknown
    } else {
        expectation
    };

    let (mut n_regs, mut n_values, mut max_ops) =
        inferred_universe(&program, &condition, initial_value);
    let used_regs = program
        .cores()
        .iter()
        .flatten()
        .filter_map(|op| match op {
            Operation::Load { register, .. } => Some(register + 1),
            _ => None,
        })
        .max()
        .unwrap_or(1);
    if let Some(u) = &universe {
        if u.registers < n_regs || u.max_ops < max_ops {
            return Err(u.pos.err("Universe is smaller than what the test uses"));
        }
        if u.values < n_values {
            return Err(LitmusError::ValueOutOfUniverse {
                line: u.pos.line,
                column: u.pos.column,
                value: n_values as u64 - 1,
                n_values: u.values,
            });
        }
        (n_regs, n_values, max_ops) = (u.registers, u.values, u.max_ops);
    } else if n_regs > used_regs {
        // A condition may only name registers the program can load into.
        let (&(core, r), _) = condition
            .registers
            .iter()
            .find(|(&(_, r), _)| r >= used_regs)
            .unwrap();
        return Err(LitmusError::Undeclared {
            line: rest[0].pos.line,
            column: rest[0].pos.column,
            what: "register",
            name: format!("{core}:{}", REGISTER_NAMES[r]),
        });
    }

    let config = LitmusConfig {
        n_cores,
        n_registers_per_core: n_regs,
        n_variables: vars.names.len().max(1),
        n_values,
        max_ops_per_core: max_ops,
        initial_value,
    };
    let mut names = Names {
        variables: vars.names,
    };
    if names.variables.is_empty() {
        return Err(end.err("test uses no variables"));
    }
    names.variables.truncate(config.n_variables);
    let test = LitmusTest {
        name,
        config,
        names,
        program,
        condition,
        expectation,
    };
    test.validate()?;
    Ok(test)
}

fn strip_comment(line: &str) -> &str {
    match (line.find("(*"), line.rfind("*)")) {
        (Some(0), Some(_)) => "",
        _ => line,
    }
}

fn instruction_text(op: &Operation, names: &Names) -> String {
    match *op {
        Operation::Load { register, variable } => {
            format!(
                "MOV {},[{}]",
                REGISTER_NAMES[register],
                names.variable(variable)
            )
        }
        Operation::Store { variable, value } => {
            format!("MOV [{}],${}", names.variable(variable), value)
        }
    }
}

/// Condition body without the `exists` wrapper: variables first, then
/// registers by (core, register).
pub fn condition_text(spec: &FinalStateSpec, names: &Names) -> String {
    let mut atoms: Vec<String> = spec
        .variables
        .iter()
        .map(|(&v, value)| format!("{}={value}", names.variable(v)))
        .collect();
    atoms.extend(
        spec.registers
            .iter()
            .map(|(&(c, r), content)| format!("{c}:{}={content}", Names::register(r))),
    );
    if atoms.is_empty() {
        "true".to_string()
    } else {
        atoms.join(" /\\ ")
    }
}

/// Canonical text of a test. `parse_litmus` inverts it exactly.
pub fn emit_litmus(test: &LitmusTest) -> Result<String, LitmusError> {
    test.validate()?;
    if test.config.n_registers_per_core > REGISTER_NAMES.len() {
        return Err(LitmusError::Emit(format!(
            "{} registers per core; the x86 syntax names only {}",
            test.config.n_registers_per_core,
            REGISTER_NAMES.len()
        )));
    }
    if test.name.is_empty() || test.name.contains(char::is_whitespace) {
        return Err(LitmusError::Emit(format!(
            "test name `{}` must be one word",
            test.name
        )));
    }
    for name in &test.names.variables {
        if !is_location(name) {
            return Err(LitmusError::Emit(format!(
                "variable name `{name}` is not a location"
            )));
        }
    }
    let mut out = format!("X86 {}\n", test.name);
    if test.expectation == Expectation::Unknown {
        out.push_str("Expectation=Unknown\n");
    }
    let (regs, values, max_ops) =
        inferred_universe(&test.program, &test.condition, test.config.initial_value);
    let c = &test.config;
    if (regs, values, max_ops) != (c.n_registers_per_core, c.n_values, c.max_ops_per_core) {
        out.push_str(&format!(
            "Universe=registers:{} values:{} max-ops:{}\n",
            c.n_registers_per_core, c.n_values, c.max_ops_per_core
        ));
    }
    let init: String = test
        .names
        .variables
        .iter()
        .map(|v| format!(" {v}={};", c.initial_value))
        .collect();
    out.push_str(&format!("{{{init} }}\n"));

    let columns: Vec<Vec<String>> = test
        .program
        .cores()
        .iter()
        .enumerate()
        .map(|(core, ops)| {
            std::iter::once(format!("P{core}"))
                .chain(ops.iter().map(|op| instruction_text(op, &test.names)))
                .collect()
        })
        .collect();
    let widths: Vec<usize> = columns
        .iter()
        .map(|col| col.iter().map(String::len).max().unwrap_or(0))
        .collect();
    let rows = columns.iter().map(Vec::len).max().unwrap_or(0);
    for row in 0..rows {
        let cells: Vec<String> = columns
            .iter()
            .zip(&widths)
            .map(|(col, &w)| format!(" {:<w$} ", col.get(row).map_or("", String::as_str)))
            .collect();
        out.push_str(&cells.join("|"));
        out.push_str(";\n");
    }
    let body = condition_text(&test.condition, &test.names);
    match test.expectation {
        Expectation::Allowed => out.push_str(&format!("exists ({body})\n")),
        Expectation::Forbidden => out.push_str(&format!("~exists ({body})\n")),
        Expectation::Unknown if !test.condition.is_empty() => {
            out.push_str(&format!("exists ({body})\n"))
        }
        Expectation::Unknown => {}
    }
    Ok(out)
}
