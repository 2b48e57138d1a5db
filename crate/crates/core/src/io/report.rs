//! Human and structured (JSON) rendering of engine and generator results.

use serde::Serialize;

use crate::engine::OutcomeSet;
use crate::generator::{Compared, ComparisonReport, GenerationReport};
use crate::io::litmus::condition_text;
use crate::io::native::program_text;
use crate::model::{
    Execution, Expectation, FinalStateSpec, LitmusTest, MachineState, MemoryModel, Names,
    Operation, Program,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Human,
    Structured,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "human" => Ok(Format::Human),
            "structured" => Ok(Format::Structured),
            _ => Err(format!(
                "unknown format `{s}`, expected human or structured"
            )),
        }
    }
}

/// `0:EAX=1; 1:EAX=2; x=2;`: registers by (core, register), then variables.
pub fn state_text(state: &MachineState, names: &Names) -> String {
    let mut cells = Vec::new();
    for (core, regs) in state.registers.iter().enumerate() {
        for (r, content) in regs.iter().enumerate() {
            cells.push(format!("{core}:{}={content};", Names::register(r)));
        }
    }
    for (v, value) in state.variables.iter().enumerate() {
        cells.push(format!("{}={value};", names.variable(v)));
    }
    cells.join(" ")
}

pub fn instruction_text(op: &Operation, names: &Names) -> String {
    match *op {
        Operation::Load { register, variable } => {
            format!(
                "MOV {},[{}]",
                Names::register(register),
                names.variable(variable)
            )
        }
        Operation::Store { variable, value } => {
            format!("MOV [{}],${value}", names.variable(variable))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub core: usize,
    pub instruction: String,
}

/// One execution listed step by step, with the state it ends in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExecutionListing {
    pub steps: Vec<Step>,
    pub final_state: String,
}

impl ExecutionListing {
    pub fn new(
        program: &Program,
        names: &Names,
        execution: &Execution,
        final_state: &MachineState,
    ) -> Self {
        let steps = execution
            .events()
            .iter()
            .map(|e| Step {
                core: e.core,
                instruction: program
                    .operation_at(*e)
                    .map(|op| instruction_text(&op, names))
                    .unwrap_or_else(|_| format!("<{e}>")),
            })
            .collect();
        ExecutionListing {
            steps,
            final_state: state_text(final_state, names),
        }
    }

    fn render(&self, out: &mut String) {
        let width = self
            .steps
            .iter()
            .map(|s| s.instruction.len())
            .max()
            .unwrap_or(0);
        for s in &self.steps {
            out.push_str(&format!("P{:<3} {}\n", s.core, s.instruction));
        }
        out.push_str(&"-".repeat(width + 5));
        out.push('\n');
        out.push_str(&self.final_state);
        out.push('\n');
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub test: String,
    pub model: MemoryModel,
    pub expectation: Expectation,
    pub condition: String,
    pub witness_found: bool,
    /// `confirmed`, `violated`, or `no expectation`.
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ExecutionListing>,
}

impl CheckReport {
    pub fn new(
        test: &LitmusTest,
        mcm: MemoryModel,
        witness: Option<(&Execution, &MachineState)>,
        show_witness: bool,
    ) -> Self {
        let found = witness.is_some();
        let verdict = match (test.expectation, found) {
            (Expectation::Allowed, true) | (Expectation::Forbidden, false) => "confirmed",
            (Expectation::Allowed, false) | (Expectation::Forbidden, true) => "violated",
            (Expectation::Unknown, _) => "no expectation",
        };
        CheckReport {
            test: test.name.clone(),
            model: mcm,
            expectation: test.expectation,
            condition: condition_text(&test.condition, &test.names),
            witness_found: found,
            verdict: verdict.to_string(),
            witness: witness
                .filter(|_| show_witness)
                .map(|(e, s)| ExecutionListing::new(&test.program, &test.names, e, s)),
        }
    }

    pub fn violated(&self) -> bool {
        self.verdict == "violated"
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutcomesReport {
    pub test: String,
    pub model: MemoryModel,
    pub executions: u64,
    pub states: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcomes: Option<Vec<String>>,
}

impl OutcomesReport {
    pub fn new(
        test: &LitmusTest,
        mcm: MemoryModel,
        executions: u64,
        outcomes: &OutcomeSet,
        condition: Option<&FinalStateSpec>,
        count_only: bool,
    ) -> Self {
        OutcomesReport {
            test: test.name.clone(),
            model: mcm,
            executions,
            states: outcomes.len(),
            condition: condition.map(|c| condition_text(c, &test.names)),
            outcomes: (!count_only).then(|| {
                outcomes
                    .states()
                    .map(|s| state_text(s, &test.names))
                    .collect()
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratedTest {
    pub name: String,
    pub program: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenerationSummary {
    pub model: MemoryModel,
    pub condition: String,
    pub candidates: u64,
    pub accepted: usize,
    pub tests: Vec<GeneratedTest>,
}

impl GenerationSummary {
    /// `test_names` holds the name of each accepted program, in order.
    pub fn new(
        report: &GenerationReport,
        spec: &FinalStateSpec,
        names: &Names,
        test_names: &[String],
    ) -> Self {
        GenerationSummary {
            model: report.mcm,
            condition: condition_text(spec, names),
            candidates: report.candidates,
            accepted: report.accepted.len(),
            tests: report
                .accepted
                .iter()
                .zip(test_names)
                .map(|(a, name)| GeneratedTest {
                    name: name.clone(),
                    program: program_text(&a.program, names),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonSummary {
    pub strict: MemoryModel,
    pub relaxed: MemoryModel,
    pub condition: String,
    pub total: usize,
    pub both_count: usize,
    pub relaxed_only_count: usize,
    pub neither_count: usize,
    pub both: Vec<String>,
    pub relaxed_only: Vec<String>,
    pub neither: Vec<String>,
}

impl ComparisonSummary {
    pub fn new(report: &ComparisonReport, spec: &FinalStateSpec, names: &Names) -> Self {
        let texts = |cs: &[Compared]| {
            cs.iter()
                .map(|c| program_text(&c.program, names))
                .collect::<Vec<_>>()
        };
        ComparisonSummary {
            strict: report.strict,
            relaxed: report.relaxed,
            condition: condition_text(spec, names),
            total: report.total(),
            both_count: report.both.len(),
            relaxed_only_count: report.relaxed_only.len(),
            neither_count: report.neither.len(),
            both: texts(&report.both),
            relaxed_only: texts(&report.relaxed_only),
            neither: texts(&report.neither),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Report {
    Check(CheckReport),
    Outcomes(OutcomesReport),
    Generation(GenerationSummary),
    Comparison(ComparisonSummary),
}

const NO_EXECUTION: &str = "no valid execution";

/// Renders a report. Structured output is pretty JSON with fixed key order;
/// both forms end with a newline.
pub fn emit_report(report: &Report, format: Format) -> String {
    match format {
        Format::Structured => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Human => render_human(report),
    }
}

fn render_human(report: &Report) -> String {
    let mut out = String::new();
    match report {
        Report::Check(r) => {
            out.push_str(&format!(
                "Test {} ({}) {:?}\n",
                r.test, r.model, r.expectation
            ));
            out.push_str(&format!("Condition {}\n", r.condition));
            out.push_str(&format!(
                "Witness {}\n",
                if r.witness_found { "found" } else { "none" }
            ));
            out.push_str(&format!("Verdict {}\n", r.verdict));
            if let Some(w) = &r.witness {
                out.push('\n');
                w.render(&mut out);
            }
        }
        Report::Outcomes(r) => {
            out.push_str(&format!("Test {}\n", r.test));
            if let Some(c) = &r.condition {
                out.push_str(&format!("Condition {c}\n"));
            }
            out.push_str(&format!("Executions {}\n", r.executions));
            out.push_str(&format!("States {}\n", r.states));
            if let Some(lines) = &r.outcomes {
                if lines.is_empty() {
                    out.push_str(NO_EXECUTION);
                    out.push('\n');
                }
                for l in lines {
                    out.push_str(l);
                    out.push('\n');
                }
            }
        }
        Report::Generation(r) => {
            out.push_str(&format!("Model {}\n", r.model));
            out.push_str(&format!("Condition {}\n", r.condition));
            out.push_str(&format!("Candidates {}\n", r.candidates));
            out.push_str(&format!("Accepted {}\n", r.accepted));
            for t in &r.tests {
                out.push_str(&format!("{}  {}\n", t.name, t.program));
            }
        }
        Report::Comparison(r) => {
            out.push_str(&format!("Strict {}  Relaxed {}\n", r.strict, r.relaxed));
            out.push_str(&format!("Condition {}\n", r.condition));
            out.push_str(&format!("Programs {}\n", r.total));
            out.push_str(&format!("Both {}\n", r.both_count));
            out.push_str(&format!("{}-only {}\n", r.relaxed, r.relaxed_only_count));
            out.push_str(&format!("Neither {}\n", r.neither_count));
            for (label, list) in [
                ("both", &r.both),
                ("relaxed-only", &r.relaxed_only),
                ("neither", &r.neither),
            ] {
                for p in list.iter() {
                    out.push_str(&format!("{label:<12} {p}\n"));
                }
            }
        }
    }
    out
}
