//! The `mcm` command line: check, outcomes, generate, compare.
//!
//! Exit codes: 0 when the expectation is confirmed or the work completed,
//! 2 when a litmus test's expectation is violated, 1 on usage, parse or
//! configuration errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use mcm_core::engine::{
    check_allowed, enumerate_executions, reachable_final_states, SearchOptions,
};
use mcm_core::generator::{compare_models, generate, litmus_test_for, GenerateOptions};
use mcm_core::io::litmus::{emit_litmus, parse_litmus};
use mcm_core::io::native::{generated_name, parse_param, ParamFile};
use mcm_core::io::report::{
    emit_report, CheckReport, ComparisonSummary, Format, GenerationSummary, OutcomesReport, Report,
};
use mcm_core::model::{LitmusTest, MemoryModel, Program};
use mcm_core::semantics::final_state;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATED: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvocationResult {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Human,
    Structured,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Human => Format::Human,
            FormatArg::Structured => Format::Structured,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mcm",
    version,
    about = "Litmus test checking and generation for SC and TSO"
)]
struct Cli {
    /// Worker threads; 1 runs everything on the calling thread.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    threads: u16,

    /// Plain text, or pretty-printed JSON.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Human)]
    format: FormatArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Search for an execution reaching the test's condition.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = MemoryModel::TSO)]
        mcm: MemoryModel,
        /// Print one witnessing execution.
        #[arg(long)]
        witness: bool,
    },
    /// List the distinct final states, ignoring the condition by default.
    Outcomes {
        file: PathBuf,
        #[arg(long, default_value_t = MemoryModel::TSO)]
        mcm: MemoryModel,
        #[arg(long)]
        count_only: bool,
        /// Keep only outcomes matching the condition.
        #[arg(long)]
        respect_condition: bool,
    },
    /// Generate every test of a parameter file's space that meets its final state.
    Generate {
        param: PathBuf,
        /// Directory receiving one .litmus file per test and a summary.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the parameter file's model.
        #[arg(long)]
        mcm: Option<MemoryModel>,
        /// Stores never write the variables' initial value.
        #[arg(long)]
        values_exclude_initial: bool,
        /// Skip programs in which a core repeats an identical operation.
        #[arg(long)]
        distinct_operations: bool,
    },
    /// Partition a program set by which of two models admit the final state.
    Compare {
        param: PathBuf,
        /// Model whose preserved orderings include the relaxed model's.
        #[arg(long, default_value_t = MemoryModel::SC)]
        strict: MemoryModel,
        #[arg(long, default_value_t = MemoryModel::TSO)]
        relaxed: MemoryModel,
        /// Read the programs from the .litmus files of a directory.
        #[arg(long)]
        programs: Option<PathBuf>,
        /// Stores never write the variables' initial value.
        #[arg(long)]
        values_exclude_initial: bool,
        /// Skip programs in which a core repeats an identical operation.
        #[arg(long)]
        distinct_operations: bool,
    },
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> InvocationResult
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                InvocationResult {
                    code: EXIT_ERROR,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                InvocationResult {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads as usize)
        .build()
    {
        Ok(p) => p,
        Err(e) => return failure(anyhow::Error::new(e).context("cannot start worker threads")),
    };
    match pool.install(|| dispatch(&cli)) {
        Ok((code, stdout)) => InvocationResult {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(e) => failure(e),
    }
}

fn failure(e: anyhow::Error) -> InvocationResult {
    InvocationResult {
        code: EXIT_ERROR,
        stdout: String::new(),
        stderr: format!("error: {e:#}\n"),
    }
}

fn dispatch(cli: &Cli) -> Result<(i32, String)> {
    let format = Format::from(cli.format);
    let parallel = cli.threads > 1;
    let search = SearchOptions {
        memoize: true,
        parallel,
    };
    match &cli.command {
        Command::Check { file, mcm, witness } => {
            let test = read_litmus(file)?;
            let found = check_allowed(&test.config, &test.program, *mcm, &test.condition, search);
            let state = found
                .as_ref()
                .map(|e| final_state(&test.config, &test.program, e))
                .transpose()?;
            let report =
                CheckReport::new(&test, *mcm, found.as_ref().zip(state.as_ref()), *witness);
            let code = if report.violated() {
                EXIT_VIOLATED
            } else {
                EXIT_OK
            };
            Ok((code, emit_report(&Report::Check(report), format)))
        }
        Command::Outcomes {
            file,
            mcm,
            count_only,
            respect_condition,
        } => {
            let test = read_litmus(file)?;
            let mut outcomes = reachable_final_states(&test.config, &test.program, *mcm, search);
            if *respect_condition {
                outcomes = outcomes.filtered(&test.condition);
            }
            let executions = enumerate_executions(&test.program, *mcm).count() as u64;
            let report = OutcomesReport::new(
                &test,
                *mcm,
                executions,
                &outcomes,
                respect_condition.then_some(&test.condition),
                *count_only,
            );
            Ok((EXIT_OK, emit_report(&Report::Outcomes(report), format)))
        }
        Command::Generate {
            param,
            out,
            mcm,
            values_exclude_initial,
            distinct_operations,
        } => {
            let mut file = read_param(param, *values_exclude_initial, *distinct_operations)?;
            if let Some(m) = mcm {
                file.generation.mcm = *m;
            }
            let gen = &file.generation;
            let report = generate(gen, GenerateOptions { parallel })?;
            let names: Vec<String> = report
                .accepted
                .iter()
                .map(|a| test_name(&file, &a.program))
                .collect();
            let summary = emit_report(
                &Report::Generation(GenerationSummary::new(
                    &report,
                    &gen.final_spec,
                    &gen.names,
                    &names,
                )),
                format,
            );
            if let Some(dir) = out {
                fs::create_dir_all(dir)
                    .with_context(|| format!("cannot create {}", dir.display()))?;
                for (a, name) in report.accepted.iter().zip(&names) {
                    let text = emit_litmus(&litmus_test_for(gen, &a.program, name.clone()))?;
                    write(&dir.join(format!("{name}.litmus")), &text)?;
                }
                let summary_file = match format {
                    Format::Human => "summary.txt",
                    Format::Structured => "summary.json",
                };
                write(&dir.join(summary_file), &summary)?;
            }
            Ok((EXIT_OK, summary))
        }
        Command::Compare {
            param,
            strict,
            relaxed,
            programs,
            values_exclude_initial,
            distinct_operations,
        } => {
            let file = read_param(param, *values_exclude_initial, *distinct_operations)?;
            let gen = &file.generation;
            let set: Vec<Program> = if !gen.include.is_empty() {
                gen.include
                    .iter()
                    .filter(|p| !gen.exclude.contains(p))
                    .cloned()
                    .collect()
            } else if let Some(dir) = programs {
                read_program_dir(dir)?
                    .into_iter()
                    .filter(|p| !gen.exclude.contains(p))
                    .collect()
            } else {
                let mut relaxed_gen = gen.clone();
                relaxed_gen.mcm = *relaxed;
                generate(&relaxed_gen, GenerateOptions { parallel })?
                    .accepted
                    .into_iter()
                    .map(|a| a.program)
                    .collect()
            };
            let report = compare_models(
                &gen.config,
                &set,
                *strict,
                *relaxed,
                &gen.final_spec,
                GenerateOptions { parallel },
            )?;
            let summary = ComparisonSummary::new(&report, &gen.final_spec, &gen.names);
            Ok((EXIT_OK, emit_report(&Report::Comparison(summary), format)))
        }
    }
}

fn test_name(file: &ParamFile, program: &Program) -> String {
    file.name_map
        .get(program)
        .cloned()
        .unwrap_or_else(|| generated_name(program, &file.generation.names))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn read_litmus(path: &Path) -> Result<LitmusTest> {
    parse_litmus(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn read_param(
    path: &Path,
    values_exclude_initial: bool,
    distinct_operations: bool,
) -> Result<ParamFile> {
    let mut file = parse_param(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    file.generation.values_exclude_initial |= values_exclude_initial;
    file.generation.distinct_operations |= distinct_operations;
    Ok(file)
}

/// Programs of every `.litmus` file in `dir`, in file-name order.
fn read_program_dir(dir: &Path) -> Result<Vec<Program>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|x| x == "litmus"));
    paths.sort();
    paths.iter().map(|p| Ok(read_litmus(p)?.program)).collect()
}
