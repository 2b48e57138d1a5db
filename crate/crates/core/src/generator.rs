//! Exhaustive litmus-test generation and model comparison.

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{check_allowed, SearchOptions};
use crate::error::ModelError;
use crate::model::{
    Execution, Expectation, FinalStateSpec, GenerationConfig, LitmusConfig, LitmusTest,
    MemoryModel, Operation, Program,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("program space too large to enumerate ({0} candidates)")]
    SpaceTooLarge(u128),
    #[error("{strict} is not stricter than {relaxed}: it drops a pair {relaxed} keeps")]
    NotARelaxation {
        strict: MemoryModel,
        relaxed: MemoryModel,
    },
    #[error("program valid under {strict} but not under {relaxed}")]
    ContainmentViolated {
        strict: MemoryModel,
        relaxed: MemoryModel,
    },
}

/// The candidate programs of a configuration, indexable so that work can be
/// split without materializing the product.
///
/// Per-core sequences are ordered by length, then lexicographically over
/// the sorted operation space; programs are ordered with core 0 as the most
/// significant digit.
#[derive(Debug, Clone)]
pub struct ProgramSpace {
    n_cores: usize,
    operations: Vec<Operation>,
    sequences: Vec<Vec<Operation>>,
    max_ops: usize,
    distinct: bool,
}

impl ProgramSpace {
    pub fn new(
        config: &LitmusConfig,
        values_exclude_initial: bool,
        distinct_operations: bool,
    ) -> Result<Self, GeneratorError> {
        config.validate()?;
        let operations = operation_space(config, values_exclude_initial);
        let mut sequences = Vec::new();
        let mut layer: Vec<Vec<Operation>> = vec![Vec::new()];
        for _ in 0..config.max_ops_per_core {
            let mut next = Vec::new();
            for prefix in &layer {
                for op in &operations {
                    if distinct_operations && prefix.contains(op) {
                        continue;
                    }
                    let mut seq = prefix.clone();
                    seq.push(*op);
                    next.push(seq);
                }
            }
            let size = (sequences.len() + next.len()) as u128;
            match size.checked_pow(config.n_cores as u32) {
                Some(n) if n <= usize::MAX as u128 => {}
                n => return Err(GeneratorError::SpaceTooLarge(n.unwrap_or(u128::MAX))),
            }
            sequences.extend(next.iter().cloned());
            layer = next;
        }
        Ok(ProgramSpace {
            n_cores: config.n_cores,
            operations,
            sequences,
            max_ops: config.max_ops_per_core,
            distinct: distinct_operations,
        })
    }

    pub fn operations(&self) -> &[Operation] {
        &self.operations
    }

    pub fn sequences_per_core(&self) -> usize {
        self.sequences.len()
    }

    pub fn len(&self) -> usize {
        self.sequences.len().pow(self.n_cores as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, mut index: usize) -> Program {
        let base = self.sequences.len();
        let mut cores = vec![Vec::new(); self.n_cores];
        for core in (0..self.n_cores).rev() {
            cores[core] = self.sequences[index % base].clone();
            index /= base;
        }
        Program::new(cores).expect("space sequences are non-empty")
    }

    pub fn iter(&self) -> impl Iterator<Item = Program> + '_ {
        (0..self.len()).map(|i| self.get(i))
    }

    pub fn contains(&self, program: &Program) -> bool {
        program.n_cores() == self.n_cores
            && program.cores().iter().all(|ops| {
                ops.len() <= self.max_ops
                    && ops
                        .iter()
                        .all(|op| self.operations.binary_search(op).is_ok())
                    && (!self.distinct || ops.iter().collect::<BTreeSet<_>>().len() == ops.len())
            })
    }
}

/// All loads and stores of a configuration, sorted.
pub fn operation_space(config: &LitmusConfig, values_exclude_initial: bool) -> Vec<Operation> {
    let mut ops = Vec::new();
    for register in 0..config.n_registers_per_core {
        for variable in 0..config.n_variables {
            ops.push(Operation::Load { register, variable });
        }
    }
    for variable in 0..config.n_variables {
        for value in config.values() {
            if values_exclude_initial && value == config.initial_value {
                continue;
            }
            ops.push(Operation::Store { variable, value });
        }
    }
    ops.sort();
    ops
}

/// Every program of the configuration, all stored values allowed.
pub fn enumerate_programs(
    config: &LitmusConfig,
) -> Result<impl Iterator<Item = Program>, GeneratorError> {
    let space = ProgramSpace::new(config, false, false)?;
    Ok((0..space.len()).map(move |i| space.get(i)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Accepted {
    pub program: Program,
    pub witness: Execution,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationReport {
    pub mcm: MemoryModel,
    pub candidates: u64,
    pub accepted: Vec<Accepted>,
}

impl GenerationReport {
    pub fn programs(&self) -> BTreeSet<Program> {
        self.accepted.iter().map(|a| a.program.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GenerateOptions {
    pub parallel: bool,
}

impl GenerateOptions {
    fn search(self) -> SearchOptions {
        SearchOptions {
            memoize: true,
            parallel: false,
        }
    }
}

/// Programs admitting a valid execution that ends in the final spec.
///
/// With a non-empty include set only those programs (restricted to the
/// configured space) are candidates, in set order; otherwise the whole
/// space is scanned in enumeration order.
pub fn generate(
    gen: &GenerationConfig,
    options: GenerateOptions,
) -> Result<GenerationReport, GeneratorError> {
    gen.validate()?;
    let space = ProgramSpace::new(
        &gen.config,
        gen.values_exclude_initial,
        gen.distinct_operations,
    )?;
    let search = options.search();
    let test = |p: &Program| -> Option<Accepted> {
        if gen.exclude.contains(p) {
            return None;
        }
        check_allowed(&gen.config, p, gen.mcm, &gen.final_spec, search).map(|witness| Accepted {
            program: p.clone(),
            witness,
        })
    };
    let (candidates, accepted) = if gen.include.is_empty() {
        let n = space.len();
        let accepted: Vec<Accepted> = if options.parallel {
            (0..n)
                .into_par_iter()
                .filter_map(|i| test(&space.get(i)))
                .collect()
        } else {
            (0..n).filter_map(|i| test(&space.get(i))).collect()
        };
        (n as u64, accepted)
    } else {
        let pool: Vec<&Program> = gen.include.iter().filter(|p| space.contains(p)).collect();
        let accepted: Vec<Accepted> = if options.parallel {
            pool.par_iter().filter_map(|p| test(p)).collect()
        } else {
            pool.iter().filter_map(|p| test(p)).collect()
        };
        (pool.len() as u64, accepted)
    };
    Ok(GenerationReport {
        mcm: gen.mcm,
        candidates,
        accepted,
    })
}

/// A generated program packaged as an allowed litmus test.
pub fn litmus_test_for(gen: &GenerationConfig, program: &Program, name: String) -> LitmusTest {
    LitmusTest {
        name,
        config: gen.config.clone(),
        names: gen.names.clone(),
        program: program.clone(),
        condition: gen.final_spec.clone(),
        expectation: Expectation::Allowed,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Compared {
    pub program: Program,
    pub strict_witness: Option<Execution>,
    pub relaxed_witness: Option<Execution>,
}

/// Partition of a program set by which models admit the final spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonReport {
    pub strict: MemoryModel,
    pub relaxed: MemoryModel,
    pub both: Vec<Compared>,
    pub relaxed_only: Vec<Compared>,
    pub neither: Vec<Compared>,
}

impl ComparisonReport {
    pub fn total(&self) -> usize {
        self.both.len() + self.relaxed_only.len() + self.neither.len()
    }
}

/// Fails unless every pair `relaxed` preserves is also preserved by
/// `strict`, checked over the configuration's whole operation space.
pub fn check_relaxation(
    config: &LitmusConfig,
    strict: MemoryModel,
    relaxed: MemoryModel,
) -> Result<(), GeneratorError> {
    let ops = operation_space(config, false);
    let (s, r) = (strict.policy(), relaxed.policy());
    for a in &ops {
        for b in &ops {
            if r.preserved(a, b) && !s.preserved(a, b) {
                return Err(GeneratorError::NotARelaxation { strict, relaxed });
            }
        }
    }
    Ok(())
}

pub fn compare_models(
    config: &LitmusConfig,
    programs: &[Program],
    strict: MemoryModel,
    relaxed: MemoryModel,
    final_spec: &FinalStateSpec,
    options: GenerateOptions,
) -> Result<ComparisonReport, GeneratorError> {
    config.validate()?;
    final_spec.validate(config)?;
    check_relaxation(config, strict, relaxed)?;
    for p in programs {
        p.validate(config)?;
    }
    let search = options.search();
    let judge = |p: &Program| Compared {
        program: p.clone(),
        strict_witness: check_allowed(config, p, strict, final_spec, search),
        relaxed_witness: check_allowed(config, p, relaxed, final_spec, search),
    };
    let judged: Vec<Compared> = if options.parallel {
        programs.par_iter().map(judge).collect()
    } else {
        programs.iter().map(judge).collect()
    };
    let mut report = ComparisonReport {
        strict,
        relaxed,
        both: Vec::new(),
        relaxed_only: Vec::new(),
        neither: Vec::new(),
    };
    for c in judged {
        match (c.strict_witness.is_some(), c.relaxed_witness.is_some()) {
            (true, true) => report.both.push(c),
            (false, true) => report.relaxed_only.push(c),
            (false, false) => report.neither.push(c),
            (true, false) => return Err(GeneratorError::ContainmentViolated { strict, relaxed }),
        }
    }
    Ok(report)
}
