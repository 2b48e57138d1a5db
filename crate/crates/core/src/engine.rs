//! Enumeration and decision procedures over valid executions.
//!
//! Valid executions are the linear extensions of the per-core partial
//! orders. The search walks frontiers: one bitmask of already-emitted
//! positions per core, always downward closed. An event is extendable when
//! it is not yet emitted and all of its required predecessors are.
//! Choice points try extendable events in (core, index) order.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::model::{
    EventId, Execution, FinalStateSpec, LitmusConfig, MachineState, MemoryModel, Operation,
    Program, RegisterContent,
};
use crate::ordering::{core_partial_order, is_valid_execution};
use crate::semantics::{initial_state, matches, step};

/// Largest program the permutation oracle accepts.
pub const ORACLE_MAX_EVENTS: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("oracle refuses {0} events (limit {ORACLE_MAX_EVENTS})")]
    TooManyEvents(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Skip search nodes whose (frontier, state) pair was already expanded.
    pub memoize: bool,
    /// Split the top of the search tree across the current rayon pool.
    pub parallel: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            memoize: true,
            parallel: false,
        }
    }
}

/// Search-space description of one program under one model.
struct Space<'a> {
    program: &'a Program,
    preds: Vec<Vec<u64>>,
    total: usize,
}

impl<'a> Space<'a> {
    fn new(program: &'a Program, mcm: MemoryModel) -> Self {
        let preds = program
            .cores()
            .iter()
            .map(|ops| core_partial_order(mcm, ops).predecessor_masks())
            .collect();
        Space {
            program,
            preds,
            total: program.total_ops(),
        }
    }

    fn extendable(&self, frontier: &[u64], core: usize, pos: usize) -> bool {
        let done = frontier[core];
        done >> pos & 1 == 0 && self.preds[core][pos] & !done == 0
    }

    fn op(&self, core: usize, pos: usize) -> &Operation {
        &self.program.core(core)[pos]
    }

    /// Flat (core, position) list in enumeration order.
    fn slots(&self) -> Vec<(usize, usize)> {
        self.program
            .cores()
            .iter()
            .enumerate()
            .flat_map(|(c, ops)| (0..ops.len()).map(move |p| (c, p)))
            .collect()
    }
}

/// Lazy stream of every valid execution, each exactly once.
pub struct Executions<'a> {
    space: Space<'a>,
    slots: Vec<(usize, usize)>,
    frontier: Vec<u64>,
    path: Vec<usize>,
    cursor: Vec<usize>,
    done: bool,
}

impl<'a> Executions<'a> {
    fn new(program: &'a Program, mcm: MemoryModel) -> Self {
        let space = Space::new(program, mcm);
        let slots = space.slots();
        let total = space.total;
        Executions {
            frontier: vec![0; program.n_cores()],
            path: Vec::with_capacity(total),
            cursor: vec![0; total + 1],
            slots,
            space,
            done: false,
        }
    }

    fn pop(&mut self) -> Option<usize> {
        let slot = self.path.pop()?;
        let (c, p) = self.slots[slot];
        self.frontier[c] &= !(1 << p);
        Some(slot)
    }

    fn current(&self) -> Execution {
        Execution(
            self.path
                .iter()
                .map(|&s| {
                    let (c, p) = self.slots[s];
                    EventId::new(c, p + 1)
                })
                .collect(),
        )
    }
}

impl Iterator for Executions<'_> {
    type Item = Execution;

    fn next(&mut self) -> Option<Execution> {
        while !self.done {
            let depth = self.path.len();
            if depth == self.space.total {
                let out = self.current();
                if self.pop().is_none() {
                    self.done = true;
                }
                return Some(out);
            }
            let start = self.cursor[depth];
            let found = (start..self.slots.len()).find(|&s| {
                let (c, p) = self.slots[s];
                self.space.extendable(&self.frontier, c, p)
            });
            match found {
                Some(s) => {
                    let (c, p) = self.slots[s];
                    self.frontier[c] |= 1 << p;
                    self.path.push(s);
                    self.cursor[depth] = s + 1;
                    self.cursor[depth + 1] = 0;
                }
                None => {
                    if self.pop().is_none() {
                        self.done = true;
                    }
                }
            }
        }
        None
    }
}

/// Every execution valid under `mcm`, in deterministic order.
pub fn enumerate_executions(program: &Program, mcm: MemoryModel) -> Executions<'_> {
    Executions::new(program, mcm)
}

/// Brute force: all permutations of the events, filtered by the validity
/// predicate. Independent of the frontier search; meant for testing it.
pub fn oracle_executions(
    program: &Program,
    mcm: MemoryModel,
) -> Result<BTreeSet<Execution>, EngineError> {
    let events = program.events();
    if events.len() > ORACLE_MAX_EVENTS {
        return Err(EngineError::TooManyEvents(events.len()));
    }
    let mut perm: Vec<usize> = (0..events.len()).collect();
    let mut out = BTreeSet::new();
    loop {
        let exec = Execution(perm.iter().map(|&i| events[i]).collect());
        if is_valid_execution(mcm, program, &exec) {
            out.insert(exec);
        }
        if !next_permutation(&mut perm) {
            return Ok(out);
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Distinct final states, each with the first witness found in
/// enumeration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OutcomeSet {
    outcomes: BTreeMap<MachineState, Execution>,
}

impl OutcomeSet {
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn contains(&self, state: &MachineState) -> bool {
        self.outcomes.contains_key(state)
    }

    pub fn witness(&self, state: &MachineState) -> Option<&Execution> {
        self.outcomes.get(state)
    }

    /// Canonically sorted.
    pub fn iter(&self) -> impl Iterator<Item = (&MachineState, &Execution)> {
        self.outcomes.iter()
    }

    pub fn states(&self) -> impl Iterator<Item = &MachineState> {
        self.outcomes.keys()
    }

    pub fn is_subset(&self, other: &OutcomeSet) -> bool {
        self.states().all(|s| other.contains(s))
    }

    /// Keeps the outcomes matching `spec`.
    pub fn filtered(&self, spec: &FinalStateSpec) -> OutcomeSet {
        OutcomeSet {
            outcomes: self
                .outcomes
                .iter()
                .filter(|(s, _)| matches(s, spec))
                .map(|(s, e)| (s.clone(), e.clone()))
                .collect(),
        }
    }

    fn absorb(&mut self, other: OutcomeSet) {
        for (s, e) in other.outcomes {
            self.outcomes.entry(s).or_insert(e);
        }
    }
}

type MemoKey = (Vec<u64>, MachineState);

/// One depth-first walker: mutable state with undo.
struct Walker<'s, 'p> {
    space: &'s Space<'p>,
    frontier: Vec<u64>,
    state: MachineState,
    path: Vec<EventId>,
    visited: Option<HashSet<MemoKey>>,
}

enum Undo {
    Register(usize, usize, RegisterContent),
    Variable(usize, crate::model::Value),
}

impl<'s, 'p> Walker<'s, 'p> {
    fn new(space: &'s Space<'p>, config: &LitmusConfig, memoize: bool) -> Self {
        Walker {
            space,
            frontier: vec![0; space.program.n_cores()],
            state: initial_state(config),
            path: Vec::with_capacity(space.total),
            visited: memoize.then(HashSet::new),
        }
    }

    fn push(&mut self, core: usize, pos: usize) -> Undo {
        let op = *self.space.op(core, pos);
        let undo = match op {
            Operation::Load { register, .. } => {
                Undo::Register(core, register, self.state.registers[core][register])
            }
            Operation::Store { variable, .. } => {
                Undo::Variable(variable, self.state.variables[variable])
            }
        };
        step(&mut self.state, core, &op);
        self.frontier[core] |= 1 << pos;
        self.path.push(EventId::new(core, pos + 1));
        undo
    }

    fn pop(&mut self, core: usize, pos: usize, undo: Undo) {
        match undo {
            Undo::Register(c, r, old) => self.state.registers[c][r] = old,
            Undo::Variable(v, old) => self.state.variables[v] = old,
        }
        self.frontier[core] &= !(1 << pos);
        self.path.pop();
    }

    /// True the first time this node is seen (or always, without memo).
    fn first_visit(&mut self) -> bool {
        match &mut self.visited {
            Some(seen) => seen.insert((self.frontier.clone(), self.state.clone())),
            None => true,
        }
    }

    fn children(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (c, ops) in self.space.program.cores().iter().enumerate() {
            for p in 0..ops.len() {
                if self.space.extendable(&self.frontier, c, p) {
                    out.push((c, p));
                }
            }
        }
        out
    }

    fn collect(&mut self, out: &mut OutcomeSet) {
        if !self.first_visit() {
            return;
        }
        if self.path.len() == self.space.total {
            out.outcomes
                .entry(self.state.clone())
                .or_insert_with(|| Execution(self.path.clone()));
            return;
        }
        for (c, p) in self.children() {
            let undo = self.push(c, p);
            self.collect(out);
            self.pop(c, p, undo);
        }
    }

    fn find(&mut self, goal: &Goal) -> Option<Execution> {
        if !self.first_visit() || goal.hopeless(&self.frontier, &self.state) {
            return None;
        }
        if self.path.len() == self.space.total {
            return matches(&self.state, &goal.spec).then(|| Execution(self.path.clone()));
        }
        for (c, p) in self.children() {
            let undo = self.push(c, p);
            let hit = self.find(goal);
            self.pop(c, p, undo);
            if hit.is_some() {
                return hit;
            }
        }
        None
    }
}

/// A final-state spec plus the masks needed to prune dead branches: once
/// every writer of a constrained cell has run, the cell is final.
struct Goal {
    spec: FinalStateSpec,
    register_writers: Vec<(usize, usize, u64)>,
    variable_writers: Vec<(usize, Vec<u64>)>,
}

impl Goal {
    fn new(program: &Program, spec: &FinalStateSpec) -> Self {
        let mask_of = |ops: &[Operation], pred: &dyn Fn(&Operation) -> bool| -> u64 {
            ops.iter()
                .enumerate()
                .filter(|(_, op)| pred(op))
                .fold(0u64, |m, (i, _)| m | 1 << i)
        };
        let register_writers = spec
            .registers
            .keys()
            .map(|&(core, register)| {
                let ops = program.cores().get(core).map(Vec::as_slice).unwrap_or(&[]);
                let mask = mask_of(
                    ops,
                    &|op| matches!(op, Operation::Load { register: r, .. } if *r == register),
                );
                (core, register, mask)
            })
            .collect();
        let variable_writers = spec
            .variables
            .keys()
            .map(|&variable| {
                let masks = program
                    .cores()
                    .iter()
                    .map(|ops| {
                        mask_of(ops, &|op| {
                            matches!(op, Operation::Store { variable: v, .. } if *v == variable)
                        })
                    })
                    .collect();
                (variable, masks)
            })
            .collect();
        Goal {
            spec: spec.clone(),
            register_writers,
            variable_writers,
        }
    }

    fn hopeless(&self, frontier: &[u64], state: &MachineState) -> bool {
        let reg_dead = self.register_writers.iter().any(|&(c, r, mask)| {
            frontier.get(c).is_some_and(|f| f & mask == mask)
                && state.registers.get(c).and_then(|regs| regs.get(r))
                    != self.spec.registers.get(&(c, r))
        });
        reg_dead
            || self.variable_writers.iter().any(|(v, masks)| {
                masks.iter().zip(frontier).all(|(m, f)| f & m == *m)
                    && state.variables.get(*v) != self.spec.variables.get(v)
            })
    }
}

/// Prefixes of the search tree at `depth`, in enumeration order, used to
/// split work. Each prefix is a list of (core, pos).
fn prefixes(space: &Space, config: &LitmusConfig, depth: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(
        w: &mut Walker,
        depth: usize,
        acc: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if acc.len() == depth || w.path.len() == w.space.total {
            out.push(acc.clone());
            return;
        }
        for (c, p) in w.children() {
            let undo = w.push(c, p);
            acc.push((c, p));
            go(w, depth, acc, out);
            acc.pop();
            w.pop(c, p, undo);
        }
    }
    let mut w = Walker::new(space, config, false);
    let mut out = Vec::new();
    go(&mut w, depth, &mut Vec::new(), &mut out);
    out
}

const SPLIT_DEPTH: usize = 2;

/// Every distinct final state reachable by a valid execution.
pub fn reachable_final_states(
    config: &LitmusConfig,
    program: &Program,
    mcm: MemoryModel,
    options: SearchOptions,
) -> OutcomeSet {
    let space = Space::new(program, mcm);
    if !options.parallel {
        let mut out = OutcomeSet::default();
        Walker::new(&space, config, options.memoize).collect(&mut out);
        return out;
    }
    let parts: Vec<OutcomeSet> = prefixes(&space, config, SPLIT_DEPTH)
        .into_par_iter()
        .map(|prefix| {
            let mut w = Walker::new(&space, config, options.memoize);
            for &(c, p) in &prefix {
                w.push(c, p);
            }
            let mut out = OutcomeSet::default();
            w.collect(&mut out);
            out
        })
        .collect();
    let mut merged = OutcomeSet::default();
    for part in parts {
        merged.absorb(part);
    }
    merged
}

/// Some valid execution whose final state matches `spec`, if one exists.
pub fn check_allowed(
    config: &LitmusConfig,
    program: &Program,
    mcm: MemoryModel,
    spec: &FinalStateSpec,
    options: SearchOptions,
) -> Option<Execution> {
    let space = Space::new(program, mcm);
    let goal = Goal::new(program, spec);
    if !options.parallel {
        return Walker::new(&space, config, options.memoize).find(&goal);
    }
    prefixes(&space, config, SPLIT_DEPTH)
        .into_par_iter()
        .find_map_first(|prefix| {
            let mut w = Walker::new(&space, config, options.memoize);
            for &(c, p) in &prefix {
                w.push(c, p);
            }
            w.find(&goal)
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stats {
    pub executions: u64,
    pub final_states: usize,
}

pub fn count_stats(
    config: &LitmusConfig,
    program: &Program,
    mcm: MemoryModel,
    options: SearchOptions,
) -> Stats {
    Stats {
        executions: enumerate_executions(program, mcm).count() as u64,
        final_states: reachable_final_states(config, program, mcm, options).len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Value;
    use crate::semantics::final_state;

    fn s(variable: usize, v: u32) -> Operation {
        Operation::Store {
            variable,
            value: Value(v),
        }
    }

    fn l(register: usize, variable: usize) -> Operation {
        Operation::Load { register, variable }
    }

    fn reg(v: u32) -> RegisterContent {
        RegisterContent::Value(Value(v))
    }

    fn sb000a() -> (LitmusConfig, Program) {
        (
            LitmusConfig::new(2, 1, 1, 3, 2).unwrap(),
            Program::new(vec![vec![s(0, 1), l(0, 0)], vec![s(0, 2), l(0, 0)]]).unwrap(),
        )
    }

    #[test]
    fn permutation_helper_counts() {
        let mut v = vec![0, 1, 2, 3];
        let mut n = 1;
        while next_permutation(&mut v) {
            n += 1;
        }
        assert_eq!(n, 24);
        assert_eq!(v, vec![3, 2, 1, 0]);
        assert!(!next_permutation(&mut []));
    }

    #[test]
    fn sb_execution_counts() {
        let (_, p) = sb000a();
        assert_eq!(enumerate_executions(&p, MemoryModel::SC).count(), 6);
        assert_eq!(enumerate_executions(&p, MemoryModel::TSO).count(), 24);
        let one = Program::new(vec![vec![s(0, 1), l(0, 0)]]).unwrap();
        assert_eq!(enumerate_executions(&one, MemoryModel::SC).count(), 1);
    }

    #[test]
    fn enumeration_order_is_core_index_first() {
        let (_, p) = sb000a();
        let first = enumerate_executions(&p, MemoryModel::SC).next().unwrap();
        assert_eq!(
            first.0,
            vec![
                EventId::new(0, 1),
                EventId::new(0, 2),
                EventId::new(1, 1),
                EventId::new(1, 2)
            ]
        );
    }

    #[test]
    fn oracle_agrees_on_sb() {
        let (_, p) = sb000a();
        for mcm in MemoryModel::ALL {
            let fast: BTreeSet<_> = enumerate_executions(&p, mcm).collect();
            assert_eq!(fast, oracle_executions(&p, mcm).unwrap());
        }
        assert_eq!(oracle_executions(&p, MemoryModel::TSO).unwrap().len(), 24);
        let one = Program::new(vec![vec![l(0, 0)]]).unwrap();
        let single = oracle_executions(&one, MemoryModel::SC).unwrap();
        assert_eq!(
            single.into_iter().collect::<Vec<_>>(),
            vec![Execution(vec![EventId::new(0, 1)])]
        );
        let big = Program::new(vec![vec![l(0, 0); 5], vec![l(0, 0); 5]]).unwrap();
        assert_eq!(
            oracle_executions(&big, MemoryModel::SC),
            Err(EngineError::TooManyEvents(10))
        );
    }

    fn state(x: u32, eax0: u32, eax1: u32) -> MachineState {
        MachineState {
            registers: vec![vec![reg(eax0)], vec![reg(eax1)]],
            variables: vec![Value(x)],
        }
    }

    #[test]
    fn sb_outcomes() {
        let (config, p) = sb000a();
        let sc = reachable_final_states(&config, &p, MemoryModel::SC, SearchOptions::default());
        let expected: Vec<_> = [
            state(1, 1, 1),
            state(1, 1, 2),
            state(2, 1, 2),
            state(2, 2, 2),
        ]
        .into_iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
        assert_eq!(sc.states().cloned().collect::<Vec<_>>(), expected);
        for (st, w) in sc.iter() {
            assert!(is_valid_execution(MemoryModel::SC, &p, w));
            assert_eq!(&final_state(&config, &p, w).unwrap(), st);
        }
        let tso = reachable_final_states(&config, &p, MemoryModel::TSO, SearchOptions::default());
        assert!(sc.is_subset(&tso));
        assert!(tso.contains(&state(2, 1, 1)));
    }

    #[test]
    fn witnesses_independent_of_memo_and_parallelism() {
        let (config, p) = sb000a();
        for mcm in MemoryModel::ALL {
            let base = reachable_final_states(
                &config,
                &p,
                mcm,
                SearchOptions {
                    memoize: false,
                    parallel: false,
                },
            );
            for options in [
                SearchOptions {
                    memoize: true,
                    parallel: false,
                },
                SearchOptions {
                    memoize: true,
                    parallel: true,
                },
                SearchOptions {
                    memoize: false,
                    parallel: true,
                },
            ] {
                assert_eq!(reachable_final_states(&config, &p, mcm, options), base);
            }
        }
    }

    #[test]
    fn sb_witness_search() {
        let (config, p) = sb000a();
        let opts = SearchOptions::default();
        let table1 = FinalStateSpec::default()
            .with_variable(0, Value(2))
            .with_register(0, 0, reg(1))
            .with_register(1, 0, reg(2));
        let w = check_allowed(&config, &p, MemoryModel::SC, &table1, opts).unwrap();
        assert!(is_valid_execution(MemoryModel::SC, &p, &w));
        assert!(matches(&final_state(&config, &p, &w).unwrap(), &table1));

        let tso_only = FinalStateSpec::default()
            .with_variable(0, Value(2))
            .with_register(0, 0, reg(1))
            .with_register(1, 0, reg(1));
        assert!(check_allowed(&config, &p, MemoryModel::SC, &tso_only, opts).is_none());
        assert!(check_allowed(&config, &p, MemoryModel::TSO, &tso_only, opts).is_some());

        let both_zero = FinalStateSpec::default()
            .with_register(0, 0, reg(0))
            .with_register(1, 0, reg(0));
        let w = check_allowed(&config, &p, MemoryModel::TSO, &both_zero, opts).unwrap();
        assert!(matches(&final_state(&config, &p, &w).unwrap(), &both_zero));
        let oracle_hit = oracle_executions(&p, MemoryModel::TSO)
            .unwrap()
            .iter()
            .any(|e| matches(&final_state(&config, &p, e).unwrap(), &both_zero));
        assert!(oracle_hit);
    }

    #[test]
    fn sb_stats() {
        let (config, p) = sb000a();
        let opts = SearchOptions::default();
        assert_eq!(
            count_stats(&config, &p, MemoryModel::SC, opts),
            Stats {
                executions: 6,
                final_states: 4
            }
        );
        let tso = count_stats(&config, &p, MemoryModel::TSO, opts);
        let oracle_states: BTreeSet<_> = oracle_executions(&p, MemoryModel::TSO)
            .unwrap()
            .iter()
            .map(|e| final_state(&config, &p, e).unwrap())
            .collect();
        assert_eq!(tso.executions, 24);
        assert_eq!(tso.final_states, oracle_states.len());
        assert!(tso.final_states >= 5);
    }
}
