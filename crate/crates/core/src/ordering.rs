//! Per-model ordering policies and the per-core partial orders they induce.

use std::collections::BTreeSet;

use crate::model::{EventId, Execution, MemoryModel, Operation, Program};
use crate::semantics::check_permutation;

/// Decides, for two operations of the same core with `first` earlier in
/// program order, whether memory order must keep them in that order.
pub trait OrderingPolicy: Sync {
    fn preserved(&self, first: &Operation, second: &Operation) -> bool;
}

/// Every program-order pair is kept.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScPolicy;

/// Every pair except store-then-load is kept. No store forwarding.
#[derive(Debug, Clone, Copy, Default)]
pub struct TsoPolicy;

impl OrderingPolicy for ScPolicy {
    fn preserved(&self, _first: &Operation, _second: &Operation) -> bool {
        true
    }
}

impl OrderingPolicy for TsoPolicy {
    fn preserved(&self, first: &Operation, second: &Operation) -> bool {
        !(first.is_store() && second.is_load())
    }
}

impl MemoryModel {
    pub fn policy(self) -> &'static dyn OrderingPolicy {
        match self {
            MemoryModel::SC => &ScPolicy,
            MemoryModel::TSO => &TsoPolicy,
        }
    }
}

pub fn preserved(mcm: MemoryModel, first: &Operation, second: &Operation) -> bool {
    mcm.policy().preserved(first, second)
}

/// Ordered index pairs `(i, j)`, `1 <= i < j <= len`, of one core.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorePartialOrder {
    len: usize,
    pairs: BTreeSet<(usize, usize)>,
}

impl CorePartialOrder {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.pairs
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.contains(&(i, j))
    }

    pub fn transitive_closure(&self) -> CorePartialOrder {
        let n = self.len;
        let mut reach = vec![vec![false; n + 1]; n + 1];
        for &(i, j) in &self.pairs {
            reach[i][j] = true;
        }
        // Pairs always point forward, so one sweep from the back suffices.
        for i in (1..=n).rev() {
            for j in i + 1..=n {
                if reach[i][j] {
                    let (head, tail) = reach.split_at_mut(j);
                    for (to, &via) in head[i].iter_mut().zip(&tail[0]).skip(j + 1) {
                        *to |= via;
                    }
                }
            }
        }
        let pairs = (1..=n)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .filter(|&(i, j)| reach[i][j])
            .collect();
        CorePartialOrder { len: n, pairs }
    }

    pub fn is_transitively_closed(&self) -> bool {
        self.transitive_closure() == *self
    }

    /// Bitmask of required predecessors (0-based bits) for each position,
    /// taken from the transitive closure.
    pub fn predecessor_masks(&self) -> Vec<u64> {
        let closed = self.transitive_closure();
        let mut masks = vec![0u64; self.len];
        for &(i, j) in &closed.pairs {
            masks[j - 1] |= 1 << (i - 1);
        }
        masks
    }
}

pub fn core_partial_order_with(policy: &dyn OrderingPolicy, ops: &[Operation]) -> CorePartialOrder {
    let n = ops.len();
    let pairs = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .filter(|&(i, j)| policy.preserved(&ops[i - 1], &ops[j - 1]))
        .collect();
    CorePartialOrder { len: n, pairs }
}

pub fn core_partial_order(mcm: MemoryModel, ops: &[Operation]) -> CorePartialOrder {
    core_partial_order_with(mcm.policy(), ops)
}

/// Why an execution is not valid under a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotAPermutation(String),
    /// `before` must precede `after` but comes later.
    OrderInverted {
        before: EventId,
        after: EventId,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NotAPermutation(why) => f.write_str(why),
            Violation::OrderInverted { before, after } => {
                write!(f, "{before} must precede {after} in memory order")
            }
        }
    }
}

/// Checks the execution is a permutation of the program's events and keeps
/// every pair the model preserves.
pub fn check_execution(
    mcm: MemoryModel,
    program: &Program,
    execution: &Execution,
) -> Result<(), Violation> {
    check_permutation(program, execution).map_err(|e| Violation::NotAPermutation(e.to_string()))?;
    let mut position: Vec<Vec<usize>> = program
        .cores()
        .iter()
        .map(|ops| vec![0; ops.len()])
        .collect();
    for (pos, e) in execution.events().iter().enumerate() {
        position[e.core][e.index - 1] = pos;
    }
    for (core, ops) in program.cores().iter().enumerate() {
        let order = core_partial_order(mcm, ops);
        for &(i, j) in order.pairs() {
            if position[core][i - 1] > position[core][j - 1] {
                return Err(Violation::OrderInverted {
                    before: EventId::new(core, i),
                    after: EventId::new(core, j),
                });
            }
        }
    }
    Ok(())
}

pub fn is_valid_execution(mcm: MemoryModel, program: &Program, execution: &Execution) -> bool {
    check_execution(mcm, program, execution).is_ok()
}
