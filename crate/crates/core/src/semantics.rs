//! Deterministic machine-state transitions and execution replay.

use crate::error::{ModelError, PermutationDefect};
use crate::model::{
    EventId, Execution, FinalStateSpec, LitmusConfig, MachineState, Operation, Program,
    RegisterContent,
};

/// Every intermediate state of one execution. `states.len() == execution.len() + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub states: Vec<MachineState>,
    pub execution: Execution,
}

impl Trace {
    pub fn final_state(&self) -> &MachineState {
        self.states
            .last()
            .expect("a trace holds at least the initial state")
    }
}

/// All registers `INITIAL`, all variables at the configured initial value.
pub fn initial_state(config: &LitmusConfig) -> MachineState {
    MachineState {
        registers: vec![
            vec![RegisterContent::Initial; config.n_registers_per_core];
            config.n_cores
        ],
        variables: vec![config.initial_value; config.n_variables],
    }
}

fn check_ids(state: &MachineState, core: usize, op: &Operation) -> Result<(), ModelError> {
    let regs = state
        .registers
        .get(core)
        .ok_or(ModelError::CoreOutOfRange {
            core,
            n_cores: state.registers.len(),
        })?;
    let variable = op.variable();
    if variable >= state.variables.len() {
        return Err(ModelError::VariableOutOfRange {
            variable,
            n_variables: state.variables.len(),
        });
    }
    if let Operation::Load { register, .. } = *op {
        if register >= regs.len() {
            return Err(ModelError::RegisterOutOfRange {
                register,
                n_registers: regs.len(),
            });
        }
    }
    Ok(())
}

/// In-place step. Ids must already be valid.
pub(crate) fn step(state: &mut MachineState, core: usize, op: &Operation) {
    match *op {
        Operation::Load { register, variable } => {
            state.registers[core][register] = RegisterContent::Value(state.variables[variable]);
        }
        Operation::Store { variable, value } => {
            state.variables[variable] = value;
        }
    }
}

/// Effect of `core` performing `op` in `state`. A load touches only the one
/// register cell; a store touches only the one variable cell.
pub fn apply(
    state: &MachineState,
    core: usize,
    op: &Operation,
) -> Result<MachineState, ModelError> {
    check_ids(state, core, op)?;
    let mut next = state.clone();
    step(&mut next, core, op);
    Ok(next)
}

/// Checks that `execution` lists each event of `program` exactly once.
pub fn check_permutation(program: &Program, execution: &Execution) -> Result<(), ModelError> {
    let mut seen: Vec<Vec<bool>> = program
        .cores()
        .iter()
        .map(|ops| vec![false; ops.len()])
        .collect();
    for &event in execution.events() {
        let slot = seen
            .get_mut(event.core)
            .and_then(|s| event.index.checked_sub(1).and_then(|i| s.get_mut(i)))
            .ok_or(ModelError::NotAPermutation(PermutationDefect::Unknown(
                event,
            )))?;
        if *slot {
            return Err(ModelError::NotAPermutation(PermutationDefect::Duplicated(
                event,
            )));
        }
        *slot = true;
    }
    for (core, s) in seen.iter().enumerate() {
        if let Some(i) = s.iter().position(|done| !done) {
            return Err(ModelError::NotAPermutation(PermutationDefect::Missing(
                EventId::new(core, i + 1),
            )));
        }
    }
    Ok(())
}

fn checked_ops(
    config: &LitmusConfig,
    program: &Program,
    execution: &Execution,
) -> Result<Vec<(usize, Operation)>, ModelError> {
    program.validate(config)?;
    check_permutation(program, execution)?;
    execution
        .events()
        .iter()
        .map(|&e| Ok((e.core, program.operation_at(e)?)))
        .collect()
}

/// Replays `execution` from the initial state, keeping every step.
pub fn replay(
    config: &LitmusConfig,
    program: &Program,
    execution: &Execution,
) -> Result<Trace, ModelError> {
    let ops = checked_ops(config, program, execution)?;
    let mut states = Vec::with_capacity(ops.len() + 1);
    let mut current = initial_state(config);
    states.push(current.clone());
    for (core, op) in &ops {
        step(&mut current, *core, op);
        states.push(current.clone());
    }
    Ok(Trace {
        states,
        execution: execution.clone(),
    })
}

/// Same result as `replay(..).final_state()` without materializing the trace.
pub fn final_state(
    config: &LitmusConfig,
    program: &Program,
    execution: &Execution,
) -> Result<MachineState, ModelError> {
    let ops = checked_ops(config, program, execution)?;
    let mut state = initial_state(config);
    for (core, op) in &ops {
        step(&mut state, *core, op);
    }
    Ok(state)
}

/// True iff every cell named by `spec` holds the specified content.
pub fn matches(state: &MachineState, spec: &FinalStateSpec) -> bool {
    spec.registers.iter().all(|(&(core, register), want)| {
        state
            .registers
            .get(core)
            .and_then(|r| r.get(register))
            .is_some_and(|have| have == want)
    }) && spec
        .variables
        .iter()
        .all(|(&variable, want)| state.variables.get(variable) == Some(want))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Value;
    use proptest::prelude::*;

    const X: usize = 0;
    const EAX: usize = 0;

    fn sb000a() -> (LitmusConfig, Program) {
        let config = LitmusConfig::new(2, 1, 1, 3, 2).unwrap();
        let program = Program::new(vec![
            vec![
                Operation::Store {
                    variable: X,
                    value: Value(1),
                },
                Operation::Load {
                    register: EAX,
                    variable: X,
                },
            ],
            vec![
                Operation::Store {
                    variable: X,
                    value: Value(2),
                },
                Operation::Load {
                    register: EAX,
                    variable: X,
                },
            ],
        ])
        .unwrap();
        (config, program)
    }

    fn exec(order: &[(usize, usize)]) -> Execution {
        Execution(order.iter().map(|&(c, i)| EventId::new(c, i)).collect())
    }

    fn reg(v: u32) -> RegisterContent {
        RegisterContent::Value(Value(v))
    }

    #[test]
    fn initial_state_is_empty_registers_and_initial_variables() {
        let config = LitmusConfig::new(2, 1, 1, 1, 1).unwrap();
        let s = initial_state(&config);
        assert_eq!(s.registers, vec![vec![RegisterContent::Initial]; 2]);
        assert_eq!(s.variables, vec![Value(0)]);

        let (config, _) = sb000a();
        let s = initial_state(&config);
        assert!(s
            .registers
            .iter()
            .flatten()
            .all(|r| *r == RegisterContent::Initial));
        assert_eq!(s.variables, vec![Value(0)]);
    }

    #[test]
    fn store_and_load_effects() {
        let (config, _) = sb000a();
        let s0 = initial_state(&config);
        let s1 = apply(
            &s0,
            0,
            &Operation::Store {
                variable: X,
                value: Value(2),
            },
        )
        .unwrap();
        assert_eq!(s1.variables, vec![Value(2)]);
        assert_eq!(s1.registers, s0.registers);

        let s2 = apply(
            &s1,
            1,
            &Operation::Load {
                register: EAX,
                variable: X,
            },
        )
        .unwrap();
        assert_eq!(s2.register(1, EAX), reg(2));
        assert_eq!(s2.register(0, EAX), RegisterContent::Initial);
        assert_eq!(s2.variables, s1.variables);

        let store = Operation::Store {
            variable: X,
            value: Value(2),
        };
        let again = apply(&s1, 0, &store).unwrap();
        assert_eq!(again, s1);
    }

    #[test]
    fn apply_rejects_bad_ids() {
        let (config, _) = sb000a();
        let s = initial_state(&config);
        assert!(apply(
            &s,
            2,
            &Operation::Load {
                register: 0,
                variable: 0
            }
        )
        .is_err());
        assert!(apply(
            &s,
            0,
            &Operation::Load {
                register: 1,
                variable: 0
            }
        )
        .is_err());
        assert!(apply(
            &s,
            0,
            &Operation::Store {
                variable: 3,
                value: Value(0)
            }
        )
        .is_err());
    }

    #[test]
    fn replay_sb000a_executions() {
        let (config, program) = sb000a();
        let cases = [
            (exec(&[(0, 1), (0, 2), (1, 1), (1, 2)]), 2, 1, 2),
            (exec(&[(0, 1), (1, 1), (0, 2), (1, 2)]), 2, 2, 2),
            (exec(&[(0, 1), (0, 2), (1, 2), (1, 1)]), 2, 1, 1),
        ];
        for (e, x, eax0, eax1) in cases {
            let trace = replay(&config, &program, &e).unwrap();
            assert_eq!(trace.states.len(), e.len() + 1);
            assert_eq!(trace.states[0], initial_state(&config));
            let last = trace.final_state();
            assert_eq!(last.variables, vec![Value(x)]);
            assert_eq!(last.register(0, EAX), reg(eax0));
            assert_eq!(last.register(1, EAX), reg(eax1));
            assert_eq!(final_state(&config, &program, &e).unwrap(), *last);
        }
    }

    #[test]
    fn replay_names_permutation_defects() {
        let (config, program) = sb000a();
        let missing = exec(&[(0, 1), (0, 2), (1, 1)]);
        assert_eq!(
            replay(&config, &program, &missing).unwrap_err(),
            ModelError::NotAPermutation(PermutationDefect::Missing(EventId::new(1, 2)))
        );
        let dup = exec(&[(0, 1), (0, 1), (1, 1), (1, 2)]);
        assert_eq!(
            replay(&config, &program, &dup).unwrap_err(),
            ModelError::NotAPermutation(PermutationDefect::Duplicated(EventId::new(0, 1)))
        );
        let unknown = exec(&[(0, 1), (0, 2), (1, 1), (1, 3)]);
        assert!(matches!(
            replay(&config, &program, &unknown),
            Err(ModelError::NotAPermutation(PermutationDefect::Unknown(_)))
        ));
    }

    #[test]
    fn matching_partial_specs() {
        let (config, program) = sb000a();
        let state =
            final_state(&config, &program, &exec(&[(0, 1), (0, 2), (1, 1), (1, 2)])).unwrap();
        let table1 = FinalStateSpec::default()
            .with_variable(X, Value(2))
            .with_register(0, EAX, reg(1))
            .with_register(1, EAX, reg(2));
        assert!(matches(&state, &table1));
        assert!(matches(&state, &FinalStateSpec::default()));
        let sentinel = FinalStateSpec::default().with_register(0, EAX, RegisterContent::Initial);
        assert!(!matches(&state, &sentinel));
    }

    fn arb_op() -> impl Strategy<Value = Operation> {
        prop_oneof![
            (0..3usize, 0..3usize)
                .prop_map(|(register, variable)| Operation::Load { register, variable }),
            (0..3usize, 0..4u32).prop_map(|(variable, v)| Operation::Store {
                variable,
                value: Value(v)
            }),
        ]
    }

    fn arb_state() -> impl Strategy<Value = MachineState> {
        let cell = prop_oneof![Just(RegisterContent::Initial), (0..4u32).prop_map(reg)];
        (
            proptest::collection::vec(proptest::collection::vec(cell, 3), 2),
            proptest::collection::vec((0..4u32).prop_map(Value), 3),
        )
            .prop_map(|(registers, variables)| MachineState {
                registers,
                variables,
            })
    }

    fn diff_cells(a: &MachineState, b: &MachineState) -> (Vec<(usize, usize)>, Vec<usize>) {
        let regs = (0..a.registers.len())
            .flat_map(|c| (0..a.registers[c].len()).map(move |r| (c, r)))
            .filter(|&(c, r)| a.registers[c][r] != b.registers[c][r])
            .collect();
        let vars = (0..a.variables.len())
            .filter(|&v| a.variables[v] != b.variables[v])
            .collect();
        (regs, vars)
    }

    proptest! {
        #[test]
        fn frame_conditions(state in arb_state(), core in 0..2usize, op in arb_op()) {
            let next = apply(&state, core, &op).unwrap();
            let (regs, vars) = diff_cells(&state, &next);
            match op {
                Operation::Store { variable, .. } => {
                    prop_assert!(regs.is_empty());
                    prop_assert!(vars.iter().all(|&v| v == variable));
                }
                Operation::Load { register, .. } => {
                    prop_assert!(vars.is_empty());
                    prop_assert!(regs.iter().all(|&cell| cell == (core, register)));
                }
            }
        }

        #[test]
        fn sentinel_never_reappears(
            ops in proptest::collection::vec((0..2usize, arb_op()), 0..12)
        ) {
            let config = LitmusConfig::new(2, 3, 3, 4, 12).unwrap();
            let mut state = initial_state(&config);
            for (core, op) in ops {
                let next = apply(&state, core, &op).unwrap();
                for c in 0..2 {
                    for r in 0..3 {
                        if state.registers[c][r] != RegisterContent::Initial {
                            prop_assert_ne!(next.registers[c][r], RegisterContent::Initial);
                        }
                    }
                }
                state = next;
            }
        }
    }
}
