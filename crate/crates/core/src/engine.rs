//! Card-driven execution of a [`Program`] against a store and a mill.
//!
//! The engine reads the variable-card stream in order. An argument card
//! starts a mill cycle, which pulls the next operation card, takes two
//! argument cards and ends on a receive card. A transfer card is a step of
//! its own in which only the store moves. Each step yields a [`TraceRow`].

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decimal::{DecimalError, DecimalValue, MachineConfig};
use crate::mill::{Axis, Mill, MillError, Operation};
use crate::store::{Address, Store, StoreError, StoreSnapshot};

/// A card of the memory stream. Operation cards travel separately.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VariableCard {
    /// Give off `addr` to a mill axis, optionally parking its complement at
    /// `save_to` and optionally flipping the sign on the way in.
    Supply {
        axis: Axis,
        addr: Address,
        #[serde(rename = "save")]
        save_to: Option<Address>,
        #[serde(rename = "neg")]
        negate: bool,
    },
    /// Reuse the argument the mill still holds.
    Retain {
        axis: Axis,
    },
    Receive {
        addr: Address,
    },
    /// Complement `aux` back into `target`.
    #[serde(rename = "xfer")]
    Transfer {
        target: Address,
        aux: Address,
    },
    Halt,
}

impl VariableCard {
    fn argument_axis(&self) -> Option<Axis> {
        match self {
            VariableCard::Supply { axis, .. } | VariableCard::Retain { axis } => Some(*axis),
            _ => None,
        }
    }

    fn addresses(&self) -> Vec<Address> {
        match self {
            VariableCard::Supply { addr, save_to, .. } => {
                std::iter::once(*addr).chain(*save_to).collect()
            }
            VariableCard::Receive { addr } => vec![*addr],
            VariableCard::Transfer { target, aux } => vec![*target, *aux],
            VariableCard::Retain { .. } | VariableCard::Halt => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub op_cards: Vec<Operation>,
    pub var_cards: Vec<VariableCard>,
    pub inits: BTreeMap<Address, DecimalValue>,
    pub config: MachineConfig,
}

impl Program {
    pub fn empty(config: MachineConfig) -> Self {
        Program {
            op_cards: Vec::new(),
            var_cards: Vec::new(),
            inits: BTreeMap::new(),
            config,
        }
    }

    /// Checks stream consistency, addresses and initial values.
    pub fn validate(&self) -> Result<(), EngineError> {
        let invalid = |msg: String| Err(EngineError::InvalidProgram(msg));
        if let Err(e) = self.config.validate() {
            return invalid(e.to_string());
        }
        let size = self.config.store_size;
        for (addr, value) in &self.inits {
            if addr.0 >= size {
                return invalid(format!("initial value for {addr} outside store of {size}"));
            }
            if value.check_width(self.config.digit_width).is_err() {
                return invalid(format!(
                    "initial value {value} for {addr} exceeds {} digits",
                    self.config.digit_width
                ));
            }
        }

        let mut cycles = 0usize;
        let mut i = 0usize;
        while i < self.var_cards.len() {
            let card = &self.var_cards[i];
            for addr in card.addresses() {
                if addr.0 >= size {
                    return invalid(format!("card {}: {addr} outside store of {size}", i + 1));
                }
            }
            match card {
                VariableCard::Supply { .. } | VariableCard::Retain { .. } => {
                    cycles += 1;
                    if cycles > self.op_cards.len() {
                        return invalid(format!(
                            "card {}: mill cycle {cycles} has no operation card",
                            i + 1
                        ));
                    }
                    let first = card.argument_axis();
                    let second = self.var_cards.get(i + 1).and_then(|c| c.argument_axis());
                    match second {
                        None => {
                            return invalid(format!(
                                "card {}: mill cycle needs two argument cards",
                                i + 1
                            ))
                        }
                        Some(axis) if Some(axis) == first => {
                            return invalid(format!(
                                "card {}: both arguments target axis {axis}",
                                i + 2
                            ))
                        }
                        Some(_) => {}
                    }
                    for arg in &self.var_cards[i..i + 2] {
                        if let VariableCard::Supply {
                            addr,
                            save_to: Some(aux),
                            ..
                        } = arg
                        {
                            if addr == aux {
                                return invalid(format!("{addr} cannot save into itself"));
                            }
                        }
                    }
                    match self.var_cards.get(i + 2) {
                        Some(VariableCard::Receive { addr }) if addr.0 < size => {}
                        Some(VariableCard::Receive { addr }) => {
                            return invalid(format!(
                                "card {}: {addr} outside store of {size}",
                                i + 3
                            ))
                        }
                        _ => {
                            return invalid(format!(
                                "card {}: mill cycle must end with a receive card",
                                i + 3
                            ))
                        }
                    }
                    i += 3;
                }
                VariableCard::Transfer { target, aux } => {
                    if target == aux {
                        return invalid(format!("card {}: transfer {target} from itself", i + 1));
                    }
                    i += 1;
                }
                VariableCard::Receive { .. } => {
                    return invalid(format!("card {}: receive card outside a mill cycle", i + 1));
                }
                VariableCard::Halt => i += 1,
            }
        }
        if cycles != self.op_cards.len() {
            return invalid(format!(
                "{} operation cards but {cycles} mill cycles",
                self.op_cards.len()
            ));
        }
        Ok(())
    }
}

/// A complement parked during a read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Save {
    pub to: Address,
    pub value: DecimalValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Write {
    pub addr: Address,
    pub value: DecimalValue,
    /// Overwrite count of `addr` after this write.
    pub prime: u32,
}

/// What one step did. Every address in `reads` was given off and zeroed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    #[serde(rename = "n")]
    pub step: u32,
    /// `None` for memory-only transfer steps.
    pub nature: Option<Operation>,
    pub reads: Vec<Address>,
    pub saves: Vec<Save>,
    pub write: Option<Write>,
    /// For a transfer, the variable whose complement was restored.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restores: Option<Address>,
    pub comment: String,
}

impl TraceRow {
    /// Rows that deliver a quotient are the ones the tables flag with `*`.
    pub fn is_result(&self) -> bool {
        self.nature == Some(Operation::Div)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
    #[serde(rename = "final")]
    pub final_store: StoreSnapshot,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineFault {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Mill(#[from] MillError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("invalid program: {0}")]
    InvalidProgram(String),
    #[error("engine is halted")]
    Halted,
    #[error("step {step}: {fault}")]
    Fault { step: u32, fault: MachineFault },
}

impl EngineError {
    pub fn step(&self) -> Option<u32> {
        match self {
            EngineError::Fault { step, .. } => Some(*step),
            _ => None,
        }
    }

    pub fn arithmetic(&self) -> Option<&DecimalError> {
        match self {
            EngineError::Fault {
                fault: MachineFault::Mill(MillError::Arithmetic(e)),
                ..
            } => Some(e),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Engine {
    program: Program,
    store: Store,
    mill: Mill,
    next_op: usize,
    next_card: usize,
    steps: u32,
    faulted: bool,
    /// Code label of the argument the mill holds, e.g. `v5`.
    held_label: Option<String>,
    /// Addresses holding a parked complement, mapped to where it came from.
    origins: HashMap<Address, Address>,
}

impl Engine {
    pub fn load(program: &Program) -> Result<Self, EngineError> {
        program.validate()?;
        let mut store = Store::new(program.config.store_size);
        for (addr, value) in &program.inits {
            store
                .initialize(*addr, value.clone())
                .map_err(|e| EngineError::InvalidProgram(e.to_string()))?;
        }
        Ok(Engine {
            program: program.clone(),
            store,
            mill: Mill::new(),
            next_op: 0,
            next_card: 0,
            steps: 0,
            faulted: false,
            held_label: None,
            origins: HashMap::new(),
        })
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn mill(&self) -> &Mill {
        &self.mill
    }

    pub fn steps_taken(&self) -> u32 {
        self.steps
    }

    pub fn is_halted(&self) -> bool {
        self.faulted
            || matches!(
                self.program.var_cards.get(self.next_card),
                None | Some(VariableCard::Halt)
            )
    }

    pub fn step(&mut self) -> Result<TraceRow, EngineError> {
        if self.is_halted() {
            return Err(EngineError::Halted);
        }
        let step = self.steps + 1;
        let outcome = match self.program.var_cards[self.next_card].clone() {
            VariableCard::Transfer { target, aux } => {
                self.next_card += 1;
                self.transfer(step, target, aux)
            }
            _ => self.mill_cycle(step),
        };
        match outcome {
            Ok(row) => {
                self.steps = step;
                Ok(row)
            }
            Err(fault) => {
                self.faulted = true;
                Err(EngineError::Fault { step, fault })
            }
        }
    }

    pub fn run_to_halt(&mut self) -> Result<Vec<TraceRow>, EngineError> {
        let mut rows = Vec::new();
        while !self.is_halted() {
            rows.push(self.step()?);
        }
        Ok(rows)
    }

    fn next_var_card(&mut self) -> VariableCard {
        let card = self.program.var_cards[self.next_card].clone();
        self.next_card += 1;
        card
    }

    fn label(&self, addr: Address) -> Result<String, MachineFault> {
        Ok(self.store.primed_name(addr)?)
    }

    fn mill_cycle(&mut self, step: u32) -> Result<TraceRow, MachineFault> {
        let op = self.program.op_cards[self.next_op];
        self.next_op += 1;
        self.mill.set_operation(op);

        let mut reads = Vec::new();
        let mut saves = Vec::new();
        let mut labels: [String; 2] = Default::default();
        for _ in 0..2 {
            match self.next_var_card() {
                VariableCard::Supply {
                    axis,
                    addr,
                    save_to,
                    negate,
                } => {
                    let label = self.label(addr)?;
                    let value = self.store.give_off(addr, save_to)?;
                    reads.push(addr);
                    self.origins.remove(&addr);
                    if let Some(aux) = save_to {
                        saves.push(Save {
                            to: aux,
                            value: self.store.peek(aux)?.clone(),
                        });
                        self.origins.insert(aux, addr);
                    }
                    self.mill.ingress(axis, value, negate)?;
                    if axis == Axis::First {
                        self.held_label = Some(label.clone());
                    }
                    labels[slot(axis)] = if negate {
                        format!("\u{2212}{label}")
                    } else {
                        label
                    };
                }
                VariableCard::Retain { axis } => {
                    self.mill.retain(axis)?;
                    labels[slot(axis)] = self.held_label.clone().unwrap_or_default();
                }
                other => unreachable!("validated program has argument card, got {other:?}"),
            }
        }

        let result = self.mill.execute(&self.program.config)?;
        let VariableCard::Receive { addr } = self.next_var_card() else {
            unreachable!("validated program ends each mill cycle with a receive card");
        };
        self.store.receive(addr, result.clone())?;
        self.origins.remove(&addr);
        let target = self.label(addr)?;
        Ok(TraceRow {
            step,
            nature: Some(op),
            reads,
            saves,
            write: Some(Write {
                addr,
                value: result,
                prime: self.store.prime_count(addr)?,
            }),
            restores: None,
            comment: format!("{target} = {} {} {}", labels[0], op.glyph(), labels[1]),
        })
    }

    fn transfer(
        &mut self,
        step: u32,
        target: Address,
        aux: Address,
    ) -> Result<TraceRow, MachineFault> {
        self.store.restore(target, aux)?;
        let origin = self.origins.remove(&aux);
        self.origins.remove(&target);
        let source = match origin {
            Some(addr) => addr.to_string(),
            None => format!("C{aux}"),
        };
        Ok(TraceRow {
            step,
            nature: None,
            reads: vec![aux],
            saves: Vec::new(),
            write: Some(Write {
                addr: target,
                value: self.store.peek(target)?.clone(),
                prime: self.store.prime_count(target)?,
            }),
            restores: origin,
            comment: format!("{} = {source}", self.label(target)?),
        })
    }

    pub fn into_trace(self, rows: Vec<TraceRow>) -> Trace {
        Trace {
            rows,
            final_store: self.store.snapshot(),
        }
    }
}

/// Runs `program` until a halt card or the end of the variable-card stream.
pub fn run(program: &Program) -> Result<Trace, EngineError> {
    let mut engine = Engine::load(program)?;
    let rows = engine.run_to_halt()?;
    Ok(engine.into_trace(rows))
}

fn slot(axis: Axis) -> usize {
    match axis {
        Axis::First => 0,
        Axis::Second => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: i64) -> DecimalValue {
        DecimalValue::from(n)
    }

    fn supply(axis: Axis, addr: usize) -> VariableCard {
        VariableCard::Supply {
            axis,
            addr: Address(addr),
            save_to: None,
            negate: false,
        }
    }

    fn receive(addr: usize) -> VariableCard {
        VariableCard::Receive {
            addr: Address(addr),
        }
    }

    fn one_cycle(op: Operation, a: i64, b: i64) -> Program {
        let mut p = Program::empty(MachineConfig::default());
        p.inits.insert(Address(1), v(a));
        p.inits.insert(Address(2), v(b));
        p.op_cards.push(op);
        p.var_cards
            .extend([supply(Axis::First, 1), supply(Axis::Second, 2), receive(3)]);
        p
    }

    #[test]
    fn empty_program_runs_to_nothing() {
        let mut p = Program::empty(MachineConfig::default());
        p.inits.insert(Address(4), v(9));
        let trace = run(&p).unwrap();
        assert!(trace.rows.is_empty());
        assert_eq!(trace.final_store[&Address(4)].value, v(9));
        assert_eq!(trace.final_store[&Address(4)].prime, 0);
    }

    #[test]
    fn single_cycle() {
        let trace = run(&one_cycle(Operation::Sub, 2, 8)).unwrap();
        assert_eq!(trace.rows.len(), 1);
        let row = &trace.rows[0];
        assert_eq!(row.nature, Some(Operation::Sub));
        assert_eq!(row.reads, vec![Address(1), Address(2)]);
        assert_eq!(row.write.as_ref().unwrap().value, v(-6));
        assert_eq!(row.comment, "v3 = v1 \u{2212} v2");
        assert!(!trace.final_store.contains_key(&Address(1)));
    }

    #[test]
    fn division_by_zero_names_the_step() {
        let err = run(&one_cycle(Operation::Div, 2, 0)).unwrap_err();
        assert_eq!(err.step(), Some(1));
        assert_eq!(err.arithmetic(), Some(&DecimalError::DivisionByZero));
        assert_eq!(err.to_string(), "step 1: division by zero");
    }

    #[test]
    fn halt_stops_and_further_steps_fail() {
        let mut p = one_cycle(Operation::Add, 1, 1);
        p.var_cards.insert(0, VariableCard::Halt);
        let mut engine = Engine::load(&p).unwrap();
        assert!(engine.is_halted());
        assert_eq!(engine.step(), Err(EngineError::Halted));
        assert!(run(&p).unwrap().rows.is_empty());
    }

    #[test]
    fn validation_catches_stream_mismatch() {
        let mut p = one_cycle(Operation::Add, 1, 1);
        p.op_cards.push(Operation::Mul);
        assert!(matches!(
            Engine::load(&p),
            Err(EngineError::InvalidProgram(_))
        ));

        let mut p = one_cycle(Operation::Add, 1, 1);
        p.var_cards.pop();
        assert!(matches!(
            Engine::load(&p),
            Err(EngineError::InvalidProgram(_))
        ));

        let mut p = one_cycle(Operation::Add, 1, 1);
        p.var_cards[1] = supply(Axis::First, 2);
        assert!(matches!(
            Engine::load(&p),
            Err(EngineError::InvalidProgram(_))
        ));

        let mut p = one_cycle(Operation::Add, 1, 1);
        p.var_cards.push(receive(5));
        assert!(matches!(
            Engine::load(&p),
            Err(EngineError::InvalidProgram(_))
        ));

        let mut p = one_cycle(Operation::Add, 1, 1);
        p.var_cards[2] = receive(100);
        assert!(matches!(
            Engine::load(&p),
            Err(EngineError::InvalidProgram(_))
        ));

        let mut p = Program::empty(MachineConfig::default());
        p.var_cards.push(VariableCard::Transfer {
            target: Address(1),
            aux: Address(1),
        });
        assert!(matches!(
            Engine::load(&p),
            Err(EngineError::InvalidProgram(_))
        ));
    }

    #[test]
    fn transfer_without_known_origin() {
        let mut p = Program::empty(MachineConfig::default());
        p.inits.insert(Address(8), v(765));
        p.var_cards.push(VariableCard::Transfer {
            target: Address(2),
            aux: Address(8),
        });
        let trace = run(&p).unwrap();
        let row = &trace.rows[0];
        assert_eq!(row.nature, None);
        assert_eq!(row.reads, vec![Address(8)]);
        assert_eq!(row.restores, None);
        assert_eq!(row.comment, "v2 = Cv8");
        assert_eq!(trace.final_store[&Address(2)].value, v(345));
    }

    #[test]
    fn retain_without_held_value_faults() {
        let mut p = Program::empty(MachineConfig::default());
        p.op_cards.push(Operation::Mul);
        p.var_cards.extend([
            VariableCard::Retain { axis: Axis::First },
            supply(Axis::Second, 1),
            receive(2),
        ]);
        let err = run(&p).unwrap_err();
        assert_eq!(
            err,
            EngineError::Fault {
                step: 1,
                fault: MachineFault::Mill(MillError::NothingHeld)
            }
        );
    }

    #[test]
    fn card_json_shape() {
        let card = VariableCard::Supply {
            axis: Axis::First,
            addr: Address(5),
            save_to: Some(Address(8)),
            negate: false,
        };
        assert_eq!(
            serde_json::to_string(&card).unwrap(),
            r#"{"kind":"supply","axis":1,"addr":5,"save":8,"neg":false}"#
        );
        assert_eq!(
            serde_json::to_string(&VariableCard::Transfer {
                target: Address(1),
                aux: Address(8)
            })
            .unwrap(),
            r#"{"kind":"xfer","target":1,"aux":8}"#
        );
        assert_eq!(
            serde_json::to_string(&VariableCard::Halt).unwrap(),
            r#"{"kind":"halt"}"#
        );
    }
}
