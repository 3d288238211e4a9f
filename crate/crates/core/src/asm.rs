//! Line-oriented assembly for card programs, and the two-stream card deck.
//!
//! ```text
//! INIT v5 = -1        ; initial store contents
//! OP *                ; operation card (× ÷ + − or * / + -)
//!   SUPPLY 1 v5       ; give off v5 to axis 1
//!   SUPPLY 2 v1 SAVE v8
//!   RECEIVE v7
//! OP *
//!   RETAIN 1          ; reuse the held axis-1 argument
//!   SUPPLY 2 v3 NEG
//!   RECEIVE v1
//! XFER v1 FROM v8     ; complement v8 back into v1
//! HALT
//! ```
//!
//! Keywords and the `v` prefix are case-insensitive; `;` and `#` start a
//! comment. Operation lines go to the processor stream, every other card to
//! the memory stream.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decimal::{DecimalError, DecimalValue, MachineConfig};
use crate::engine::{EngineError, Program, VariableCard};
use crate::mill::{Axis, Operation};
use crate::store::Address;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AsmError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {message}")]
    Semantic { line: usize, message: String },
}

impl AsmError {
    pub fn line(&self) -> usize {
        match self {
            AsmError::Syntax { line, .. } | AsmError::Semantic { line, .. } => *line,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationCard {
    pub op: Operation,
}

/// The two punched-card streams of a program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardDeck {
    pub processor: Vec<OperationCard>,
    pub memory: Vec<VariableCard>,
}

impl CardDeck {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("card decks always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

pub fn to_card_deck(program: &Program) -> CardDeck {
    CardDeck {
        processor: program
            .op_cards
            .iter()
            .map(|&op| OperationCard { op })
            .collect(),
        memory: program.var_cards.clone(),
    }
}

pub fn from_card_deck(
    deck: &CardDeck,
    inits: BTreeMap<Address, DecimalValue>,
    config: MachineConfig,
) -> Result<Program, EngineError> {
    let program = Program {
        op_cards: deck.processor.iter().map(|card| card.op).collect(),
        var_cards: deck.memory.clone(),
        inits,
        config,
    };
    program.validate()?;
    Ok(program)
}

struct Cycle {
    line: usize,
    axes: Vec<Axis>,
}

struct Parser<'a> {
    config: &'a MachineConfig,
    program: Program,
    cycle: Option<Cycle>,
    first_axis_supplied: bool,
    line: usize,
}

pub fn parse(src: &str, config: &MachineConfig) -> Result<Program, AsmError> {
    let mut parser = Parser {
        config,
        program: Program::empty(*config),
        cycle: None,
        first_axis_supplied: false,
        line: 0,
    };
    for (idx, raw) in src.lines().enumerate() {
        parser.line = idx + 1;
        let text = match raw.find([';', '#']) {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let text = text.trim();
        if !text.is_empty() {
            parser.statement(text)?;
        }
    }
    if let Some(cycle) = &parser.cycle {
        return Err(AsmError::Semantic {
            line: cycle.line,
            message: "mill cycle is not closed by a RECEIVE".into(),
        });
    }
    let line = parser.line.max(1);
    parser.program.validate().map_err(|e| AsmError::Semantic {
        line,
        message: e.to_string(),
    })?;
    Ok(parser.program)
}

impl Parser<'_> {
    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, AsmError> {
        Err(AsmError::Syntax {
            line: self.line,
            message: message.into(),
        })
    }

    fn semantic<T>(&self, message: impl Into<String>) -> Result<T, AsmError> {
        Err(AsmError::Semantic {
            line: self.line,
            message: message.into(),
        })
    }

    fn statement(&mut self, text: &str) -> Result<(), AsmError> {
        let (keyword, rest) = match text.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (text, ""),
        };
        match keyword.to_ascii_uppercase().as_str() {
            "INIT" => self.init(rest),
            "OP" => self.op(rest),
            "SUPPLY" => self.supply(rest),
            "RETAIN" => self.retain(rest),
            "RECEIVE" => self.receive(rest),
            "XFER" => self.transfer(rest),
            "HALT" => {
                if !rest.is_empty() {
                    return self.syntax("HALT takes no operands");
                }
                self.outside_cycle("HALT")?;
                self.program.var_cards.push(VariableCard::Halt);
                Ok(())
            }
            other => self.syntax(format!("unknown keyword {other:?}")),
        }
    }

    fn address(&self, token: &str) -> Result<Address, AsmError> {
        let digits = token
            .strip_prefix('v')
            .or_else(|| token.strip_prefix('V'))
            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()));
        let Some(digits) = digits else {
            return self.syntax(format!("expected an address like v7, found {token:?}"));
        };
        let Ok(index) = digits.parse::<usize>() else {
            return self.semantic(format!("address {token} out of range"));
        };
        if index >= self.config.store_size {
            return self.semantic(format!(
                "address {token} outside store of {} variables",
                self.config.store_size
            ));
        }
        Ok(Address(index))
    }

    fn axis(&self, token: &str) -> Result<Axis, AsmError> {
        match token {
            "1" => Ok(Axis::First),
            "2" => Ok(Axis::Second),
            other => self.syntax(format!("axis must be 1 or 2, found {other:?}")),
        }
    }

    fn outside_cycle(&self, what: &str) -> Result<(), AsmError> {
        match &self.cycle {
            Some(cycle) => self.semantic(format!(
                "{what} inside the mill cycle opened at line {}",
                cycle.line
            )),
            None => Ok(()),
        }
    }

    fn init(&mut self, rest: &str) -> Result<(), AsmError> {
        let Some((lhs, rhs)) = rest.split_once('=') else {
            return self.syntax("expected INIT v<k> = <integer>");
        };
        let addr = self.address(lhs.trim())?;
        let value = match DecimalValue::from_literal(rhs.trim(), self.config) {
            Ok(value) => value,
            Err(DecimalError::Overflow { width }) => {
                return self.semantic(format!("initial value exceeds {width} digits"))
            }
            Err(e) => return self.syntax(e.to_string()),
        };
        if self.program.inits.insert(addr, value).is_some() {
            return self.semantic(format!("{addr} initialized twice"));
        }
        Ok(())
    }

    fn op(&mut self, rest: &str) -> Result<(), AsmError> {
        let op: Operation = match rest.parse() {
            Ok(op) => op,
            Err(e) => return self.syntax(e),
        };
        self.outside_cycle("OP")?;
        self.program.op_cards.push(op);
        self.cycle = Some(Cycle {
            line: self.line,
            axes: Vec::new(),
        });
        Ok(())
    }

    fn argument(&mut self, axis: Axis, card: VariableCard) -> Result<(), AsmError> {
        let line = self.line;
        let Some(cycle) = self.cycle.as_mut() else {
            return self.semantic("argument card outside a mill cycle (missing OP)");
        };
        if cycle.axes.len() == 2 {
            return self.semantic("mill cycle already has two arguments");
        }
        if cycle.axes.contains(&axis) {
            return Err(AsmError::Semantic {
                line,
                message: format!("axis {axis} supplied twice in one cycle"),
            });
        }
        cycle.axes.push(axis);
        self.program.var_cards.push(card);
        Ok(())
    }

    fn supply(&mut self, rest: &str) -> Result<(), AsmError> {
        let tokens: Vec<&str> = rest.split_whitespace().collect();
        if tokens.len() < 2 {
            return self.syntax("expected SUPPLY <axis> v<k> [SAVE v<k>] [NEG]");
        }
        let axis = self.axis(tokens[0])?;
        let addr = self.address(tokens[1])?;
        let mut save_to = None;
        let mut negate = false;
        let mut i = 2;
        while i < tokens.len() {
            match tokens[i].to_ascii_uppercase().as_str() {
                "SAVE" if save_to.is_none() => {
                    let Some(token) = tokens.get(i + 1) else {
                        return self.syntax("SAVE needs an address");
                    };
                    let aux = self.address(token)?;
                    if aux == addr {
                        return self.semantic(format!("{addr} cannot save into itself"));
                    }
                    save_to = Some(aux);
                    i += 2;
                }
                "NEG" if !negate => {
                    negate = true;
                    i += 1;
                }
                other => return self.syntax(format!("unexpected {other:?} in SUPPLY")),
            }
        }
        if axis == Axis::First {
            self.first_axis_supplied = true;
        }
        self.argument(
            axis,
            VariableCard::Supply {
                axis,
                addr,
                save_to,
                negate,
            },
        )
    }

    fn retain(&mut self, rest: &str) -> Result<(), AsmError> {
        let axis = self.axis(rest)?;
        if !self.first_axis_supplied {
            return self.semantic("RETAIN before any SUPPLY on axis 1");
        }
        self.argument(axis, VariableCard::Retain { axis })
    }

    fn receive(&mut self, rest: &str) -> Result<(), AsmError> {
        let addr = self.address(rest)?;
        match &self.cycle {
            Some(cycle) if cycle.axes.len() == 2 => {}
            Some(_) => return self.semantic("RECEIVE before both arguments are supplied"),
            None => return self.semantic("RECEIVE outside a mill cycle"),
        }
        self.cycle = None;
        self.program.var_cards.push(VariableCard::Receive { addr });
        Ok(())
    }

    fn transfer(&mut self, rest: &str) -> Result<(), AsmError> {
        let tokens: Vec<&str> = rest.split_whitespace().collect();
        if tokens.len() != 3 || !tokens[1].eq_ignore_ascii_case("FROM") {
            return self.syntax("expected XFER v<k> FROM v<k>");
        }
        let target = self.address(tokens[0])?;
        let aux = self.address(tokens[2])?;
        if target == aux {
            return self.semantic(format!("cannot transfer {target} from itself"));
        }
        self.outside_cycle("XFER")?;
        self.program
            .var_cards
            .push(VariableCard::Transfer { target, aux });
        Ok(())
    }
}

/// Canonical source text: INIT lines by address, then cards in schedule order.
pub fn to_text(program: &Program) -> String {
    let mut out = String::new();
    for (addr, value) in &program.inits {
        let _ = writeln!(out, "INIT {addr} = {value}");
    }
    if !program.inits.is_empty() && !program.var_cards.is_empty() {
        out.push('\n');
    }
    let mut ops = program.op_cards.iter();
    let mut args_in_cycle = 0;
    for card in &program.var_cards {
        match card {
            VariableCard::Supply { .. } | VariableCard::Retain { .. } => {
                if args_in_cycle == 0 {
                    if let Some(op) = ops.next() {
                        let _ = writeln!(out, "OP {}", op.glyph());
                    }
                }
                args_in_cycle += 1;
            }
            _ => args_in_cycle = 0,
        }
        let _ = match card {
            VariableCard::Supply {
                axis,
                addr,
                save_to,
                negate,
            } => {
                let _ = write!(out, "  SUPPLY {axis} {addr}");
                if let Some(aux) = save_to {
                    let _ = write!(out, " SAVE {aux}");
                }
                if *negate {
                    out.push_str(" NEG");
                }
                writeln!(out)
            }
            VariableCard::Retain { axis } => writeln!(out, "  RETAIN {axis}"),
            VariableCard::Receive { addr } => writeln!(out, "  RECEIVE {addr}"),
            VariableCard::Transfer { target, aux } => writeln!(out, "XFER {target} FROM {aux}"),
            VariableCard::Halt => writeln!(out, "HALT"),
        };
    }
    out
}
