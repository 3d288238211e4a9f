//! The two 1837 reference programs for `ax + by + c = 0`, `a'x + b'y + c' = 0`,
//! and a closed-form solver to check them against.
//!
//! The coefficients `a, b, c, a', b', c'` sit in `v1..v6`. The first program
//! computes only `x`, ending in `v3''`. The second parks complements of `a`,
//! `c` and `b` in `v8`, `v5` and `v9` while computing `x` into `v4`, brings
//! the coefficients back with three transfers, and then computes `y` into
//! `v5'''`.
//!
//! The solver works in exact rationals and shares no code with the decimal
//! arithmetic of the mill.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::decimal::{DecimalError, DecimalValue, MachineConfig};
use crate::engine::{self, EngineError, Program, Trace, VariableCard};
use crate::mill::{Axis, Operation};
use crate::store::Address;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coefficients {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub a_p: BigInt,
    pub b_p: BigInt,
    pub c_p: BigInt,
}

impl Coefficients {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        a_p: impl Into<BigInt>,
        b_p: impl Into<BigInt>,
        c_p: impl Into<BigInt>,
    ) -> Self {
        Coefficients {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            a_p: a_p.into(),
            b_p: b_p.into(),
            c_p: c_p.into(),
        }
    }

    /// In store order `a, b, c, a', b', c'` (addresses 1 to 6).
    pub fn in_store_order(&self) -> [&BigInt; 6] {
        [&self.a, &self.b, &self.c, &self.a_p, &self.b_p, &self.c_p]
    }

    pub fn initial_store(
        &self,
        config: &MachineConfig,
    ) -> Result<BTreeMap<Address, DecimalValue>, DecimalError> {
        self.in_store_order()
            .into_iter()
            .enumerate()
            .map(|(k, value)| {
                Ok((
                    Address(k + 1),
                    DecimalValue::from_literal(&value.to_string(), config)?,
                ))
            })
            .collect()
    }
}

/// Names of the initial contents of `v1..v6`, for table rendering.
pub fn coefficient_symbols() -> BTreeMap<Address, String> {
    ["a", "b", "c", "a'", "b'", "c'"]
        .into_iter()
        .enumerate()
        .map(|(k, name)| (Address(k + 1), name.to_string()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub x: BigRational,
    pub y: BigRational,
}

impl Solution {
    /// Substitutes into both equations.
    pub fn satisfies(&self, co: &Coefficients) -> bool {
        let r = |n: &BigInt| BigRational::from_integer(n.clone());
        let first = r(&co.a) * &self.x + r(&co.b) * &self.y + r(&co.c);
        let second = r(&co.a_p) * &self.x + r(&co.b_p) * &self.y + r(&co.c_p);
        first.is_zero() && second.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("singular system: b'a - ba' = 0")]
    SingularSystem,
    #[error("degenerate system: b = 0")]
    DegenerateB,
}

/// `x = (bc' - b'c) / (b'a - ba')`, then `y = (-c - ax) / b`.
pub fn solve_closed_form(co: &Coefficients) -> Result<Solution, OracleError> {
    let r = |n: &BigInt| BigRational::from_integer(n.clone());
    let denominator = r(&co.b_p) * r(&co.a) - r(&co.b) * r(&co.a_p);
    if denominator.is_zero() {
        return Err(OracleError::SingularSystem);
    }
    if co.b.is_zero() {
        return Err(OracleError::DegenerateB);
    }
    let x = (r(&co.b) * r(&co.c_p) - r(&co.b_p) * r(&co.c)) / denominator;
    let y = (-r(&co.c) - r(&co.a) * &x) / r(&co.b);
    let y_alt = (-(r(&co.a) * &x) - r(&co.c)) / r(&co.b);
    assert_eq!(y, y_alt, "both forms of y must agree");
    Ok(Solution { x, y })
}

struct CardBuilder {
    ops: Vec<Operation>,
    cards: Vec<VariableCard>,
}

#[derive(Clone, Copy)]
enum Arg {
    Supply(usize),
    SupplySave(usize, usize),
    SupplyNeg(usize),
    Retain,
}

impl CardBuilder {
    fn new() -> Self {
        CardBuilder {
            ops: Vec::new(),
            cards: Vec::new(),
        }
    }

    fn cycle(&mut self, op: Operation, first: Arg, second: Arg, result: usize) -> &mut Self {
        self.ops.push(op);
        for (axis, arg) in [(Axis::First, first), (Axis::Second, second)] {
            self.cards.push(match arg {
                Arg::Retain => VariableCard::Retain { axis },
                Arg::Supply(k) | Arg::SupplySave(k, _) | Arg::SupplyNeg(k) => {
                    VariableCard::Supply {
                        axis,
                        addr: Address(k),
                        save_to: match arg {
                            Arg::SupplySave(_, aux) => Some(Address(aux)),
                            _ => None,
                        },
                        negate: matches!(arg, Arg::SupplyNeg(_)),
                    }
                }
            });
        }
        self.cards.push(VariableCard::Receive {
            addr: Address(result),
        });
        self
    }

    fn transfer(&mut self, target: usize, aux: usize) -> &mut Self {
        self.cards.push(VariableCard::Transfer {
            target: Address(target),
            aux: Address(aux),
        });
        self
    }

    fn finish(&mut self, inits: BTreeMap<Address, DecimalValue>, config: MachineConfig) -> Program {
        Program {
            op_cards: std::mem::take(&mut self.ops),
            var_cards: std::mem::take(&mut self.cards),
            inits,
            config,
        }
    }
}

/// The seven-operation program computing `x` into `v3`.
pub fn build_program_x(co: &Coefficients, config: MachineConfig) -> Result<Program, DecimalError> {
    use Arg::*;
    use Operation::*;
    let inits = co.initial_store(&config)?;
    Ok(CardBuilder::new()
        .cycle(Mul, Supply(5), Supply(1), 7) // v7 = v5 · v1          b'a
        .cycle(Mul, Retain, Supply(3), 1) // v1' = v5 · v3           b'c
        .cycle(Mul, Supply(2), Supply(4), 3) // v3' = v2 · v4        ba'
        .cycle(Mul, Retain, Supply(6), 2) // v2' = v2 · v6           bc'
        .cycle(Sub, Supply(2), Supply(1), 4) // v4' = v2' - v1'      bc' - b'c
        .cycle(Sub, Supply(7), Supply(3), 1) // v1'' = v7 - v3'      b'a - ba'
        .cycle(Div, Supply(4), Supply(1), 3) // v3'' = v4' / v1''    x
        .finish(inits, config))
}

/// The thirteen-step program computing `x` into `v4` and `y` into `v5`.
pub fn build_program_xy(co: &Coefficients, config: MachineConfig) -> Result<Program, DecimalError> {
    use Arg::*;
    use Operation::*;
    let inits = co.initial_store(&config)?;
    Ok(CardBuilder::new()
        .cycle(Mul, Supply(5), SupplySave(1, 8), 7) // v7 = v5 · v1, Ca in v8
        .cycle(Mul, Retain, SupplySave(3, 5), 1) // v1' = v5 · v3, Cc in v5
        .cycle(Mul, SupplySave(2, 9), Supply(4), 3) // v3' = v2 · v4, Cb in v9
        .cycle(Mul, Retain, Supply(6), 2) // v2' = v2 · v6
        .cycle(Sub, Supply(2), Supply(1), 6) // v6' = v2' - v1'
        .cycle(Sub, Supply(7), Supply(3), 2) // v2'' = v7 - v3'
        .cycle(Div, Supply(6), Supply(2), 4) // v4 = v6' / v2''        x
        .transfer(1, 8) // v1'' = a
        .transfer(2, 9) // v2''' = b
        .transfer(3, 5) // v3'' = c
        .cycle(Mul, Supply(1), Supply(4), 5) // v5'' = v1'' · v4'      ax
        .cycle(Sub, SupplyNeg(3), Supply(5), 1) // v1''' = -v3'' - v5''  -c - ax
        .cycle(Div, Supply(1), Supply(2), 5) // v5''' = v1''' / v2'''  y
        .finish(inits, config))
}

/// Where each program leaves its results.
pub const PROGRAM_X_RESULT: Address = Address(3);
pub const PROGRAM_XY_X: Address = Address(4);
pub const PROGRAM_XY_Y: Address = Address(5);
/// Step of the second program whose egress is `x`.
pub const PROGRAM_XY_X_STEP: u32 = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Coefficient(#[from] DecimalError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Result of running a reference program on the engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineSolution {
    pub x: DecimalValue,
    /// Only the second program computes `y`.
    pub y: Option<DecimalValue>,
    pub trace: Trace,
}

/// Runs the first program; `x` is read from the final `v3`.
pub fn run_program_x(
    co: &Coefficients,
    config: MachineConfig,
) -> Result<EngineSolution, SolveError> {
    let trace = engine::run(&build_program_x(co, config)?)?;
    let x = final_value(&trace, PROGRAM_X_RESULT);
    Ok(EngineSolution { x, y: None, trace })
}

/// Runs the second program.
///
/// `x` is taken from the step-7 egress because step 11 reads `v4` again and
/// leaves it zero; `y` is the final `v5`.
pub fn run_program_xy(
    co: &Coefficients,
    config: MachineConfig,
) -> Result<EngineSolution, SolveError> {
    let trace = engine::run(&build_program_xy(co, config)?)?;
    let x = trace
        .rows
        .iter()
        .find(|row| row.step == PROGRAM_XY_X_STEP)
        .and_then(|row| row.write.as_ref())
        .map(|write| write.value.clone())
        .unwrap_or_default();
    let y = final_value(&trace, PROGRAM_XY_Y);
    Ok(EngineSolution {
        x,
        y: Some(y),
        trace,
    })
}

fn final_value(trace: &Trace, addr: Address) -> DecimalValue {
    trace
        .final_store
        .get(&addr)
        .map(|cell| cell.value.clone())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decimal::DecimalError;
    use crate::engine::Engine;

    fn rational(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn v(n: i64) -> DecimalValue {
        DecimalValue::from(n)
    }

    #[test]
    fn closed_form_examples() {
        let s = solve_closed_form(&Coefficients::new(1, 2, -8, 1, -1, 1)).unwrap();
        assert_eq!((s.x.clone(), s.y.clone()), (rational(2), rational(3)));
        assert!(s.satisfies(&Coefficients::new(1, 2, -8, 1, -1, 1)));

        let s = solve_closed_form(&Coefficients::new(1, 1, -3, 1, -1, 1)).unwrap();
        assert_eq!((s.x, s.y), (rational(1), rational(2)));

        assert_eq!(
            solve_closed_form(&Coefficients::new(1, 1, 4, 1, 1, 7)),
            Err(OracleError::SingularSystem)
        );
        assert_eq!(
            solve_closed_form(&Coefficients::new(1, 0, 4, 2, 3, 7)),
            Err(OracleError::DegenerateB)
        );
    }

    #[test]
    fn closed_form_handles_fractions() {
        // 2x + 3y - 1 = 0, x - y = 0  ->  x = y = 1/5
        let co = Coefficients::new(2, 3, -1, 1, -1, 0);
        let s = solve_closed_form(&co).unwrap();
        let fifth = BigRational::new(BigInt::from(1), BigInt::from(5));
        assert_eq!(s.x, fifth);
        assert_eq!(s.y, fifth);
        assert!(s.satisfies(&co));
    }

    #[test]
    fn program_x_examples() {
        let cfg = MachineConfig::default();
        let run = run_program_x(&Coefficients::new(1, 2, -8, 1, -1, 1), cfg).unwrap();
        assert_eq!(run.x, v(2));
        assert_eq!(run.trace.final_store[&Address(3)].prime, 2);

        let run = run_program_x(&Coefficients::new(1, 1, -3, 1, -1, 1), cfg).unwrap();
        assert_eq!(run.x, v(1));

        let err = run_program_x(&Coefficients::new(2, 3, 1, 2, 3, 5), cfg).unwrap_err();
        let SolveError::Engine(err) = err else {
            panic!("expected an engine error")
        };
        assert_eq!(err.step(), Some(7));
        assert_eq!(err.arithmetic(), Some(&DecimalError::DivisionByZero));
    }

    #[test]
    fn program_xy_examples() {
        let cfg = MachineConfig::default();
        let run = run_program_xy(&Coefficients::new(1, 2, -8, 1, -1, 1), cfg).unwrap();
        assert_eq!(run.x, v(2));
        assert_eq!(run.y, Some(v(3)));
        assert_eq!(run.trace.final_store[&Address(5)].prime, 3);

        let run = run_program_xy(&Coefficients::new(1, 1, -3, 1, -1, 1), cfg).unwrap();
        assert_eq!((run.x, run.y), (v(1), Some(v(2))));
    }

    #[test]
    fn coefficients_come_back_after_step_ten() {
        let co = Coefficients::new(7, -12, -45, 4, 9, 6);
        let program = build_program_xy(&co, MachineConfig::default()).unwrap();
        let mut engine = Engine::load(&program).unwrap();
        for _ in 0..10 {
            engine.step().unwrap();
        }
        let store = engine.store();
        assert_eq!(store.peek(Address(1)).unwrap(), &v(7));
        assert_eq!(store.peek(Address(2)).unwrap(), &v(-12));
        assert_eq!(store.peek(Address(3)).unwrap(), &v(-45));
        assert!(store.peek(Address(8)).unwrap().is_zero());
        assert!(store.peek(Address(9)).unwrap().is_zero());
        assert!(store.peek(Address(5)).unwrap().is_zero());
    }

    #[test]
    fn inexact_quotient_surfaces_at_step_thirteen() {
        // x = 1 exactly, but y = (7 - 1) / 4 is not an integer.
        let co = Coefficients::new(1, 4, -7, 1, -4, 5);
        let s = solve_closed_form(&co).unwrap();
        assert_eq!(s.x, rational(1));
        let SolveError::Engine(err) = run_program_xy(&co, MachineConfig::default()).unwrap_err()
        else {
            panic!("expected an engine error")
        };
        assert_eq!(err.step(), Some(13));
        assert_eq!(err.arithmetic(), Some(&DecimalError::InexactDivision));
    }

    #[test]
    fn oversized_coefficient_is_rejected() {
        let cfg = MachineConfig {
            digit_width: 2,
            ..MachineConfig::default()
        };
        assert_eq!(
            build_program_x(&Coefficients::new(100, 1, 1, 1, 1, 1), cfg),
            Err(DecimalError::Overflow { width: 2 })
        );
    }

    #[test]
    fn symbols_cover_the_six_coefficients() {
        let symbols = coefficient_symbols();
        assert_eq!(symbols[&Address(1)], "a");
        assert_eq!(symbols[&Address(6)], "c'");
        assert_eq!(symbols.len(), 6);
    }
}
