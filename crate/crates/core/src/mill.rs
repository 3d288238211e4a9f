//! The mill: a four-operation processor with two ingress axes.
//!
//! The first-axis argument of every cycle is also kept in a single held
//! register, so the following cycle can take it again without another store
//! read (the b' of `b'a`, `b'c`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decimal::{DecimalError, DecimalValue, MachineConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operation {
    Add,
    Sub,
    Mul,
    Div,
}

impl Operation {
    pub const ALL: [Operation; 4] = [
        Operation::Add,
        Operation::Sub,
        Operation::Mul,
        Operation::Div,
    ];

    /// Table glyph: `+ − × ÷`.
    pub fn glyph(self) -> &'static str {
        match self {
            Operation::Add => "+",
            Operation::Sub => "\u{2212}",
            Operation::Mul => "\u{d7}",
            Operation::Div => "\u{f7}",
        }
    }

    /// JSON name: `add sub mul div`.
    pub fn name(self) -> &'static str {
        match self {
            Operation::Add => "add",
            Operation::Sub => "sub",
            Operation::Mul => "mul",
            Operation::Div => "div",
        }
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.glyph())
    }
}

/// Accepts both glyph spellings and the ASCII aliases `* / -`.
impl FromStr for Operation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" => Ok(Operation::Add),
            "-" | "\u{2212}" => Ok(Operation::Sub),
            "*" | "\u{d7}" => Ok(Operation::Mul),
            "/" | "\u{f7}" => Ok(Operation::Div),
            other => Err(format!("unknown operation {other:?}")),
        }
    }
}

/// Ingress axis of the mill; serialized as 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Axis {
    First,
    Second,
}

impl Axis {
    fn slot(self) -> usize {
        match self {
            Axis::First => 0,
            Axis::Second => 1,
        }
    }
}

impl TryFrom<u8> for Axis {
    type Error = String;

    fn try_from(n: u8) -> Result<Self, Self::Error> {
        match n {
            1 => Ok(Axis::First),
            2 => Ok(Axis::Second),
            other => Err(format!("axis must be 1 or 2, got {other}")),
        }
    }
}

impl From<Axis> for u8 {
    fn from(axis: Axis) -> u8 {
        match axis {
            Axis::First => 1,
            Axis::Second => 2,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MillError {
    #[error("axis {0} is already occupied")]
    AxisOccupied(Axis),
    #[error("no argument is held for reuse")]
    NothingHeld,
    #[error("mill not ready: operation and both axes must be set")]
    NotReady,
    #[error(transparent)]
    Arithmetic(#[from] DecimalError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Mill {
    operation: Option<Operation>,
    axes: [Option<DecimalValue>; 2],
    held: Option<DecimalValue>,
}

impl Mill {
    pub fn new() -> Self {
        Mill::default()
    }

    pub fn operation(&self) -> Option<Operation> {
        self.operation
    }

    pub fn axis(&self, axis: Axis) -> Option<&DecimalValue> {
        self.axes[axis.slot()].as_ref()
    }

    pub fn held(&self) -> Option<&DecimalValue> {
        self.held.as_ref()
    }

    /// Switches the operation; clears both axes, keeps the held argument.
    pub fn set_operation(&mut self, op: Operation) {
        self.operation = Some(op);
        self.axes = [None, None];
    }

    /// Loads an argument, optionally sign-flipped.
    ///
    /// A first-axis argument also becomes the held value, before negation.
    pub fn ingress(
        &mut self,
        axis: Axis,
        value: DecimalValue,
        negate: bool,
    ) -> Result<(), MillError> {
        if self.axes[axis.slot()].is_some() {
            return Err(MillError::AxisOccupied(axis));
        }
        let loaded = if negate {
            value.negated()
        } else {
            value.clone()
        };
        if axis == Axis::First {
            self.held = Some(value);
        }
        self.axes[axis.slot()] = Some(loaded);
        Ok(())
    }

    /// Loads the held argument onto `axis`.
    pub fn retain(&mut self, axis: Axis) -> Result<(), MillError> {
        let held = self.held.clone().ok_or(MillError::NothingHeld)?;
        if self.axes[axis.slot()].is_some() {
            return Err(MillError::AxisOccupied(axis));
        }
        self.axes[axis.slot()] = Some(held);
        Ok(())
    }

    /// Computes `axis1 op axis2` and clears the axes.
    ///
    /// On an arithmetic error the axes are left loaded.
    pub fn execute(&mut self, config: &MachineConfig) -> Result<DecimalValue, MillError> {
        let (Some(op), Some(lhs), Some(rhs)) =
            (self.operation, self.axes[0].as_ref(), self.axes[1].as_ref())
        else {
            return Err(MillError::NotReady);
        };
        let result = DecimalValue::arithmetic(op, lhs, rhs, config)?;
        self.axes = [None, None];
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decimal::DecimalError;

    fn v(n: i64) -> DecimalValue {
        DecimalValue::from(n)
    }

    #[test]
    fn operation_spellings() {
        for (text, op) in [
            ("*", Operation::Mul),
            ("×", Operation::Mul),
            ("/", Operation::Div),
            ("÷", Operation::Div),
            ("+", Operation::Add),
            ("-", Operation::Sub),
            ("−", Operation::Sub),
        ] {
            assert_eq!(text.parse::<Operation>(), Ok(op));
        }
        assert!("?".parse::<Operation>().is_err());
        for op in Operation::ALL {
            assert_eq!(op.glyph().parse::<Operation>(), Ok(op));
        }
    }

    #[test]
    fn set_operation_keeps_held() {
        let mut m = Mill::new();
        m.set_operation(Operation::Mul);
        assert_eq!(m.operation(), Some(Operation::Mul));
        m.ingress(Axis::First, v(-1), false).unwrap();
        m.set_operation(Operation::Sub);
        assert_eq!(m.operation(), Some(Operation::Sub));
        assert_eq!(m.axis(Axis::First), None);
        assert_eq!(m.held(), Some(&v(-1)));
        m.set_operation(Operation::Div);
        assert_eq!(m.operation(), Some(Operation::Div));
    }

    #[test]
    fn ingress_and_negation() {
        let mut m = Mill::new();
        m.ingress(Axis::First, v(-1), false).unwrap();
        assert_eq!(m.axis(Axis::First), Some(&v(-1)));
        assert_eq!(m.held(), Some(&v(-1)));

        let mut m = Mill::new();
        m.ingress(Axis::First, v(-8), true).unwrap();
        assert_eq!(m.axis(Axis::First), Some(&v(8)));
        assert_eq!(m.held(), Some(&v(-8)));

        assert_eq!(
            m.ingress(Axis::First, v(3), false),
            Err(MillError::AxisOccupied(Axis::First))
        );
    }

    #[test]
    fn second_axis_does_not_touch_held() {
        let mut m = Mill::new();
        m.ingress(Axis::Second, v(5), false).unwrap();
        assert_eq!(m.held(), None);
    }

    #[test]
    fn retention_across_cycles() {
        let cfg = MachineConfig::default();
        let mut m = Mill::new();
        m.set_operation(Operation::Mul);
        m.ingress(Axis::First, v(-1), false).unwrap();
        m.ingress(Axis::Second, v(1), false).unwrap();
        assert_eq!(m.execute(&cfg), Ok(v(-1)));

        m.set_operation(Operation::Mul);
        m.retain(Axis::First).unwrap();
        assert_eq!(m.axis(Axis::First), Some(&v(-1)));
        m.ingress(Axis::Second, v(-8), false).unwrap();
        assert_eq!(m.execute(&cfg), Ok(v(8)));

        m.set_operation(Operation::Mul);
        m.ingress(Axis::First, v(2), false).unwrap();
        m.ingress(Axis::Second, v(1), false).unwrap();
        m.execute(&cfg).unwrap();
        m.set_operation(Operation::Mul);
        m.retain(Axis::First).unwrap();
        assert_eq!(m.axis(Axis::First), Some(&v(2)));
    }

    #[test]
    fn retain_errors() {
        let mut m = Mill::new();
        assert_eq!(m.retain(Axis::First), Err(MillError::NothingHeld));
        m.ingress(Axis::First, v(4), false).unwrap();
        assert_eq!(
            m.retain(Axis::First),
            Err(MillError::AxisOccupied(Axis::First))
        );
        m.retain(Axis::Second).unwrap();
        assert_eq!(m.axis(Axis::Second), Some(&v(4)));
    }

    #[test]
    fn execute_examples() {
        let cfg = MachineConfig::default();
        let run = |op, a: i64, b: i64| {
            let mut m = Mill::new();
            m.set_operation(op);
            m.ingress(Axis::First, v(a), false).unwrap();
            m.ingress(Axis::Second, v(b), false).unwrap();
            m.execute(&cfg)
        };
        assert_eq!(run(Operation::Mul, -1, 1), Ok(v(-1)));
        assert_eq!(run(Operation::Sub, 2, 8), Ok(v(-6)));
        assert_eq!(run(Operation::Div, -6, -3), Ok(v(2)));
        assert_eq!(
            run(Operation::Div, -6, 0),
            Err(MillError::Arithmetic(DecimalError::DivisionByZero))
        );
    }

    #[test]
    fn execute_requires_everything() {
        let cfg = MachineConfig::default();
        let mut m = Mill::new();
        assert_eq!(m.execute(&cfg), Err(MillError::NotReady));
        m.set_operation(Operation::Add);
        m.ingress(Axis::First, v(1), false).unwrap();
        assert_eq!(m.execute(&cfg), Err(MillError::NotReady));
        m.ingress(Axis::Second, v(1), false).unwrap();
        assert_eq!(m.execute(&cfg), Ok(v(2)));
        assert_eq!(m.axis(Axis::First), None);
        assert_eq!(m.axis(Axis::Second), None);
    }

    #[test]
    fn axis_serializes_as_number() {
        assert_eq!(serde_json::to_string(&Axis::Second).unwrap(), "2");
        assert_eq!(serde_json::from_str::<Axis>("1").unwrap(), Axis::First);
        assert!(serde_json::from_str::<Axis>("3").is_err());
        assert_eq!(serde_json::to_string(&Operation::Mul).unwrap(), "\"mul\"");
    }
}
