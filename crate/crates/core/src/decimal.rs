//! Sign-magnitude decimal integers of bounded digit width.
//!
//! A [`DecimalValue`] is what one store variable or one mill axis holds: a
//! sign flag and a run of decimal digits. The digit width is a property of
//! the machine ([`MachineConfig::digit_width`]), not of the value; it is
//! enforced whenever a value is created from a literal or produced by the
//! mill. The digit-wise complement maps every nonzero digit to a nonzero
//! digit, so it never changes how many digits a value occupies and does not
//! depend on the width at all.
//!
//! Arithmetic is done digit by digit on the magnitudes (schoolbook addition,
//! subtraction and multiplication, long division by repeated subtraction).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::mill::Operation;

pub const DEFAULT_DIGIT_WIDTH: usize = 40;
pub const DEFAULT_STORE_SIZE: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecimalError {
    #[error("malformed literal {0:?}")]
    MalformedLiteral(String),
    #[error("overflow: result does not fit in {width} digits")]
    Overflow { width: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("inexact division: nonzero remainder")]
    InexactDivision,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("digit width must be at least 1")]
    ZeroDigitWidth,
    #[error("store size must be at least 1")]
    ZeroStoreSize,
}

/// How the mill treats a division with a nonzero remainder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DivisionMode {
    /// Nonzero remainders are an error.
    #[default]
    Exact,
    /// The quotient is truncated toward zero.
    Truncate,
}

impl FromStr for DivisionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(DivisionMode::Exact),
            "truncate" => Ok(DivisionMode::Truncate),
            other => Err(format!(
                "unknown division mode {other:?} (expected exact or truncate)"
            )),
        }
    }
}

/// Machine-wide parameters shared by the store, the mill and the assembler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MachineConfig {
    pub digit_width: usize,
    pub store_size: usize,
    pub division_mode: DivisionMode,
}

impl Default for MachineConfig {
    fn default() -> Self {
        MachineConfig {
            digit_width: DEFAULT_DIGIT_WIDTH,
            store_size: DEFAULT_STORE_SIZE,
            division_mode: DivisionMode::Exact,
        }
    }
}

impl MachineConfig {
    pub fn new(
        digit_width: usize,
        store_size: usize,
        division_mode: DivisionMode,
    ) -> Result<Self, ConfigError> {
        let config = MachineConfig {
            digit_width,
            store_size,
            division_mode,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.digit_width == 0 {
            return Err(ConfigError::ZeroDigitWidth);
        }
        if self.store_size == 0 {
            return Err(ConfigError::ZeroStoreSize);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    fn product(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// A signed decimal integer.
///
/// The magnitude is kept least significant digit first with no high-order
/// zeros, so zero is the empty digit run and always carries [`Sign::Plus`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DecimalValue {
    sign: Sign,
    magnitude: Vec<u8>,
}

impl DecimalValue {
    pub fn zero() -> Self {
        DecimalValue {
            sign: Sign::Plus,
            magnitude: Vec::new(),
        }
    }

    fn from_parts(sign: Sign, mut magnitude: Vec<u8>) -> Self {
        trim(&mut magnitude);
        let sign = if magnitude.is_empty() {
            Sign::Plus
        } else {
            sign
        };
        DecimalValue { sign, magnitude }
    }

    /// Parses a signed literal and checks it against the machine's digit width.
    ///
    /// Accepts an optional `-` (or U+2212) followed by decimal digits. Leading
    /// zeros are ignored for the width check and `-0` is plain zero.
    pub fn from_literal(text: &str, config: &MachineConfig) -> Result<Self, DecimalError> {
        let value: DecimalValue = text.parse()?;
        value.check_width(config.digit_width)?;
        Ok(value)
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.magnitude.is_empty()
    }

    pub fn is_negative(&self) -> bool {
        self.sign == Sign::Minus
    }

    /// Number of significant digits in the magnitude (0 for zero).
    pub fn significant_digits(&self) -> usize {
        self.magnitude.len()
    }

    /// The magnitude as exactly `width` digits, most significant first.
    ///
    /// Returns `None` when the magnitude needs more than `width` digits.
    pub fn digits(&self, width: usize) -> Option<Vec<u8>> {
        if self.magnitude.len() > width {
            return None;
        }
        let mut out = vec![0u8; width - self.magnitude.len()];
        out.extend(self.magnitude.iter().rev());
        Some(out)
    }

    pub fn check_width(&self, width: usize) -> Result<(), DecimalError> {
        if self.magnitude.len() > width {
            Err(DecimalError::Overflow { width })
        } else {
            Ok(())
        }
    }

    pub fn negated(&self) -> Self {
        DecimalValue::from_parts(self.sign.flip(), self.magnitude.clone())
    }

    pub fn abs(&self) -> Self {
        DecimalValue::from_parts(Sign::Plus, self.magnitude.clone())
    }

    /// Replaces every magnitude digit `d` by `(10 - d) mod 10`; the sign is kept.
    ///
    /// This is what a receiving gear reads when a variable is run down to zero
    /// into it: 345 becomes 765, and complementing again gives back 345.
    pub fn digitwise_complement(&self) -> Self {
        let magnitude = self.magnitude.iter().map(|&d| (10 - d) % 10).collect();
        DecimalValue::from_parts(self.sign, magnitude)
    }

    pub fn arithmetic(
        op: Operation,
        lhs: &DecimalValue,
        rhs: &DecimalValue,
        config: &MachineConfig,
    ) -> Result<DecimalValue, DecimalError> {
        let result = match op {
            Operation::Add => signed_add(lhs, rhs),
            Operation::Sub => signed_add(lhs, &rhs.negated()),
            Operation::Mul => DecimalValue::from_parts(
                lhs.sign.product(rhs.sign),
                mul_magnitudes(&lhs.magnitude, &rhs.magnitude),
            ),
            Operation::Div => {
                if rhs.is_zero() {
                    return Err(DecimalError::DivisionByZero);
                }
                let (quotient, remainder) = divrem_magnitudes(&lhs.magnitude, &rhs.magnitude);
                if !remainder.is_empty() && config.division_mode == DivisionMode::Exact {
                    return Err(DecimalError::InexactDivision);
                }
                DecimalValue::from_parts(lhs.sign.product(rhs.sign), quotient)
            }
        };
        result.check_width(config.digit_width)?;
        Ok(result)
    }
}

impl Default for DecimalValue {
    fn default() -> Self {
        DecimalValue::zero()
    }
}

impl From<i64> for DecimalValue {
    fn from(v: i64) -> Self {
        let sign = if v < 0 { Sign::Minus } else { Sign::Plus };
        let mut rest = v.unsigned_abs();
        let mut magnitude = Vec::new();
        while rest > 0 {
            magnitude.push((rest % 10) as u8);
            rest /= 10;
        }
        DecimalValue::from_parts(sign, magnitude)
    }
}

/// Parses without a width limit; see [`DecimalValue::from_literal`].
impl FromStr for DecimalValue {
    type Err = DecimalError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let malformed = || DecimalError::MalformedLiteral(text.to_string());
        let (sign, body) = if let Some(rest) = text.strip_prefix('-') {
            (Sign::Minus, rest)
        } else if let Some(rest) = text.strip_prefix('\u{2212}') {
            (Sign::Minus, rest)
        } else {
            (Sign::Plus, text)
        };
        if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let magnitude = body.bytes().rev().map(|b| b - b'0').collect();
        Ok(DecimalValue::from_parts(sign, magnitude))
    }
}

impl fmt::Display for DecimalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.magnitude.is_empty() {
            return f.write_str("0");
        }
        let mut s = String::with_capacity(self.magnitude.len() + 1);
        if self.is_negative() {
            s.push('-');
        }
        s.extend(self.magnitude.iter().rev().map(|&d| char::from(b'0' + d)));
        f.pad(&s)
    }
}

impl fmt::Debug for DecimalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DecimalValue({self})")
    }
}

impl Ord for DecimalValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.sign, other.sign) {
            (Sign::Plus, Sign::Minus) => Ordering::Greater,
            (Sign::Minus, Sign::Plus) => Ordering::Less,
            (Sign::Plus, Sign::Plus) => cmp_magnitudes(&self.magnitude, &other.magnitude),
            (Sign::Minus, Sign::Minus) => cmp_magnitudes(&other.magnitude, &self.magnitude),
        }
    }
}

impl PartialOrd for DecimalValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for DecimalValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DecimalValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn trim(digits: &mut Vec<u8>) {
    while digits.last() == Some(&0) {
        digits.pop();
    }
}

fn cmp_magnitudes(a: &[u8], b: &[u8]) -> Ordering {
    a.len()
        .cmp(&b.len())
        .then_with(|| a.iter().rev().cmp(b.iter().rev()))
}

fn add_magnitudes(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(a.len().max(b.len()) + 1);
    let mut carry = 0u8;
    for i in 0..a.len().max(b.len()) {
        let sum = a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0) + carry;
        out.push(sum % 10);
        carry = sum / 10;
    }
    if carry > 0 {
        out.push(carry);
    }
    out
}

/// `a - b` for `a >= b`.
fn sub_magnitudes(a: &[u8], b: &[u8]) -> Vec<u8> {
    debug_assert!(cmp_magnitudes(a, b) != Ordering::Less);
    let mut out = Vec::with_capacity(a.len());
    let mut borrow = 0i8;
    for (i, &digit) in a.iter().enumerate() {
        let mut d = digit as i8 - b.get(i).copied().unwrap_or(0) as i8 - borrow;
        borrow = 0;
        if d < 0 {
            d += 10;
            borrow = 1;
        }
        out.push(d as u8);
    }
    trim(&mut out);
    out
}

fn mul_magnitudes(a: &[u8], b: &[u8]) -> Vec<u8> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut acc = vec![0u32; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            acc[i + j] += x as u32 * y as u32;
        }
    }
    let mut out = Vec::with_capacity(acc.len());
    let mut carry = 0u32;
    for cell in acc {
        let v = cell + carry;
        out.push((v % 10) as u8);
        carry = v / 10;
    }
    while carry > 0 {
        out.push((carry % 10) as u8);
        carry /= 10;
    }
    trim(&mut out);
    out
}

/// Long division of magnitudes; `b` must be nonzero.
fn divrem_magnitudes(a: &[u8], b: &[u8]) -> (Vec<u8>, Vec<u8>) {
    debug_assert!(!b.is_empty());
    let mut quotient = vec![0u8; a.len()];
    let mut remainder: Vec<u8> = Vec::with_capacity(b.len() + 1);
    for (pos, &digit) in a.iter().enumerate().rev() {
        remainder.insert(0, digit);
        trim(&mut remainder);
        let mut q = 0u8;
        while cmp_magnitudes(&remainder, b) != Ordering::Less {
            remainder = sub_magnitudes(&remainder, b);
            q += 1;
        }
        quotient[pos] = q;
    }
    trim(&mut quotient);
    (quotient, remainder)
}

fn signed_add(lhs: &DecimalValue, rhs: &DecimalValue) -> DecimalValue {
    if lhs.sign == rhs.sign {
        return DecimalValue::from_parts(lhs.sign, add_magnitudes(&lhs.magnitude, &rhs.magnitude));
    }
    match cmp_magnitudes(&lhs.magnitude, &rhs.magnitude) {
        Ordering::Equal => DecimalValue::zero(),
        Ordering::Greater => {
            DecimalValue::from_parts(lhs.sign, sub_magnitudes(&lhs.magnitude, &rhs.magnitude))
        }
        Ordering::Less => {
            DecimalValue::from_parts(rhs.sign, sub_magnitudes(&rhs.magnitude, &lhs.magnitude))
        }
    }
}
