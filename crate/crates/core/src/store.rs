//! The store: addressable decimal variables with destructive reads.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decimal::DecimalValue;

/// The subscript `k` of a store variable `v_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Address(pub usize);

impl Address {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("invalid address {addr} (store holds {size} variables)")]
    InvalidAddress { addr: Address, size: usize },
    #[error("cannot save {0} into itself")]
    SaveToSelf(Address),
}

/// One snapshot entry: a variable's value and how many times it was overwritten.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub value: DecimalValue,
    pub prime: u32,
}

/// Cells that are nonzero or have been written at least once.
pub type StoreSnapshot = BTreeMap<Address, Cell>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Store {
    cells: Vec<DecimalValue>,
    primes: Vec<u32>,
    initialized: Vec<bool>,
}

impl Store {
    pub fn new(size: usize) -> Self {
        Store {
            cells: vec![DecimalValue::zero(); size],
            primes: vec![0; size],
            initialized: vec![false; size],
        }
    }

    pub fn size(&self) -> usize {
        self.cells.len()
    }

    pub fn check(&self, addr: Address) -> Result<usize, StoreError> {
        if addr.0 < self.cells.len() {
            Ok(addr.0)
        } else {
            Err(StoreError::InvalidAddress {
                addr,
                size: self.cells.len(),
            })
        }
    }

    /// Places an initial value without counting it as an overwrite.
    pub fn initialize(&mut self, addr: Address, value: DecimalValue) -> Result<(), StoreError> {
        let k = self.check(addr)?;
        self.cells[k] = value;
        self.initialized[k] = true;
        Ok(())
    }

    pub fn peek(&self, addr: Address) -> Result<&DecimalValue, StoreError> {
        let k = self.check(addr)?;
        Ok(&self.cells[k])
    }

    pub fn prime_count(&self, addr: Address) -> Result<u32, StoreError> {
        let k = self.check(addr)?;
        Ok(self.primes[k])
    }

    /// The variable's name with one quote per overwrite of its original
    /// content: `v1''`. Filling a variable that started out empty is not an
    /// overwrite, so the first result stored in `v7` is plain `v7`.
    pub fn primed_name(&self, addr: Address) -> Result<String, StoreError> {
        let k = self.check(addr)?;
        let mut quotes = self.primes[k];
        if !self.initialized[k] {
            quotes = quotes.saturating_sub(1);
        }
        Ok(format!("{addr}{}", "'".repeat(quotes as usize)))
    }

    /// Egress from the mill: overwrite `addr` and bump its prime count.
    pub fn receive(&mut self, addr: Address, value: DecimalValue) -> Result<(), StoreError> {
        let k = self.check(addr)?;
        self.cells[k] = value;
        self.primes[k] += 1;
        Ok(())
    }

    /// Reads `addr`, leaving zero behind.
    ///
    /// With `save_to`, the digit-wise complement of the value is received at
    /// that address as the variable runs down.
    pub fn give_off(
        &mut self,
        addr: Address,
        save_to: Option<Address>,
    ) -> Result<DecimalValue, StoreError> {
        let k = self.check(addr)?;
        if let Some(aux) = save_to {
            self.check(aux)?;
            if aux == addr {
                return Err(StoreError::SaveToSelf(addr));
            }
        }
        let value = std::mem::take(&mut self.cells[k]);
        if let Some(aux) = save_to {
            self.receive(aux, value.digitwise_complement())?;
        }
        Ok(value)
    }

    /// Memory-only transfer: `aux` is read destructively and its complement
    /// is received at `target`.
    pub fn restore(&mut self, target: Address, aux: Address) -> Result<(), StoreError> {
        self.check(target)?;
        self.check(aux)?;
        if target == aux {
            return Err(StoreError::SaveToSelf(target));
        }
        let saved = self.give_off(aux, None)?;
        self.receive(target, saved.digitwise_complement())
    }

    pub fn snapshot(&self) -> StoreSnapshot {
        self.cells
            .iter()
            .zip(&self.primes)
            .enumerate()
            .filter(|(_, (value, &prime))| !value.is_zero() || prime > 0)
            .map(|(k, (value, &prime))| {
                (
                    Address(k),
                    Cell {
                        value: value.clone(),
                        prime,
                    },
                )
            })
            .collect()
    }
}
