//! Rendering traces as tables in the style of the 1837 sketches, and as JSON
//! or CSV.
//!
//! In the table a store column shows `0` when the step read (and so zeroed)
//! that variable, the value when the step wrote or parked a complement there,
//! and nothing otherwise. Steps that deliver a quotient carry a `*`.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::decimal::DecimalValue;
use crate::engine::{Trace, TraceRow};
use crate::store::Address;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("a table needs at least one store column")]
    NoColumns,
    #[error("store column {0} listed twice")]
    DuplicateColumn(Address),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableLayout {
    store_columns: Vec<Address>,
    pub show_symbolic: bool,
    /// Names for initial contents, shown after transfer comments (`v1'' = v1 = a`).
    pub symbols: BTreeMap<Address, String>,
}

impl TableLayout {
    pub fn new(store_columns: Vec<Address>, show_symbolic: bool) -> Result<Self, LayoutError> {
        if store_columns.is_empty() {
            return Err(LayoutError::NoColumns);
        }
        let mut seen = BTreeSet::new();
        for addr in &store_columns {
            if !seen.insert(*addr) {
                return Err(LayoutError::DuplicateColumn(*addr));
            }
        }
        Ok(TableLayout {
            store_columns,
            show_symbolic,
            symbols: BTreeMap::new(),
        })
    }

    /// Every address the trace touches, in address order.
    pub fn for_trace(trace: &Trace) -> Self {
        let mut columns = BTreeSet::new();
        for row in &trace.rows {
            columns.extend(row.reads.iter().copied());
            columns.extend(row.saves.iter().map(|s| s.to));
            columns.extend(row.write.iter().map(|w| w.addr));
        }
        columns.extend(trace.final_store.keys().copied());
        if columns.is_empty() {
            columns.insert(Address(1));
        }
        TableLayout {
            store_columns: columns.into_iter().collect(),
            show_symbolic: true,
            symbols: BTreeMap::new(),
        }
    }

    pub fn with_symbols(mut self, symbols: BTreeMap<Address, String>) -> Self {
        self.symbols = symbols;
        self
    }

    pub fn store_columns(&self) -> &[Address] {
        &self.store_columns
    }
}

/// A value as printed in tables: Unicode minus sign.
pub fn display_value(value: &DecimalValue) -> String {
    let text = value.to_string();
    match text.strip_prefix('-') {
        Some(rest) => format!("\u{2212}{rest}"),
        None => text,
    }
}

fn store_cell(row: &TraceRow, addr: Address) -> String {
    if let Some(write) = row.write.as_ref().filter(|w| w.addr == addr) {
        return display_value(&write.value);
    }
    if let Some(save) = row.saves.iter().rev().find(|s| s.to == addr) {
        return display_value(&save.value);
    }
    if row.reads.contains(&addr) {
        return "0".into();
    }
    String::new()
}

fn comment(row: &TraceRow, layout: &TableLayout) -> String {
    match row.restores.and_then(|origin| layout.symbols.get(&origin)) {
        Some(symbol) => format!("{} = {symbol}", row.comment),
        None => row.comment.clone(),
    }
}

pub fn render_table(trace: &Trace, layout: &TableLayout) -> String {
    let mut header: Vec<String> = vec!["n".into(), "op".into()];
    header.extend(layout.store_columns.iter().map(|a| a.to_string()));
    if layout.show_symbolic {
        header.push("code".into());
    }

    let mut lines: Vec<Vec<String>> = vec![header];
    for row in &trace.rows {
        let marker = if row.is_result() { "*" } else { "" };
        let mut cells = vec![
            format!("{}{marker}", row.step),
            row.nature
                .map(|op| op.glyph().to_string())
                .unwrap_or_default(),
        ];
        cells.extend(layout.store_columns.iter().map(|&a| store_cell(row, a)));
        if layout.show_symbolic {
            cells.push(comment(row, layout));
        }
        lines.push(cells);
    }

    let columns = lines[0].len();
    let widths: Vec<usize> = (0..columns)
        .map(|i| {
            lines
                .iter()
                .map(|l| l[i].chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();

    let mut out = String::new();
    for (n, line) in lines.iter().enumerate() {
        let formatted: Vec<String> = line
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| format!("{cell:<w$}"))
            .collect();
        out.push_str(formatted.join(" | ").trim_end());
        out.push('\n');
        if n == 0 {
            let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
            out.push_str(&rule.join("-+-"));
            out.push('\n');
        }
    }
    out
}

/// One `v3'' = 2` line per result row, named as in the row's code comment.
pub fn result_lines(trace: &Trace) -> Vec<String> {
    trace
        .rows
        .iter()
        .filter(|row| row.is_result())
        .filter_map(|row| {
            let write = row.write.as_ref()?;
            let name = row.comment.split(" = ").next().unwrap_or_default();
            Some(format!("{name} = {}", display_value(&write.value)))
        })
        .collect()
}

pub fn to_json(trace: &Trace) -> String {
    serde_json::to_string_pretty(trace).expect("traces always serialize")
}

pub fn from_json(text: &str) -> Result<Trace, serde_json::Error> {
    serde_json::from_str(text)
}

/// Columns `n,nature,reads,saves,write_addr,write_value,prime,comment`.
pub fn to_csv(trace: &Trace) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record([
            "n",
            "nature",
            "reads",
            "saves",
            "write_addr",
            "write_value",
            "prime",
            "comment",
        ])
        .expect("writing to memory");
    for row in &trace.rows {
        let reads: Vec<String> = row.reads.iter().map(|a| a.to_string()).collect();
        let saves: Vec<String> = row
            .saves
            .iter()
            .map(|s| format!("{}={}", s.to, s.value))
            .collect();
        let (addr, value, prime) = match &row.write {
            Some(w) => (w.addr.to_string(), w.value.to_string(), w.prime.to_string()),
            None => Default::default(),
        };
        writer
            .write_record([
                row.step.to_string(),
                row.nature
                    .map(|op| op.name().to_string())
                    .unwrap_or_default(),
                reads.join(" "),
                saves.join(" "),
                addr,
                value,
                prime,
                row.comment.clone(),
            ])
            .expect("writing to memory");
    }
    let bytes = writer.into_inner().expect("flushing to memory");
    String::from_utf8(bytes).expect("csv output is UTF-8")
}
