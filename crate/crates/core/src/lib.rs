//! An emulator of the Analytical Engine as programmed in Babbage's 1837
//! sketches.
//!
//! - [`decimal`]: sign-magnitude decimal values with the digit-wise complement.
//! - [`store`]: variables with destructive reads, complement saves and restores.
//! - [`mill`]: the four-operation processor with argument retention.
//! - [`engine`]: executes the operation-card and variable-card streams.
//! - [`asm`]: the textual program format and the two-stream card deck.
//! - [`trace`]: tables, JSON and CSV for execution traces.
//! - [`programs`]: the two reference programs for a 2×2 linear system and a
//!   closed-form solver.
//!
//! ```
//! use ae_core::{programs, trace, Coefficients, MachineConfig};
//!
//! // x + 2y - 8 = 0, x - y + 1 = 0
//! let co = Coefficients::new(1, 2, -8, 1, -1, 1);
//! let run = programs::run_program_xy(&co, MachineConfig::default()).unwrap();
//! assert_eq!(run.x.to_string(), "2");
//! assert_eq!(run.y.unwrap().to_string(), "3");
//! assert_eq!(trace::result_lines(&run.trace), ["v4' = 2", "v5''' = 3"]);
//! ```

pub mod asm;
pub mod decimal;
pub mod engine;
pub mod mill;
pub mod programs;
pub mod store;
pub mod trace;

pub use asm::{AsmError, CardDeck};
pub use decimal::{DecimalError, DecimalValue, DivisionMode, MachineConfig, Sign};
pub use engine::{EngineError, Program, Trace, TraceRow, VariableCard};
pub use mill::{Axis, Mill, MillError, Operation};
pub use programs::{Coefficients, Solution};
pub use store::{Address, Store, StoreError};
