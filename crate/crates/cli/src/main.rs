//! `ae`: assemble, run and trace Analytical Engine card programs.
//!
//! Exit status is 0 on success, 1 when the machine faults at run time and 2
//! for unreadable input, parse errors and bad flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ae_core::asm;
use ae_core::decimal::{DecimalValue, DivisionMode, MachineConfig};
use ae_core::engine;
use ae_core::programs::{self, Coefficients, SolveError};
use ae_core::store::Address;
use ae_core::trace::{self, TableLayout};
use ae_core::{DecimalError, EngineError};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

#[derive(Parser)]
#[command(name = "ae", version, about = "Analytical Engine emulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an assembly program and print its trace.
    Run {
        file: PathBuf,
        /// Initial values overriding INIT lines, e.g. "v1=1,v2=-8".
        #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
        init: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[command(flatten)]
        machine: MachineArgs,
    },
    /// Print the card deck of an assembly program.
    #[command(visible_alias = "cards")]
    Asm {
        file: PathBuf,
        /// Print canonical assembly text instead of the JSON deck.
        #[arg(long)]
        text: bool,
    },
    /// Solve ax + by + c = 0, a'x + b'y + c' = 0 with the second reference program.
    #[command(name = "solve2x2", allow_negative_numbers = true)]
    Solve2x2 {
        #[arg(long)]
        a: BigInt,
        #[arg(long)]
        b: BigInt,
        #[arg(long)]
        c: BigInt,
        #[arg(long)]
        ap: BigInt,
        #[arg(long)]
        bp: BigInt,
        #[arg(long)]
        cp: BigInt,
        /// Also solve in closed form and compare.
        #[arg(long)]
        oracle: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(clap::Args)]
struct MachineArgs {
    #[arg(long, default_value_t = ae_core::decimal::DEFAULT_DIGIT_WIDTH)]
    digits: usize,
    #[arg(long, default_value_t = ae_core::decimal::DEFAULT_STORE_SIZE)]
    store_size: usize,
    #[arg(long, default_value = "exact")]
    division: DivisionMode,
}

enum Failure {
    Usage(String),
    Machine(String),
}

impl Failure {
    fn exit(self) -> ExitCode {
        match self {
            Failure::Usage(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
            Failure::Machine(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(1)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Run {
            file,
            init,
            format,
            machine,
        } => cmd_run(&file, init.as_deref(), format, &machine),
        Command::Asm { file, text } => cmd_asm(&file, text),
        Command::Solve2x2 {
            a,
            b,
            c,
            ap,
            bp,
            cp,
            oracle,
        } => cmd_solve2x2(Coefficients::new(a, b, c, ap, bp, cp), oracle),
    };
    match outcome {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(failure) => failure.exit(),
    }
}

fn read_program(path: &Path, config: &MachineConfig) -> Result<ae_core::Program, Failure> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    asm::parse(&src, config).map_err(|e| Failure::Usage(format!("{}:{e}", path.display())))
}

/// `v1=1,v2=-8` into initial store values.
fn parse_init_list(
    list: &str,
    config: &MachineConfig,
) -> Result<BTreeMap<Address, DecimalValue>, String> {
    let mut inits = BTreeMap::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (lhs, rhs) = item
            .split_once('=')
            .ok_or_else(|| format!("--init entry {item:?} is not v<k>=<integer>"))?;
        let index = lhs
            .trim()
            .strip_prefix(['v', 'V'])
            .and_then(|d| d.parse::<usize>().ok())
            .ok_or_else(|| format!("--init entry {item:?}: bad address {lhs:?}"))?;
        if index >= config.store_size {
            return Err(format!(
                "--init entry {item:?}: address outside store of {}",
                config.store_size
            ));
        }
        let value = DecimalValue::from_literal(rhs.trim(), config)
            .map_err(|e| format!("--init entry {item:?}: {e}"))?;
        inits.insert(Address(index), value);
    }
    Ok(inits)
}

fn cmd_run(
    file: &Path,
    init: Option<&str>,
    format: Format,
    machine: &MachineArgs,
) -> Result<String, Failure> {
    let config = MachineConfig::new(machine.digits, machine.store_size, machine.division)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let mut program = read_program(file, &config)?;
    if let Some(list) = init {
        program
            .inits
            .extend(parse_init_list(list, &config).map_err(Failure::Usage)?);
    }
    let trace = engine::run(&program).map_err(|e| match e {
        EngineError::InvalidProgram(msg) => Failure::Usage(msg),
        other => Failure::Machine(other.to_string()),
    })?;
    Ok(match format {
        Format::Json => trace::to_json(&trace) + "\n",
        Format::Csv => trace::to_csv(&trace),
        Format::Table => {
            let mut out = trace::render_table(&trace, &TableLayout::for_trace(&trace));
            let results = trace::result_lines(&trace);
            if !results.is_empty() {
                out.push('\n');
                for line in results {
                    out.push_str(&line);
                    out.push('\n');
                }
            }
            out
        }
    })
}

fn cmd_asm(file: &Path, text: bool) -> Result<String, Failure> {
    let program = read_program(file, &MachineConfig::default())?;
    Ok(if text {
        asm::to_text(&program)
    } else {
        asm::to_card_deck(&program).to_json() + "\n"
    })
}

fn cmd_solve2x2(co: Coefficients, oracle: bool) -> Result<String, Failure> {
    let run = programs::run_program_xy(&co, MachineConfig::default()).map_err(|e| match e {
        SolveError::Coefficient(e) => Failure::Usage(format!("coefficient out of range: {e}")),
        SolveError::Engine(e) => Failure::Machine(describe_solve_fault(&e)),
    })?;
    let x = run.x.to_string();
    let y = run.y.map(|y| y.to_string()).unwrap_or_default();
    let mut out = format!("x = {x}, y = {y}\n");
    if oracle {
        match programs::solve_closed_form(&co) {
            Ok(solution) => {
                let (ox, oy) = (solution.x.to_string(), solution.y.to_string());
                out.push_str(&format!("closed form: x = {ox}, y = {oy}\n"));
                out.push_str(if ox == x && oy == y {
                    "MATCH\n"
                } else {
                    "MISMATCH\n"
                });
            }
            Err(e) => out.push_str(&format!("closed form: {e}\nMISMATCH\n")),
        }
    }
    Ok(out)
}

fn describe_solve_fault(e: &EngineError) -> String {
    match (e.arithmetic(), e.step()) {
        (Some(DecimalError::DivisionByZero), Some(step)) if step == programs::PROGRAM_XY_X_STEP => {
            format!("SingularSystem: {e} (b'a - ba' = 0)")
        }
        (Some(DecimalError::DivisionByZero), _) => format!("DegenerateB: {e} (b = 0)"),
        (Some(DecimalError::InexactDivision), _) => format!("InexactDivision: {e}"),
        (Some(DecimalError::Overflow { .. }), _) => format!("Overflow: {e}"),
        _ => e.to_string(),
    }
}
