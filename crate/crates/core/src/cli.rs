//! Command-line driver.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::diag::Diagnostic;
use crate::eval::{Interpreter, RuntimeError, DEFAULT_MAX_DEPTH};
use crate::lookup::ProgramIndex;
use crate::parser::parse_program;
use crate::wf::wf_program;

pub const EXIT_OK: i32 = 0;
pub const EXIT_STATIC: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "shapes", version, about = "Check and run programs with pooled object layouts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and type-check a program.
    Check { file: PathBuf },
    /// Check a program, then run an entry method.
    Run {
        file: PathBuf,
        /// Entry point as `Class::method`.
        #[arg(long)]
        entry: String,
        #[command(flatten)]
        options: RunOptions,
    },
    /// Time list traversal through a pooled and an unpooled list.
    Bench {
        #[arg(default_value_t = 100_000)]
        n: usize,
    },
}

#[derive(clap::Args, Debug, Clone)]
pub struct RunOptions {
    /// Check heap and frame well-formedness after every evaluation step.
    #[arg(long)]
    pub check_invariants: bool,
    /// Print the final heap after the result.
    #[arg(long)]
    pub dump_heap: bool,
    /// Maximum number of nested method calls.
    #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
    pub max_depth: usize,
    /// Print one line per rule application to standard error.
    #[arg(long)]
    pub trace: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { check_invariants: false, dump_heap: false, max_depth: DEFAULT_MAX_DEPTH, trace: false }
    }
}

/// Parses, indexes and checks `source`; all diagnostics in source order.
pub fn load(source: &str) -> Result<ProgramIndex, Vec<Diagnostic>> {
    let program = parse_program(source)?;
    let (idx, dups) = ProgramIndex::new(program);
    let diags = wf_program(&idx, &dups);
    if diags.is_empty() {
        Ok(idx)
    } else {
        Err(diags)
    }
}

fn read(path: &Path, err: &mut dyn Write) -> Result<String, i32> {
    std::fs::read_to_string(path).map_err(|e| {
        let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
        EXIT_IO
    })
}

fn report(file: &str, diags: &[Diagnostic], err: &mut dyn Write) {
    for d in diags {
        let _ = writeln!(err, "{}", d.render(file));
    }
}

pub fn cmd_check(path: &Path, err: &mut dyn Write) -> i32 {
    let source = match read(path, err) {
        Ok(s) => s,
        Err(code) => return code,
    };
    match load(&source) {
        Ok(_) => EXIT_OK,
        Err(diags) => {
            report(&path.display().to_string(), &diags, err);
            EXIT_STATIC
        }
    }
}

pub fn cmd_run(path: &Path, entry: &str, opts: &RunOptions, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let file = path.display().to_string();
    let source = match read(path, err) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let idx = match load(&source) {
        Ok(idx) => idx,
        Err(diags) => {
            report(&file, &diags, err);
            return EXIT_STATIC;
        }
    };
    let Some((class, method)) = entry.split_once("::") else {
        let _ = writeln!(err, "error: --entry must have the form Class::method, got `{entry}`");
        return EXIT_STATIC;
    };
    let mut trace = Vec::new();
    let result = {
        let mut interp =
            Interpreter::new(&idx).with_max_depth(opts.max_depth).with_invariants(opts.check_invariants);
        if opts.trace {
            interp = interp.with_observer(|rule, v| trace.push(format!("[{rule}] {v}")));
        }
        interp.run_entry(class, method)
    };
    for line in &trace {
        let _ = writeln!(err, "{line}");
    }
    match result {
        Ok(outcome) => {
            let _ = writeln!(out, "{}", outcome.value);
            if opts.dump_heap {
                let _ = write!(out, "{}", outcome.heap.dump(&idx));
            }
            EXIT_OK
        }
        Err(RuntimeError::Entry(d)) => {
            report(&file, &[d], err);
            EXIT_STATIC
        }
        Err(e @ (RuntimeError::NullDeref { .. } | RuntimeError::DepthExceeded { .. })) => {
            let code = e.code().expect("runtime errors carry a code");
            let _ = writeln!(err, "runtime error[{code}]: {e}");
            EXIT_RUNTIME
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            EXIT_INVARIANT
        }
    }
}

pub fn cmd_bench(n: usize, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match crate::bench::bench_traversal(n) {
        Ok(report) => {
            let _ = write!(out, "{report}");
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVARIANT
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing to the process's standard streams. Returns the exit code.
pub fn run_cli(args: impl IntoIterator<Item = OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_IO } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = match &cli.command {
        Command::Check { file } => cmd_check(file, &mut err),
        Command::Run { file, entry, options } => cmd_run(file, entry, options, &mut out, &mut err),
        Command::Bench { n } => cmd_bench(*n, &mut out, &mut err),
    };
    let _ = out.flush();
    code
}
