//! `hoc`: translate hO sources to C, or run them in the interpreter with
//! `hoc run`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use hoc::codegen::{emit_c, emit_deps, emit_error_map, emit_flow_dot, emit_interface};
use hoc::driver::{compile_file, dump_tokens, Compilation, Options};
use hoc::runtime::{Config, Image};
use hoc::sema::{build_signatures, message_flow};

const OK: u8 = 0;
const ERRORS: u8 = 1;
const USAGE: u8 = 2;
const FAULT: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "hoc",
    about = "Translate an hO source file to C",
    after_help = "Use `hoc run <file> [--cycles N] [--config F] [--ndebug]` to execute a program in the interpreter."
)]
struct CompileArgs {
    /// Add a directory to the search path for INCLUDE and interface files
    #[arg(short = 'I', value_name = "directory")]
    include: Vec<PathBuf>,
    /// Write make(1) dependency rules to standard output
    #[arg(short = 'd')]
    deps: bool,
    /// Write a dot(1) message flow diagram to standard output
    #[arg(short = 'f')]
    flow: bool,
    /// Output file name (default: source name with `.c`)
    #[arg(short = 'o', value_name = "filename")]
    output: Option<PathBuf>,
    /// Only generate an interface file (`.hi`)
    #[arg(short = 'g')]
    interface: bool,
    /// Keep intermediate files (`.tokens`, `.ast`, `.tast`)
    #[arg(short = 'k')]
    keep: bool,
    /// hO source file
    file: PathBuf,
}

#[derive(Parser, Debug)]
#[command(name = "hoc run", about = "Run an hO program in the interpreter and print its transcript")]
struct RunArgs {
    /// hO source file
    file: PathBuf,
    /// Number of scheduler cycles
    #[arg(long, default_value_t = 1)]
    cycles: u64,
    /// Run configuration (pool size, external memory script)
    #[arg(long, value_name = "F")]
    config: Option<PathBuf>,
    /// Disable dynamic checks, as for C built with -DNDEBUG
    #[arg(long)]
    ndebug: bool,
    /// Add a directory to the search path for INCLUDE and interface files
    #[arg(short = 'I', value_name = "directory")]
    include: Vec<PathBuf>,
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let code = if args.get(1).map(String::as_str) == Some("run") {
        let argv = std::iter::once("hoc run".to_string()).chain(args[2..].iter().cloned());
        match RunArgs::try_parse_from(argv) {
            Ok(a) => run(a),
            Err(e) => clap_exit(e),
        }
    } else {
        match CompileArgs::try_parse_from(&args) {
            Ok(a) => compile(a),
            Err(e) => clap_exit(e),
        }
    };
    ExitCode::from(code)
}

fn clap_exit(e: clap::Error) -> u8 {
    let _ = e.print();
    if e.use_stderr() {
        USAGE
    } else {
        OK
    }
}

fn load(file: &Path, opts: &Options) -> Result<Compilation, u8> {
    let c = compile_file(file, opts).map_err(|e| {
        eprintln!("hoc: cannot read `{}`: {e}", file.display());
        ERRORS
    })?;
    eprint!("{}", c.render_diagnostics());
    Ok(c)
}

fn write(path: &Path, text: &str) -> Result<(), u8> {
    std::fs::write(path, text).map_err(|e| {
        eprintln!("hoc: cannot write `{}`: {e}", path.display());
        ERRORS
    })
}

fn compile(a: CompileArgs) -> u8 {
    match try_compile(a) {
        Ok(()) => OK,
        Err(code) => code,
    }
}

fn try_compile(a: CompileArgs) -> Result<(), u8> {
    let restricted = a.interface || (a.deps && !a.flow);
    let opts = Options {
        include_dirs: a.include.clone(),
        restricted,
    };
    let c = load(&a.file, &opts)?;
    let stdout_only = a.deps || a.flow;
    let output = match &a.output {
        Some(o) if !stdout_only && !a.interface => o.clone(),
        _ => a.file.with_extension("c"),
    };
    if a.keep {
        keep(&c, &output)?;
    }
    let program = c.program().ok_or(ERRORS)?;
    if stdout_only {
        if a.deps {
            let files: Vec<String> = c.files.iter().map(|&f| c.sources.name(f)).collect();
            print!("{}", emit_deps(&output.display().to_string(), &files));
        }
        if a.flow {
            print!("{}", emit_flow_dot(program, &message_flow(program)));
        }
        return Ok(());
    }
    if a.interface {
        let sigs: Vec<_> = build_signatures(program).iter().map(|s| s.portable()).collect();
        return write(&a.file.with_extension("hi"), &emit_interface(&sigs));
    }
    let unit = a.file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    write(&output, &emit_c(program, &c.sources, &unit))?;
    write(&output.with_extension("map"), &emit_error_map(program, &c.sources))
}

/// Stage dumps beside `output`; each is written only if its stage ran.
fn keep(c: &Compilation, output: &Path) -> Result<(), u8> {
    if let Some(t) = &c.tokens {
        write(&output.with_extension("tokens"), &dump_tokens(t))?;
    }
    if let Some(u) = &c.unit {
        write(&output.with_extension("ast"), &format!("{u:#?}\n"))?;
    }
    if let Some(an) = &c.analysis {
        write(&output.with_extension("tast"), &format!("{:#?}\n", an.program))?;
    }
    Ok(())
}

fn run(a: RunArgs) -> u8 {
    let opts = Options {
        include_dirs: a.include.clone(),
        restricted: false,
    };
    let c = match load(&a.file, &opts) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let Some(program) = c.program() else {
        return ERRORS;
    };
    let mut config = match &a.config {
        Some(path) => {
            let parsed = std::fs::read_to_string(path)
                .map_err(|e| e.to_string())
                .and_then(|t| Config::parse(&t).map_err(|e| e.to_string()));
            match parsed {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("hoc: config `{}`: {e}", path.display());
                    return USAGE;
                }
            }
        }
        None => Config::default(),
    };
    config.ndebug |= a.ndebug;
    let mut image = match Image::load(program, &c.sources, config) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("hoc: {e}");
            return ERRORS;
        }
    };
    let result = image.run_cycles(a.cycles);
    print!("{}", image.render_transcript());
    match result {
        Err(e) => {
            eprintln!("hoc: {e}");
            FAULT
        }
        Ok(_) if image.faults().next().is_some() => FAULT,
        Ok(_) => OK,
    }
}
