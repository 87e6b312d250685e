//! Helpers shared by the integration tests and the acceptance runner. Every
//! check returns `Err` with a readable reason instead of panicking, so the
//! acceptance runner can report it on one line.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use hoc::driver::{compile_source, Compilation, Options};
use hoc::runtime::pool::BlockId;
use hoc::runtime::{Config, Event, Image};

pub mod cli;

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}
#[allow(unused_imports)]
pub(crate) use ensure;

pub fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn program_file(name: &str) -> PathBuf {
    root().join("tests/programs").join(name)
}

pub fn corpus_dir(kind: &str) -> PathBuf {
    root().join("tests/corpus").join(kind)
}

/// `.ho` files directly inside `dir`, sorted.
pub fn ho_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "ho"))
        .collect();
    files.sort();
    files
}

pub fn pos_options() -> Options {
    Options {
        include_dirs: vec![corpus_dir("pos").join("inc")],
        restricted: false,
    }
}

pub fn compile(src: &str) -> Result<Compilation, String> {
    let c = compile_source(Path::new("t.ho"), src, &Options::default());
    ensure!(!c.has_errors(), "{}\n{src}", c.render_diagnostics());
    Ok(c)
}

pub fn run_with(c: &Compilation, config: Config, cycles: u64) -> Result<String, String> {
    let program = c.program().ok_or("program has errors")?;
    let mut image = Image::load(program, &c.sources, config).map_err(|e| e.to_string())?;
    image.run_cycles(cycles).map_err(|e| e.to_string())?;
    Ok(image.render_transcript())
}

pub fn ndebug() -> Config {
    Config {
        ndebug: true,
        ..Config::default()
    }
}

/// `{:?}` of an AST with every `Loc { .. }` removed.
pub fn without_locs(debug: &str) -> String {
    let mut out = String::with_capacity(debug.len());
    let mut rest = debug;
    while let Some(i) = rest.find("Loc {") {
        out.push_str(&rest[..i]);
        let close = rest[i..].find('}').expect("unterminated Loc");
        rest = &rest[i + close + 1..];
    }
    out.push_str(rest);
    out
}

// ---- SEND ----

/// One cell of the SEND truth table, in statement or function form.
pub fn send_case(src_full: bool, dst_full: bool, function_form: bool) -> Check {
    let moves = src_full && !dst_full;
    let fill = |full: bool, port: &str, size: u32| if full { format!("NEW({port}, {size});") } else { String::new() };
    let send = if function_form {
        "IF SEND(s, d) THEN LOG(\"sent\") ELSE LOG(\"kept\") END;"
    } else {
        "SEND(s, d);"
    };
    let src = format!(
        "MODULE m; VAR s, d: port;\nBEGIN\n{} {}\n{send}\n\
         IF PENDING(s) THEN LOG(\"s\", COUNT(s)) END;\n\
         IF PENDING(d) THEN LOG(\"d\", COUNT(d)) END\nEND m.",
        fill(src_full, "s", 11),
        fill(dst_full, "d", 22)
    );
    let c = compile(&src)?;
    let mut image = Image::load(c.program().unwrap(), &c.sources, Config::default()).map_err(|e| e.to_string())?;
    image.run_cycles(1).map_err(|e| e.to_string())?;
    let mut want = String::new();
    if function_form {
        want += if moves { "LOG m 0 \"sent\"\n" } else { "LOG m 0 \"kept\"\n" };
    }
    if src_full && !moves {
        want += "LOG m 0 \"s\" 11\n";
    }
    if moves {
        want += "LOG m 0 \"d\" 11\n";
    } else if dst_full {
        want += "LOG m 0 \"d\" 22\n";
    }
    let case = format!("src full {src_full}, dst full {dst_full}, function form {function_form}");
    let got = image.render_transcript();
    ensure!(got == want, "{case}: transcript {got:?}, want {want:?}");
    // Zero copy: a moved message keeps the block NEW handed out first.
    if moves {
        ensure!(image.port("m", 0, "d") == Some(BlockId(0)), "{case}: block was not moved");
        ensure!(image.port("m", 0, "s").is_none(), "{case}: sender not emptied");
    }
    let live = image.pool().allocated_count();
    ensure!(live == src_full as u32 + dst_full as u32, "{case}: {live} live blocks");
    Ok(())
}

pub fn send_truth_table() -> Check {
    for (s, d) in [(true, false), (false, false), (true, true), (false, true)] {
        for f in [false, true] {
            send_case(s, d, f)?;
        }
    }
    Ok(())
}

// ---- randomized pool programs ----

#[derive(Debug, Clone, Copy)]
pub enum Op {
    New(usize, i64),
    Dispose(usize),
    Clone(usize, usize),
    Extend(usize, i64),
    Send(usize, usize),
    SendTest(usize, usize),
    Count(usize),
}

impl Op {
    fn text(self) -> String {
        match self {
            Op::New(p, n) => format!("NEW(p{p}, {n})"),
            Op::Dispose(p) => format!("DISPOSE(p{p})"),
            Op::Clone(s, d) => format!("CLONE(p{s}, p{d})"),
            Op::Extend(p, n) => format!("EXTEND(p{p}, {n})"),
            Op::Send(s, d) => format!("SEND(p{s}, p{d})"),
            Op::SendTest(s, d) => format!("IF SEND(p{s}, p{d}) THEN LOG(\"sent\") ELSE LOG(\"kept\") END"),
            Op::Count(p) => format!("LOG(\"count\", COUNT(p{p}))"),
        }
    }

    fn random(rng: &mut ChaCha8Rng, ports: usize) -> Op {
        let p = rng.gen_range(0..ports);
        let q = rng.gen_range(0..ports);
        let size = match rng.gen_range(0..20) {
            0 => 0,
            1 => 4097,
            2 => 4096,
            _ => rng.gen_range(1..200),
        };
        let delta = match rng.gen_range(0..10) {
            0 => rng.gen_range(-4200..4200),
            _ => rng.gen_range(-20..20),
        };
        match rng.gen_range(0..13) {
            0..=3 => Op::New(p, size),
            4 | 5 => Op::Dispose(p),
            6 => Op::Clone(p, q),
            7 => Op::Extend(p, delta),
            8 | 9 => Op::Send(p, q),
            10 | 11 => Op::SendTest(p, q),
            _ => Op::Count(p),
        }
    }
}

/// Port contents `(block, used)` and a LIFO free list, written from the
/// operation descriptions rather than from the interpreter.
struct Model {
    ports: Vec<Option<(u32, i64)>>,
    free: Vec<u32>,
    capacity: u32,
    logs: Vec<String>,
}

impl Model {
    fn new(ports: usize, capacity: u32) -> Self {
        Model {
            ports: vec![None; ports],
            free: (0..capacity).rev().collect(),
            capacity,
            logs: Vec::new(),
        }
    }

    /// The fault kind, if `op` faults.
    fn step(&mut self, op: Op) -> Option<&'static str> {
        match op {
            Op::New(p, n) => {
                if !(1..=4096).contains(&n) {
                    return Some("extend-range");
                }
                if self.ports[p].is_some() {
                    return Some("new-on-full-port");
                }
                let Some(b) = self.free.pop() else {
                    return Some("pool-exhausted");
                };
                self.ports[p] = Some((b, n));
            }
            Op::Dispose(p) => {
                if let Some((b, _)) = self.ports[p].take() {
                    self.free.push(b);
                }
            }
            Op::Clone(s, d) => {
                if let Some((_, used)) = self.ports[s] {
                    if self.ports[d].is_some() {
                        return Some("new-on-full-port");
                    }
                    let Some(b) = self.free.pop() else {
                        return Some("pool-exhausted");
                    };
                    self.ports[d] = Some((b, used));
                }
            }
            Op::Extend(p, n) => match &mut self.ports[p] {
                None => return Some("empty-port"),
                Some((_, used)) => {
                    if !(0..=4096).contains(&(*used + n)) {
                        return Some("extend-range");
                    }
                    *used += n;
                }
            },
            Op::Send(s, d) | Op::SendTest(s, d) => {
                let moved = self.ports[s].is_some() && self.ports[d].is_none();
                if moved {
                    self.ports[d] = self.ports[s].take();
                }
                if let Op::SendTest(..) = op {
                    self.logs.push(format!("LOG work 0 \"{}\"", if moved { "sent" } else { "kept" }));
                }
            }
            Op::Count(p) => match self.ports[p] {
                None => return Some("empty-port"),
                Some((_, used)) => self.logs.push(format!("LOG work 0 \"count\" {used}")),
            },
        }
        None
    }

    fn live(&self) -> u32 {
        self.capacity - self.free.len() as u32
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct PoolRound {
    pub exhausted: bool,
    pub fault: Option<&'static str>,
}

/// Generates one program of random port operations, runs it with the
/// ownership audit on, and compares transcript, port contents and pool
/// counts with the model. The operations run once, in cycle 0; a second
/// module disposes every port in cycle 1, after which nothing may leak.
pub fn pool_round(rng: &mut ChaCha8Rng) -> Result<PoolRound, String> {
    let ports = rng.gen_range(2..=6);
    let capacity = rng.gen_range(1..=6);
    let ops: Vec<Op> = (0..rng.gen_range(5..=30)).map(|_| Op::random(rng, ports)).collect();

    let names: Vec<String> = (0..ports).map(|i| format!("p{i}")).collect();
    let exported: Vec<String> = names.iter().map(|n| format!("{n}*")).collect();
    let mut src = format!(
        "MODULE work;\nVAR {}: port; done: boolean;\nBEGIN\nIF NOT done THEN\ndone := TRUE;\n",
        exported.join(", ")
    );
    const FIRST_OP_LINE: usize = 6;
    for op in &ops {
        src += &format!("{};\n", op.text());
    }
    src += "END\nEND work.\nMODULE cleanup;\nVAR n: u32;\nBEGIN\nIMPORT w := work;\nIF n = 1 THEN\n";
    src += &names.iter().map(|p| format!("DISPOSE(w.{p})")).collect::<Vec<_>>().join(";\n");
    src += "\nEND;\nINC(n)\nEND cleanup.\n";

    let mut model = Model::new(ports, capacity);
    let mut want = Vec::new();
    let mut round = PoolRound::default();
    for (i, &op) in ops.iter().enumerate() {
        let before = model.logs.len();
        let fault = model.step(op);
        want.extend(model.logs[before..].iter().cloned());
        if let Some(kind) = fault {
            want.push(format!("FAULT {kind} @{}", FIRST_OP_LINE + i));
            round.fault = Some(kind);
            round.exhausted = kind == "pool-exhausted";
            break;
        }
    }

    let c = compile(&src)?;
    let config = Config {
        pool: capacity,
        audit: true,
        ..Config::default()
    };
    let mut image = Image::load(c.program().unwrap(), &c.sources, config).map_err(|e| e.to_string())?;
    image.run_cycles(1).map_err(|e| format!("{e}\n{src}"))?;
    let got: Vec<String> = image
        .transcript()
        .iter()
        .map(|e| match e {
            Event::Fault(f) => format!("FAULT {} @{}", f.kind.as_str(), f.loc.line),
            log => log.line(),
        })
        .collect();
    ensure!(got == want, "transcript {got:?}, model {want:?}\n{src}");
    ensure!(image.halted() == round.exhausted, "halted {} \n{src}", image.halted());
    let pool = image.pool();
    ensure!(pool.allocated_count() + pool.free_count() == capacity, "pool not conserved\n{src}");
    ensure!(pool.allocated_count() == model.live(), "{} live blocks, model {}\n{src}", pool.allocated_count(), model.live());
    if round.exhausted {
        ensure!(pool.allocated_count() == capacity, "exhausted below capacity\n{src}");
        return Ok(round);
    }
    for (i, name) in names.iter().enumerate() {
        let got = image.port("work", 0, name).map(|b| (b.0, image.pool().block(b).used as i64));
        ensure!(got == model.ports[i], "port {name} holds {got:?}, model {:?}\n{src}", model.ports[i]);
    }
    image.run_cycles(1).map_err(|e| format!("{e}\n{src}"))?;
    ensure!(image.pool().allocated_count() == 0, "blocks leaked after DISPOSE of every port\n{src}");
    Ok(round)
}

/// `rounds` random programs from a fixed seed; also requires that the
/// runs covered pool exhaustion and every port fault kind.
pub fn pool_conservation(rounds: usize) -> Result<String, String> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_b10c);
    let mut kinds = std::collections::BTreeSet::new();
    let mut exhausted = 0;
    for i in 0..rounds {
        let r = pool_round(&mut rng).map_err(|e| format!("round {i}: {e}"))?;
        exhausted += r.exhausted as usize;
        kinds.extend(r.fault);
    }
    let kinds: Vec<_> = kinds.into_iter().collect();
    ensure!(exhausted * 50 >= rounds, "only {exhausted} of {rounds} rounds exhausted the pool");
    ensure!(
        kinds == ["empty-port", "extend-range", "new-on-full-port", "pool-exhausted"],
        "fault kinds covered: {kinds:?}"
    );
    Ok(format!("{rounds} programs, {exhausted} exhausted the pool"))
}

// ---- corpus ----

/// Rules that must each have a negative fixture, by file stem.
pub const REQUIRED_NEGATIVES: [&str; 16] = [
    "recursion_direct",
    "loop_count",
    "next_in_loop",
    "port_assign",
    "contract_var",
    "array_len_not_const",
    "zero_arg_call",
    "mixed_case_keyword",
    "duplicate_case_range",
    "bad_import_selector",
    "elsif_without_condition",
    "check_not_at_start",
    "select_not_lvalue",
    "empty_body",
    "import_after_statement",
    "import_in_procedure",
];

fn stem(p: &Path) -> &str {
    p.file_stem().and_then(|s| s.to_str()).unwrap_or_default()
}

/// Every positive fixture compiles without errors. Returns the file count.
pub fn positive_corpus() -> Result<usize, String> {
    let files = ho_files(&corpus_dir("pos"));
    let examples = files.iter().filter(|p| stem(p).starts_with('a')).count();
    ensure!(files.len() >= 40, "only {} positive fixtures", files.len());
    ensure!(examples == 16, "expected the 16 verbatim examples, found {examples}");
    for path in &files {
        let c = hoc::driver::compile_file(path, &pos_options()).map_err(|e| e.to_string())?;
        ensure!(!c.has_errors(), "{}:\n{}", path.display(), c.render_diagnostics());
        ensure!(c.program().is_some(), "{}: no program", path.display());
    }
    Ok(files.len())
}

/// The code named by a negative fixture's `(* expect: CODE *)` first line.
pub fn expected_code(text: &str) -> Option<&str> {
    text.lines().next()?.strip_prefix("(* expect: ")?.strip_suffix(" *)")
}

/// Every negative fixture yields exactly its expected code and nothing
/// else. Returns the file count.
pub fn negative_corpus() -> Result<usize, String> {
    let files = ho_files(&corpus_dir("neg"));
    ensure!(files.len() >= 20, "only {} negative fixtures", files.len());
    for rule in REQUIRED_NEGATIVES {
        ensure!(files.iter().any(|p| stem(p) == rule), "no negative fixture {rule}.ho");
    }
    for path in &files {
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        let want = expected_code(&text).ok_or_else(|| format!("{}: missing expect line", path.display()))?;
        let c = hoc::driver::compile_file(path, &Options::default()).map_err(|e| e.to_string())?;
        let got: Vec<&str> = c.diagnostics.iter().filter(|d| d.is_error()).map(|d| d.code).collect();
        ensure!(got == [want], "{}: got {got:?}, want [{want}]", path.display());
    }
    Ok(files.len())
}

/// parse, print, parse yields the same tree (ignoring locations) and the
/// printer reaches a fixed point.
pub fn round_trip() -> Result<usize, String> {
    use hoc::syntax::{parse_source, print_unit};
    let files = ho_files(&corpus_dir("pos"));
    for path in &files {
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        let first = parse_source(&text, 0).map_err(|e| format!("{}: {e}", path.display()))?;
        let printed = print_unit(&first);
        let second = parse_source(&printed, 0).map_err(|e| format!("{}: reparse failed: {e}", path.display()))?;
        ensure!(
            without_locs(&format!("{first:?}")) == without_locs(&format!("{second:?}")),
            "{}: tree changed after printing",
            path.display()
        );
        ensure!(print_unit(&second) == printed, "{}: printing is not stable", path.display());
    }
    Ok(files.len())
}

// ---- runtime checks ----

/// Fixtures that trip one generated check each: (file, fault kind, line).
pub const FAULT_FIXTURES: [(&str, &str, u32); 4] = [
    ("fault_empty_port.ho", "empty-port", 5),
    ("fault_mod_zero.ho", "div-zero", 5),
    ("fault_shift_32.ho", "shift-range", 6),
    ("fault_index_len.ho", "array-bounds", 6),
];

fn compile_program(name: &str) -> Result<Compilation, String> {
    let path = program_file(name);
    let c = hoc::driver::compile_file(&path, &Options::default()).map_err(|e| e.to_string())?;
    ensure!(!c.has_errors(), "{name}:\n{}", c.render_diagnostics());
    Ok(c)
}

/// Each fixture faults with the right kind and location, and runs to its
/// final LOG without any fault when checks are disabled.
pub fn fault_fixtures() -> Check {
    for (file, kind, line) in FAULT_FIXTURES {
        let c = compile_program(file)?;
        let out = run_with(&c, Config::default(), 1)?;
        let want = format!("FAULT {kind} 1 m 0 {}:{line}\n", program_file(file).display());
        ensure!(out == want, "{file}: got {out:?}, want {want:?}");
        let quiet = run_with(&c, ndebug(), 1)?;
        ensure!(!quiet.contains("FAULT"), "{file}: fault under ndebug: {quiet}");
        ensure!(quiet.starts_with("LOG m 0 \"after\" "), "{file}: ndebug transcript {quiet:?}");
    }
    Ok(())
}

/// REQUIRE before the body, PROVIDE at the early and the normal exit,
/// INVARIANT at both ends; none of them under ndebug.
pub fn contract_timing() -> Check {
    let c = compile_program("contracts.ho")?;
    let out = run_with(&c, Config::default(), 1)?;
    let events: Vec<&str> = out.lines().map(|l| l.trim_start_matches("LOG m 0 ")).collect();
    let want = [
        "\"require\" 5",
        "\"invariant\"",
        "\"body\" 5",
        "\"late\"",
        "\"provide\" 5",
        "\"invariant\"",
        "\"require\" -1",
        "\"invariant\"",
        "\"body\" -1",
        "\"early\"",
        "\"provide\" -1",
        "\"invariant\"",
    ];
    ensure!(events == want, "event order {events:?}");
    let quiet = run_with(&c, ndebug(), 1)?;
    ensure!(
        ["require", "provide", "invariant"].iter().all(|w| !quiet.contains(w)),
        "contract events under ndebug: {quiet}"
    );
    ensure!(quiet.contains("\"early\"") && quiet.contains("\"late\""), "ndebug transcript {quiet:?}");
    Ok(())
}

/// Two 100-cycle ping-pong runs give identical, non-trivial transcripts.
pub fn pingpong_determinism() -> Check {
    let once = || run_with(&compile_program("pingpong.ho")?, Config::default(), 100);
    let first = once()?;
    ensure!(first.lines().count() == 100, "expected 100 lines, got {}", first.lines().count());
    ensure!(first == once()?, "transcripts differ");
    Ok(())
}

/// Runs every runnable fixture for a few cycles and compares the most steps
/// any instance took in one cycle with its static bound. Returns the number
/// of fixtures checked.
pub fn step_bounds() -> Result<usize, String> {
    let mut files = ho_files(&corpus_dir("pos"));
    files.extend(ho_files(&program_file("")));
    let mut checked = 0;
    for path in files {
        let c = hoc::driver::compile_file(&path, &pos_options()).map_err(|e| e.to_string())?;
        let program = c.program().ok_or_else(|| format!("{}: errors", path.display()))?;
        // Fixtures that need an MMIO script or a bigger pool do not load.
        let Ok(mut image) = Image::load(program, &c.sources, Config::default()) else {
            continue;
        };
        image.run_cycles(5).map_err(|e| e.to_string())?;
        let bounds = hoc::sema::module_step_bounds(program);
        let modules = program.instances().map(|(m, _)| program.modules[m].name.as_str());
        for ((name, steps), module) in image.max_steps().into_iter().zip(modules) {
            ensure!(steps > 0, "{}: {name} never ran", path.display());
            ensure!(
                steps <= bounds[module],
                "{}: {name} took {steps} > {}",
                path.display(),
                bounds[module]
            );
        }
        checked += 1;
    }
    ensure!(checked >= 40, "only {checked} fixtures ran");
    Ok(checked)
}
