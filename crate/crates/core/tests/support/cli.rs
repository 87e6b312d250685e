//! Runs the `hoc` binary in a scratch copy of `tests/cli_fixtures` and
//! compares its outputs with the files in `tests/golden/cli`. Set
//! `HOC_BLESS=1` to rewrite the golden files from the current outputs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use super::{ensure, root, Check};

pub struct Scratch {
    dir: tempfile::TempDir,
}

impl Scratch {
    pub fn new() -> Scratch {
        let dir = tempfile::tempdir().expect("temp dir");
        copy_tree(&root().join("tests/cli_fixtures"), dir.path());
        Scratch { dir }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    /// Runs `hoc` with the scratch directory as working directory.
    pub fn hoc(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_hoc"))
            .args(args)
            .current_dir(self.dir.path())
            .output()
            .expect("run hoc")
    }

    pub fn read(&self, name: &str) -> Result<String, String> {
        std::fs::read_to_string(self.path(name)).map_err(|e| format!("{name}: {e}"))
    }

    pub fn exists(&self, name: &str) -> bool {
        self.path(name).exists()
    }
}

fn copy_tree(from: &Path, to: &Path) {
    for e in std::fs::read_dir(from).unwrap() {
        let e = e.unwrap();
        let target = to.join(e.file_name());
        if e.file_type().unwrap().is_dir() {
            std::fs::create_dir_all(&target).unwrap();
            copy_tree(&e.path(), &target);
        } else {
            std::fs::copy(e.path(), target).unwrap();
        }
    }
}

fn golden(name: &str, actual: &str) -> Check {
    let path = root().join("tests/golden/cli").join(name);
    if std::env::var_os("HOC_BLESS").is_some() {
        std::fs::write(&path, actual).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let want = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    ensure!(actual == want, "{name} differs from golden:\n--- got\n{actual}--- want\n{want}");
    Ok(())
}

fn status(out: &Output, code: i32, what: &str) -> Check {
    ensure!(
        out.status.code() == Some(code),
        "{what}: exit {:?}, want {code}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(())
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn help() -> Check {
    let s = Scratch::new();
    let out = s.hoc(&["-h"]);
    status(&out, 0, "-h")?;
    let text = stdout(&out);
    for flag in ["-I <directory>", "-d", "-f", "-o <filename>", "-g", "-k", "-h,"] {
        ensure!(text.contains(&format!("  {flag} ")), "help does not list {flag}");
    }
    golden("help.txt", &text)
}

pub fn default_compile() -> Check {
    let s = Scratch::new();
    let out = s.hoc(&["-I", "lib1", "main.ho"]);
    status(&out, 0, "default compile")?;
    ensure!(out.stdout.is_empty(), "default compile wrote to standard output");
    let c = s.read("main.c")?;
    ensure!(
        c.starts_with("/* Generated by hoc. Compile with: -fno-strict-aliasing -fwrapv -std=gnu99 */\n"),
        "missing flags header"
    );
    golden("main.c", &c)?;
    golden("main.map", &s.read("main.map")?)
}

pub fn output_name() -> Check {
    let s = Scratch::new();
    let out = s.hoc(&["-o", "renamed.c", "-I", "lib1", "main.ho"]);
    status(&out, 0, "-o")?;
    ensure!(!s.exists("main.c"), "-o still wrote main.c");
    golden("main.c", &s.read("renamed.c")?)?;
    ensure!(s.exists("renamed.map"), "no error map beside the -o output");
    Ok(())
}

pub fn interface_only() -> Check {
    let s = Scratch::new();
    let out = s.hoc(&["-g", "-I", "lib1", "main.ho"]);
    status(&out, 0, "-g")?;
    ensure!(!s.exists("main.c"), "-g wrote C output");
    golden("main.hi", &s.read("main.hi")?)?;
    // Restricted analysis: a body error does not prevent the interface.
    let broken = s.hoc(&["-g", "broken.ho"]);
    status(&broken, 0, "-g on a body error")?;
    ensure!(s.read("broken.hi")? == "module broken 1\n", "broken.hi: {:?}", s.read("broken.hi"));
    Ok(())
}

pub fn deps() -> Check {
    let s = Scratch::new();
    let out = s.hoc(&["-d", "-I", "lib1", "-o", "ignored.c", "main.ho"]);
    status(&out, 0, "-d")?;
    ensure!(!s.exists("main.c") && !s.exists("ignored.c"), "-d wrote C output");
    golden("main.d", &stdout(&out))
}

pub fn flow() -> Check {
    let s = Scratch::new();
    let out = s.hoc(&["-f", "-I", "lib1", "main.ho"]);
    status(&out, 0, "-f")?;
    ensure!(!s.exists("main.c"), "-f wrote C output");
    golden("main.dot", &stdout(&out))
}

pub fn keep() -> Check {
    let s = Scratch::new();
    let out = s.hoc(&["-k", "-I", "lib1", "main.ho"]);
    status(&out, 0, "-k")?;
    for ext in ["c", "tokens", "ast", "tast"] {
        ensure!(s.exists(&format!("main.{ext}")), "-k did not write main.{ext}");
    }
    let tokens = s.read("main.tokens")?;
    ensure!(tokens.starts_with("3:1 keyword INCLUDE\n3:9 string \"defs.ho\"\n3:18 punct ;\n"), "tokens: {tokens}");
    ensure!(tokens.ends_with(" eof \n"), "token dump does not end with eof");
    ensure!(s.read("main.ast")?.starts_with("Unit {"), "ast dump");
    ensure!(s.read("main.tast")?.starts_with("Program {"), "typed ast dump");
    // Stages that ran are kept even when a later one fails.
    let broken = s.hoc(&["-k", "broken.ho"]);
    status(&broken, 1, "-k on a failing program")?;
    ensure!(s.exists("broken.tokens") && s.exists("broken.ast"), "-k dropped stage dumps on error");
    Ok(())
}

pub fn include_order() -> Check {
    let s = Scratch::new();
    for (dirs, want) in [(["lib1", "lib2"], "8"), (["lib2", "lib1"], "99")] {
        let out = s.hoc(&["run", "-I", dirs[0], "-I", dirs[1], "main.ho"]);
        status(&out, 0, "run with -I")?;
        let got = stdout(&out);
        ensure!(got == format!("LOG receiver 0 \"total\" {want}\n"), "-I {dirs:?}: {got}");
    }
    Ok(())
}

pub fn run() -> Check {
    let s = Scratch::new();
    let out = s.hoc(&["run", "-I", "lib1", "main.ho", "--cycles", "3"]);
    status(&out, 0, "run")?;
    golden("main.run", &stdout(&out))?;
    let fault = s.hoc(&["run", "faulty.ho"]);
    status(&fault, 3, "run with a fault")?;
    ensure!(stdout(&fault) == "FAULT div-zero 1 faulty 0 faulty.ho:4\n", "fault transcript {}", stdout(&fault));
    let quiet = s.hoc(&["run", "--ndebug", "faulty.ho"]);
    status(&quiet, 0, "run --ndebug")?;
    ensure!(stdout(&quiet) == "LOG faulty 0 \"quotient\" 0\n", "ndebug transcript {}", stdout(&quiet));
    std::fs::write(s.path("small.cfg"), "pool 1\n").unwrap();
    std::fs::write(s.path("bad.cfg"), "pool zero\n").unwrap();
    status(&s.hoc(&["run", "--config", "small.cfg", "-I", "lib1", "main.ho"]), 0, "run --config")?;
    status(&s.hoc(&["run", "--config", "bad.cfg", "-I", "lib1", "main.ho"]), 2, "run with a bad config")
}

pub fn errors_and_usage() -> Check {
    let s = Scratch::new();
    let broken = s.hoc(&["broken.ho"]);
    status(&broken, 1, "compile error")?;
    ensure!(broken.stdout.is_empty(), "diagnostics on standard output");
    let err = String::from_utf8_lossy(&broken.stderr);
    ensure!(err.contains("broken.ho:4:8: error[E-UNDEFINED]"), "stderr: {err}");
    ensure!(!s.exists("broken.c"), "C written despite errors");
    status(&s.hoc(&["-x", "main.ho"]), 2, "unknown flag")?;
    status(&s.hoc(&[]), 2, "missing input")?;
    status(&s.hoc(&["missing.ho"]), 1, "unreadable input")
}

/// A named CLI check.
pub type Mode = (&'static str, fn() -> Check);

pub const ALL: [Mode; 11] = [
    ("-h", help),
    ("default compile", default_compile),
    ("-o", output_name),
    ("-g", interface_only),
    ("-d", deps),
    ("-f", flow),
    ("-k", keep),
    ("-I order", include_order),
    ("run", run),
    ("errors and usage", errors_and_usage),
    ("no C toolchain needed", no_c_toolchain),
];

/// Every CLI mode works with an empty PATH, so no C compiler or runtime
/// library is involved.
pub fn no_c_toolchain() -> Check {
    let s = Scratch::new();
    for args in [
        &["-I", "lib1", "main.ho"][..],
        &["-g", "-I", "lib1", "main.ho"],
        &["run", "-I", "lib1", "main.ho"],
    ] {
        let out = Command::new(env!("CARGO_BIN_EXE_hoc"))
            .args(args)
            .current_dir(s.dir.path())
            .env_clear()
            .output()
            .map_err(|e| e.to_string())?;
        status(&out, 0, &format!("{args:?} without PATH"))?;
    }
    Ok(())
}
