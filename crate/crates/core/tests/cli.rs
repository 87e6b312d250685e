//! The `hoc` command line, one test per mode.

mod support;

use support::cli;

#[test]
fn every_mode() {
    let failures: Vec<String> = cli::ALL
        .iter()
        .filter_map(|(name, check)| check().err().map(|e| format!("{name}: {e}")))
        .collect();
    assert!(failures.is_empty(), "{}", failures.join("\n\n"));
}
