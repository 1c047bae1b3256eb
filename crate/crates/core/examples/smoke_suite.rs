//! Runs a built-in corpus and prints one line per cell.
//!
//! `cargo run --release --example smoke_suite [smoke|full]`

use vdcorput::harness::{run_suite, SuiteName, DEFAULT_MARGIN_TOL};

fn main() {
    let name: SuiteName = std::env::args()
        .nth(1)
        .as_deref()
        .unwrap_or("smoke")
        .parse()
        .expect("suite name");
    let result = run_suite(name, DEFAULT_MARGIN_TOL, 0);
    print!("{}", result.to_text());
    if !result.all_passed() {
        std::process::exit(1);
    }
}
