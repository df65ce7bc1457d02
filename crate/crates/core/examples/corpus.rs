//! Runs every built-in corpus entry and prints one line per entry.
//!
//!     cargo run --release --example corpus

use std::time::Instant;

use qim::compat::GeneralOptions;
use qim::corpus::{builtin_corpus, run_entry};

fn main() {
    let options = GeneralOptions::default();
    let mut failed = 0;
    for entry in builtin_corpus() {
        let start = Instant::now();
        let report = run_entry(&entry, &options);
        let status = if report.passed { "pass" } else { "FAIL" };
        println!("{status} {:<28} {:>7.2}s  {}", report.name, start.elapsed().as_secs_f64(), entry.note);
        for c in report.checks.iter().filter(|c| !c.passed) {
            println!("     {}: {}", c.check, c.detail);
        }
        failed += usize::from(!report.passed);
    }
    std::process::exit(i32::from(failed > 0));
}
