//! Writes the built-in corpus as JSON files, by default into the crate's `corpus/`.
//!
//!     cargo run --example write_corpus [-- DIR]

use std::path::PathBuf;

use qim::corpus::{builtin_corpus, write_corpus};

fn main() -> qim::Result<()> {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus"));
    let entries = builtin_corpus();
    write_corpus(&dir, &entries)?;
    println!("wrote {} entries to {}", entries.len(), dir.display());
    Ok(())
}
