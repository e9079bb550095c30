//! Reads a model file and prints each well-posedness clause.
//!
//! `cargo run --example validate_model -- fixtures/hollow_violation.json`

use std::path::PathBuf;

use dynnet::network::{io::read_model, validate_model};

fn main() -> dynnet::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/four_node.json"));
    let m = read_model(&path)?;
    for c in validate_model(&m).clauses {
        println!("{:<26} {}  {}", c.name, if c.passed { "ok" } else { "FAIL" }, c.detail.unwrap_or_default());
    }
    Ok(())
}
