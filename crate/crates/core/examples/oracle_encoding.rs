//! Truth tables, phase oracles and the sixteen-entry catalog.
//!
//! Run with `cargo run --example oracle_encoding`.

use std::fmt::Write;

use evenodd::boolfun::{catalog, encode_uf, is_separable, parity, subclass, BoolFn2};
use evenodd::Result;

pub fn run() -> Result<String> {
    let mut out = String::new();
    writeln!(out, "f        outputs   parity  subclass  diag(U_f)").unwrap();
    for f in BoolFn2::all() {
        let u = encode_uf(f);
        let diag: Vec<String> = u.diagonal().iter().map(|d| format!("{:+}", d.re)).collect();
        let outputs: String = f
            .outputs()
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        writeln!(
            out,
            "{f}   {outputs}      {:<6}  {:<8}  {}",
            parity(f),
            subclass(f),
            diag.join(" ")
        )
        .unwrap();
    }

    // Even oracles factor into single-qubit phases, odd ones cannot.
    writeln!(out).unwrap();
    for e in catalog() {
        let kind = if is_separable(&e.matrix())? {
            "product"
        } else {
            "entangling"
        };
        writeln!(
            out,
            "U{:<2} {:?}  {}  {kind}",
            e.index, e.diagonal, e.parity
        )
        .unwrap();
    }

    writeln!(out).unwrap();
    writeln!(out, "{}", serde_json::to_string(&catalog()[8])?).unwrap();
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run()?);
    Ok(())
}
