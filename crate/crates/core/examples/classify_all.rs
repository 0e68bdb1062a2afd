//! Two oracle calls against four classical queries, for all sixteen functions.

use std::fmt::Write;

use evenodd::boolfun::classical_classify;
use evenodd::evenodd::classify_quantum;
use evenodd::{BoolFn2, InitialState, Result};

pub fn run() -> Result<String> {
    let mut out = String::new();
    let mut agree = 0;
    for f in BoolFn2::all() {
        let (classical, queries) = classical_classify(f);
        let (quantum, calls) = classify_quantum(f, InitialState::THERMAL)?;
        if quantum == classical {
            agree += 1;
        }
        writeln!(out, "{f}  classical {classical:<4} ({queries} queries)  quantum {quantum:<4} ({calls} calls)").unwrap();
    }
    writeln!(out, "agreement {agree}/16").unwrap();
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run()?);
    Ok(())
}
