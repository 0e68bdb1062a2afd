//! The ideal five-gate sequence on deviation density matrices.
//!
//! Prints the final state for a few functions, from both the thermal and the
//! pseudo-pure starting point.

use std::fmt::Write;

use evenodd::evenodd::{
    match_even_blocks, pure_ket, run_sequence_with, state_overlap, HConvention, InitialState,
    PhaseOracle,
};
use evenodd::qmat::Mat4;
use evenodd::{parity, BoolFn2, Result};

fn show(m: &Mat4) -> String {
    let mut s = String::new();
    for row in m.0.iter() {
        let cells: Vec<String> = row
            .iter()
            .map(|c| format!("{:+.3}{:+.3}i", c.re, c.im))
            .collect();
        s.push_str("  ");
        s.push_str(&cells.join("  "));
        s.push('\n');
    }
    s
}

pub fn run() -> Result<String> {
    let mut out = String::new();
    for bits in [0b0000, 0b0110, 0b0001, 0b1110] {
        let f = BoolFn2::from_bits(bits)?;
        for (label, init) in [
            ("thermal", InitialState::THERMAL),
            ("pseudo-pure", InitialState::PSEUDOPURE),
        ] {
            let oracle = PhaseOracle::new(f);
            let rho = run_sequence_with(&oracle, init, HConvention::KetAction);
            writeln!(
                out,
                "{f} ({}), {label}, {} oracle calls",
                parity(f),
                oracle.calls()
            )
            .unwrap();
            out.push_str(&show(rho.matrix()));
            if let Some(blocks) = match_even_blocks(&rho, init.k1, init.k2) {
                writeln!(
                    out,
                    "  block signs {:+} / {:+}",
                    blocks.top_sign, blocks.bottom_sign
                )
                .unwrap();
            }
        }
    }

    // Pseudo-pure outputs are pure states. An even and an odd one are not
    // orthogonal, yet the readout tells them apart.
    let pure = |bits| -> Result<_> {
        Ok(run_sequence_with(
            &PhaseOracle::new(BoolFn2::from_bits(bits)?),
            InitialState::PSEUDOPURE,
            HConvention::KetAction,
        ))
    };
    let (even, odd) = (pure(0b0000)?, pure(0b0001)?);
    for (name, rho) in [("0b0000", &even), ("0b0001", &odd)] {
        let ket = pure_ket(rho)?;
        writeln!(
            out,
            "ket for {name}: {:?}",
            ket.map(|c| (c.re * 1e6).round() / 1e6)
        )
        .unwrap();
    }
    writeln!(
        out,
        "|<0b0000|0b0001>|^2 = {:.6}",
        state_overlap(&even, &odd)?
    )
    .unwrap();
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run()?);
    Ok(())
}
