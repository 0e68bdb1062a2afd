//! Readout: coherence orders, simulated FID and the recovered line spectrum.
//!
//! Pass a directory to also write `spectrum.csv` and `fid.csv` there:
//! `cargo run --example nmr_readout -- /tmp/out`.

use std::fmt::Write;

use evenodd::coherence::{
    analytic_lines, classify_from_readout, decompose, simulate_fid, spectrum_from_fid, Acquisition,
    SpinSystemParams,
};
use evenodd::{run_sequence, BoolFn2, InitialState, Result};

pub fn run() -> Result<String> {
    report(None)
}

fn report(save_to: Option<String>) -> Result<String> {
    let params = SpinSystemParams::default();
    let acq = Acquisition::default();
    let mut out = String::new();
    writeln!(
        out,
        "acquisition: {} points, {:.3} Hz resolution",
        acq.npoints,
        acq.resolution()
    )
    .unwrap();
    for bits in [0b0000, 0b0101, 0b0111] {
        let f = BoolFn2::from_bits(bits)?;
        let rho = run_sequence(f, InitialState::THERMAL);
        let profile = decompose(&rho);
        writeln!(
            out,
            "\n{f}: |p|=1 {:.3}  |p|=2 {:.3}  -> {}",
            profile.single_quantum(),
            profile.double_quantum(),
            classify_from_readout(&rho, &params)?
        )
        .unwrap();
        let predicted = analytic_lines(&rho, &params);
        let fid = simulate_fid(&rho, &params, &acq)?;
        let picked = spectrum_from_fid(&fid);
        if picked.is_empty() {
            writeln!(out, "  no lines above threshold").unwrap();
        }
        for (p, q) in predicted.lines.iter().zip(&picked.lines) {
            writeln!(
                out,
                "  line {:>9.3} Hz  amp {:+.4}   (from FID: {:>9.3} Hz, {:+.4})",
                p.frequency_hz, p.amplitude.re, q.frequency_hz, q.amplitude.re
            )
            .unwrap();
        }
        if let Some(dir) = &save_to {
            std::fs::write(
                format!("{dir}/spectrum_{bits:04b}.csv"),
                picked.to_csv(None),
            )?;
            std::fs::write(format!("{dir}/fid_{bits:04b}.csv"), fid.to_csv())?;
        }
    }
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", report(std::env::args().nth(1))?);
    Ok(())
}
