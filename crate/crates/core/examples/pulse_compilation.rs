//! Pulse programs for every gate, checked against the target unitaries.
//!
//! Shows the entangling oracle U9 in both frames, what happens when its
//! refocusing pulse is left out, and the JSON form of a program.

use std::fmt::Write;

use evenodd::pulse::{
    compile_gate, compile_gate_with, offset_dependence, verify_compilation, CompileOptions, Frame,
    Gate,
};
use evenodd::{Result, SpinSystemParams};

pub fn run() -> Result<String> {
    let params = SpinSystemParams::default();
    let mut out = String::new();
    for frame in [Frame::DoublyRotating, Frame::HardwareFaithful] {
        let report = verify_compilation(Gate::U(9), &params, frame)?;
        out.push_str(&report.program.timeline());
        writeln!(
            out,
            "  global phase {:.6} rad, residual {:.1e}, frame flip {}",
            report.achieved_phase, report.residual, report.frame_flip_applied
        )
        .unwrap();
    }

    let bare = compile_gate_with(
        Gate::U(9),
        Frame::HardwareFaithful,
        &params,
        CompileOptions { refocus: false },
    )?;
    writeln!(
        out,
        "\nwithout refocusing, offset dependence = {:.3}",
        offset_dependence(&bare, params.j)
    )
    .unwrap();

    let mut worst: f64 = 0.0;
    for frame in [Frame::DoublyRotating, Frame::HardwareFaithful] {
        for gate in Gate::all() {
            worst = worst.max(verify_compilation(gate, &params, frame)?.residual);
        }
    }
    writeln!(
        out,
        "all {} gates verified in both frames, worst residual {worst:.1e}",
        Gate::all().len()
    )
    .unwrap();

    writeln!(
        out,
        "\n{}",
        compile_gate(
            Gate::H(evenodd::Target::Both),
            Frame::DoublyRotating,
            &params
        )?
        .to_json()?
    )
    .unwrap();
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run()?);
    Ok(())
}
