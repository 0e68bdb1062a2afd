//! Self-checks grouped the way the `verify` subcommand reports them.
//!
//! Each group runs a batch of checks and records the failures by name. Faults
//! can be injected to confirm that a group actually catches what it claims to.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use crate::boolfun::{catalog, classical_classify, encode_uf, is_separable, BoolFn2, Parity};
use crate::coherence::{analytic_lines, classify_from_readout, SpinSystemParams};
use crate::evenodd::{
    lift, run_sequence, run_sequence_with, HConvention, InitialState, PhaseOracle, Target,
};
use crate::pulse::{
    compile_gate_with, composite_z, program_propagator, run_pulse_algorithm, verify_program,
    CompileOptions, Frame, Gate,
};
use crate::qmat::{equal_up_to_global_phase, z_rotation, ALGEBRA_TOL, PROPAGATOR_TOL};

/// Deliberate faults for negative testing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Compile hardware-frame entangling gates without the refocusing pulse.
    pub drop_refocusing: bool,
    /// Negate the first diagonal entry of every oracle used for classification.
    pub flip_diagonal_sign: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupResult {
    pub name: String,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl GroupResult {
    fn new(name: &str) -> Self {
        GroupResult {
            name: name.to_string(),
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, label: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(label());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub groups: Vec<GroupResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.groups.iter().all(GroupResult::passed)
    }
}

pub fn run_verification(params: &SpinSystemParams, options: VerifyOptions) -> VerifyReport {
    VerifyReport {
        groups: vec![
            oracle_catalog(),
            composite_rotations(params),
            gate_compilation(params, options),
            ideal_classification(params, options),
            pulse_agreement(params),
            thermal_spectra(params),
        ],
    }
}

fn oracle_catalog() -> GroupResult {
    let mut g = GroupResult::new("oracle catalog");
    let entries = catalog();
    g.check(entries.len() == 16, || {
        format!("catalog has {} entries", entries.len())
    });
    for e in &entries {
        let f = e.function();
        let same = equal_up_to_global_phase(&e.matrix(), &encode_uf(f), ALGEBRA_TOL)
            .ok()
            .flatten()
            .is_some();
        g.check(same, || {
            format!("U{} differs from the encoding of its function", e.index)
        });
        let separable = is_separable(&e.matrix()).unwrap_or(false);
        g.check(separable == (e.parity == Parity::Even), || {
            format!(
                "U{}: separable={separable} but parity {}",
                e.index, e.parity
            )
        });
    }
    g
}

fn composite_rotations(params: &SpinSystemParams) -> GroupResult {
    let mut g = GroupResult::new("composite z rotations");
    for theta in [FRAC_PI_2, -FRAC_PI_2, PI, TAU] {
        for target in [Target::Qubit1, Target::Qubit2, Target::Both] {
            let ok = composite_z(theta, target)
                .map(|p| program_propagator(&p, params))
                .ok()
                .and_then(|u| {
                    equal_up_to_global_phase(&u, &lift(&z_rotation(theta), target), PROPAGATOR_TOL)
                        .ok()
                        .flatten()
                })
                .is_some();
            g.check(ok, || format!("z({theta:.4}) on qubit {}", target.label()));
        }
    }
    g
}

fn gate_compilation(params: &SpinSystemParams, options: VerifyOptions) -> GroupResult {
    let mut g = GroupResult::new("gate compilation");
    let compile_options = CompileOptions {
        refocus: !options.drop_refocusing,
    };
    for frame in [Frame::DoublyRotating, Frame::HardwareFaithful] {
        for gate in Gate::all() {
            let outcome = compile_gate_with(gate, frame, params, compile_options)
                .and_then(|p| verify_program(gate, p, params));
            g.check(outcome.is_ok(), || match outcome {
                Err(e) => format!("{gate} ({frame}): {e}"),
                Ok(_) => unreachable!(),
            });
        }
    }
    g
}

fn ideal_classification(params: &SpinSystemParams, options: VerifyOptions) -> GroupResult {
    let mut g = GroupResult::new("ideal classification");
    for f in BoolFn2::all() {
        let (expected, queries) = classical_classify(f);
        g.check(queries == 4, || {
            format!("{f}: classical route used {queries} queries")
        });
        for init in [InitialState::THERMAL, InitialState::PSEUDOPURE] {
            let mut oracle = PhaseOracle::new(f);
            if options.flip_diagonal_sign {
                let mut d = oracle.diagonal();
                d[0] = -d[0];
                oracle = PhaseOracle::from_diagonal(d);
            }
            let rho = run_sequence_with(&oracle, init, HConvention::KetAction);
            g.check(oracle.calls() == 2, || {
                format!("{f}: {} oracle calls", oracle.calls())
            });
            let got = classify_from_readout(&rho, params);
            g.check(matches!(got, Ok(p) if p == expected), || {
                format!(
                    "{f} (k1={}, k2={}): expected {expected}, got {got:?}",
                    init.k1, init.k2
                )
            });
        }
    }
    g
}

fn pulse_agreement(params: &SpinSystemParams) -> GroupResult {
    let mut g = GroupResult::new("pulse-level agreement");
    for f in BoolFn2::all() {
        for init in [InitialState::THERMAL, InitialState::PSEUDOPURE] {
            let ideal = run_sequence(f, init);
            for frame in [Frame::DoublyRotating, Frame::HardwareFaithful] {
                let pulsed = run_pulse_algorithm(f, init, params, frame);
                let ok = matches!(&pulsed, Ok(r) if r.0.approx_eq(&ideal.0, PROPAGATOR_TOL));
                g.check(ok, || {
                    format!("{f} ({frame}, k2={}): pulse run differs", init.k2)
                });
            }
        }
    }
    g
}

fn thermal_spectra(params: &SpinSystemParams) -> GroupResult {
    let mut g = GroupResult::new("thermal spectra");
    let expected = [
        params.nu1 + params.j / 2.0,
        params.nu1 - params.j / 2.0,
        params.nu2 + params.j / 2.0,
        params.nu2 - params.j / 2.0,
    ];
    for f in BoolFn2::all() {
        let lines = analytic_lines(&run_sequence(f, InitialState::THERMAL), params);
        match classical_classify(f).0 {
            Parity::Odd => g.check(lines.is_empty(), || {
                format!("{f}: odd function shows lines")
            }),
            Parity::Even => {
                g.check(!lines.is_empty(), || {
                    format!("{f}: even function shows no lines")
                });
                for line in &lines.lines {
                    let on_grid = expected
                        .iter()
                        .any(|e| (e - line.frequency_hz).abs() < 1e-9);
                    g.check(on_grid, || {
                        format!("{f}: unexpected line at {} Hz", line.frequency_hz)
                    });
                }
            }
        }
    }
    g
}
