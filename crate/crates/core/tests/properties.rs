use std::f64::consts::TAU;

use proptest::prelude::*;

use evenodd::coherence::{
    analytic_lines, decompose, simulate_fid, spectrum_from_fid, Acquisition, SpinSystemParams,
};
use evenodd::evenodd::{lift, run_sequence, DeviationDensity, InitialState, Target};
use evenodd::pulse::{compile_gate, composite_z, program_propagator, Frame, Gate, PulseProgram};
use evenodd::qmat::{
    diag_phase, equal_up_to_global_phase, tensor, transverse_rotation, z_rotation, Mat2, Mat4, C64,
};
use evenodd::{parity, BoolFn2, Parity};

fn c64() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn mat2() -> impl Strategy<Value = Mat2> {
    proptest::array::uniform2(proptest::array::uniform2(c64())).prop_map(evenodd::qmat::Mat)
}

fn target() -> impl Strategy<Value = Target> {
    prop_oneof![
        Just(Target::Qubit1),
        Just(Target::Qubit2),
        Just(Target::Both)
    ]
}

fn unitary() -> impl Strategy<Value = Mat4> {
    let step = (
        0.0..6.3f64,
        0.0..6.3f64,
        target(),
        proptest::array::uniform4(-10.0..10.0f64),
    );
    proptest::collection::vec(step, 1..5).prop_map(|steps| {
        steps
            .into_iter()
            .fold(Mat4::identity(), |acc, (theta, phase, t, angles)| {
                diag_phase(angles) * lift(&transverse_rotation(theta, phase), t) * acc
            })
    })
}

fn hermitian() -> impl Strategy<Value = Mat4> {
    proptest::array::uniform4(proptest::array::uniform4(c64())).prop_map(|rows| {
        let m = evenodd::qmat::Mat(rows);
        m + m.dagger()
    })
}

fn power_traces(m: &Mat4) -> [C64; 3] {
    let m2 = *m * *m;
    [m.trace(), m2.trace(), (m2 * *m).trace()]
}

fn function() -> impl Strategy<Value = BoolFn2> {
    (0u8..16).prop_map(|b| BoolFn2::from_bits(b).unwrap())
}

proptest! {
    #[test]
    fn tensor_is_bilinear(a in mat2(), b in mat2(), c in mat2(), alpha in c64()) {
        let left = tensor(&(alpha * a + b), &c);
        let right = alpha * tensor(&a, &c) + tensor(&b, &c);
        prop_assert!(left.approx_eq(&right, 1e-12));
        let left = tensor(&c, &(alpha * a + b));
        let right = alpha * tensor(&c, &a) + tensor(&c, &b);
        prop_assert!(left.approx_eq(&right, 1e-12));
    }

    #[test]
    fn tensor_mixed_product(a in mat2(), b in mat2(), c in mat2(), d in mat2()) {
        let left = tensor(&a, &b) * tensor(&c, &d);
        let right = tensor(&(a * c), &(b * d));
        prop_assert!(left.approx_eq(&right, 1e-11));
    }

    #[test]
    fn global_phase_is_an_equivalence(u in unitary(), v in unitary(), phi in 0.0..TAU) {
        prop_assert!(equal_up_to_global_phase(&u, &u, 1e-12).unwrap().is_some());
        let shifted = C64::from_polar(1.0, phi) * u;
        let got = equal_up_to_global_phase(&shifted, &u, 1e-12).unwrap();
        prop_assert!(got.is_some());
        let back = equal_up_to_global_phase(&u, &shifted, 1e-12).unwrap();
        prop_assert!(back.is_some());
        let twice = C64::from_polar(1.0, 2.0 * phi) * u;
        prop_assert!(equal_up_to_global_phase(&twice, &shifted, 1e-12).unwrap().is_some());
        let uv = equal_up_to_global_phase(&u, &v, 1e-9).unwrap().is_some();
        let vu = equal_up_to_global_phase(&v, &u, 1e-9).unwrap().is_some();
        prop_assert_eq!(uv, vu);
    }

    #[test]
    fn evolution_preserves_spectrum(rho in hermitian(), u in unitary()) {
        prop_assert!(u.is_unitary(1e-10));
        let before = DeviationDensity(rho);
        let after = before.evolve(&u).unwrap();
        prop_assert!(after.matrix().is_hermitian(1e-10));
        for (x, y) in power_traces(&rho).iter().zip(power_traces(after.matrix())) {
            prop_assert!((x - y).norm() < 1e-9 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn free_evolution_keeps_coherence_profile(rho in hermitian(), angles in proptest::array::uniform4(-50.0..50.0f64)) {
        let before = DeviationDensity(rho);
        let after = before.evolve(&diag_phase(angles)).unwrap();
        let (a, b) = (decompose(&before), decompose(&after));
        for p in -2..=2 {
            prop_assert!((a.magnitude(p) - b.magnitude(p)).abs() < 1e-10);
        }
    }

    #[test]
    fn output_is_linear_in_weights(f in function(), k1 in -5.0..5.0f64, k2 in -5.0..5.0f64) {
        prop_assume!(k1.abs() + k2.abs() > 1e-6);
        let rho = run_sequence(f, InitialState::new(k1, k2).unwrap());
        let a = run_sequence(f, InitialState::new(1.0, 0.0).unwrap());
        let b = run_sequence(f, InitialState::new(0.0, 1.0).unwrap());
        let combined = C64::new(k1, 0.0) * a.0 + C64::new(k2, 0.0) * b.0;
        prop_assert!(rho.0.approx_eq(&combined, 1e-12));
        prop_assert!((rho.0.trace() - C64::new(k1 + k2, 0.0)).norm() < 1e-12);
        prop_assert!(rho.0.is_hermitian(1e-12));
    }

    #[test]
    fn composite_z_matches_z_rotation(theta in -TAU..TAU, t in target()) {
        prop_assume!(theta.abs() > 1e-6);
        let u = program_propagator(&composite_z(theta, t).unwrap(), &SpinSystemParams::default());
        let z = lift(&z_rotation(theta), t);
        prop_assert!(equal_up_to_global_phase(&u, &z, 1e-9).unwrap().is_some());
    }

    #[test]
    fn program_json_round_trip(
        index in 1u8..=16,
        hardware in any::<bool>(),
        nu1 in -400.0..400.0f64,
        nu2 in -400.0..400.0f64,
        j in 0.5..50.0f64,
    ) {
        let params = SpinSystemParams::new(nu1, nu2, j).unwrap();
        let frame = if hardware { Frame::HardwareFaithful } else { Frame::DoublyRotating };
        let program = compile_gate(Gate::U(index), frame, &params).unwrap();
        let back = PulseProgram::from_json(&program.to_json().unwrap()).unwrap();
        let a = program_propagator(&program, &params);
        let b = program_propagator(&back, &params);
        prop_assert!(a.approx_eq(&b, 1e-12));
    }

    #[test]
    fn truth_table_text_round_trip(f in function()) {
        prop_assert_eq!(f.to_string().parse::<BoolFn2>().unwrap(), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fid_peaks_land_on_analytic_lines(
        f in function(),
        nu1 in 60.0..400.0f64,
        nu2 in -400.0..-60.0f64,
        j in 3.0..15.0f64,
    ) {
        let params = SpinSystemParams::new(nu1, nu2, j).unwrap();
        let acq = Acquisition::default();
        let rho = run_sequence(f, InitialState::THERMAL);
        let expected = analytic_lines(&rho, &params);
        let picked = spectrum_from_fid(&simulate_fid(&rho, &params, &acq).unwrap());
        prop_assert_eq!(picked.len(), expected.len());
        prop_assert!(picked.len() <= 4);
        for (p, e) in picked.lines.iter().zip(&expected.lines) {
            prop_assert!((p.frequency_hz - e.frequency_hz).abs() <= acq.resolution());
            prop_assert!((p.amplitude - e.amplitude).norm() < 1e-6);
        }
        prop_assert_eq!(expected.is_empty(), parity(f) == Parity::Odd);
    }
}
