//! The ideal gate-level algorithm.
//!
//! The circuit applies `h⁽¹·²⁾`, `U_f`, `h⁽²⁾`, `U_f`, `[h⁽¹·²⁾]⁻¹` in that
//! time order to a deviation density matrix `diag(k1, 0, 0, k2)`. Even
//! functions leave single-quantum coherence on qubit 2; odd functions leave
//! only double-quantum coherence between `|00⟩` and `|11⟩`.

use std::cell::Cell;
use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::boolfun::{parity, BoolFn2, Parity};
use crate::coherence::{classify_from_readout, SpinSystemParams};
use crate::error::{Error, Result};
use crate::qmat::{conjugate_evolve, tensor, Mat2, Mat4, C64};

/// Which qubit(s) a single-qubit gate or pulse acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Qubit1,
    Qubit2,
    Both,
}

impl Target {
    pub fn label(self) -> &'static str {
        match self {
            Target::Qubit1 => "1",
            Target::Qubit2 => "2",
            Target::Both => "1,2",
        }
    }

    pub fn acts_on_qubit1(self) -> bool {
        matches!(self, Target::Qubit1 | Target::Both)
    }

    pub fn acts_on_qubit2(self) -> bool {
        matches!(self, Target::Qubit2 | Target::Both)
    }
}

/// Lifts a single-qubit operator onto the targeted qubit(s).
pub fn lift(op: &Mat2, target: Target) -> Mat4 {
    let id = Mat2::identity();
    match target {
        Target::Qubit1 => tensor(op, &id),
        Target::Qubit2 => tensor(&id, op),
        Target::Both => tensor(op, op),
    }
}

/// Reading of the single-qubit pseudo-Hadamard.
///
/// The gate is written both as a ket action and as a matrix, and the two are
/// transposes of one another. The ket action is the one used here (it is
/// also what a `(90°)_y` pulse does). The transposed reading exists so that
/// tests can show classifications do not depend on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum HConvention {
    /// `|0⟩ → (|1⟩ + |0⟩)/√2`, `|1⟩ → (|1⟩ - |0⟩)/√2`.
    #[default]
    KetAction,
    /// The transposed matrix `(1/√2)[[1, 1], [-1, 1]]`.
    TransposedMatrix,
}

pub fn h_gate(convention: HConvention) -> Mat2 {
    let s = FRAC_1_SQRT_2;
    match convention {
        HConvention::KetAction => Mat2::from_real([[s, -s], [s, s]]),
        HConvention::TransposedMatrix => Mat2::from_real([[s, s], [-s, s]]),
    }
}

/// `h⁽¹⁾`, `h⁽²⁾` or `h⁽¹·²⁾`.
pub fn pseudo_hadamard(target: Target) -> Mat4 {
    lift(&h_gate(HConvention::KetAction), target)
}

pub fn pseudo_hadamard_inverse(target: Target) -> Mat4 {
    pseudo_hadamard(target).dagger()
}

/// Gate symbols appearing in the algorithm word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordGate {
    H(Target),
    HInv(Target),
    Oracle,
}

/// `h⁽¹·²⁾, U_f, h⁽²⁾, U_f, [h⁽¹·²⁾]⁻¹` in time order.
pub const ALGORITHM_WORD: [WordGate; 5] = [
    WordGate::H(Target::Both),
    WordGate::Oracle,
    WordGate::H(Target::Qubit2),
    WordGate::Oracle,
    WordGate::HInv(Target::Both),
];

/// Phase oracle `U_f` that counts its applications.
#[derive(Debug)]
pub struct PhaseOracle {
    diagonal: [f64; 4],
    calls: Cell<usize>,
}

impl PhaseOracle {
    pub fn new(f: BoolFn2) -> Self {
        Self::from_diagonal(f.phase_signs())
    }

    /// Oracle with an arbitrary real diagonal, e.g. a deliberately corrupted one.
    pub fn from_diagonal(diagonal: [f64; 4]) -> Self {
        PhaseOracle {
            diagonal,
            calls: Cell::new(0),
        }
    }

    pub fn diagonal(&self) -> [f64; 4] {
        self.diagonal
    }

    /// Hands out the oracle unitary and records one call.
    pub fn apply(&self) -> Mat4 {
        self.calls.set(self.calls.get() + 1);
        Mat4::from_real_diag(self.diagonal)
    }

    pub fn calls(&self) -> usize {
        self.calls.get()
    }

    /// Same diagonal with every sign flipped (`U_f → -U_f`).
    pub fn negated(&self) -> Self {
        Self::from_diagonal(self.diagonal.map(|d| -d))
    }
}

/// Weights of the initial deviation density matrix `diag(k1, 0, 0, k2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    pub k1: f64,
    pub k2: f64,
}

impl InitialState {
    pub const PSEUDOPURE: InitialState = InitialState { k1: 1.0, k2: 0.0 };
    pub const THERMAL: InitialState = InitialState { k1: 1.0, k2: -1.0 };

    pub fn new(k1: f64, k2: f64) -> Result<Self> {
        if !(k1.is_finite() && k2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite weights ({k1}, {k2})"
            )));
        }
        if k1 == 0.0 && k2 == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(InitialState { k1, k2 })
    }

    pub fn density(&self) -> DeviationDensity {
        DeviationDensity(Mat4::from_real_diag([self.k1, 0.0, 0.0, self.k2]))
    }
}

/// Deviation density matrix (identity component dropped).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeviationDensity(pub Mat4);

impl DeviationDensity {
    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn evolve(&self, u: &Mat4) -> Result<DeviationDensity> {
        Ok(DeviationDensity(conjugate_evolve(&self.0, u)?))
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0.get(row, col)
    }
}

/// `diag(k1, 0, 0, k2)`.
pub fn initial_state(k1: f64, k2: f64) -> Result<DeviationDensity> {
    Ok(InitialState::new(k1, k2)?.density())
}

/// `G = [h⁽¹·²⁾]⁻¹ · U_f · h⁽²⁾ · U_f · h⁽¹·²⁾`, drawing both `U_f` from `oracle`.
pub fn algorithm_unitary(oracle: &PhaseOracle, convention: HConvention) -> Mat4 {
    let h = h_gate(convention);
    ALGORITHM_WORD.iter().fold(Mat4::identity(), |acc, gate| {
        let step = match *gate {
            WordGate::H(t) => lift(&h, t),
            WordGate::HInv(t) => lift(&h, t).dagger(),
            WordGate::Oracle => oracle.apply(),
        };
        step * acc
    })
}

/// Runs the algorithm with a caller-supplied oracle (its call counter is left
/// for the caller to inspect).
pub fn run_sequence_with(
    oracle: &PhaseOracle,
    init: InitialState,
    convention: HConvention,
) -> DeviationDensity {
    let g = algorithm_unitary(oracle, convention);
    init.density()
        .evolve(&g)
        .expect("products of pseudo-Hadamards and ±1 diagonals are unitary")
}

pub fn run_sequence(f: BoolFn2, init: InitialState) -> DeviationDensity {
    run_sequence_with(&PhaseOracle::new(f), init, HConvention::KetAction)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockOrder {
    /// `k1` weights the `|0x⟩` block.
    K1Top,
    /// `k2` weights the `|0x⟩` block.
    K2Top,
}

/// Outcome of matching against the reference output templates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TemplateMatch {
    /// `½ [[k, ζk], [ζk, k]] ⊕ ½ [[k', ζk'], [ζk', k']]`.
    EvenForm {
        zeta: i8,
        block_order: BlockOrder,
    },
    /// `½(k1+k2)` on `|00⟩⟨00|`, `|11⟩⟨11|` and `½ζ(k1-k2)` on the corners.
    OddForm {
        zeta: i8,
    },
    NoMatch,
}

impl TemplateMatch {
    pub fn zeta(&self) -> Option<i8> {
        match *self {
            TemplateMatch::EvenForm { zeta, .. } | TemplateMatch::OddForm { zeta } => Some(zeta),
            TemplateMatch::NoMatch => None,
        }
    }

    pub fn parity(&self) -> Option<Parity> {
        match self {
            TemplateMatch::EvenForm { .. } => Some(Parity::Even),
            TemplateMatch::OddForm { .. } => Some(Parity::Odd),
            TemplateMatch::NoMatch => None,
        }
    }
}

pub const TEMPLATE_TOL: f64 = 1e-10;

fn block_template(top: f64, top_sign: f64, bottom: f64, bottom_sign: f64) -> Mat4 {
    let mut m = Mat4::zeros();
    for (offset, k, s) in [(0, top, top_sign), (2, bottom, bottom_sign)] {
        m.set(offset, offset, C64::new(k / 2.0, 0.0));
        m.set(offset + 1, offset + 1, C64::new(k / 2.0, 0.0));
        m.set(offset, offset + 1, C64::new(s * k / 2.0, 0.0));
        m.set(offset + 1, offset, C64::new(s * k / 2.0, 0.0));
    }
    m
}

fn odd_template(k1: f64, k2: f64, zeta: f64) -> Mat4 {
    let mut m = Mat4::zeros();
    let diag = C64::new((k1 + k2) / 2.0, 0.0);
    let corner = C64::new(zeta * (k1 - k2) / 2.0, 0.0);
    m.set(0, 0, diag);
    m.set(3, 3, diag);
    m.set(0, 3, corner);
    m.set(3, 0, corner);
    m
}

/// Matches `rho` against the reference even and odd output templates with a
/// single shared `ζ`. Either assignment of `k1`/`k2` to the two even blocks is
/// accepted. Tolerance [`TEMPLATE_TOL`].
pub fn match_templates(rho: &DeviationDensity, k1: f64, k2: f64) -> TemplateMatch {
    for zeta in [1i8, -1] {
        let z = f64::from(zeta);
        for (order, top, bottom) in [(BlockOrder::K1Top, k1, k2), (BlockOrder::K2Top, k2, k1)] {
            if rho.0.approx_eq(&block_template(top, z, bottom, z), TEMPLATE_TOL) {
                return TemplateMatch::EvenForm {
                    zeta,
                    block_order: order,
                };
            }
        }
    }
    for zeta in [1i8, -1] {
        if rho
            .0
            .approx_eq(&odd_template(k1, k2, f64::from(zeta)), TEMPLATE_TOL)
        {
            return TemplateMatch::OddForm { zeta };
        }
    }
    TemplateMatch::NoMatch
}

/// Block structure of an even-function output with an independent sign per
/// block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvenBlocks {
    pub top_sign: i8,
    pub bottom_sign: i8,
    pub block_order: BlockOrder,
}

/// Like the even branch of [`match_templates`], but each block carries its own sign.
///
/// The algorithm actually produces `bottom_sign = -top_sign` whenever both
/// weights are nonzero, which the shared-ζ template cannot express.
pub fn match_even_blocks(rho: &DeviationDensity, k1: f64, k2: f64) -> Option<EvenBlocks> {
    for order in [BlockOrder::K1Top, BlockOrder::K2Top] {
        let (top, bottom) = match order {
            BlockOrder::K1Top => (k1, k2),
            BlockOrder::K2Top => (k2, k1),
        };
        for top_sign in [1i8, -1] {
            for bottom_sign in [1i8, -1] {
                let t = block_template(top, f64::from(top_sign), bottom, f64::from(bottom_sign));
                if rho.0.approx_eq(&t, TEMPLATE_TOL) {
                    return Some(EvenBlocks {
                        top_sign,
                        bottom_sign,
                        block_order: order,
                    });
                }
            }
        }
    }
    None
}

/// `ζ` reported for `f` by the template matcher on the pseudopure run.
pub fn zeta_of(f: BoolFn2) -> i8 {
    let k = InitialState::PSEUDOPURE;
    match_templates(&run_sequence(f, k), k.k1, k.k2)
        .zeta()
        .expect("pseudopure outputs always match a template")
}

pub const PURITY_TOL: f64 = 1e-10;

/// Ket `|ψ⟩` (up to phase) with `rho = |ψ⟩⟨ψ|`.
pub fn pure_ket(rho: &DeviationDensity) -> Result<[C64; 4]> {
    let m = &rho.0;
    if !m.is_hermitian(PURITY_TOL)
        || (m.trace() - C64::new(1.0, 0.0)).norm() > PURITY_TOL
        || !(*m * *m).approx_eq(m, PURITY_TOL)
    {
        return Err(Error::NotPure);
    }
    let col = (0..4)
        .max_by(|&a, &b| m.get(a, a).re.total_cmp(&m.get(b, b).re))
        .unwrap();
    let norm = m.get(col, col).re.sqrt();
    Ok(std::array::from_fn(|r| m.get(r, col) / norm))
}

/// `tr(a·b) = |⟨ψ_a|ψ_b⟩|²` for two pure states.
pub fn state_overlap(a: &DeviationDensity, b: &DeviationDensity) -> Result<f64> {
    pure_ket(a)?;
    pure_ket(b)?;
    Ok((a.0 * b.0).trace().re)
}

/// Quantum classification: two oracle calls, then the coherence readout.
pub fn classify_quantum(f: BoolFn2, init: InitialState) -> Result<(Parity, usize)> {
    let oracle = PhaseOracle::new(f);
    let rho = run_sequence_with(&oracle, init, HConvention::KetAction);
    let parity = classify_from_readout(&rho, &SpinSystemParams::default())?;
    Ok((parity, oracle.calls()))
}

/// Convenience for tests and reports: does the quantum answer agree with the
/// classical one?
pub fn agrees_with_classical(f: BoolFn2, init: InitialState) -> Result<bool> {
    Ok(classify_quantum(f, init)?.0 == parity(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::ALGEBRA_TOL;

    fn f(o: [u8; 4]) -> BoolFn2 {
        BoolFn2::from_outputs(o.map(|b| b == 1))
    }

    fn ket_projector(psi: [f64; 4]) -> Mat4 {
        let mut m = Mat4::zeros();
        for r in 0..4 {
            for c in 0..4 {
                m.set(r, c, C64::new(psi[r] * psi[c], 0.0));
            }
        }
        m
    }

    #[test]
    fn hadamard_on_both_makes_uniform_superposition() {
        let h12 = pseudo_hadamard(Target::Both);
        for r in 0..4 {
            assert!((h12.get(r, 0) - C64::new(0.5, 0.0)).norm() < ALGEBRA_TOL);
        }
    }

    #[test]
    fn hadamard_inverse_pairs() {
        for t in [Target::Qubit1, Target::Qubit2, Target::Both] {
            let prod = pseudo_hadamard_inverse(t) * pseudo_hadamard(t);
            assert!(prod.approx_eq(&Mat4::identity(), ALGEBRA_TOL));
            assert!(pseudo_hadamard(t).is_unitary(ALGEBRA_TOL));
        }
    }

    #[test]
    fn h_squared_sends_zero_to_one_up_to_sign() {
        let h = h_gate(HConvention::KetAction);
        let hh = h * h;
        assert!(hh.get(0, 0).norm() < ALGEBRA_TOL);
        assert!((hh.get(1, 0).norm() - 1.0).abs() < ALGEBRA_TOL);
    }

    #[test]
    fn initial_states() {
        assert_eq!(
            initial_state(1.0, 0.0).unwrap().0,
            Mat4::from_real_diag([1.0, 0.0, 0.0, 0.0])
        );
        assert_eq!(
            initial_state(1.0, -1.0).unwrap().0,
            Mat4::from_real_diag([1.0, 0.0, 0.0, -1.0])
        );
        assert_eq!(
            initial_state(2.0, 3.0).unwrap().0,
            Mat4::from_real_diag([2.0, 0.0, 0.0, 3.0])
        );
        assert!(matches!(initial_state(0.0, 0.0), Err(Error::ZeroState)));
        assert!(initial_state(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn pure_state_anchors() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let odd = run_sequence(f([0, 1, 1, 1]), InitialState::PSEUDOPURE);
        assert!(odd
            .0
            .approx_eq(&ket_projector([s, 0.0, 0.0, s]), ALGEBRA_TOL));
        let even = run_sequence(f([0, 0, 0, 0]), InitialState::PSEUDOPURE);
        assert!(even
            .0
            .approx_eq(&ket_projector([s, s, 0.0, 0.0]), ALGEBRA_TOL));
    }

    #[test]
    fn exactly_two_oracle_calls() {
        for g in BoolFn2::all() {
            let oracle = PhaseOracle::new(g);
            run_sequence_with(&oracle, InitialState::THERMAL, HConvention::KetAction);
            assert_eq!(oracle.calls(), 2);
        }
    }

    #[test]
    fn thermal_trace_is_zero() {
        for g in BoolFn2::all() {
            let rho = run_sequence(g, InitialState::THERMAL);
            assert!(rho.0.trace().norm() < ALGEBRA_TOL);
        }
    }

    #[test]
    fn odd_thermal_matches_odd_template() {
        let rho = run_sequence(f([0, 1, 1, 1]), InitialState::THERMAL);
        let m = match_templates(&rho, 1.0, -1.0);
        assert!(matches!(m, TemplateMatch::OddForm { .. }));
        assert!(rho.get(0, 0).norm() < ALGEBRA_TOL);
        assert!((rho.get(0, 3).norm() - 1.0).abs() < ALGEBRA_TOL);
    }

    #[test]
    fn pseudopure_even_matches_shared_zeta_template() {
        let rho = run_sequence(f([0, 0, 0, 0]), InitialState::PSEUDOPURE);
        assert_eq!(
            match_templates(&rho, 1.0, 0.0),
            TemplateMatch::EvenForm {
                zeta: 1,
                block_order: BlockOrder::K1Top
            }
        );
    }

    // With both weights nonzero the even output has opposite signs in its two
    // blocks, so the shared-ζ template does not fit.
    #[test]
    fn thermal_even_blocks_carry_opposite_signs() {
        for g in BoolFn2::all().filter(|&g| parity(g) == Parity::Even) {
            for init in [InitialState::THERMAL, InitialState { k1: 2.0, k2: 3.0 }] {
                let rho = run_sequence(g, init);
                let blocks = match_even_blocks(&rho, init.k1, init.k2).expect("block structure");
                assert_eq!(blocks.block_order, BlockOrder::K1Top);
                assert_eq!(blocks.bottom_sign, -blocks.top_sign);
                assert_eq!(blocks.top_sign, zeta_of(g));
                assert_eq!(match_templates(&rho, init.k1, init.k2), TemplateMatch::NoMatch);
            }
        }
    }

    #[test]
    fn diagonal_state_does_not_match() {
        let rho = initial_state(1.0, 0.0).unwrap();
        assert_eq!(match_templates(&rho, 1.0, -1.0), TemplateMatch::NoMatch);
    }

    #[test]
    fn zeta_anchors() {
        assert_eq!(zeta_of(f([0, 0, 0, 0])), 1);
        assert_eq!(zeta_of(f([0, 1, 1, 1])), 1);
    }

    #[test]
    fn overlaps() {
        let even = run_sequence(f([0, 0, 0, 0]), InitialState::PSEUDOPURE);
        let odd = run_sequence(f([0, 1, 1, 1]), InitialState::PSEUDOPURE);
        assert!((state_overlap(&even, &odd).unwrap() - 0.25).abs() < ALGEBRA_TOL);
        assert!((state_overlap(&even, &even).unwrap() - 1.0).abs() < ALGEBRA_TOL);
        let p00 = initial_state(1.0, 0.0).unwrap();
        let p11 = initial_state(0.0, 1.0).unwrap();
        assert!(state_overlap(&p00, &p11).unwrap().abs() < ALGEBRA_TOL);
        let thermal = initial_state(1.0, -1.0).unwrap();
        assert!(matches!(state_overlap(&thermal, &p00), Err(Error::NotPure)));
    }

    #[test]
    fn quantum_classification_examples() {
        assert_eq!(
            classify_quantum(f([0, 1, 1, 0]), InitialState::THERMAL).unwrap(),
            (Parity::Even, 2)
        );
        assert_eq!(
            classify_quantum(f([0, 1, 1, 1]), InitialState::THERMAL).unwrap(),
            (Parity::Odd, 2)
        );
        for g in BoolFn2::all() {
            assert!(agrees_with_classical(g, InitialState::THERMAL).unwrap());
            assert!(agrees_with_classical(g, InitialState::PSEUDOPURE).unwrap());
        }
    }

    #[test]
    fn convention_independent_classification() {
        for g in BoolFn2::all() {
            for init in [InitialState::THERMAL, InitialState::PSEUDOPURE] {
                let a = run_sequence_with(&PhaseOracle::new(g), init, HConvention::KetAction);
                let b = run_sequence_with(&PhaseOracle::new(g), init, HConvention::TransposedMatrix);
                let params = SpinSystemParams::default();
                assert_eq!(
                    classify_from_readout(&a, &params).unwrap(),
                    classify_from_readout(&b, &params).unwrap()
                );
            }
        }
    }
}
