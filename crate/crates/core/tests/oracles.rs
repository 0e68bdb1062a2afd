//! Independent reference computations checked against the library.

use evenodd::boolfun::{catalog, encode_uf, is_separable, parity, BoolFn2, Parity};
use evenodd::evenodd::{match_templates, pure_ket, run_sequence, zeta_of, InitialState};
use evenodd::qmat::C64;

// ζ for each packed truth table 0..16, computed offline with a separate
// numpy implementation and frozen here.
const ZETA_TABLE: [i8; 16] = [1, 1, 1, 1, -1, -1, -1, -1, -1, -1, -1, -1, 1, 1, 1, 1];

/// Plain real state-vector simulation: `h = (1/√2)[[1,-1],[1,1]]` per qubit,
/// `U_f` as signs, basis index `2·q1 + q2`.
fn statevector_run(f: BoolFn2, start: usize) -> [f64; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = |psi: [f64; 4], qubit: usize, inverse: bool| -> [f64; 4] {
        let (a, b) = if inverse { (s, -s) } else { (-s, s) };
        // [[s, a], [b, s]] acting on the chosen qubit
        let mut out = [0.0; 4];
        for (i, amp) in psi.iter().enumerate() {
            let bit = if qubit == 1 { (i >> 1) & 1 } else { i & 1 };
            let flip = if qubit == 1 { i ^ 2 } else { i ^ 1 };
            if bit == 0 {
                out[i] += s * amp;
                out[flip] += b * amp;
            } else {
                out[i] += s * amp;
                out[flip] += a * amp;
            }
        }
        out
    };
    let oracle = |psi: [f64; 4]| -> [f64; 4] {
        std::array::from_fn(|i| if f.eval(i) { -psi[i] } else { psi[i] })
    };
    let mut psi = [0.0; 4];
    psi[start] = 1.0;
    psi = h(h(psi, 1, false), 2, false);
    psi = oracle(psi);
    psi = h(psi, 2, false);
    psi = oracle(psi);
    h(h(psi, 1, true), 2, true)
}

fn outer_sum(f: BoolFn2, init: InitialState) -> [[f64; 4]; 4] {
    let a = statevector_run(f, 0);
    let b = statevector_run(f, 3);
    std::array::from_fn(|r| std::array::from_fn(|c| init.k1 * a[r] * a[c] + init.k2 * b[r] * b[c]))
}

#[test]
fn density_evolution_matches_statevector_oracle() {
    for f in BoolFn2::all() {
        for init in [
            InitialState::PSEUDOPURE,
            InitialState::THERMAL,
            InitialState { k1: 2.0, k2: 3.0 },
        ] {
            let expected = outer_sum(f, init);
            let rho = run_sequence(f, init);
            for (r, row) in expected.iter().enumerate() {
                for (c, &want) in row.iter().enumerate() {
                    let got = rho.get(r, c);
                    assert!(
                        (got - C64::new(want, 0.0)).norm() < 1e-12,
                        "{f} k=({}, {}) entry ({r},{c}): {got} vs {want}",
                        init.k1,
                        init.k2,
                    );
                }
            }
        }
    }
}

#[test]
fn zeta_table_is_frozen() {
    for f in BoolFn2::all() {
        assert_eq!(zeta_of(f), ZETA_TABLE[f.bits() as usize], "{f}");
    }
}

#[test]
fn zeta_is_the_relative_sign_of_the_output_ket() {
    for f in BoolFn2::all() {
        let psi = statevector_run(f, 0);
        let support: Vec<usize> = (0..4).filter(|&i| psi[i].abs() > 1e-12).collect();
        assert_eq!(support.len(), 2, "{f}");
        let relative = (psi[support[1]] / psi[support[0]]).round() as i8;
        assert_eq!(relative, ZETA_TABLE[f.bits() as usize], "{f}");
        let m = match_templates(&run_sequence(f, InitialState::PSEUDOPURE), 1.0, 0.0);
        assert_eq!(m.parity(), Some(parity(f)));
    }
}

#[test]
fn pure_ket_reproduces_statevector() {
    for f in BoolFn2::all() {
        let ket = pure_ket(&run_sequence(f, InitialState::PSEUDOPURE)).unwrap();
        let psi = statevector_run(f, 0);
        let inner: C64 = ket.iter().zip(psi).map(|(k, p)| k.conj() * p).sum();
        assert!((inner.norm() - 1.0).abs() < 1e-12, "{f}");
    }
}

/// Brute-force product test: is `diag(d)` equal to `diag(a) ⊗ diag(b)` for some
/// unit-modulus `a, b` drawn from the fourth roots of unity?
fn factor_search(d: [f64; 4]) -> bool {
    let roots = [
        C64::new(1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, -1.0),
    ];
    for a0 in roots {
        for a1 in roots {
            for b0 in roots {
                for b1 in roots {
                    let product = [a0 * b0, a0 * b1, a1 * b0, a1 * b1];
                    if product.iter().zip(d).all(|(p, x)| (p - x).norm() < 1e-12) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

#[test]
fn separability_shortcut_matches_factor_search() {
    let mut even_products = 0;
    let mut odd_entangling = 0;
    for e in catalog() {
        let d = e.diagonal.map(f64::from);
        let brute = factor_search(d);
        assert_eq!(is_separable(&e.matrix()).unwrap(), brute, "U{}", e.index);
        match (e.parity, brute) {
            (Parity::Even, true) => even_products += 1,
            (Parity::Odd, false) => odd_entangling += 1,
            _ => panic!("U{}: parity {} but product={brute}", e.index, e.parity),
        }
    }
    assert_eq!((even_products, odd_entangling), (8, 8));
}

#[test]
fn encoding_and_catalog_agree_exactly() {
    for e in catalog() {
        assert_eq!(encode_uf(e.function()), e.matrix());
    }
}
