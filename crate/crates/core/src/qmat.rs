//! Small dense complex matrices for one and two qubits.
//!
//! Two-qubit operators act on the basis `|00⟩, |01⟩, |10⟩, |11⟩` with qubit 1
//! as the most significant (left) tensor factor. Every other module relies on
//! this ordering.

use std::f64::consts::TAU;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance for propagator equivalence checks.
pub const PROPAGATOR_TOL: f64 = 1e-9;
/// Tolerance for exact algebraic identities.
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Unitarity tolerance accepted by [`conjugate_evolve`].
pub const UNITARY_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Square `N × N` complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat<const N: usize>(pub [[C64; N]; N]);

pub type Mat2 = Mat<2>;
pub type Mat4 = Mat<4>;

impl<const N: usize> Mat<N> {
    pub fn zeros() -> Self {
        Mat([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_diag(d: [C64; N]) -> Self {
        let mut m = Self::zeros();
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    pub fn from_real_diag(d: [f64; N]) -> Self {
        Self::from_diag(d.map(|x| C64::new(x, 0.0)))
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        Mat(rows.map(|r| r.map(|x| C64::new(x, 0.0))))
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[row][col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.0[row][col] = value;
    }

    pub fn diagonal(&self) -> [C64; N] {
        std::array::from_fn(|i| self.0[i][i])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let mut out = Self::zeros();
        for r in 0..N {
            for c in 0..N {
                let mut acc = ZERO;
                for k in 0..N {
                    acc += self.0[r][k] * other.0[k][c];
                }
                out.0[r][c] = acc;
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros();
        for r in 0..N {
            for c in 0..N {
                out.0[c][r] = self.0[r][c].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        Mat(self.0.map(|row| row.map(|x| x * s)))
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        self.entries().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Sum of entry magnitudes.
    pub fn entrywise_l1(&self) -> f64 {
        self.entries().map(|x| x.norm()).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_norm()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.entries().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.approx_eq(&self.dagger(), tol)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..N).all(|r| (0..N).all(|c| r == c || self.0[r][c].norm() <= tol))
    }

    /// `max |U U† - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        self.matmul(&self.dagger()).max_abs_diff(&Self::identity())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn entries(&self) -> impl Iterator<Item = C64> + '_ {
        self.0.iter().flat_map(|row| row.iter().copied())
    }
}

impl<const N: usize> Default for Mat<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Add for Mat<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for r in 0..N {
            for c in 0..N {
                self.0[r][c] += rhs.0[r][c];
            }
        }
        self
    }
}

impl<const N: usize> Sub for Mat<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for r in 0..N {
            for c in 0..N {
                self.0[r][c] -= rhs.0[r][c];
            }
        }
        self
    }
}

impl<const N: usize> Neg for Mat<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

impl<const N: usize> Mul for Mat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Mat::matmul(&self, &rhs)
    }
}

impl<const N: usize> Mul<Mat<N>> for C64 {
    type Output = Mat<N>;
    fn mul(self, rhs: Mat<N>) -> Mat<N> {
        rhs.scale(self)
    }
}

/// Kronecker product `a ⊗ b`; `a` acts on qubit 1.
pub fn tensor(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = Mat4::zeros();
    for ar in 0..2 {
        for ac in 0..2 {
            for br in 0..2 {
                for bc in 0..2 {
                    out.0[2 * ar + br][2 * ac + bc] = a.0[ar][ac] * b.0[br][bc];
                }
            }
        }
    }
    out
}

/// Returns `u · rho · u†`.
pub fn conjugate_evolve(rho: &Mat4, u: &Mat4) -> Result<Mat4> {
    let deviation = u.unitarity_deviation();
    if deviation > UNITARY_TOL {
        return Err(Error::NonUnitaryOperator { deviation });
    }
    Ok(u.matmul(rho).matmul(&u.dagger()))
}

/// Finds `φ ∈ [0, 2π)` with `max|a - e^{iφ} b| ≤ tol`.
///
/// The phase is read off the largest-magnitude entry of `b`, so sparse
/// diagonal references never divide by a near-zero entry. Returns `Ok(None)`
/// when the matrices differ by more than a global phase.
pub fn equal_up_to_global_phase<const N: usize>(
    a: &Mat<N>,
    b: &Mat<N>,
    tol: f64,
) -> Result<Option<f64>> {
    let (mut best, mut best_mag) = ((0, 0), 0.0);
    for r in 0..N {
        for c in 0..N {
            let m = b.0[r][c].norm();
            if m > best_mag {
                best_mag = m;
                best = (r, c);
            }
        }
    }
    if best_mag == 0.0 {
        return Err(Error::DegenerateComparison);
    }
    let (r, c) = best;
    let ratio = a.0[r][c] / b.0[r][c];
    let phi = if ratio.norm() == 0.0 {
        0.0
    } else {
        ratio.arg()
    };
    let phased = b.scale(C64::from_polar(1.0, phi));
    if a.max_abs_diff(&phased) <= tol {
        Ok(Some(normalize_angle(phi)))
    } else {
        Ok(None)
    }
}

/// Residual `min_φ`-style distance used in reports: `max|a - e^{iφ} b|` at
/// the phase read off the largest entry of `b`.
pub fn phase_aligned_residual<const N: usize>(a: &Mat<N>, b: &Mat<N>) -> Result<(f64, f64)> {
    // A tolerance of infinity always succeeds and hands back the phase.
    let phi = equal_up_to_global_phase(a, b, f64::INFINITY)?.unwrap_or(0.0);
    let residual = a.max_abs_diff(&b.scale(C64::from_polar(1.0, phi)));
    Ok((phi, residual))
}

/// Wraps an angle into `[0, 2π)`.
pub fn normalize_angle(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if (TAU - w).abs() < 1e-15 {
        0.0
    } else {
        w
    }
}

/// Pauli matrices.
pub fn sigma_x() -> Mat2 {
    Mat2::from_real([[0.0, 1.0], [1.0, 0.0]])
}

pub fn sigma_y() -> Mat2 {
    Mat([[ZERO, -I], [I, ZERO]])
}

pub fn sigma_z() -> Mat2 {
    Mat2::from_real_diag([1.0, -1.0])
}

/// `exp(-i θ (cos φ Ix + sin φ Iy))` for a spin-½, `I = σ/2`.
pub fn transverse_rotation(theta: f64, phase: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    let n =
        sigma_x().scale(C64::new(phase.cos(), 0.0)) + sigma_y().scale(C64::new(phase.sin(), 0.0));
    Mat2::identity().scale(C64::new(c, 0.0)) + n.scale(C64::new(0.0, -s))
}

/// `exp(-i θ Iz)`.
pub fn z_rotation(theta: f64) -> Mat2 {
    Mat2::from_diag([
        C64::from_polar(1.0, -theta / 2.0),
        C64::from_polar(1.0, theta / 2.0),
    ])
}

/// Diagonal `exp(-i diag(angles))`.
pub fn diag_phase(angles: [f64; 4]) -> Mat4 {
    Mat4::from_diag(angles.map(|a| C64::from_polar(1.0, -a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

    fn h() -> Mat2 {
        Mat2::from_real([
            [FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
            [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
        ])
    }

    #[test]
    fn tensor_basis_convention() {
        assert_eq!(
            tensor(&Mat2::identity(), &Mat2::identity()),
            Mat4::identity()
        );
        let zi = tensor(&sigma_z(), &Mat2::identity());
        assert_eq!(zi, Mat4::from_real_diag([1.0, 1.0, -1.0, -1.0]));
        let iz = tensor(&Mat2::identity(), &sigma_z());
        assert_eq!(iz, Mat4::from_real_diag([1.0, -1.0, 1.0, -1.0]));
    }

    #[test]
    fn h_tensor_h_entries_are_half() {
        let hh = tensor(&h(), &h());
        for x in hh.entries() {
            assert!((x.norm() - 0.5).abs() < ALGEBRA_TOL);
            assert!(x.im.abs() < ALGEBRA_TOL);
        }
        // (h⊗h)[r][c] = h[r1][c1] h[r2][c2]
        assert!((hh.get(0, 3).re - 0.5).abs() < ALGEBRA_TOL);
        assert!((hh.get(0, 1).re + 0.5).abs() < ALGEBRA_TOL);
        assert!((hh.get(3, 0).re - 0.5).abs() < ALGEBRA_TOL);
    }

    #[test]
    fn products_and_adjoints() {
        let u4 = Mat4::from_real_diag([1.0, -1.0, -1.0, 1.0]);
        assert_eq!(u4 * u4, Mat4::identity());
        let hh = tensor(&h(), &h());
        assert!((hh * hh.dagger()).approx_eq(&Mat4::identity(), ALGEBRA_TOL));
        assert!((hh.dagger() * hh).approx_eq(&Mat4::identity(), ALGEBRA_TOL));
        assert_eq!(hh * Mat4::identity(), hh);

        let d = Mat4::from_diag([I, -I, ONE, ONE]);
        assert_eq!(d.dagger(), Mat4::from_diag([-I, I, ONE, ONE]));
        assert_eq!(hh.dagger().dagger(), hh);
    }

    #[test]
    fn evolve_identity_and_diagonal() {
        let rho = Mat4::from_real_diag([1.0, 0.0, 0.0, 0.0]);
        assert_eq!(conjugate_evolve(&rho, &Mat4::identity()).unwrap(), rho);
        let u9 = Mat4::from_real_diag([1.0, -1.0, -1.0, -1.0]);
        assert_eq!(conjugate_evolve(&rho, &u9).unwrap(), rho);
    }

    #[test]
    fn evolve_fills_blocks_and_keeps_trace() {
        let (k1, k2) = (1.0, -1.0);
        let rho = Mat4::from_real_diag([k1, 0.0, 0.0, k2]);
        let hh = tensor(&h(), &h());
        let out = conjugate_evolve(&rho, &hh).unwrap();
        assert!((out.trace() - C64::new(k1 + k2, 0.0)).norm() < ALGEBRA_TOL);
        assert!(out.is_hermitian(ALGEBRA_TOL));
        // Every 2×2 diagonal block has a nonzero entry.
        for blk in [0, 2] {
            let mag: f64 = (0..2)
                .flat_map(|r| (0..2).map(move |c| (r, c)))
                .map(|(r, c)| out.get(blk + r, blk + c).norm())
                .sum();
            assert!(mag > 0.1);
        }
    }

    #[test]
    fn evolve_rejects_non_unitary() {
        let bad = Mat4::from_real_diag([1.0, 1.0, 1.0, 2.0]);
        let err = conjugate_evolve(&Mat4::identity(), &bad).unwrap_err();
        assert!(matches!(err, Error::NonUnitaryOperator { .. }));
    }

    #[test]
    fn global_phase_comparison() {
        let a = tensor(&h(), &sigma_y());
        assert_eq!(
            equal_up_to_global_phase(&a, &a, PROPAGATOR_TOL).unwrap(),
            Some(0.0)
        );

        let u9 = Mat4::from_real_diag([1.0, -1.0, -1.0, -1.0]);
        let phased = u9.scale(-C64::from_polar(1.0, FRAC_PI_4));
        let phi = equal_up_to_global_phase(&phased, &u9, PROPAGATOR_TOL)
            .unwrap()
            .unwrap();
        assert!((phi - 5.0 * FRAC_PI_4).abs() < 1e-12);

        let u4 = Mat4::from_real_diag([1.0, -1.0, -1.0, 1.0]);
        let u3 = Mat4::from_real_diag([1.0, -1.0, 1.0, -1.0]);
        assert_eq!(
            equal_up_to_global_phase(&u4, &u3, PROPAGATOR_TOL).unwrap(),
            None
        );

        assert!(matches!(
            equal_up_to_global_phase(&u4, &Mat4::zeros(), PROPAGATOR_TOL),
            Err(Error::DegenerateComparison)
        ));
    }

    #[test]
    fn rotation_generators() {
        // Ry(π/2) is the pseudo-Hadamard.
        assert!(transverse_rotation(FRAC_PI_2, FRAC_PI_2).approx_eq(&h(), ALGEBRA_TOL));
        // Rx(π) = -i σx
        assert!(transverse_rotation(PI, 0.0).approx_eq(&sigma_x().scale(-I), ALGEBRA_TOL));
        assert!(z_rotation(2.0 * PI).approx_eq(&Mat2::identity().scale(-ONE), ALGEBRA_TOL));
        assert!((normalize_angle(-FRAC_PI_2) - 3.0 * FRAC_PI_2).abs() < 1e-15);
    }
}
