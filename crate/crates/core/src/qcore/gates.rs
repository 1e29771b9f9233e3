//! Single-qubit operators and gates.
//!
//! Rotation conventions: `R_X`, `R_Y`, `R_Z` are half-angle
//! (`R_P(φ) = exp(−iφP/2)`); [`v_full`] is the full-angle `exp(−iλY)`
//! used to prepare the biased coin.

use super::matrix::ComplexMatrix;
use crate::scalar::{cplx, creal, Real, C};

pub fn identity<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::identity(2)
}

pub fn pauli_x<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::from_rows(&[vec![cplx(0.0, 0.0), cplx(0.0, -1.0)], vec![cplx(0.0, 1.0), cplx(0.0, 0.0)]])
}

pub fn pauli_z<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

/// The Pauli operator basis `{I, σx, σy, σz}`.
pub fn pauli_basis<T: Real>() -> [ComplexMatrix<T>; 4] {
    [identity(), pauli_x(), pauli_y(), pauli_z()]
}

pub fn hadamard<T: Real>() -> ComplexMatrix<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[&[s, s], &[s, -s]])
}

fn half_angle_rotation<T: Real>(axis: &ComplexMatrix<T>, phi: T) -> ComplexMatrix<T> {
    let h = phi / T::lit(2.0);
    let mut out = identity::<T>().scale_real(h.cos());
    out.add_scaled(axis, C::new(T::zero(), -h.sin()));
    out
}

/// `exp(−iφσx/2)`
pub fn rx<T: Real>(phi: T) -> ComplexMatrix<T> {
    half_angle_rotation(&pauli_x(), phi)
}

/// `exp(−iφσy/2)`
pub fn ry<T: Real>(phi: T) -> ComplexMatrix<T> {
    half_angle_rotation(&pauli_y(), phi)
}

/// `diag(e^{−iφ/2}, e^{iφ/2})`
pub fn rz<T: Real>(phi: T) -> ComplexMatrix<T> {
    let h = phi / T::lit(2.0);
    ComplexMatrix::diag(&[C::new(h.cos(), -h.sin()), C::new(h.cos(), h.sin())])
}

/// `exp(−iλY) = [[cos λ, −sin λ], [sin λ, cos λ]]`
pub fn v_full<T: Real>(lambda: T) -> ComplexMatrix<T> {
    let (s, c) = lambda.sin_cos();
    ComplexMatrix::from_rows(&[vec![creal(c), creal(-s)], vec![creal(s), creal(c)]])
}
