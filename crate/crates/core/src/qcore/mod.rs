//! Dense complex linear algebra and quantum primitives.
//!
//! Register ordering is `q0 ⊗ q1 ⊗ q2` everywhere, so the basis index of
//! `|b0 b1 b2⟩` is `4·b0 + 2·b1 + b2` and the victim qubit is the last factor.

mod density;
pub mod gates;
pub mod linalg;
mod matrix;

pub use density::{DensityMatrix, DENSITY_TOL};
pub use matrix::ComplexMatrix;

use crate::error::{Error, Result};
use crate::scalar::{creal, Real};

/// Kronecker product `a ⊗ b`.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (m, n) = (a.rows(), a.cols());
    let (p, q) = (b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(m * p, n * q);
    for i in 0..m {
        for j in 0..n {
            let aij = a[(i, j)];
            for k in 0..p {
                for l in 0..q {
                    out[(i * p + k, j * q + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence of factors, left to right.
pub fn kron_all<T: Real>(factors: &[&ComplexMatrix<T>]) -> ComplexMatrix<T> {
    factors
        .iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// Traces out the leading `dim/2`-dimensional factor, keeping the last qubit.
pub(crate) fn trace_keep_last_qubit<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let aux = m.rows() / 2;
    let mut out = ComplexMatrix::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = creal(T::zero());
            for a in 0..aux {
                acc += m[(2 * a + i, 2 * a + j)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// `ρ_{q2} = Tr_{q0,q1}[ρ]` for a 3-qubit register.
pub fn partial_trace_keep_last<T: Real>(rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    if rho.dim() != 8 {
        return Err(Error::Dimension(format!(
            "partial trace expects an 8x8 register state, got {}x{}",
            rho.dim(),
            rho.dim()
        )));
    }
    Ok(DensityMatrix::new_unchecked(trace_keep_last_qubit(rho.matrix())))
}

/// `exp(−i·h·tau)` for Hermitian `h`, through its eigen-decomposition.
pub fn expm_hermitian<T: Real>(h: &ComplexMatrix<T>, tau: T) -> Result<ComplexMatrix<T>> {
    if !h.is_square() {
        return Err(Error::Dimension(format!("expm of a {}x{} matrix", h.rows(), h.cols())));
    }
    let err = h.hermiticity_error();
    let scale = T::one().max(h.max_abs());
    if !(err <= T::tol(1e-10) * scale) {
        return Err(Error::Validation(format!("expm_hermitian: input not Hermitian (‖H−H†‖ = {err:e})")));
    }
    let eig = linalg::hermitian_eigen(h)?;
    Ok(linalg::unitary_exp(&eig, tau))
}
