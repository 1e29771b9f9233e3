use super::linalg::hermitian_eigen;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{creal, Real, C};

/// Validated density matrix: Hermitian, unit trace, positive semidefinite.
///
/// Dimensions 2 (victim), 4 (adversary pair) and 8 (full register) are accepted.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    mat: ComplexMatrix<T>,
}

pub const DENSITY_TOL: f64 = 1e-10;

impl<T: Real> DensityMatrix<T> {
    /// Validates `mat` against the density-matrix invariants at tolerance 1e-10.
    pub fn new(mat: ComplexMatrix<T>) -> Result<Self> {
        Self::with_tolerance(mat, T::tol(DENSITY_TOL))
    }

    pub fn with_tolerance(mat: ComplexMatrix<T>, tol: T) -> Result<Self> {
        let n = mat.rows();
        if !mat.is_square() || !matches!(n, 2 | 4 | 8) {
            return Err(Error::Dimension(format!(
                "density matrix must be 2x2, 4x4 or 8x8, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        let herm = mat.hermiticity_error();
        if !(herm <= tol) {
            return Err(Error::Validation(format!("density matrix not Hermitian (‖ρ−ρ†‖ = {herm:e})")));
        }
        let tr = mat.trace();
        if !((tr.re - T::one()).abs() <= tol && tr.im.abs() <= tol) {
            return Err(Error::Validation(format!("density matrix trace {tr} ≠ 1")));
        }
        let min = hermitian_eigen(&mat)?.min_value();
        if !(min >= -tol) {
            return Err(Error::Validation(format!("density matrix not PSD (min eigenvalue {min:e})")));
        }
        Ok(Self { mat })
    }

    /// Skips validation. For outputs of maps already known to be CPTP.
    pub(crate) fn new_unchecked(mat: ComplexMatrix<T>) -> Self {
        Self { mat }
    }

    /// `|ψ⟩⟨ψ|` for a normalized ket.
    pub fn pure(ket: &[C<T>]) -> Result<Self> {
        let nrm = ket.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        if (nrm - T::one()).abs() > T::tol(DENSITY_TOL) {
            return Err(Error::Validation(format!("ket norm² {nrm} ≠ 1")));
        }
        Self::new(ComplexMatrix::outer(ket, ket))
    }

    /// Computational basis projector `|index⟩⟨index|` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Range(format!("basis index {index} ≥ dimension {dim}")));
        }
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(index, index)] = creal(T::one());
        Self::new(m)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(ComplexMatrix::identity(dim).scale_real(T::one() / T::lit(dim as f64)))
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.mat
    }

    /// `Tr(ρ²)`
    pub fn purity(&self) -> T {
        self.mat.matmul(&self.mat).trace().re
    }

    /// `⟨k|ρ|k⟩`
    pub fn population(&self, k: usize) -> T {
        self.mat[(k, k)].re
    }

    /// `Tr(Oρ)` for an observable `O`.
    pub fn expectation(&self, obs: &ComplexMatrix<T>) -> T {
        obs.matmul(&self.mat).trace().re
    }

    /// `UρU†`, trusting `U` to be unitary.
    pub fn evolve_unitary(&self, u: &ComplexMatrix<T>) -> Self {
        Self::new_unchecked(self.mat.conjugate_by(u))
    }
}
