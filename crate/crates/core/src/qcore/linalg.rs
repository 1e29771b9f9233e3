//! Small dense decompositions: Hermitian eigensolver and SVD, both cyclic
//! Jacobi. Dimensions here never exceed 8 (eigen) or a few dozen rows (SVD),
//! where Jacobi is accurate to a few ulps and needs no pivoting logic.

use num_complex::Complex;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{creal, Real, C};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    /// Ascending.
    pub values: Vec<T>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// `V·diag(f(λ))·V†`
    pub fn reconstruct_with(&self, f: impl Fn(T) -> C<T>) -> ComplexMatrix<T> {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            for i in 0..n {
                let vik = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn min_value(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }
}

/// 2×2 unitary that diagonalizes the Hermitian block `[[app, apq], [conj(apq), aqq]]`.
/// Returns `(c, s, phase)` with the rotation acting on columns as
/// `col_p' = c·col_p − s·conj(phase)·col_q`, `col_q' = s·phase·col_p + c·col_q`.
fn jacobi_rotation<T: Real>(app: T, aqq: T, apq: C<T>) -> (T, T, C<T>) {
    let r = apq.norm();
    let phase = apq / r;
    let tau = (aqq - app) / (T::lit(2.0) * r);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    (c, t * c, phase)
}

fn rotate_columns<T: Real>(m: &mut ComplexMatrix<T>, p: usize, q: usize, c: T, s: T, phase: C<T>) {
    for k in 0..m.rows() {
        let mp = m[(k, p)];
        let mq = m[(k, q)];
        m[(k, p)] = mp * c - mq * phase.conj() * s;
        m[(k, q)] = mp * phase * s + mq * c;
    }
}

fn rotate_rows<T: Real>(m: &mut ComplexMatrix<T>, p: usize, q: usize, c: T, s: T, phase: C<T>) {
    // Applies J† from the left, J being the column rotation above.
    for k in 0..m.cols() {
        let mp = m[(p, k)];
        let mq = m[(q, k)];
        m[(p, k)] = mp * c - mq * phase * s;
        m[(q, k)] = mp * phase.conj() * s + mq * c;
    }
}

fn off_diagonal_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.rows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// The input is Hermitized first; callers validate hermiticity themselves when
/// it matters.
pub fn hermitian_eigen<T: Real>(h: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    if !h.is_square() {
        return Err(Error::Dimension(format!(
            "eigen-decomposition needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let target = T::epsilon() * T::lit(0.5) * scale;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm() <= T::min_positive_value() {
                    continue;
                }
                let (c, s, phase) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                rotate_columns(&mut a, p, q, c, s, phase);
                rotate_rows(&mut a, p, q, c, s, phase);
                a[(p, q)] = creal(T::zero());
                a[(q, p)] = creal(T::zero());
                a[(p, p)] = creal(a[(p, p)].re);
                a[(q, q)] = creal(a[(q, q)].re);
                rotate_columns(&mut v, p, q, c, s, phase);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    Ok(HermitianEigen { values, vectors })
}

/// Thin singular value decomposition `A = U·diag(S)·V†` of an `m×n` matrix.
/// `U` is `m×k`, `V` is `n×k` with `k = min(m, n)`; singular values descend.
/// When `m == n`, `U` is completed to a full unitary even for rank-deficient `A`.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    pub u: ComplexMatrix<T>,
    pub singular_values: Vec<T>,
    pub v: ComplexMatrix<T>,
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd<T: Real>(a: &ComplexMatrix<T>) -> Svd<T> {
    if a.rows() < a.cols() {
        let t = svd(&a.dagger());
        return Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        };
    }
    let (m, n) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = T::zero();
                let mut beta = T::zero();
                let mut gamma = creal(T::zero());
                for k in 0..m {
                    alpha += w[(k, p)].norm_sqr();
                    beta += w[(k, q)].norm_sqr();
                    gamma += w[(k, p)].conj() * w[(k, q)];
                }
                if gamma.norm() <= eps * (alpha * beta).sqrt() || gamma.norm() <= T::min_positive_value() {
                    continue;
                }
                rotated = true;
                let (c, s, phase) = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut w, p, q, c, s, phase);
                rotate_columns(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<T> = (0..n)
        .map(|j| (0..m).fold(T::zero(), |acc, k| acc + w[(k, j)].norm_sqr()).sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));

    let smax = norms.iter().copied().fold(T::zero(), T::max);
    let cutoff = smax * eps * T::lit((m.max(n) * 4) as f64);

    let mut u = ComplexMatrix::zeros(m, n);
    let mut vs = ComplexMatrix::zeros(n, n);
    let mut sv = Vec::with_capacity(n);
    let mut filled = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        vs.set_column(dst, &v.column(src));
        if s > cutoff {
            let col: Vec<C<T>> = w.column(src).into_iter().map(|z| z / s).collect();
            u.set_column(dst, &col);
            filled.push(true);
        } else {
            filled.push(false);
        }
        sv.push(s);
    }
    complete_orthonormal_columns(&mut u, &filled);
    Svd {
        u,
        singular_values: sv,
        v: vs,
    }
}

/// Fills the unflagged columns of `u` with unit vectors orthogonal to all
/// flagged ones (modified Gram–Schmidt against the standard basis).
fn complete_orthonormal_columns<T: Real>(u: &mut ComplexMatrix<T>, filled: &[bool]) {
    let m = u.rows();
    let mut basis: Vec<Vec<C<T>>> = filled
        .iter()
        .enumerate()
        .filter(|(_, &f)| f)
        .map(|(j, _)| u.column(j))
        .collect();
    let mut candidate = 0usize;
    for (j, &f) in filled.iter().enumerate() {
        if f {
            continue;
        }
        while candidate < m {
            let mut x = vec![creal(T::zero()); m];
            x[candidate] = creal(T::one());
            candidate += 1;
            for _ in 0..2 {
                for b in &basis {
                    let proj = b.iter().zip(&x).fold(creal(T::zero()), |acc, (bi, xi)| acc + bi.conj() * xi);
                    for (xi, bi) in x.iter_mut().zip(b) {
                        *xi -= bi * proj;
                    }
                }
            }
            let nrm = x.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
            if nrm > T::lit(1e-3) {
                let x: Vec<C<T>> = x.into_iter().map(|z| z / nrm).collect();
                u.set_column(j, &x);
                basis.push(x);
                break;
            }
        }
    }
}

/// `exp(−i·H·tau)` of a Hermitian `H` via its eigen-decomposition.
pub fn unitary_exp<T: Real>(eig: &HermitianEigen<T>, tau: T) -> ComplexMatrix<T> {
    eig.reconstruct_with(|lam| {
        let phi = -lam * tau;
        Complex::new(phi.cos(), phi.sin())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    fn sample_hermitian() -> ComplexMatrix<f64> {
        ComplexMatrix::from_rows(&[
            vec![cplx(2.0, 0.0), cplx(1.0, -1.0), cplx(0.0, 0.5)],
            vec![cplx(1.0, 1.0), cplx(-1.0, 0.0), cplx(0.3, 0.0)],
            vec![cplx(0.0, -0.5), cplx(0.3, 0.0), cplx(0.5, 0.0)],
        ])
    }

    #[test]
    fn eigen_reconstructs_input() {
        let h = sample_hermitian();
        let e = hermitian_eigen(&h).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        assert!(e.vectors.unitarity_error() < 1e-13);
        assert!(e.reconstruct_with(creal).approx_eq(&h, 1e-13));
    }

    #[test]
    fn eigen_of_degenerate_diagonal() {
        let h = ComplexMatrix::<f64>::diag(&[creal(1.0), creal(1.0), creal(-2.0)]);
        let e = hermitian_eigen(&h).unwrap();
        assert_eq!(e.values, vec![-2.0, 1.0, 1.0]);
    }

    #[test]
    fn svd_of_rank_deficient_square() {
        // rank 1
        let a = ComplexMatrix::<f64>::outer(&[cplx(1.0, 0.0), cplx(0.0, 1.0), cplx(2.0, 0.0)], &[
            cplx(1.0, 1.0),
            cplx(0.0, 0.0),
            cplx(1.0, 0.0),
        ]);
        let s = svd(&a);
        assert!(s.u.unitarity_error() < 1e-12);
        assert!(s.v.unitarity_error() < 1e-12);
        assert!(s.singular_values[1] < 1e-12);
        let sig = ComplexMatrix::diag(&s.singular_values.iter().map(|&x| creal(x)).collect::<Vec<_>>());
        assert!(s.u.matmul(&sig).matmul(&s.v.dagger()).approx_eq(&a, 1e-12));
    }

    #[test]
    fn svd_of_wide_matrix() {
        let a = ComplexMatrix::<f64>::from_rows(&[
            vec![cplx(1.0, 0.0), cplx(2.0, 1.0), cplx(0.0, 0.0)],
            vec![cplx(0.0, 1.0), cplx(1.0, 0.0), cplx(3.0, 0.0)],
        ]);
        let s = svd(&a);
        let sig = ComplexMatrix::diag(&s.singular_values.iter().map(|&x| creal(x)).collect::<Vec<_>>());
        assert!(s.u.matmul(&sig).matmul(&s.v.dagger()).approx_eq(&a, 1e-12));
    }
}
