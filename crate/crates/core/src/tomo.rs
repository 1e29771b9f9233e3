//! Single-qubit process tomography: Choi reconstruction from four probe
//! states, χ-matrix in the Pauli basis, and Kraus extraction.
//!
//! The Choi matrix is canonical and stored in the input ⊗ output convention
//! `C = Σ_{m,n} |m⟩⟨n| ⊗ E(|m⟩⟨n|)`, so `C[(2m+i, 2n+j)] = E(|m⟩⟨n|)[i, j]`.

use crate::error::{Error, Result};
use crate::qcore::gates::pauli_basis;
use crate::qcore::linalg::hermitian_eigen;
use crate::qcore::{ComplexMatrix, DensityMatrix};
use crate::scalar::{cplx, creal, Real, C};

/// Eigenvalues this far below zero are numerical noise and get clipped.
pub const CLIP_TOL: f64 = 1e-9;
/// Trace-preservation deficit beyond which reconstruction is refused.
pub const TP_REFUSE_TOL: f64 = 1e-6;
/// χ eigenvalues below `-NONPHYSICAL_TOL` make Kraus extraction fail.
pub const NONPHYSICAL_TOL: f64 = 1e-6;
/// χ eigenvalues at or below this are dropped from the Kraus set.
pub const KRAUS_DROP_TOL: f64 = 1e-10;

pub const KRAUS_COUNT: usize = 4;

/// A CPTP map on one qubit, held as its Choi matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumChannel<T> {
    choi: ComplexMatrix<T>,
    clip_magnitude: T,
}

impl<T: Real> QuantumChannel<T> {
    /// Validates a Choi matrix: Hermitizes, clips eigenvalues in
    /// `[−1e-9, 0)` to zero and restores trace preservation.
    pub fn from_choi(choi: ComplexMatrix<T>) -> Result<Self> {
        if choi.rows() != 4 || choi.cols() != 4 {
            return Err(Error::Dimension(format!("qubit Choi matrix must be 4x4, got {}x{}", choi.rows(), choi.cols())));
        }
        let mut c = choi.hermitian_part();
        let eig = hermitian_eigen(&c)?;
        let min = eig.min_value();
        let clip_tol = T::tol(CLIP_TOL);
        if min < -clip_tol {
            return Err(Error::NonPhysical { eigenvalue: min.to_f64_lossy() });
        }
        let mut clip = T::zero();
        if min < T::zero() {
            clip = -min;
            c = eig.reconstruct_with(|l| creal(l.max(T::zero())));
        }

        let p = output_trace(&c);
        let deviation = p.distance(&ComplexMatrix::identity(2));
        if clip > T::zero() || deviation > T::tol(1e-12) {
            let inv_sqrt = hermitian_eigen(&p)?.reconstruct_with(|l| creal(T::one() / l.sqrt()));
            let a = crate::qcore::kron(&inv_sqrt, &ComplexMatrix::identity(2));
            c = a.matmul(&c).matmul(&a).hermitian_part();
        }
        Ok(Self {
            choi: c,
            clip_magnitude: clip,
        })
    }

    pub fn identity() -> Self {
        Self::from_unitary(&ComplexMatrix::identity(2))
    }

    /// `ρ ↦ UρU†`
    pub fn from_unitary(u: &ComplexMatrix<T>) -> Self {
        Self::from_kraus_unchecked(std::slice::from_ref(u))
    }

    pub fn from_kraus(ops: &[ComplexMatrix<T>]) -> Result<Self> {
        if ops.iter().any(|k| k.rows() != 2 || k.cols() != 2) {
            return Err(Error::Dimension("Kraus operators must be 2x2".into()));
        }
        let err = completeness_error(ops);
        if err > T::tol(1e-8) {
            return Err(Error::Validation(format!("Kraus set not complete (‖ΣK†K − I‖ = {err:e})")));
        }
        Ok(Self::from_kraus_unchecked(ops))
    }

    fn from_kraus_unchecked(ops: &[ComplexMatrix<T>]) -> Self {
        let mut c = ComplexMatrix::zeros(4, 4);
        for m in 0..2 {
            for n in 0..2 {
                let mut e = ComplexMatrix::zeros(2, 2);
                e[(m, n)] = creal(T::one());
                let out = apply_kraus(ops, &e);
                write_block(&mut c, m, n, &out);
            }
        }
        Self {
            choi: c,
            clip_magnitude: T::zero(),
        }
    }

    pub fn choi(&self) -> &ComplexMatrix<T> {
        &self.choi
    }

    /// Largest negative eigenvalue magnitude removed while validating.
    pub fn clip_magnitude(&self) -> T {
        self.clip_magnitude
    }

    /// `‖Tr_out C − I‖_F`
    pub fn trace_preservation_error(&self) -> T {
        output_trace(&self.choi).distance(&ComplexMatrix::identity(2))
    }

    /// `E(X)` for any 2×2 operator, by linearity.
    pub fn apply_matrix(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let mut out = ComplexMatrix::zeros(2, 2);
        for m in 0..2 {
            for n in 0..2 {
                let w = x[(m, n)];
                for i in 0..2 {
                    for j in 0..2 {
                        out[(i, j)] += w * self.choi[(2 * m + i, 2 * n + j)];
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, rho: &DensityMatrix<T>) -> DensityMatrix<T> {
        DensityMatrix::new_unchecked(self.apply_matrix(rho.matrix()))
    }

    /// Sequential composition: `self` first, then `next`.
    pub fn then(&self, next: &Self) -> Self {
        let mut c = ComplexMatrix::zeros(4, 4);
        for m in 0..2 {
            for n in 0..2 {
                let mut e = ComplexMatrix::zeros(2, 2);
                e[(m, n)] = creal(T::one());
                let out = next.apply_matrix(&self.apply_matrix(&e));
                write_block(&mut c, m, n, &out);
            }
        }
        Self {
            choi: c,
            clip_magnitude: self.clip_magnitude.max(next.clip_magnitude),
        }
    }
}

fn write_block<T: Real>(c: &mut ComplexMatrix<T>, m: usize, n: usize, block: &ComplexMatrix<T>) {
    for i in 0..2 {
        for j in 0..2 {
            c[(2 * m + i, 2 * n + j)] = block[(i, j)];
        }
    }
}

/// Partial trace of a Choi matrix over its output factor.
fn output_trace<T: Real>(c: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let mut p = ComplexMatrix::zeros(2, 2);
    for m in 0..2 {
        for n in 0..2 {
            p[(m, n)] = c[(2 * m, 2 * n)] + c[(2 * m + 1, 2 * n + 1)];
        }
    }
    p
}

fn apply_kraus<T: Real>(ops: &[ComplexMatrix<T>], x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let mut out = ComplexMatrix::zeros(2, 2);
    for k in ops {
        out = &out + &k.matmul(x).matmul(&k.dagger());
    }
    out
}

/// `‖Σ K†K − I‖_F`
pub fn completeness_error<T: Real>(ops: &[ComplexMatrix<T>]) -> T {
    let mut s = ComplexMatrix::zeros(2, 2);
    for k in ops {
        s = &s + &k.dagger().matmul(k);
    }
    s.distance(&ComplexMatrix::identity(2))
}

/// Probe states `|0⟩⟨0|, |1⟩⟨1|, |+⟩⟨+|, |+i⟩⟨+i|`, in that order.
pub fn qpt_inputs<T: Real>() -> [DensityMatrix<T>; 4] {
    let h = 0.5;
    [
        DensityMatrix::new_unchecked(ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]])),
        DensityMatrix::new_unchecked(ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]])),
        DensityMatrix::new_unchecked(ComplexMatrix::from_real_rows(&[&[h, h], &[h, h]])),
        DensityMatrix::new_unchecked(ComplexMatrix::from_rows(&[
            vec![cplx(h, 0.0), cplx(0.0, -h)],
            vec![cplx(0.0, h), cplx(h, 0.0)],
        ])),
    ]
}

/// Rebuilds a channel from its action on the four probe states.
///
/// The off-diagonal Choi blocks follow by linearity:
/// `E(|0⟩⟨1|) = E(ρ₊) + i·E(ρ₊ᵢ) − (1+i)/2·(E(ρ₀) + E(ρ₁))` and
/// `E(|1⟩⟨0|) = E(|0⟩⟨1|)†`.
pub fn reconstruct_channel<T, F>(apply: F) -> Result<QuantumChannel<T>>
where
    T: Real,
    F: Fn(&DensityMatrix<T>) -> Result<DensityMatrix<T>>,
{
    let inputs = qpt_inputs::<T>();
    let mut outs = Vec::with_capacity(4);
    for rho in &inputs {
        let out = apply(rho)?;
        if out.dim() != 2 {
            return Err(Error::Dimension(format!("channel output must be 2x2, got {}", out.dim())));
        }
        outs.push(out.into_matrix());
    }
    let [e0, e1, ep, ei] = [&outs[0], &outs[1], &outs[2], &outs[3]];
    let mut e01 = ep.clone();
    e01.add_scaled(ei, cplx(0.0, 1.0));
    e01.add_scaled(e0, cplx(-0.5, -0.5));
    e01.add_scaled(e1, cplx(-0.5, -0.5));
    let e10 = e01.dagger();

    let mut c = ComplexMatrix::zeros(4, 4);
    write_block(&mut c, 0, 0, e0);
    write_block(&mut c, 0, 1, &e01);
    write_block(&mut c, 1, 0, &e10);
    write_block(&mut c, 1, 1, e1);

    let deficit = output_trace(&c).distance(&ComplexMatrix::identity(2));
    if !(deficit <= T::tol(TP_REFUSE_TOL)) {
        return Err(Error::Reconstruction {
            deficit: deficit.to_f64_lossy(),
        });
    }
    QuantumChannel::from_choi(c)
}

/// Process matrix in the Pauli basis `{I, σx, σy, σz}`, normalized so that
/// `Tr χ = 1` for trace-preserving maps.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiMatrix<T> {
    chi: ComplexMatrix<T>,
}

impl<T: Real> ChiMatrix<T> {
    pub fn new(chi: ComplexMatrix<T>) -> Result<Self> {
        if chi.rows() != 4 || chi.cols() != 4 {
            return Err(Error::Dimension(format!("χ must be 4x4, got {}x{}", chi.rows(), chi.cols())));
        }
        Ok(Self { chi })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.chi
    }

    /// `Σ χ_mn E_m ρ E_n†`
    pub fn apply_matrix(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let basis = pauli_basis::<T>();
        let mut out = ComplexMatrix::zeros(2, 2);
        for (m, em) in basis.iter().enumerate() {
            let left = em.matmul(rho);
            for (n, en) in basis.iter().enumerate() {
                let w = self.chi[(m, n)];
                if w.norm() == T::zero() {
                    continue;
                }
                out.add_scaled(&left.matmul(&en.dagger()), w);
            }
        }
        out
    }
}

/// `|E⟩⟩ = Σ_k |k⟩ ⊗ E|k⟩`, matching the Choi index layout.
fn vectorize_operator<T: Real>(e: &ComplexMatrix<T>) -> Vec<C<T>> {
    let mut v = Vec::with_capacity(4);
    for k in 0..2 {
        for i in 0..2 {
            v.push(e[(i, k)]);
        }
    }
    v
}

/// Projects the Choi matrix onto the vectorized Pauli basis:
/// `χ_mn = ⟨⟨E_m| C |E_n⟩⟩ / 4`, then Hermitizes.
pub fn chi_from_choi<T: Real>(ch: &QuantumChannel<T>) -> ChiMatrix<T> {
    let basis: Vec<Vec<C<T>>> = pauli_basis::<T>().iter().map(vectorize_operator).collect();
    let c = ch.choi();
    let quarter = T::lit(0.25);
    let mut chi = ComplexMatrix::zeros(4, 4);
    for m in 0..4 {
        for n in 0..4 {
            let cv = c.matvec(&basis[n]);
            let z = basis[m]
                .iter()
                .zip(&cv)
                .fold(creal(T::zero()), |acc, (a, b)| acc + a.conj() * b);
            chi[(m, n)] = z * quarter;
        }
    }
    ChiMatrix { chi: chi.hermitian_part() }
}

/// Exactly four 2×2 Kraus operators (zero-padded), ordered by descending weight.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet<T> {
    ops: Vec<ComplexMatrix<T>>,
}

impl<T: Real> KrausSet<T> {
    /// Accepts up to four 2×2 operators and zero-pads to four. Completeness
    /// is not checked here; see [`KrausSet::completeness_error`].
    pub fn new(mut ops: Vec<ComplexMatrix<T>>) -> Result<Self> {
        if ops.len() > KRAUS_COUNT {
            return Err(Error::Dimension(format!("at most {KRAUS_COUNT} Kraus operators, got {}", ops.len())));
        }
        if ops.iter().any(|k| k.rows() != 2 || k.cols() != 2) {
            return Err(Error::Dimension("Kraus operators must be 2x2".into()));
        }
        ops.resize(KRAUS_COUNT, ComplexMatrix::zeros(2, 2));
        Ok(Self { ops })
    }

    pub fn ops(&self) -> &[ComplexMatrix<T>] {
        &self.ops
    }

    pub fn completeness_error(&self) -> T {
        completeness_error(&self.ops)
    }

    pub fn apply_matrix(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        apply_kraus(&self.ops, rho)
    }

    pub fn apply(&self, rho: &DensityMatrix<T>) -> DensityMatrix<T> {
        DensityMatrix::new_unchecked(self.apply_matrix(rho.matrix()))
    }

    pub fn to_channel(&self) -> Result<QuantumChannel<T>> {
        QuantumChannel::from_kraus(&self.ops)
    }

    /// `Σ_i U_ji K_i` for each `j`: the gauge-equivalent set under mixing matrix `u`.
    pub fn remix(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        if u.rows() != KRAUS_COUNT || u.cols() != KRAUS_COUNT {
            return Err(Error::Dimension("isometry must be 4x4".into()));
        }
        let ops = (0..KRAUS_COUNT)
            .map(|j| {
                let mut k = ComplexMatrix::zeros(2, 2);
                for (i, op) in self.ops.iter().enumerate() {
                    k.add_scaled(op, u[(j, i)]);
                }
                k
            })
            .collect();
        Ok(Self { ops })
    }
}

/// Kraus operators `K_j = √λ_j · Σ_m v_j[m]·E_m` from the eigen-decomposition of χ.
pub fn kraus_from_chi<T: Real>(x: &ChiMatrix<T>) -> Result<KrausSet<T>> {
    let eig = hermitian_eigen(x.matrix())?;
    let min = eig.min_value();
    if min < -T::tol(NONPHYSICAL_TOL) {
        return Err(Error::NonPhysical { eigenvalue: min.to_f64_lossy() });
    }
    let basis = pauli_basis::<T>();
    let drop = T::tol(KRAUS_DROP_TOL);
    let mut ops = Vec::with_capacity(KRAUS_COUNT);
    for k in (0..eig.values.len()).rev() {
        let lam = eig.values[k];
        if lam <= drop {
            continue;
        }
        let w = lam.sqrt();
        let mut op = ComplexMatrix::zeros(2, 2);
        for (m, e) in basis.iter().enumerate() {
            op.add_scaled(e, eig.vectors[(m, k)] * w);
        }
        ops.push(op);
    }
    KrausSet::new(ops)
}

/// Literal linear-inversion estimate
/// `χ_mn = ½ Σ_i Tr(E_m ρ⁽ⁱ⁾)·Tr(E_n† ρ′⁽ⁱ⁾)` over the four probe states.
///
/// Kept for comparison only: the probes are not orthonormal, so this does
/// not reproduce χ (it gives 2 at (0,0) for the identity map).
pub fn chi_linear_inversion_diagnostic<T, F>(apply: F) -> Result<ComplexMatrix<T>>
where
    T: Real,
    F: Fn(&DensityMatrix<T>) -> Result<DensityMatrix<T>>,
{
    let basis = pauli_basis::<T>();
    let mut chi = ComplexMatrix::zeros(4, 4);
    for rho in qpt_inputs::<T>() {
        let out = apply(&rho)?;
        for (m, em) in basis.iter().enumerate() {
            let a = em.matmul(rho.matrix()).trace();
            for (n, en) in basis.iter().enumerate() {
                let b = en.dagger().matmul(out.matrix()).trace();
                chi[(m, n)] += a * b * T::lit(0.5);
            }
        }
    }
    Ok(chi)
}
