#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xtalk_core::qcore::{expm_hermitian, ComplexMatrix, DensityMatrix};
use xtalk_core::scalar::cplx;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(r: &mut impl Rng, n: usize, m: usize) -> ComplexMatrix<f64> {
    let data = (0..n * m).map(|_| cplx(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
    ComplexMatrix::from_vec(n, m, data).unwrap()
}

pub fn random_hermitian(r: &mut impl Rng, n: usize) -> ComplexMatrix<f64> {
    random_matrix(r, n, n).hermitian_part()
}

/// `exp(−i·H·π)` for a random Hermitian `H`.
pub fn random_unitary(r: &mut impl Rng, n: usize) -> ComplexMatrix<f64> {
    expm_hermitian(&random_hermitian(r, n).scale_real(2.0), std::f64::consts::PI).unwrap()
}

/// `A·A† / Tr(A·A†)`
pub fn random_density(r: &mut impl Rng, n: usize) -> DensityMatrix<f64> {
    let a = random_matrix(r, n, n);
    let p = a.matmul(&a.dagger());
    let tr = p.trace().re;
    DensityMatrix::new(p.scale_real(1.0 / tr)).unwrap()
}

/// Reads `name` from the golden directory, or writes `values` there when
/// `XTALK_BLESS` is set. Returns the frozen values.
pub fn golden(name: &str, values: &[f64]) -> Vec<f64> {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("XTALK_BLESS").is_some() {
        let body: String = values.iter().map(|v| format!("{v:.17e}\n")).collect();
        std::fs::write(&path, body).unwrap();
    }
    std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("golden file {}: {e}", path.display()))
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.trim().parse().unwrap())
        .collect()
}

pub fn assert_close(got: &[f64], want: &[f64], tol: f64) {
    assert_eq!(got.len(), want.len());
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        assert!((g - w).abs() <= tol, "entry {i}: got {g:e}, want {w:e}");
    }
}
