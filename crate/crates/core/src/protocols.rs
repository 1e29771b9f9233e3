//! Victim protocols (biased coin, XOR classifier, single-qubit quantum neural
//! network) and where the attack channel enters them.
//!
//! Victim gates are ideal and instantaneous. The attack is a separate channel
//! applied before the victim's gate (attacker-first) or after it, just before
//! measurement (victim-first).

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::qcore::gates::{hadamard, pauli_z, rx, ry, rz, v_full};
use crate::qcore::linalg::svd;
use crate::qcore::{ComplexMatrix, DensityMatrix};
use crate::scalar::{creal, Real};
use crate::tomo::QuantumChannel;

pub const DEFAULT_EPSILON: f64 = 1e-16;
pub const DEFAULT_DEGREE: usize = 2;
pub const DEFAULT_TEST_FRACTION: f64 = 0.3;
pub const DEFAULT_SPLIT_SEED: u64 = 42;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioTiming {
    AttackerFirst,
    VictimFirst,
    NoAttack,
}

impl ScenarioTiming {
    pub const ALL: [ScenarioTiming; 3] = [ScenarioTiming::AttackerFirst, ScenarioTiming::VictimFirst, ScenarioTiming::NoAttack];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioTiming::AttackerFirst => "attacker-first",
            ScenarioTiming::VictimFirst => "victim-first",
            ScenarioTiming::NoAttack => "no-attack",
        }
    }
}

impl fmt::Display for ScenarioTiming {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioTiming {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioTiming::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Validation(format!("timing must be attacker-first, victim-first or no-attack; got {s:?}")))
    }
}

/// Victim output state for gate `v` on `|0⟩` with the attack placed per `timing`.
/// A missing channel means no attack regardless of timing.
pub fn compose_scenario<T: Real>(
    timing: ScenarioTiming,
    v: &ComplexMatrix<T>,
    channel: Option<&QuantumChannel<T>>,
) -> Result<DensityMatrix<T>> {
    if v.rows() != 2 || v.cols() != 2 {
        return Err(Error::Dimension(format!("victim gate must be 2x2, got {}x{}", v.rows(), v.cols())));
    }
    let err = v.unitarity_error();
    if !(err <= T::tol(1e-10)) {
        return Err(Error::Validation(format!("victim gate not unitary (‖V†V − I‖ = {err:e})")));
    }
    let ground = DensityMatrix::<T>::basis(2, 0)?;
    Ok(match (timing, channel) {
        (ScenarioTiming::NoAttack, _) | (_, None) => ground.evolve_unitary(v),
        (ScenarioTiming::AttackerFirst, Some(e)) => e.apply(&ground).evolve_unitary(v),
        (ScenarioTiming::VictimFirst, Some(e)) => e.apply(&ground.evolve_unitary(v)),
    })
}

/// `P(1)` of the biased coin `V(λ) = exp(−iλY)`.
pub fn coin_flip_p1<T: Real>(lambda: T, timing: ScenarioTiming, channel: Option<&QuantumChannel<T>>) -> Result<T> {
    let rho = compose_scenario(timing, &v_full(lambda), channel)?;
    Ok(rho.population(1).max(T::zero()).min(T::one()))
}

/// `R_X((2x2−1)π/2)·R_Z((2x1−1)π/2)·H`
pub fn xor_unitary<T: Real>(x1: u8, x2: u8) -> Result<ComplexMatrix<T>> {
    if x1 > 1 || x2 > 1 {
        return Err(Error::Range(format!("XOR inputs must be bits, got ({x1}, {x2})")));
    }
    let half_pi = T::FRAC_PI_2();
    let sgn = |b: u8| if b == 1 { T::one() } else { -T::one() };
    Ok(rx(sgn(x2) * half_pi).matmul(&rz(sgn(x1) * half_pi)).matmul(&hadamard()))
}

/// `(P(0), P(1))` of the XOR circuit.
pub fn xor_probs<T: Real>(x1: u8, x2: u8, timing: ScenarioTiming, channel: Option<&QuantumChannel<T>>) -> Result<(T, T)> {
    let rho = compose_scenario(timing, &xor_unitary(x1, x2)?, channel)?;
    Ok((rho.population(0), rho.population(1)))
}

/// `Δ_max = |1 − min over inputs of max(P(0), P(1))|`
pub fn xor_delta_max<T: Real>(timing: ScenarioTiming, channel: Option<&QuantumChannel<T>>) -> Result<T> {
    let mut worst = T::infinity();
    for x1 in 0..2 {
        for x2 in 0..2 {
            let (p0, p1) = xor_probs(x1, x2, timing, channel)?;
            worst = worst.min(p0.max(p1));
        }
    }
    Ok((T::one() - worst).abs())
}

/// Least-squares angle-encoding classifier.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SqqnnModel<T> {
    /// Bias first, then `x_j^k` for `k = 1..=K` (outer) and `j` (inner).
    pub coefficients: Vec<T>,
    pub degree: usize,
    pub epsilon: T,
    pub feature_count: usize,
}

/// `[1, x_1, …, x_p, x_1², …, x_p², …]` up to degree `k`.
pub fn polynomial_features<T: Real>(x: &[T], k: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(1 + k * x.len());
    out.push(T::one());
    for d in 1..=k {
        out.extend(x.iter().map(|&v| v.powi(d as i32)));
    }
    out
}

/// Minimum-norm least-squares solution of `a·s = y` through the SVD.
fn lstsq_min_norm<T: Real>(rows: &[Vec<T>], y: &[T]) -> Vec<T> {
    let n = rows.len();
    let m = rows[0].len();
    let a = ComplexMatrix::from_vec(n, m, rows.iter().flatten().map(|&v| creal(v)).collect()).expect("rectangular design");
    let d = svd(&a);
    let smax = d.singular_values.first().copied().unwrap_or(T::zero());
    let cutoff = smax * T::epsilon() * T::lit(n.max(m) as f64);
    let mut s = vec![T::zero(); m];
    for (k, &sv) in d.singular_values.iter().enumerate() {
        if sv <= cutoff {
            continue;
        }
        let mut uty = T::zero();
        for i in 0..n {
            uty += d.u[(i, k)].re * y[i];
        }
        let w = uty / sv;
        for (j, sj) in s.iter_mut().enumerate() {
            *sj += d.v[(j, k)].re * w;
        }
    }
    s
}

/// Fits `S` so that `tanh(Sᵀx_poly) ≈ y`, through targets `arctanh(y·(1−ε))`.
pub fn sqqnn_train<T: Real>(features: &[Vec<T>], labels: &[T], degree: usize, epsilon: T) -> Result<SqqnnModel<T>> {
    if features.len() != labels.len() {
        return Err(Error::Dimension(format!("{} feature rows vs {} labels", features.len(), labels.len())));
    }
    if !(epsilon > T::zero() && epsilon <= T::lit(1e-8)) {
        return Err(Error::Validation(format!("epsilon {epsilon} outside (0, 1e-8]")));
    }
    if labels.iter().any(|&l| l != T::one() && l != -T::one()) {
        return Err(Error::Validation("labels must be -1 or +1".into()));
    }
    for (cls, name) in [(T::one(), "+1"), (-T::one(), "-1")] {
        if labels.iter().filter(|&&l| l == cls).count() < 2 {
            return Err(Error::Training(format!("class {name} has fewer than 2 samples")));
        }
    }
    let p = features[0].len();
    if p == 0 || features.iter().any(|r| r.len() != p) {
        return Err(Error::Dimension("feature rows must share one non-zero width".into()));
    }
    let rows: Vec<Vec<T>> = features.iter().map(|x| polynomial_features(x, degree)).collect();
    // (1 − ε) must stay below 1 in the working precision
    let shrink = T::one() - epsilon.max(T::epsilon() / T::lit(2.0));
    let targets: Vec<T> = labels.iter().map(|&y| (y * shrink).atanh()).collect();
    let coefficients = lstsq_min_norm(&rows, &targets);
    Ok(SqqnnModel {
        coefficients,
        degree,
        epsilon,
        feature_count: p,
    })
}

impl<T: Real> SqqnnModel<T> {
    /// `z = Sᵀx_poly`
    pub fn score(&self, x: &[T]) -> T {
        polynomial_features(x, self.degree)
            .iter()
            .zip(&self.coefficients)
            .fold(T::zero(), |acc, (&f, &s)| acc + f * s)
    }

    /// `sign(Tr σz ρ)` with `ρ` prepared by `R_y(arccos tanh z)`; zero maps to +1.
    pub fn predict(&self, x: &[T], timing: ScenarioTiming, channel: Option<&QuantumChannel<T>>) -> Result<T> {
        if x.len() != self.feature_count {
            return Err(Error::Dimension(format!("expected {} features, got {}", self.feature_count, x.len())));
        }
        let c = self.score(x).tanh().max(-T::one()).min(T::one());
        let beta = c.acos();
        let rho = compose_scenario(timing, &ry(beta), channel)?;
        let ez = rho.expectation(&pauli_z());
        Ok(if ez >= T::zero() { T::one() } else { -T::one() })
    }
}

/// Fraction of samples classified correctly.
pub fn sqqnn_accuracy<T: Real>(
    model: &SqqnnModel<T>,
    features: &[Vec<T>],
    labels: &[T],
    timing: ScenarioTiming,
    channel: Option<&QuantumChannel<T>>,
) -> Result<T> {
    if features.len() != labels.len() || labels.is_empty() {
        return Err(Error::Dimension(format!("{} feature rows vs {} labels", features.len(), labels.len())));
    }
    let mut correct = 0usize;
    for (x, &y) in features.iter().zip(labels) {
        if model.predict(x, timing, channel)? == y {
            correct += 1;
        }
    }
    Ok(T::lit(correct as f64) / T::lit(labels.len() as f64))
}

/// Shuffled train/test indices; the test part holds `round(n·test_fraction)` rows.
pub fn train_test_split(n: usize, test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(Error::Validation(format!("test fraction {test_fraction} outside [0, 1)")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha20Rng::seed_from_u64(seed));
    let n_test = (n as f64 * test_fraction).round() as usize;
    let test = idx[..n_test].to_vec();
    let train = idx[n_test..].to_vec();
    Ok((train, test))
}

/// Split a dataset with the given fraction and seed.
pub fn split_dataset<T: Real>(d: &Dataset<T>, test_fraction: f64, seed: u64) -> Result<(Dataset<T>, Dataset<T>)> {
    let (train, test) = train_test_split(d.len(), test_fraction, seed)?;
    Ok((d.subset(&train), d.subset(&test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::gates::pauli_x;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn bit_flip_half() -> QuantumChannel<f64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        QuantumChannel::from_kraus(&[ComplexMatrix::identity(2).scale_real(s), pauli_x::<f64>().scale_real(s)]).unwrap()
    }

    #[test]
    fn no_attack_hadamard() {
        let rho = compose_scenario(ScenarioTiming::NoAttack, &hadamard::<f64>(), None).unwrap();
        assert!(rho.matrix().approx_eq(&ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]), 1e-15));
    }

    #[test]
    fn bit_flip_gives_maximally_mixed() {
        let e = bit_flip_half();
        for t in [ScenarioTiming::AttackerFirst, ScenarioTiming::VictimFirst] {
            let rho = compose_scenario(t, &ComplexMatrix::identity(2), Some(&e)).unwrap();
            assert!(rho.matrix().approx_eq(&ComplexMatrix::identity(2).scale_real(0.5), 1e-15));
        }
    }

    #[test]
    fn coin_values() {
        assert!((coin_flip_p1(FRAC_PI_4, ScenarioTiming::NoAttack, None).unwrap() - 0.5).abs() < 1e-15);
        assert!(coin_flip_p1(0.0_f64, ScenarioTiming::NoAttack, None).unwrap().abs() < 1e-15);
        assert!((coin_flip_p1(FRAC_PI_2, ScenarioTiming::NoAttack, None).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn xor_truth_table_is_exact() {
        for x1 in 0..2u8 {
            for x2 in 0..2u8 {
                let (p0, p1) = xor_probs::<f64>(x1, x2, ScenarioTiming::NoAttack, None).unwrap();
                let want = x1 ^ x2;
                let (hit, miss) = if want == 0 { (p0, p1) } else { (p1, p0) };
                assert!((hit - 1.0).abs() < 1e-15 && miss.abs() < 1e-15, "({x1},{x2}) → {p0} {p1}");
            }
        }
        assert!(xor_probs::<f64>(2, 0, ScenarioTiming::NoAttack, None).is_err());
    }

    #[test]
    fn xor_delta_of_depolarizing_channel() {
        let h = 0.5;
        let dep = QuantumChannel::from_kraus(&[
            ComplexMatrix::identity(2).scale_real(h),
            pauli_x::<f64>().scale_real(h),
            crate::qcore::gates::pauli_y::<f64>().scale_real(h),
            pauli_z::<f64>().scale_real(h),
        ])
        .unwrap();
        for t in [ScenarioTiming::AttackerFirst, ScenarioTiming::VictimFirst] {
            assert!((xor_delta_max(t, Some(&dep)).unwrap() - 0.5).abs() < 1e-14);
        }
        assert!(xor_delta_max::<f64>(ScenarioTiming::NoAttack, None).unwrap() < 1e-15);
    }

    #[test]
    fn toy_classifier() {
        let x = vec![vec![-1.0], vec![-0.8], vec![0.9], vec![1.0]];
        let y = vec![-1.0, -1.0, 1.0, 1.0];
        let m = sqqnn_train(&x, &y, 1, 1e-16).unwrap();
        assert_eq!(m.coefficients.len(), 2);
        assert_eq!(sqqnn_accuracy(&m, &x, &y, ScenarioTiming::NoAttack, None).unwrap(), 1.0);
    }

    #[test]
    fn model_length_matches_feature_count() {
        let d = crate::dataset::iris_binary::<f64>();
        let m = sqqnn_train(&d.features, &d.labels, 3, 1e-16).unwrap();
        assert_eq!(m.coefficients.len(), 1 + 3 * 4);
    }

    #[test]
    fn training_needs_both_classes() {
        let x = vec![vec![1.0], vec![2.0], vec![3.0]];
        let y = vec![1.0, 1.0, -1.0];
        assert!(matches!(sqqnn_train(&x, &y, 1, 1e-16), Err(Error::Training(_))));
        assert!(matches!(sqqnn_train(&x, &[1.0, 1.0, 1.0], 1, 1e-16), Err(Error::Training(_))));
    }

    #[test]
    fn split_is_seeded_and_disjoint() {
        let (a, b) = train_test_split(100, 0.3, 42).unwrap();
        assert_eq!((a.len(), b.len()), (70, 30));
        let (a2, b2) = train_test_split(100, 0.3, 42).unwrap();
        assert_eq!((a.clone(), b.clone()), (a2, b2));
        let mut all: Vec<usize> = a.into_iter().chain(b).collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn timing_names_round_trip() {
        for t in ScenarioTiming::ALL {
            assert_eq!(t.name().parse::<ScenarioTiming>().unwrap(), t);
        }
    }
}
