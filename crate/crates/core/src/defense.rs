//! Two-tier mitigation: a shot-sampled canary coin at λ = π/4 checked with a
//! binomial z-test, and reset-based containment of an attack window.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocols::{coin_flip_p1, sqqnn_accuracy, ScenarioTiming, SqqnnModel};
use crate::scalar::Real;
use crate::tomo::QuantumChannel;

/// Recorded in every report so that shot streams can be regenerated.
pub const SHOT_GENERATOR: &str = "ChaCha20Rng (rand_chacha 0.3, seed_from_u64)";
pub const DEFAULT_THRESHOLD: f64 = 5.0;
pub const DEFAULT_SHOTS: usize = 10_000;
pub const DEFAULT_SEED: u64 = 1;
pub const CANARY_BASELINE: f64 = 0.5;
pub const MIN_SHOTS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetectionReport {
    pub p_exact: f64,
    pub p_hat: f64,
    pub baseline: f64,
    pub n_shots: usize,
    pub z_score: f64,
    pub flagged: bool,
    pub seed: u64,
    pub threshold: f64,
    pub generator: &'static str,
}

/// `|p̂ − b| / √(b(1−b)/n)`
pub fn z_score(p_hat: f64, baseline: f64, n_shots: usize) -> f64 {
    (p_hat - baseline).abs() / (baseline * (1.0 - baseline) / n_shots as f64).sqrt()
}

/// Number of ones in `n` Bernoulli(`p`) draws from the seeded generator.
pub fn sample_ones(p: f64, n: usize, seed: u64) -> usize {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..n).filter(|_| rng.gen::<f64>() < p).count()
}

/// Runs the λ = π/4 canary for `n_shots` shots and tests `p̂` against ½.
pub fn canary_check<T: Real>(
    n_shots: usize,
    seed: u64,
    threshold: f64,
    channel: Option<&QuantumChannel<T>>,
    timing: ScenarioTiming,
) -> Result<DetectionReport> {
    if n_shots < MIN_SHOTS {
        return Err(Error::Validation(format!("canary needs at least {MIN_SHOTS} shots, got {n_shots}")));
    }
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(Error::Validation(format!("threshold must be positive, got {threshold}")));
    }
    let p = coin_flip_p1(T::FRAC_PI_4(), timing, channel)?.to_f64_lossy();
    let ones = sample_ones(p, n_shots, seed);
    let p_hat = ones as f64 / n_shots as f64;
    let z = z_score(p_hat, CANARY_BASELINE, n_shots);
    Ok(DetectionReport {
        p_exact: p,
        p_hat,
        baseline: CANARY_BASELINE,
        n_shots,
        z_score: z,
        flagged: z > threshold,
        seed,
        threshold,
        generator: SHOT_GENERATOR,
    })
}

/// The protocol whose degradation containment is judged by.
pub enum ContainmentProbe<'a, T> {
    /// Worst `|p1 − sin²λ|` over the grid.
    Coin { lambdas: &'a [T] },
    /// Accuracy lost relative to the clean run.
    Sqqnn {
        model: &'a SqqnnModel<T>,
        features: &'a [Vec<T>],
        labels: &'a [T],
    },
}

impl<T> ContainmentProbe<'_, T> {
    pub fn name(&self) -> &'static str {
        match self {
            ContainmentProbe::Coin { .. } => "coin",
            ContainmentProbe::Sqqnn { .. } => "sqqnn",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContainmentReport<T> {
    pub protocol: &'static str,
    pub attacker_first_impact: T,
    pub post_reset_impact: T,
}

fn impact<T: Real>(probe: &ContainmentProbe<'_, T>, timing: ScenarioTiming, channel: &QuantumChannel<T>) -> Result<T> {
    match probe {
        ContainmentProbe::Coin { lambdas } => {
            if lambdas.is_empty() {
                return Err(Error::Validation("coin containment needs a non-empty λ grid".into()));
            }
            let mut worst = T::zero();
            for &l in *lambdas {
                let p = coin_flip_p1(l, timing, Some(channel))?;
                worst = worst.max((p - l.sin().powi(2)).abs());
            }
            Ok(worst)
        }
        ContainmentProbe::Sqqnn { model, features, labels } => {
            let clean = sqqnn_accuracy(model, features, labels, ScenarioTiming::NoAttack, None)?;
            let hit = sqqnn_accuracy(model, features, labels, timing, Some(channel))?;
            Ok(clean - hit)
        }
    }
}

/// Compares the attack's effect when it lands on the prepared victim state
/// with its effect after an ideal reset to `|0⟩⟨0|`. After the reset the
/// protocol runs clean and the attack can only follow the victim's gate.
pub fn containment_compare<T: Real>(channel: &QuantumChannel<T>, probe: &ContainmentProbe<'_, T>) -> Result<ContainmentReport<T>> {
    Ok(ContainmentReport {
        protocol: probe.name(),
        attacker_first_impact: impact(probe, ScenarioTiming::AttackerFirst, channel)?,
        post_reset_impact: impact(probe, ScenarioTiming::VictimFirst, channel)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_score_formula() {
        assert_eq!(z_score(0.5, 0.5, 100), 0.0);
        assert!((z_score(0.55, 0.5, 10_000) - 10.0).abs() < 1e-9);
    }

    #[test]
    fn no_attack_canary_is_quiet() {
        let r = canary_check::<f64>(10_000, 1, 5.0, None, ScenarioTiming::NoAttack).unwrap();
        assert!(!r.flagged);
        assert!((r.p_hat - 0.5).abs() <= 0.05);
        assert_eq!(r.generator, SHOT_GENERATOR);
        assert_eq!(r.flagged, r.z_score > r.threshold);
    }

    #[test]
    fn reproducible() {
        let a = canary_check::<f64>(5_000, 9, 5.0, None, ScenarioTiming::NoAttack).unwrap();
        let b = canary_check::<f64>(5_000, 9, 5.0, None, ScenarioTiming::NoAttack).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(canary_check::<f64>(10, 1, 5.0, None, ScenarioTiming::NoAttack).is_err());
        assert!(canary_check::<f64>(1000, 1, 0.0, None, ScenarioTiming::NoAttack).is_err());
    }

    #[test]
    fn identity_channel_has_no_impact() {
        let id = QuantumChannel::<f64>::identity();
        let grid: Vec<f64> = (0..=18).map(|k| (5.0 * k as f64).to_radians()).collect();
        let r = containment_compare(&id, &ContainmentProbe::Coin { lambdas: &grid }).unwrap();
        assert!(r.attacker_first_impact < 1e-15 && r.post_reset_impact < 1e-15);
    }
}
