//! Campaigns over attack configurations: influence scan across coupling types
//! and pulse shapes, driver/catalyst amplitude sweeps, and detuning robustness.
//! Grid points run on the rayon pool; results come back in grid order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, victim_channel, AttackConfig, CouplingSpec, PauliPair};
use crate::error::{Error, Result};
use crate::fit::{fit_channel, FitResult};
use crate::pulse::{PulseShape, PulseSpec};
use crate::qcore::{partial_trace_keep_last, DensityMatrix};
use crate::scalar::Real;
use crate::tomo::{chi_from_choi, kraus_from_chi};

pub const DEFAULT_COUPLING_J: f64 = 0.5;
pub const DEFAULT_SCAN_AMPLITUDE: f64 = 0.5;
/// Amplitude held on the qubit that is not being swept.
pub const DEFAULT_FIXED_AMPLITUDE: f64 = 0.5;
pub const DETUNING_POINTS: usize = 21;
pub const DETUNING_SPAN: f64 = 4.0 * std::f64::consts::PI;

/// Cosine drive on both adversarial qubits with uniform coupling `pair`, strength `j`.
pub fn reference_attack<T: Real>(pair: PauliPair, j: T, a0: T, a1: T) -> AttackConfig<T> {
    AttackConfig::new(
        CouplingSpec::uniform(pair, j),
        PulseSpec::new(PulseShape::Cosine, a0),
        PulseSpec::new(PulseShape::Cosine, a1),
    )
}

/// `0.1, 0.2, …, 1.0`
pub fn default_amplitude_grid<T: Real>() -> Vec<T> {
    (1..=10).map(|k| T::lit(k as f64 / 10.0)).collect()
}

/// 21 evenly spaced detunings on `[0, 4π]`.
pub fn default_detuning_grid<T: Real>() -> Vec<T> {
    let n = DETUNING_POINTS - 1;
    (0..=n).map(|k| T::lit(DETUNING_SPAN * k as f64 / n as f64)).collect()
}

/// One row of a one-dimensional campaign.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord<T> {
    pub config_id: String,
    pub swept_name: String,
    pub swept_value: T,
    pub influence_norm: Option<T>,
    pub theta: Option<T>,
    pub loss: Option<T>,
    /// False when the winning fit start hit the round limit.
    pub converged: bool,
}

/// One row of the coupling × shape influence scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRecord<T> {
    pub coupling: PauliPair,
    pub shape: PulseShape,
    pub influence_norm: T,
}

impl<T: Real> ScanRecord<T> {
    pub fn config_id(&self) -> String {
        format!("{}-{}", self.coupling, self.shape)
    }
}

/// Computational-basis distribution of q2 after the attack window from `|000⟩`.
fn victim_distribution<T: Real>(cfg: &AttackConfig<T>) -> Result<(T, T)> {
    let rho0 = DensityMatrix::basis(8, 0)?;
    let red = partial_trace_keep_last(&evolve(cfg, &rho0)?)?;
    Ok((red.population(0), red.population(1)))
}

/// `‖p − p_baseline‖₂` over q2's outcome distribution, the baseline being
/// the same configuration with the q0 drive switched off.
pub fn influence_norm<T: Real>(cfg: &AttackConfig<T>) -> Result<T> {
    let mut base = *cfg;
    base.pulse_q0.amplitude = T::zero();
    let (p0, p1) = victim_distribution(cfg)?;
    let (b0, b1) = victim_distribution(&base)?;
    Ok(((p0 - b0).powi(2) + (p1 - b1).powi(2)).sqrt())
}

/// Influence of every (coupling, q0 shape) pair, strongest first.
/// Both links take the row's Pauli pair; the q1 reference drive comes from `base`.
pub fn coupling_scan<T: Real>(
    couplings: &[PauliPair],
    shapes: &[PulseShape],
    base: &AttackConfig<T>,
) -> Result<Vec<ScanRecord<T>>> {
    if couplings.is_empty() || shapes.is_empty() {
        return Err(Error::Validation("coupling scan needs at least one coupling and one shape".into()));
    }
    base.validate()?;
    let grid: Vec<(PauliPair, PulseShape)> =
        couplings.iter().flat_map(|&c| shapes.iter().map(move |&s| (c, s))).collect();
    let mut rows = grid
        .par_iter()
        .map(|&(coupling, shape)| {
            let mut cfg = *base;
            cfg.coupling.pauli_01 = coupling;
            cfg.coupling.pauli_12 = coupling;
            cfg.pulse_q0.shape = shape;
            Ok(ScanRecord {
                coupling,
                shape,
                influence_norm: influence_norm(&cfg)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        b.influence_norm
            .partial_cmp(&a.influence_norm)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.coupling.to_string().cmp(&b.coupling.to_string()))
            .then_with(|| a.shape.name().cmp(b.shape.name()))
    });
    Ok(rows)
}

/// Which adversarial qubit an amplitude sweep drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepTarget {
    /// q0, two links away from the victim.
    Catalyst,
    /// q1, the victim's neighbour.
    Driver,
}

impl SweepTarget {
    pub fn name(self) -> &'static str {
        match self {
            SweepTarget::Catalyst => "catalyst",
            SweepTarget::Driver => "driver",
        }
    }

    fn amplitude_name(self) -> &'static str {
        match self {
            SweepTarget::Catalyst => "A0",
            SweepTarget::Driver => "A1",
        }
    }
}

impl fmt::Display for SweepTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "catalyst" => Ok(SweepTarget::Catalyst),
            "driver" => Ok(SweepTarget::Driver),
            _ => Err(Error::Validation(format!("sweep target must be catalyst or driver; got {s:?}"))),
        }
    }
}

/// Attack channel → χ → Kraus → logical fit.
pub fn characterize<T: Real>(cfg: &AttackConfig<T>) -> Result<FitResult<T>> {
    let ch = victim_channel(cfg)?;
    let kraus = kraus_from_chi(&chi_from_choi(&ch))?;
    fit_channel(&kraus)
}

fn ensure_ascending<T: Real>(values: &[T], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Validation(format!("{what} grid is empty")));
    }
    if values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Validation(format!("{what} grid must be strictly ascending")));
    }
    Ok(())
}

fn fit_record<T: Real>(config_id: String, swept_name: &str, swept_value: T, fit: &FitResult<T>) -> SweepRecord<T> {
    SweepRecord {
        config_id,
        swept_name: swept_name.to_string(),
        swept_value,
        influence_norm: None,
        theta: Some(fit.theta),
        loss: Some(fit.loss),
        converged: fit.converged,
    }
}

/// Fits the attack channel at each amplitude of the chosen qubit.
pub fn amplitude_sweep<T: Real>(target: SweepTarget, values: &[T], base: &AttackConfig<T>) -> Result<Vec<SweepRecord<T>>> {
    ensure_ascending(values, "amplitude")?;
    base.validate()?;
    values
        .par_iter()
        .map(|&a| {
            let mut cfg = *base;
            match target {
                SweepTarget::Catalyst => cfg.pulse_q0.amplitude = a,
                SweepTarget::Driver => cfg.pulse_q1.amplitude = a,
            }
            cfg.validate()?;
            let fit = characterize(&cfg)?;
            Ok(fit_record(target.name().to_string(), target.amplitude_name(), a, &fit))
        })
        .collect()
}

/// Population variances of fitted θ and loss across a detuning grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetuningReport<T> {
    pub shape: PulseShape,
    pub var_theta: T,
    pub var_loss: T,
    pub records: Vec<SweepRecord<T>>,
}

pub fn population_variance<T: Real>(xs: &[T]) -> T {
    if xs.is_empty() {
        return T::zero();
    }
    let n = T::lit(xs.len() as f64);
    let mean = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    xs.iter().fold(T::zero(), |a, &x| a + (x - mean).powi(2)) / n
}

/// Sets `shape` and each detuning on both pulses, then fits.
pub fn detuning_variance<T: Real>(shape: PulseShape, deltas: &[T], base: &AttackConfig<T>) -> Result<DetuningReport<T>> {
    if deltas.len() < 2 {
        return Err(Error::Validation("detuning study needs at least two values".into()));
    }
    base.validate()?;
    let records = deltas
        .par_iter()
        .map(|&d| {
            let mut cfg = *base;
            cfg.pulse_q0 = cfg.pulse_q0.with_shape(shape).with_detuning(d);
            cfg.pulse_q1 = cfg.pulse_q1.with_shape(shape).with_detuning(d);
            let fit = characterize(&cfg)?;
            Ok(fit_record(shape.name().to_string(), "detuning", d, &fit))
        })
        .collect::<Result<Vec<_>>>()?;
    let thetas: Vec<T> = records.iter().filter_map(|r| r.theta).collect();
    let losses: Vec<T> = records.iter().filter_map(|r| r.loss).collect();
    Ok(DetuningReport {
        shape,
        var_theta: population_variance(&thetas),
        var_loss: population_variance(&losses),
        records,
    })
}

/// `max − min` of the fitted θ column.
pub fn theta_range<T: Real>(records: &[SweepRecord<T>]) -> T {
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for th in records.iter().filter_map(|r| r.theta) {
        lo = lo.min(th);
        hi = hi.max(th);
    }
    if hi < lo {
        T::zero()
    } else {
        hi - lo
    }
}
