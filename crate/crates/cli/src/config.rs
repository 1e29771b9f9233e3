//! Run configuration: one strict JSON document. Every block and field is
//! optional and falls back to the documented default; unknown keys are errors.

use serde::{Deserialize, Serialize};
use xtalk_core::analysis::{self, SweepTarget};
use xtalk_core::defense;
use xtalk_core::dynamics::{self, AttackConfig, AuxState, CouplingSpec, PauliPair};
use xtalk_core::protocols::{self, ScenarioTiming};
use xtalk_core::pulse::{self, PulseShape, PulseSpec};
use xtalk_core::{Attack, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub coupling: CouplingBlock,
    pub pulses: PulseBlocks,
    pub sim: SimBlock,
    pub protocol: ProtocolBlock,
    pub analysis: AnalysisBlock,
    pub defense: DefenseBlock,
    pub output: OutputBlock,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            coupling: CouplingBlock::default(),
            pulses: PulseBlocks::default(),
            sim: SimBlock::default(),
            protocol: ProtocolBlock::default(),
            analysis: AnalysisBlock::default(),
            defense: DefenseBlock::default(),
            output: OutputBlock::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingBlock {
    pub type_01: PauliPair,
    pub type_12: PauliPair,
    pub j01: f64,
    pub j12: f64,
}

impl Default for CouplingBlock {
    fn default() -> Self {
        Self {
            type_01: PauliPair::ZX,
            type_12: PauliPair::ZX,
            j01: analysis::DEFAULT_COUPLING_J,
            j12: analysis::DEFAULT_COUPLING_J,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseBlock {
    pub shape: PulseShape,
    pub amplitude: f64,
    pub detuning: f64,
    pub chirp_rate: f64,
    pub drag_alpha: f64,
    pub sigma: f64,
}

impl Default for PulseBlock {
    fn default() -> Self {
        Self {
            shape: PulseShape::Cosine,
            amplitude: analysis::DEFAULT_SCAN_AMPLITUDE,
            detuning: pulse::DEFAULT_DETUNING,
            chirp_rate: pulse::DEFAULT_CHIRP_RATE,
            drag_alpha: pulse::DEFAULT_DRAG_ALPHA,
            sigma: pulse::DEFAULT_SIGMA,
        }
    }
}

impl PulseBlock {
    fn spec(&self) -> PulseSpec<f64> {
        PulseSpec {
            shape: self.shape,
            amplitude: self.amplitude,
            detuning: self.detuning,
            chirp_rate: self.chirp_rate,
            drag_alpha: self.drag_alpha,
            sigma: self.sigma,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseBlocks {
    pub q0: PulseBlock,
    pub q1: PulseBlock,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimBlock {
    pub time_steps: usize,
    pub substeps: usize,
    pub aux_state: AuxState,
}

impl Default for SimBlock {
    fn default() -> Self {
        Self {
            time_steps: dynamics::DEFAULT_TIME_STEPS,
            substeps: dynamics::DEFAULT_SUBSTEPS,
            aux_state: AuxState::ZeroZero,
        }
    }
}

/// Inclusive degree grid `start, start+step, …, ≤ stop`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl DegreeGrid {
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Validation(format!("--lambda-grid expects start:stop:step in degrees, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let v: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
        let g = Self {
            start: v[0],
            stop: v[1],
            step: v[2],
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Validation("lambda grid needs finite bounds and a positive step".into()));
        }
        if self.stop < self.start {
            return Err(Error::Validation("lambda grid stop is below start".into()));
        }
        if (self.stop - self.start) / self.step > 100_000.0 {
            return Err(Error::Validation("lambda grid has more than 100000 points".into()));
        }
        Ok(())
    }

    pub fn degrees(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.start + self.step * k as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolBlock {
    pub lambda_grid_deg: DegreeGrid,
    pub timing: ScenarioTiming,
    /// CSV path; the bundled Iris subset when absent.
    pub dataset: Option<String>,
    pub sqqnn_degree: usize,
    pub sqqnn_epsilon: f64,
    pub test_fraction: f64,
    pub split_seed: u64,
    /// Amplitudes for the attacker-first accuracy grid over (A0, A1).
    pub accuracy_grid: Vec<f64>,
}

impl Default for ProtocolBlock {
    fn default() -> Self {
        Self {
            lambda_grid_deg: DegreeGrid {
                start: 0.0,
                stop: 90.0,
                step: 5.0,
            },
            timing: ScenarioTiming::AttackerFirst,
            dataset: None,
            sqqnn_degree: protocols::DEFAULT_DEGREE,
            sqqnn_epsilon: protocols::DEFAULT_EPSILON,
            test_fraction: protocols::DEFAULT_TEST_FRACTION,
            split_seed: protocols::DEFAULT_SPLIT_SEED,
            accuracy_grid: vec![0.2, 0.4, 0.6, 0.8, 1.0],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetuningGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl DetuningGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let n = (self.points - 1) as f64;
        (0..self.points).map(|k| self.start + (self.stop - self.start) * k as f64 / n).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisBlock {
    pub scan_couplings: Vec<PauliPair>,
    pub scan_shapes: Vec<PulseShape>,
    pub amplitude_grid: Vec<f64>,
    /// Both targets when absent.
    pub sweep_target: Option<SweepTarget>,
    pub detuning_grid: DetuningGrid,
    pub detuning_shapes: Vec<PulseShape>,
}

impl Default for AnalysisBlock {
    fn default() -> Self {
        Self {
            scan_couplings: vec![PauliPair::YX, PauliPair::ZX],
            scan_shapes: PulseShape::ALL.to_vec(),
            amplitude_grid: analysis::default_amplitude_grid(),
            sweep_target: None,
            detuning_grid: DetuningGrid {
                start: 0.0,
                stop: analysis::DETUNING_SPAN,
                points: analysis::DETUNING_POINTS,
            },
            detuning_shapes: PulseShape::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DefenseBlock {
    pub shots: usize,
    pub threshold: f64,
    pub seed: u64,
}

impl Default for DefenseBlock {
    fn default() -> Self {
        Self {
            shots: defense::DEFAULT_SHOTS,
            threshold: defense::DEFAULT_THRESHOLD,
            seed: defense::DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub directory: String,
    pub emit_svg: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            directory: "results".into(),
            emit_svg: true,
        }
    }
}

impl RunConfig {
    /// Parses a config document; errors carry serde's line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        // serde also accepts a positional array for a struct
        if !text.trim_start().starts_with('{') {
            return Err(Error::Validation("config: top level must be a JSON object".into()));
        }
        serde_json::from_str(text).map_err(|e| Error::Validation(format!("config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn attack(&self) -> Attack {
        let mut a = AttackConfig::new(
            CouplingSpec {
                pauli_01: self.coupling.type_01,
                pauli_12: self.coupling.type_12,
                j01: self.coupling.j01,
                j12: self.coupling.j12,
            },
            self.pulses.q0.spec(),
            self.pulses.q1.spec(),
        );
        a.aux_state = self.sim.aux_state;
        a.time_steps = self.sim.time_steps;
        a.substeps_per_step = self.sim.substeps;
        a
    }

    /// Checks every physical field before anything runs.
    pub fn validate(&self) -> Result<()> {
        self.attack().validate()?;
        self.protocol.lambda_grid_deg.validate()?;
        let p = &self.protocol;
        if !(p.sqqnn_epsilon > 0.0 && p.sqqnn_epsilon <= 1e-8) {
            return Err(Error::Validation(format!("protocol.sqqnn_epsilon {} outside (0, 1e-8]", p.sqqnn_epsilon)));
        }
        if p.sqqnn_degree == 0 {
            return Err(Error::Validation("protocol.sqqnn_degree must be ≥ 1".into()));
        }
        if !(p.test_fraction > 0.0 && p.test_fraction < 1.0) {
            return Err(Error::Validation(format!("protocol.test_fraction {} outside (0, 1)", p.test_fraction)));
        }
        check_amplitudes("protocol.accuracy_grid", &p.accuracy_grid)?;
        let a = &self.analysis;
        if a.scan_couplings.is_empty() || a.scan_shapes.is_empty() {
            return Err(Error::Validation("analysis.scan_couplings and scan_shapes must be non-empty".into()));
        }
        check_amplitudes("analysis.amplitude_grid", &a.amplitude_grid)?;
        if a.amplitude_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Validation("analysis.amplitude_grid must be strictly ascending".into()));
        }
        let d = &a.detuning_grid;
        if d.points < 2 || !d.start.is_finite() || !d.stop.is_finite() {
            return Err(Error::Validation("analysis.detuning_grid needs finite bounds and ≥ 2 points".into()));
        }
        if a.detuning_shapes.is_empty() {
            return Err(Error::Validation("analysis.detuning_shapes must be non-empty".into()));
        }
        let f = &self.defense;
        if f.shots < defense::MIN_SHOTS {
            return Err(Error::Validation(format!("defense.shots must be ≥ {}", defense::MIN_SHOTS)));
        }
        if !(f.threshold > 0.0 && f.threshold.is_finite()) {
            return Err(Error::Validation("defense.threshold must be positive".into()));
        }
        Ok(())
    }
}

fn check_amplitudes(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Validation(format!("{name} must be non-empty")));
    }
    if let Some(a) = v.iter().find(|a| !(**a >= 0.0 && **a <= pulse::A_MAX)) {
        return Err(Error::Validation(format!("{name}: amplitude {a} outside [0, {}]", pulse::A_MAX)));
    }
    Ok(())
}
