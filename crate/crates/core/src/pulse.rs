//! Adversarial drive envelopes on the normalized interval `t ∈ [0, 1]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest drive amplitude accepted by [`PulseSpec::validate`].
pub const A_MAX: f64 = 1.0;

pub const DEFAULT_DETUNING: f64 = 5.0;
pub const DEFAULT_CHIRP_RATE: f64 = 10.0;
pub const DEFAULT_DRAG_ALPHA: f64 = 0.5;
pub const DEFAULT_SIGMA: f64 = 0.15;

const SQUARE_ON: f64 = 0.3;
const SQUARE_OFF: f64 = 0.7;
const CENTER: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseShape {
    Cosine,
    Gaussian,
    Square,
    Chirp,
    Drag,
}

impl PulseShape {
    pub const ALL: [PulseShape; 5] = [
        PulseShape::Cosine,
        PulseShape::Gaussian,
        PulseShape::Square,
        PulseShape::Chirp,
        PulseShape::Drag,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PulseShape::Cosine => "cosine",
            PulseShape::Gaussian => "gaussian",
            PulseShape::Square => "square",
            PulseShape::Chirp => "chirp",
            PulseShape::Drag => "drag",
        }
    }

    fn needs_width(self) -> bool {
        matches!(self, PulseShape::Gaussian | PulseShape::Drag)
    }
}

impl fmt::Display for PulseShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PulseShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PulseShape::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Validation(format!("unknown pulse shape {s:?}")))
    }
}

/// Drive pulse on one adversarial qubit. Amplitude and detuning are angular
/// frequencies in units where ħ = 1 and the attack window has length 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseSpec<T> {
    pub shape: PulseShape,
    pub amplitude: T,
    pub detuning: T,
    pub chirp_rate: T,
    pub drag_alpha: T,
    pub sigma: T,
}

impl<T: Real> PulseSpec<T> {
    /// A pulse with the default control parameters.
    pub fn new(shape: PulseShape, amplitude: T) -> Self {
        Self {
            shape,
            amplitude,
            detuning: T::lit(DEFAULT_DETUNING),
            chirp_rate: T::lit(DEFAULT_CHIRP_RATE),
            drag_alpha: T::lit(DEFAULT_DRAG_ALPHA),
            sigma: T::lit(DEFAULT_SIGMA),
        }
    }

    pub fn with_amplitude(mut self, amplitude: T) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn with_detuning(mut self, detuning: T) -> Self {
        self.detuning = detuning;
        self
    }

    pub fn with_shape(mut self, shape: PulseShape) -> Self {
        self.shape = shape;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.amplitude;
        if !(a >= T::zero() && a <= T::lit(A_MAX)) {
            return Err(Error::Validation(format!("pulse amplitude {a} outside [0, {A_MAX}]")));
        }
        for (name, v) in [
            ("detuning", self.detuning),
            ("chirp_rate", self.chirp_rate),
            ("drag_alpha", self.drag_alpha),
            ("sigma", self.sigma),
        ] {
            if !v.is_finite() {
                return Err(Error::Validation(format!("pulse {name} is not finite")));
            }
        }
        if self.shape.needs_width() && !(self.sigma > T::zero()) {
            return Err(Error::Validation(format!("{} pulse needs sigma > 0, got {}", self.shape, self.sigma)));
        }
        Ok(())
    }

    /// `f(t)`, amplitude included.
    pub fn eval(&self, t: T) -> Result<T> {
        if !(t >= T::zero() && t <= T::one()) {
            return Err(Error::Range(format!("pulse time {t} outside [0, 1]")));
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: T) -> T {
        let a = self.amplitude;
        match self.shape {
            PulseShape::Cosine => a * (self.detuning * t).cos(),
            PulseShape::Gaussian => a * self.gaussian(t),
            PulseShape::Square => {
                if t >= T::lit(SQUARE_ON) && t <= T::lit(SQUARE_OFF) {
                    a
                } else {
                    T::zero()
                }
            }
            PulseShape::Chirp => a * ((self.detuning + self.chirp_rate * t) * t).cos(),
            PulseShape::Drag => {
                let u = t - T::lit(CENTER);
                let g = self.gaussian(t);
                a * (g - self.drag_alpha * u / (self.sigma * self.sigma) * g)
            }
        }
    }

    fn gaussian(&self, t: T) -> T {
        let u = t - T::lit(CENTER);
        (-(u * u) / (T::lit(2.0) * self.sigma * self.sigma)).exp()
    }
}

/// Free-function form of [`PulseSpec::eval`].
pub fn eval_pulse<T: Real>(spec: &PulseSpec<T>, t: T) -> Result<T> {
    spec.eval(t)
}
