//! Rotating-frame Hamiltonian of the 3-qubit chain and its closed-system
//! propagation.
//!
//! `H(t) = J01·(σa⊗σb⊗I) + J12·(I⊗σa⊗σb) + f0(t)·(σx⊗I⊗I) + f1(t)·(I⊗σx⊗I)`
//! where `f0`, `f1` are the q0/q1 envelopes with their amplitudes folded in.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulse::PulseSpec;
use crate::qcore::gates::{identity, pauli_x, pauli_y, pauli_z};
use crate::qcore::{expm_hermitian, kron, kron_all, ComplexMatrix, DensityMatrix};
use crate::scalar::{cplx, creal, Real};
use crate::tomo::{reconstruct_channel, QuantumChannel};

pub const DEFAULT_TIME_STEPS: usize = 50;
pub const DEFAULT_SUBSTEPS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix<T: Real>(self) -> ComplexMatrix<T> {
        match self {
            Pauli::X => pauli_x(),
            Pauli::Y => pauli_y(),
            Pauli::Z => pauli_z(),
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Ordered Pauli pair `σa ⊗ σb` on two neighbouring qubits, written e.g. `"ZX"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliPair(pub Pauli, pub Pauli);

impl PauliPair {
    pub const ZX: PauliPair = PauliPair(Pauli::Z, Pauli::X);
    pub const YX: PauliPair = PauliPair(Pauli::Y, Pauli::X);
    pub const ZZ: PauliPair = PauliPair(Pauli::Z, Pauli::Z);
}

impl fmt::Display for PauliPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0.letter(), self.1.letter())
    }
}

impl FromStr for PauliPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letter = |c: char| match c.to_ascii_uppercase() {
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            _ => Err(Error::Validation(format!("bad Pauli label {c:?} in {s:?}"))),
        };
        let cs: Vec<char> = s.chars().collect();
        match cs.as_slice() {
            [a, b] => Ok(PauliPair(letter(*a)?, letter(*b)?)),
            _ => Err(Error::Validation(format!("coupling type must be two Pauli letters, got {s:?}"))),
        }
    }
}

impl Serialize for PauliPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliPair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Always-on crosstalk couplings on the links q0–q1 and q1–q2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingSpec<T> {
    pub pauli_01: PauliPair,
    pub pauli_12: PauliPair,
    pub j01: T,
    pub j12: T,
}

impl<T: Real> CouplingSpec<T> {
    /// Same Pauli pair and strength on both links.
    pub fn uniform(pair: PauliPair, j: T) -> Self {
        Self {
            pauli_01: pair,
            pauli_12: pair,
            j01: j,
            j12: j,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j01.is_finite() && self.j12.is_finite()) {
            return Err(Error::Validation("coupling strengths must be finite".into()));
        }
        Ok(())
    }
}

/// Initial state of the two adversarial qubits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AuxState {
    #[default]
    #[serde(rename = "00")]
    ZeroZero,
    #[serde(rename = "01")]
    ZeroOne,
    #[serde(rename = "10")]
    OneZero,
    #[serde(rename = "11")]
    OneOne,
    #[serde(rename = "++")]
    PlusPlus,
}

impl AuxState {
    pub fn label(self) -> &'static str {
        match self {
            AuxState::ZeroZero => "00",
            AuxState::ZeroOne => "01",
            AuxState::OneZero => "10",
            AuxState::OneOne => "11",
            AuxState::PlusPlus => "++",
        }
    }

    /// `τ_aux` as a 4×4 density matrix on `q0 ⊗ q1`.
    pub fn density<T: Real>(self) -> DensityMatrix<T> {
        let idx = match self {
            AuxState::ZeroZero => 0,
            AuxState::ZeroOne => 1,
            AuxState::OneZero => 2,
            AuxState::OneOne => 3,
            AuxState::PlusPlus => {
                let m = ComplexMatrix::from_vec(4, 4, vec![cplx(0.25, 0.0); 16]).expect("4x4");
                return DensityMatrix::new_unchecked(m);
            }
        };
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(idx, idx)] = creal(T::one());
        DensityMatrix::new_unchecked(m)
    }
}

impl FromStr for AuxState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            AuxState::ZeroZero,
            AuxState::ZeroOne,
            AuxState::OneZero,
            AuxState::OneOne,
            AuxState::PlusPlus,
        ]
        .into_iter()
        .find(|a| a.label() == s)
        .ok_or_else(|| Error::Validation(format!("aux_state must be one of 00, 01, 10, 11, ++; got {s:?}")))
    }
}

/// Everything the adversary controls, plus integration settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AttackConfig<T> {
    pub coupling: CouplingSpec<T>,
    pub pulse_q0: PulseSpec<T>,
    pub pulse_q1: PulseSpec<T>,
    pub aux_state: AuxState,
    pub time_steps: usize,
    pub substeps_per_step: usize,
}

impl<T: Real> AttackConfig<T> {
    pub fn new(coupling: CouplingSpec<T>, pulse_q0: PulseSpec<T>, pulse_q1: PulseSpec<T>) -> Self {
        Self {
            coupling,
            pulse_q0,
            pulse_q1,
            aux_state: AuxState::ZeroZero,
            time_steps: DEFAULT_TIME_STEPS,
            substeps_per_step: DEFAULT_SUBSTEPS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.coupling.validate()?;
        self.pulse_q0.validate()?;
        self.pulse_q1.validate()?;
        if self.time_steps == 0 || self.substeps_per_step == 0 {
            return Err(Error::Validation("time_steps and substeps_per_step must be ≥ 1".into()));
        }
        Ok(())
    }

    pub fn intervals(&self) -> usize {
        self.time_steps * self.substeps_per_step
    }
}

/// Static crosstalk term `J01·(σa⊗σb⊗I) + J12·(I⊗σa⊗σb)`.
pub fn coupling_hamiltonian<T: Real>(c: &CouplingSpec<T>) -> ComplexMatrix<T> {
    let i2 = identity::<T>();
    let a01 = c.pauli_01.0.matrix::<T>();
    let b01 = c.pauli_01.1.matrix::<T>();
    let a12 = c.pauli_12.0.matrix::<T>();
    let b12 = c.pauli_12.1.matrix::<T>();
    let link01 = kron_all(&[&a01, &b01, &i2]);
    let link12 = kron_all(&[&i2, &a12, &b12]);
    let mut h = link01.scale_real(c.j01);
    h.add_scaled(&link12, creal(c.j12));
    h
}

/// The two single-qubit drive operators `σx⊗I⊗I` and `I⊗σx⊗I`.
fn drive_operators<T: Real>() -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let i2 = identity::<T>();
    let x = pauli_x::<T>();
    (kron_all(&[&x, &i2, &i2]), kron_all(&[&i2, &x, &i2]))
}

/// Drive term at time `t`.
pub fn drive_hamiltonian<T: Real>(cfg: &AttackConfig<T>, t: T) -> Result<ComplexMatrix<T>> {
    let f0 = cfg.pulse_q0.eval(t)?;
    let f1 = cfg.pulse_q1.eval(t)?;
    let (x0, x1) = drive_operators();
    let mut h = x0.scale_real(f0);
    h.add_scaled(&x1, creal(f1));
    Ok(h)
}

/// Total `H(t)`.
pub fn hamiltonian<T: Real>(cfg: &AttackConfig<T>, t: T) -> Result<ComplexMatrix<T>> {
    Ok(&coupling_hamiltonian(&cfg.coupling) + &drive_hamiltonian(cfg, t)?)
}

/// Overall propagator over `[0, 1]`: ordered product of midpoint-rule
/// sub-propagators `exp(−i·H(t_mid)·Δt)`.
pub fn propagator<T: Real>(cfg: &AttackConfig<T>) -> Result<ComplexMatrix<T>> {
    cfg.validate()?;
    let n = cfg.intervals();
    let dt = T::one() / T::lit(n as f64);
    let hc = coupling_hamiltonian(&cfg.coupling);
    let (x0, x1) = drive_operators::<T>();
    let mut u = ComplexMatrix::identity(8);
    for k in 0..n {
        let t = (T::lit(k as f64) + T::lit(0.5)) * dt;
        let mut h = hc.clone();
        h.add_scaled(&x0, creal(cfg.pulse_q0.eval_unchecked(t)));
        h.add_scaled(&x1, creal(cfg.pulse_q1.eval_unchecked(t)));
        let step = expm_hermitian(&h, dt)?;
        u = step.matmul(&u);
    }
    Ok(u)
}

/// `ρ_final = U·ρ0·U†` for the full register.
pub fn evolve<T: Real>(cfg: &AttackConfig<T>, rho0: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    if rho0.dim() != 8 {
        return Err(Error::Dimension(format!("evolve expects an 8x8 register state, got {}", rho0.dim())));
    }
    let u = propagator(cfg)?;
    Ok(rho0.evolve_unitary(&u))
}

/// Victim-side map `ρ_v ↦ Tr_{q0,q1}[U (τ_aux ⊗ ρ_v) U†]` for a fixed joint unitary.
pub fn induced_map<T: Real>(
    u: &ComplexMatrix<T>,
    aux: &DensityMatrix<T>,
    rho_v: &ComplexMatrix<T>,
) -> ComplexMatrix<T> {
    let joint = kron(aux.matrix(), rho_v);
    crate::qcore::trace_keep_last_qubit(&joint.conjugate_by(u))
}

/// The CPTP channel the attack induces on the victim qubit q2.
pub fn victim_channel<T: Real>(cfg: &AttackConfig<T>) -> Result<QuantumChannel<T>> {
    let u = propagator(cfg)?;
    channel_from_unitary(&u, cfg.aux_state)
}

/// Victim channel induced by an arbitrary 8×8 joint unitary.
pub fn channel_from_unitary<T: Real>(u: &ComplexMatrix<T>, aux: AuxState) -> Result<QuantumChannel<T>> {
    if u.rows() != 8 || u.cols() != 8 {
        return Err(Error::Dimension(format!("joint unitary must be 8x8, got {}x{}", u.rows(), u.cols())));
    }
    let tau = aux.density::<T>();
    reconstruct_channel(|rho: &DensityMatrix<T>| {
        Ok(DensityMatrix::new_unchecked(induced_map(u, &tau, rho.matrix())))
    })
}
