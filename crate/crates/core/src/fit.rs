//! Logical-model fit: find the angle θ and 4×4 isometry `U` minimizing
//! `Σ_j ‖K_exp,j − Σ_i U_ji·K_th,i(θ)‖²_F` subject to `U†U = I`.
//!
//! The model Kraus set is `{½I, ½M, ½σx, ½Mσx}` with
//! `M = R_Y(−θ)·σx·R_Y(θ) = cos θ·σx + sin θ·σz` and half-angle `R_Y`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::gates::{pauli_x, pauli_z, ry};
use crate::qcore::linalg::svd;
use crate::qcore::ComplexMatrix;
use crate::scalar::{creal, Real};
use crate::tomo::{KrausSet, KRAUS_COUNT};

/// Knobs of the multi-start alternating minimization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitOptions {
    pub grid_points: usize,
    pub max_rounds: usize,
    /// Stop once a round lowers the loss by less than this.
    pub loss_tol: f64,
    /// Half-width of the golden-section bracket around the current θ.
    pub bracket: f64,
    /// Starts whose losses differ by at most this are tied; smaller |θ| wins.
    pub tie_tol: f64,
    /// Refine the winning start to the exact stationary point of the
    /// gauge-optimal loss.
    pub polish: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            grid_points: 64,
            max_rounds: 100,
            loss_tol: 1e-12,
            bracket: std::f64::consts::PI / 64.0,
            tie_tol: 1e-9,
            polish: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult<T> {
    /// Radians, canonical range `[−π/2, π/2)`.
    pub theta: T,
    pub loss: T,
    pub iso: ComplexMatrix<T>,
    pub iterations: usize,
    pub converged: bool,
}

/// Trace of one alternating run from a single θ start.
#[derive(Clone, Debug)]
pub struct StartOutcome<T> {
    pub theta: T,
    pub loss: T,
    pub iso: ComplexMatrix<T>,
    pub rounds: usize,
    pub converged: bool,
    /// Loss after initialization and after every round.
    pub history: Vec<T>,
}

/// `{½I, ½M, ½σx, ½Mσx}` for `M = R_Y(−θ)σxR_Y(θ)`.
pub fn theory_kraus<T: Real>(theta: T) -> KrausSet<T> {
    let half = T::lit(0.5);
    let x = pauli_x::<T>();
    let m = ry(-theta).matmul(&x).matmul(&ry(theta));
    let mx = m.matmul(&x);
    KrausSet::new(vec![
        ComplexMatrix::identity(2).scale_real(half),
        m.scale_real(half),
        x.scale_real(half),
        mx.scale_real(half),
    ])
    .expect("four 2x2 operators")
}

/// Stacks each operator, flattened row-major, as one row of a 4×4 matrix.
fn stack<T: Real>(k: &KrausSet<T>) -> ComplexMatrix<T> {
    let data = k.ops().iter().flat_map(|op| op.entries().iter().copied()).collect();
    ComplexMatrix::from_vec(KRAUS_COUNT, 4, data).expect("4 ops of 4 entries")
}

fn procrustes_stacked<T: Real>(e: &ComplexMatrix<T>, t: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let d = svd(&e.matmul(&t.dagger()));
    d.u.matmul(&d.v.dagger())
}

/// Closed-form gauge step: `U = V·W†` from `E·T† = V·S·W†`.
pub fn procrustes_isometry<T: Real>(exp: &KrausSet<T>, th: &KrausSet<T>) -> ComplexMatrix<T> {
    procrustes_stacked(&stack(exp), &stack(th))
}

fn stacked_loss<T: Real>(e: &ComplexMatrix<T>, t: &ComplexMatrix<T>, u: &ComplexMatrix<T>) -> T {
    e.distance(&u.matmul(t)).powi(2)
}

/// `Σ_j ‖K_exp,j − Σ_i U_ji·K_th,i(θ)‖²_F`
pub fn objective<T: Real>(exp: &KrausSet<T>, theta: T, iso: &ComplexMatrix<T>) -> T {
    stacked_loss(&stack(exp), &stack(&theory_kraus(theta)), iso)
}

fn golden_section<T: Real>(f: impl Fn(T) -> T, mut a: T, mut b: T) -> (T, T) {
    let g = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let tol = T::tol(1e-13);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / T::lit(2.0);
    (x, f(x))
}

/// Alternates the Procrustes step and a golden-section θ step from `theta0`.
/// Each step is accepted only if it does not raise the loss.
pub fn fit_from_start<T: Real>(exp: &KrausSet<T>, theta0: T, opts: &FitOptions) -> StartOutcome<T> {
    let e = stack(exp);
    let t_of = |th: T| stack(&theory_kraus(th));
    let mut theta = theta0;
    let mut u = procrustes_stacked(&e, &t_of(theta));
    let mut loss = stacked_loss(&e, &t_of(theta), &u);
    let mut history = vec![loss];
    let bracket = T::lit(opts.bracket);
    let tol = T::lit(opts.loss_tol);
    let mut converged = false;
    let mut rounds = 0;

    while rounds < opts.max_rounds {
        rounds += 1;
        let before = loss;

        let (th_new, l_new) = golden_section(|th| stacked_loss(&e, &t_of(th), &u), theta - bracket, theta + bracket);
        if l_new < loss {
            theta = th_new;
            loss = l_new;
        }
        let t = t_of(theta);
        let u_new = procrustes_stacked(&e, &t);
        let l_proc = stacked_loss(&e, &t, &u_new);
        if l_proc <= loss {
            u = u_new;
            loss = l_proc;
        }
        history.push(loss);
        if before - loss < tol {
            converged = true;
            break;
        }
    }
    StartOutcome {
        theta,
        loss,
        iso: u,
        rounds,
        converged,
        history,
    }
}

/// Derivative of the gauge-optimal loss `min_U L(U, θ)` with respect to θ.
fn profile_slope<T: Real>(e: &ComplexMatrix<T>, theta: T) -> T {
    let t = stack(&theory_kraus(theta));
    let u = procrustes_stacked(e, &t);
    let (sn, cs) = theta.sin_cos();
    let x = pauli_x::<T>();
    let mut dm = x.scale_real(-sn);
    dm.add_scaled(&pauli_z(), creal(cs));
    let half = T::lit(0.5);
    let zero = ComplexMatrix::zeros(2, 2);
    let dt = stack(&KrausSet::new(vec![zero.clone(), dm.scale_real(half), zero, dm.matmul(&x).scale_real(half)]).expect("4 ops"));
    let g = e.dagger().matmul(&u).matmul(&dt).trace().re;
    -T::lit(2.0) * g
}

/// Bisects the profile slope to its zero near `theta`.
fn polish<T: Real>(e: &ComplexMatrix<T>, theta: T, max_half_width: T) -> Option<(T, ComplexMatrix<T>, T)> {
    let mut w = T::lit(1e-6);
    let (lo, hi) = loop {
        if w > max_half_width {
            return None;
        }
        let slo = profile_slope(e, theta - w);
        let shi = profile_slope(e, theta + w);
        if slo <= T::zero() && shi >= T::zero() {
            break (theta - w, theta + w);
        }
        w = w * T::lit(4.0);
    };
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let s = profile_slope(e, mid);
        if s < T::zero() {
            lo = mid;
        } else if s > T::zero() {
            hi = mid;
        } else {
            lo = mid;
            hi = mid;
            break;
        }
    }
    let th = (lo + hi) / T::lit(2.0);
    let t = stack(&theory_kraus(th));
    let u = procrustes_stacked(e, &t);
    let l = stacked_loss(e, &t, &u);
    Some((th, u, l))
}

/// Maps θ into `[−π/2, π/2)`, flipping the signs of iso columns 2 and 4
/// for every odd shift by π (the model rows `½M`, `½Mσx` change sign).
fn canonicalize<T: Real>(theta: T, iso: &ComplexMatrix<T>) -> (T, ComplexMatrix<T>) {
    let pi = T::PI();
    let half = pi / T::lit(2.0);
    let k = ((theta + half) / pi).floor();
    let mut th = theta - k * pi;
    if th >= half {
        th = th - pi;
    }
    if th < -half {
        th = th + pi;
    }
    let odd = (k.to_f64_lossy() as i64).rem_euclid(2) == 1;
    let mut u = iso.clone();
    if odd {
        for r in 0..u.rows() {
            for c in [1, 3] {
                u[(r, c)] = -u[(r, c)];
            }
        }
    }
    (th, u)
}

fn better<T: Real>(a: &StartOutcome<T>, b: &StartOutcome<T>, tie: T) -> bool {
    if (a.loss - b.loss).abs() <= tie {
        a.theta.abs() < b.theta.abs()
    } else {
        a.loss < b.loss
    }
}

pub fn fit_channel<T: Real>(exp: &KrausSet<T>) -> Result<FitResult<T>> {
    fit_channel_with(exp, &FitOptions::default())
}

/// Multi-start fit over a uniform θ grid on `[−π/2, π/2)`.
pub fn fit_channel_with<T: Real>(exp: &KrausSet<T>, opts: &FitOptions) -> Result<FitResult<T>> {
    let err = exp.completeness_error();
    if !(err <= T::tol(1e-8)) {
        return Err(Error::Validation(format!("Kraus set not complete (‖ΣK†K − I‖ = {err:e})")));
    }
    if opts.grid_points == 0 || opts.max_rounds == 0 {
        return Err(Error::Validation("fit needs at least one start and one round".into()));
    }
    let pi = T::PI();
    let n = opts.grid_points;
    let outcomes: Vec<StartOutcome<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let th0 = -pi / T::lit(2.0) + pi * T::lit(i as f64) / T::lit(n as f64);
            let mut o = fit_from_start(exp, th0, opts);
            let (th, u) = canonicalize(o.theta, &o.iso);
            o.theta = th;
            o.iso = u;
            o
        })
        .collect();

    let tie = T::lit(opts.tie_tol);
    let mut best = &outcomes[0];
    for o in &outcomes[1..] {
        if better(o, best, tie) {
            best = o;
        }
    }
    let mut theta = best.theta;
    let mut iso = best.iso.clone();
    let mut loss = best.loss;

    if opts.polish {
        let e = stack(exp);
        if let Some((th, u, l)) = polish(&e, theta, T::lit(opts.bracket)) {
            if l <= loss + T::epsilon() * T::lit(64.0) * loss.max(T::one()) {
                let (th, u) = canonicalize(th, &u);
                theta = th;
                iso = u;
                loss = stacked_loss(&e, &stack(&theory_kraus(theta)), &iso);
            }
        }
    }

    Ok(FitResult {
        theta,
        loss,
        iso,
        iterations: best.rounds,
        converged: best.converged,
    })
}

/// `U·diag(±1)` helper used when comparing isometries across θ ↔ θ+π.
pub fn flip_model_signs<T: Real>(iso: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let d = ComplexMatrix::diag(&[creal(T::one()), creal(-T::one()), creal(T::one()), creal(-T::one())]);
    iso.matmul(&d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tomo::QuantumChannel;
    use std::f64::consts::PI;

    #[test]
    fn theory_at_zero() {
        let k = theory_kraus(0.0_f64);
        let x = pauli_x::<f64>().scale_real(0.5);
        let i = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(k.ops()[0].approx_eq(&i, 1e-15));
        assert!(k.ops()[1].approx_eq(&x, 1e-15));
        assert!(k.ops()[2].approx_eq(&x, 1e-15));
        assert!(k.ops()[3].approx_eq(&i, 1e-15));
    }

    #[test]
    fn theory_is_complete_and_pi_periodic() {
        for th in [-1.4, -0.3, 0.0, 0.8, 1.5] {
            let k = theory_kraus(th);
            for op in k.ops() {
                assert!(op.dagger().matmul(op).approx_eq(&ComplexMatrix::identity(2).scale_real(0.25), 1e-15));
            }
            let a = QuantumChannel::from_kraus(k.ops()).unwrap();
            let b = QuantumChannel::from_kraus(theory_kraus(th + PI).ops()).unwrap();
            assert!(a.choi().approx_eq(b.choi(), 1e-12));
        }
    }

    #[test]
    fn model_operator_closed_form() {
        let th = 0.37_f64;
        let m = ry(-th).matmul(&pauli_x()).matmul(&ry(th));
        let expect = ComplexMatrix::from_real_rows(&[&[th.sin(), th.cos()], &[th.cos(), -th.sin()]]);
        assert!(m.approx_eq(&expect, 1e-15));
    }

    #[test]
    fn procrustes_recovers_permutation() {
        let th = theory_kraus(0.4_f64);
        let perm = [2, 0, 3, 1];
        let ops = perm.iter().map(|&i| th.ops()[i].clone()).collect();
        let exp = KrausSet::new(ops).unwrap();
        let u = procrustes_isometry(&exp, &th);
        let mut p = ComplexMatrix::zeros(4, 4);
        for (j, &i) in perm.iter().enumerate() {
            p[(j, i)] = creal(1.0);
        }
        assert!(u.approx_eq(&p, 1e-12));
        assert!(objective(&exp, 0.4, &u) < 1e-24);
    }

    #[test]
    fn canonical_range_and_sign_flip() {
        let iso = ComplexMatrix::<f64>::identity(4);
        let (th, u) = canonicalize(0.3 + PI, &iso);
        assert!((th - 0.3).abs() < 1e-12);
        assert_eq!(u, flip_model_signs(&iso));
        let (th, u) = canonicalize(PI / 2.0, &iso);
        assert!((th + PI / 2.0).abs() < 1e-15);
        assert_eq!(u, flip_model_signs(&iso));
        let (th, u) = canonicalize(-0.2 - 2.0 * PI, &iso);
        assert!((th + 0.2).abs() < 1e-12);
        assert_eq!(u, iso);
    }

    #[test]
    fn flipped_iso_reproduces_the_same_residual() {
        let exp = theory_kraus(0.9_f64);
        let u = procrustes_isometry(&exp, &theory_kraus(0.9));
        let a = objective(&exp, 0.9, &u);
        let b = objective(&exp, 0.9 - PI, &flip_model_signs(&u));
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section(|x: f64| (x - 0.123).powi(2) + 1.0, -1.0, 1.0);
        assert!((x - 0.123).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-14);
    }

    #[test]
    fn recovers_model_member() {
        for th in [0.0_f64, 0.3, -1.2] {
            let r = fit_channel(&theory_kraus(th)).unwrap();
            assert!((r.theta - th).abs() < 1e-6, "{th} → {}", r.theta);
            assert!(r.loss < 1e-10);
            assert!(r.iso.unitarity_error() < 1e-8);
        }
    }

    #[test]
    fn incomplete_input_is_rejected() {
        let k = KrausSet::new(vec![ComplexMatrix::<f64>::identity(2).scale_real(0.5)]).unwrap();
        assert!(matches!(fit_channel(&k), Err(Error::Validation(_))));
    }
}
