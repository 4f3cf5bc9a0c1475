//! Time-dependent two-level Schrödinger equation, in the fixed {|s⟩,|p⟩}
//! basis and in the instantaneous eigenbasis.

mod dopri;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{eigenbasis_rotation, Ham2, ScheduleI, ScheduleII};

pub use dopri::{DopriSettings, DopriStats};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const TOL_RANGE: (f64, f64) = (1e-13, 1e-6);
const MAX_STEPS: usize = 50_000_000;
const UNIT_NORM_SLACK: f64 = 1e-9;
/// Allowed norm drift over a whole run, in units of tol.
pub const NORM_BUDGET: f64 = 100.0;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PropagatorError {
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step budget of {steps} exhausted at t = {t}")]
    TooManySteps { t: f64, steps: usize },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Amplitudes on |s⟩ and |p⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatePair {
    pub a_s: Complex64,
    pub a_p: Complex64,
}

impl StatePair {
    pub fn new(a_s: Complex64, a_p: Complex64) -> Self {
        Self { a_s, a_p }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a_s.norm_sqr() + self.a_p.norm_sqr()
    }

    pub fn p_s(&self) -> f64 {
        self.a_s.norm_sqr()
    }

    pub fn p_p(&self) -> f64 {
        self.a_p.norm_sqr()
    }

    fn to_reals(self) -> [f64; 4] {
        [self.a_s.re, self.a_s.im, self.a_p.re, self.a_p.im]
    }
}

/// Amplitudes on the instantaneous eigenvectors |E₊,t⟩, |E₋,t⟩, with the
/// dynamical phase Φ(t) = ∫₀ᵗ ω split off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobilePair {
    pub a_plus: Complex64,
    pub a_minus: Complex64,
    pub accumulated_phase: f64,
}

impl MobilePair {
    /// Lower level occupied, the search scenario.
    pub fn ground() -> Self {
        Self {
            a_plus: Complex64::new(0.0, 0.0),
            a_minus: Complex64::new(1.0, 0.0),
            accumulated_phase: 0.0,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a_plus.norm_sqr() + self.a_minus.norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub state: StatePair,
    pub p_s: f64,
    pub p_p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum ScheduleTag {
    I(ScheduleI),
    II(ScheduleII),
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub schedule: ScheduleTag,
    pub tol: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// max over samples of |‖ψ‖² − 1|
    pub max_norm_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn p_s(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.p_s).collect()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }
}

fn validate(grid: &[f64], tol: f64) -> Result<(), PropagatorError> {
    if !(TOL_RANGE.0..=TOL_RANGE.1).contains(&tol) {
        return Err(PropagatorError::Invalid(format!(
            "tol = {tol:e} outside [{:e}, {:e}]",
            TOL_RANGE.0, TOL_RANGE.1
        )));
    }
    if grid.is_empty() {
        return Err(PropagatorError::Invalid("empty time grid".into()));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(PropagatorError::Invalid("non-finite time in grid".into()));
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(PropagatorError::Invalid(format!(
            "time grid not strictly increasing at {} -> {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

fn check_unit(n2: f64, what: &str) -> Result<(), PropagatorError> {
    if (n2 - 1.0).abs() > UNIT_NORM_SLACK {
        return Err(PropagatorError::Invalid(format!("{what} has squared norm {n2}, expected 1")));
    }
    Ok(())
}

fn settings(tol: f64) -> DopriSettings {
    DopriSettings { rtol: tol, atol: tol, max_steps: MAX_STEPS, n_err: 4, norm_budget: Some(NORM_BUDGET * tol) }
}

/// Uniform grid of `samples` points on [0, t_max].
pub fn uniform_grid(t_max: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..samples).map(|k| t_max * k as f64 / (samples - 1) as f64).collect(),
    }
}

/// i·dψ/dt = H(t)ψ sampled on `t_grid`; `state0` is the state at `t_grid[0]`.
///
/// The scalar part tr H/2 only contributes a global phase. It is integrated
/// as a separate component outside error control, so large constant shifts
/// of the energy do not shrink the steps.
pub fn integrate_fixed(
    hamiltonian: impl Fn(f64) -> Ham2,
    state0: StatePair,
    t_grid: &[f64],
    tol: f64,
) -> Result<Trajectory, PropagatorError> {
    integrate_fixed_tagged(hamiltonian, state0, t_grid, tol, ScheduleTag::Custom)
}

pub fn integrate_fixed_tagged(
    hamiltonian: impl Fn(f64) -> Ham2,
    state0: StatePair,
    t_grid: &[f64],
    tol: f64,
    schedule: ScheduleTag,
) -> Result<Trajectory, PropagatorError> {
    validate(t_grid, tol)?;
    check_unit(state0.norm_sqr(), "state0")?;
    let rhs = |t: f64, y: &[f64; 5]| {
        let h = hamiltonian(t);
        let c = 0.5 * h.trace().re;
        let m = h.traceless();
        let v = [Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3])];
        let hv = m.apply(v);
        // -i·Hψ
        [hv[0].im, -hv[0].re, hv[1].im, -hv[1].re, c]
    };
    let r = state0.to_reals();
    let y0 = [r[0], r[1], r[2], r[3], 0.0];
    let mut samples = Vec::with_capacity(t_grid.len());
    let mut drift = 0.0_f64;
    let stats = dopri::integrate(rhs, y0, t_grid, &settings(tol), |t, y| {
        let g = Complex64::from_polar(1.0, -y[4]);
        let state = StatePair::new(g * Complex64::new(y[0], y[1]), g * Complex64::new(y[2], y[3]));
        let (p_s, p_p) = (state.p_s(), state.p_p());
        drift = drift.max((p_s + p_p - 1.0).abs());
        samples.push(Sample { t, state, p_s, p_p });
    })?;
    Ok(Trajectory {
        samples,
        meta: TrajectoryMeta {
            schedule,
            tol,
            accepted_steps: stats.accepted,
            rejected_steps: stats.rejected,
            max_norm_drift: drift,
        },
    })
}

/// Algorithm I in the fixed basis, starting from the uniform superposition.
pub fn simulate_i(s: &ScheduleI, t_grid: &[f64], tol: f64) -> Result<Trajectory, PropagatorError> {
    let psi0 = crate::model::initial_state(&s.problem());
    integrate_fixed_tagged(|t| crate::model::hamiltonian_i(s, t), psi0, t_grid, tol, ScheduleTag::I(*s))
}

/// Algorithm II (working Hamiltonian H′) in the fixed basis.
pub fn simulate_ii(s: &ScheduleII, t_grid: &[f64], tol: f64) -> Result<Trajectory, PropagatorError> {
    let psi0 = crate::model::initial_state(&s.problem());
    integrate_fixed_tagged(
        |t| crate::model::hamiltonian_ii(s, t),
        psi0,
        t_grid,
        tol,
        ScheduleTag::II(*s),
    )
}

/// Coupled mobile-basis equations ȧ₊ = −Ω a₋, ȧ₋ = Ω* a₊ with
/// Ω(t) = Ω₀·e^{iΦ(t)} and Φ from [`ScheduleI::phase`].
pub fn integrate_mobile(
    s: &ScheduleI,
    mobile0: MobilePair,
    t_grid: &[f64],
    tol: f64,
) -> Result<Vec<(f64, MobilePair)>, PropagatorError> {
    validate(t_grid, tol)?;
    check_unit(mobile0.norm_sqr(), "mobile0")?;
    let w0 = s.omega0();
    let rhs = |t: f64, y: &[f64; 4]| {
        let om = Complex64::from_polar(w0, s.phase(t));
        let (ap, am) = (Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]));
        let dp = -om * am;
        let dm = om.conj() * ap;
        [dp.re, dp.im, dm.re, dm.im]
    };
    let y0 = [mobile0.a_plus.re, mobile0.a_plus.im, mobile0.a_minus.re, mobile0.a_minus.im];
    let mut out = Vec::with_capacity(t_grid.len());
    dopri::integrate(rhs, y0, t_grid, &settings(tol), |t, y| {
        out.push((
            t,
            MobilePair {
                a_plus: Complex64::new(y[0], y[1]),
                a_minus: Complex64::new(y[2], y[3]),
                accumulated_phase: s.phase(t),
            },
        ))
    })?;
    Ok(out)
}

/// (a_s, a_p) = U†(θ)·(a₊e^{−iΦ/2}, a₋e^{+iΦ/2}).
///
/// This is the state evolved by the traceless part of H; the scalar part
/// only adds a global phase.
pub fn mobile_to_fixed(m: &MobilePair, theta: f64, phase: f64) -> StatePair {
    let u = eigenbasis_rotation(theta);
    let p = m.a_plus * Complex64::from_polar(1.0, -0.5 * phase);
    let q = m.a_minus * Complex64::from_polar(1.0, 0.5 * phase);
    StatePair::new(u[0][0] * p + u[0][1] * q, u[1][0] * p + u[1][1] * q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{hamiltonian_i, initial_state, ScheduleI, SearchProblem};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let psi = StatePair::new(c(r, 0.0), c(r, 0.0));
        let tr = integrate_fixed(|_| Ham2::zero(), psi, &uniform_grid(5.0, 11), 1e-10).unwrap();
        for s in &tr.samples {
            assert!((s.state.a_s - psi.a_s).norm() < 1e-15 && (s.state.a_p - psi.a_p).norm() < 1e-15);
        }
    }

    #[test]
    fn rabi_oscillation_closed_form() {
        // H = (Δ/2)σ_x: P_s = sin²(Δt/2) from |p⟩
        let d = 1.7;
        let h = Ham2::from_real([[0.0, 0.5 * d], [0.5 * d, 0.0]]);
        let psi = StatePair::new(c(0.0, 0.0), c(1.0, 0.0));
        let tr = integrate_fixed(|_| h, psi, &uniform_grid(10.0, 101), 1e-11).unwrap();
        for s in &tr.samples {
            assert!((s.p_s - (0.5 * d * s.t).sin().powi(2)).abs() < 1e-9);
        }
    }

    #[test]
    fn input_validation() {
        let psi = initial_state(&SearchProblem::new(4).unwrap());
        assert!(integrate_fixed(|_| Ham2::zero(), psi, &[0.0, 1.0], 1e-5).is_err());
        assert!(integrate_fixed(|_| Ham2::zero(), psi, &[0.0, 1.0], 1e-14).is_err());
        assert!(integrate_fixed(|_| Ham2::zero(), psi, &[0.0, 0.0], 1e-10).is_err());
        assert!(integrate_fixed(|_| Ham2::zero(), psi, &[], 1e-10).is_err());
        let bad = StatePair::new(c(1.0, 0.0), c(1.0, 0.0));
        assert!(integrate_fixed(|_| Ham2::zero(), bad, &[0.0, 1.0], 1e-10).is_err());
    }

    #[test]
    fn mobile_to_fixed_examples() {
        let s = ScheduleI::new(100, 1.0, 1.0).unwrap();
        let st = mobile_to_fixed(&MobilePair::ground(), s.theta0(), 0.0);
        assert!((st.a_s.re - 0.1).abs() < 1e-12 && (st.a_p.re - 0.99f64.sqrt()).abs() < 1e-12);
        let up = MobilePair { a_plus: c(1.0, 0.0), a_minus: c(0.0, 0.0), accumulated_phase: 0.0 };
        let st = mobile_to_fixed(&up, 0.0, 1.3);
        assert!((st.a_s - Complex64::from_polar(1.0, -0.65)).norm() < 1e-15 && st.p_s() == 1.0);
        let st = mobile_to_fixed(&MobilePair::ground(), s.theta(s.tau()), 0.37);
        assert!((st.p_s() - 0.99).abs() < 1e-12);
    }

    #[test]
    fn decoupled_mobile_is_constant() {
        let s = ScheduleI::new(50, 0.0, 1.0).unwrap();
        let out = integrate_mobile(&s, MobilePair::ground(), &uniform_grid(20.0, 21), 1e-10).unwrap();
        for (_, m) in out {
            assert_eq!((m.a_plus, m.a_minus), (c(0.0, 0.0), c(1.0, 0.0)));
        }
    }

    #[test]
    fn mobile_route_matches_fixed_route() {
        let s = ScheduleI::new(500, 1.0, 0.5).unwrap();
        let grid = uniform_grid(2.0 * s.tau(), 400);
        let fixed = integrate_fixed(
            |t| hamiltonian_i(&s, t).traceless(),
            initial_state(&s.problem()),
            &grid,
            1e-12,
        )
        .unwrap();
        let mob = integrate_mobile(&s, MobilePair::ground(), &grid, 1e-12).unwrap();
        let mut worst = 0.0_f64;
        for (f, (t, m)) in fixed.samples.iter().zip(&mob) {
            let st = mobile_to_fixed(m, s.theta(*t), m.accumulated_phase);
            worst = worst.max((st.a_s - f.state.a_s).norm()).max((st.a_p - f.state.a_p).norm());
        }
        assert!(worst < 1e-6, "max amplitude discrepancy {worst:e}");
    }

    #[test]
    fn large_n_stays_adiabatic() {
        let s = ScheduleI::new(5000, 1.0, 1.0).unwrap();
        let out =
            integrate_mobile(&s, MobilePair::ground(), &uniform_grid(2.0 * s.tau(), 500), 1e-10).unwrap();
        assert!(out.iter().all(|(_, m)| m.a_minus.norm() >= 0.999));
    }
}
