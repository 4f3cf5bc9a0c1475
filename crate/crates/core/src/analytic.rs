//! Closed-form dynamics: parabolic-cylinder solutions of both algorithms,
//! the α = 0 solution, the resonance approximation and the limiting
//! probability of the linear sweep.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ScheduleI, ScheduleII};
use crate::propagator::{mobile_to_fixed, MobilePair, StatePair};
use crate::specfun::{pcf_d, recip_gamma, SpecfunError};

/// A limiting probability counts as accurate when its error estimate is below this.
pub const LIMIT_ACCURACY: f64 = 1e-6;
/// Relative disagreement between the computed denominator and the exact
/// Wronskian above which a solution is rejected.
const WRONSKIAN_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Error)]
pub enum AnalyticError {
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error("usage: {0}")]
    Usage(String),
    #[error("degenerate solution: {0}")]
    Degenerate(String),
    #[error("t = {t} lies past the level crossing t_c = {tc}; the solution only covers t <= t_c")]
    PastCrossing { t: f64, tc: f64 },
}

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

/// D_ν(z) with its error estimate folded into a running maximum.
fn d(nu: Complex64, z: Complex64, err: &mut f64) -> Result<Complex64, SpecfunError> {
    let r = pcf_d(nu, z)?;
    *err = err.max(r.estimated_error);
    Ok(r.value)
}

/// Exact D_ν(z)D_{ν−1}(−z) + D_ν(−z)D_{ν−1}(z) = √(2π)/Γ(1−ν).
pub fn pcf_wronskian_sum(nu: Complex64) -> Complex64 {
    (2.0 * PI).sqrt() * recip_gamma(1.0 - nu)
}

/// Coefficients of W = A₁D_η(z) + A₂D_η(−z) meeting W(z₀) = w0 and
/// A₁D_{η−1}(z₀) − A₂D_{η−1}(−z₀) = q.
fn solve_coefficients(
    eta: Complex64,
    z0: Complex64,
    w0: Complex64,
    q: Complex64,
    err: &mut f64,
) -> Result<(Complex64, Complex64), AnalyticError> {
    let (dp, dm) = (d(eta, z0, err)?, d(eta, -z0, err)?);
    let (ep, em) = (d(eta - 1.0, z0, err)?, d(eta - 1.0, -z0, err)?);
    let delta = dp * em + dm * ep;
    let exact = pcf_wronskian_sum(eta);
    if delta.norm() == 0.0 || (delta - exact).norm() > WRONSKIAN_SLACK * exact.norm() {
        return Err(AnalyticError::Degenerate(format!(
            "denominator {delta} vs Wronskian {exact} at eta = {eta}, z0 = {z0}"
        )));
    }
    Ok(((w0 * em + q * dm) / delta, (w0 * ep - q * dp) / delta))
}

/// Algorithm I for α ≠ 0: a₋ = e^{−iψ}W(z), ψ = (αt² + 2γt)/4,
/// z = c(t + γ/α) with c² = −iα.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcfSolutionI {
    /// η = iΩ₀²/α
    pub eta: Complex64,
    /// √α·e^{−iπ/4} for α > 0, √|α|·e^{+iπ/4} for α < 0
    pub c: Complex64,
    pub z0: Complex64,
    pub a1: Complex64,
    pub a2: Complex64,
    pub alpha: f64,
    pub gamma: f64,
    pub omega0: f64,
    /// Largest error estimate among the D evaluations behind A₁, A₂.
    pub estimated_error: f64,
}

impl PcfSolutionI {
    pub fn z_of_t(&self, t: f64) -> Complex64 {
        self.c * (t + self.gamma / self.alpha)
    }

    pub fn tc(&self) -> Option<f64> {
        (self.alpha < 0.0).then(|| -self.gamma / self.alpha)
    }

    /// W and the bracket A₁D_{η−1}(z) − A₂D_{η−1}(−z) at `t`.
    fn parts(&self, t: f64, err: &mut f64) -> Result<(Complex64, Complex64), AnalyticError> {
        let z = self.z_of_t(t);
        let w = self.a1 * d(self.eta, z, err)? + self.a2 * d(self.eta, -z, err)?;
        let v = self.a1 * d(self.eta - 1.0, z, err)? - self.a2 * d(self.eta - 1.0, -z, err)?;
        Ok((w, v))
    }

    /// W(t) = a₋(t)·e^{iψ(t)}.
    pub fn w(&self, t: f64) -> Result<Complex64, AnalyticError> {
        Ok(self.parts(t, &mut 0.0)?.0)
    }

    /// dW/dt = −(cz/2)W + cη[A₁D_{η−1}(z) − A₂D_{η−1}(−z)].
    pub fn dw_dt(&self, t: f64) -> Result<Complex64, AnalyticError> {
        let (w, v) = self.parts(t, &mut 0.0)?;
        let z = self.z_of_t(t);
        Ok(-0.5 * self.c * z * w + self.c * self.eta * v)
    }
}

pub fn alg_i_solution(s: &ScheduleI) -> Result<PcfSolutionI, AnalyticError> {
    if s.alpha == 0.0 {
        return Err(AnalyticError::Usage("alpha = 0: use alg_i_alpha0".into()));
    }
    let omega0 = s.omega0();
    let eta = i() * omega0 * omega0 / s.alpha;
    let c = if s.alpha > 0.0 {
        Complex64::from_polar(s.alpha.sqrt(), -FRAC_PI_4)
    } else {
        Complex64::from_polar((-s.alpha).sqrt(), FRAC_PI_4)
    };
    let z0 = c * s.gamma / s.alpha;
    let mut err = 0.0;
    let one = Complex64::new(1.0, 0.0);
    let (a1, a2) = solve_coefficients(eta, z0, one, Complex64::new(0.0, 0.0), &mut err)?;
    Ok(PcfSolutionI { eta, c, z0, a1, a2, alpha: s.alpha, gamma: s.gamma, omega0, estimated_error: err })
}

/// (a₊, a₋) at `t`, with a₊ = (icΩ₀/α)·[A₁D_{η−1}(z) − A₂D_{η−1}(−z)]·e^{iψ}.
///
/// For α < 0 only t ≤ t_c is covered: past the crossing ∫ω stops being 2ψ.
pub fn alg_i_amplitudes(sol: &PcfSolutionI, s: &ScheduleI, t: f64) -> Result<MobilePair, AnalyticError> {
    if let Some(tc) = sol.tc() {
        if t > tc {
            return Err(AnalyticError::PastCrossing { t, tc });
        }
    }
    let (w, v) = sol.parts(t, &mut 0.0)?;
    let psi = 0.25 * (sol.alpha * t * t + 2.0 * sol.gamma * t);
    let e = Complex64::from_polar(1.0, psi);
    let a_minus = w / e;
    let a_plus = i() * sol.c * sol.omega0 / sol.alpha * v * e;
    Ok(MobilePair { a_plus, a_minus, accumulated_phase: s.phase(t) })
}

/// Fixed-basis state built from [`alg_i_amplitudes`].
pub fn alg_i_state(sol: &PcfSolutionI, s: &ScheduleI, t: f64) -> Result<StatePair, AnalyticError> {
    let m = alg_i_amplitudes(sol, s, t)?;
    Ok(mobile_to_fixed(&m, s.theta(t), m.accumulated_phase))
}

/// α = 0: a₋ = e^{−iγt/2}[cos κt + (iγ/2κ) sin κt], a₊ = −(Ω₀/κ) sin κt·e^{iγt/2},
/// κ = √((γ/2)² + Ω₀²).
pub fn alg_i_alpha0(s: &ScheduleI, t: f64) -> Result<MobilePair, AnalyticError> {
    if s.alpha != 0.0 {
        return Err(AnalyticError::Usage(format!("alg_i_alpha0 needs alpha = 0, got {}", s.alpha)));
    }
    let (g, w0) = (s.gamma, s.omega0());
    let kappa = (0.25 * g * g + w0 * w0).sqrt();
    let (sk, ck) = (kappa * t).sin_cos();
    let a_minus = Complex64::from_polar(1.0, -0.5 * g * t) * Complex64::new(ck, 0.5 * g / kappa * sk);
    let a_plus = Complex64::from_polar(-w0 / kappa * sk, 0.5 * g * t);
    Ok(MobilePair { a_plus, a_minus, accumulated_phase: s.phase(t) })
}

/// Resonance approximation (sin²(Ω₀t), cos²(Ω₀t)).
pub fn alg_i_approx_probs(s: &ScheduleI, t: f64) -> (f64, f64) {
    let (sn, cs) = (s.omega0() * t).sin_cos();
    (sn * sn, cs * cs)
}

/// Same with the initial-angle offset kept: sin²(Ω₀t − θ₀/2), exact while a₋ ≡ 1.
pub fn alg_i_approx_probs_offset(s: &ScheduleI, t: f64) -> (f64, f64) {
    let (sn, cs) = (s.omega0() * t - 0.5 * s.theta0()).sin_cos();
    (sn * sn, cs * cs)
}

/// τ·l for l = 1..=l_max, dropping those past the crossing when α < 0.
pub fn alg_i_peak_times(s: &ScheduleI, l_max: u32) -> Vec<f64> {
    let tau = s.tau();
    (1..=l_max)
        .map(|l| tau * l as f64)
        .filter(|&t| s.tc().map_or(true, |tc| t < tc))
        .collect()
}

pub trait CloseApproach {
    fn close_approach_time(&self) -> Option<f64>;
}

impl CloseApproach for ScheduleI {
    /// −γ/α when the levels cross (α < 0).
    fn close_approach_time(&self) -> Option<f64> {
        self.tc()
    }
}

impl CloseApproach for ScheduleII {
    /// b/a when the minimum gap lies in the future (b > 0).
    fn close_approach_time(&self) -> Option<f64> {
        (self.b > 0.0).then(|| self.tc())
    }
}

pub fn close_approach_time(s: &impl CloseApproach) -> Option<f64> {
    s.close_approach_time()
}

/// Algorithm II: a_s = e^{iφ}W(z), φ = at²/2 − bt, z = √(2a)e^{iπ/4}(t − b/a),
/// η = −i/(2a).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcfSolutionII {
    pub eta: Complex64,
    /// √(2a)·e^{iπ/4}
    pub c: Complex64,
    pub z0: Complex64,
    /// √(2a)·√((N−1)/N)·e^{i3π/4}
    pub q0: Complex64,
    pub a1: Complex64,
    pub a2: Complex64,
    /// 1/(2a)
    pub k: f64,
    pub a: f64,
    pub b: f64,
    /// None for the N → ∞ coefficients.
    pub n: Option<u64>,
    pub estimated_error: f64,
}

impl PcfSolutionII {
    pub fn z_of_t(&self, t: f64) -> Complex64 {
        self.c * (t - self.b / self.a)
    }

    fn parts(&self, t: f64, err: &mut f64) -> Result<(Complex64, Complex64), AnalyticError> {
        let z = self.z_of_t(t);
        let w = self.a1 * d(self.eta, z, err)? + self.a2 * d(self.eta, -z, err)?;
        let v = self.a1 * d(self.eta - 1.0, z, err)? - self.a2 * d(self.eta - 1.0, -z, err)?;
        Ok((w, v))
    }

    pub fn w(&self, t: f64) -> Result<Complex64, AnalyticError> {
        Ok(self.parts(t, &mut 0.0)?.0)
    }

    pub fn dw_dt(&self, t: f64) -> Result<Complex64, AnalyticError> {
        let (w, v) = self.parts(t, &mut 0.0)?;
        Ok(-0.5 * self.c * self.z_of_t(t) * w + self.c * self.eta * v)
    }
}

fn alg_ii_check(a: f64, b: f64) -> Result<(), AnalyticError> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(AnalyticError::Usage(format!("a = {a} must be positive and finite")));
    }
    if !b.is_finite() {
        return Err(AnalyticError::Usage(format!("b = {b} must be finite")));
    }
    Ok(())
}

fn alg_ii_build(n: Option<u64>, a: f64, b: f64) -> Result<PcfSolutionII, AnalyticError> {
    alg_ii_check(a, b)?;
    let (w0, frac) = match n {
        Some(n) if n < 2 => return Err(AnalyticError::Usage(format!("N = {n} must be >= 2"))),
        Some(n) => {
            let nf = n as f64;
            ((1.0 / nf).sqrt(), ((nf - 1.0) / nf).sqrt())
        }
        None => (0.0, 1.0),
    };
    let eta = Complex64::new(0.0, -0.5 / a);
    let c = Complex64::from_polar((2.0 * a).sqrt(), FRAC_PI_4);
    let z0 = Complex64::from_polar(-b * (2.0 / a).sqrt(), FRAC_PI_4);
    let q0 = Complex64::from_polar((2.0 * a).sqrt() * frac, 3.0 * FRAC_PI_4);
    let mut err = 0.0;
    let (a1, a2) = solve_coefficients(eta, z0, Complex64::new(w0, 0.0), q0, &mut err)?;
    Ok(PcfSolutionII { eta, c, z0, q0, a1, a2, k: 0.5 / a, a, b, n, estimated_error: err })
}

pub fn alg_ii_solution(n: u64, a: f64, b: f64) -> Result<PcfSolutionII, AnalyticError> {
    alg_ii_build(Some(n), a, b)
}

/// Coefficients with the N → ∞ initial data (a_s(0) = 0, a_p(0) = 1).
pub fn alg_ii_solution_inf(a: f64, b: f64) -> Result<PcfSolutionII, AnalyticError> {
    alg_ii_build(None, a, b)
}

/// (a_s, a_p) at `t`; a_p = −i·cη·[A₁D_{η−1}(z) − A₂D_{η−1}(−z)]·e^{iφ}.
pub fn alg_ii_amplitudes(sol: &PcfSolutionII, t: f64) -> Result<StatePair, AnalyticError> {
    let (w, v) = sol.parts(t, &mut 0.0)?;
    let e = Complex64::from_polar(1.0, 0.5 * sol.a * t * t - sol.b * t);
    Ok(StatePair::new(e * w, -i() * sol.c * sol.eta * v * e))
}

/// p(a,b) = |A₁e^{kπ/4} + A₂e^{−3πk/4}|², clamped to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitProbability {
    pub value: f64,
    /// Before clamping.
    pub raw: f64,
    pub estimated_error: f64,
}

impl LimitProbability {
    pub fn accurate(&self) -> bool {
        self.estimated_error <= LIMIT_ACCURACY
    }

    pub fn clamped(&self) -> bool {
        self.value != self.raw
    }
}

fn limit_from(sol: &PcfSolutionII) -> LimitProbability {
    let (g1, g2) = ((PI * sol.k / 4.0).exp(), (-3.0 * PI * sol.k / 4.0).exp());
    let amp = sol.a1 * g1 + sol.a2 * g2;
    let raw = amp.norm_sqr();
    let scale = sol.a1.norm() * g1 + sol.a2.norm() * g2;
    // four D values enter each coefficient; first-order propagation into |amp|²
    let estimated_error = 2.0 * scale * scale * 8.0 * sol.estimated_error + 1e-15;
    LimitProbability { value: raw.clamp(0.0, 1.0), raw, estimated_error }
}

pub fn alg_ii_limit_prob(n: u64, a: f64, b: f64) -> Result<LimitProbability, AnalyticError> {
    Ok(limit_from(&alg_ii_solution(n, a, b)?))
}

pub fn alg_ii_limit_prob_inf(a: f64, b: f64) -> Result<LimitProbability, AnalyticError> {
    Ok(limit_from(&alg_ii_solution_inf(a, b)?))
}
