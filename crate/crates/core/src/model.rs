//! Reduced two-level search problem: schedules, Hamiltonians and the
//! fixed/mobile basis geometry.
//!
//! Everything lives in the span of the marked state |s⟩ and the uniform
//! superposition |p⟩ of the unmarked items, in that order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::propagator::StatePair;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid schedule parameter: {0}")]
    InvalidParameter(String),
    #[error("matrix is not a real-symmetric Hermitian 2x2: {0}")]
    NotHermitian(String),
}

/// Database of `n` items, one of them marked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchProblem {
    pub n: u64,
}

impl SearchProblem {
    pub fn new(n: u64) -> Result<Self, ModelError> {
        if n < 2 {
            return Err(ModelError::InvalidProblem(format!(
                "N = {n}: need N >= 2 for the orthogonal state |p> to exist"
            )));
        }
        Ok(Self { n })
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }
}

/// (√(1/N), √((N−1)/N)): the uniform superposition in the {|s⟩, |p⟩} basis.
pub fn initial_state(problem: &SearchProblem) -> StatePair {
    let n = problem.nf();
    StatePair::new(
        Complex64::new((1.0 / n).sqrt(), 0.0),
        Complex64::new(((n - 1.0) / n).sqrt(), 0.0),
    )
}

fn check_finite(name: &str, v: f64) -> Result<(), ModelError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter(format!("{name} = {v} is not finite")))
    }
}

/// Algorithm I: gap ω(t) = |αt + γ| and a mixing angle rotating at the
/// constant rate 2Ω₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleI {
    pub n: u64,
    pub epsilon: f64,
    pub alpha: f64,
    /// Fixed to 1 by f(0) = 1, g(0) = 0.
    pub gamma: f64,
}

impl ScheduleI {
    pub fn new(n: u64, epsilon: f64, alpha: f64) -> Result<Self, ModelError> {
        SearchProblem::new(n)?;
        check_finite("epsilon", epsilon)?;
        check_finite("alpha", alpha)?;
        // ε = 0 is admitted as the decoupled limit (Ω₀ = 0, τ infinite)
        if epsilon < 0.0 {
            return Err(ModelError::InvalidParameter(format!("epsilon = {epsilon} must be >= 0")));
        }
        Ok(Self { n, epsilon, alpha, gamma: 1.0 })
    }

    pub fn problem(&self) -> SearchProblem {
        SearchProblem { n: self.n }
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Ω₀ = √(N−1)·ε/N.
    pub fn omega0(&self) -> f64 {
        (self.nf() - 1.0).sqrt() * self.epsilon / self.nf()
    }

    /// τ = πN/(2√(N−1)ε), so that Ω₀τ = π/2.
    pub fn tau(&self) -> f64 {
        std::f64::consts::PI * self.nf() / (2.0 * (self.nf() - 1.0).sqrt() * self.epsilon)
    }

    /// (sin θ₀, cos θ₀) = (−2√(N−1)/N, 1 − 2/N).
    pub fn theta0_sin_cos(&self) -> (f64, f64) {
        let n = self.nf();
        (-2.0 * (n - 1.0).sqrt() / n, 1.0 - 2.0 / n)
    }

    pub fn theta0(&self) -> f64 {
        let (s, c) = self.theta0_sin_cos();
        s.atan2(c)
    }

    /// (sin β, cos β) = ((2−N)/N, 2√(N−1)/N).
    pub fn beta_sin_cos(&self) -> (f64, f64) {
        let n = self.nf();
        ((2.0 - n) / n, 2.0 * (n - 1.0).sqrt() / n)
    }

    pub fn beta(&self) -> f64 {
        let (s, c) = self.beta_sin_cos();
        s.atan2(c)
    }

    /// θ(t) = θ₀ − 2Ω₀t.
    ///
    /// The angle decreases: with this orientation g′f − gf′ = ε(αt+γ)² holds
    /// and f(t) ∝ cos(2Ω₀t + β).
    pub fn theta(&self, t: f64) -> f64 {
        self.theta0() - 2.0 * self.omega0() * t
    }

    /// ω(t) = |αt + γ|.
    pub fn omega(&self, t: f64) -> f64 {
        (self.alpha * t + self.gamma).abs()
    }

    /// Level-crossing time −γ/α, only for α < 0.
    pub fn tc(&self) -> Option<f64> {
        (self.alpha < 0.0).then(|| -self.gamma / self.alpha)
    }

    /// Φ(t) = ∫₀ᵗ ω, in closed form (split at the crossing when α < 0).
    pub fn phase(&self, t: f64) -> f64 {
        let lin = |t: f64| self.gamma * t + 0.5 * self.alpha * t * t;
        match self.tc() {
            Some(tc) if t > tc => 2.0 * lin(tc) - lin(t),
            _ => lin(t),
        }
    }
}

/// f(t), g(t) of Algorithm I built from θ(t) and ω(t).
pub fn schedule_i_fg(s: &ScheduleI, t: f64) -> (f64, f64) {
    let n = s.n as f64;
    let pre = -n / (2.0 * (n - 1.0).sqrt()) * s.omega(t);
    // expand around the exact (sin θ₀, cos θ₀); θ₀ + β = −π/2
    let (sx, cx) = (2.0 * s.omega0() * t).sin_cos();
    let (st, ct) = s.theta0_sin_cos();
    (pre * (st * cx - ct * sx), -pre * sx)
}

/// Algorithm II: constant f and a linear sweep of the (2,2) element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleII {
    pub n: u64,
    pub a: f64,
    pub b: f64,
}

impl ScheduleII {
    pub fn new(n: u64, a: f64, b: f64) -> Result<Self, ModelError> {
        SearchProblem::new(n)?;
        check_finite("a", a)?;
        check_finite("b", b)?;
        if a <= 0.0 {
            return Err(ModelError::InvalidParameter(format!("a = {a} must be > 0")));
        }
        Ok(Self { n, a, b })
    }

    pub fn problem(&self) -> SearchProblem {
        SearchProblem { n: self.n }
    }

    /// f = N/√(N−1).
    pub fn f_const(&self) -> f64 {
        let n = self.n as f64;
        n / (n - 1.0).sqrt()
    }

    /// g(t) = (N−2)/√(N−1) + 2(b − at).
    pub fn g(&self, t: f64) -> f64 {
        let n = self.n as f64;
        (n - 2.0) / (n - 1.0).sqrt() + 2.0 * (self.b - self.a * t)
    }

    /// ω(t) = √((at−b)² + 1), half the splitting of H′.
    pub fn omega(&self, t: f64) -> f64 {
        (self.a * t - self.b).hypot(1.0)
    }

    /// Minimum-gap time b/a.
    pub fn tc(&self) -> f64 {
        self.b / self.a
    }
}

/// 2×2 Hermitian matrix in the {|s⟩, |p⟩} basis (ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ham2 {
    pub m: [[Complex64; 2]; 2],
}

impl Ham2 {
    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        Self { m: [[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]] }
    }

    pub fn zero() -> Self {
        Self::from_real([[0.0; 2]; 2])
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn add_identity(&self, c: f64) -> Self {
        let mut m = self.m;
        m[0][0] += c;
        m[1][1] += c;
        Self { m }
    }

    pub fn scaled(&self, k: f64) -> Self {
        let mut m = self.m;
        m.iter_mut().flatten().for_each(|z| *z *= k);
        Self { m }
    }

    /// H − (tr H / 2)·I.
    pub fn traceless(&self) -> Self {
        self.add_identity(-0.5 * self.trace().re)
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// (1/N)·[[(N−1)f, −√(N−1)f], [−√(N−1)f, f+Ng]].
pub fn hamiltonian_i(s: &ScheduleI, t: f64) -> Ham2 {
    let (f, g) = schedule_i_fg(s, t);
    let n = s.n as f64;
    let r = (n - 1.0).sqrt();
    Ham2::from_real([[(n - 1.0) * f / n, -r * f / n], [-r * f / n, (f + n * g) / n]])
}

/// H′(t) = [[0, −1], [−1, 2b − 2at]], the working form of Algorithm II.
pub fn hamiltonian_ii(s: &ScheduleII, t: f64) -> Ham2 {
    hamiltonian_ii_with(s, t, false)
}

/// As [`hamiltonian_ii`]; with `physical_offset` the dropped constant
/// √(N−1)·I is restored, giving the full matrix with f = N/√(N−1).
pub fn hamiltonian_ii_with(s: &ScheduleII, t: f64, physical_offset: bool) -> Ham2 {
    let h = Ham2::from_real([[0.0, -1.0], [-1.0, 2.0 * s.b - 2.0 * s.a * t]]);
    if physical_offset {
        h.add_identity(((s.n as f64) - 1.0).sqrt())
    } else {
        h
    }
}

/// H = ½(f+g)·I + ½ω·n̂·σ with n̂ = (sin θ, 0, cos θ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochDecomposition {
    pub phase_coefficient: f64,
    /// Eigenvalue splitting E₊ − E₋.
    pub gap: f64,
    pub axis: [f64; 3],
    pub theta: f64,
}

impl BlochDecomposition {
    pub fn reconstruct(&self) -> Ham2 {
        let (c, h) = (self.phase_coefficient, 0.5 * self.gap);
        let [nx, ny, nz] = self.axis;
        Ham2 {
            m: [
                [Complex64::new(c + h * nz, 0.0), Complex64::new(h * nx, -h * ny)],
                [Complex64::new(h * nx, h * ny), Complex64::new(c - h * nz, 0.0)],
            ],
        }
    }
}

pub fn bloch_decompose(h: &Ham2) -> Result<BlochDecomposition, ModelError> {
    let tol = 1e-12 * h.max_abs().max(1.0);
    let [[h00, h01], [h10, h11]] = h.m;
    if h00.im.abs() > tol || h11.im.abs() > tol || (h01 - h10.conj()).norm() > tol {
        return Err(ModelError::NotHermitian(format!("{:?}", h.m)));
    }
    if h01.im.abs() > tol {
        return Err(ModelError::NotHermitian(format!(
            "off-diagonal has imaginary part {} (σ_y component)",
            h01.im
        )));
    }
    let d = 0.5 * (h00.re - h11.re);
    let x = h01.re;
    let half = d.hypot(x);
    let gap = 2.0 * half;
    let axis = if half > 0.0 { [x / half, 0.0, d / half] } else { [0.0, 0.0, 1.0] };
    Ok(BlochDecomposition {
        phase_coefficient: 0.5 * (h00.re + h11.re),
        gap,
        axis,
        theta: axis[0].atan2(axis[2]),
    })
}

/// U†(θ) = [[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]]; columns are |E₊⟩, |E₋⟩.
pub fn eigenbasis_rotation(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = (0.5 * theta).sin_cos();
    [[c, -s], [s, c]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn initial_state_examples() {
        let s = initial_state(&SearchProblem::new(4).unwrap());
        assert!(close(s.a_s.re, 0.5, 1e-15));
        assert!(close(s.a_p.re, 3f64.sqrt() / 2.0, 1e-15));
        let s = initial_state(&SearchProblem::new(2).unwrap());
        assert!(close(s.a_s.re, s.a_p.re, 1e-15));
        assert!(close(s.norm_sqr(), 1.0, 1e-15));
        assert!(SearchProblem::new(1).is_err());
        assert!(ScheduleI::new(1, 1.0, 1.0).is_err());
        assert!(ScheduleII::new(0, 1.0, 1.0).is_err());
    }

    #[test]
    fn schedule_i_derived_quantities() {
        for n in [2, 3, 50, 500, 5000, 1_000_000] {
            let s = ScheduleI::new(n, 1.0, 1.0).unwrap();
            let (st, ct) = s.theta0_sin_cos();
            assert!(close(s.theta0().sin(), st, 1e-15) && close(s.theta0().cos(), ct, 1e-15));
            assert!(s.theta0() > -PI / 2.0 - 1e-15 && s.theta0() <= 0.0);
            assert!(close(s.theta0(), -s.beta() - PI / 2.0, 1e-14));
            assert!(close(s.omega0() * s.tau(), PI / 2.0, 1e-14));
            let (f, g) = schedule_i_fg(&s, 0.0);
            assert!(close(f, 1.0, 1e-14) && close(g, 0.0, 1e-14), "N={n}: f={f} g={g}");
        }
        let s = ScheduleI::new(100, 1.0, 1.0).unwrap();
        assert!(close(s.tau(), 15.7871, 1e-4));
        let s = ScheduleI::new(10_000, 1.0, 1.0).unwrap();
        assert!(close(s.tau(), 157.0875, 1e-3));
        assert!(close(s.omega(0.0), 1.0, 0.0));
    }

    #[test]
    fn fg_matches_independent_evaluation() {
        let s = ScheduleI::new(50, 1.0, 0.5).unwrap();
        let t = 0.5 * s.tau();
        let n = 50f64;
        // rebuild θ and ω from scratch
        let theta = -(2.0 * 49f64.sqrt() / n).atan2(1.0 - 2.0 / n) - 2.0 * 49f64.sqrt() / n * t;
        let omega = 0.5 * t + 1.0;
        let beta = ((2.0 - n) / n).asin();
        let pre = -n / (2.0 * 49f64.sqrt()) * omega;
        let (f, g) = schedule_i_fg(&s, t);
        assert!(close(f, pre * theta.sin(), 1e-12));
        assert!(close(g, pre * (theta + beta).cos(), 1e-12));
    }

    fn wronskian_residual(s: &ScheduleI, t: f64) -> f64 {
        let h = 1e-5;
        let (fp, gp) = schedule_i_fg(s, t + h);
        let (fm, gm) = schedule_i_fg(s, t - h);
        let (f, g) = schedule_i_fg(s, t);
        let w = (gp - gm) / (2.0 * h) * f - g * (fp - fm) / (2.0 * h);
        let target = s.epsilon * (s.alpha * t + s.gamma).powi(2);
        (w - target).abs() / target
    }

    #[test]
    fn wronskian_condition() {
        let s = ScheduleI::new(50, 1.0, 0.5).unwrap();
        assert!(wronskian_residual(&s, 0.5 * s.tau()) < 1e-6);
        let s = ScheduleI::new(5000, 2.0, -0.01).unwrap();
        assert!(wronskian_residual(&s, 30.0) < 1e-5);
    }

    #[test]
    fn hamiltonian_i_examples() {
        let s = ScheduleI::new(2, 1.0, 1.0).unwrap();
        let h = hamiltonian_i(&s, 0.0);
        let expect = [[0.5, -0.5], [-0.5, 0.5]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((h.m[i][j].re - expect[i][j]).abs() < 1e-15);
            }
        }
        let s = ScheduleI::new(500, 1.0, -0.1).unwrap();
        let b = bloch_decompose(&hamiltonian_i(&s, 3.0)).unwrap();
        assert!(close(b.gap, 0.7, 1e-10));
        let s = ScheduleI::new(50, 1.0, 1.0).unwrap();
        let b = bloch_decompose(&hamiltonian_i(&s, 0.0)).unwrap();
        assert!(close(b.gap, 1.0, 1e-14));
        assert!(close(b.theta.sin(), -0.28, 1e-14));
    }

    #[test]
    fn bloch_tracks_schedule_angle() {
        let s = ScheduleI::new(50, 1.0, 1.0).unwrap();
        for k in 0..50 {
            let t = k as f64 * 0.4;
            let b = bloch_decompose(&hamiltonian_i(&s, t)).unwrap();
            let th = s.theta(t);
            assert!(close(b.axis[0], th.sin(), 1e-12) && close(b.axis[2], th.cos(), 1e-12));
        }
    }

    #[test]
    fn hamiltonian_ii_examples() {
        let h = hamiltonian_ii(&ScheduleII::new(10, 1.0, 4.5).unwrap(), 0.0);
        assert_eq!(h, Ham2::from_real([[0.0, -1.0], [-1.0, 9.0]]));
        let h = hamiltonian_ii(&ScheduleII::new(10, 1.0, 0.0).unwrap(), 0.0);
        assert_eq!(h, Ham2::from_real([[0.0, -1.0], [-1.0, 0.0]]));
        let s = ScheduleII::new(10, 5.0, 4.5).unwrap();
        assert!(close(s.tc(), 0.9, 1e-15));
        let h = hamiltonian_ii(&s, s.tc());
        assert!(h.m[1][1].norm() < 1e-15);
        assert!(close(s.omega(s.tc()), 1.0, 0.0));
        assert!(ScheduleII::new(10, 0.0, 1.0).is_err());
    }

    #[test]
    fn physical_offset_reproduces_full_matrix() {
        let s = ScheduleII::new(100, 1.3, 2.0).unwrap();
        let t = 0.7;
        let n = 100f64;
        let f = s.f_const();
        let full = Ham2::from_real([
            [(n - 1.0) * f / n, -(n - 1.0).sqrt() * f / n],
            [-(n - 1.0).sqrt() * f / n, (f + n * s.g(t)) / n],
        ]);
        let h = hamiltonian_ii_with(&s, t, true);
        for i in 0..2 {
            for j in 0..2 {
                assert!((h.m[i][j] - full.m[i][j]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn bloch_examples() {
        let b = bloch_decompose(&Ham2::from_real([[0.5, 0.0], [0.0, -0.5]])).unwrap();
        assert_eq!((b.phase_coefficient, b.gap, b.axis, b.theta), (0.0, 1.0, [0.0, 0.0, 1.0], 0.0));
        let h = hamiltonian_ii(&ScheduleII::new(10, 1.0, 4.5).unwrap(), 0.0);
        let b = bloch_decompose(&h).unwrap();
        assert!(close(b.gap, 2.0 * 4.5f64.hypot(1.0), 1e-12));
        let r = b.reconstruct();
        for i in 0..2 {
            for j in 0..2 {
                assert!((r.m[i][j] - h.m[i][j]).norm() < 1e-12);
            }
        }
        let mut bad = Ham2::zero();
        bad.m[0][1] = Complex64::new(1.0, 0.0);
        assert!(bloch_decompose(&bad).is_err());
        let mut ybad = Ham2::zero();
        ybad.m[0][1] = Complex64::new(0.0, 1.0);
        ybad.m[1][0] = Complex64::new(0.0, -1.0);
        assert!(bloch_decompose(&ybad).is_err());
    }

    #[test]
    fn rotation_examples() {
        assert_eq!(eigenbasis_rotation(0.0), [[1.0, 0.0], [0.0, 1.0]]);
        let u = eigenbasis_rotation(PI);
        assert!(close(u[0][0], 0.0, 1e-15) && close(u[0][1], -1.0, 0.0) && close(u[1][0], 1.0, 0.0));
        let s = ScheduleI::new(100, 1.0, 1.0).unwrap();
        let u = eigenbasis_rotation(s.theta0());
        // U†·(0, 1) is the initial state; sin(θ₀/2) = −1/√N
        assert!(close(u[0][1], 0.1, 1e-12) && close(u[1][1], 0.99f64.sqrt(), 1e-12));
        assert!(close((0.5 * s.theta0()).sin(), -0.1, 1e-12));
    }

    #[test]
    fn phase_integral_is_piecewise_quadratic() {
        let s = ScheduleI::new(50, 1.0, -0.25).unwrap();
        let tc = s.tc().unwrap();
        assert!(close(tc, 4.0, 0.0));
        assert!(close(s.phase(tc), 2.0, 1e-15));
        // past the crossing ω = −(αt+γ) and Φ keeps increasing
        assert!(close(s.phase(6.0), 2.0 + 0.5, 1e-14));
        // midpoint quadrature oracle
        let m = 200_000;
        let t = 7.3;
        let h = t / m as f64;
        let q: f64 = (0..m).map(|k| s.omega((k as f64 + 0.5) * h) * h).sum();
        assert!(close(s.phase(t), q, 1e-8));
    }
}
