//! Self-verification suites run by `nasearch verify`.
//!
//! Inputs come from fixed lattices, so a report is reproducible run to run.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::analytic::{
    alg_i_alpha0, alg_i_amplitudes, alg_i_approx_probs, alg_i_peak_times, alg_i_solution,
    alg_ii_amplitudes, alg_ii_limit_prob, alg_ii_limit_prob_inf, alg_ii_solution,
};
use crate::model::{
    bloch_decompose, eigenbasis_rotation, hamiltonian_i, hamiltonian_ii, hamiltonian_ii_with,
    initial_state, schedule_i_fg, ScheduleI, ScheduleII,
};
use crate::propagator::{
    integrate_fixed, integrate_mobile, mobile_to_fixed, simulate_i, simulate_ii, uniform_grid,
    MobilePair, StatePair, DEFAULT_TOL,
};
use crate::specfun::{complex_gamma, kummer_m, pcf_d, pcf_d_asymptotic, pcf_d_series};
use crate::sweep::{figure_dataset, ode_limit_prob, FigureId, FigureOverrides, GridN, LONG_TIME_SWEEP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Specfun,
    Propagator,
    Analytic,
    Figures,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    /// Measured quantity; `passed` compares it with `limit` using `relation`.
    pub value: f64,
    pub limit: f64,
    pub relation: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub fast: bool,
    pub passed: bool,
    pub code_version: &'static str,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

enum Cmp {
    Below(f64),
    AtMost(f64),
    Above(f64),
}

type Measure = Result<(f64, Cmp), String>;

struct Runner {
    checks: Vec<CheckResult>,
}

impl Runner {
    fn run(&mut self, suite: &'static str, name: &'static str, f: impl FnOnce() -> Measure) {
        let r = match f() {
            Ok((value, cmp)) => {
                let (passed, limit, relation) = match cmp {
                    Cmp::Below(l) => (value < l, l, "<"),
                    Cmp::AtMost(l) => (value <= l, l, "<="),
                    Cmp::Above(l) => (value > l, l, ">"),
                };
                CheckResult { suite, name, passed, value, limit, relation, error: None }
            }
            Err(e) => CheckResult {
                suite,
                name,
                passed: false,
                value: f64::NAN,
                limit: f64::NAN,
                relation: "",
                error: Some(e),
            },
        };
        self.checks.push(r);
    }
}

fn s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Removes the forward run's norm drift before it is used as a start state.
fn unit(st: StatePair) -> StatePair {
    let k = st.norm_sqr().sqrt();
    StatePair::new(st.a_s / k, st.a_p / k)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn run_verify(suite: Suite, fast: bool) -> VerifyReport {
    let mut r = Runner { checks: vec![] };
    if suite.includes(Suite::Specfun) {
        specfun_checks(&mut r, fast);
    }
    if suite.includes(Suite::Propagator) {
        propagator_checks(&mut r, fast);
    }
    if suite.includes(Suite::Analytic) {
        analytic_checks(&mut r, fast);
    }
    if suite.includes(Suite::Figures) {
        figure_checks(&mut r, fast);
    }
    let passed = r.checks.iter().all(|c| c.passed);
    VerifyReport { suite, fast, passed, code_version: env!("CARGO_PKG_VERSION"), checks: r.checks }
}

/// Points r·e^{iφ} for r in `radii` and `n_ang` angles offset from the axes.
fn polar_lattice(radii: &[f64], n_ang: usize) -> Vec<Complex64> {
    let mut out = vec![];
    for &rad in radii {
        for k in 0..n_ang {
            out.push(Complex64::from_polar(rad, 0.37 + 2.0 * PI * k as f64 / n_ang as f64));
        }
    }
    out
}

fn d(nu: Complex64, z: Complex64) -> Result<Complex64, String> {
    pcf_d(nu, z).map(|r| r.value).map_err(s)
}

fn specfun_checks(r: &mut Runner, fast: bool) {
    const S: &str = "specfun";
    let n_ang = if fast { 5 } else { 9 };
    let nus = polar_lattice(&[0.0, 1.3, 2.9], if fast { 3 } else { 5 });
    let zs = polar_lattice(
        if fast { &[0.4, 5.0, 7.9, 8.1, 11.5] } else { &[0.4, 2.5, 5.0, 7.5, 7.9, 8.1, 9.5, 11.9] },
        n_ang,
    );

    r.run(S, "gamma_examples", || {
        let g1 = (complex_gamma(c(1.0, 0.0)).map_err(s)? - 1.0).norm();
        let gh = (complex_gamma(c(0.5, 0.0)).map_err(s)?.re / PI.sqrt() - 1.0).abs();
        let exact = (PI / PI.sinh()).sqrt();
        let gi = (complex_gamma(c(0.0, 1.0)).map_err(s)?.norm() / exact - 1.0).abs();
        Ok((g1.max(gh).max(gi), Cmp::Below(1e-12)))
    });
    r.run(S, "gamma_reflection", || {
        let mut worst = 0.0_f64;
        for z in polar_lattice(&[0.3, 1.7, 4.2], n_ang) {
            let lhs = complex_gamma(z).map_err(s)? * complex_gamma(1.0 - z).map_err(s)?;
            let rhs = PI / (PI * z).sin();
            worst = worst.max((lhs - rhs).norm() / rhs.norm());
        }
        Ok((worst, Cmp::Below(1e-11)))
    });
    r.run(S, "kummer_identities", || {
        let z = c(1.0, 1.0);
        let a = c(0.3, 0.2);
        let e1 = (kummer_m(a, a, z).map_err(s)?.value - z.exp()).norm() / z.exp().norm();
        let z = c(0.7, -0.3);
        let m = kummer_m(c(1.0, 0.0), c(2.0, 0.0), z).map_err(s)?.value;
        let ex = (z.exp() - 1.0) / z;
        let e2 = (m - ex).norm() / ex.norm();
        let e3 = (kummer_m(a, c(1.5, 0.0), c(0.0, 0.0)).map_err(s)?.value - 1.0).norm();
        Ok((e1.max(e2).max(e3), Cmp::Below(1e-13)))
    });
    r.run(S, "pcf_elementary_orders", || {
        let z = Complex64::from_polar(1.3, FRAC_PI_4);
        let e0 = (-z * z / 4.0).exp();
        let r0 = (d(c(0.0, 0.0), z)? - e0).norm() / e0.norm();
        let z = c(2.0, -1.0);
        let e1 = z * (-z * z / 4.0).exp();
        let r1 = (d(c(1.0, 0.0), z)? - e1).norm() / e1.norm();
        Ok((r0.max(r1), Cmp::Below(1e-12)))
    });
    r.run(S, "pcf_recurrence", || {
        let mut worst = 0.0_f64;
        for &nu in &nus {
            for &z in &zs {
                let (dp, d0, dm) = (d(nu + 1.0, z)?, d(nu, z)?, d(nu - 1.0, z)?);
                let scale = dp.norm().max((z * d0).norm()).max((nu * dm).norm());
                worst = worst.max((dp - z * d0 + nu * dm).norm() / scale);
            }
        }
        Ok((worst, Cmp::Below(1e-9)))
    });
    r.run(S, "pcf_derivative_identity", || {
        let mut worst = 0.0_f64;
        for &nu in &nus {
            for &z in &zs {
                let q = z.norm_sqr() / 4.0 + nu.norm() + 0.5;
                let h = 0.01 / (q + 1.0).sqrt();
                let der = (d(nu, z - 2.0 * h)? - 8.0 * d(nu, z - h)? + 8.0 * d(nu, z + h)?
                    - d(nu, z + 2.0 * h)?)
                    / (12.0 * h);
                let (w, wm) = (d(nu, z)?, d(nu - 1.0, z)?);
                let scale = der.norm().max((0.5 * z * w).norm()).max((nu * wm).norm());
                worst = worst.max((der + 0.5 * z * w - nu * wm).norm() / scale);
            }
        }
        Ok((worst, Cmp::Below(1e-8)))
    });
    r.run(S, "pcf_weber_residual", || {
        let mut worst = 0.0_f64;
        for &nu in &nus {
            for &z in &zs {
                let q = z.norm_sqr() / 4.0 + nu.norm() + 0.5;
                let h = 0.02 / (q + 1.0).sqrt();
                let w = d(nu, z)?;
                let w2 = (-d(nu, z + 2.0 * h)? + 16.0 * d(nu, z + h)? - 30.0 * w
                    + 16.0 * d(nu, z - h)?
                    - d(nu, z - 2.0 * h)?)
                    / (12.0 * h * h);
                worst = worst.max((w2 + (nu + 0.5 - z * z / 4.0) * w).norm() / w.norm());
            }
        }
        Ok((worst, Cmp::Below(1e-6)))
    });
    r.run(S, "pcf_branch_overlap", || {
        let orders = [c(0.0, -0.5), c(-1.0, -0.5), c(0.0, 0.1), c(-1.0, 0.1), c(0.0, -0.025)];
        let rays = [FRAC_PI_4, -FRAC_PI_4, 5.0 * FRAC_PI_4, 3.0 * FRAC_PI_4];
        let steps = if fast { 4 } else { 20 };
        let mut worst = 0.0_f64;
        for nu in orders {
            for ray in rays {
                for k in 0..=steps {
                    let z = Complex64::from_polar(7.0 + 2.0 * k as f64 / steps as f64, ray);
                    let a = pcf_d_asymptotic(nu, z).map_err(s)?.value;
                    let b = pcf_d_series(nu, z).map_err(s)?.value;
                    worst = worst.max((a - b).norm() / a.norm());
                }
            }
        }
        Ok((worst, Cmp::Below(1e-7)))
    });
}

fn propagator_checks(r: &mut Runner, fast: bool) {
    const S: &str = "propagator";
    let tol = DEFAULT_TOL;
    let sizes: &[u64] = if fast { &[50, 500] } else { &[50, 500, 5000] };

    r.run(S, "schedule_i_initial_fg", || {
        let mut worst = 0.0_f64;
        for n in [2, 50, 5000, 1_000_000] {
            let (f, g) = schedule_i_fg(&ScheduleI::new(n, 1.0, 0.7).map_err(s)?, 0.0);
            worst = worst.max((f - 1.0).abs()).max(g.abs());
        }
        Ok((worst, Cmp::Below(1e-12)))
    });
    r.run(S, "schedule_i_wronskian", || {
        let mut worst = 0.0_f64;
        for (n, alpha) in [(50, 0.5), (500, -0.1), (5000, 1.0)] {
            let sch = ScheduleI::new(n, 1.0, alpha).map_err(s)?;
            for k in 1..8 {
                let t = 0.1 * sch.tau() * k as f64;
                if sch.tc().is_some_and(|tc| (t - tc).abs() < 1e-3) {
                    continue;
                }
                let h = 1e-5;
                let (f, g) = schedule_i_fg(&sch, t);
                let (fp, gp) = schedule_i_fg(&sch, t + h);
                let (fm, gm) = schedule_i_fg(&sch, t - h);
                let lhs = (gp - gm) / (2.0 * h) * f - g * (fp - fm) / (2.0 * h);
                let rhs = sch.epsilon * (alpha * t + sch.gamma).powi(2);
                worst = worst.max((lhs - rhs).abs() / rhs.abs());
            }
        }
        Ok((worst, Cmp::Below(1e-5)))
    });
    r.run(S, "bloch_gap_schedule_i", || {
        let mut worst = 0.0_f64;
        for alpha in [1.0, -0.1] {
            let sch = ScheduleI::new(500, 1.0, alpha).map_err(s)?;
            for k in 0..50 {
                let t = 0.5 * k as f64;
                let b = bloch_decompose(&hamiltonian_i(&sch, t)).map_err(s)?;
                worst = worst.max((b.gap - (alpha * t + 1.0).abs()).abs());
            }
        }
        Ok((worst, Cmp::Below(1e-9)))
    });
    r.run(S, "bloch_gap_schedule_ii", || {
        let mut worst = 0.0_f64;
        for (a, b) in [(1.0, 4.5), (5.0, 4.5), (20.0, 0.0)] {
            let sch = ScheduleII::new(100, a, b).map_err(s)?;
            for k in 0..50 {
                let t = 0.2 * k as f64;
                let bl = bloch_decompose(&hamiltonian_ii(&sch, t)).map_err(s)?;
                worst = worst.max((bl.gap - 2.0 * sch.omega(t)).abs() / (2.0 * sch.omega(t)));
            }
        }
        Ok((worst, Cmp::Below(1e-12)))
    });
    r.run(S, "rotation_orthogonality", || {
        let mut worst = 0.0_f64;
        for k in 0..1000 {
            let th = -7.0 + 14.0 * k as f64 / 999.0;
            let u = eigenbasis_rotation(th);
            for i in 0..2 {
                for j in 0..2 {
                    let dot = u[0][i] * u[0][j] + u[1][i] * u[1][j];
                    worst = worst.max((dot - if i == j { 1.0 } else { 0.0 }).abs());
                }
            }
        }
        Ok((worst, Cmp::Below(1e-12)))
    });
    r.run(S, "mobile_initial_condition", || {
        let mut worst = 0.0_f64;
        for n in [2, 100, 5000, 1_000_000] {
            let sch = ScheduleI::new(n, 1.0, 1.0).map_err(s)?;
            let st = mobile_to_fixed(&MobilePair::ground(), sch.theta0(), 0.0);
            let psi = initial_state(&sch.problem());
            worst = worst.max((st.a_s - psi.a_s).norm()).max((st.a_p - psi.a_p).norm());
        }
        Ok((worst, Cmp::Below(1e-12)))
    });
    r.run(S, "norm_conservation", || {
        let mut worst = 0.0_f64;
        for &n in sizes {
            let sch = ScheduleI::new(n, 1.0, 1.0).map_err(s)?;
            let tr = simulate_i(&sch, &uniform_grid(2.0 * sch.tau(), 200), tol).map_err(s)?;
            worst = worst.max(tr.meta.max_norm_drift);
        }
        let sch = ScheduleII::new(100, 1.0, 4.5).map_err(s)?;
        let tr = simulate_ii(&sch, &uniform_grid(20.0, 200), tol).map_err(s)?;
        Ok((worst.max(tr.meta.max_norm_drift), Cmp::Below(100.0 * tol)))
    });
    r.run(S, "route_equivalence", || {
        let mut worst = 0.0_f64;
        for &n in sizes {
            let tau = ScheduleI::new(n, 1.0, 0.0).map_err(s)?.tau();
            for alpha in [-0.3 / tau, 0.0, 1.0] {
                let sch = ScheduleI::new(n, 1.0, alpha).map_err(s)?;
                let grid = uniform_grid(2.0 * tau, 200);
                let fixed = simulate_i(&sch, &grid, tol).map_err(s)?;
                let mobile = integrate_mobile(&sch, MobilePair::ground(), &grid, tol).map_err(s)?;
                for (smp, (t, m)) in fixed.samples.iter().zip(&mobile) {
                    let st = mobile_to_fixed(m, sch.theta(*t), m.accumulated_phase);
                    worst = worst.max((st.p_s() - smp.p_s).abs());
                }
            }
        }
        Ok((worst, Cmp::Below(1e-6)))
    });
    r.run(S, "time_reversal", || {
        let mut worst = 0.0_f64;
        let sch = ScheduleI::new(500, 1.0, 0.5).map_err(s)?;
        let big_t = 1.5 * sch.tau();
        let psi0 = initial_state(&sch.problem());
        let fwd = integrate_fixed(|t| hamiltonian_i(&sch, t), psi0, &[0.0, big_t], tol).map_err(s)?;
        let back = integrate_fixed(
            |u| hamiltonian_i(&sch, big_t - u).scaled(-1.0),
            unit(fwd.samples[1].state),
            &[0.0, big_t],
            tol,
        )
        .map_err(s)?;
        let end = back.samples[1].state;
        worst = worst.max((end.a_s - psi0.a_s).norm()).max((end.a_p - psi0.a_p).norm());
        let sch2 = ScheduleII::new(100, 5.0, 4.5).map_err(s)?;
        let psi0 = initial_state(&sch2.problem());
        let fwd = integrate_fixed(|t| hamiltonian_ii(&sch2, t), psi0, &[0.0, 5.0], tol).map_err(s)?;
        let back = integrate_fixed(
            |u| hamiltonian_ii(&sch2, 5.0 - u).scaled(-1.0),
            unit(fwd.samples[1].state),
            &[0.0, 5.0],
            tol,
        )
        .map_err(s)?;
        let end = back.samples[1].state;
        worst = worst.max((end.a_s - psi0.a_s).norm()).max((end.a_p - psi0.a_p).norm());
        Ok((worst, Cmp::Below(1e-6)))
    });
    r.run(S, "global_phase_immunity", || {
        let mut worst = 0.0_f64;
        let sch = ScheduleI::new(500, 1.0, 1.0).map_err(s)?;
        let grid = uniform_grid(2.0 * sch.tau(), 100);
        let psi0 = initial_state(&sch.problem());
        let base = integrate_fixed(|t| hamiltonian_i(&sch, t), psi0, &grid, 1e-12).map_err(s)?;
        let shifted = integrate_fixed(
            |t| {
                let (f, g) = schedule_i_fg(&sch, t);
                hamiltonian_i(&sch, t).add_identity(0.5 * (f + g))
            },
            psi0,
            &grid,
            tol,
        )
        .map_err(s)?;
        for (x, y) in base.samples.iter().zip(&shifted.samples) {
            worst = worst.max((x.p_s - y.p_s).abs());
        }
        let sch2 = ScheduleII::new(1_000_000, 1.0, 4.5).map_err(s)?;
        let grid = uniform_grid(20.0, 100);
        let psi0 = initial_state(&sch2.problem());
        let base = integrate_fixed(|t| hamiltonian_ii(&sch2, t), psi0, &grid, 1e-12).map_err(s)?;
        let phys = integrate_fixed(|t| hamiltonian_ii_with(&sch2, t, true), psi0, &grid, 1e-12).map_err(s)?;
        for (x, y) in base.samples.iter().zip(&phys.samples) {
            worst = worst.max((x.p_s - y.p_s).abs());
        }
        Ok((worst, Cmp::Below(1e-10)))
    });
}

fn analytic_checks(r: &mut Runner, fast: bool) {
    const S: &str = "analytic";
    let tol = DEFAULT_TOL;
    let samples = if fast { 60 } else { 200 };

    r.run(S, "peak_time_arithmetic", || {
        let sch = ScheduleI::new(100, 1.0, 1.0).map_err(s)?;
        let t = alg_i_peak_times(&sch, 1)[0];
        Ok(((t - PI * 100.0 / (2.0 * 99f64.sqrt())).abs(), Cmp::Below(1e-12)))
    });
    r.run(S, "alg_i_pcf_vs_ode", || {
        let mut worst = 0.0_f64;
        let sizes: &[u64] = if fast { &[500] } else { &[50, 500, 5000] };
        for &n in sizes {
            let tau = ScheduleI::new(n, 1.0, 0.0).map_err(s)?.tau();
            for alpha in [1.0, 0.3, 0.5, -0.31 / tau] {
                let sch = ScheduleI::new(n, 1.0, alpha).map_err(s)?;
                let sol = alg_i_solution(&sch).map_err(s)?;
                let t_end = sch.tc().map_or(2.0 * tau, |tc| tc.min(2.0 * tau));
                let grid = uniform_grid(t_end, samples);
                let ode = integrate_mobile(&sch, MobilePair::ground(), &grid, tol).map_err(s)?;
                for (t, m) in &ode {
                    let a = alg_i_amplitudes(&sol, &sch, *t).map_err(s)?;
                    worst = worst
                        .max((a.a_minus.norm() - m.a_minus.norm()).abs())
                        .max((a.a_plus.norm() - m.a_plus.norm()).abs());
                }
            }
        }
        Ok((worst, Cmp::Below(1e-5)))
    });
    r.run(S, "alg_i_alpha0_vs_ode", || {
        let sch = ScheduleI::new(500, 1.0, 0.0).map_err(s)?;
        let grid = uniform_grid(2.0 * sch.tau(), samples);
        let ode = integrate_mobile(&sch, MobilePair::ground(), &grid, 1e-12).map_err(s)?;
        let mut worst = 0.0_f64;
        for (t, m) in &ode {
            let a = alg_i_alpha0(&sch, *t).map_err(s)?;
            worst = worst
                .max((a.a_minus.norm() - m.a_minus.norm()).abs())
                .max((a.a_plus.norm() - m.a_plus.norm()).abs());
        }
        Ok((worst, Cmp::Below(1e-8)))
    });
    r.run(S, "alg_ii_initial_values", || {
        let mut worst = 0.0_f64;
        for (n, a, b) in [(2, 1.0, 0.0), (100, 1.0, 4.5), (1_000_000, 20.0, 4.5)] {
            let sol = alg_ii_solution(n, a, b).map_err(s)?;
            let st = alg_ii_amplitudes(&sol, 0.0).map_err(s)?;
            let psi = initial_state(&ScheduleII::new(n, a, b).map_err(s)?.problem());
            worst = worst.max((st.a_s - psi.a_s).norm()).max((st.a_p - psi.a_p).norm());
        }
        Ok((worst, Cmp::Below(1e-9)))
    });
    r.run(S, "alg_ii_pcf_vs_ode", || {
        let mut worst = 0.0_f64;
        let sizes: &[u64] = if fast { &[100] } else { &[100, 1_000_000] };
        for &n in sizes {
            for a in [1.0, 5.0, 20.0] {
                let sch = ScheduleII::new(n, a, 4.5).map_err(s)?;
                let sol = alg_ii_solution(n, a, 4.5).map_err(s)?;
                let tr = simulate_ii(&sch, &uniform_grid(3.0 * sch.tc() + 5.0, samples), tol)
                    .map_err(s)?;
                for smp in &tr.samples {
                    let st: StatePair = alg_ii_amplitudes(&sol, smp.t).map_err(s)?;
                    worst = worst.max((st.p_s() - smp.p_s).abs());
                }
            }
        }
        Ok((worst, Cmp::Below(1e-5)))
    });
    r.run(S, "limit_vs_long_time_ode", || {
        let cells: &[(f64, f64)] =
            if fast { &[(1.0, 4.5), (7.0, 2.0)] } else { &[(1.0, 4.5), (5.0, 4.5), (20.0, 4.5), (0.6, 1.0), (7.0, 2.0), (13.0, 9.0)] };
        let mut worst = 0.0_f64;
        for &(a, b) in cells {
            let p = alg_ii_limit_prob(100, a, b).map_err(s)?.value;
            let o = ode_limit_prob(GridN::Finite(100), a, b, LONG_TIME_SWEEP, tol).map_err(s)?;
            worst = worst.max((p - o).abs());
        }
        Ok((worst, Cmp::Below(1e-3)))
    });
    r.run(S, "limit_large_n_saturation", || {
        let inf = alg_ii_limit_prob_inf(1.0, 4.5).map_err(s)?.value;
        let big = alg_ii_limit_prob(100_000_000, 1.0, 4.5).map_err(s)?.value;
        Ok(((inf - big).abs(), Cmp::Below(1e-3)))
    });
    r.run(S, "limit_sudden_sweep", || {
        let mut worst = 0.0_f64;
        for b in [0.0, 4.5, 10.0] {
            worst = worst.max((alg_ii_limit_prob(100, 1e3, b).map_err(s)?.value - 0.01).abs());
        }
        Ok((worst, Cmp::Below(1e-2)))
    });
}

fn figure_checks(r: &mut Runner, fast: bool) {
    const S: &str = "figures";
    let ov = FigureOverrides { samples: Some(if fast { 400 } else { 2000 }), tol: None };

    let fig1 = figure_dataset(FigureId::Fig1, &ov, None);
    r.run(S, "fig1_peak_at_tau", || {
        let curves = fig1.as_ref().map_err(s)?;
        // N = 5000: the first maximum sits at t = τ
        let c = &curves[2];
        let (mut best, mut t_best) = (0.0, 0.0);
        for smp in &c.trajectory.samples {
            let u = smp.t / c.time_unit;
            if (0.5..1.5).contains(&u) && smp.p_s > best {
                best = smp.p_s;
                t_best = u;
            }
        }
        if (t_best - 1.0).abs() > 0.01 {
            return Err(format!("peak at t/tau = {t_best}"));
        }
        Ok((best, Cmp::Above(0.99)))
    });
    r.run(S, "fig1_resonance_improves_with_n", || {
        let curves = fig1.as_ref().map_err(s)?;
        let mut devs = vec![];
        for cv in curves {
            let sch = match cv.trajectory.meta.schedule {
                crate::propagator::ScheduleTag::I(sch) => sch,
                _ => return Err("unexpected schedule".into()),
            };
            let dev = cv
                .trajectory
                .samples
                .iter()
                .filter(|x| x.t <= 2.0 * cv.time_unit)
                .map(|x| (x.p_s - alg_i_approx_probs(&sch, x.t).0).abs())
                .fold(0.0, f64::max);
            devs.push(dev);
        }
        let rise = devs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        Ok((rise, Cmp::AtMost(0.0)))
    });

    let fig2 = figure_dataset(FigureId::Fig2, &ov, None);
    r.run(S, "fig2_breakdown_after_tc", || {
        let curves = fig2.as_ref().map_err(s)?;
        let mut worst_pre = 0.0_f64;
        let mut weakest_post = f64::INFINITY;
        for cv in curves {
            let sch = match cv.trajectory.meta.schedule {
                crate::propagator::ScheduleTag::I(sch) => sch,
                _ => return Err("unexpected schedule".into()),
            };
            let tc = sch.tc().ok_or("no crossing")?;
            let (mut pre, mut post) = (0.0_f64, 0.0_f64);
            for x in &cv.trajectory.samples {
                let dev = (x.p_s - alg_i_approx_probs(&sch, x.t).0).abs();
                if x.t < 0.9 * tc {
                    pre = pre.max(dev);
                } else if x.t > tc {
                    post = post.max(dev);
                }
            }
            worst_pre = worst_pre.max(pre);
            weakest_post = weakest_post.min(post);
        }
        if worst_pre >= 0.05 {
            return Err(format!("deviation {worst_pre} before 0.9 t_c"));
        }
        Ok((weakest_post, Cmp::Above(0.05)))
    });
    r.run(S, "fig2_tc_inverse_alpha", || {
        let curves = fig2.as_ref().map_err(s)?;
        let mut worst = 0.0_f64;
        for cv in curves {
            let sch = match cv.trajectory.meta.schedule {
                crate::propagator::ScheduleTag::I(sch) => sch,
                _ => return Err("unexpected schedule".into()),
            };
            // gap minimum located on the sample grid
            let mut best = (f64::INFINITY, 0.0);
            for x in &cv.trajectory.samples {
                let gap = bloch_decompose(&hamiltonian_i(&sch, x.t)).map_err(s)?.gap;
                if gap < best.0 {
                    best = (gap, x.t);
                }
            }
            worst = worst.max((best.1 * sch.alpha.abs() - 1.0).abs());
        }
        Ok((worst, Cmp::Below(0.01)))
    });

    let fig5 = figure_dataset(FigureId::Fig5, &ov, None);
    r.run(S, "fig5_settles_to_limit", || {
        let curves = fig5.as_ref().map_err(s)?;
        let mut worst = 0.0_f64;
        for cv in curves {
            let sch = match cv.trajectory.meta.schedule {
                crate::propagator::ScheduleTag::II(sch) => sch,
                _ => return Err("unexpected schedule".into()),
            };
            let p = alg_ii_limit_prob(sch.problem().n, sch.a, sch.b).map_err(s)?.value;
            let tail: Vec<f64> =
                cv.trajectory.samples.iter().filter(|x| x.t >= 15.0).map(|x| x.p_s).collect();
            let mean = tail.iter().sum::<f64>() / tail.len() as f64;
            worst = worst.max((mean - p).abs());
        }
        Ok((worst, Cmp::Below(0.01)))
    });
    r.run(S, "fig5_norm_drift", || {
        let curves = fig5.as_ref().map_err(s)?;
        let drift = curves.iter().map(|c| c.trajectory.meta.max_norm_drift).fold(0.0, f64::max);
        Ok((drift, Cmp::Below(1e-8)))
    });
}
