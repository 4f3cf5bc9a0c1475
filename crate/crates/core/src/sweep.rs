//! Parameter sweeps, figure datasets and their on-disk formats.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::analytic::{alg_ii_limit_prob, alg_ii_limit_prob_inf, AnalyticError, LIMIT_ACCURACY};
use crate::model::{
    bloch_decompose, eigenbasis_rotation, hamiltonian_ii, ModelError, ScheduleI, ScheduleII,
};
use crate::propagator::{
    integrate_fixed_tagged, simulate_i, simulate_ii, uniform_grid, PropagatorError, ScheduleTag,
    StatePair, Trajectory, DEFAULT_TOL,
};
use crate::specfun::PcfOptions;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "NASEARCH_WORKERS";
/// Points per plotted window.
pub const FIGURE_SAMPLES: usize = 2000;
pub const TRAJECTORY_CSV_HEADER: &str = "t,P_s,P_p,re_as,im_as,re_ap,im_ap";
/// a·(T − t_c) reached by the long-time ODE reference.
pub const LONG_TIME_SWEEP: f64 = 80.0;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Database size: a count, or the N → ∞ limit (written as `"inf"`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridN {
    Finite(u64),
    Infinite,
}

impl fmt::Display for GridN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridN::Finite(n) => write!(f, "{n}"),
            GridN::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for GridN {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(GridN::Infinite);
        }
        let n: u64 = s
            .parse()
            .or_else(|_| {
                // accept 1e6-style input when it is an exact integer
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.fract() == 0.0 && *v >= 0.0 && *v < 1.8e19)
                    .map(|v| v as u64)
                    .ok_or(())
            })
            .map_err(|_| format!("N must be an integer or \"inf\", got {s:?}"))?;
        if n < 2 {
            return Err(format!("N = {n}: need N >= 2"));
        }
        Ok(GridN::Finite(n))
    }
}

impl Serialize for GridN {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            GridN::Finite(n) => s.serialize_u64(*n),
            GridN::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for GridN {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(GridN::Finite(n)),
            Raw::S(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub a_min: f64,
    pub a_max: f64,
    pub b_min: f64,
    pub b_max: f64,
    pub n_a: usize,
    pub n_b: usize,
    #[serde(rename = "N")]
    pub n: GridN,
}

impl GridSpec {
    /// a ∈ [0.2, 25], b ∈ [0, 10], 250 × 250.
    pub fn default_for(n: GridN) -> Self {
        Self { a_min: 0.2, a_max: 25.0, b_min: 0.0, b_max: 10.0, n_a: 250, n_b: 250, n }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |m: String| Err(SweepError::InvalidGrid(m));
        if ![self.a_min, self.a_max, self.b_min, self.b_max].iter().all(|v| v.is_finite()) {
            return bad("non-finite range".into());
        }
        if self.a_min <= 0.0 {
            return bad(format!("a_min = {} must be > 0", self.a_min));
        }
        if self.n_a == 0 || self.n_b == 0 {
            return bad(format!("empty grid {}x{}", self.n_a, self.n_b));
        }
        if self.a_max < self.a_min || self.b_max < self.b_min {
            return bad("ranges must be increasing".into());
        }
        if (self.n_a > 1 && self.a_max == self.a_min) || (self.n_b > 1 && self.b_max == self.b_min) {
            return bad("several cells on a zero-width range".into());
        }
        Ok(())
    }

    fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![lo];
        }
        (0..n).map(|k| if k == n - 1 { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect()
    }

    pub fn a_values(&self) -> Vec<f64> {
        Self::axis(self.a_min, self.a_max, self.n_a)
    }

    pub fn b_values(&self) -> Vec<f64> {
        Self::axis(self.b_min, self.b_max, self.n_b)
    }
}

/// Per-cell provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFlag {
    pub accurate: bool,
    pub clamped: bool,
    pub raw: f64,
    pub estimated_error: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityGrid {
    pub spec: GridSpec,
    pub a_values: Vec<f64>,
    pub b_values: Vec<f64>,
    /// `p[i][j]` = p(a_j, b_i); `None` where evaluation failed.
    pub p: Vec<Vec<Option<f64>>>,
    pub flags: Vec<Vec<CellFlag>>,
}

impl ProbabilityGrid {
    pub fn cells(&self) -> usize {
        self.spec.n_a * self.spec.n_b
    }

    pub fn accurate_fraction(&self) -> f64 {
        let ok = self.flags.iter().flatten().filter(|f| f.accurate).count();
        ok as f64 / self.cells() as f64
    }

    pub fn failed_cells(&self) -> Vec<(usize, usize)> {
        let mut out = vec![];
        for (i, row) in self.p.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if v.is_none() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// max |p − other.p| over cells present in both.
    pub fn max_abs_difference(&self, other: &ProbabilityGrid) -> Option<f64> {
        let mut worst: Option<f64> = None;
        for (r1, r2) in self.p.iter().zip(&other.p) {
            for (v1, v2) in r1.iter().zip(r2) {
                if let (Some(x), Some(y)) = (v1, v2) {
                    let d = (x - y).abs();
                    worst = Some(worst.map_or(d, |w| w.max(d)));
                }
            }
        }
        worst
    }
}

/// Limiting probability of one cell.
pub fn limit_cell(n: GridN, a: f64, b: f64) -> Result<crate::analytic::LimitProbability, AnalyticError> {
    match n {
        GridN::Finite(n) => alg_ii_limit_prob(n, a, b),
        GridN::Infinite => alg_ii_limit_prob_inf(a, b),
    }
}

fn eval_cell(n: GridN, a: f64, b: f64) -> (Option<f64>, CellFlag) {
    match limit_cell(n, a, b) {
        Ok(lp) => (
            Some(lp.value),
            CellFlag {
                accurate: lp.accurate(),
                clamped: lp.clamped(),
                raw: lp.raw,
                estimated_error: lp.estimated_error,
                error: None,
            },
        ),
        Err(e) => (
            None,
            CellFlag {
                accurate: false,
                clamped: false,
                raw: f64::NAN,
                estimated_error: f64::INFINITY,
                error: Some(e.to_string()),
            },
        ),
    }
}

/// Worker count: explicit value, else `NASEARCH_WORKERS`, else rayon's default.
pub fn resolve_workers(explicit: Option<usize>) -> Option<usize> {
    explicit.or_else(|| std::env::var(WORKERS_ENV).ok()?.trim().parse().ok()).filter(|&w| w > 0)
}

fn with_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T, SweepError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = resolve_workers(workers) {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| SweepError::Pool(e.to_string()))?;
    Ok(pool.install(job))
}

/// Evaluates p(a_j, b_i) on the grid. Cells are independent; the output
/// does not depend on the number of workers or their scheduling.
pub fn sweep_ab(spec: &GridSpec, workers: Option<usize>) -> Result<ProbabilityGrid, SweepError> {
    spec.validate()?;
    let (av, bv) = (spec.a_values(), spec.b_values());
    let cells: Vec<(usize, usize)> =
        (0..spec.n_b).flat_map(|i| (0..spec.n_a).map(move |j| (i, j))).collect();
    let n = spec.n;
    let results: Vec<(Option<f64>, CellFlag)> = with_pool(workers, || {
        cells.par_iter().map(|&(i, j)| eval_cell(n, av[j], bv[i])).collect()
    })?;
    Ok(assemble(spec, av, bv, results))
}

/// Single-threaded reference evaluation of the same grid.
pub fn sweep_ab_sequential(spec: &GridSpec) -> Result<ProbabilityGrid, SweepError> {
    spec.validate()?;
    let (av, bv) = (spec.a_values(), spec.b_values());
    let mut results = Vec::with_capacity(spec.n_a * spec.n_b);
    for &b in &bv {
        for &a in &av {
            results.push(eval_cell(spec.n, a, b));
        }
    }
    Ok(assemble(spec, av, bv, results))
}

fn assemble(
    spec: &GridSpec,
    a_values: Vec<f64>,
    b_values: Vec<f64>,
    results: Vec<(Option<f64>, CellFlag)>,
) -> ProbabilityGrid {
    let mut p = Vec::with_capacity(spec.n_b);
    let mut flags = Vec::with_capacity(spec.n_b);
    let mut it = results.into_iter();
    for _ in 0..spec.n_b {
        let (row, frow): (Vec<_>, Vec<_>) = it.by_ref().take(spec.n_a).unzip();
        p.push(row);
        flags.push(frow);
    }
    ProbabilityGrid { spec: *spec, a_values, b_values, p, flags }
}

/// Long-time ODE value of the limiting probability: the population of the
/// upper adiabatic level of H′ at T = max(b/a, 0) + sweep/a. That level
/// tends to |s⟩, and its population settles much faster than P_s itself,
/// whose interference term decays only like 1/(at − b).
pub fn ode_limit_prob(n: GridN, a: f64, b: f64, sweep: f64, tol: f64) -> Result<f64, SweepError> {
    let s = ScheduleII::new(2, a, b)?;
    let psi0 = match n {
        GridN::Finite(n) => crate::model::initial_state(&ScheduleII::new(n, a, b)?.problem()),
        GridN::Infinite => StatePair::new(0.0.into(), 1.0.into()),
    };
    let t_end = s.tc().max(0.0) + sweep / a;
    let tr = integrate_fixed_tagged(|t| hamiltonian_ii(&s, t), psi0, &[0.0, t_end], tol, ScheduleTag::II(s))?;
    let st = tr.samples[1].state;
    Ok(upper_level_population(&s, t_end, &st)?)
}

/// |⟨E₊(t)|ψ⟩|² for the working Hamiltonian H′ of Algorithm II.
pub fn upper_level_population(s: &ScheduleII, t: f64, st: &StatePair) -> Result<f64, ModelError> {
    let bloch = bloch_decompose(&hamiltonian_ii(s, t))?;
    let u = eigenbasis_rotation(bloch.theta);
    Ok((st.a_s * u[0][0] + st.a_p * u[1][0]).norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig5,
}

impl FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fig1" | "1" => Ok(FigureId::Fig1),
            "fig2" | "2" => Ok(FigureId::Fig2),
            "fig5" | "5" => Ok(FigureId::Fig5),
            other => Err(format!("unknown figure {other:?} (expected fig1, fig2 or fig5)")),
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig5 => "fig5",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FigureOverrides {
    pub samples: Option<usize>,
    pub tol: Option<f64>,
}

/// One curve of a figure.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureCurve {
    pub label: String,
    /// Divide t by this when writing (τ for figures 1–2, 1 for figure 5).
    pub time_unit: f64,
    pub time_unit_name: &'static str,
    pub trajectory: Trajectory,
}

enum CurveJob {
    I(String, ScheduleI, f64, f64),
    II(String, ScheduleII, f64),
}

pub fn figure_dataset(
    id: FigureId,
    overrides: &FigureOverrides,
    workers: Option<usize>,
) -> Result<Vec<FigureCurve>, SweepError> {
    let samples = overrides.samples.unwrap_or(FIGURE_SAMPLES);
    let tol = overrides.tol.unwrap_or(DEFAULT_TOL);
    if samples < 2 {
        return Err(SweepError::InvalidGrid(format!("samples = {samples} must be >= 2")));
    }
    let jobs: Vec<CurveJob> = match id {
        FigureId::Fig1 => [50u64, 500, 5000]
            .iter()
            .map(|&n| {
                let s = ScheduleI::new(n, 1.0, 1.0)?;
                Ok(CurveJob::I(format!("N{n}"), s, 3.0 * s.tau(), s.tau()))
            })
            .collect::<Result<_, ModelError>>()?,
        FigureId::Fig2 => {
            let tau = ScheduleI::new(5000, 1.0, 0.0)?.tau();
            [("m031", -0.31), ("m010", -0.10), ("m005", -0.05)]
                .iter()
                .map(|&(tag, f)| {
                    // α in units of γ/τ, γ = 1
                    let s = ScheduleI::new(5000, 1.0, f / tau)?;
                    let tc = s.tc().expect("negative alpha");
                    Ok(CurveJob::I(format!("alpha_{tag}"), s, 2.0 * tc, tau))
                })
                .collect::<Result<_, ModelError>>()?
        }
        FigureId::Fig5 => [1.0, 5.0, 20.0]
            .iter()
            .map(|&a| Ok(CurveJob::II(format!("a{a}"), ScheduleII::new(1_000_000, a, 4.5)?, 20.0)))
            .collect::<Result<_, ModelError>>()?,
    };
    let out: Vec<Result<FigureCurve, SweepError>> = with_pool(workers, || {
        jobs.par_iter()
            .map(|job| match job {
                CurveJob::I(label, s, t_max, tau) => Ok(FigureCurve {
                    label: label.clone(),
                    time_unit: *tau,
                    time_unit_name: "tau",
                    trajectory: simulate_i(s, &uniform_grid(*t_max, samples), tol)?,
                }),
                CurveJob::II(label, s, t_max) => Ok(FigureCurve {
                    label: label.clone(),
                    time_unit: 1.0,
                    time_unit_name: "absolute",
                    trajectory: simulate_ii(s, &uniform_grid(*t_max, samples), tol)?,
                }),
            })
            .collect()
    })?;
    out.into_iter().collect()
}

/// Trajectory CSV; times are divided by `time_unit`.
pub fn write_trajectory_csv(
    w: &mut impl Write,
    traj: &Trajectory,
    time_unit: f64,
) -> io::Result<()> {
    writeln!(w, "{TRAJECTORY_CSV_HEADER}")?;
    for s in &traj.samples {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            s.t / time_unit,
            s.p_s,
            s.p_p,
            s.state.a_s.re,
            s.state.a_s.im,
            s.state.a_p.re,
            s.state.a_p.im
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub parameters: GridSpec,
    pub tolerances: GridTolerances,
    pub code_version: String,
    pub cells: usize,
    pub accurate_fraction: f64,
    pub clamped_cells: Vec<[usize; 2]>,
    pub failed_cells: Vec<[usize; 2]>,
    pub max_estimated_error: f64,
    /// Resolved run configuration, when produced by the CLI.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub config: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridTolerances {
    pub limit_accuracy: f64,
    pub pcf_max_rel_error: f64,
}

#[derive(Serialize)]
struct GridJson<'a> {
    a_values: &'a [f64],
    b_values: &'a [f64],
    p: &'a [Vec<Option<f64>>],
    #[serde(rename = "N")]
    n: GridN,
    meta: &'a GridMeta,
}

pub fn grid_meta(grid: &ProbabilityGrid, config: Option<serde_json::Value>) -> GridMeta {
    let mut clamped = vec![];
    let mut max_err: f64 = 0.0;
    for (i, row) in grid.flags.iter().enumerate() {
        for (j, f) in row.iter().enumerate() {
            if f.clamped {
                clamped.push([i, j]);
            }
            if f.error.is_none() {
                max_err = max_err.max(f.estimated_error);
            }
        }
    }
    GridMeta {
        parameters: grid.spec,
        tolerances: GridTolerances {
            limit_accuracy: LIMIT_ACCURACY,
            pcf_max_rel_error: PcfOptions::default().max_rel_error,
        },
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        cells: grid.cells(),
        accurate_fraction: grid.accurate_fraction(),
        clamped_cells: clamped,
        failed_cells: grid.failed_cells().into_iter().map(|(i, j)| [i, j]).collect(),
        max_estimated_error: max_err,
        config,
    }
}

/// Grid JSON: `a_values`, `b_values`, `p` (rows indexed by b), `N`, `meta`.
pub fn write_grid_json(w: &mut impl Write, grid: &ProbabilityGrid, meta: &GridMeta) -> Result<(), SweepError> {
    let doc = GridJson {
        a_values: &grid.a_values,
        b_values: &grid.b_values,
        p: &grid.p,
        n: grid.spec.n,
        meta,
    };
    serde_json::to_writer_pretty(&mut *w, &doc)?;
    writeln!(w)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(n: GridN) -> GridSpec {
        GridSpec { a_min: 0.5, a_max: 10.0, b_min: 0.0, b_max: 6.0, n_a: 7, n_b: 5, n }
    }

    #[test]
    fn grid_n_parsing_and_json() {
        assert_eq!("inf".parse::<GridN>(), Ok(GridN::Infinite));
        assert_eq!("1e6".parse::<GridN>(), Ok(GridN::Finite(1_000_000)));
        assert_eq!("100".parse::<GridN>(), Ok(GridN::Finite(100)));
        assert!("1".parse::<GridN>().is_err() && "x".parse::<GridN>().is_err());
        assert_eq!(serde_json::to_string(&GridN::Infinite).unwrap(), "\"inf\"");
        assert_eq!(serde_json::from_str::<GridN>("100").unwrap(), GridN::Finite(100));
        assert_eq!(serde_json::from_str::<GridN>("\"inf\"").unwrap(), GridN::Infinite);
    }

    #[test]
    fn spec_validation() {
        assert!(small(GridN::Finite(100)).validate().is_ok());
        let mut s = small(GridN::Finite(100));
        s.a_min = 0.0;
        assert!(s.validate().is_err());
        let mut s = small(GridN::Finite(100));
        s.b_max = -1.0;
        assert!(s.validate().is_err());
        let d = GridSpec::default_for(GridN::Infinite);
        assert_eq!((d.a_values()[249], d.b_values()[0], d.a_values().len()), (25.0, 0.0, 250));
    }

    #[test]
    fn single_cell_is_the_limit() {
        let spec = GridSpec { a_min: 1.0, a_max: 1.0, b_min: 4.5, b_max: 4.5, n_a: 1, n_b: 1, n: GridN::Finite(1_000_000) };
        let g = sweep_ab(&spec, Some(1)).unwrap();
        assert_eq!(g.p[0][0], Some(alg_ii_limit_prob(1_000_000, 1.0, 4.5).unwrap().value));
    }

    #[test]
    fn parallel_equals_sequential() {
        for n in [GridN::Finite(100), GridN::Infinite] {
            let par = sweep_ab(&small(n), Some(4)).unwrap();
            let seq = sweep_ab_sequential(&small(n)).unwrap();
            assert_eq!(par, seq);
            assert!(par.p.iter().flatten().all(|v| v.is_some_and(|p| (0.0..=1.0).contains(&p))));
            assert_eq!(par.accurate_fraction(), 1.0);
        }
    }

    #[test]
    fn grid_json_layout_and_determinism() {
        let g = sweep_ab(&small(GridN::Infinite), Some(2)).unwrap();
        let meta = grid_meta(&g, None);
        let (mut a, mut b) = (vec![], vec![]);
        write_grid_json(&mut a, &g, &meta).unwrap();
        write_grid_json(&mut b, &sweep_ab(&small(GridN::Infinite), Some(3)).unwrap(), &meta).unwrap();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
        assert_eq!(v["N"], "inf");
        assert_eq!(v["p"].as_array().unwrap().len(), 5);
        assert_eq!(v["p"][0].as_array().unwrap().len(), 7);
        assert_eq!(v["a_values"].as_array().unwrap().len(), 7);
        assert!(v["meta"]["code_version"].is_string());
    }

    #[test]
    fn csv_format() {
        let s = ScheduleII::new(100, 1.0, 4.5).unwrap();
        let tr = simulate_ii(&s, &uniform_grid(1.0, 3), 1e-10).unwrap();
        let mut buf = vec![];
        write_trajectory_csv(&mut buf, &tr, 1.0).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines[0], TRAJECTORY_CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[4], "");
        assert!(lines[1].starts_with("0.0000000000000000e0,1.00000000000000"));
        for line in &lines[1..4] {
            let vals: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
            assert_eq!(vals.len(), 7);
        }
        assert!(!text.contains('\r'));
    }

    #[test]
    fn ode_reference_matches_limit() {
        for (a, b) in [(1.0, 4.5), (7.0, 2.0)] {
            let p = alg_ii_limit_prob(100, a, b).unwrap().value;
            let o = ode_limit_prob(GridN::Finite(100), a, b, LONG_TIME_SWEEP, 1e-10).unwrap();
            assert!((p - o).abs() < 1e-4, "a={a} b={b}: {p} vs {o}");
        }
        let p = alg_ii_limit_prob_inf(2.0, 3.0).unwrap().value;
        let o = ode_limit_prob(GridN::Infinite, 2.0, 3.0, LONG_TIME_SWEEP, 1e-10).unwrap();
        assert!((p - o).abs() < 1e-4);
    }

    #[test]
    fn figure_parameters() {
        let o = FigureOverrides { samples: Some(20), tol: Some(1e-8) };
        let f1 = figure_dataset(FigureId::Fig1, &o, Some(2)).unwrap();
        assert_eq!(f1.len(), 3);
        for c in &f1 {
            let t_end = c.trajectory.samples.last().unwrap().t / c.time_unit;
            assert!((t_end - 3.0).abs() < 1e-12);
        }
        let f2 = figure_dataset(FigureId::Fig2, &o, None).unwrap();
        let tcs: Vec<f64> = f2
            .iter()
            .map(|c| c.trajectory.samples.last().unwrap().t / (2.0 * c.time_unit))
            .collect();
        for (tc, f) in tcs.iter().zip([0.31, 0.10, 0.05]) {
            assert!((tc * f - 1.0).abs() < 1e-12);
        }
        let f5 = figure_dataset(FigureId::Fig5, &o, None).unwrap();
        assert_eq!(f5[2].trajectory.meta.schedule, ScheduleTag::II(ScheduleII::new(1_000_000, 20.0, 4.5).unwrap()));
        assert!("fig3".parse::<FigureId>().is_err());
    }
}
