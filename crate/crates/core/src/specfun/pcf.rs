//! Parabolic cylinder function D_ν(z), the solution of Weber's equation
//!
//! ```text
//! W'' + (ν + 1/2 - z²/4) W = 0,   D_ν(z) ~ z^ν e^{-z²/4}  (z → +∞)
//! ```
//!
//! Three evaluation regimes:
//!
//! * `|z| <= series_radius`: the Kummer representation
//!   `D_ν(z) = 2^{ν/2} e^{-z²/4} [√π/Γ((1-ν)/2) M(-ν/2, 1/2, z²/2)
//!   - √(2π) z/Γ(-ν/2) M((1-ν)/2, 3/2, z²/2)]`.
//!   The two terms cancel roughly like `e^{|z|²/2}`, so the radius is kept small.
//! * annulus: Taylor continuation of Weber's equation along the ray through `z`,
//!   started at the origin (outward) or on the asymptotic circle (inward). The
//!   direction is chosen so the propagated solution is never the recessive one.
//!   Where the path still loses digits (integer ν near the negative axis, say)
//!   the expansion below is tried too and the smaller error estimate wins.
//! * `|z| >= max(z_switch, 2|ν| + 4)`: Poincaré expansion. For `|arg z| > π/2`
//!   the connection term `-√(2π)/Γ(-ν) e^{±iπν} e^{z²/4} z^{-ν-1} Σ` is added;
//!   it is switched on across the Stokes lines `arg z = ±π/2`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gamma::recip_gamma;
use super::kummer::kummer_m;
use super::SpecfunError;

const EPS: f64 = f64::EPSILON;
/// Rays with `|arg z|` below this are continued inward from the asymptotic
/// circle; beyond it D_ν is dominant (or neutral) outward.
const INWARD_SECTOR: f64 = std::f64::consts::FRAC_PI_4;
/// Direct series results worse than this are re-evaluated by continuation.
const SERIES_FALLBACK_ERR: f64 = 1e-11;
const TAYLOR_MAX_TERMS: usize = 400;
const ASYMPTOTIC_MAX_TERMS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PcfBranch {
    PowerSeries,
    TaylorContinuation,
    Asymptotic,
}

/// Value of D_ν(z) with the branch that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcfEvalReport {
    pub value: Complex64,
    pub branch_used: PcfBranch,
    /// Estimated relative error of `value`.
    pub estimated_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcfMethod {
    Auto,
    /// Kummer series inside `series_radius`, Taylor-continued outward from the origin beyond it.
    Series,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcfOptions {
    pub z_switch: f64,
    pub series_radius: f64,
    pub max_rel_error: f64,
}

impl Default for PcfOptions {
    fn default() -> Self {
        Self { z_switch: 8.0, series_radius: 4.0, max_rel_error: 1e-9 }
    }
}

impl PcfOptions {
    fn asymptotic_radius(&self, nu: Complex64) -> f64 {
        self.z_switch.max(2.0 * nu.norm() + 4.0)
    }
}

#[derive(Debug, Clone, Copy)]
struct Eval {
    value: Complex64,
    deriv: Complex64,
    rel_err: f64,
    branch: PcfBranch,
}

/// D_ν(z) with default options.
pub fn pcf_d(nu: Complex64, z: Complex64) -> Result<PcfEvalReport, SpecfunError> {
    pcf_d_with(nu, z, PcfMethod::Auto, &PcfOptions::default())
}

/// D_ν(z) forced through the series (and outward continuation) path.
pub fn pcf_d_series(nu: Complex64, z: Complex64) -> Result<PcfEvalReport, SpecfunError> {
    pcf_d_with(nu, z, PcfMethod::Series, &PcfOptions::default())
}

/// D_ν(z) forced through the asymptotic expansion.
pub fn pcf_d_asymptotic(nu: Complex64, z: Complex64) -> Result<PcfEvalReport, SpecfunError> {
    pcf_d_with(nu, z, PcfMethod::Asymptotic, &PcfOptions::default())
}

pub fn pcf_d_with(
    nu: Complex64,
    z: Complex64,
    method: PcfMethod,
    opts: &PcfOptions,
) -> Result<PcfEvalReport, SpecfunError> {
    if !(nu.re.is_finite() && nu.im.is_finite() && z.re.is_finite() && z.im.is_finite()) {
        return Err(SpecfunError::Domain(format!("non-finite input D_{nu}({z})")));
    }
    let r = z.norm();
    let sector_dir = if z.arg().abs() < INWARD_SECTOR { Direction::Inward } else { Direction::Outward };
    let eval = match method {
        PcfMethod::Asymptotic => asymptotic_eval(nu, z)?,
        PcfMethod::Series if r <= opts.series_radius => series_eval(nu, z)?,
        PcfMethod::Series => continued_eval(nu, z, opts, Direction::Outward)?,
        PcfMethod::Auto if r <= opts.series_radius => {
            let direct = series_eval(nu, z)?;
            if direct.rel_err > SERIES_FALLBACK_ERR && r > 0.0 {
                let cont = continued_eval(nu, z, opts, sector_dir)?;
                if cont.rel_err < direct.rel_err { cont } else { direct }
            } else {
                direct
            }
        }
        PcfMethod::Auto if r >= opts.asymptotic_radius(nu) => asymptotic_eval(nu, z)?,
        PcfMethod::Auto => {
            let cont = continued_eval(nu, z, opts, sector_dir)?;
            if cont.rel_err > opts.max_rel_error {
                match asymptotic_eval(nu, z) {
                    Ok(asy) if asy.rel_err < cont.rel_err => asy,
                    _ => cont,
                }
            } else {
                cont
            }
        }
    };
    if !(eval.value.re.is_finite() && eval.value.im.is_finite()) {
        return Err(SpecfunError::Overflow { nu, z });
    }
    let report = PcfEvalReport {
        value: eval.value,
        branch_used: eval.branch,
        estimated_error: eval.rel_err,
    };
    if !(report.estimated_error <= opts.max_rel_error) {
        return Err(SpecfunError::Accuracy { best: report });
    }
    Ok(report)
}

fn rel(abs_err: f64, value: Complex64) -> f64 {
    abs_err / value.norm().max(f64::MIN_POSITIVE)
}

/// Kummer-series value only.
fn series_value(nu: Complex64, z: Complex64) -> Result<(Complex64, f64), SpecfunError> {
    let half = Complex64::new(0.5, 0.0);
    let x = z * z * 0.5;
    let m1 = kummer_m(-nu * 0.5, half, x)?;
    let m2 = kummer_m((1.0 - nu) * 0.5, Complex64::new(1.5, 0.0), x)?;
    let c1 = PI.sqrt() * recip_gamma((1.0 - nu) * 0.5);
    let c2 = (2.0 * PI).sqrt() * z * recip_gamma(-nu * 0.5);
    let bracket = c1 * m1.value - c2 * m2.value;
    // rounding in each term is amplified by the cancellation between them
    let abs_err = c1.norm() * (m1.value.norm() * m1.relative_error() + 4.0 * EPS * m1.value.norm())
        + c2.norm() * (m2.value.norm() * m2.relative_error() + 4.0 * EPS * m2.value.norm());
    let prefactor = (nu * 0.5 * std::f64::consts::LN_2 - z * z * 0.25).exp();
    Ok((prefactor * bracket, rel(abs_err, bracket) + 8.0 * EPS))
}

fn series_eval(nu: Complex64, z: Complex64) -> Result<Eval, SpecfunError> {
    let (d, e0) = series_value(nu, z)?;
    let (dm1, e1) = series_value(nu - 1.0, z)?;
    // D'_ν = -z/2 D_ν + ν D_{ν-1}
    let deriv = -z * 0.5 * d + nu * dm1;
    Ok(Eval {
        value: d,
        deriv,
        rel_err: e0 + e1 * (nu * dm1).norm() / d.norm().max(f64::MIN_POSITIVE),
        branch: PcfBranch::PowerSeries,
    })
}

/// Poincaré expansion of D_ν(z) with the connection term where required.
fn asymptotic_value(nu: Complex64, z: Complex64) -> (Complex64, f64) {
    let z2 = z * z;
    let inv = 1.0 / (2.0 * z2);
    let ln_z = z.ln();

    // Σ (-1)^s (-ν)_{2s} / (s! (2z²)^s), truncated before the smallest term
    let (s1, omit1) = truncated_sum(|s, term| {
        let sf = s as f64;
        -term * (-nu + 2.0 * sf) * (-nu + 2.0 * sf + 1.0) * inv / (sf + 1.0)
    });
    let main_log = nu * ln_z - z2 * 0.25;
    let main_pref = main_log.exp();
    let mut value = main_pref * s1;
    let mut abs_err = main_pref.norm() * (omit1 + 4.0 * EPS * s1.norm());

    let arg = z.arg();
    if arg.abs() > FRAC_PI_2 {
        // Σ (ν+1)_{2s} / (s! (2z²)^s)
        let (s2, omit2) = truncated_sum(|s, term| {
            let sf = s as f64;
            term * (nu + 1.0 + 2.0 * sf) * (nu + 2.0 + 2.0 * sf) * inv / (sf + 1.0)
        });
        let sign = if arg > 0.0 { 1.0 } else { -1.0 };
        let i = Complex64::new(0.0, 1.0);
        let conn_log = i * sign * PI * nu + z2 * 0.25 - (nu + 1.0) * ln_z;
        let conn_pref = -(2.0 * PI).sqrt() * recip_gamma(-nu) * conn_log.exp();
        value += conn_pref * s2;
        abs_err += conn_pref.norm() * (omit2 + 4.0 * EPS * s2.norm());
    }
    // phases of size |z|²/4 carry absolute rounding ~ |z|² ε
    let phase_err = (z2.norm() * 0.25 + 1.0) * EPS;
    (value, rel(abs_err, value) + phase_err)
}

/// Sums an asymptotic series from its term recurrence, stopping at the
/// smallest term. Returns the sum and the modulus of the first omitted term.
fn truncated_sum(next: impl Fn(usize, Complex64) -> Complex64) -> (Complex64, f64) {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for s in 0..ASYMPTOTIC_MAX_TERMS {
        let t = next(s, term);
        let tn = t.norm();
        if tn >= term.norm() && s > 0 {
            return (sum, tn);
        }
        if tn <= EPS * 0.25 * sum.norm() {
            sum += t;
            return (sum, tn);
        }
        sum += t;
        term = t;
        if tn == 0.0 {
            return (sum, 0.0);
        }
    }
    (sum, term.norm())
}

fn asymptotic_eval(nu: Complex64, z: Complex64) -> Result<Eval, SpecfunError> {
    if z.norm() == 0.0 {
        return Err(SpecfunError::Domain("asymptotic expansion at z = 0".into()));
    }
    let (d, e0) = asymptotic_value(nu, z);
    let (dm1, e1) = asymptotic_value(nu - 1.0, z);
    let deriv = -z * 0.5 * d + nu * dm1;
    let rel_err = e0 + e1 * (nu * dm1).norm() / d.norm().max(f64::MIN_POSITIVE);
    Ok(Eval { value: d, deriv, rel_err, branch: PcfBranch::Asymptotic })
}

/// D_ν(0) = 2^{ν/2} √π / Γ((1-ν)/2),  D'_ν(0) = -2^{(ν+1)/2} √π / Γ(-ν/2).
fn origin_eval(nu: Complex64) -> Eval {
    let ln2 = std::f64::consts::LN_2;
    let value = (nu * 0.5 * ln2).exp() * PI.sqrt() * recip_gamma((1.0 - nu) * 0.5);
    let deriv = -((nu + 1.0) * 0.5 * ln2).exp() * PI.sqrt() * recip_gamma(-nu * 0.5);
    Eval { value, deriv, rel_err: 1e-15, branch: PcfBranch::PowerSeries }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Inward,
    Outward,
}

fn continued_eval(
    nu: Complex64,
    z: Complex64,
    opts: &PcfOptions,
    dir: Direction,
) -> Result<Eval, SpecfunError> {
    let (z_start, start) = match dir {
        Direction::Outward => (Complex64::new(0.0, 0.0), origin_eval(nu)),
        Direction::Inward => {
            let z0 = z / z.norm() * opts.asymptotic_radius(nu);
            (z0, asymptotic_eval(nu, z0)?)
        }
    };
    let path = taylor_continue(nu, z_start, start.value, start.deriv, z);
    // the origin value may vanish (D_n zeros); scale by the path maximum instead
    let start_scale = start.value.norm().max(start.deriv.norm() / (1.0 + z.norm()));
    let growth = path.max_norm.max(start_scale) / path.value.norm().max(f64::MIN_POSITIVE);
    let rel_err = (start.rel_err + path.steps as f64 * 8.0 * EPS) * growth.max(1.0);
    Ok(Eval {
        value: path.value,
        deriv: path.deriv,
        rel_err,
        branch: PcfBranch::TaylorContinuation,
    })
}

struct ContinuedPath {
    value: Complex64,
    deriv: Complex64,
    steps: usize,
    max_norm: f64,
}

/// Integrates Weber's equation from `z_from` to `z_to` on the straight
/// segment between them with local Taylor expansions.
fn taylor_continue(
    nu: Complex64,
    z_from: Complex64,
    mut w: Complex64,
    mut dw: Complex64,
    z_to: Complex64,
) -> ContinuedPath {
    let total = (z_to - z_from).norm();
    let mut center = z_from;
    let mut steps = 0;
    let mut max_norm = w.norm();
    if total == 0.0 {
        return ContinuedPath { value: w, deriv: dw, steps, max_norm };
    }
    let unit = (z_to - z_from) / total;
    let mut remaining = total;
    while remaining > 0.0 {
        let q0 = center * center * 0.25 - nu - 0.5;
        let h_len = (2.0 / (q0.norm() + 1.0).sqrt()).min(0.75);
        let h = if remaining <= h_len * 1.000_001 {
            let h = z_to - center;
            remaining = 0.0;
            h
        } else {
            remaining -= h_len;
            unit * h_len
        };
        let (w1, dw1) = taylor_step(nu, center, w, dw, h);
        w = w1;
        dw = dw1;
        center = if remaining == 0.0 { z_to } else { center + h };
        steps += 1;
        max_norm = max_norm.max(w.norm());
    }
    ContinuedPath { value: w, deriv: dw, steps, max_norm }
}

/// One Taylor step of W'' = q(z) W, q(z) = z²/4 - ν - 1/2, about `c`.
fn taylor_step(
    nu: Complex64,
    c: Complex64,
    w: Complex64,
    dw: Complex64,
    h: Complex64,
) -> (Complex64, Complex64) {
    // v_n = w_n h^n: n(n-1) v_n = h² (q0 v_{n-2} + q1 h v_{n-3} + q2 h² v_{n-4})
    let q0 = c * c * 0.25 - nu - 0.5;
    let q1 = c * 0.5 * h;
    let q2 = 0.25 * h * h;
    let h2 = h * h;
    let zero = Complex64::new(0.0, 0.0);
    // window holds v_{n-4}, v_{n-3}, v_{n-2}, v_{n-1}
    let mut window = [zero, zero, w, dw * h];
    let mut sum = w + window[3];
    let mut dsum = window[3];
    for n in 2..TAYLOR_MAX_TERMS {
        let nf = n as f64;
        let v = h2 * (q0 * window[2] + q1 * window[1] + q2 * window[0]) / (nf * (nf - 1.0));
        sum += v;
        dsum += v * nf;
        window = [window[1], window[2], window[3], v];
        let tail = window[1].norm() + window[2].norm() + window[3].norm();
        if n > 4 && tail <= 1e-18 * sum.norm().max(dsum.norm()) {
            break;
        }
    }
    (sum, dsum / h)
}
