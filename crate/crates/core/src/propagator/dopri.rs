//! Dormand–Prince 5(4) with FSAL and the fourth-order continuous extension
//! of Hairer, Nørsett & Wanner.

use super::PropagatorError;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
/// Per-step norm changes below this (relative) are rounding noise.
const NORM_FLOOR: f64 = 8.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy)]
pub struct DopriSettings {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Only the first `n_err` components enter the error norm.
    pub n_err: usize,
    /// Total allowed change of Σ y_i² (i < n_err) over the whole span, shared
    /// among steps in proportion to their length. `None` disables the check.
    pub norm_budget: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DopriStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

fn axpy<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    let mut out = *y;
    for (c, k) in terms {
        if *c == 0.0 {
            continue;
        }
        for i in 0..D {
            out[i] += h * c * k[i];
        }
    }
    out
}

fn rms(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len().max(1) as f64).sqrt()
}

/// Integrates `y' = f(t, y)` from `grid[0]` and calls `emit(t, y)` at every
/// grid point (including the first) via dense output.
pub fn integrate<const D: usize>(
    f: impl Fn(f64, &[f64; D]) -> [f64; D],
    y0: [f64; D],
    grid: &[f64],
    settings: &DopriSettings,
    mut emit: impl FnMut(f64, &[f64; D]),
) -> Result<DopriStats, PropagatorError> {
    let mut stats = DopriStats::default();
    let Some((&t0, rest)) = grid.split_first() else {
        return Ok(stats);
    };
    emit(t0, &y0);
    let Some(&t_end) = rest.last() else {
        return Ok(stats);
    };
    let ne = settings.n_err.min(D);
    let scale = |y: &[f64; D], yn: &[f64; D], i: usize| {
        settings.atol + settings.rtol * y[i].abs().max(yn[i].abs())
    };

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    stats.evaluations += 1;
    let mut h = initial_step(&f, t, &y, &k1, settings, t_end - t0);
    stats.evaluations += 1;
    let mut next = 1usize;

    while next < grid.len() {
        if stats.accepted + stats.rejected >= settings.max_steps {
            return Err(PropagatorError::TooManySteps { t, steps: settings.max_steps });
        }
        let h_min = 1e-14 * t.abs().max(1.0);
        if h < h_min {
            return Err(PropagatorError::StepUnderflow { t, h });
        }
        let h_step = h.min(t_end - t);

        let k2 = f(t + C2 * h_step, &axpy(&y, h_step, &[(A21, &k1)]));
        let k3 = f(t + C3 * h_step, &axpy(&y, h_step, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h_step, &axpy(&y, h_step, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h_step,
            &axpy(&y, h_step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let t_new = if h_step == t_end - t { t_end } else { t + h_step };
        let k6 = f(
            t_new,
            &axpy(&y, h_step, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new =
            axpy(&y, h_step, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t_new, &y_new);
        stats.evaluations += 6;

        let mut e = [0.0; D];
        for i in 0..ne {
            let ei = h_step
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            e[i] = ei / scale(&y, &y_new, i);
        }
        let mut err = rms(&e[..ne]);
        if !err.is_finite() {
            return Err(PropagatorError::NonFinite { t });
        }
        // the quadratic invariant drifts at order h⁶ per step
        let mut norm_err = 0.0;
        if let Some(budget) = settings.norm_budget {
            let n0: f64 = y[..ne].iter().map(|v| v * v).sum();
            let n1: f64 = y_new[..ne].iter().map(|v| v * v).sum();
            let allowed = (budget * h_step / (t_end - t0)).max(NORM_FLOOR * n0.max(1.0));
            norm_err = (n1 - n0).abs() / allowed;
        }
        let fac_norm = if norm_err > 0.0 { SAFETY * norm_err.powf(-1.0 / 6.0) } else { FAC_MAX };
        if norm_err > 1.0 {
            err = err.max(norm_err);
        }

        if err <= 1.0 {
            stats.accepted += 1;
            // dense output coefficients
            let mut r = [[0.0; D]; 5];
            for i in 0..D {
                let dy = y_new[i] - y[i];
                let bspl = h_step * k1[i] - dy;
                r[0][i] = y[i];
                r[1][i] = dy;
                r[2][i] = bspl;
                r[3][i] = dy - h_step * k7[i] - bspl;
                r[4][i] = h_step
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                        + D7 * k7[i]);
            }
            while next < grid.len() && grid[next] <= t_new {
                let tg = grid[next];
                if tg == t_new {
                    emit(tg, &y_new);
                } else {
                    let th = (tg - t) / h_step;
                    let th1 = 1.0 - th;
                    let mut yi = [0.0; D];
                    for i in 0..D {
                        yi[i] = r[0][i]
                            + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
                    }
                    emit(tg, &yi);
                }
                next += 1;
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            let fac = if err == 0.0 { FAC_MAX } else { SAFETY * err.powf(-0.2) };
            h = h_step * fac.min(fac_norm).clamp(FAC_MIN, FAC_MAX);
        } else {
            stats.rejected += 1;
            let fac = if norm_err > 1.0 { fac_norm } else { SAFETY * err.powf(-0.2) };
            h = h_step * fac.clamp(FAC_MIN, 1.0);
        }
    }
    Ok(stats)
}

fn initial_step<const D: usize>(
    f: &impl Fn(f64, &[f64; D]) -> [f64; D],
    t: f64,
    y: &[f64; D],
    f0: &[f64; D],
    s: &DopriSettings,
    span: f64,
) -> f64 {
    let ne = s.n_err.min(D).max(1);
    let sc: Vec<f64> = (0..ne).map(|i| s.atol + s.rtol * y[i].abs()).collect();
    let d0 = rms(&(0..ne).map(|i| y[i] / sc[i]).collect::<Vec<_>>());
    let d1 = rms(&(0..ne).map(|i| f0[i] / sc[i]).collect::<Vec<_>>());
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1 = axpy(y, h0, &[(1.0, f0)]);
    let f1 = f(t + h0, &y1);
    let d2 = rms(&(0..ne).map(|i| (f1[i] - f0[i]) / sc[i]).collect::<Vec<_>>()) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}
