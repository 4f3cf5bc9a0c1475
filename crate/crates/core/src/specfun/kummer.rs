//! Confluent hypergeometric function M(a, b, z) by its power series.

use num_complex::Complex64;

use super::gamma::pole_index;
use super::SpecfunError;

/// Relative tail target for the series.
pub const KUMMER_REL_TOL: f64 = 1e-14;
/// Term budget for the series.
pub const KUMMER_MAX_TERMS: usize = 500;

/// Result of summing the Kummer series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KummerSum {
    pub value: Complex64,
    /// Rigorous bound on the modulus of the discarded tail.
    pub tail_bound: f64,
    /// Largest term modulus encountered; `max_term / |value|` measures cancellation.
    pub max_term: f64,
    pub terms: usize,
}

impl KummerSum {
    /// Estimated relative error including rounding amplified by cancellation.
    pub fn relative_error(&self) -> f64 {
        let scale = self.value.norm().max(f64::MIN_POSITIVE);
        (self.tail_bound + 4.0 * f64::EPSILON * self.max_term * (self.terms as f64).sqrt()) / scale
    }
}

/// Σ (a)_k / (b)_k · z^k / k!, summed until the tail bound drops below
/// [`KUMMER_REL_TOL`] relative to the partial sum.
pub fn kummer_m(a: Complex64, b: Complex64, z: Complex64) -> Result<KummerSum, SpecfunError> {
    if let Some(n) = pole_index(b) {
        return Err(SpecfunError::Domain(format!(
            "kummer_m: b = {} is a non-positive integer",
            -n
        )));
    }
    let zabs = z.norm();
    let amb = (a - b).norm();
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut max_term = 1.0_f64;
    for k in 0..KUMMER_MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) / (b + kf) * z / (kf + 1.0);
        sum += term;
        let tn = term.norm();
        max_term = max_term.max(tn);
        if tn == 0.0 {
            // terminating series (a a non-positive integer) or z = 0
            return Ok(KummerSum { value: sum, tail_bound: 0.0, max_term, terms: k + 2 });
        }
        // For j > k, |t_{j+1}/t_j| <= (1 + |a-b|/(Re b + j)) |z| / (j + 1), decreasing in j.
        let j = kf + 1.0;
        let denom = b.re + j;
        if denom <= 0.0 {
            continue;
        }
        let rho = (1.0 + amb / denom) * zabs / (j + 1.0);
        if rho < 1.0 {
            let tail = tn * rho / (1.0 - rho);
            if tail <= KUMMER_REL_TOL * sum.norm() {
                return Ok(KummerSum { value: sum, tail_bound: tail, max_term, terms: k + 2 });
            }
        }
    }
    Err(SpecfunError::NonConvergence { terms: KUMMER_MAX_TERMS, best: sum })
}
