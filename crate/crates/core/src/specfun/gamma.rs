//! Complex gamma function.
//!
//! Lanczos approximation (g = 7, nine coefficients) on the half plane
//! `Re z >= 1/2`, reflection formula elsewhere.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::SpecfunError;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Returns `Some(n)` when `z` is the pole `-n` of the gamma function.
pub(crate) fn pole_index(z: Complex64) -> Option<i64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        Some(-(z.re as i64))
    } else {
        None
    }
}

fn lanczos(z: Complex64) -> Complex64 {
    // valid for Re z >= 1/2
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * (t.ln() * (z + 0.5) - t).exp() * x
}

/// Γ(z) for complex `z`.
///
/// Fails with [`SpecfunError::GammaPole`] at the non-positive integers.
pub fn complex_gamma(z: Complex64) -> Result<Complex64, SpecfunError> {
    if let Some(n) = pole_index(z) {
        return Err(SpecfunError::GammaPole(-n));
    }
    if z.re < 0.5 {
        // Γ(z) Γ(1 - z) = π / sin(πz)
        Ok(PI / ((PI * z).sin() * lanczos(1.0 - z)))
    } else {
        Ok(lanczos(z))
    }
}

/// 1/Γ(z), an entire function: zero at the poles of Γ.
pub fn recip_gamma(z: Complex64) -> Complex64 {
    if pole_index(z).is_some() {
        return Complex64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        (PI * z).sin() * lanczos(1.0 - z) / PI
    } else {
        1.0 / lanczos(z)
    }
}
