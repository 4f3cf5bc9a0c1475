//! Special functions: complex gamma, Kummer's M and the parabolic
//! cylinder function D_ν(z) for complex order and argument.

mod gamma;
mod kummer;
mod pcf;

use num_complex::Complex64;
use thiserror::Error;

pub use gamma::{complex_gamma, recip_gamma};
pub use kummer::{kummer_m, KummerSum, KUMMER_MAX_TERMS, KUMMER_REL_TOL};
pub use pcf::{
    pcf_d, pcf_d_asymptotic, pcf_d_series, pcf_d_with, PcfBranch, PcfEvalReport, PcfMethod,
    PcfOptions,
};

#[derive(Debug, Clone, Error)]
pub enum SpecfunError {
    #[error("gamma function pole at z = {0}")]
    GammaPole(i64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("series did not converge within {terms} terms (partial sum {best})")]
    NonConvergence { terms: usize, best: Complex64 },
    #[error("accuracy target missed: estimated relative error {:.3e} ({:?} branch)", best.estimated_error, best.branch_used)]
    Accuracy { best: PcfEvalReport },
    #[error("overflow evaluating D_{nu}({z})")]
    Overflow { nu: Complex64, z: Complex64 },
}
