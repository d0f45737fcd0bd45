use serde::{Deserialize, Serialize};

/// Float tolerances. Exact backends ignore them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Singular values below `n * sigma_max * rank_rtol` count as zero.
    pub rank_rtol: f64,
    /// PSD when `lambda_min >= -psd_atol * max(1, lambda_max)`.
    pub psd_atol: f64,
    /// Absolute slack for sampled inequalities.
    pub sample_atol: f64,
    /// A float determinant is nonzero when `|det| > det_rtol * scale`.
    pub det_rtol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_rtol: 1e-12,
            psd_atol: 1e-9,
            sample_atol: 1e-9,
            det_rtol: 1e-6,
        }
    }
}
