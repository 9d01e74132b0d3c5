//! Fixtures shared by the benchmarks in `benches/`.

use scalefisher::ModelSpec;

/// fBM + white noise at σ = τ = 1.
pub fn fbm_wn(hurst: f64, n: usize) -> ModelSpec {
    ModelSpec::fbm_wn(hurst, 1.0, 1.0, n).expect("valid benchmark model")
}
