//! Small sample-statistics helpers shared by the experiment harness.
//!
//! Standard errors are always sample-stddev / sqrt(n). Cells whose sample
//! has zero variance are flagged instead of being given a fake epsilon.

use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SampleStats {
    pub n: u64,
    pub mean: f64,
    /// sample-stddev / sqrt(n); 0 when the sample is constant.
    pub stderr: f64,
    pub zero_variance: bool,
}

/// Two-pass mean / standard error over a sample, summed in slice order so
/// a rerun reproduces the result bit for bit.
pub fn summarize(values: &[f64]) -> SampleStats {
    let n = values.len();
    assert!(n > 0, "empty sample");
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return SampleStats {
            n: 1,
            mean,
            stderr: 0.0,
            zero_variance: true,
        };
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let var = ss / (n as f64 - 1.0);
    SampleStats {
        n: n as u64,
        mean,
        stderr: (var / n as f64).sqrt(),
        zero_variance: ss == 0.0,
    }
}

/// |mean - expected| in standard-error units. Zero-variance samples give 0
/// on an exact match and infinity otherwise.
pub fn deviation_in_se(stats: &SampleStats, expected: f64) -> f64 {
    let gap = (stats.mean - expected).abs();
    if stats.stderr == 0.0 {
        if gap == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        gap / stats.stderr
    }
}
