//! Distribution-shape diagnostics for feature matrices.
//!
//! Normalized features are most useful to downstream classifiers when their
//! value distribution is close to Gaussian. Sample skewness and excess
//! kurtosis of the flattened matrix quantify how far a representation is
//! from that: both are 0 for a Gaussian, and heavy-tailed or lopsided
//! feature maps show up as large magnitudes.

use ndarray::Array2;

use crate::error::{CoreError, Result};

/// Third- and fourth-moment shape summary of a value distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionShape {
    /// Fisher-Pearson sample skewness `m3 / m2^(3/2)`.
    pub skewness: f64,
    /// Sample kurtosis minus 3: `m4 / m2^2 - 3`.
    pub excess_kurtosis: f64,
}

/// Computes skewness and excess kurtosis over all entries of a matrix.
///
/// Uses the biased (population) central moments. Fails on empty input, on
/// non-finite values, and on (numerically) constant input, whose shape is
/// undefined.
pub fn gaussianization_score(values: &Array2<f64>) -> Result<DistributionShape> {
    let n = values.len();
    if n == 0 {
        return Err(CoreError::EmptyInput("no values to summarize".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CoreError::NonFinite("matrix contains non-finite values".into()));
    }

    let n_f = n as f64;
    let mean = values.iter().sum::<f64>() / n_f;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in values.iter() {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n_f;
    m3 /= n_f;
    m4 /= n_f;

    // Guard against constant input: relative variance below machine noise.
    let scale = values.iter().fold(0.0f64, |a, &v| a.max(v.abs())).max(1e-300);
    if m2 <= (scale * 1e-14) * (scale * 1e-14) {
        return Err(CoreError::DegenerateInput(
            "variance is zero (constant input has no defined shape)".into(),
        ));
    }

    Ok(DistributionShape {
        skewness: m3 / m2.powf(1.5),
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
    })
}
