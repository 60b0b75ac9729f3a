//! Jitter removal for manually annotated landmark tracks.

use thiserror::Error;

use crate::geometry::Point2;

/// Smoothing width used for head tracks, in frames.
pub const DEFAULT_SIGMA: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SignalError {
    #[error("series is empty")]
    EmptySeries,
    #[error("sigma must be positive, got {0}")]
    NonpositiveSigma(f64),
    #[error("stance has no points")]
    EmptyStance,
    #[error("series contains a non-finite sample")]
    NonFinite,
}

/// Per-frame samples starting at `frame_offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series1D {
    values: Vec<f64>,
    frame_offset: i64,
}

impl Series1D {
    pub fn new(values: Vec<f64>, frame_offset: i64) -> Result<Self, SignalError> {
        if values.is_empty() {
            return Err(SignalError::EmptySeries);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SignalError::NonFinite);
        }
        Ok(Self {
            values,
            frame_offset,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn frame_offset(&self) -> i64 {
        self.frame_offset
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Truncation radius of the Gaussian kernel: `ceil(3 sigma)` samples.
pub fn kernel_radius(sigma: f64) -> usize {
    (3.0 * sigma).ceil() as usize
}

/// Normalized weights applied at `index` of a series of length `len`.
///
/// Returns the first contributing sample index and the weights for the
/// contiguous window that follows it. Taps falling outside the series are
/// dropped and the rest renormalized to sum to 1.
pub fn kernel_weights(len: usize, index: usize, sigma: f64) -> (usize, Vec<f64>) {
    let radius = kernel_radius(sigma);
    let lo = index.saturating_sub(radius);
    let hi = (index + radius).min(len - 1);
    let denom = 2.0 * sigma * sigma;
    let mut weights: Vec<f64> = (lo..=hi)
        .map(|j| {
            let d = j as f64 - index as f64;
            (-d * d / denom).exp()
        })
        .collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    (lo, weights)
}

/// Gaussian smoothing with per-index renormalization at the boundaries.
pub fn gaussian_smooth(series: &Series1D, sigma: f64) -> Result<Series1D, SignalError> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(SignalError::NonpositiveSigma(sigma));
    }
    let values = series.values();
    let smoothed = (0..values.len())
        .map(|i| {
            // Accumulate offsets from the centre sample so a constant
            // series comes back bit-for-bit.
            let (lo, weights) = kernel_weights(values.len(), i, sigma);
            let centre = values[i];
            centre
                + weights
                    .iter()
                    .zip(&values[lo..])
                    .map(|(w, v)| w * (v - centre))
                    .sum::<f64>()
        })
        .collect();
    Series1D::new(smoothed, series.frame_offset())
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Component-wise median of the foot positions over one stance.
pub fn stance_median(points: &[Point2]) -> Result<Point2, SignalError> {
    if points.is_empty() {
        return Err(SignalError::EmptyStance);
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    let mut ys: Vec<f64> = points.iter().map(|p| p.y).collect();
    Ok(Point2::new(median(&mut xs), median(&mut ys)))
}
