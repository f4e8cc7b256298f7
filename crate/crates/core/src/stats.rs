//! Pearson correlation with a first-class "undefined" outcome so degenerate
//! series (zero variance) can be reported as NA instead of NaN.

use std::fmt;

use thiserror::Error;

use crate::sum::CompensatedSum;

/// Sample variances below this absolute threshold make the coefficient
/// undefined.
pub const VARIANCE_FLOOR: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationResult {
    /// `None` when either series has (numerically) zero variance.
    pub rho: Option<f64>,
    pub n_points: usize,
}

impl CorrelationResult {
    pub fn is_defined(&self) -> bool {
        self.rho.is_some()
    }

    pub const fn undefined(n_points: usize) -> Self {
        Self {
            rho: None,
            n_points,
        }
    }
}

impl fmt::Display for CorrelationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rho {
            Some(rho) => write!(f, "{rho:.6}"),
            None => f.write_str("NA"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
}

/// How [`pooled`] combines per-graph point sets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PoolingMode {
    /// Concatenate all points, then correlate once.
    #[default]
    Concatenate,
    /// Correlate each set separately and average the defined coefficients.
    MeanOfCoefficients,
}

/// Sample Pearson correlation via the two-pass, mean-centered formula.
///
/// The coefficient is clamped to `[-1, 1]` to absorb last-ulp excursions.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<CorrelationResult, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch(xs.len(), ys.len()));
    }
    let n = xs.len();
    if n < 2 {
        return Err(StatsError::TooFewPoints(n));
    }

    let mut sum_x = CompensatedSum::new();
    let mut sum_y = CompensatedSum::new();
    for (&x, &y) in xs.iter().zip(ys) {
        sum_x.add(x);
        sum_y.add(y);
    }
    let mean_x = sum_x.total() / n as f64;
    let mean_y = sum_y.total() / n as f64;

    let mut sxx = CompensatedSum::new();
    let mut syy = CompensatedSum::new();
    let mut sxy = CompensatedSum::new();
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx.add(dx * dx);
        syy.add(dy * dy);
        sxy.add(dx * dy);
    }
    let sxx = sxx.total();
    let syy = syy.total();
    let denom = (n - 1) as f64;
    if sxx / denom < VARIANCE_FLOOR || syy / denom < VARIANCE_FLOOR {
        return Ok(CorrelationResult::undefined(n));
    }
    // One sqrt of the product keeps exactly-linear inputs at exactly +/-1.
    let rho = (sxy.total() / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    Ok(CorrelationResult {
        rho: Some(rho),
        n_points: n,
    })
}

/// Correlation over several `(x, y)` point sets.
///
/// The default mode concatenates every set into one cloud, which keeps
/// between-set level shifts in the picture; `MeanOfCoefficients` instead
/// averages the per-set coefficients.
pub fn pooled(
    sets: &[Vec<(f64, f64)>],
    mode: PoolingMode,
) -> Result<CorrelationResult, StatsError> {
    let total: usize = sets.iter().map(|s| s.len()).sum();
    if total < 2 {
        return Err(StatsError::TooFewPoints(total));
    }
    match mode {
        PoolingMode::Concatenate => {
            let mut xs = Vec::with_capacity(total);
            let mut ys = Vec::with_capacity(total);
            for set in sets {
                for &(x, y) in set {
                    xs.push(x);
                    ys.push(y);
                }
            }
            pearson(&xs, &ys)
        }
        PoolingMode::MeanOfCoefficients => {
            let mut acc = CompensatedSum::new();
            let mut defined = 0usize;
            for set in sets {
                if set.len() < 2 {
                    continue;
                }
                let xs: Vec<f64> = set.iter().map(|p| p.0).collect();
                let ys: Vec<f64> = set.iter().map(|p| p.1).collect();
                if let Some(rho) = pearson(&xs, &ys)?.rho {
                    acc.add(rho);
                    defined += 1;
                }
            }
            if defined == 0 {
                return Ok(CorrelationResult::undefined(total));
            }
            Ok(CorrelationResult {
                rho: Some(acc.total() / defined as f64),
                n_points: total,
            })
        }
    }
}
