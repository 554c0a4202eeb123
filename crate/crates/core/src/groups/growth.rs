use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Exponential growth estimate of a ball sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthRate {
    /// Least-squares slope of `ln |W_n|` against `n` over the tail half.
    pub rate: f64,
    /// `(n, (1/n) ln |W_n|)` for every `n >= 1`.
    pub per_radius: Vec<(usize, f64)>,
}

/// Growth rate from ball sizes `|W_0|, …, |W_N|` (at least three radii).
pub fn growth_rate(sizes: &[usize]) -> Result<GrowthRate> {
    if sizes.len() < 3 {
        return Err(Error::usage("growth rate needs at least three consecutive radii"));
    }
    if sizes.contains(&0) {
        return Err(Error::usage("ball sizes must be positive"));
    }
    let logs: Vec<f64> = sizes.iter().map(|&s| libm::log(s as f64)).collect();
    let per_radius = (1..sizes.len()).map(|n| (n, logs[n] / n as f64)).collect();
    let start = (sizes.len() / 2).min(sizes.len() - 2);
    let xs: Vec<f64> = (start..sizes.len()).map(|n| n as f64).collect();
    let ys = &logs[start..];
    Ok(GrowthRate {
        rate: least_squares_slope(&xs, ys),
        per_radius,
    })
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxy == 0.0 || ys.iter().all(|&y| y == ys[0]) {
        return 0.0;
    }
    sxy / sxx
}
