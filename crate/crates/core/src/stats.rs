/// Mean and sample standard deviation (n − 1 denominator).
///
/// A single value has sd 0. Returns `None` for an empty slice.
pub fn sample_mean_sd(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    // Welford's update; exact for constant input
    let (mut mean, mut m2) = (0.0, 0.0);
    for (k, &x) in values.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (x - mean);
    }
    if values.len() == 1 {
        return Some((mean, 0.0));
    }
    Some((mean, libm::sqrt(m2 / (values.len() - 1) as f64)))
}

/// Quantile of already sorted data by linear interpolation between order
/// statistics at rank `p · (n − 1)`.
///
/// # Panics
/// If `sorted` is empty or `p` is outside [0, 1].
pub fn quantile_linear(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    assert!((0.0..=1.0).contains(&p), "quantile probability out of range");
    let rank = p * (sorted.len() - 1) as f64;
    let lo = libm::floor(rank) as usize;
    let hi = libm::ceil(rank) as usize;
    if lo == hi {
        return sorted[lo];
    }
    let frac = rank - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}
