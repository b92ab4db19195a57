//! Small numerical helpers shared across modules.

/// Pairwise sum over a power-of-two length slice, reducing adjacent pairs
/// level by level. Sums of aligned dyadic blocks computed this way agree
/// bit-for-bit with the corresponding nodes of the full reduction.
pub(crate) fn dyadic_sum(values: &[f64]) -> f64 {
    debug_assert!(values.is_empty() || values.len().is_power_of_two());
    match values.len() {
        0 => 0.0,
        1 => values[0],
        len => {
            let (left, right) = values.split_at(len / 2);
            dyadic_sum(left) + dyadic_sum(right)
        }
    }
}

/// One level of the dyadic reduction: adjacent pairs summed.
pub(crate) fn halve(values: &[f64]) -> Vec<f64> {
    values.chunks_exact(2).map(|p| p[0] + p[1]).collect()
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub(crate) fn ols_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}
