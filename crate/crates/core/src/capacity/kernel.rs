//! Cell-averaged interaction tables.
//!
//! Two cells of length `ℓ` whose indices differ by `k` interact through
//! `E[K(ℓ(k + U - V))]` with `U, V` independent uniform on `[0, 1]`. `U - V`
//! has the triangular density `1 - |t|` on `(-1, 1)`, so the average is a
//! second difference of a twice-integrated kernel. For large `k` the second
//! difference cancels catastrophically and an expansion in `1/k` is used.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// Offsets from which the `1/k` expansions replace second differences.
const SERIES_FROM: usize = 8;
/// Matrix sizes above which products go through the FFT.
const DIRECT_LIMIT: usize = 256;

/// `E[(t)^(2j)]` for the triangular law on `(-1, 1)`.
fn triangular_even_moment(j: u32) -> f64 {
    let j = f64::from(j);
    2.0 / ((2.0 * j + 1.0) * (2.0 * j + 2.0))
}

/// `E[ln|k + t|]` for `t` triangular on `(-1, 1)`.
pub(crate) fn mean_log_offset(k: usize) -> f64 {
    if k < SERIES_FROM {
        let g = |x: f64| {
            if x == 0.0 {
                0.0
            } else {
                0.5 * x * x * x.abs().ln() - 0.75 * x * x
            }
        };
        let k = k as f64;
        return g(k + 1.0) - 2.0 * g(k) + g(k - 1.0);
    }
    let k = k as f64;
    let inv2 = 1.0 / (k * k);
    let mut power = 1.0;
    let mut correction = 0.0;
    for j in 1..60u32 {
        power *= inv2;
        let term = triangular_even_moment(j) / (2.0 * f64::from(j)) * power;
        correction += term;
        if term < 1e-18 * correction {
            break;
        }
    }
    k.ln() - correction
}

/// `E[|k + t|^(-s)]` for `t` triangular on `(-1, 1)` and `0 < s < 1`.
pub(crate) fn mean_riesz_offset(k: usize, s: f64) -> f64 {
    let c = 1.0 / ((1.0 - s) * (2.0 - s));
    if k < SERIES_FROM {
        let g = |x: f64| c * x.abs().powf(2.0 - s);
        let k = k as f64;
        return g(k + 1.0) - 2.0 * g(k) + g(k - 1.0);
    }
    // (1 + x)^(-s) = Σ binom(-s, i) x^i, only even i survive the average
    let k = k as f64;
    let x2 = 1.0 / (k * k);
    let mut binom = 1.0;
    let mut power = 1.0;
    let mut sum = 1.0;
    for j in 1..60u32 {
        let i = f64::from(2 * j);
        binom *= (-s - (i - 2.0)) / (i - 1.0) * (-s - (i - 1.0)) / i;
        power *= x2;
        let term = binom * triangular_even_moment(j) * power;
        sum += term;
        if term.abs() < 1e-18 * sum {
            break;
        }
    }
    k.powf(-s) * sum
}

/// Forward and inverse plans with the spectrum of the embedding circulant.
type Embedding = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>, Vec<Complex<f64>>);

/// Symmetric Toeplitz matrix `A[i][j] = table[|i - j|]` with a fast product.
pub(crate) struct Toeplitz {
    table: Vec<f64>,
    fft: Option<Embedding>,
}

impl Toeplitz {
    pub(crate) fn new(table: Vec<f64>) -> Self {
        let n = table.len();
        let fft = (n > DIRECT_LIMIT).then(|| {
            let size = 2 * n;
            let mut planner = FftPlanner::new();
            let forward = planner.plan_fft_forward(size);
            let inverse = planner.plan_fft_inverse(size);
            let mut symbol: Vec<Complex<f64>> = (0..size)
                .map(|i| {
                    let k = if i < n {
                        Some(i)
                    } else if i > n {
                        Some(size - i)
                    } else {
                        None
                    };
                    Complex::new(k.map_or(0.0, |k| table[k]), 0.0)
                })
                .collect();
            forward.process(&mut symbol);
            (forward, inverse, symbol)
        });
        Self { table, fft }
    }

    pub(crate) fn len(&self) -> usize {
        self.table.len()
    }

    pub(crate) fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.table.len();
        debug_assert_eq!(x.len(), n);
        match &self.fft {
            None => (0..n)
                .map(|i| {
                    x.iter()
                        .enumerate()
                        .map(|(j, &xj)| self.table[i.abs_diff(j)] * xj)
                        .sum()
                })
                .collect(),
            Some((forward, inverse, symbol)) => {
                let size = 2 * n;
                let mut buf: Vec<Complex<f64>> = x
                    .iter()
                    .map(|&v| Complex::new(v, 0.0))
                    .chain(std::iter::repeat_n(Complex::new(0.0, 0.0), n))
                    .collect();
                forward.process(&mut buf);
                for (b, s) in buf.iter_mut().zip(symbol) {
                    *b *= s;
                }
                inverse.process(&mut buf);
                buf[..n].iter().map(|c| c.re / size as f64).collect()
            }
        }
    }

    pub(crate) fn quadratic_form(&self, x: &[f64]) -> f64 {
        let ax = self.apply(x);
        x.iter().zip(&ax).map(|(a, b)| a * b).sum()
    }

    /// Largest absolute row sum of the principal submatrix on `indices`.
    pub(crate) fn max_row_sum(&self, indices: &[usize]) -> f64 {
        let mut mask = vec![0.0; self.len()];
        for &i in indices {
            mask[i] = 1.0;
        }
        let abs_table: Vec<f64> = self.table.iter().map(|v| v.abs()).collect();
        let abs = Toeplitz::new(abs_table);
        let sums = abs.apply(&mask);
        indices.iter().map(|&i| sums[i]).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Midpoint quadrature of `∫ (1 - |t|) φ(k + t) dt`, refined for a
    /// smooth integrand away from the origin.
    fn triangular_average(k: f64, phi: impl Fn(f64) -> f64) -> f64 {
        let m = 200_000;
        let h = 2.0 / m as f64;
        (0..m)
            .map(|i| {
                let t = -1.0 + (i as f64 + 0.5) * h;
                (1.0 - t.abs()) * phi(k + t) * h
            })
            .sum()
    }

    #[test]
    fn log_table_matches_quadrature() {
        assert!((mean_log_offset(0) + 1.5).abs() < 1e-15);
        for k in [2usize, 5, 7, 8, 9, 30, 1000] {
            let q = triangular_average(k as f64, |x| x.abs().ln());
            assert!((mean_log_offset(k) - q).abs() < 1e-9, "k={k}");
        }
    }

    #[test]
    fn series_and_closed_form_agree_at_the_switch() {
        for k in [8usize, 9, 12] {
            let kf = k as f64;
            let g = |x: f64| 0.5 * x * x * x.ln() - 0.75 * x * x;
            let closed = g(kf + 1.0) - 2.0 * g(kf) + g(kf - 1.0);
            assert!((closed - mean_log_offset(k)).abs() < 1e-12);
            let s = 0.4;
            let c = 1.0 / ((1.0 - s) * (2.0 - s));
            let r = |x: f64| c * x.powf(2.0 - s);
            let closed = r(kf + 1.0) - 2.0 * r(kf) + r(kf - 1.0);
            assert!((closed - mean_riesz_offset(k, s)).abs() < 1e-12);
        }
    }

    #[test]
    fn riesz_table_matches_quadrature() {
        let s = 0.5;
        assert!((mean_riesz_offset(0, s) - 8.0 / 3.0).abs() < 1e-15);
        for k in [2usize, 7, 8, 50, 5000] {
            let q = triangular_average(k as f64, |x| x.abs().powf(-s));
            assert!((mean_riesz_offset(k, s) - q).abs() < 1e-9, "k={k}");
        }
    }

    #[test]
    fn fft_product_matches_direct() {
        let n = 600;
        let table: Vec<f64> = (0..n).map(|k| 1.0 / (1.0 + k as f64)).collect();
        let op = Toeplitz::new(table.clone());
        let x: Vec<f64> = (0..n).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let fast = op.apply(&x);
        for i in [0usize, 1, 299, 599] {
            let direct: f64 = (0..n).map(|j| table[i.abs_diff(j)] * x[j]).sum();
            assert!((fast[i] - direct).abs() < 1e-10);
        }
    }
}
