use serde::{Deserialize, Serialize};

use super::kernel::Toeplitz;
use super::{log_table, EnergyKernel, EnergyReport};
use crate::chaos::{DyadicMeasure, Provenance};
use crate::error::{Error, Result};
use crate::fractal::IntervalSelection;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Tolerance on the norm of the projected-gradient step, scaled by `L`.
    pub gradient_tolerance: f64,
    /// Tolerance on the Frank–Wolfe duality gap, an upper bound on the
    /// distance of the objective to its minimum.
    pub gap_tolerance: f64,
    /// Use the monotone accelerated variant (MFISTA) instead of plain
    /// projected gradient. Both keep the objective non-increasing.
    pub accelerated: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            gradient_tolerance: 1e-8,
            gap_tolerance: 1e-6,
            accelerated: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub measure: DyadicMeasure,
    pub energy: EnergyReport,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub gap: f64,
    /// Objective at the start and after every iteration.
    pub objective_trace: Vec<f64>,
}

impl Equilibrium {
    /// True when no iteration increased the objective beyond rounding.
    pub fn descent_holds(&self) -> bool {
        self.objective_trace
            .windows(2)
            .all(|w| w[1] <= w[0] + 1e-13 * w[0].abs())
    }
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        acc += u;
        let t = (acc - 1.0) / (i + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

struct Problem<'a> {
    op: &'a Toeplitz,
    support: &'a [usize],
    scratch_len: usize,
}

impl Problem<'_> {
    /// `K x` restricted to the support.
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.scratch_len];
        for (&i, &v) in self.support.iter().zip(x) {
            full[i] = v;
        }
        let kx = self.op.apply(&full);
        self.support.iter().map(|&i| kx[i]).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn equilibrium_measure(support: &IntervalSelection) -> Result<Equilibrium> {
    equilibrium_measure_with(support, &SolverOptions::default())
}

/// Minimizes the log energy over probability measures carried by the
/// selected cells.
pub fn equilibrium_measure_with(
    support: &IntervalSelection,
    options: &SolverOptions,
) -> Result<Equilibrium> {
    if support.is_empty() {
        return Err(Error::invalid("support", "empty selection"));
    }
    let n = support.resolution();
    let op = Toeplitz::new(log_table(n));
    let cells = support.indices();
    let problem = Problem {
        op: &op,
        support: cells,
        scratch_len: op.len(),
    };
    let size = cells.len();
    let lipschitz = 2.0 * op.max_row_sum(cells);

    let mut x = vec![1.0 / size as f64; size];
    let mut kx = problem.apply(&x);
    let mut fx = dot(&x, &kx);
    let mut trace = vec![fx];
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut iterations = 0;

    let diagnostics = |x: &[f64], kx: &[f64]| {
        let g: Vec<f64> = kx.iter().map(|v| 2.0 * v).collect();
        let gmin = g.iter().copied().fold(f64::INFINITY, f64::min);
        let gap = (dot(&g, x) - gmin).max(0.0);
        let step: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - b / lipschitz).collect();
        let p = project_simplex(&step);
        let norm = lipschitz
            * x.iter()
                .zip(&p)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
        (norm, gap)
    };

    let (mut gradient_norm, mut gap) = diagnostics(&x, &kx);
    while gradient_norm > options.gradient_tolerance && gap > options.gap_tolerance {
        if iterations == options.max_iterations {
            return Err(Error::NotConverged {
                iterations,
                gradient_norm,
                gap,
            });
        }
        iterations += 1;
        let ky = if options.accelerated { problem.apply(&y) } else { kx.clone() };
        let base = if options.accelerated { &y } else { &x };
        let step: Vec<f64> = base
            .iter()
            .zip(&ky)
            .map(|(a, b)| a - 2.0 * b / lipschitz)
            .collect();
        let z = project_simplex(&step);
        let kz = problem.apply(&z);
        let fz = dot(&z, &kz);
        let previous = x.clone();
        if fz <= fx {
            x = z.clone();
            kx = kz;
            fx = fz;
        }
        if options.accelerated {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            y = x
                .iter()
                .zip(&z)
                .zip(&previous)
                .map(|((xi, zi), pi)| xi + (t / t_next) * (zi - xi) + ((t - 1.0) / t_next) * (xi - pi))
                .collect();
            t = t_next;
        }
        trace.push(fx);
        (gradient_norm, gap) = diagnostics(&x, &kx);
    }

    let mut masses = vec![0.0; op.len()];
    for (&i, &v) in cells.iter().zip(&x) {
        masses[i] = v;
    }
    let measure = DyadicMeasure::from_masses(
        masses,
        Provenance::Synthetic {
            tag: "equilibrium".into(),
        },
    )?;
    let energy = EnergyReport::new(EnergyKernel::Log, fx, n);
    let result = Equilibrium {
        measure,
        energy,
        iterations,
        gradient_norm,
        gap,
        objective_trace: trace,
    };
    assert!(result.descent_holds(), "equilibrium objective increased");
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::log_energy;
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.2, 0.3, 0.5]);
        assert_eq!(p, vec![0.2, 0.3, 0.5]);
        let p = project_simplex(&[2.0, 0.0, 0.0]);
        assert_eq!(p, vec![1.0, 0.0, 0.0]);
        let p = project_simplex(&[0.5, 0.5, 0.5, 0.5]);
        assert!(p.iter().all(|v| (v - 0.25).abs() < 1e-15));
    }

    /// Interior minimizer `K⁻¹1 / 1ᵀK⁻¹1`, valid when it is nonnegative.
    fn qp_oracle(n: u32) -> (Vec<f64>, f64) {
        let table = log_table(n);
        let len = table.len();
        let k = DMatrix::from_fn(len, len, |i, j| table[i.abs_diff(j)]);
        let ones = DVector::from_element(len, 1.0);
        let w = k.clone().lu().solve(&ones).unwrap();
        let x = &w / w.sum();
        let e = x.dot(&(&k * &x));
        (x.iter().copied().collect(), e)
    }

    #[test]
    fn matches_quadratic_program_oracle() {
        for n in [4u32, 6] {
            let (x, e) = qp_oracle(n);
            assert!(x.iter().all(|&v| v > 0.0));
            let eq = equilibrium_measure(&IntervalSelection::all(n)).unwrap();
            assert!((eq.energy.value - e).abs() < 1e-6, "n={n}");
            for (a, b) in eq.measure.masses().iter().zip(&x) {
                assert!((a - b).abs() < 1e-3);
            }
            assert!(eq.descent_holds());
        }
    }

    #[test]
    fn full_interval_at_n10() {
        let eq = equilibrium_measure(&IntervalSelection::all(10)).unwrap();
        let target = 8f64.ln();
        assert!((eq.energy.value - target).abs() < 0.02, "{}", eq.energy.value);
        let uniform = log_energy(&DyadicMeasure::lebesgue(10).unwrap()).unwrap().value;
        assert!(eq.energy.value < uniform);
        let m = eq.measure.masses();
        // arcsine shape: heavy ends, light middle
        assert!(m[0] > 4.0 * m[512] && m[1023] > 4.0 * m[511]);
        assert!(eq.descent_holds());
    }

    #[test]
    fn single_cell_support() {
        let eq = equilibrium_measure(&IntervalSelection::single(8, 17).unwrap()).unwrap();
        assert_eq!(eq.measure.masses()[17], 1.0);
        let expected = (2.0 * 256.0f64).ln() + 1.5;
        assert!((eq.energy.value - expected).abs() < 1e-12);
    }

    #[test]
    fn plain_projected_gradient_also_descends() {
        let options = SolverOptions {
            accelerated: false,
            gap_tolerance: 1e-4,
            ..SolverOptions::default()
        };
        let eq = equilibrium_measure_with(&IntervalSelection::all(5), &options).unwrap();
        assert!(eq.descent_holds());
        let (_, e) = qp_oracle(5);
        assert!(eq.energy.value - e < 1e-4 + 1e-12);
    }

    #[test]
    fn cantor_support_beats_uniform() {
        let sel = IntervalSelection::cantor_quarters(8, 4).unwrap();
        let eq = equilibrium_measure(&sel).unwrap();
        let mut masses = vec![0.0; 256];
        for &i in sel.indices() {
            masses[i] = 1.0 / sel.len() as f64;
        }
        let uniform = DyadicMeasure::from_masses(masses, Provenance::Synthetic { tag: "u".into() }).unwrap();
        assert!(eq.energy.value <= log_energy(&uniform).unwrap().value + 1e-12);
        assert!(eq.measure.masses().iter().enumerate().all(|(i, &m)| m == 0.0 || sel.contains(i)));
    }
}
