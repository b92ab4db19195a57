//! Dyadic multifractal machinery: gauge functions, mass-exceptional interval
//! selections, covering and partition sums, the Laplace-transform moment
//! identity, and level-set spectrum estimators.

mod covering;
mod gauge;
mod laplace;
mod selection;
mod spectrum;

pub use covering::{
    covering_sum, image_covering_report, intersection_covering_report, CoveringReport, ScaleSum,
};
pub use gauge::{gauge_eval, GaugeFunction};
pub use laplace::{moment_via_laplace, moment_via_laplace_with, LaplaceMoment, LaplaceQuadrature};
pub use selection::{exceptional_intervals, partition_sum, IntervalSelection, ParityFilter};
pub use spectrum::{
    local_exponents, spectrum_counts, spectrum_estimate, LevelSide, SpectrumCounts,
    SpectrumEstimate, SpectrumPoint,
};
