//! Inputs shared by the benchmarks.

use hardy_core::{synthesize, BlaschkeProduct, BoundaryGrid, CoefficientSeries, Complex64};

/// A degree-`n` product with zeros spread inside `|z| ≤ 0.6`.
pub fn sample_blaschke(n: usize) -> BlaschkeProduct {
    let zeros = (0..n)
        .map(|j| {
            if j == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar(0.6 * j as f64 / n as f64, 2.3 * j as f64)
            }
        })
        .collect();
    BlaschkeProduct::new(zeros).expect("zeros are admissible")
}

/// Polynomial of the given degree with slowly decaying coefficients.
pub fn sample_polynomial(degree: usize, n: usize) -> BoundaryGrid {
    let coeffs = (0..=degree)
        .map(|k| Complex64::from_polar(1.0 / (1.0 + k as f64), 0.7 * k as f64))
        .collect();
    synthesize(&CoefficientSeries::z(coeffs), n).expect("grid size is valid")
}
