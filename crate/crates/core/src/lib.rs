//! Hardy-space computations attached to a finite Blaschke product `B`.
//!
//! Functions live as samples on roots of unity ([`BoundaryGrid`]). On top of
//! that sit the orthonormal basis `e_{jm}` of `H²` built from `B`, component
//! decompositions, and the recovery of subspaces invariant under `H^∞(B)` or
//! under the algebra generated by `B²` and `B³`.
//!
//! ```
//! use hardy_core::{decompose, reconstruct, synthesize, BlaschkeProduct, CoefficientSeries, Variable};
//!
//! let b = BlaschkeProduct::new(vec![0.0.into(), 0.5.into()]).unwrap();
//! let f = synthesize(&CoefficientSeries::from_real(&[1.0, 2.0, 3.0], Variable::Z), 1024).unwrap();
//! let cv = decompose(&f, &b, 8).unwrap();
//! let back = reconstruct(&cv, 1024).unwrap();
//! assert!(back.max_distance(&f).unwrap() < 1e-12);
//! ```

pub mod blaschke;
pub mod circle;
pub mod conformance;
pub mod decomp;
pub mod error;
pub mod outer;
pub mod subspace;

pub use num_complex::Complex64;

pub use blaschke::{compose, compose_grid, BasisIndex, BlaschkeProduct};
pub use circle::{
    analyze, harmonic_conjugate, hp_norm, riesz_projection, synthesize, BoundaryGrid,
    CoefficientSeries, PNorm, Spectrum, Variable, DEFAULT_GRID, GRID_TOL,
};
pub use decomp::{decompose, reconstruct, BMatrix, ComponentVector};
pub use error::{Error, Result};
pub use subspace::{
    beurling_decompose, constrained_decompose, verify_decomposition, Algebra, ConstrainedOutcome,
    SubspaceSpec, Tolerances,
};
