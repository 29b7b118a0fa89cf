//! Invariant subspaces generated by finitely many functions.
//!
//! The closure `M₁` of `H^∞(B)·span{g_i}` is handled through the window
//! `K_L = H² ⊖ B^{L+1}H²` in component coordinates, where multiplication by
//! B is an exact shift. Orthogonal complements of shifted copies of `M₁` are
//! computed as null spaces of the compressed constraints, which is exact
//! whenever the wandering space fits in the window.

mod engine;
pub mod linalg;

pub use engine::{
    beurling_decompose, constrained_decompose, uniqueness_unitary, verify_decomposition,
    wandering, BeurlingDecomposition, ConstrainedDecomposition, ConstrainedOutcome,
    FullyInvariant, UniquenessReport, VerificationReport, WanderingSpace,
    ODD_ROW_INTERPRETATION,
};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::blaschke::BlaschkeProduct;
use crate::circle::{hp_norm, BoundaryGrid, PNorm};
use crate::decomp::BINNER_TOL;
use crate::error::{Error, Result};
use linalg::{column_space, RankCut};

/// Default number of shifts in truncated spans.
pub const DEFAULT_M_SPAN: usize = 32;

/// Smallest admissible `M_span`.
pub const MIN_M_SPAN: usize = 8;

/// Which powers of B the subspace is required to be invariant under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Algebra {
    /// All powers of B.
    Full,
    /// `B²` and `B³`, hence every power except the first.
    Constrained,
}

/// Numerical thresholds used by the engine.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative singular-value cutoff.
    pub rank_tol: f64,
    /// Required ratio between the last kept and the first dropped value.
    pub min_gap: f64,
    /// Bound on generator residuals against a recovered decomposition.
    pub beurling_tol: f64,
    /// Witness level below which M is treated as B-invariant.
    pub non_invariance_tol: f64,
    /// Bound on B-inner deviations.
    pub binner_tol: f64,
    /// Bound on `|A*A − I|`.
    pub unitarity_tol: f64,
    /// Modulus an odd-row entry of A must exceed.
    pub odd_row_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_tol: 1e-8,
            min_gap: 1e3,
            beurling_tol: 1e-6,
            non_invariance_tol: 1e-4,
            binner_tol: BINNER_TOL,
            unitarity_tol: 1e-8,
            odd_row_tol: 1e-6,
        }
    }
}

/// A subspace given by generators, the algebra acting on it and a window.
#[derive(Clone, Debug)]
pub struct SubspaceSpec {
    blaschke: BlaschkeProduct,
    generators: Vec<BoundaryGrid>,
    algebra: Algebra,
    m_span: usize,
    p: PNorm,
    tolerances: Tolerances,
}

impl SubspaceSpec {
    pub fn new(
        blaschke: BlaschkeProduct,
        generators: Vec<BoundaryGrid>,
        algebra: Algebra,
        m_span: usize,
    ) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::Precondition("at least one generator is required".into()))?;
        let n = first.len();
        for g in &generators {
            if g.len() != n {
                return Err(Error::SizeMismatch {
                    left: n,
                    right: g.len(),
                });
            }
            if !g.is_analytic() {
                return Err(Error::NotAnalytic);
            }
        }
        if generators.iter().all(|g| hp_norm(g, PNorm::TWO) <= 1e-8) {
            return Err(Error::ZeroInput);
        }
        if m_span < MIN_M_SPAN {
            return Err(Error::Precondition(format!(
                "M_span = {m_span} is below the minimum {MIN_M_SPAN}"
            )));
        }
        Ok(Self {
            blaschke,
            generators,
            algebra,
            m_span,
            p: PNorm::TWO,
            tolerances: Tolerances::default(),
        })
    }

    /// Sets the exponent used when re-verifying residuals.
    pub fn with_p(mut self, p: PNorm) -> Self {
        self.p = p;
        self
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }

    pub fn blaschke(&self) -> &BlaschkeProduct {
        &self.blaschke
    }

    pub fn generators(&self) -> &[BoundaryGrid] {
        &self.generators
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn m_span(&self) -> usize {
        self.m_span
    }

    pub fn grid_size(&self) -> usize {
        self.generators[0].len()
    }

    pub fn p(&self) -> PNorm {
        self.p
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }
}

/// Orthonormal grids spanning a subspace, with the rank decision.
#[derive(Clone, Debug)]
pub struct OrthonormalFrame {
    pub vectors: Vec<BoundaryGrid>,
    pub rank: usize,
    pub gap_ratio: f64,
    pub singular_values: Vec<f64>,
}

impl OrthonormalFrame {
    /// Distance from `f` to the span of the frame.
    pub fn distance(&self, f: &BoundaryGrid) -> Result<f64> {
        let mut residual = f.clone();
        for v in &self.vectors {
            let c = crate::circle::inner_product(&residual, v)?;
            residual = residual.sub(&v.scale(c))?;
        }
        Ok(hp_norm(&residual, PNorm::TWO))
    }
}

/// Orthonormal frame of `span{B^m g_i : m ∈ shifts}` computed directly on
/// the grid by SVD of the sample matrix.
pub fn span_frame(spec: &SubspaceSpec, shifts: &[usize]) -> Result<OrthonormalFrame> {
    if shifts.is_empty() {
        return Err(Error::Precondition("shift set must be nonempty".into()));
    }
    let n = spec.grid_size();
    let bz = spec.blaschke().grid(n)?;
    let max_shift = shifts.iter().copied().max().unwrap_or(0);
    let mut vectors = Vec::new();
    for g in spec.generators() {
        let mut power = g.clone();
        for m in 0..=max_shift {
            if shifts.contains(&m) {
                vectors.push(power.clone());
            }
            if m < max_shift {
                power = power.mul(&bz)?;
            }
        }
    }
    frame_of(&vectors, spec.tolerances())
}

/// Orthonormal frame of the span of arbitrary grids of equal size.
pub fn frame_of(vectors: &[BoundaryGrid], tol: &Tolerances) -> Result<OrthonormalFrame> {
    let n = vectors.first().ok_or(Error::EmptyFrame)?.len();
    let scale = 1.0 / (n as f64).sqrt();
    let mut m = DMatrix::<Complex64>::zeros(n, vectors.len());
    for (col, v) in vectors.iter().enumerate() {
        for (row, s) in v.samples().iter().enumerate() {
            m[(row, col)] = s * scale;
        }
    }
    let largest = vectors
        .iter()
        .map(|v| hp_norm(v, PNorm::TWO))
        .fold(0.0, f64::max);
    if largest <= tol.rank_tol {
        return Err(Error::EmptyFrame);
    }
    let (basis, RankCut { rank, gap_ratio }, singular_values) = column_space(
        &m,
        linalg::spectral_norm(&m),
        tol.rank_tol,
        tol.min_gap,
    )?;
    let vectors = (0..rank)
        .map(|c| {
            BoundaryGrid::new(basis.column(c).iter().map(|v| v / scale).collect())
                .map(|g| g.tagged_analytic())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OrthonormalFrame {
        vectors,
        rank,
        gap_ratio,
        singular_values,
    })
}
