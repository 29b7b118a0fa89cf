use num_complex::Complex64;
use serde::Serialize;

use super::linalg::{
    column_space, least_squares, null_space, orthogonal_complement, spectral_norm,
    unitarity_deviation, CMatrix, RankCut,
};
use super::{Algebra, OrthonormalFrame, SubspaceSpec, Tolerances};
use crate::blaschke::BlaschkeProduct;
use crate::circle::{analyze, hp_metric, hp_norm, inner_product, BoundaryGrid, PNorm};
use crate::decomp::{
    decompose, is_b_inner_matrix, reconstruct, BInnerMatrixReport, BMatrix, ComponentVector,
};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// How the unit-modulus condition on `A` is read: rows `0, 2, 4, …` (counting
/// from zero) hold the coefficients of `J_i`, the remaining rows those of
/// `B·J_i`, and at least one `J_i` row must carry a nonzero entry.
pub const ODD_ROW_INTERPRETATION: &str =
    "rows 1,3,...,2r-1 (1-based) are the J_i coefficient rows under the order (J1, BJ1, ..., Jr, BJr)";

/// Component coordinates on the window `K_{L+1}`, flattened as `j·(L+2) + m`.
/// Constraints are imposed on the sub-window `K_L` (entries with `m ≤ L`);
/// the extra column leaves room for one exact shift by B.
struct Window {
    n: usize,
    l: usize,
}

impl Window {
    fn width(&self) -> usize {
        self.l + 2
    }

    fn dim(&self) -> usize {
        self.n * self.width()
    }

    fn idx(&self, j: usize, m: usize) -> usize {
        j * self.width() + m
    }

    fn inner_indices(&self) -> Vec<usize> {
        (0..self.n)
            .flat_map(|j| (0..=self.l).map(move |m| (j, m)))
            .map(|(j, m)| self.idx(j, m))
            .collect()
    }

    /// Multiplication by `B^s`, discarding whatever leaves the window.
    fn shift(&self, x: &CMatrix, s: usize) -> CMatrix {
        let mut out = CMatrix::zeros(x.nrows(), x.ncols());
        let w = self.width();
        for c in 0..x.ncols() {
            for j in 0..self.n {
                for m in 0..w.saturating_sub(s) {
                    out[(self.idx(j, m + s), c)] = x[(self.idx(j, m), c)];
                }
            }
        }
        out
    }

    fn to_components(&self, v: &[Complex64], b: &BlaschkeProduct) -> ComponentVector {
        let rows = v.chunks(self.width()).map(|r| r.to_vec()).collect();
        ComponentVector::new(b.clone(), rows, self.width() - 1).expect("window shape")
    }
}

struct Prepared<'a> {
    spec: &'a SubspaceSpec,
    win: Window,
    inner: Vec<usize>,
    /// Generators in window coordinates (columns).
    gens: CMatrix,
    max_norm: f64,
}

impl<'a> Prepared<'a> {
    fn new(spec: &'a SubspaceSpec) -> Result<Self> {
        let b = spec.blaschke();
        let l = spec.m_span();
        let win = Window { n: b.degree(), l };
        let mut gens = CMatrix::zeros(win.dim(), spec.generators().len());
        for (i, g) in spec.generators().iter().enumerate() {
            let cv = decompose(g, b, l)?;
            for j in 0..win.n {
                for m in 0..=l {
                    gens[(win.idx(j, m), i)] = cv.coefficient(j, m);
                }
            }
        }
        let max_norm = (0..gens.ncols())
            .map(|c| gens.column(c).norm())
            .fold(0.0, f64::max);
        Ok(Self {
            spec,
            inner: win.inner_indices(),
            win,
            gens,
            max_norm,
        })
    }

    fn tol(&self) -> &Tolerances {
        self.spec.tolerances()
    }

    fn restrict(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.inner.len(), x.ncols());
        for (r, &i) in self.inner.iter().enumerate() {
            out.set_row(r, &x.row(i));
        }
        out
    }

    fn embed(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.win.dim(), x.ncols());
        for (r, &i) in self.inner.iter().enumerate() {
            out.set_row(i, &x.row(r));
        }
        out
    }

    /// Orthonormal basis (inner coordinates) of `K_L ⊖ B^s M₁`.
    fn annihilator(&self, s: usize) -> Result<(CMatrix, RankCut)> {
        let g = self.gens.ncols();
        let per = self.win.l + 1 - s;
        let mut rows = CMatrix::zeros(g * per, self.inner.len());
        for m in s..=self.win.l {
            let shifted = self.restrict(&self.win.shift(&self.gens, m));
            for i in 0..g {
                let r = i * per + (m - s);
                for (c, v) in shifted.column(i).iter().enumerate() {
                    rows[(r, c)] = v.conj();
                }
            }
        }
        null_space(&rows, self.tol().rank_tol, self.tol().min_gap)
    }

    /// Orthonormal basis (inner coordinates) of `M₁ ⊖ B^s M₁`.
    fn wandering(&self, s: usize, base: &(CMatrix, RankCut)) -> Result<WanderingCoords> {
        let shifted = self.annihilator(s)?;
        let (basis, complement) =
            orthogonal_complement(&shifted.0, &base.0, self.tol().rank_tol, self.tol().min_gap)?;
        let expected = shifted.0.ncols() - base.0.ncols();
        if basis.ncols() != expected {
            return Err(Error::RankMismatch(basis.ncols(), expected));
        }
        Ok(WanderingCoords {
            basis,
            null_space_gaps: [base.1.gap_ratio, shifted.1.gap_ratio],
            complement_gap: complement.gap_ratio,
        })
    }

    fn grid_of(&self, column: &[Complex64]) -> Result<(ComponentVector, BoundaryGrid)> {
        let cv = self.win.to_components(column, self.spec.blaschke());
        let grid = reconstruct(&cv, self.spec.grid_size())?;
        Ok((cv, grid))
    }

    /// Converts window columns to phase-normalized grids, rotating the columns
    /// in place to match.
    fn normalized(&self, x: &mut CMatrix) -> Result<Vec<(ComponentVector, BoundaryGrid)>> {
        let mut out = Vec::with_capacity(x.ncols());
        for c in 0..x.ncols() {
            let col: Vec<Complex64> = x.column(c).iter().copied().collect();
            let (_, grid) = self.grid_of(&col)?;
            let rot = canonical_phase(&grid).conj();
            for v in x.column_mut(c).iter_mut() {
                *v *= rot;
            }
            let col: Vec<Complex64> = x.column(c).iter().copied().collect();
            let cv = self.win.to_components(&col, self.spec.blaschke());
            out.push((cv, grid.scale(rot)));
        }
        Ok(out)
    }
}

struct WanderingCoords {
    basis: CMatrix,
    null_space_gaps: [f64; 2],
    complement_gap: f64,
}

impl WanderingCoords {
    fn min_gap(&self) -> f64 {
        self.null_space_gaps
            .iter()
            .copied()
            .fold(self.complement_gap, f64::min)
    }
}

/// Unit scalar that makes the largest Taylor coefficient real and positive;
/// ties go to the lowest index.
fn canonical_phase(grid: &BoundaryGrid) -> Complex64 {
    let spectrum = analyze(grid);
    let coeffs = spectrum.nonnegative();
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let lead = coeffs
        .iter()
        .find(|c| c.norm() >= max * (1.0 - 1e-9))
        .expect("maximum is attained");
    lead / lead.norm()
}

/// `M₁ ⊖ B^s M₁` for the full-algebra closure of the generators.
#[derive(Clone, Debug)]
pub struct WanderingSpace {
    pub frame: OrthonormalFrame,
    pub components: Vec<ComponentVector>,
    pub null_space_gaps: [f64; 2],
    pub complement_gap: f64,
}

impl WanderingSpace {
    pub fn dimension(&self) -> usize {
        self.frame.rank
    }
}

/// Orthonormal frame of `M₁ ⊖ B^s M₁`, `s ∈ {1, 2}`.
pub fn wandering(spec: &SubspaceSpec, s: usize) -> Result<WanderingSpace> {
    if !(1..=2).contains(&s) {
        return Err(Error::Precondition(format!("shift power {s} must be 1 or 2")));
    }
    if spec.m_span() < s + 8 {
        return Err(Error::Precondition(format!(
            "M_span = {} must be at least {}",
            spec.m_span(),
            s + 8
        )));
    }
    let prep = Prepared::new(spec)?;
    let base = prep.annihilator(0)?;
    let w = prep.wandering(s, &base)?;
    let mut cols = prep.embed(&w.basis);
    let pairs = prep.normalized(&mut cols)?;
    let gap_ratio = w.min_gap();
    let (components, vectors): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    Ok(WanderingSpace {
        frame: OrthonormalFrame {
            rank: vectors.len(),
            vectors,
            gap_ratio,
            singular_values: Vec::new(),
        },
        components,
        null_space_gaps: w.null_space_gaps,
        complement_gap: w.complement_gap,
    })
}

/// `M = J₁H²(B) ⊕ … ⊕ J_rH²(B)` recovered from generators.
#[derive(Clone, Debug)]
pub struct BeurlingDecomposition {
    pub r: usize,
    pub inner_functions: Vec<BoundaryGrid>,
    pub inner_components: Vec<ComponentVector>,
    pub bmatrix: BMatrix,
    pub b_inner: BInnerMatrixReport,
    /// Largest relative L² distance of a generator from the model span.
    pub residual: f64,
    pub generator_residuals: Vec<f64>,
    /// Same residuals measured in the spec's `p` (metric form when `p < 1`).
    pub residuals_p: Vec<f64>,
    pub residual_passed: bool,
    pub gap_ratio: f64,
    pub tolerances: Tolerances,
}

impl BeurlingDecomposition {
    pub fn passed(&self) -> bool {
        self.b_inner.passed && self.residual_passed
    }
}

type InnerPart = (CMatrix, Vec<(ComponentVector, BoundaryGrid)>, f64);

fn inner_part<'a>(
    prep: &Prepared<'a>,
    base: &(CMatrix, RankCut),
) -> Result<InnerPart> {
    let w1 = prep.wandering(1, base)?;
    let r = w1.basis.ncols();
    let n = prep.win.n;
    if r > n {
        return Err(Error::TooManyInnerFunctions { r, n });
    }
    if r == 0 {
        return Err(Error::EmptyFrame);
    }
    let mut cols = prep.embed(&w1.basis);
    let pairs = prep.normalized(&mut cols)?;
    Ok((cols, pairs, w1.min_gap()))
}

fn shifted_grids(
    start: &BoundaryGrid,
    bz: &BoundaryGrid,
    from: usize,
    to: usize,
) -> Result<Vec<BoundaryGrid>> {
    let mut out = Vec::with_capacity(to + 1 - from.min(to + 1));
    let mut g = start.clone();
    for m in 0..=to {
        if m >= from {
            out.push(g.clone());
        }
        if m < to {
            g = g.mul(bz)?;
        }
    }
    Ok(out)
}

/// Residuals of each generator after sequential projection onto orthonormal
/// `basis`, relative in L² and in the `p` quantity.
fn model_residuals(
    generators: &[BoundaryGrid],
    basis: &[BoundaryGrid],
    p: PNorm,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut l2 = Vec::with_capacity(generators.len());
    let mut lp = Vec::with_capacity(generators.len());
    for g in generators {
        let mut res = g.clone();
        for v in basis {
            let c = inner_product(&res, v)?;
            res = res.sub(&v.scale(c))?;
        }
        let norm = hp_norm(g, PNorm::TWO);
        let metric = hp_metric(g, p);
        l2.push(if norm > 0.0 {
            hp_norm(&res, PNorm::TWO) / norm
        } else {
            0.0
        });
        lp.push(if metric > 0.0 {
            hp_metric(&res, p) / metric
        } else {
            0.0
        });
    }
    Ok((l2, lp))
}

/// Decomposition of a subspace invariant under the full algebra.
pub fn beurling_decompose(spec: &SubspaceSpec) -> Result<BeurlingDecomposition> {
    if spec.algebra() != Algebra::Full {
        return Err(Error::WrongAlgebra("full"));
    }
    let prep = Prepared::new(spec)?;
    let base = prep.annihilator(0)?;
    let (_, pairs, gap_ratio) = inner_part(&prep, &base)?;
    let (inner_components, inner_functions): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    let bmatrix = BMatrix::from_columns(&inner_components)?;
    let n = spec.grid_size();
    let mut b_inner = is_b_inner_matrix(&bmatrix, n)?;
    b_inner.passed = b_inner.deviation <= spec.tolerances().binner_tol;
    let bz = spec.blaschke().grid(n)?;
    let mut basis = Vec::new();
    for j in &inner_functions {
        basis.extend(shifted_grids(j, &bz, 0, spec.m_span())?);
    }
    let (generator_residuals, residuals_p) = model_residuals(spec.generators(), &basis, spec.p())?;
    let residual = generator_residuals.iter().copied().fold(0.0, f64::max);
    Ok(BeurlingDecomposition {
        r: inner_functions.len(),
        inner_functions,
        inner_components,
        bmatrix,
        b_inner,
        residual,
        generator_residuals,
        residuals_p,
        residual_passed: residual <= spec.tolerances().beurling_tol,
        gap_ratio,
        tolerances: *spec.tolerances(),
    })
}

/// The structure `⊕⟨φ_j⟩ ⊕ ⊕ B²J_lH²(B)` of a subspace invariant under `B²`
/// and `B³` but not under `B`.
#[derive(Clone, Debug)]
pub struct ConstrainedDecomposition {
    pub r: usize,
    pub inner_functions: Vec<BoundaryGrid>,
    pub inner_components: Vec<ComponentVector>,
    pub k: usize,
    pub wandering_vectors: Vec<BoundaryGrid>,
    pub wandering_components: Vec<ComponentVector>,
    /// `2r × k`, rows ordered `(J₁, BJ₁, …, J_r, BJ_r)`.
    pub a: CMatrix,
    pub dim_m1_minus_b2m1: usize,
    pub residual: f64,
    pub generator_residuals: Vec<f64>,
    pub b_invariance_witness: f64,
    pub unitarity_deviation: f64,
    /// Largest |entry| among the `J_i` rows of `A`.
    pub odd_row_max: f64,
    /// Whether `k` attains `2r − 1`.
    pub k_is_2r_minus_1: bool,
    /// Largest column residual of the least-squares fit for `A`.
    pub fit_residual: f64,
    pub gap_ratio: f64,
    pub tolerances: Tolerances,
}

impl ConstrainedDecomposition {
    /// Whether every structural certificate holds at the recorded tolerances.
    pub fn certified(&self) -> bool {
        let t = &self.tolerances;
        self.k < 2 * self.r
            && self.unitarity_deviation <= t.unitarity_tol
            && self.odd_row_max > t.odd_row_tol
            && self.residual <= t.beurling_tol
            && self.b_invariance_witness > t.non_invariance_tol
    }
}

/// Returned when the generated subspace turns out to be invariant under B.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FullyInvariant {
    pub r: usize,
    pub k: usize,
    pub dim_m1_minus_b2m1: usize,
    pub b_invariance_witness: f64,
    pub gap_ratio: f64,
}

#[derive(Clone, Debug)]
pub enum ConstrainedOutcome {
    Decomposed(Box<ConstrainedDecomposition>),
    /// The hypothesis "not invariant under B" fails; use
    /// [`beurling_decompose`] with the full algebra instead.
    FullyInvariant(FullyInvariant),
}

/// Decomposition of a subspace invariant under `B²` and `B³`.
pub fn constrained_decompose(spec: &SubspaceSpec) -> Result<ConstrainedOutcome> {
    if spec.algebra() != Algebra::Constrained {
        return Err(Error::WrongAlgebra("constrained"));
    }
    let tol = *spec.tolerances();
    let prep = Prepared::new(spec)?;
    let base = prep.annihilator(0)?;
    let (j_cols, j_pairs, gap1) = inner_part(&prep, &base)?;
    let r = j_cols.ncols();

    let w2 = prep.wandering(2, &base)?;
    let dim2 = w2.basis.ncols();
    if dim2 != 2 * r {
        return Err(Error::InconsistentDimension {
            found: dim2,
            expected: 2 * r,
        });
    }
    let q = prep.embed(&w2.basis);
    let projected = q.adjoint() * &prep.gens;
    let (u, kcut, _) = column_space(&projected, prep.max_norm, tol.rank_tol, tol.min_gap)?;
    let k = kcut.rank;
    let mut phi = &q * &u;
    let gap_ratio = gap1.min(w2.min_gap()).min(kcut.gap_ratio);

    // B·φ_j projected to W₂ and then off span{φ}.
    let witness = {
        let y = &q * (q.adjoint() * prep.win.shift(&phi, 1));
        let x = &y - &phi * (phi.adjoint() * &y);
        spectral_norm(&x)
    };
    if k == 2 * r || witness < tol.non_invariance_tol {
        return Ok(ConstrainedOutcome::FullyInvariant(FullyInvariant {
            r,
            k,
            dim_m1_minus_b2m1: dim2,
            b_invariance_witness: witness,
            gap_ratio,
        }));
    }

    let phi_pairs = prep.normalized(&mut phi)?;
    let mut rows = CMatrix::zeros(prep.win.dim(), 2 * r);
    let shifted_j = prep.win.shift(&j_cols, 1);
    for i in 0..r {
        rows.set_column(2 * i, &j_cols.column(i));
        rows.set_column(2 * i + 1, &shifted_j.column(i));
    }
    let a = least_squares(&rows, &phi);
    let fit = &rows * &a - &phi;
    let fit_residual = (0..fit.ncols())
        .map(|c| fit.column(c).norm())
        .fold(0.0, f64::max);
    let odd_row_max = (0..r)
        .flat_map(|i| a.row(2 * i).iter().map(|v| v.norm()).collect::<Vec<_>>())
        .fold(0.0, f64::max);

    let (inner_components, inner_functions): (Vec<_>, Vec<_>) = j_pairs.into_iter().unzip();
    let (wandering_components, wandering_vectors): (Vec<_>, Vec<_>) =
        phi_pairs.into_iter().unzip();
    let n = spec.grid_size();
    let bz = spec.blaschke().grid(n)?;
    let mut basis = wandering_vectors.clone();
    for j in &inner_functions {
        basis.extend(shifted_grids(j, &bz, 2, spec.m_span())?);
    }
    let (generator_residuals, _) = model_residuals(spec.generators(), &basis, spec.p())?;
    let residual = generator_residuals.iter().copied().fold(0.0, f64::max);

    Ok(ConstrainedOutcome::Decomposed(Box::new(
        ConstrainedDecomposition {
            r,
            inner_functions,
            inner_components,
            k,
            wandering_vectors,
            wandering_components,
            unitarity_deviation: unitarity_deviation(&a),
            a,
            dim_m1_minus_b2m1: dim2,
            residual,
            generator_residuals,
            b_invariance_witness: witness,
            odd_row_max,
            k_is_2r_minus_1: k + 1 == 2 * r,
            fit_residual,
            gap_ratio,
            tolerances: tol,
        },
    )))
}

/// Independent grid-side checks of a constrained decomposition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub p: f64,
    pub generator_residuals: Vec<f64>,
    pub generator_residuals_p: Vec<f64>,
    pub max_residual: f64,
    pub unitarity_deviation: f64,
    /// `sup` over unit `v ∈ M` of `dist(B·v, M)` on the truncation.
    pub b_invariance_witness: f64,
    /// Largest `|⟨φ_j, B^m J_l⟩|` with `2 ≤ m ≤ M_span`.
    pub orthogonality_residual: f64,
    pub odd_row_max: f64,
    pub k_is_2r_minus_1: bool,
    pub odd_row_interpretation: &'static str,
    pub residual_passed: bool,
    pub unitarity_passed: bool,
    pub witness_passed: bool,
    pub orthogonality_passed: bool,
    pub odd_row_passed: bool,
    pub passed: bool,
    pub tolerances: Tolerances,
}

/// Recomputes the certificates of `dec` on the grid. `dec` may come from
/// this engine or be an external hypothesis of the same shape.
pub fn verify_decomposition(
    spec: &SubspaceSpec,
    dec: &ConstrainedDecomposition,
) -> Result<VerificationReport> {
    let tol = *spec.tolerances();
    let n = spec.grid_size();
    let bz = spec.blaschke().grid(n)?;

    let mut tail = Vec::new();
    for j in &dec.inner_functions {
        tail.extend(shifted_grids(j, &bz, 2, spec.m_span())?);
    }
    let mut model = dec.wandering_vectors.clone();
    model.extend(tail.iter().cloned());
    let (generator_residuals, generator_residuals_p) =
        model_residuals(spec.generators(), &model, spec.p())?;
    let max_residual = generator_residuals.iter().copied().fold(0.0, f64::max);

    let mut w = Vec::with_capacity(2 * dec.inner_functions.len());
    for j in &dec.inner_functions {
        w.push(j.clone());
        w.push(j.mul(&bz)?);
    }
    let k = dec.wandering_vectors.len();
    let mut f = CMatrix::zeros(w.len(), k);
    let mut t = CMatrix::zeros(w.len(), k);
    for (c, phi) in dec.wandering_vectors.iter().enumerate() {
        let bphi = phi.mul(&bz)?;
        for (r, basis) in w.iter().enumerate() {
            f[(r, c)] = inner_product(phi, basis)?;
            t[(r, c)] = inner_product(&bphi, basis)?;
        }
    }
    let b_invariance_witness = if k == 0 {
        0.0
    } else {
        let (uf, _, _) = column_space(&f, spectral_norm(&f), tol.rank_tol, 1.0)?;
        let x = &t - &uf * (uf.adjoint() * &t);
        spectral_norm(&x)
    };

    let mut orthogonality_residual = 0.0f64;
    for phi in &dec.wandering_vectors {
        for v in &tail {
            orthogonality_residual = orthogonality_residual.max(inner_product(phi, v)?.norm());
        }
    }

    let unitarity = unitarity_deviation(&dec.a);
    let odd_row_max = (0..dec.a.nrows() / 2)
        .flat_map(|i| dec.a.row(2 * i).iter().map(|v| v.norm()).collect::<Vec<_>>())
        .fold(0.0, f64::max);
    let residual_passed = max_residual <= tol.beurling_tol;
    let unitarity_passed = unitarity <= tol.unitarity_tol;
    let witness_passed = b_invariance_witness > tol.non_invariance_tol;
    let orthogonality_passed = orthogonality_residual <= tol.beurling_tol;
    let odd_row_passed = odd_row_max > tol.odd_row_tol;
    Ok(VerificationReport {
        p: spec.p().value(),
        generator_residuals,
        generator_residuals_p,
        max_residual,
        unitarity_deviation: unitarity,
        b_invariance_witness,
        orthogonality_residual,
        odd_row_max,
        k_is_2r_minus_1: k + 1 == dec.a.nrows(),
        odd_row_interpretation: ODD_ROW_INTERPRETATION,
        passed: residual_passed
            && unitarity_passed
            && witness_passed
            && orthogonality_passed
            && odd_row_passed,
        residual_passed,
        unitarity_passed,
        witness_passed,
        orthogonality_passed,
        odd_row_passed,
        tolerances: tol,
    })
}

/// Unitary relating the inner functions of two decompositions.
#[derive(Clone, Debug)]
pub struct UniquenessReport {
    /// `J^{(1)}_i ≈ Σ_j U_{ij} J^{(2)}_j`.
    pub u: CMatrix,
    pub unitarity_deviation: f64,
    pub fit_residual: f64,
    pub residual: f64,
}

/// Least-squares unitary between two decompositions of the same subspace.
pub fn uniqueness_unitary(
    first: &BeurlingDecomposition,
    second: &BeurlingDecomposition,
) -> Result<UniquenessReport> {
    if first.r != second.r {
        return Err(Error::RankMismatch(first.r, second.r));
    }
    let r = first.r;
    let mut gram = CMatrix::zeros(r, r);
    let mut cross = CMatrix::zeros(r, r);
    for (a, x) in second.inner_functions.iter().enumerate() {
        for (b, y) in second.inner_functions.iter().enumerate() {
            gram[(a, b)] = inner_product(x, y)?;
        }
    }
    for (i, x) in first.inner_functions.iter().enumerate() {
        for (b, y) in second.inner_functions.iter().enumerate() {
            cross[(i, b)] = inner_product(x, y)?;
        }
    }
    // Normal equations U·G = C, solved as Gᵀ Uᵀ = Cᵀ.
    let u = least_squares(&gram.transpose(), &cross.transpose()).transpose();
    let mut fit_residual = 0.0f64;
    for (i, target) in first.inner_functions.iter().enumerate() {
        let mut approx = BoundaryGrid::constant(target.len(), ZERO)?;
        for (j, basis) in second.inner_functions.iter().enumerate() {
            approx = approx.add(&basis.scale(u[(i, j)]))?;
        }
        fit_residual = fit_residual.max(hp_norm(&target.sub(&approx)?, PNorm::TWO));
    }
    let unitarity = unitarity_deviation(&u);
    Ok(UniquenessReport {
        unitarity_deviation: unitarity,
        fit_residual,
        residual: unitarity.max(fit_residual),
        u,
    })
}
