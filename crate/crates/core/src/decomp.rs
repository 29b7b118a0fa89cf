//! The orthogonal splitting `H² = ⊕_j e_{j0} H²(B)` and B-inner certificates.

use num_complex::Complex64;
use serde::Serialize;

use crate::blaschke::{compose_grid, BlaschkeProduct};
use crate::circle::{hp_norm, inner_product, BoundaryGrid, CoefficientSeries, PNorm, Variable};
use crate::error::{Error, Result};

/// Tolerance on pointwise B-inner deviations.
pub const BINNER_TOL: f64 = 1e-8;

/// Number of shifts in the Gram certificate of [`is_b_inner_function`].
pub const GRAM_SHIFTS: usize = 8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Components `f_0, …, f_{n−1}` of `f = Σ_j e_{j0} f_j(B)`, each a series in B.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentVector {
    blaschke: BlaschkeProduct,
    components: Vec<CoefficientSeries>,
    m_max: usize,
}

impl ComponentVector {
    /// Builds a component vector from raw coefficient rows, zero-padding or
    /// rejecting rows so that each has length `m_max + 1`.
    pub fn new(
        blaschke: BlaschkeProduct,
        rows: Vec<Vec<Complex64>>,
        m_max: usize,
    ) -> Result<Self> {
        if rows.len() != blaschke.degree() {
            return Err(Error::SizeMismatch {
                left: rows.len(),
                right: blaschke.degree(),
            });
        }
        let mut components = Vec::with_capacity(rows.len());
        for mut row in rows {
            if row.len() > m_max + 1 {
                return Err(Error::IndexOutOfRange {
                    index: row.len() - 1,
                    limit: m_max,
                });
            }
            row.resize(m_max + 1, ZERO);
            components.push(CoefficientSeries::b(row));
        }
        Ok(Self {
            blaschke,
            components,
            m_max,
        })
    }

    pub fn zero(blaschke: BlaschkeProduct, m_max: usize) -> Self {
        let n = blaschke.degree();
        Self::new(blaschke, vec![Vec::new(); n], m_max).expect("shape is valid")
    }

    pub fn blaschke(&self) -> &BlaschkeProduct {
        &self.blaschke
    }

    pub fn components(&self) -> &[CoefficientSeries] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &CoefficientSeries {
        &self.components[j]
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    /// Coefficient `c_{jm}`.
    pub fn coefficient(&self, j: usize, m: usize) -> Complex64 {
        self.components[j].coefficient(m)
    }

    /// Coefficients flattened as `j·(m_max+1) + m`.
    pub fn flatten(&self) -> Vec<Complex64> {
        self.components
            .iter()
            .flat_map(|c| c.coefficients().iter().copied())
            .collect()
    }

    /// Multiplication by `B`: every component moves up one power. The top
    /// coefficient is dropped unless `grow` extends the window.
    pub fn shifted(&self, grow: bool) -> Self {
        let m_max = if grow { self.m_max + 1 } else { self.m_max };
        let rows = self
            .components
            .iter()
            .map(|c| {
                let mut row = Vec::with_capacity(m_max + 1);
                row.push(ZERO);
                row.extend_from_slice(&c.coefficients()[..m_max]);
                row
            })
            .collect();
        Self::new(self.blaschke.clone(), rows, m_max).expect("shape is valid")
    }

    /// Squared H² norm, `Σ_{jm} |c_{jm}|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.coefficients())
            .map(|c| c.norm_sqr())
            .sum()
    }
}

fn check_budget(n: usize, m_max: usize, grid: usize) -> Result<()> {
    let needed = n * (m_max + 1);
    if needed > grid / 8 {
        Err(Error::Budget {
            needed,
            available: grid / 8,
        })
    } else {
        Ok(())
    }
}

/// Raw coefficient rows `c_{jm} = ⟨f, e_{jm}⟩` for `m ≤ m_max`.
pub(crate) fn component_rows(
    f: &BoundaryGrid,
    b: &BlaschkeProduct,
    m_max: usize,
) -> Result<Vec<Vec<Complex64>>> {
    let n = f.len();
    let bconj = b.grid(n)?.conj();
    let leading = b.leading_elements(n)?;
    let scale = 1.0 / n as f64;
    Ok(leading
        .iter()
        .map(|e| {
            let mut work: Vec<Complex64> = f
                .samples()
                .iter()
                .zip(e.samples())
                .map(|(x, y)| x * y.conj())
                .collect();
            let mut row = Vec::with_capacity(m_max + 1);
            for m in 0..=m_max {
                row.push(work.iter().sum::<Complex64>() * scale);
                if m < m_max {
                    work.iter_mut()
                        .zip(bconj.samples())
                        .for_each(|(w, bc)| *w *= bc);
                }
            }
            row
        })
        .collect())
}

/// Computes the components of an analytic grid up to power `m_max` of B.
///
/// Requires `n·(m_max+1) ≤ N/8`.
pub fn decompose(f: &BoundaryGrid, b: &BlaschkeProduct, m_max: usize) -> Result<ComponentVector> {
    if !f.is_analytic() {
        return Err(Error::NotAnalytic);
    }
    check_budget(b.degree(), m_max, f.len())?;
    let rows = component_rows(f, b, m_max)?;
    ComponentVector::new(b.clone(), rows, m_max)
}

/// Grid of `Σ_j e_{j0} f_j(B)`.
pub fn reconstruct(cv: &ComponentVector, n: usize) -> Result<BoundaryGrid> {
    let b = cv.blaschke();
    let bz = b.grid(n)?;
    let leading = b.leading_elements(n)?;
    let mut acc = BoundaryGrid::constant(n, ZERO)?;
    for (e, f_j) in leading.iter().zip(cv.components()) {
        let term = e.mul(&compose_grid(f_j, &bz))?;
        acc = acc.add(&term)?;
    }
    Ok(acc.tagged_analytic())
}

/// Grids of each component composed with B, `f_j(B(ζ))`.
pub fn component_grids(cv: &ComponentVector, n: usize) -> Result<Vec<BoundaryGrid>> {
    let bz = cv.blaschke().grid(n)?;
    Ok(cv.components().iter().map(|c| compose_grid(c, &bz)).collect())
}

/// The `n × r` matrix of component series of an r-tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct BMatrix {
    blaschke: BlaschkeProduct,
    // Row-major: entries[j][i] is component j of tuple member i.
    entries: Vec<Vec<CoefficientSeries>>,
    r: usize,
}

impl BMatrix {
    /// Assembles a matrix from columns, one component vector per column.
    pub fn from_columns(columns: &[ComponentVector]) -> Result<Self> {
        let first = columns.first().ok_or(Error::EmptyFrame)?;
        let b = first.blaschke().clone();
        let n = b.degree();
        if columns.len() > n {
            return Err(Error::TupleTooLarge {
                r: columns.len(),
                n,
            });
        }
        let entries = (0..n)
            .map(|j| columns.iter().map(|c| c.component(j).clone()).collect())
            .collect();
        Ok(Self {
            blaschke: b,
            entries,
            r: columns.len(),
        })
    }

    pub fn blaschke(&self) -> &BlaschkeProduct {
        &self.blaschke
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn entry(&self, j: usize, i: usize) -> &CoefficientSeries {
        &self.entries[j][i]
    }

    /// Multiplies column `i` by `factor`.
    pub fn scale_column(&mut self, i: usize, factor: Complex64) {
        for row in &mut self.entries {
            let scaled = row[i].coefficients().iter().map(|c| c * factor).collect();
            row[i] = CoefficientSeries::new(scaled, Variable::B);
        }
    }
}

/// Column `i` is the component vector of `tuple[i]`.
pub fn bmatrix(tuple: &[BoundaryGrid], b: &BlaschkeProduct, m_max: usize) -> Result<BMatrix> {
    if tuple.len() > b.degree() {
        return Err(Error::TupleTooLarge {
            r: tuple.len(),
            n: b.degree(),
        });
    }
    let columns = tuple
        .iter()
        .map(|g| decompose(g, b, m_max))
        .collect::<Result<Vec<_>>>()?;
    BMatrix::from_columns(&columns)
}

/// Outcome of a pointwise B-inner matrix test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BInnerMatrixReport {
    pub passed: bool,
    pub deviation: f64,
}

/// Largest entry of `A(ζ)*A(ζ) − I` over the grid.
pub fn is_b_inner_matrix(a: &BMatrix, n: usize) -> Result<BInnerMatrixReport> {
    let bz = a.blaschke().grid(n)?;
    let evaluated: Vec<Vec<BoundaryGrid>> = a
        .entries
        .iter()
        .map(|row| row.iter().map(|s| compose_grid(s, &bz)).collect())
        .collect();
    let r = a.r();
    let mut deviation = 0.0f64;
    for t in 0..n {
        for i1 in 0..r {
            for i2 in i1..r {
                let g: Complex64 = evaluated
                    .iter()
                    .map(|row| row[i1].samples()[t].conj() * row[i2].samples()[t])
                    .sum();
                let target = if i1 == i2 { 1.0 } else { 0.0 };
                deviation = deviation.max((g - target).norm());
            }
        }
    }
    Ok(BInnerMatrixReport {
        passed: deviation <= BINNER_TOL,
        deviation,
    })
}

/// Outcome of the two B-inner function certificates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BInnerFunctionReport {
    pub passed: bool,
    pub pointwise_deviation: f64,
    pub gram_deviation: f64,
}

impl BInnerFunctionReport {
    /// Whether the pointwise and Gram certificates reach the same verdict.
    pub fn certificates_agree(&self) -> bool {
        (self.pointwise_deviation <= BINNER_TOL) == (self.gram_deviation <= BINNER_TOL)
    }
}

/// Checks `Σ_j |ψ_j(B)|² = 1` on the grid and orthonormality of
/// `{B^m ψ : m ≤ 8}`.
pub fn is_b_inner_function(
    psi: &BoundaryGrid,
    b: &BlaschkeProduct,
    m_max: usize,
) -> Result<BInnerFunctionReport> {
    let n = psi.len();
    let cv = decompose(psi, b, m_max)?;
    let grids = component_grids(&cv, n)?;
    let mut pointwise_deviation = 0.0f64;
    for t in 0..n {
        let s: f64 = grids.iter().map(|g| g.samples()[t].norm_sqr()).sum();
        pointwise_deviation = pointwise_deviation.max((s - 1.0).abs());
    }
    let bz = b.grid(n)?;
    let mut shifts = vec![psi.clone()];
    for m in 1..=GRAM_SHIFTS {
        let next = shifts[m - 1].mul(&bz)?;
        shifts.push(next);
    }
    let gram_deviation = gram_deviation(&shifts)?;
    Ok(BInnerFunctionReport {
        passed: pointwise_deviation <= BINNER_TOL && gram_deviation <= BINNER_TOL,
        pointwise_deviation,
        gram_deviation,
    })
}

/// Entrywise distance of the Gram matrix of `vectors` from the identity.
pub fn gram_deviation(vectors: &[BoundaryGrid]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (i, x) in vectors.iter().enumerate() {
        for (k, y) in vectors.iter().enumerate().skip(i) {
            let g = inner_product(x, y)?;
            let target = if i == k { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    Ok(worst)
}

/// Relative sizes of the component functions `f_j(B)` in `H^p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentNormReport {
    pub p: f64,
    pub total: f64,
    pub component_norms: Vec<f64>,
    pub ratios: Vec<f64>,
    pub all_finite: bool,
}

/// Reports `‖f_j(B)‖_p / ‖f‖_p` for each component. No threshold applies.
pub fn component_norm_report(
    f: &BoundaryGrid,
    b: &BlaschkeProduct,
    m_max: usize,
    p: PNorm,
) -> Result<ComponentNormReport> {
    let total = hp_norm(f, p);
    if total == 0.0 {
        return Err(Error::ZeroInput);
    }
    let cv = decompose(f, b, m_max)?;
    let component_norms: Vec<f64> = component_grids(&cv, f.len())?
        .iter()
        .map(|g| hp_norm(g, p))
        .collect();
    let ratios: Vec<f64> = component_norms.iter().map(|v| v / total).collect();
    Ok(ComponentNormReport {
        p: p.value(),
        total,
        all_finite: ratios.iter().all(|r| r.is_finite()),
        component_norms,
        ratios,
    })
}

/// Coordinates of `f = Σ_i φ_i h_i(B)` against a B-inner tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct TupleCoordinates {
    pub coefficients: Vec<CoefficientSeries>,
    pub norms: Vec<f64>,
    pub all_finite: bool,
    pub residual: f64,
}

/// Recovers the multipliers `h_i` from `f` and a tuple `φ_1, …, φ_r` whose
/// B-matrix is inner, and reports `‖h_i(B)‖_p`. Membership of each `h_i` in
/// `H^p(B)` is reported as finiteness of the quadrature only.
pub fn tuple_coordinates(
    f: &BoundaryGrid,
    tuple: &[BoundaryGrid],
    b: &BlaschkeProduct,
    m_max: usize,
    p: PNorm,
) -> Result<TupleCoordinates> {
    if tuple.is_empty() {
        return Err(Error::EmptyFrame);
    }
    if tuple.len() > b.degree() {
        return Err(Error::TupleTooLarge {
            r: tuple.len(),
            n: b.degree(),
        });
    }
    let n = f.len();
    let bz = b.grid(n)?;
    let mut coefficients = Vec::with_capacity(tuple.len());
    let mut model = BoundaryGrid::constant(n, ZERO)?;
    for phi in tuple {
        let mut shift = phi.clone();
        let mut coeffs = Vec::with_capacity(m_max + 1);
        for _ in 0..=m_max {
            let c = inner_product(f, &shift)?;
            model = model.add(&shift.scale(c))?;
            coeffs.push(c);
            shift = shift.mul(&bz)?;
        }
        coefficients.push(CoefficientSeries::b(coeffs));
    }
    let norms: Vec<f64> = coefficients
        .iter()
        .map(|h| hp_norm(&compose_grid(h, &bz), p))
        .collect();
    let scale = hp_norm(f, PNorm::TWO).max(f64::MIN_POSITIVE);
    Ok(TupleCoordinates {
        all_finite: norms.iter().all(|v| v.is_finite()),
        residual: hp_norm(&f.sub(&model)?, PNorm::TWO) / scale,
        coefficients,
        norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::BasisIndex;
    use crate::circle::synthesize;
    use proptest::prelude::*;

    const N: usize = 8192;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poly(coeffs: &[f64]) -> BoundaryGrid {
        synthesize(&CoefficientSeries::from_real(coeffs, Variable::Z), N).unwrap()
    }

    fn close(a: Complex64, b: f64) -> bool {
        (a - c(b, 0.0)).norm() < 1e-10
    }

    #[test]
    fn b_equal_z_returns_taylor_coefficients() {
        let b = BlaschkeProduct::monomial(1).unwrap();
        let cv = decompose(&poly(&[1.0, -2.0, 0.5]), &b, 4).unwrap();
        assert!(close(cv.coefficient(0, 0), 1.0));
        assert!(close(cv.coefficient(0, 1), -2.0));
        assert!(close(cv.coefficient(0, 2), 0.5));
        assert!(close(cv.coefficient(0, 3), 0.0));
    }

    #[test]
    fn b_equal_z_squared_splits_even_and_odd() {
        let b = BlaschkeProduct::monomial(2).unwrap();
        let cv = decompose(&poly(&[0.0, 0.0, 0.0, 1.0]), &b, 4).unwrap();
        assert!(cv.component(0).coefficients().iter().all(|v| v.norm() < 1e-12));
        assert!(close(cv.coefficient(1, 1), 1.0));
        assert!(close(cv.coefficient(1, 0), 0.0));

        let cv = decompose(&poly(&[1.0, 1.0, 1.0, 1.0]), &b, 4).unwrap();
        for j in 0..2 {
            assert!(close(cv.coefficient(j, 0), 1.0));
            assert!(close(cv.coefficient(j, 1), 1.0));
            assert!(close(cv.coefficient(j, 2), 0.0));
        }
    }

    #[test]
    fn decompose_preconditions() {
        let b = BlaschkeProduct::monomial(2).unwrap();
        let raw = BoundaryGrid::constant(N, c(1.0, 0.0)).unwrap();
        let not_tagged = BoundaryGrid::new(raw.samples().to_vec()).unwrap();
        assert_eq!(decompose(&not_tagged, &b, 4), Err(Error::NotAnalytic));
        let small = BoundaryGrid::constant(64, c(1.0, 0.0)).unwrap();
        assert!(matches!(decompose(&small, &b, 4), Err(Error::Budget { .. })));
    }

    #[test]
    fn reconstruct_examples() {
        let b = BlaschkeProduct::new(vec![c(0.0, 0.0), c(0.3, -0.2)]).unwrap();
        let zero = ComponentVector::zero(b.clone(), 4);
        assert!(reconstruct(&zero, 256).unwrap().max_abs() == 0.0);
        let e00 = ComponentVector::new(b.clone(), vec![vec![c(1.0, 0.0)], vec![]], 4).unwrap();
        let g = reconstruct(&e00, 256).unwrap();
        let expected = b.basis_element(BasisIndex::new(0, 0), 256).unwrap();
        assert!(g.max_distance(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn shift_matches_multiplication() {
        let b = BlaschkeProduct::new(vec![c(0.0, 0.0), c(0.5, 0.1)]).unwrap();
        let f = poly(&[0.3, 1.0, -0.7, 0.2]);
        let bf = f.mul(&b.grid(N).unwrap()).unwrap();
        let m = 12;
        let shifted = decompose(&f, &b, m).unwrap().shifted(false);
        let direct = decompose(&bf, &b, m).unwrap();
        for j in 0..2 {
            for k in 0..=m {
                assert!((shifted.coefficient(j, k) - direct.coefficient(j, k)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn bmatrix_examples() {
        let b = BlaschkeProduct::new(vec![c(0.0, 0.0), c(0.4, 0.0)]).unwrap();
        let e00 = b.basis_element(BasisIndex::new(0, 0), N).unwrap();
        let a = bmatrix(&[e00], &b, 4).unwrap();
        assert_eq!(a.r(), 1);
        assert!(close(a.entry(0, 0).coefficient(0), 1.0));
        assert!(close(a.entry(1, 0).coefficient(0), 0.0));

        let z2 = BlaschkeProduct::monomial(2).unwrap();
        let a = bmatrix(&[poly(&[1.0]), poly(&[0.0, 1.0])], &z2, 4).unwrap();
        for j in 0..2 {
            for i in 0..2 {
                assert!(close(a.entry(j, i).coefficient(0), if i == j { 1.0 } else { 0.0 }));
            }
        }
        let rep = is_b_inner_matrix(&a, N).unwrap();
        assert!(rep.passed && rep.deviation <= 1e-12);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = bmatrix(&[poly(&[s, s])], &z2, 4).unwrap();
        assert!(close(a.entry(0, 0).coefficient(0), s));
        assert!(close(a.entry(1, 0).coefficient(0), s));
        assert!(is_b_inner_matrix(&a, N).unwrap().deviation <= 1e-10);

        let three = vec![poly(&[1.0]); 3];
        assert!(matches!(bmatrix(&three, &z2, 4), Err(Error::TupleTooLarge { .. })));
    }

    #[test]
    fn scaled_column_fails_b_inner_test() {
        let z2 = BlaschkeProduct::monomial(2).unwrap();
        let mut a = bmatrix(&[poly(&[1.0]), poly(&[0.0, 1.0])], &z2, 4).unwrap();
        a.scale_column(0, c(2.0, 0.0));
        let rep = is_b_inner_matrix(&a, 1024).unwrap();
        assert!(!rep.passed);
        assert!((rep.deviation - 3.0).abs() < 1e-12);
    }

    #[test]
    fn b_inner_function_examples() {
        let b = BlaschkeProduct::new(vec![c(0.0, 0.0), c(0.2, 0.5)]).unwrap();
        let e00 = b.basis_element(BasisIndex::new(0, 0), N).unwrap();
        let rep = is_b_inner_function(&e00, &b, 12).unwrap();
        assert!(rep.passed);

        let z2 = BlaschkeProduct::monomial(2).unwrap();
        let rep = is_b_inner_function(&poly(&[1.0, 1.0]), &z2, 12).unwrap();
        assert!(!rep.passed && rep.certificates_agree());
        assert!((rep.pointwise_deviation - 1.0).abs() < 1e-10);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let rep = is_b_inner_function(&poly(&[s, s]), &z2, 12).unwrap();
        assert!(rep.passed && rep.certificates_agree());
        assert!(rep.pointwise_deviation <= 1e-10 && rep.gram_deviation <= 1e-10);
    }

    #[test]
    fn component_norm_examples() {
        let b = BlaschkeProduct::new(vec![c(0.0, 0.0), c(-0.3, 0.3)]).unwrap();
        let e00 = b.basis_element(BasisIndex::new(0, 0), N).unwrap();
        let rep = component_norm_report(&e00, &b, 8, PNorm::TWO).unwrap();
        assert!((rep.ratios[0] - 1.0).abs() < 1e-10 && rep.ratios[1] < 1e-10);

        let z2 = BlaschkeProduct::monomial(2).unwrap();
        let rep = component_norm_report(&poly(&[0.0, 1.0]), &z2, 8, PNorm::TWO).unwrap();
        assert!(rep.ratios[0] < 1e-12 && (rep.ratios[1] - 1.0).abs() < 1e-12);

        let f = poly(&[0.4, -1.0, 0.25, 0.8, -0.1]);
        let rep = component_norm_report(&f, &b, 16, PNorm::new(1.5).unwrap()).unwrap();
        assert!(rep.all_finite && rep.ratios.len() == 2);

        let zero = BoundaryGrid::constant(N, c(0.0, 0.0)).unwrap();
        assert_eq!(
            component_norm_report(&zero, &b, 8, PNorm::TWO),
            Err(Error::ZeroInput)
        );
    }

    #[test]
    fn tuple_coordinates_recover_multipliers() {
        let b = BlaschkeProduct::monomial(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // φ_1 = (1+z)/√2 and φ_2 = (1−z)/√2 form a B-inner pair.
        let phi1 = poly(&[s, s]);
        let phi2 = poly(&[s, -s]);
        let bz = b.grid(N).unwrap();
        let h1 = CoefficientSeries::from_real(&[1.0, 0.5], Variable::B);
        let h2 = CoefficientSeries::from_real(&[0.0, 0.0, -2.0], Variable::B);
        let f = phi1
            .mul(&compose_grid(&h1, &bz))
            .unwrap()
            .add(&phi2.mul(&compose_grid(&h2, &bz)).unwrap())
            .unwrap();
        let rep = tuple_coordinates(&f, &[phi1, phi2], &b, 6, PNorm::new(3.0).unwrap()).unwrap();
        assert!(rep.residual < 1e-12 && rep.all_finite);
        assert!((rep.coefficients[0].coefficient(1) - c(0.5, 0.0)).norm() < 1e-12);
        assert!((rep.coefficients[1].coefficient(2) - c(-2.0, 0.0)).norm() < 1e-12);
    }

    fn blaschke_strategy() -> impl Strategy<Value = BlaschkeProduct> {
        prop::collection::vec((0.0f64..0.8, 0.0f64..std::f64::consts::TAU), 0..3).prop_map(
            |rest| {
                let mut zeros = vec![c(0.0, 0.0)];
                zeros.extend(rest.into_iter().map(|(r, t)| Complex64::from_polar(r, t)));
                BlaschkeProduct::new(zeros).unwrap()
            },
        )
    }

    fn poly_strategy(max_len: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=max_len)
            .prop_map(|v| v.into_iter().map(|(a, b)| c(a, b)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn splitting_is_exact_for_low_degree(b in blaschke_strategy(), coeffs in poly_strategy(17)) {
            let m_max = 16;
            let f = synthesize(&CoefficientSeries::z(coeffs), N).unwrap();
            let cv = decompose(&f, &b, m_max).unwrap();
            let total = hp_norm(&f, PNorm::TWO);
            let parts: f64 = component_grids(&cv, N).unwrap().iter()
                .map(|g| hp_norm(g, PNorm::TWO).powi(2)).sum();
            prop_assert!((total * total - parts).abs() <= 1e-8);
            let err = hp_norm(&reconstruct(&cv, N).unwrap().sub(&f).unwrap(), PNorm::TWO);
            prop_assert!(err <= 1e-8 * total);
        }

        #[test]
        fn decompose_is_linear(
            b in blaschke_strategy(),
            x in poly_strategy(10),
            y in poly_strategy(10),
            k in (-2.0f64..2.0, -2.0f64..2.0),
        ) {
            let m_max = 10;
            let k = c(k.0, k.1);
            let fx = synthesize(&CoefficientSeries::z(x), N).unwrap();
            let fy = synthesize(&CoefficientSeries::z(y), N).unwrap();
            let sum = fx.scale(k).add(&fy).unwrap();
            let a = decompose(&sum, &b, m_max).unwrap().flatten();
            let ax = decompose(&fx, &b, m_max).unwrap().flatten();
            let ay = decompose(&fy, &b, m_max).unwrap().flatten();
            for i in 0..a.len() {
                prop_assert!((a[i] - (k * ax[i] + ay[i])).norm() <= 1e-10);
            }
        }

        #[test]
        fn multiplication_by_b_shifts_components(b in blaschke_strategy(), coeffs in poly_strategy(8)) {
            let m_max = 16;
            let f = synthesize(&CoefficientSeries::z(coeffs), N).unwrap();
            let bf = f.mul(&b.grid(N).unwrap()).unwrap();
            let shifted = decompose(&f, &b, m_max).unwrap().shifted(false);
            let direct = decompose(&bf, &b, m_max).unwrap();
            for (x, y) in shifted.flatten().iter().zip(direct.flatten()) {
                prop_assert!((x - y).norm() <= 1e-8);
            }
        }

        #[test]
        fn inner_matrix_columns_are_inner_functions(
            t in 0.0f64..std::f64::consts::TAU,
            a in 0.0f64..0.7,
        ) {
            // Columns e_{00} and a rotated pair of e_{00}, e_{10} have an
            // inner B-matrix.
            let b = BlaschkeProduct::new(vec![c(0.0, 0.0), Complex64::from_polar(a, t)]).unwrap();
            let e0 = b.basis_element(BasisIndex::new(0, 0), N).unwrap();
            let e1 = b.basis_element(BasisIndex::new(1, 0), N).unwrap();
            let (ct, st) = (t.cos(), t.sin());
            let u = e0.scale(c(ct, 0.0)).add(&e1.scale(c(st, 0.0))).unwrap();
            let v = e0.scale(c(-st, 0.0)).add(&e1.scale(c(ct, 0.0))).unwrap();
            let m = bmatrix(&[u.clone(), v.clone()], &b, 8).unwrap();
            let rep = is_b_inner_matrix(&m, N).unwrap();
            prop_assert!(rep.passed);
            for col in [u, v] {
                let f = is_b_inner_function(&col, &b, 8).unwrap();
                prop_assert!(f.passed && f.certificates_agree());
            }
        }
    }
}
