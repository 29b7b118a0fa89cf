//! Finite Blaschke products normalized by `B(0) = 0`.

use num_complex::Complex64;

use crate::circle::{check_grid_size, BoundaryGrid, CoefficientSeries, Variable};
use crate::error::{Error, Result};

/// Default bound on zero moduli. Boundary values of factors with zeros closer
/// to the circle alias above the grid tolerance at the default grid size.
pub const DEFAULT_MAX_MODULUS: f64 = 0.95;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `B(z) = Π_j (z − α_j)/(1 − conj(α_j) z)` with `α_1 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlaschkeProduct {
    zeros: Vec<Complex64>,
}

impl BlaschkeProduct {
    /// Validates zeros with the default modulus bound.
    pub fn new(zeros: Vec<Complex64>) -> Result<Self> {
        Self::with_max_modulus(zeros, DEFAULT_MAX_MODULUS)
    }

    /// Validates zeros against a caller-chosen bound `max_modulus < 1`.
    pub fn with_max_modulus(zeros: Vec<Complex64>, max_modulus: f64) -> Result<Self> {
        if !(max_modulus > 0.0 && max_modulus < 1.0) {
            return Err(Error::InvalidZeros(format!(
                "modulus bound {max_modulus} must lie in (0, 1)"
            )));
        }
        let Some(first) = zeros.first() else {
            return Err(Error::InvalidZeros("at least one zero is required".into()));
        };
        if *first != Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidZeros(format!(
                "the first zero must be exactly 0, got {first}"
            )));
        }
        for (j, a) in zeros.iter().enumerate() {
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(Error::InvalidZeros(format!("zero {j} is not finite")));
            }
            if a.norm() >= max_modulus {
                return Err(Error::InvalidZeros(format!(
                    "zero {j} has modulus {} >= {max_modulus}",
                    a.norm()
                )));
            }
        }
        Ok(Self { zeros })
    }

    /// `B(z) = z^n`.
    pub fn monomial(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// True when every zero is at the origin.
    pub fn is_monomial(&self) -> bool {
        self.zeros.iter().all(|a| a.norm() == 0.0)
    }

    /// The product `B^s`, whose zero list repeats each zero `s` times.
    pub fn power(&self, s: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::Precondition("power must be positive".into()));
        }
        let mut zeros = Vec::with_capacity(self.degree() * s);
        for _ in 0..s {
            zeros.extend_from_slice(&self.zeros);
        }
        Ok(Self { zeros })
    }

    /// Evaluates `B` at a point of the closed disk.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        factor_product(&self.zeros, z)
    }

    /// Evaluates the partial product `B_j` (the first `j` factors).
    pub fn partial_eval(&self, j: usize, z: Complex64) -> Result<Complex64> {
        self.check_partial(j)?;
        Ok(factor_product(&self.zeros[..j], z))
    }

    pub fn partial(&self, j: usize) -> Result<PartialProduct<'_>> {
        self.check_partial(j)?;
        Ok(PartialProduct { parent: self, j })
    }

    fn check_partial(&self, j: usize) -> Result<()> {
        if j > self.degree() {
            Err(Error::IndexOutOfRange {
                index: j,
                limit: self.degree(),
            })
        } else {
            Ok(())
        }
    }

    /// Boundary samples of `B`.
    pub fn grid(&self, n: usize) -> Result<BoundaryGrid> {
        BoundaryGrid::analytic_from_fn(n, |z| self.eval(z))
    }

    /// Boundary samples of `B_j`.
    pub fn partial_grid(&self, j: usize, n: usize) -> Result<BoundaryGrid> {
        self.check_partial(j)?;
        BoundaryGrid::analytic_from_fn(n, |z| factor_product(&self.zeros[..j], z))
    }

    /// Boundary samples of the basis element `e_{jm}`.
    pub fn basis_element(&self, idx: BasisIndex, n: usize) -> Result<BoundaryGrid> {
        if idx.j >= self.degree() {
            return Err(Error::IndexOutOfRange {
                index: idx.j,
                limit: self.degree() - 1,
            });
        }
        check_grid_size(n)?;
        let a = self.zeros[idx.j];
        let scale = (1.0 - a.norm_sqr()).sqrt();
        let m = idx.m as i32;
        BoundaryGrid::analytic_from_fn(n, |z| {
            let kernel = scale / (ONE - a.conj() * z);
            kernel * factor_product(&self.zeros[..idx.j], z) * self.eval(z).powi(m)
        })
    }

    /// Boundary samples of the `n` leading elements `e_{j0}`.
    pub fn leading_elements(&self, n: usize) -> Result<Vec<BoundaryGrid>> {
        (0..self.degree())
            .map(|j| self.basis_element(BasisIndex::new(j, 0), n))
            .collect()
    }
}

fn factor_product(zeros: &[Complex64], z: Complex64) -> Complex64 {
    zeros
        .iter()
        .fold(ONE, |acc, &a| acc * (z - a) / (ONE - a.conj() * z))
}

/// The partial product `B_j` of a parent product.
#[derive(Clone, Copy, Debug)]
pub struct PartialProduct<'a> {
    parent: &'a BlaschkeProduct,
    j: usize,
}

impl PartialProduct<'_> {
    pub fn index(&self) -> usize {
        self.j
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        factor_product(&self.parent.zeros[..self.j], z)
    }
}

/// Index pair `(j, m)` of the basis element `e_{jm}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex {
    pub j: usize,
    pub m: usize,
}

impl BasisIndex {
    pub fn new(j: usize, m: usize) -> Self {
        Self { j, m }
    }
}

/// Samples of `h ∘ w`, evaluating `h` by Horner at each sample of `w`.
pub fn compose_grid(h: &CoefficientSeries, w: &BoundaryGrid) -> BoundaryGrid {
    let g = w.map(|v| h.eval(v));
    if w.is_analytic() {
        g.tagged_analytic()
    } else {
        g
    }
}

/// Samples of `h(B(ζ))` on the `n`-th roots of unity.
pub fn compose(h: &CoefficientSeries, b: &BlaschkeProduct, n: usize) -> Result<BoundaryGrid> {
    if h.variable() == Variable::B {
        return Err(Error::WrongVariable { expected: "z" });
    }
    let bz = b.grid(n)?;
    Ok(compose_grid(h, &bz))
}

/// Samples of `h(B^s(ζ))`.
pub fn compose_power(
    h: &CoefficientSeries,
    b: &BlaschkeProduct,
    s: usize,
    n: usize,
) -> Result<BoundaryGrid> {
    compose(h, &b.power(s)?, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{hp_norm, inner_product, PNorm};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn zero() -> Complex64 {
        c(0.0, 0.0)
    }

    #[test]
    fn validation() {
        assert!(BlaschkeProduct::new(vec![]).is_err());
        assert!(BlaschkeProduct::new(vec![c(0.5, 0.0), zero()]).is_err());
        assert!(BlaschkeProduct::new(vec![zero(), c(0.96, 0.0)]).is_err());
        assert!(BlaschkeProduct::new(vec![zero(), c(0.6, 0.6)]).is_ok());
        assert!(BlaschkeProduct::with_max_modulus(vec![zero(), c(0.97, 0.0)], 0.99).is_ok());
        assert!(BlaschkeProduct::with_max_modulus(vec![zero()], 1.0).is_err());
        // Repeated zeros are fine.
        assert!(BlaschkeProduct::new(vec![zero(), c(0.3, 0.0), c(0.3, 0.0)]).is_ok());
    }

    #[test]
    fn eval_examples() {
        let b = BlaschkeProduct::new(vec![zero()]).unwrap();
        assert_eq!(b.eval(c(0.5, 0.0)), c(0.5, 0.0));
        let b = BlaschkeProduct::new(vec![zero(), c(0.5, 0.0)]).unwrap();
        let v = b.eval(c(0.3, 0.0));
        assert_abs_diff_eq!(v.re, 0.3 * (0.3 - 0.5) / (1.0 - 0.15), epsilon = 1e-15);
        assert_abs_diff_eq!(v.re, -0.070_588_235_294_117_6, epsilon = 1e-15);
        assert_eq!(b.partial_eval(1, c(0.3, 0.0)).unwrap(), c(0.3, 0.0));
        assert_eq!(b.partial_eval(0, c(0.3, 0.7)).unwrap(), ONE);
        assert_eq!(b.partial_eval(2, c(0.3, 0.7)).unwrap(), b.eval(c(0.3, 0.7)));
        assert!(b.partial_eval(3, c(0.3, 0.0)).is_err());
        assert_eq!(b.partial(1).unwrap().eval(c(0.2, 0.1)), c(0.2, 0.1));
    }

    #[test]
    fn power_repeats_zeros() {
        let b = BlaschkeProduct::new(vec![zero(), c(0.2, 0.3)]).unwrap();
        let b3 = b.power(3).unwrap();
        assert_eq!(b3.degree(), 6);
        let z = c(0.4, -0.5);
        assert!((b3.eval(z) - b.eval(z).powi(3)).norm() < 1e-15);
    }

    #[test]
    fn basis_examples() {
        let n = 64;
        let z = BlaschkeProduct::new(vec![zero()]).unwrap();
        let e = z.basis_element(BasisIndex::new(0, 3), n).unwrap();
        for (node, v) in e.iter_nodes() {
            assert!((v - node.powi(3)).norm() < 1e-14);
        }
        let z2 = BlaschkeProduct::monomial(2).unwrap();
        let e = z2.basis_element(BasisIndex::new(1, 0), n).unwrap();
        for (node, v) in e.iter_nodes() {
            assert!((v - node).norm() < 1e-15);
        }
        let b = BlaschkeProduct::new(vec![zero(), c(0.5, 0.0)]).unwrap();
        let e = b.basis_element(BasisIndex::new(1, 0), n).unwrap();
        for (node, v) in e.iter_nodes() {
            let expected = 0.75f64.sqrt() * node / (1.0 - 0.5 * node);
            assert!((v - expected).norm() < 1e-14);
        }
        assert!(b.basis_element(BasisIndex::new(2, 0), n).is_err());
    }

    #[test]
    fn compose_examples() {
        let n = 128;
        let b = BlaschkeProduct::new(vec![zero(), c(0.4, 0.2)]).unwrap();
        let id = CoefficientSeries::from_real(&[0.0, 1.0], Variable::Z);
        let g = compose(&id, &b, n).unwrap();
        assert!(g.max_distance(&b.grid(n).unwrap()).unwrap() < 1e-15);
        let k = CoefficientSeries::from_real(&[2.5], Variable::Z);
        let g = compose(&k, &b, n).unwrap();
        assert!(g.samples().iter().all(|v| *v == c(2.5, 0.0)));
        let sq = compose_power(&id, &b, 2, n).unwrap();
        for (a, v) in b.grid(n).unwrap().samples().iter().zip(sq.samples()) {
            assert!((a * a - v).norm() < 1e-14);
        }
    }

    #[test]
    fn composition_isometry_example() {
        let n = 8192;
        let b = BlaschkeProduct::new(vec![zero(), c(0.0, 0.4), c(-0.3, 0.0)]).unwrap();
        let h = CoefficientSeries::z(
            (0..=16)
                .map(|m| c((m as f64 * 0.7).sin(), (m as f64 * 1.3).cos()))
                .collect(),
        );
        let g = compose(&h, &b, n).unwrap();
        assert_abs_diff_eq!(hp_norm(&g, PNorm::TWO), h.l2_norm(), epsilon = 1e-9);
    }

    fn blaschke_strategy() -> impl Strategy<Value = BlaschkeProduct> {
        prop::collection::vec((0.0f64..0.8, 0.0f64..std::f64::consts::TAU), 0..4).prop_map(
            |rest| {
                let mut zeros = vec![zero()];
                zeros.extend(rest.into_iter().map(|(r, t)| Complex64::from_polar(r, t)));
                BlaschkeProduct::new(zeros).unwrap()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn unimodular_on_the_circle(b in blaschke_strategy()) {
            let g = b.grid(1024).unwrap();
            for v in g.samples() {
                prop_assert!((v.norm() - 1.0).abs() <= 1e-12);
            }
        }

        #[test]
        fn leading_basis_is_orthonormal(b in blaschke_strategy()) {
            let n = 8192;
            let m_max = 16;
            let mut elems = Vec::new();
            for j in 0..b.degree() {
                for m in 0..=m_max {
                    elems.push(b.basis_element(BasisIndex::new(j, m), n).unwrap());
                }
            }
            for (i, x) in elems.iter().enumerate() {
                for (k, y) in elems.iter().enumerate().skip(i) {
                    let g = inner_product(x, y).unwrap();
                    let target = if i == k { 1.0 } else { 0.0 };
                    prop_assert!((g - c(target, 0.0)).norm() <= 1e-8);
                }
            }
        }

        #[test]
        fn composition_preserves_inner_products(
            b in blaschke_strategy(),
            h1 in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=17),
            h2 in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=17),
        ) {
            let n = 8192;
            let s1 = CoefficientSeries::z(h1.iter().map(|&(a, b)| c(a, b)).collect());
            let s2 = CoefficientSeries::z(h2.iter().map(|&(a, b)| c(a, b)).collect());
            let lhs = inner_product(&compose(&s1, &b, n).unwrap(), &compose(&s2, &b, n).unwrap()).unwrap();
            let rhs: Complex64 = s1.coefficients().iter().zip(s2.coefficients()).map(|(x, y)| x * y.conj()).sum();
            prop_assert!((lhs - rhs).norm() <= 1e-9);
        }

        #[test]
        fn multiplication_by_b_is_isometric(
            b in blaschke_strategy(),
            h in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=12),
            p in prop::sample::select(vec![0.5, 1.0, 1.5, 3.0]),
        ) {
            let n = 4096;
            let f = crate::circle::synthesize(
                &CoefficientSeries::z(h.iter().map(|&(a, b)| c(a, b)).collect()), n).unwrap();
            let bf = f.mul(&b.grid(n).unwrap()).unwrap();
            prop_assert!((hp_norm(&bf, PNorm::TWO) - hp_norm(&f, PNorm::TWO)).abs() <= 1e-12);
            let p = PNorm::new(p).unwrap();
            prop_assert!((hp_norm(&bf, p) - hp_norm(&f, p)).abs() <= 1e-8);
        }
    }
}
