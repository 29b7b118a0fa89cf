//! Rank-revealing helpers on dense complex matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;


/// Numerical rank together with the singular-value gap that justified it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankCut {
    pub rank: usize,
    /// Ratio of the last kept to the first dropped singular value; infinite
    /// when nothing (or everything) was dropped.
    pub gap_ratio: f64,
}

/// Keeps singular values `≥ rel_tol·reference` and insists on a gap of at
/// least `min_gap` at the cut. `sv` must be sorted in decreasing order.
pub fn rank_cut(sv: &[f64], reference: f64, rel_tol: f64, min_gap: f64) -> Result<RankCut> {
    let threshold = rel_tol * reference;
    let rank = sv.iter().take_while(|&&s| s >= threshold && s > 0.0).count();
    let gap_ratio = if rank == sv.len() {
        f64::INFINITY
    } else if rank == 0 {
        if sv[0] == 0.0 {
            f64::INFINITY
        } else {
            reference / sv[0]
        }
    } else if sv[rank] == 0.0 {
        f64::INFINITY
    } else {
        sv[rank - 1] / sv[rank]
    };
    if gap_ratio < min_gap {
        return Err(Error::IndeterminateRank {
            gap: gap_ratio,
            required: min_gap,
        });
    }
    Ok(RankCut { rank, gap_ratio })
}

/// Singular values (decreasing), thin left vectors and a full set of right
/// vectors.
pub struct FullSvd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    /// `ncols × ncols` unitary whose columns are the right singular vectors.
    pub v: CMatrix,
}

pub fn full_svd(m: &CMatrix) -> FullSvd {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return FullSvd {
            u: CMatrix::zeros(rows, 0),
            singular_values: Vec::new(),
            v: CMatrix::identity(cols, cols),
        };
    }
    let a = faer::Mat::<Complex64>::from_fn(rows, cols, |i, j| m[(i, j)]);
    let svd = a.svd().expect("SVD converges");
    let s = svd.S().column_vector();
    let (u, v) = (svd.U(), svd.V());
    FullSvd {
        u: CMatrix::from_fn(rows, k, |i, j| u[(i, j)]),
        singular_values: (0..k).map(|i| s[i].re).collect(),
        v: CMatrix::from_fn(cols, cols, |i, j| v[(i, j)]),
    }
}

/// Orthonormal basis of the null space of `c`, with the rank decision.
pub fn null_space(c: &CMatrix, rel_tol: f64, min_gap: f64) -> Result<(CMatrix, RankCut)> {
    let cols = c.ncols();
    if c.nrows() == 0 {
        return Ok((
            CMatrix::identity(cols, cols),
            RankCut {
                rank: 0,
                gap_ratio: f64::INFINITY,
            },
        ));
    }
    let svd = full_svd(c);
    let reference = svd.singular_values.first().copied().unwrap_or(0.0);
    let cut = if reference == 0.0 {
        RankCut {
            rank: 0,
            gap_ratio: f64::INFINITY,
        }
    } else {
        rank_cut(&svd.singular_values, reference, rel_tol, min_gap)?
    };
    let basis = svd.v.columns(cut.rank, cols - cut.rank).into_owned();
    Ok((basis, cut))
}

/// Orthonormal basis of the column space of `m`, cutting relative to
/// `reference` rather than the largest singular value.
pub fn column_space(
    m: &CMatrix,
    reference: f64,
    rel_tol: f64,
    min_gap: f64,
) -> Result<(CMatrix, RankCut, Vec<f64>)> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return Ok((
            CMatrix::zeros(m.nrows(), 0),
            RankCut {
                rank: 0,
                gap_ratio: f64::INFINITY,
            },
            Vec::new(),
        ));
    }
    let svd = full_svd(m);
    let sv: Vec<f64> = svd
        .singular_values
        .iter()
        .copied()
        .take(m.ncols().min(m.nrows()))
        .collect();
    let cut = rank_cut(&sv, reference, rel_tol, min_gap)?;
    let basis = svd.u.columns(0, cut.rank).into_owned();
    Ok((basis, cut, sv))
}

/// Orthonormal basis of `span(big) ⊖ span(small)` for orthonormal column
/// sets with `span(small) ⊂ span(big)`. Cosines of principal angles lie in
/// [0, 1], so the cut is absolute.
pub fn orthogonal_complement(
    big: &CMatrix,
    small: &CMatrix,
    rel_tol: f64,
    min_gap: f64,
) -> Result<(CMatrix, RankCut)> {
    let residual = if small.ncols() == 0 {
        big.clone()
    } else {
        big - small * (small.adjoint() * big)
    };
    let (basis, cut, _) = column_space(&residual, 1.0, rel_tol, min_gap)?;
    Ok((basis, cut))
}

/// Largest entry of `|A*A − I|`.
pub fn unitarity_deviation(a: &CMatrix) -> f64 {
    let g = a.adjoint() * a;
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    full_svd(m).singular_values.first().copied().unwrap_or(0.0)
}

/// Least-squares solution of `a x = b` by pseudo-inverse.
pub fn least_squares(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let svd = full_svd(a);
    let tol = svd.singular_values.first().copied().unwrap_or(0.0) * 1e-12;
    let mut x = CMatrix::zeros(a.ncols(), b.ncols());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > tol {
            let coeff = svd.u.column(i).adjoint() * b / Complex64::new(s, 0.0);
            x += svd.v.column(i) * coeff;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rank_cut_rules() {
        let cut = rank_cut(&[1.0, 0.5, 1e-14], 1.0, 1e-8, 1e3).unwrap();
        assert_eq!(cut.rank, 2);
        assert!(cut.gap_ratio > 1e13);
        assert!(matches!(
            rank_cut(&[1.0, 1e-7, 1e-9], 1.0, 1e-8, 1e3),
            Err(Error::IndeterminateRank { .. })
        ));
        assert_eq!(rank_cut(&[1.0, 0.9], 1.0, 1e-8, 1e3).unwrap().rank, 2);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = CMatrix::from_row_slice(1, 3, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let (basis, cut) = null_space(&m, 1e-8, 1e3).unwrap();
        assert_eq!(cut.rank, 1);
        assert_eq!(basis.ncols(), 2);
        assert!((m * &basis).norm() < 1e-14);
        assert!(unitarity_deviation(&basis) < 1e-14);
    }

    #[test]
    fn complement_of_nested_spans() {
        let big = CMatrix::identity(3, 2);
        let small = CMatrix::from_column_slice(
            3,
            1,
            &[c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)],
        );
        let (basis, cut) = orthogonal_complement(&big, &small, 1e-8, 1e3).unwrap();
        assert_eq!(cut.rank, 1);
        assert!((small.adjoint() * &basis).norm() < 1e-14);
    }

    #[test]
    fn least_squares_recovers_exact_solution() {
        let a = CMatrix::from_row_slice(3, 2, &[
            c(1.0, 0.0), c(0.0, 1.0),
            c(2.0, 0.0), c(1.0, 0.0),
            c(0.0, 0.0), c(1.0, -1.0),
        ]);
        let x = CMatrix::from_column_slice(2, 1, &[c(0.5, 0.5), c(-1.0, 0.25)]);
        let b = &a * &x;
        assert!((least_squares(&a, &b) - x).norm() < 1e-13);
        assert!((spectral_norm(&CMatrix::identity(2, 2)) - 1.0).abs() < 1e-15);
    }
}
