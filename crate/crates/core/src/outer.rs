//! Outer functions from log-modulus data and bounded multipliers that tame
//! unbounded analytic functions.

use num_complex::Complex64;
use serde::Serialize;

use crate::blaschke::BlaschkeProduct;
use crate::circle::{
    analyze, harmonic_conjugate, hp_metric, hp_norm, BoundaryGrid, PNorm, GRID_TOL,
};
use crate::decomp::{component_grids, decompose};
use crate::error::{Error, Result};

/// Real boundary data `u` of an outer function with `|O| = e^{−u}`.
#[derive(Clone, Debug)]
pub struct OuterSpec {
    u: BoundaryGrid,
}

impl OuterSpec {
    pub fn new(u: BoundaryGrid) -> Result<Self> {
        let imag = u.max_imag();
        if imag > GRID_TOL {
            return Err(Error::NotReal(imag));
        }
        if u.samples().iter().any(|v| !(-v.re).exp().is_finite()) {
            return Err(Error::Precondition("e^{-u} overflows on the grid".into()));
        }
        Ok(Self { u })
    }

    pub fn u(&self) -> &BoundaryGrid {
        &self.u
    }
}

/// `O = exp(−(u + i·ũ))`.
pub fn outer_from_log_modulus(spec: &OuterSpec) -> Result<BoundaryGrid> {
    let conj = harmonic_conjugate(&spec.u)?;
    let i = Complex64::new(0.0, 1.0);
    let samples = spec
        .u
        .samples()
        .iter()
        .zip(conj.samples())
        .map(|(u, v)| (-(u.re + i * v.re)).exp())
        .collect();
    Ok(BoundaryGrid::new(samples)?.tagged_analytic())
}

/// `q = exp((−v − i·ṽ)/d)` with `v = |k|^{1/2}`, and the pointwise bound
/// `|q − 1| ≤ (max v + max|ṽ|)/d`, which follows from `|e^w − 1| ≤ |w|` for
/// `Re w ≤ 0`.
#[derive(Clone, Debug)]
pub struct TamingFactor {
    pub q: BoundaryGrid,
    pub divisor: f64,
    pub max_root: f64,
    pub max_conjugate: f64,
}

impl TamingFactor {
    /// Right-hand side of `|q − 1| ≤ bound`.
    pub fn bound(&self) -> f64 {
        (self.max_root + self.max_conjugate) / self.divisor
    }

    pub fn max_deviation_from_one(&self) -> f64 {
        self.q
            .samples()
            .iter()
            .map(|v| (v - 1.0).norm())
            .fold(0.0, f64::max)
    }
}

pub fn taming_factor(k: &BoundaryGrid, d: f64) -> Result<TamingFactor> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::Precondition(format!("divisor {d} must be positive")));
    }
    if k.samples().iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Precondition("k must be finite on the grid".into()));
    }
    let root = k.map(|v| Complex64::new(v.norm().sqrt(), 0.0));
    let conj = harmonic_conjugate(&root)?;
    let i = Complex64::new(0.0, 1.0);
    let samples = root
        .samples()
        .iter()
        .zip(conj.samples())
        .map(|(v, w)| ((-v.re - i * w.re) / d).exp())
        .collect();
    Ok(TamingFactor {
        q: BoundaryGrid::new(samples)?.tagged_analytic(),
        divisor: d,
        max_root: root.max_abs(),
        max_conjugate: conj.max_abs(),
    })
}

/// A bounded multiplier `h` built from the components of `f` over `B^s`.
#[derive(Clone, Debug)]
pub struct Multiplier {
    pub h: BoundaryGrid,
    pub product: BoundaryGrid,
    pub max_h: f64,
    pub max_product: f64,
    /// `Σ_j max|e_{j0}|·(2d/e)²`, the bound on `|h·f|` from
    /// `max_{x≥0} x² e^{−x/d} = (2d/e)²`.
    pub cap: f64,
    pub divisor: f64,
}

/// Decomposes `f` over `B^s`, tames every component `f_j(B^s)` on the grid
/// and multiplies the factors. Components are truncated at power `m_max`.
pub fn hinf_multiplier(
    f: &BoundaryGrid,
    b: &BlaschkeProduct,
    s: usize,
    d: f64,
    m_max: usize,
) -> Result<Multiplier> {
    if !(1..=2).contains(&s) {
        return Err(Error::Precondition(format!("power {s} must be 1 or 2")));
    }
    if !f.is_analytic() {
        return Err(Error::NotAnalytic);
    }
    let bs = b.power(s)?;
    let n = f.len();
    let cv = decompose(f, &bs, m_max)?;
    let mut h = BoundaryGrid::constant(n, Complex64::new(1.0, 0.0))?;
    for k in component_grids(&cv, n)? {
        h = h.mul(&taming_factor(&k, d)?.q)?;
    }
    let leading_max: f64 = bs.leading_elements(n)?.iter().map(|e| e.max_abs()).sum();
    let product = h.mul(f)?;
    Ok(Multiplier {
        max_h: h.max_abs(),
        max_product: product.max_abs(),
        cap: leading_max * (2.0 * d / std::f64::consts::E).powi(2),
        divisor: d,
        product,
        h: h.tagged_analytic(),
    })
}

/// Distances `‖h_d·f − f‖_p` as `d` runs through `divisors`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceProfile {
    pub divisors: Vec<f64>,
    pub errors: Vec<f64>,
    pub monotone: bool,
}

/// Tracks the multiplier error along increasing divisors. It counts as
/// monotone when no step increases by more than `1e-12` relative to `‖f‖_p`.
pub fn convergence_profile(
    f: &BoundaryGrid,
    b: &BlaschkeProduct,
    s: usize,
    divisors: &[f64],
    m_max: usize,
    p: PNorm,
) -> Result<ConvergenceProfile> {
    let scale = hp_norm(f, p).max(f64::MIN_POSITIVE);
    let errors = divisors
        .iter()
        .map(|&d| {
            let m = hinf_multiplier(f, b, s, d, m_max)?;
            Ok(hp_norm(&m.product.sub(f)?, p))
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = errors.windows(2).all(|w| w[1] <= w[0] + 1e-12 * scale);
    Ok(ConvergenceProfile {
        divisors: divisors.to_vec(),
        errors,
        monotone,
    })
}

/// Multipliers `g_l` with `g_l f_l → f`.
#[derive(Clone, Debug)]
pub struct Lemma3Sequence {
    pub multipliers: Vec<BoundaryGrid>,
    /// `‖g_l f_l − f‖_p` (metric form when `p < 1`).
    pub errors: Vec<f64>,
    pub sup_multiplier: Vec<f64>,
    pub deviation_from_one: Vec<f64>,
    /// Empirical uniform bound `max_l sup|g_l|`.
    pub uniform_bound: f64,
}

/// Builds `g_l = hinf_multiplier(f_l, z, 1, l+1)` for a sequence approaching
/// `f` in L². Distances `‖f_l − f‖₂` must not increase.
pub fn lemma3_sequence(
    f_seq: &[BoundaryGrid],
    f: &BoundaryGrid,
    p: PNorm,
) -> Result<Lemma3Sequence> {
    let n = f.len();
    let mut last = f64::INFINITY;
    let scale = hp_norm(f, PNorm::TWO).max(1.0);
    for (l, fl) in f_seq.iter().enumerate() {
        let dist = hp_norm(&fl.sub(f)?, PNorm::TWO);
        if dist > last + 1e-12 * scale {
            return Err(Error::Precondition(format!(
                "distance to the limit increases at index {l}"
            )));
        }
        last = dist;
    }
    let z = BlaschkeProduct::monomial(1)?;
    let m_max = n / 8 - 1;
    let mut out = Lemma3Sequence {
        multipliers: Vec::with_capacity(f_seq.len()),
        errors: Vec::with_capacity(f_seq.len()),
        sup_multiplier: Vec::with_capacity(f_seq.len()),
        deviation_from_one: Vec::with_capacity(f_seq.len()),
        uniform_bound: 0.0,
    };
    for (l, fl) in f_seq.iter().enumerate() {
        let m = hinf_multiplier(fl, &z, 1, (l + 1) as f64, m_max)?;
        out.errors.push(hp_metric(&m.product.sub(f)?, p));
        out.sup_multiplier.push(m.max_h);
        out.deviation_from_one.push(
            m.h.samples()
                .iter()
                .map(|v| (v - 1.0).norm())
                .fold(0.0, f64::max),
        );
        out.multipliers.push(m.h);
    }
    out.uniform_bound = out.sup_multiplier.iter().copied().fold(0.0, f64::max);
    Ok(out)
}

/// Largest negative-index Fourier coefficient, for analyticity reports.
pub fn analyticity_defect(g: &BoundaryGrid) -> f64 {
    analyze(g).max_negative()
}
