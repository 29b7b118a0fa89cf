//! Numerics on the boundary circle.
//!
//! A function on the unit circle is represented by its samples at the N-th
//! roots of unity, `ζ_i = exp(2πi·i/N)`. All integrals against the normalized
//! Lebesgue measure become the trapezoidal mean `(1/N) Σ_i`, which is exact for
//! trigonometric polynomials of degree below N and geometrically accurate for
//! data analytic in an annulus around the circle.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on Fourier coefficients.
pub const GRID_TOL: f64 = 1e-10;

/// Default number of boundary samples.
pub const DEFAULT_GRID: usize = 8192;

const MIN_GRID: usize = 16;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

fn inverse_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// Checks that `n` is an admissible grid size.
pub fn check_grid_size(n: usize) -> Result<()> {
    if n >= MIN_GRID && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::GridSize(n))
    }
}

/// The `i`-th of the `n`-th roots of unity.
#[inline]
pub fn root_of_unity(i: usize, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * i as f64 / n as f64)
}

/// Sampled boundary values of a function on the unit circle.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryGrid {
    samples: Vec<Complex64>,
    analytic: bool,
}

impl BoundaryGrid {
    /// Wraps raw samples. The result is not tagged analytic.
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        check_grid_size(samples.len())?;
        Ok(Self {
            samples,
            analytic: false,
        })
    }

    pub(crate) fn from_parts(samples: Vec<Complex64>, analytic: bool) -> Self {
        debug_assert!(check_grid_size(samples.len()).is_ok());
        Self { samples, analytic }
    }

    /// Samples `f` at the `n`-th roots of unity.
    pub fn from_fn(n: usize, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        check_grid_size(n)?;
        Ok(Self {
            samples: (0..n).map(|i| f(root_of_unity(i, n))).collect(),
            analytic: false,
        })
    }

    /// Samples a function known to be analytic in the disk; tags the result.
    pub fn analytic_from_fn(n: usize, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        Self::from_fn(n, f).map(|g| g.tagged_analytic())
    }

    pub fn constant(n: usize, c: Complex64) -> Result<Self> {
        Self::analytic_from_fn(n, |_| c)
    }

    /// The identity function `ζ ↦ ζ`.
    pub fn identity(n: usize) -> Result<Self> {
        Self::analytic_from_fn(n, |z| z)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Grid nodes paired with samples.
    pub fn iter_nodes(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let n = self.len();
        self.samples
            .iter()
            .enumerate()
            .map(move |(i, &v)| (root_of_unity(i, n), v))
    }

    pub fn is_analytic(&self) -> bool {
        self.analytic
    }

    /// Tags the grid as analytic without checking.
    pub fn tagged_analytic(mut self) -> Self {
        self.analytic = true;
        self
    }

    /// Tags the grid as analytic after checking its negative Fourier
    /// coefficients against `tol`.
    pub fn into_analytic(self, tol: f64) -> Result<Self> {
        let worst = analyze(&self).max_negative();
        if worst <= tol {
            Ok(self.tagged_analytic())
        } else {
            Err(Error::NegativeFrequencies(worst))
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.samples.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            samples: self.samples.iter().map(|&v| f(v)).collect(),
            analytic: false,
        }
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(Self {
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            analytic: false,
        })
    }

    /// Pointwise product; analytic when both factors are.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let tag = self.analytic && other.analytic;
        self.zip_with(other, |a, b| a * b).map(|mut g| {
            g.analytic = tag;
            g
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let tag = self.analytic && other.analytic;
        self.zip_with(other, |a, b| a + b).map(|mut g| {
            g.analytic = tag;
            g
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let tag = self.analytic && other.analytic;
        self.zip_with(other, |a, b| a - b).map(|mut g| {
            g.analytic = tag;
            g
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            samples: self.samples.iter().map(|&v| v * c).collect(),
            analytic: self.analytic,
        }
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    /// Largest pointwise distance to `other`.
    pub fn max_distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }
}

/// Tag for the variable whose powers index a [`CoefficientSeries`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variable {
    Z,
    B,
}

/// Truncated Taylor coefficients `c_0, …, c_D`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSeries {
    coefficients: Vec<Complex64>,
    variable: Variable,
}

impl CoefficientSeries {
    pub fn new(coefficients: Vec<Complex64>, variable: Variable) -> Self {
        Self {
            coefficients,
            variable,
        }
    }

    /// Series in powers of z.
    pub fn z(coefficients: Vec<Complex64>) -> Self {
        Self::new(coefficients, Variable::Z)
    }

    /// Series in powers of B.
    pub fn b(coefficients: Vec<Complex64>) -> Self {
        Self::new(coefficients, Variable::B)
    }

    pub fn from_real(coefficients: &[f64], variable: Variable) -> Self {
        Self::new(
            coefficients.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
            variable,
        )
    }

    pub fn zeros(len: usize, variable: Variable) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); len], variable)
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coefficients
    }

    pub fn variable(&self) -> Variable {
        self.variable
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Coefficient of the `m`-th power (zero beyond the stored range).
    pub fn coefficient(&self, m: usize) -> Complex64 {
        self.coefficients
            .get(m)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Horner evaluation at `w`.
    pub fn eval(&self, w: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c)
    }

    /// Drops trailing coefficients with modulus at most `tol`.
    pub fn trimmed(&self, tol: f64) -> Self {
        let keep = self
            .coefficients
            .iter()
            .rposition(|c| c.norm() > tol)
            .map_or(0, |i| i + 1);
        Self::new(self.coefficients[..keep].to_vec(), self.variable)
    }

    /// Euclidean norm of the coefficient list (the H² norm of the series).
    pub fn l2_norm(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Fourier coefficients of a grid, indices `-N/2 ..= N/2 - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    // FFT order: index k for k >= 0, N + k for k < 0.
    raw: Vec<Complex64>,
}

impl Spectrum {
    pub fn size(&self) -> usize {
        self.raw.len()
    }

    /// Coefficient of `ζ^k`; zero outside `-N/2 ..= N/2 - 1`.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        let n = self.raw.len() as i64;
        if k < -n / 2 || k >= n / 2 {
            return Complex64::new(0.0, 0.0);
        }
        self.raw[k.rem_euclid(n) as usize]
    }

    /// Coefficients with nonnegative index `0 ..= N/2 - 1`.
    pub fn nonnegative(&self) -> &[Complex64] {
        &self.raw[..self.raw.len() / 2]
    }

    /// Largest modulus among negative-index coefficients.
    pub fn max_negative(&self) -> f64 {
        self.raw[self.raw.len() / 2..]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Full Laurent list ordered from index `-N/2` to `N/2 - 1`.
    pub fn laurent(&self) -> Vec<Complex64> {
        let h = self.raw.len() / 2;
        self.raw[h..].iter().chain(&self.raw[..h]).copied().collect()
    }

    /// The analytic part as a series in z.
    pub fn to_series(&self) -> CoefficientSeries {
        CoefficientSeries::z(self.nonnegative().to_vec())
    }

    pub fn energy(&self) -> f64 {
        self.raw.iter().map(|c| c.norm_sqr()).sum()
    }
}

fn inverse_fft(mut buf: Vec<Complex64>) -> Vec<Complex64> {
    inverse_plan(buf.len()).process(&mut buf);
    buf
}

fn spectrum_to_grid(spec: Vec<Complex64>, analytic: bool) -> BoundaryGrid {
    BoundaryGrid::from_parts(inverse_fft(spec), analytic)
}

/// Evaluates a z-series at the `n`-th roots of unity.
pub fn synthesize(series: &CoefficientSeries, n: usize) -> Result<BoundaryGrid> {
    check_grid_size(n)?;
    if series.variable() != Variable::Z {
        return Err(Error::WrongVariable { expected: "z" });
    }
    if series.len() > n {
        return Err(Error::Truncation {
            len: series.len(),
            grid: n,
        });
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    buf[..series.len()].copy_from_slice(series.coefficients());
    Ok(spectrum_to_grid(buf, true))
}

/// Discrete Fourier coefficients `(1/N) Σ_i f_i ζ_i^{-k}`.
pub fn analyze(grid: &BoundaryGrid) -> Spectrum {
    let n = grid.len();
    let mut buf = grid.samples().to_vec();
    forward_plan(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    Spectrum { raw: buf }
}

/// `⟨f, g⟩ = (1/N) Σ f_i conj(g_i)`.
pub fn inner_product(f: &BoundaryGrid, g: &BoundaryGrid) -> Result<Complex64> {
    if f.len() != g.len() {
        return Err(Error::SizeMismatch {
            left: f.len(),
            right: g.len(),
        });
    }
    let sum: Complex64 = f
        .samples()
        .iter()
        .zip(g.samples())
        .map(|(a, b)| a * b.conj())
        .sum();
    Ok(sum / f.len() as f64)
}

/// Exponent of an `H^p` norm, `p ∈ (0, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PNorm(f64);

impl PNorm {
    pub const TWO: PNorm = PNorm(2.0);
    pub const INFINITY: PNorm = PNorm(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p > 0.0 && !p.is_nan() {
            Ok(Self(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

/// Quadrature `(1/N Σ |f_i|^p)^{1/p}`, or the grid maximum for `p = ∞`.
pub fn hp_norm(f: &BoundaryGrid, p: PNorm) -> f64 {
    if p.is_infinite() {
        return f.max_abs();
    }
    let p = p.value();
    if p == 2.0 {
        let s: f64 = f.samples().iter().map(|v| v.norm_sqr()).sum();
        return (s / f.len() as f64).sqrt();
    }
    let s: f64 = f.samples().iter().map(|v| v.norm().powf(p)).sum();
    (s / f.len() as f64).powf(1.0 / p)
}

/// Translation-invariant distance quantity: `‖f‖_p^p` when `p < 1`,
/// otherwise `‖f‖_p`.
pub fn hp_metric(f: &BoundaryGrid, p: PNorm) -> f64 {
    let norm = hp_norm(f, p);
    if p.value() < 1.0 {
        norm.powf(p.value())
    } else {
        norm
    }
}

/// Both the norm and the metric value of `f`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PSize {
    pub p: f64,
    pub norm: f64,
    pub metric: f64,
}

pub fn hp_size(f: &BoundaryGrid, p: PNorm) -> PSize {
    PSize {
        p: p.value(),
        norm: hp_norm(f, p),
        metric: hp_metric(f, p),
    }
}

/// Keeps the nonnegative Fourier modes.
pub fn riesz_projection(grid: &BoundaryGrid) -> BoundaryGrid {
    let n = grid.len();
    let mut spec = analyze(grid).raw;
    spec[n / 2..]
        .iter_mut()
        .for_each(|c| *c = Complex64::new(0.0, 0.0));
    spectrum_to_grid(spec, true)
}

/// Applies the Fourier multiplier `-i·sgn(k)` to a real grid. The constant
/// term and the Nyquist mode are sent to zero, so the output is real and has
/// zero mean.
pub fn harmonic_conjugate(u: &BoundaryGrid) -> Result<BoundaryGrid> {
    let imag = u.max_imag();
    if imag > GRID_TOL {
        return Err(Error::NotReal(imag));
    }
    let n = u.len();
    let mut spec = analyze(u).raw;
    let minus_i = Complex64::new(0.0, -1.0);
    spec[0] = Complex64::new(0.0, 0.0);
    spec[n / 2] = Complex64::new(0.0, 0.0);
    for c in &mut spec[1..n / 2] {
        *c *= minus_i;
    }
    for c in &mut spec[n / 2 + 1..] {
        *c *= -minus_i;
    }
    let out = inverse_fft(spec);
    Ok(BoundaryGrid::from_parts(
        out.into_iter().map(|v| Complex64::new(v.re, 0.0)).collect(),
        false,
    ))
}

/// Fejér (Cesàro) mean of degree `k`: coefficient `m` is scaled by
/// `1 - m/(k+1)` and everything beyond `k` is dropped.
pub fn fejer_mean(series: &CoefficientSeries, k: usize) -> CoefficientSeries {
    let coefficients = series
        .coefficients()
        .iter()
        .take(k + 1)
        .enumerate()
        .map(|(m, &c)| c * (1.0 - m as f64 / (k as f64 + 1.0)))
        .collect();
    CoefficientSeries::new(coefficients, series.variable())
}
