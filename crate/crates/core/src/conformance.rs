//! Randomized property suite over every module, reproducible from a seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::blaschke::{compose_grid, BasisIndex, BlaschkeProduct};
use crate::circle::{
    analyze, fejer_mean, hp_norm, inner_product, synthesize, BoundaryGrid, CoefficientSeries,
    PNorm, Variable,
};
use crate::decomp::{component_norm_report, decompose, gram_deviation, reconstruct};
use crate::error::{Error, Result};
use crate::outer::{analyticity_defect, outer_from_log_modulus, taming_factor, OuterSpec};
use crate::subspace::{
    beurling_decompose, constrained_decompose, uniqueness_unitary, verify_decomposition, Algebra,
    ConstrainedOutcome, SubspaceSpec,
};

/// Sizes used by every trial.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConformanceConfig {
    pub grid: usize,
    pub m_max: usize,
    pub m_span: usize,
    /// Worker threads; does not affect the report.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for ConformanceConfig {
    fn default() -> Self {
        Self {
            grid: 8192,
            m_max: 16,
            m_span: 32,
            threads: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

impl Verdict {
    /// Passes when `value ≤ tolerance`.
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= tolerance,
            value,
            tolerance,
        }
    }

    /// Passes when `value > tolerance`.
    pub fn above(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: value > tolerance,
            value,
            tolerance,
        }
    }

    fn error(name: &str, err: &Error) -> Self {
        Self {
            name: format!("{name}: {err}"),
            passed: false,
            value: f64::NAN,
            tolerance: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialReport {
    pub index: usize,
    pub seed: u64,
    pub zeros: Vec<[f64; 2]>,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerdictCount {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConformanceReport {
    pub seed: u64,
    pub trials: usize,
    pub config: ConformanceConfig,
    pub passed: bool,
    pub passed_trials: usize,
    pub failing_seeds: Vec<u64>,
    pub counts: Vec<VerdictCount>,
    pub results: Vec<TrialReport>,
}

/// Runs `trials` independent trials. Trial seeds are drawn in order from a
/// generator seeded with `seed`, so any failing trial can be replayed alone
/// with [`run_trial`].
pub fn run_conformance(
    seed: u64,
    trials: usize,
    config: &ConformanceConfig,
) -> Result<ConformanceReport> {
    crate::circle::check_grid_size(config.grid)?;
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..trials).map(|_| master.random()).collect();
    let work = || -> Vec<TrialReport> {
        seeds
            .par_iter()
            .enumerate()
            .map(|(i, &s)| run_trial(i, s, config))
            .collect()
    };
    let results = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Precondition(e.to_string()))?
            .install(work),
        None => work(),
    };

    let mut counts: Vec<VerdictCount> = Vec::new();
    for v in results.iter().flat_map(|t| &t.verdicts) {
        let pos = match counts.iter().position(|c| c.name == v.name) {
            Some(p) => p,
            None => {
                counts.push(VerdictCount {
                    name: v.name.clone(),
                    passed: 0,
                    failed: 0,
                });
                counts.len() - 1
            }
        };
        if v.passed {
            counts[pos].passed += 1;
        } else {
            counts[pos].failed += 1;
        }
    }
    let failing_seeds: Vec<u64> = results.iter().filter(|t| !t.passed).map(|t| t.seed).collect();
    Ok(ConformanceReport {
        seed,
        trials,
        config: *config,
        passed: failing_seeds.is_empty(),
        passed_trials: trials - failing_seeds.len(),
        failing_seeds,
        counts,
        results,
    })
}

fn disk_point(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let rho = radius * rng.random::<f64>().sqrt();
    Complex64::from_polar(rho, rng.random_range(0.0..std::f64::consts::TAU))
}

fn annulus_point(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Complex64 {
    Complex64::from_polar(
        rng.random_range(lo..hi),
        rng.random_range(0.0..std::f64::consts::TAU),
    )
}

fn gaussian_ish(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// A Blaschke product with `n ≤ 4` zeros, the first at the origin and the
/// rest of modulus at most 0.8.
pub fn random_blaschke(rng: &mut ChaCha8Rng, max_degree: usize) -> Result<BlaschkeProduct> {
    let n = rng.random_range(1..=max_degree);
    let mut zeros = vec![Complex64::new(0.0, 0.0)];
    for _ in 1..n {
        zeros.push(disk_point(rng, 0.8));
    }
    BlaschkeProduct::new(zeros)
}

/// Monic polynomial with the given roots, lowest coefficient first.
pub fn poly_from_roots(roots: &[Complex64]) -> CoefficientSeries {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &a in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (k, &v) in c.iter().enumerate() {
            next[k + 1] += v;
            next[k] -= a * v;
        }
        c = next;
    }
    CoefficientSeries::z(c)
}

/// Generator `ψ·p(B)` where `ψ = Σ c_j e_{j0}` with a unit vector `c` is
/// B-inner and `p` has its inner roots in `|a| ≤ 0.4` and its outer roots in
/// `1.1 ≤ |a| ≤ 3`. Returns the generator, `ψ` and the inner roots.
fn random_generator(
    rng: &mut ChaCha8Rng,
    b: &BlaschkeProduct,
    n: usize,
) -> Result<(BoundaryGrid, BoundaryGrid, Vec<Complex64>)> {
    let mut c: Vec<Complex64> = (0..b.degree()).map(|_| gaussian_ish(rng)).collect();
    let norm = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    c.iter_mut().for_each(|v| *v /= norm);
    let mut psi = BoundaryGrid::constant(n, Complex64::new(0.0, 0.0))?;
    for (e, cj) in b.leading_elements(n)?.iter().zip(&c) {
        psi = psi.add(&e.scale(*cj))?;
    }
    let inner: Vec<Complex64> = (0..rng.random_range(0..=1)).map(|_| disk_point(rng, 0.4)).collect();
    let outer: Vec<Complex64> = (0..rng.random_range(0..=2))
        .map(|_| annulus_point(rng, 1.1, 3.0))
        .collect();
    let roots: Vec<Complex64> = inner.iter().chain(&outer).copied().collect();
    let bz = b.grid(n)?;
    let g = psi.mul(&compose_grid(&poly_from_roots(&roots), &bz))?;
    Ok((g.tagged_analytic(), psi.tagged_analytic(), inner))
}

fn check<T>(out: &mut Vec<Verdict>, name: &str, r: Result<T>, f: impl FnOnce(T) -> Vec<Verdict>) {
    match r {
        Ok(v) => out.extend(f(v)),
        Err(e) => out.push(Verdict::error(name, &e)),
    }
}

/// One trial, fully determined by `seed`.
pub fn run_trial(index: usize, seed: u64, config: &ConformanceConfig) -> TrialReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut verdicts = Vec::new();
    let n = config.grid;
    let b = match random_blaschke(&mut rng, 4) {
        Ok(b) => b,
        Err(e) => {
            return TrialReport {
                index,
                seed,
                zeros: Vec::new(),
                verdicts: vec![Verdict::error("blaschke", &e)],
                passed: false,
            }
        }
    };
    let zeros = b.zeros().iter().map(|z| [z.re, z.im]).collect();

    check(&mut verdicts, "basis_orthonormality", basis_gram(&b, config), |d| {
        vec![Verdict::at_most("basis_orthonormality", d, 1e-8)]
    });

    let poly: Vec<Complex64> = (0..=rng.random_range(0..=16)).map(|_| gaussian_ish(&mut rng)).collect();
    check(&mut verdicts, "reconstruction", reconstruction(&poly, &b, config), |v| v);

    let h: Vec<Complex64> = (0..=rng.random_range(0..=16)).map(|_| gaussian_ish(&mut rng)).collect();
    check(&mut verdicts, "composition_isometry", isometry(&h, &b, n), |d| {
        vec![Verdict::at_most("composition_isometry", d, 1e-9)]
    });

    let generator = random_generator(&mut rng, &b, n);
    check(&mut verdicts, "subspace", generator, |(g, psi, inner)| {
        let mut v = Vec::new();
        check(&mut v, "beurling", beurling_checks(&b, &g, &psi, &inner, config), |x| x);
        check(&mut v, "constrained", constrained_checks(&b, &g, config), |x| x);
        v
    });

    let u: Vec<Complex64> = (0..rng.random_range(1..=6)).map(|_| gaussian_ish(&mut rng)).collect();
    let k: Vec<Complex64> = (0..rng.random_range(1..=8)).map(|_| gaussian_ish(&mut rng)).collect();
    check(&mut verdicts, "outer", outer_checks(&u, &k, n), |x| x);

    let passed = verdicts.iter().all(|v| v.passed);
    TrialReport {
        index,
        seed,
        zeros,
        verdicts,
        passed,
    }
}

fn basis_gram(b: &BlaschkeProduct, config: &ConformanceConfig) -> Result<f64> {
    let mut basis = Vec::new();
    for j in 0..b.degree() {
        for m in 0..=config.m_max {
            basis.push(b.basis_element(BasisIndex::new(j, m), config.grid)?);
        }
    }
    gram_deviation(&basis)
}

fn reconstruction(
    coeffs: &[Complex64],
    b: &BlaschkeProduct,
    config: &ConformanceConfig,
) -> Result<Vec<Verdict>> {
    let f = synthesize(&CoefficientSeries::z(coeffs.to_vec()), config.grid)?;
    let cv = decompose(&f, b, config.m_max)?;
    let back = reconstruct(&cv, config.grid)?;
    let rel = hp_norm(&back.sub(&f)?, PNorm::TWO) / hp_norm(&f, PNorm::TWO).max(f64::MIN_POSITIVE);
    let report = component_norm_report(&f, b, config.m_max, PNorm::new(1.5)?)?;
    Ok(vec![
        Verdict::at_most("reconstruction", rel, 1e-8),
        Verdict::at_most(
            "component_norms_finite",
            if report.all_finite { 0.0 } else { 1.0 },
            0.0,
        ),
    ])
}

fn isometry(h: &[Complex64], b: &BlaschkeProduct, n: usize) -> Result<f64> {
    let series = CoefficientSeries::new(h.to_vec(), Variable::Z);
    let composed = compose_grid(&series, &b.grid(n)?);
    Ok((hp_norm(&composed, PNorm::TWO) - series.l2_norm()).abs())
}

fn beurling_checks(
    b: &BlaschkeProduct,
    g: &BoundaryGrid,
    psi: &BoundaryGrid,
    inner: &[Complex64],
    config: &ConformanceConfig,
) -> Result<Vec<Verdict>> {
    let n = config.grid;
    let spec = SubspaceSpec::new(b.clone(), vec![g.clone()], Algebra::Full, config.m_span)?;
    let dec = beurling_decompose(&spec)?;
    let mut out = vec![
        Verdict::at_most("beurling_rank", (dec.r as f64 - 1.0).abs(), 0.0),
        Verdict::at_most("beurling_binner", dec.b_inner.deviation, dec.tolerances.binner_tol),
        Verdict::at_most("beurling_residual", dec.residual, dec.tolerances.beurling_tol),
    ];

    // J must be ψ times the Blaschke factors of the inner roots, up to phase.
    let bz = b.grid(n)?;
    let factor = bz.map(|w| {
        inner
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, &a| acc * (w - a) / (1.0 - a.conj() * w))
    });
    let oracle = psi.mul(&factor)?;
    let overlap = inner_product(&dec.inner_functions[0], &oracle)?;
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let dist = hp_norm(&dec.inner_functions[0].sub(&oracle.scale(phase))?, PNorm::TWO);
    out.push(Verdict::at_most("beurling_inner_oracle", dist, 1e-6));

    // The same subspace from two other generator sets.
    let outer_a = compose_grid(&CoefficientSeries::from_real(&[2.0, 1.0], Variable::Z), &bz);
    let outer_b = compose_grid(&CoefficientSeries::from_real(&[1.0, -0.5], Variable::Z), &bz);
    let s2 = SubspaceSpec::new(
        b.clone(),
        vec![g.mul(&outer_a)?.tagged_analytic()],
        Algebra::Full,
        config.m_span,
    )?;
    let s3 = SubspaceSpec::new(
        b.clone(),
        vec![g.mul(&outer_b)?.tagged_analytic(), g.mul(&bz)?.tagged_analytic()],
        Algebra::Full,
        config.m_span,
    )?;
    let u = uniqueness_unitary(&beurling_decompose(&s2)?, &beurling_decompose(&s3)?)?;
    out.push(Verdict::at_most("uniqueness_unitary", u.unitarity_deviation, 1e-6));
    out.push(Verdict::at_most("uniqueness_fit", u.fit_residual, 1e-6));
    Ok(out)
}

fn constrained_checks(
    b: &BlaschkeProduct,
    g: &BoundaryGrid,
    config: &ConformanceConfig,
) -> Result<Vec<Verdict>> {
    let spec = SubspaceSpec::new(b.clone(), vec![g.clone()], Algebra::Constrained, config.m_span)?;
    Ok(match constrained_decompose(&spec)? {
        ConstrainedOutcome::FullyInvariant(fi) => vec![Verdict::at_most(
            "constrained_fully_invariant",
            fi.b_invariance_witness,
            spec.tolerances().non_invariance_tol,
        )],
        ConstrainedOutcome::Decomposed(dec) => {
            let rep = verify_decomposition(&spec, &dec)?;
            let t = spec.tolerances();
            vec![
                Verdict::at_most(
                    "constrained_dimension",
                    (dec.dim_m1_minus_b2m1 as f64 - 2.0 * dec.r as f64).abs(),
                    0.0,
                ),
                Verdict::at_most("constrained_k_bound", dec.k as f64, 2.0 * dec.r as f64 - 1.0),
                Verdict::at_most("constrained_unitarity", rep.unitarity_deviation, t.unitarity_tol),
                Verdict::at_most("constrained_residual", rep.max_residual, t.beurling_tol),
                Verdict::above(
                    "constrained_witness",
                    rep.b_invariance_witness,
                    t.non_invariance_tol,
                ),
            ]
        }
    })
}

fn outer_checks(u: &[Complex64], k: &[Complex64], n: usize) -> Result<Vec<Verdict>> {
    // u is the real part of a random trigonometric polynomial.
    let analytic = synthesize(&CoefficientSeries::z(u.to_vec()), n)?;
    let u_grid = analytic.map(|v| Complex64::new(v.re, 0.0));
    let o = outer_from_log_modulus(&OuterSpec::new(u_grid.clone())?)?;
    let modulus = o
        .samples()
        .iter()
        .zip(u_grid.samples())
        .map(|(x, v)| (x.norm() - (-v.re).exp()).abs())
        .fold(0.0, f64::max);
    let mut out = vec![
        Verdict::at_most("outer_modulus", modulus, 1e-8),
        Verdict::at_most("outer_analytic", analyticity_defect(&o), 1e-8),
    ];

    let series = CoefficientSeries::z(k.to_vec());
    let k_grid = synthesize(&series, n)?;
    for d in [1.0, 10.0, 100.0] {
        let t = taming_factor(&k_grid, d)?;
        let contraction = t.q.max_abs() - 1.0;
        out.push(Verdict::at_most("taming_contraction", contraction, 1e-15));
        let bound = t.bound();
        let ratio = t
            .q
            .samples()
            .iter()
            .map(|v| (v - 1.0).norm() / bound)
            .fold(0.0, f64::max);
        out.push(Verdict::at_most("taming_rate", ratio, 1.0));
    }

    let fejer = synthesize(&fejer_mean(&analyze(&k_grid).to_series(), k.len()), n)?;
    out.push(Verdict::at_most(
        "fejer_maximum",
        fejer.max_abs() - k_grid.max_abs(),
        1e-12,
    ));
    Ok(out)
}
