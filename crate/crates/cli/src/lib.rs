//! Commands behind the `hardy` binary. Each command turns an input document
//! into a [`RunReport`].

pub mod document;

use std::collections::BTreeMap;
use std::time::Instant;

use hardy_core::conformance::{run_conformance, ConformanceConfig, Verdict};
use hardy_core::decomp::{component_grids, gram_deviation};
use hardy_core::subspace::linalg::CMatrix;
use hardy_core::{
    beurling_decompose, constrained_decompose, decompose, hp_norm, reconstruct,
    verify_decomposition, Algebra, BasisIndex, BlaschkeProduct, ComponentVector,
    ConstrainedOutcome, Error, PNorm, SubspaceSpec, DEFAULT_GRID,
};
use serde::Serialize;
use serde_json::{json, Value};

use document::{
    to_complex, to_pair, AlgebraDocument, BasisCheckInput, ConformanceInput, DecomposeInput, Pair,
    SubspaceInput,
};

pub const DEFAULT_M_MAX: usize = 16;
pub const DEFAULT_M_SPAN: usize = 32;
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input; exit code 2.
    #[error("usage error: {0}")]
    Usage(String),
    /// The engine could not reach a decision; exit code 1.
    #[error("engine error: {0}")]
    Engine(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Engine(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::IndeterminateRank { .. }
            | Error::EmptyFrame
            | Error::TooManyInnerFunctions { .. }
            | Error::InconsistentDimension { .. }
            | Error::RankMismatch(..) => Self::Engine(e.to_string()),
            _ => Self::Usage(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Usage(format!("malformed input document: {e}"))
    }
}

/// Flag values; `None` falls back to the document, then to the default.
#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub grid: Option<usize>,
    pub m_max: Option<usize>,
    pub m_span: Option<usize>,
    pub tol: Option<f64>,
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub input: Value,
    pub outputs: Value,
    pub tolerances: BTreeMap<String, f64>,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
    pub timing: Timing,
}

impl RunReport {
    fn new(
        command: &str,
        input: Value,
        outputs: Value,
        verdicts: Vec<Verdict>,
        tolerances: BTreeMap<String, f64>,
        start: Instant,
    ) -> Self {
        Self {
            command: command.into(),
            input,
            outputs,
            passed: verdicts.iter().all(|v| v.passed),
            verdicts,
            tolerances,
            timing: Timing {
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            },
        }
    }

    /// The report without its timing field.
    pub fn body(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        if let Value::Object(map) = &mut v {
            map.remove("timing");
        }
        v
    }

    /// Report for a run the engine could not finish.
    pub fn failure(command: &str, input: Value, err: &CliError) -> Self {
        Self {
            command: command.into(),
            input,
            outputs: json!({ "error": err.to_string() }),
            tolerances: BTreeMap::new(),
            verdicts: vec![Verdict {
                name: "engine".into(),
                passed: false,
                value: f64::NAN,
                tolerance: 0.0,
            }],
            passed: false,
            timing: Timing { elapsed_ms: 0.0 },
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

fn blaschke(zeros: &[Pair]) -> Result<BlaschkeProduct, CliError> {
    Ok(BlaschkeProduct::new(zeros.iter().map(to_complex).collect())?)
}

fn pick<T: Copy>(flag: Option<T>, doc: Option<T>, default: T) -> T {
    flag.or(doc).unwrap_or(default)
}

/// Matrix as row-major rows of `[re, im]`.
pub fn matrix_pairs(m: &CMatrix) -> Vec<Vec<Pair>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| to_pair(m[(i, j)])).collect())
        .collect()
}

fn component_pairs(cv: &ComponentVector) -> Vec<Vec<Pair>> {
    cv.components()
        .iter()
        .map(|c| c.coefficients().iter().map(|&v| to_pair(v)).collect())
        .collect()
}

/// Gram matrix of `e_{jm}`, `j < n`, `m ≤ M_max`, against the identity.
pub fn cmd_basis_check(doc: &Value, opts: &Options) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let input: BasisCheckInput = serde_json::from_value(doc.clone())?;
    let b = blaschke(&input.zeros)?;
    let m_max = pick(opts.m_max, input.m_max, DEFAULT_M_MAX);
    let n = pick(opts.grid, input.grid, DEFAULT_GRID);
    let tol = opts.tol.unwrap_or(DEFAULT_TOL);
    let mut basis = Vec::with_capacity(b.degree() * (m_max + 1));
    for j in 0..b.degree() {
        for m in 0..=m_max {
            basis.push(b.basis_element(BasisIndex::new(j, m), n)?);
        }
    }
    let deviation = gram_deviation(&basis)?;
    Ok(RunReport::new(
        "basis-check",
        doc.clone(),
        json!({
            "degree": b.degree(),
            "m_max": m_max,
            "grid": n,
            "basis_size": basis.len(),
            "gram_deviation": deviation,
        }),
        vec![Verdict::at_most("gram_deviation", deviation, tol)],
        BTreeMap::from([("gram".into(), tol)]),
        start,
    ))
}

/// Components of a function and the residual of their reconstruction.
pub fn cmd_decompose(doc: &Value, opts: &Options) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let input: DecomposeInput = serde_json::from_value(doc.clone())?;
    let b = blaschke(&input.zeros)?;
    let m_max = pick(opts.m_max, input.m_max, DEFAULT_M_MAX);
    let n = pick(
        opts.grid,
        input.grid.or(input.function.grid_len()),
        DEFAULT_GRID,
    );
    let tol = opts.tol.unwrap_or(DEFAULT_TOL);
    let f = input.function.to_grid(n)?;
    let cv = decompose(&f, &b, m_max)?;
    let back = reconstruct(&cv, n)?;
    let norm = hp_norm(&f, PNorm::TWO);
    let residual = if norm > 0.0 {
        hp_norm(&back.sub(&f)?, PNorm::TWO) / norm
    } else {
        0.0
    };
    let component_norms: Vec<f64> = component_grids(&cv, n)?
        .iter()
        .map(|g| hp_norm(g, PNorm::TWO))
        .collect();
    Ok(RunReport::new(
        "decompose",
        doc.clone(),
        json!({
            "degree": b.degree(),
            "m_max": m_max,
            "grid": n,
            "components": component_pairs(&cv),
            "component_norms": component_norms,
            "relative_residual": residual,
        }),
        vec![Verdict::at_most("reconstruction", residual, tol)],
        BTreeMap::from([("reconstruction".into(), tol)]),
        start,
    ))
}

/// Decomposition of the subspace generated by the input functions.
pub fn cmd_subspace(doc: &Value, opts: &Options) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let input: SubspaceInput = serde_json::from_value(doc.clone())?;
    let b = blaschke(&input.zeros)?;
    let m_span = pick(opts.m_span, input.m_span, DEFAULT_M_SPAN);
    let doc_grid = input.generators.iter().find_map(|g| g.grid_len());
    let n = pick(opts.grid, input.grid.or(doc_grid), DEFAULT_GRID);
    let generators = input
        .generators
        .iter()
        .map(|g| g.to_grid(n))
        .collect::<Result<Vec<_>, _>>()?;
    let algebra = match input.algebra {
        AlgebraDocument::Full => Algebra::Full,
        AlgebraDocument::Constrained => Algebra::Constrained,
    };
    let mut spec = SubspaceSpec::new(b, generators, algebra, m_span)?;
    if let Some(p) = input.p {
        spec = spec.with_p(PNorm::new(p)?);
    }
    if let Some(tol) = opts.tol {
        let mut t = *spec.tolerances();
        t.beurling_tol = tol;
        spec = spec.with_tolerances(t);
    }
    let t = *spec.tolerances();
    let tolerances = BTreeMap::from([
        ("rank_tol".into(), t.rank_tol),
        ("min_gap".into(), t.min_gap),
        ("beurling_tol".into(), t.beurling_tol),
        ("non_invariance_tol".into(), t.non_invariance_tol),
        ("binner_tol".into(), t.binner_tol),
        ("unitarity_tol".into(), t.unitarity_tol),
        ("odd_row_tol".into(), t.odd_row_tol),
    ]);

    let (outputs, verdicts) = match algebra {
        Algebra::Full => {
            let dec = beurling_decompose(&spec)?;
            let outputs = json!({
                "algebra": "full",
                "grid": n,
                "m_span": m_span,
                "r": dec.r,
                "inner_components": dec.inner_components.iter().map(component_pairs).collect::<Vec<_>>(),
                "b_inner_deviation": dec.b_inner.deviation,
                "generator_residuals": dec.generator_residuals,
                "generator_residuals_p": dec.residuals_p,
                "gap_ratio": dec.gap_ratio,
            });
            let verdicts = vec![
                Verdict::at_most("b_inner", dec.b_inner.deviation, t.binner_tol),
                Verdict::at_most("generator_residual", dec.residual, t.beurling_tol),
            ];
            (outputs, verdicts)
        }
        Algebra::Constrained => match constrained_decompose(&spec)? {
            ConstrainedOutcome::FullyInvariant(fi) => (
                json!({
                    "algebra": "constrained",
                    "grid": n,
                    "m_span": m_span,
                    "outcome": "fully_invariant",
                    "r": fi.r,
                    "k": fi.k,
                    "dim_m1_minus_b2m1": fi.dim_m1_minus_b2m1,
                    "b_invariance_witness": fi.b_invariance_witness,
                    "gap_ratio": fi.gap_ratio,
                }),
                vec![Verdict::at_most(
                    "fully_invariant",
                    fi.b_invariance_witness,
                    t.non_invariance_tol,
                )],
            ),
            ConstrainedOutcome::Decomposed(dec) => {
                let rep = verify_decomposition(&spec, &dec)?;
                let outputs = json!({
                    "algebra": "constrained",
                    "grid": n,
                    "m_span": m_span,
                    "outcome": "decomposed",
                    "r": dec.r,
                    "k": dec.k,
                    "k_is_2r_minus_1": dec.k_is_2r_minus_1,
                    "dim_m1_minus_b2m1": dec.dim_m1_minus_b2m1,
                    "a": matrix_pairs(&dec.a),
                    "inner_components": dec.inner_components.iter().map(component_pairs).collect::<Vec<_>>(),
                    "wandering_components": dec.wandering_components.iter().map(component_pairs).collect::<Vec<_>>(),
                    "fit_residual": dec.fit_residual,
                    "gap_ratio": dec.gap_ratio,
                    "verification": rep,
                });
                let verdicts = vec![
                    Verdict::at_most(
                        "dimension_2r",
                        (dec.dim_m1_minus_b2m1 as f64 - 2.0 * dec.r as f64).abs(),
                        0.0,
                    ),
                    Verdict::at_most("k_bound", dec.k as f64, 2.0 * dec.r as f64 - 1.0),
                    Verdict::at_most("generator_residual", rep.max_residual, t.beurling_tol),
                    Verdict::at_most("unitarity", rep.unitarity_deviation, t.unitarity_tol),
                    Verdict::above(
                        "b_invariance_witness",
                        rep.b_invariance_witness,
                        t.non_invariance_tol,
                    ),
                    Verdict::at_most(
                        "orthogonality",
                        rep.orthogonality_residual,
                        t.beurling_tol,
                    ),
                    Verdict::above("odd_row", rep.odd_row_max, t.odd_row_tol),
                ];
                (outputs, verdicts)
            }
        },
    };
    Ok(RunReport::new("subspace", doc.clone(), outputs, verdicts, tolerances, start))
}

/// Seeded randomized suite; one verdict per trial.
pub fn cmd_conformance(seed: u64, trials: usize, opts: &Options) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let config = ConformanceConfig {
        grid: opts.grid.unwrap_or(DEFAULT_GRID),
        m_max: opts.m_max.unwrap_or(DEFAULT_M_MAX),
        m_span: opts.m_span.unwrap_or(DEFAULT_M_SPAN),
        threads: opts.threads,
    };
    let report = run_conformance(seed, trials, &config)?;
    let verdicts = report
        .results
        .iter()
        .map(|t| Verdict {
            name: format!("trial {} (seed {})", t.index, t.seed),
            passed: t.passed,
            value: t.verdicts.iter().filter(|v| !v.passed).count() as f64,
            tolerance: 0.0,
        })
        .collect();
    let input = serde_json::to_value(ConformanceInput { seed, trials })?;
    Ok(RunReport::new(
        "conformance",
        input,
        serde_json::to_value(&report)?,
        verdicts,
        BTreeMap::new(),
        start,
    ))
}
