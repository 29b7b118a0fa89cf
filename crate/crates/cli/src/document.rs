//! Input documents read from stdin or `--input`.

use hardy_core::{synthesize, BoundaryGrid, CoefficientSeries, Complex64, Variable};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A complex number as `[re, im]`.
pub type Pair = [f64; 2];

pub fn to_complex(p: &Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn to_pair(c: Complex64) -> Pair {
    [c.re, c.im]
}

/// Poles of rational inputs must satisfy `|pole| > 1 + POLE_MARGIN`.
pub const POLE_MARGIN: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FunctionSpecDocument {
    Taylor {
        coefficients: Vec<Pair>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Rational {
        numerator: Vec<Pair>,
        denominator: Vec<Pair>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Grid {
        samples: Vec<Pair>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
}

impl FunctionSpecDocument {
    /// Boundary samples on `n` points, tagged analytic.
    pub fn to_grid(&self, n: usize) -> Result<BoundaryGrid, CliError> {
        match self {
            Self::Taylor { coefficients, .. } => {
                let series =
                    CoefficientSeries::new(coefficients.iter().map(to_complex).collect(), Variable::Z);
                Ok(synthesize(&series, n)?)
            }
            Self::Rational {
                numerator,
                denominator,
                ..
            } => {
                let num: Vec<Complex64> = numerator.iter().map(to_complex).collect();
                let den: Vec<Complex64> = denominator.iter().map(to_complex).collect();
                check_poles(&den)?;
                let num = CoefficientSeries::new(num, Variable::Z);
                let den = CoefficientSeries::new(den, Variable::Z);
                Ok(BoundaryGrid::from_fn(n, |z| num.eval(z) / den.eval(z))?.tagged_analytic())
            }
            Self::Grid { samples, .. } => {
                if samples.len() != n {
                    return Err(CliError::Usage(format!(
                        "grid input has {} samples but the run uses N = {n}",
                        samples.len()
                    )));
                }
                let g = BoundaryGrid::new(samples.iter().map(to_complex).collect())?;
                let tol = 1e-8 * g.max_abs().max(1.0);
                Ok(g.into_analytic(tol)?)
            }
        }
    }

    /// Sample count when the document fixes it.
    pub fn grid_len(&self) -> Option<usize> {
        match self {
            Self::Grid { samples, .. } => Some(samples.len()),
            _ => None,
        }
    }
}

/// Roots of a polynomial given lowest coefficient first, from the
/// eigenvalues of its companion matrix.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, CliError> {
    let degree = match coeffs.iter().rposition(|c| c.norm() > 0.0) {
        Some(d) => d,
        None => return Err(CliError::Usage("polynomial is identically zero".into())),
    };
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[degree];
    let companion = faer::Mat::<Complex64>::from_fn(degree, degree, |i, j| {
        if i == 0 {
            -coeffs[degree - 1 - j] / lead
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    companion
        .eigenvalues()
        .map_err(|e| CliError::Engine(format!("root finding failed: {e:?}")))
}

fn check_poles(den: &[Complex64]) -> Result<(), CliError> {
    for root in polynomial_roots(den)? {
        if root.norm() <= 1.0 + POLE_MARGIN {
            return Err(CliError::Usage(format!(
                "denominator has a root {root} with modulus {} ≤ 1 + {POLE_MARGIN:e}",
                root.norm()
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisCheckInput {
    pub zeros: Vec<Pair>,
    #[serde(default)]
    pub m_max: Option<usize>,
    #[serde(default)]
    pub grid: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeInput {
    pub function: FunctionSpecDocument,
    pub zeros: Vec<Pair>,
    #[serde(default)]
    pub m_max: Option<usize>,
    #[serde(default)]
    pub grid: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraDocument {
    Full,
    Constrained,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceInput {
    pub zeros: Vec<Pair>,
    pub generators: Vec<FunctionSpecDocument>,
    pub algebra: AlgebraDocument,
    #[serde(default)]
    pub m_span: Option<usize>,
    #[serde(default)]
    pub grid: Option<usize>,
    /// Exponent for residual re-verification; `null` or absent means 2.
    #[serde(default)]
    pub p: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConformanceInput {
    pub seed: u64,
    pub trials: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_known_polynomials() {
        // (z − 2)(z + 3i)
        let c = |re, im| Complex64::new(re, im);
        let coeffs = [c(0.0, -6.0), c(-2.0, 3.0), c(1.0, 0.0)];
        let mut roots = polynomial_roots(&coeffs).unwrap();
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((roots[0] - c(0.0, -3.0)).norm() < 1e-12);
        assert!((roots[1] - c(2.0, 0.0)).norm() < 1e-12);
        assert!(polynomial_roots(&[c(5.0, 0.0), c(0.0, 0.0)]).unwrap().is_empty());
        assert!(polynomial_roots(&[c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn rational_inputs() {
        let doc: FunctionSpecDocument = serde_json::from_str(
            r#"{"kind":"rational","numerator":[[1,0]],"denominator":[[1,0],[-0.5,0]]}"#,
        )
        .unwrap();
        let g = doc.to_grid(256).unwrap();
        assert!((g.samples()[0] - 2.0).norm() < 1e-14);

        let bad: FunctionSpecDocument = serde_json::from_str(
            r#"{"kind":"rational","numerator":[[1,0]],"denominator":[[1,0],[-1,0]]}"#,
        )
        .unwrap();
        assert!(matches!(bad.to_grid(256), Err(CliError::Usage(_))));
    }

    #[test]
    fn grid_inputs() {
        let samples: Vec<Pair> = (0..16).map(|_| [1.0, 0.0]).collect();
        let doc = FunctionSpecDocument::Grid {
            samples,
            label: None,
        };
        assert!(doc.to_grid(16).unwrap().is_analytic());
        assert!(doc.to_grid(32).is_err());
        let conj: Vec<Pair> = (0..16)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / 16.0;
                [t.cos(), -t.sin()]
            })
            .collect();
        let doc = FunctionSpecDocument::Grid {
            samples: conj,
            label: None,
        };
        assert!(doc.to_grid(16).is_err());
    }
}
