use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::PROB_TOL;
use crate::error::{invalid, Error, Result};
use crate::io::{format_f64, to_json_string};

/// Condition number above which a Fisher matrix is treated as singular.
pub const DEFAULT_CONDITION_CAP: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct FisherOptions {
    /// Per-parameter steps; `1e-5·(1 + |θₙ|)` when absent.
    pub steps: Option<Vec<f64>>,
    pub p_floor: f64,
    /// Whether the last outcome (the leakage element) enters the sum.
    pub include_leakage: bool,
    /// One Richardson extrapolation of the central difference.
    pub richardson: bool,
}

impl Default for FisherOptions {
    fn default() -> Self {
        Self {
            steps: None,
            p_floor: 1e-12,
            include_leakage: true,
            richardson: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FisherMatrix {
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
    pub steps: Vec<f64>,
    /// Outcomes left out because `pⱼ < p_floor`.
    pub excluded: Vec<usize>,
    pub include_leakage: bool,
}

impl FisherMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i][j]
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.matrix[i][j])
    }

    pub fn to_csv(&self) -> Result<String> {
        let io = |e: csv::Error| Error::Serialization(e.to_string());
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["parameter".to_string()];
        header.extend(self.labels.iter().cloned());
        header.push("step".into());
        w.write_record(&header).map_err(io)?;
        for (i, row) in self.matrix.iter().enumerate() {
            let mut rec = vec![self.labels[i].clone()];
            rec.extend(row.iter().map(|x| format_f64(*x)));
            rec.push(format_f64(self.steps[i]));
            w.write_record(&rec).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }
}

/// `F_{nm} = Σⱼ (1/pⱼ) ∂ₙpⱼ ∂ₘpⱼ` with central-difference derivatives.
///
/// The model returns the full probability vector, leakage element last.
pub fn fisher_matrix<M>(model: M, theta: &[f64], labels: &[&str], opts: &FisherOptions) -> Result<FisherMatrix>
where
    M: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let k = theta.len();
    if labels.len() != k {
        return Err(Error::DimensionMismatch(format!("{} labels for {k} parameters", labels.len())));
    }
    let steps: Vec<f64> = match &opts.steps {
        Some(s) if s.len() != k => {
            return Err(Error::DimensionMismatch(format!("{} steps for {k} parameters", s.len())))
        }
        Some(s) => s.clone(),
        None => theta.iter().map(|t| 1e-5 * (1.0 + t.abs())).collect(),
    };
    if steps.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
        return Err(invalid("steps", "must be positive and finite"));
    }
    let eval = |point: &[f64], parameter: Option<usize>| -> Result<Vec<f64>> {
        let p = model(point).map_err(|e| match e {
            e @ Error::ModelEvaluation { .. } => e,
            e => Error::ModelEvaluation {
                theta: point.to_vec(),
                reason: e.to_string(),
            },
        })?;
        if let Some(parameter) = parameter {
            if p.iter().any(|&x| !(-PROB_TOL..=1.0 + PROB_TOL).contains(&x)) {
                return Err(Error::StepOutOfDomain { parameter });
            }
        }
        Ok(p)
    };
    let p0 = eval(theta, None)?;
    let outcomes = if opts.include_leakage { p0.len() } else { p0.len() - 1 };
    let central = |n: usize, h: f64| -> Result<Vec<f64>> {
        let mut plus = theta.to_vec();
        let mut minus = theta.to_vec();
        plus[n] += h;
        minus[n] -= h;
        let a = eval(&plus, Some(n))?;
        let b = eval(&minus, Some(n))?;
        if a.len() != p0.len() || b.len() != p0.len() {
            return Err(Error::DimensionMismatch("model output length changed".into()));
        }
        Ok(a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * h)).collect())
    };
    let mut grads = Vec::with_capacity(k);
    for n in 0..k {
        let coarse = central(n, steps[n])?;
        let g = if opts.richardson {
            let fine = central(n, steps[n] / 2.0)?;
            fine.iter().zip(&coarse).map(|(f, c)| (4.0 * f - c) / 3.0).collect()
        } else {
            coarse
        };
        grads.push(g);
    }
    let excluded: Vec<usize> = (0..outcomes).filter(|&j| p0[j] < opts.p_floor).collect();
    let mut matrix = vec![vec![0.0; k]; k];
    for j in (0..outcomes).filter(|j| !excluded.contains(j)) {
        for a in 0..k {
            for b in 0..k {
                matrix[a][b] += grads[a][j] * grads[b][j] / p0[j];
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            let m = 0.5 * (matrix[a][b] + matrix[b][a]);
            matrix[a][b] = m;
            matrix[b][a] = m;
        }
    }
    Ok(FisherMatrix {
        labels: labels.iter().map(|s| s.to_string()).collect(),
        matrix,
        steps,
        excluded,
        include_leakage: opts.include_leakage,
    })
}

/// Cramér–Rao bounds `√((F⁻¹)ₙₙ)`.
pub fn crb(f: &FisherMatrix) -> Result<Vec<f64>> {
    crb_with_cap(f, DEFAULT_CONDITION_CAP)
}

pub fn crb_with_cap(f: &FisherMatrix, condition_cap: f64) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::new(f.to_nalgebra());
    let (mut lo, mut hi) = (0, 0);
    for (i, &v) in eig.eigenvalues.iter().enumerate() {
        if v < eig.eigenvalues[lo] {
            lo = i;
        }
        if v > eig.eigenvalues[hi] {
            hi = i;
        }
    }
    let (min, max) = (eig.eigenvalues[lo], eig.eigenvalues[hi]);
    if !(max > 0.0) || min <= max / condition_cap {
        return Err(Error::SingularFisher {
            condition: if min > 0.0 { max / min } else { f64::INFINITY },
            null_direction: eig.eigenvectors.column(lo).iter().cloned().collect(),
        });
    }
    Ok((0..f.dim())
        .map(|n| {
            (0..f.dim())
                .map(|i| eig.eigenvectors[(n, i)].powi(2) / eig.eigenvalues[i])
                .sum::<f64>()
                .sqrt()
        })
        .collect())
}
