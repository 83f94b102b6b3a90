use nalgebra::{DMatrix, SymmetricEigen};

use super::{dot, NORM_TOL};
use crate::error::{invalid, Error, Result};

/// Mixed probe `ϱ̂ = Σ ϱₖ |Ψₖ⟩⟨Ψₖ|` with `Ψₖ(t) = Σₙ Ψₖₙ ψₙ(c, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeState {
    weights: Vec<f64>,
    modes: Vec<Vec<f64>>,
    orthogonal: bool,
}

impl ProbeState {
    /// `orthogonal` asserts that the rows are orthonormal and is checked.
    pub fn new(weights: Vec<f64>, modes: Vec<Vec<f64>>, orthogonal: bool) -> Result<Self> {
        if weights.is_empty() || weights.len() != modes.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} modes",
                weights.len(),
                modes.len()
            )));
        }
        let dim = modes[0].len();
        if modes.iter().any(|m| m.len() != dim) {
            return Err(Error::DimensionMismatch("probe modes differ in length".into()));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(invalid("weights", "must be non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid("weights", format!("sum to {total}, not 1")));
        }
        for (k, m) in modes.iter().enumerate() {
            let n2 = dot(m, m);
            if !(n2 <= 1.0 + NORM_TOL) {
                return Err(invalid("modes", format!("row {k} has norm² {n2} > 1")));
            }
        }
        if orthogonal {
            for i in 0..modes.len() {
                for j in 0..=i {
                    let g = dot(&modes[i], &modes[j]);
                    let want = if i == j { 1.0 } else { 0.0 };
                    if (g - want).abs() > NORM_TOL {
                        return Err(invalid(
                            "modes",
                            format!("flagged orthonormal but ⟨{i}|{j}⟩ = {g}"),
                        ));
                    }
                }
            }
        }
        Ok(Self {
            weights,
            modes,
            orthogonal,
        })
    }

    pub fn pure(mode: Vec<f64>) -> Result<Self> {
        let unit = (dot(&mode, &mode) - 1.0).abs() <= NORM_TOL;
        Self::new(vec![1.0], vec![mode], unit)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn modes(&self) -> &[Vec<f64>] {
        &self.modes
    }

    pub fn is_orthogonal(&self) -> bool {
        self.orthogonal
    }

    /// Number of PSWF coefficients per mode.
    pub fn dim(&self) -> usize {
        self.modes[0].len()
    }

    /// `Σ ϱₖ Ψₖ Ψₖᵀ` in the PSWF basis.
    pub fn density_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut rho = DMatrix::zeros(n, n);
        for (w, m) in self.weights.iter().zip(&self.modes) {
            let v = nalgebra::DVector::from_column_slice(m);
            rho += *w * &v * v.transpose();
        }
        rho
    }

    /// The same operator written as a mixture of mutually orthogonal modes.
    ///
    /// When the modes are not unit vectors the operator has trace `s < 1`;
    /// the weights are then normalized and the modes carry the factor `√s`.
    pub fn to_eigendecomposition(&self) -> Result<Self> {
        let eig = SymmetricEigen::new(self.density_matrix());
        let trace: f64 = eig.eigenvalues.iter().sum();
        let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len())
            .filter(|&i| eig.eigenvalues[i] > 1e-14 * top)
            .collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let kept: f64 = order.iter().map(|&i| eig.eigenvalues[i]).sum();
        let scale = trace.max(0.0).sqrt();
        let weights = order.iter().map(|&i| eig.eigenvalues[i] / kept).collect();
        let modes = order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).iter().map(|x| scale * x).collect())
            .collect();
        Self::new(weights, modes, (trace - 1.0).abs() <= NORM_TOL)
    }
}
