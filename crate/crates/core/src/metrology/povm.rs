use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{dot, NORM_TOL};
use crate::error::{invalid, Error, Result};

/// `Π̂ᵢ = Σₗ Π_{il} |π_{il}⟩⟨π_{il}|`, each `π_{il}` given by PSWF coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    pub terms: Vec<(f64, Vec<f64>)>,
}

impl PovmElement {
    pub fn projector(vector: Vec<f64>) -> Self {
        Self {
            terms: vec![(1.0, vector)],
        }
    }
}

/// Elements `Π̂₀ … Π̂_{d−1}`; the leakage element `Π̂_d = 1 − Σ Π̂ᵢ` is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<PovmElement>,
    dim: usize,
}

impl Povm {
    pub fn new(elements: Vec<PovmElement>) -> Result<Self> {
        let dim = elements
            .iter()
            .flat_map(|e| e.terms.iter())
            .map(|(_, v)| v.len())
            .next()
            .ok_or_else(|| invalid("povm", "needs at least one element term"))?;
        for (i, e) in elements.iter().enumerate() {
            for (weight, v) in &e.terms {
                if v.len() != dim {
                    return Err(Error::DimensionMismatch(format!(
                        "element {i} has a vector of length {} instead of {dim}",
                        v.len()
                    )));
                }
                if !(*weight >= 0.0) {
                    return Err(invalid("povm", format!("element {i} has weight {weight}")));
                }
                let n2 = dot(v, v);
                if !(n2 <= 1.0 + NORM_TOL) {
                    return Err(invalid("povm", format!("element {i} has a vector with norm² {n2}")));
                }
            }
        }
        let povm = Self { elements, dim };
        let eig = SymmetricEigen::new(povm.operator_sum());
        let (k, top) = eig
            .eigenvalues
            .iter()
            .cloned()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        if top > 1.0 + NORM_TOL {
            return Err(Error::PovmNotPositive {
                eigenvalue: top,
                direction: eig.eigenvectors.column(k).iter().cloned().collect(),
            });
        }
        Ok(povm)
    }

    /// Rank-one projective elements `|vᵢ⟩⟨vᵢ|`.
    pub fn projectors(vectors: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(vectors.into_iter().map(PovmElement::projector).collect())
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    /// Number of explicit elements `d`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Σᵢ Π̂ᵢ` in the PSWF basis.
    pub fn operator_sum(&self) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(self.dim, self.dim);
        for e in &self.elements {
            for (w, v) in &e.terms {
                let v = DVector::from_column_slice(v);
                s += *w * &v * v.transpose();
            }
        }
        s
    }

    /// Same element structure with every vector transformed.
    pub(crate) fn map_vectors(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        Self::new(
            self.elements
                .iter()
                .map(|e| PovmElement {
                    terms: e.terms.iter().map(|(w, v)| (*w, f(v))).collect(),
                })
                .collect(),
        )
    }
}
