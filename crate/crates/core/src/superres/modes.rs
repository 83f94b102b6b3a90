use super::model::TwoPulseModel;
use super::model::Psf;
use crate::bandlimited::{project_spectrum, project_with};
use crate::error::{Error, Result};
use crate::metrology::ProbeState;
use crate::pswf::ProlateBasis;
use crate::quadrature::WholeLine;

fn projection_policy(basis: &ProlateBasis) -> WholeLine {
    WholeLine::for_window(basis.params().t())
}

/// PSWF coefficients of `f` on every extendable index.
fn coefficients(f: impl Fn(f64) -> f64, basis: &ProlateBasis) -> Result<Vec<f64>> {
    let r = project_with(f, basis, basis.extendable_len(), &projection_policy(basis))?;
    Ok(r.function.coeffs().to_vec())
}

/// Coefficients of `Ψ⁽ⁿ⁾(t − shift)`, through the closed-form spectrum when
/// the PSF has one.
fn shifted_coefficients(psf: &Psf, n: usize, shift: f64, basis: &ProlateBasis) -> Result<Vec<f64>> {
    if psf.spectrum(n, shift, 0.0).is_some() {
        let f = project_spectrum(
            |w| psf.spectrum(n, shift, w).unwrap_or_default(),
            basis,
            basis.extendable_len(),
            shift.abs(),
        )?;
        return Ok(f.coeffs().to_vec());
    }
    psf.derivative(n, 0.0)?;
    coefficients(|t| psf.derivative(n, t - shift).unwrap_or(f64::NAN), basis)
}

/// Two-component probe with weights `(ν, 1−ν)` and the projected `Ψ±` as modes.
pub fn probe_from_model(model: &TwoPulseModel, basis: &ProlateBasis) -> Result<ProbeState> {
    let plus = shifted_coefficients(&model.psf, 0, model.tau0 + model.tau / 2.0, basis)?;
    let minus = if model.tau == 0.0 {
        plus.clone()
    } else {
        shifted_coefficients(&model.psf, 0, model.tau0 - model.tau / 2.0, basis)?
    };
    ProbeState::new(vec![model.nu, 1.0 - model.nu], vec![plus, minus], false)
}

/// Derivative modes `Γₙ(t) = Ψ⁽ⁿ⁾(t − τ₀)` and their orthonormalization `Φₙ`,
/// all as PSWF coefficient vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeBasis {
    gamma: Vec<Vec<f64>>,
    phi: Option<Vec<Vec<f64>>>,
    /// Lower triangular `R` with `Φₖ = Σ_{j≤k} R_kj Γⱼ`.
    transform: Option<Vec<Vec<f64>>>,
}

impl DerivativeBasis {
    pub fn from_gamma(gamma: Vec<Vec<f64>>) -> Result<Self> {
        let dim = gamma.first().map(|g| g.len()).unwrap_or(0);
        if gamma.is_empty() || gamma.iter().any(|g| g.len() != dim) {
            return Err(Error::DimensionMismatch("Γ rows must be non-empty and of equal length".into()));
        }
        Ok(Self {
            gamma,
            phi: None,
            transform: None,
        })
    }

    pub fn gamma(&self) -> &[Vec<f64>] {
        &self.gamma
    }

    pub fn phi(&self) -> Option<&[Vec<f64>]> {
        self.phi.as_deref()
    }

    pub fn transform(&self) -> Option<&[Vec<f64>]> {
        self.transform.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.gamma[0].len()
    }

    pub(crate) fn phi_or_err(&self) -> Result<&[Vec<f64>]> {
        self.phi()
            .ok_or_else(|| crate::error::invalid("dbasis", "Gram–Schmidt step has not been run"))
    }
}

/// `Γ₀ … Γ_{n_derivs}` of the model PSF about its centroid.
pub fn gamma_modes(model: &TwoPulseModel, basis: &ProlateBasis, n_derivs: usize) -> Result<DerivativeBasis> {
    let width = model.psf.width();
    let probe_points: Vec<f64> = (-4..=4).map(|k| model.tau0 + 0.5 * k as f64 * width).collect();
    let mut gamma = Vec::with_capacity(n_derivs + 1);
    for n in 0..=n_derivs {
        model.psf.check_derivative_noise(n, &probe_points)?;
        gamma.push(shifted_coefficients(&model.psf, n, model.tau0, basis)?);
    }
    DerivativeBasis::from_gamma(gamma)
}

/// Modified Gram–Schmidt (two passes) on the Γ rows; diagonal of the
/// transform positive.
pub fn gram_schmidt(dbasis: &DerivativeBasis) -> Result<DerivativeBasis> {
    let k = dbasis.gamma.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut phi: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut transform: Vec<Vec<f64>> = Vec::with_capacity(k);
    for (i, g) in dbasis.gamma.iter().enumerate() {
        let norm0 = dot(g, g).sqrt();
        let mut v = g.clone();
        let mut r = vec![0.0; k];
        r[i] = 1.0;
        for _ in 0..2 {
            for (p, rp) in phi.iter().zip(&transform) {
                let a = dot(p, &v);
                for (x, y) in v.iter_mut().zip(p) {
                    *x -= a * y;
                }
                for (x, y) in r.iter_mut().zip(rp) {
                    *x -= a * y;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        let residual = if norm0 > 0.0 { norm / norm0 } else { 0.0 };
        if residual < 1e-7 {
            return Err(Error::RankDeficient { index: i, residual });
        }
        v.iter_mut().for_each(|x| *x /= norm);
        r.iter_mut().for_each(|x| *x /= norm);
        phi.push(v);
        transform.push(r);
    }
    Ok(DerivativeBasis {
        gamma: dbasis.gamma.clone(),
        phi: Some(phi),
        transform: Some(transform),
    })
}
