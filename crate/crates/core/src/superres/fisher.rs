use super::model::TwoPulseModel;
use super::modes::probe_from_model;
use crate::error::{invalid, Result};
use crate::metrology::{fisher_matrix, probabilities, FisherMatrix, FisherOptions, Povm, Regime};
use crate::pswf::ProlateBasis;

pub const THETA_LABELS: [&str; 3] = ["tau", "tau0", "nu"];

/// How the probe mixture is written before probabilities are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Decomposition {
    /// `ν|Ψ₊⟩⟨Ψ₊| + (1−ν)|Ψ₋⟩⟨Ψ₋|`.
    #[default]
    Natural,
    /// Orthogonal eigenmodes of the same operator.
    Eigen,
}

#[derive(Debug, Clone)]
pub struct SuperresOptions {
    pub regime: Regime,
    /// Separations below `tau_floor·width` are refused.
    pub tau_floor: f64,
    pub decomposition: Decomposition,
    pub fisher: FisherOptions,
}

impl Default for SuperresOptions {
    fn default() -> Self {
        Self {
            regime: Regime::Ideal,
            tau_floor: 1e-4,
            decomposition: Decomposition::Natural,
            fisher: FisherOptions::default(),
        }
    }
}

/// Fisher matrix of `θ = (τ, τ₀, ν)` for the given measurement.
pub fn superres_fisher(model: &TwoPulseModel, povm: &Povm, basis: &ProlateBasis, regime: Regime) -> Result<FisherMatrix> {
    superres_fisher_with(
        model,
        povm,
        basis,
        &SuperresOptions {
            regime,
            ..Default::default()
        },
    )
}

pub fn superres_fisher_with(
    model: &TwoPulseModel,
    povm: &Povm,
    basis: &ProlateBasis,
    opts: &SuperresOptions,
) -> Result<FisherMatrix> {
    let floor = opts.tau_floor * model.psf.width();
    if !(model.tau >= floor) {
        return Err(invalid(
            "tau",
            format!("separation {} is below the identifiability floor {floor}", model.tau),
        ));
    }
    let map = |theta: &[f64]| -> Result<Vec<f64>> {
        let m = model.with_theta(theta)?;
        let mut probe = probe_from_model(&m, basis)?;
        if opts.decomposition == Decomposition::Eigen {
            probe = probe.to_eigendecomposition()?;
        }
        probabilities(opts.regime, &probe, povm, basis)
    };
    fisher_matrix(map, &model.theta(), &THETA_LABELS, &opts.fisher)
}
