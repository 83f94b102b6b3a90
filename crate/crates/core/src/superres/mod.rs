//! Resolving two incoherent pulses: probe, derivative modes, measurement
//! design and the efficiency factor with its band and time limits.

mod design;
mod fisher;
mod model;
mod modes;

pub use design::{
    design_from_sphere, efficiency_bounds, efficiency_factor, optimal_povm, time_limited_design,
    time_limited_design_with, FreeEntries, MeasurementDesign, SphereParams, CONSTRAINT_TOL,
};
pub use fisher::{superres_fisher, superres_fisher_with, Decomposition, SuperresOptions, THETA_LABELS};
pub use model::{FiniteDifference, Psf, TwoPulseModel};
pub use modes::{gamma_modes, gram_schmidt, probe_from_model, DerivativeBasis};
