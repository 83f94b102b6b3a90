//! Outcome probabilities of measurements on bandlimited probes, and the
//! Fisher information they carry.

mod fisher;
mod povm;
mod probability;
mod probe;

pub use fisher::{crb, crb_with_cap, fisher_matrix, FisherMatrix, FisherOptions, DEFAULT_CONDITION_CAP};
pub use povm::{Povm, PovmElement};
pub use probability::{
    probabilities, probabilities_ideal, probabilities_limited, probabilities_table_csv,
    probabilities_truncated, time_limit_povm, Regime,
};
pub use probe::ProbeState;

/// Tolerance on norms, weights and eigenvalues of probe and POVM data.
pub const NORM_TOL: f64 = 1e-9;

/// Probabilities in `[−PROB_TOL, 0)` are rounded to zero, below that is an error.
pub const PROB_TOL: f64 = 1e-10;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
