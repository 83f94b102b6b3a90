use serde::{Deserialize, Serialize};

use super::{Povm, ProbeState, PROB_TOL};
use crate::error::{Error, Result};
use crate::io::format_f64;
use crate::params::plunge_index;
use crate::pswf::ProlateBasis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Unlimited measurement time.
    Ideal,
    /// Band- and time-limited, with the exact eigenvalue damping.
    Limited,
    /// Ideal formula with PSWF sums cut at `⌈2c/π⌉`.
    Truncated,
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(Self::Ideal),
            "limited" => Ok(Self::Limited),
            "truncated" => Ok(Self::Truncated),
            _ => Err(crate::error::invalid(
                "regime",
                format!("expected ideal, limited or truncated, got {s}"),
            )),
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Ideal => "ideal",
            Self::Limited => "limited",
            Self::Truncated => "truncated",
        })
    }
}

/// `pᵢ = Σₖₗ ϱₖ Π_{il} (Σₙ π_{iln} wₙ Ψₖₙ)²` for `i < d`, then the leakage
/// `p_d = 1 − Σ pᵢ`. Coefficients past the shorter of the two expansions
/// count as zero.
fn weighted(probe: &ProbeState, povm: &Povm, damping: impl Fn(usize) -> f64) -> Result<Vec<f64>> {
    let dim = probe.dim().min(povm.dim());
    let factors: Vec<f64> = (0..dim).map(damping).collect();
    let mut p: Vec<f64> = povm
        .elements()
        .iter()
        .map(|e| {
            let mut pi = 0.0;
            for (rho, mode) in probe.weights().iter().zip(probe.modes()) {
                for (w, v) in &e.terms {
                    let amp: f64 = (0..dim).map(|n| v[n] * factors[n] * mode[n]).sum();
                    pi += rho * w * amp * amp;
                }
            }
            pi
        })
        .collect();
    let leakage = 1.0 - p.iter().sum::<f64>();
    p.push(leakage);
    for (i, x) in p.iter_mut().enumerate() {
        if *x < 0.0 {
            if *x < -PROB_TOL {
                return Err(Error::NegativeProbability { index: i, value: *x });
            }
            *x = 0.0;
        }
    }
    Ok(p)
}

pub fn probabilities_ideal(probe: &ProbeState, povm: &Povm) -> Result<Vec<f64>> {
    weighted(probe, povm, |_| 1.0)
}

/// Measurement restricted to `[−T, T]`: each PSWF coefficient is damped by `λₙ(c)`.
pub fn probabilities_limited(probe: &ProbeState, povm: &Povm, basis: &ProlateBasis) -> Result<Vec<f64>> {
    let dim = probe.dim().min(povm.dim());
    if dim > basis.len() {
        return Err(Error::DimensionMismatch(format!(
            "expansions of length {dim} need {dim} eigenvalues, basis has {}",
            basis.len()
        )));
    }
    weighted(probe, povm, |n| basis.lambda(n))
}

/// Sums over `n = 0 … ⌈2c/π⌉` only.
pub fn probabilities_truncated(probe: &ProbeState, povm: &Povm, c: f64) -> Result<Vec<f64>> {
    let cut = plunge_index(c);
    weighted(probe, povm, |n| if n <= cut { 1.0 } else { 0.0 })
}

pub fn probabilities(regime: Regime, probe: &ProbeState, povm: &Povm, basis: &ProlateBasis) -> Result<Vec<f64>> {
    match regime {
        Regime::Ideal => probabilities_ideal(probe, povm),
        Regime::Limited => probabilities_limited(probe, povm, basis),
        Regime::Truncated => probabilities_truncated(probe, povm, basis.params().c()),
    }
}

/// `Π̂ᵢ ↦ Ξ̂_T Π̂ᵢ Ξ̂_T` on the bandlimited coefficients: `π_{iln} ↦ π_{iln} λₙ`.
pub fn time_limit_povm(povm: &Povm, basis: &ProlateBasis) -> Result<Povm> {
    if povm.dim() > basis.len() {
        return Err(Error::DimensionMismatch(format!(
            "POVM vectors of length {} need as many eigenvalues, basis has {}",
            povm.dim(),
            basis.len()
        )));
    }
    povm.map_vectors(|v| v.iter().zip(basis.lambdas()).map(|(x, l)| x * l).collect())
}

/// One row per outcome; the last row is the leakage element.
pub fn probabilities_table_csv(p: &[f64]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Serialization(e.to_string());
    w.write_record(["outcome", "kind", "probability"]).map_err(io)?;
    for (i, x) in p.iter().enumerate() {
        let kind = if i + 1 == p.len() { "leakage" } else { "element" };
        w.write_record([i.to_string(), kind.to_string(), format_f64(*x)]).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
}
