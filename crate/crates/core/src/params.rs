use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Time–bandwidth configuration of a measurement: the Slepian frequency
/// `c = Ω·T` and the half-length `T` of the time window `[-T, T]`.
///
/// The bandwidth is always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlepianParams {
    c: f64,
    #[serde(rename = "T")]
    t: f64,
}

impl SlepianParams {
    pub fn new(c: f64, t: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(invalid("c", format!("must be finite and positive, got {c}")));
        }
        if !(t.is_finite() && t > 0.0) {
            return Err(invalid("T", format!("must be finite and positive, got {t}")));
        }
        Ok(Self { c, t })
    }

    /// Unit window, `Ω = c`.
    pub fn with_unit_window(c: f64) -> Result<Self> {
        Self::new(c, 1.0)
    }

    pub fn from_bandwidth(omega: f64, t: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(invalid("omega", format!("must be finite and positive, got {omega}")));
        }
        Self::new(omega * t, t)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn omega(&self) -> f64 {
        self.c / self.t
    }

    /// Same `c`, window stretched by `s` (bandwidth shrinks by `s`).
    pub fn rescaled(&self, s: f64) -> Result<Self> {
        Self::new(self.c, self.t * s)
    }

    pub(crate) fn ensure_same(&self, other: &SlepianParams) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ParamsMismatch {
                expected_c: self.c,
                expected_t: self.t,
                found_c: other.c,
                found_t: other.t,
            })
        }
    }
}

/// Number of eigenvalues close to one, `⌈2c/π⌉`.
///
/// Values of `2c/π` within a few ulps of an integer are treated as that
/// integer, so `c = kπ/2` maps to `k`.
pub fn plunge_index(c: f64) -> usize {
    let x = 2.0 * c / std::f64::consts::PI;
    let nearest = x.round();
    if (x - nearest).abs() <= 8.0 * f64::EPSILON * nearest.max(1.0) {
        nearest as usize
    } else {
        x.ceil() as usize
    }
}
