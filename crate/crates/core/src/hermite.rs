//! Hermite–Gauss comparison modes `ψₙᴴᴳ(c, z) = c^{1/4} hₙ(√c z)`, where `hₙ`
//! is the normalized Hermite function.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermiteGaussMode {
    n: usize,
    c: f64,
}

impl HermiteGaussMode {
    pub fn new(n: usize, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(invalid("c", format!("must be finite and positive, got {c}")));
        }
        Ok(Self { n, c })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Intensity variance `1/(2c)`.
    pub fn variance(&self) -> f64 {
        0.5 / self.c
    }

    /// `(c/π)^{1/4} e^{−cz²/2} Hₙ(√c z) / √(2ⁿ n!)`.
    pub fn eval(&self, z: f64) -> f64 {
        self.c.powf(0.25) * hermite_function(self.n, self.c.sqrt() * z)
    }
}

/// Normalized Hermite function `hₙ(x) = π^{−1/4} e^{−x²/2} Hₙ(x) / √(2ⁿ n!)`.
///
/// The three-term recurrence on `hₙ` itself never forms `Hₙ` or `n!`, so it
/// stays finite for large `n`.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    let h0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n == 0 {
        return h0;
    }
    let mut prev = h0;
    let mut cur = 2f64.sqrt() * x * h0;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Physicists' Hermite polynomial `Hₙ(x)`.
pub fn hermite_polynomial(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}
