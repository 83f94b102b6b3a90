use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::hermite::hermite_polynomial;
use crate::params::SlepianParams;
use crate::quadrature::{integrate_whole_line, WholeLine};

/// Finite-difference settings for user-supplied point spread functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDifference {
    /// Step as a fraction of the PSF width.
    pub step: f64,
    /// Largest accepted change of a derivative when the step is halved,
    /// relative to the largest sampled derivative magnitude.
    pub tolerance: f64,
}

impl Default for FiniteDifference {
    fn default() -> Self {
        Self {
            step: 0.02,
            tolerance: 1e-6,
        }
    }
}

/// Real amplitude point spread function.
#[derive(Clone)]
pub enum Psf {
    /// `(2πσ²)^{−1/4} exp(−t²/(4σ²))`; `σ²` is the variance of `|Ψ|²`.
    Gaussian { sigma: f64 },
    Custom {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        /// Characteristic width, used for step floors.
        width: f64,
        fd: FiniteDifference,
    },
}

impl fmt::Debug for Psf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psf::Gaussian { sigma } => f.debug_struct("Gaussian").field("sigma", sigma).finish(),
            Psf::Custom { width, fd, .. } => f
                .debug_struct("Custom")
                .field("width", width)
                .field("fd", fd)
                .finish_non_exhaustive(),
        }
    }
}

impl Psf {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(invalid("sigma", format!("must be finite and positive, got {sigma}")));
        }
        Ok(Psf::Gaussian { sigma })
    }

    /// Gaussian of width `σ = T/√(2cκ)`; `κ = 1` is the ground Hermite–Gauss mode.
    pub fn gaussian_for(params: SlepianParams, kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(invalid("kappa", format!("must be finite and positive, got {kappa}")));
        }
        Self::gaussian(params.t() / (2.0 * params.c() * kappa).sqrt())
    }

    /// Wraps `f` after checking `∫ℝ f² = 1` to 1e-9.
    pub fn custom(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        width: f64,
        fd: FiniteDifference,
    ) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(invalid("width", "must be finite and positive"));
        }
        let mut policy = WholeLine::for_window(width);
        policy.initial_half_width = width;
        let r = integrate_whole_line(
            |t, out: &mut [f64]| {
                let v = f(t);
                out[0] = v * v;
            },
            1,
            &policy,
        )?;
        if (r.values[0] - 1.0).abs() > 1e-9 {
            return Err(invalid("psf", format!("∫Ψ² = {} is not 1", r.values[0])));
        }
        Ok(Psf::Custom {
            f: Arc::new(f),
            width,
            fd,
        })
    }

    pub fn width(&self) -> f64 {
        match self {
            Psf::Gaussian { sigma } => *sigma,
            Psf::Custom { width, .. } => *width,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Psf::Gaussian { sigma } => {
                (2.0 * PI * sigma * sigma).powf(-0.25) * (-t * t / (4.0 * sigma * sigma)).exp()
            }
            Psf::Custom { f, .. } => f(t),
        }
    }

    /// Fourier transform of `Ψ⁽ⁿ⁾(t − shift)`, when known in closed form.
    pub fn spectrum(&self, n: usize, shift: f64, omega: f64) -> Option<Complex64> {
        match self {
            Psf::Gaussian { sigma } => {
                let mag = (2.0 * PI * sigma * sigma).powf(-0.25)
                    * 2.0
                    * sigma
                    * PI.sqrt()
                    * (-sigma * sigma * omega * omega).exp()
                    * omega.powi(n as i32);
                let rot = Complex64::new(0.0, 1.0).powu(n as u32);
                Some(rot * Complex64::from_polar(mag, -omega * shift))
            }
            Psf::Custom { .. } => None,
        }
    }

    /// `dⁿΨ/dtⁿ` for `n ≤ 3`.
    ///
    /// Gaussian: `(−1)ⁿ (2σ)⁻ⁿ Hₙ(x) Ψ` with `x = t/(2σ)`. Custom: central
    /// differences, one Richardson step.
    pub fn derivative(&self, n: usize, t: f64) -> Result<f64> {
        match self {
            Psf::Gaussian { sigma } => {
                let x = t / (2.0 * sigma);
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                Ok(sign * (2.0 * sigma).powi(-(n as i32)) * hermite_polynomial(n, x) * self.eval(t))
            }
            Psf::Custom { f, fd, width } => {
                if n > 3 {
                    return Err(invalid("n", "finite differences are provided up to order 3"));
                }
                Ok(richardson(f.as_ref(), n, t, fd.step * width))
            }
        }
    }

    /// For custom functions: largest change of the `n`-th derivative between
    /// steps `h` and `h/2` over `points`, relative to the largest magnitude.
    pub(crate) fn check_derivative_noise(&self, n: usize, points: &[f64]) -> Result<()> {
        let Psf::Custom { f, fd, width } = self else {
            return Ok(());
        };
        let h = fd.step * width;
        let (mut noise, mut scale) = (0.0f64, 0.0f64);
        for &t in points {
            let a = richardson(f.as_ref(), n, t, h);
            let b = richardson(f.as_ref(), n, t, h / 2.0);
            noise = noise.max((a - b).abs());
            scale = scale.max(b.abs());
        }
        let relative = if scale > 0.0 { noise / scale } else { noise };
        if relative > fd.tolerance {
            return Err(Error::DerivativeNoise {
                order: n,
                noise: relative,
                tolerance: fd.tolerance,
            });
        }
        Ok(())
    }
}

fn richardson(f: &(dyn Fn(f64) -> f64 + Send + Sync), n: usize, t: f64, h: f64) -> f64 {
    (4.0 * central_difference(f, n, t, h / 2.0) - central_difference(f, n, t, h)) / 3.0
}

fn central_difference(f: &(dyn Fn(f64) -> f64 + Send + Sync), n: usize, t: f64, h: f64) -> f64 {
    match n {
        0 => f(t),
        1 => (f(t + h) - f(t - h)) / (2.0 * h),
        2 => (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h),
        _ => (f(t + 2.0 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2.0 * h)) / (2.0 * h * h * h),
    }
}

/// Two incoherent pulses `ν|Ψ₊⟩⟨Ψ₊| + (1−ν)|Ψ₋⟩⟨Ψ₋|`, `Ψ±(t) = Ψ(t − τ₀ ∓ τ/2)`.
#[derive(Debug, Clone)]
pub struct TwoPulseModel {
    pub psf: Psf,
    pub tau: f64,
    pub tau0: f64,
    pub nu: f64,
}

impl TwoPulseModel {
    pub fn new(psf: Psf, tau: f64, tau0: f64, nu: f64) -> Result<Self> {
        if !tau.is_finite() || !tau0.is_finite() {
            return Err(invalid("tau", "separation and centroid must be finite"));
        }
        if !(0.0..=1.0).contains(&nu) {
            return Err(invalid("nu", format!("must lie in [0, 1], got {nu}")));
        }
        Ok(Self { psf, tau, tau0, nu })
    }

    /// Same PSF, parameters `θ = (τ, τ₀, ν)`.
    pub fn with_theta(&self, theta: &[f64]) -> Result<Self> {
        Self::new(self.psf.clone(), theta[0], theta[1], theta[2])
    }

    pub fn theta(&self) -> [f64; 3] {
        [self.tau, self.tau0, self.nu]
    }

    pub fn psi_plus(&self, t: f64) -> f64 {
        self.psf.eval(t - self.tau0 - self.tau / 2.0)
    }

    pub fn psi_minus(&self, t: f64) -> f64 {
        self.psf.eval(t - self.tau0 + self.tau / 2.0)
    }
}
