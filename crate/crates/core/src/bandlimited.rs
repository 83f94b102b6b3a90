//! Functions of time expanded in a prolate basis, and a numerical test of
//! bandlimitedness.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{invalid, Error, Result};
use crate::params::SlepianParams;
use crate::pswf::{band_gram, sinc_kernel, ProlateBasis};
use crate::quadrature::{integrate_whole_line, WholeLine};

/// Coefficients `fₙ` of `f(t) = Σ fₙ ψₙ(c, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandlimitedFunction {
    params: SlepianParams,
    coeffs: Vec<f64>,
}

impl BandlimitedFunction {
    pub fn new(params: SlepianParams, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|x| !x.is_finite()) {
            return Err(invalid("coeffs", "must be finite"));
        }
        Ok(Self { params, coeffs })
    }

    pub fn zero(params: SlepianParams, len: usize) -> Self {
        Self { params, coeffs: vec![0.0; len] }
    }

    pub fn params(&self) -> SlepianParams {
        self.params
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `Σ fₙ²`, the whole-line energy by orthonormality.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|x| x * x).sum()
    }

    fn check_basis(&self, basis: &ProlateBasis) -> Result<()> {
        basis.params().ensure_same(&self.params)?;
        if self.coeffs.len() > basis.extendable_len() {
            let n = self.coeffs.len() - 1;
            return Err(Error::BelowNumericalFloor {
                n,
                lambda: basis.lambdas().get(n).copied().unwrap_or(0.0),
                floor: crate::pswf::EXTENSION_FLOOR,
            });
        }
        Ok(())
    }

    /// Collapses the expansion onto the quadrature nodes:
    /// `f(t) = Σⱼ dⱼ K(t, zⱼ)`.
    pub fn nodal_density(&self, basis: &ProlateBasis) -> Result<Vec<f64>> {
        self.check_basis(basis)?;
        let mut density = vec![0.0; basis.nodes().len()];
        for (n, &g) in self.coeffs.iter().enumerate() {
            if g != 0.0 {
                for (d, e) in density.iter_mut().zip(basis.extension_row(n)) {
                    *d += g * e;
                }
            }
        }
        Ok(density)
    }

    /// `∫ℝ f²` computed from the synthesized function itself (by Plancherel),
    /// not from the coefficients.
    pub fn whole_line_energy(&self, basis: &ProlateBasis) -> Result<f64> {
        let density = self.nodal_density(basis)?;
        Ok(band_gram(&[&density], basis.nodes(), basis.params().omega())[0][0])
    }
}

/// Evaluator for `Σ gₙ ψₙ(t)` at many points.
#[derive(Debug, Clone)]
pub struct Synthesizer {
    nodes: Vec<f64>,
    density: Vec<f64>,
    omega: f64,
}

impl Synthesizer {
    pub fn new(g: &BandlimitedFunction, basis: &ProlateBasis) -> Result<Self> {
        Ok(Self {
            nodes: basis.nodes().to_vec(),
            density: g.nodal_density(basis)?,
            omega: basis.params().omega(),
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.density
            .iter()
            .zip(&self.nodes)
            .map(|(d, &z)| d * sinc_kernel(t, z, self.omega))
            .sum()
    }
}

/// `Σₙ gₙ ψₙ(c, t)`.
pub fn synthesize(g: &BandlimitedFunction, basis: &ProlateBasis, t: f64) -> Result<f64> {
    g.check_basis(basis)?;
    let mut acc = 0.0;
    for (n, &c) in g.coeffs.iter().enumerate() {
        if c != 0.0 {
            acc += c * basis.eval_psi(n, t)?;
        }
    }
    Ok(acc)
}

/// Result of [`project_with`].
#[derive(Debug, Clone)]
pub struct Projection {
    pub function: BandlimitedFunction,
    /// `∫ℝ f²` over the same integration window.
    pub input_energy: f64,
    /// `Σ fₙ²`.
    pub captured_energy: f64,
    /// Largest L1 mass of the last integration shell.
    pub tail: f64,
    pub half_width: f64,
}

impl Projection {
    /// Energy of `f` outside the span of the computed basis functions.
    pub fn discarded_energy(&self) -> f64 {
        (self.input_energy - self.captured_energy).max(0.0)
    }
}

/// Orthogonal projection onto `ψ₀ … ψ_{m−1}` (all extendable indices),
/// `fₙ = ∫ℝ f ψₙ`.
pub fn project<F: Fn(f64) -> f64>(f: F, basis: &ProlateBasis) -> Result<BandlimitedFunction> {
    let policy = WholeLine::for_window(basis.params().t());
    Ok(project_with(f, basis, basis.extendable_len(), &policy)?.function)
}

/// [`project`] onto the first `dim` functions with an explicit integration policy.
///
/// Uses `∫ f ψₙ = Σⱼ eₙⱼ (P_Ω f)(zⱼ)`, where `eₙⱼ` are the extension weights
/// and `(P_Ω f)(z) = ∫ f(t) K(t, z) dt` is the bandlimited part of `f` at the
/// nodes. The integrands are smooth, unlike products with high-order `ψₙ`
/// whose extension carries rounding noise of order `ε/√λₙ`.
pub fn project_with<F: Fn(f64) -> f64>(
    f: F,
    basis: &ProlateBasis,
    dim: usize,
    policy: &WholeLine,
) -> Result<Projection> {
    check_dim(basis, dim)?;
    let nodes = basis.nodes();
    let omega = basis.params().omega();
    let n = nodes.len();
    let r = integrate_whole_line(
        |t, out: &mut [f64]| {
            let v = f(t);
            for (o, &z) in out.iter_mut().zip(nodes) {
                *o = v * sinc_kernel(t, z, omega);
            }
            out[n] = v * v;
        },
        n + 1,
        policy,
    )?;
    let function = from_band_values(basis, dim, &r.values[..n])?;
    Ok(Projection {
        captured_energy: function.energy(),
        input_energy: r.values[n],
        tail: r.tail,
        half_width: r.half_width,
        function,
    })
}

/// Coefficients of the bandlimited part of a real `f` given its Fourier
/// transform `F(ω) = ∫ f(t) e^{−iωt} dt` for `ω ∈ [0, Ω]`.
///
/// `(P_Ω f)(z) = π⁻¹ ∫₀^Ω Re[F(ω) e^{iωz}] dω` is evaluated at the nodes with
/// a fixed composite Gauss–Legendre rule. `extent` bounds the time shift of
/// `f` and sets the number of panels.
pub fn project_spectrum<F: Fn(f64) -> Complex64>(
    spectrum: F,
    basis: &ProlateBasis,
    dim: usize,
    extent: f64,
) -> Result<BandlimitedFunction> {
    check_dim(basis, dim)?;
    if !(extent.is_finite() && extent >= 0.0) {
        return Err(invalid("extent", "must be finite and non-negative"));
    }
    let omega = basis.params().omega();
    let span = basis.params().t() + extent;
    let panels = (omega * span / std::f64::consts::PI).ceil() as usize + 1;
    let (x, w) = crate::quadrature::gauss_legendre(SPECTRAL_PANEL_ORDER);
    let nodes = basis.nodes();
    let mut values = vec![0.0; nodes.len()];
    let width = omega / panels as f64;
    for p in 0..panels {
        let center = (p as f64 + 0.5) * width;
        for (&xi, &wi) in x.iter().zip(&w) {
            let om = center + 0.5 * width * xi;
            let weight = 0.5 * width * wi / std::f64::consts::PI;
            let f = spectrum(om);
            for (v, &z) in values.iter_mut().zip(nodes) {
                let (s, c) = (om * z).sin_cos();
                *v += weight * (f.re * c - f.im * s);
            }
        }
    }
    from_band_values(basis, dim, &values)
}

/// Nodes per panel of [`project_spectrum`]; each panel spans at most half a
/// period of the fastest phase `ω·(T + extent)`.
const SPECTRAL_PANEL_ORDER: usize = 24;

fn check_dim(basis: &ProlateBasis, dim: usize) -> Result<()> {
    if dim > basis.extendable_len() {
        return Err(Error::BelowNumericalFloor {
            n: dim - 1,
            lambda: basis.lambdas().get(dim - 1).copied().unwrap_or(0.0),
            floor: crate::pswf::EXTENSION_FLOOR,
        });
    }
    Ok(())
}

fn from_band_values(basis: &ProlateBasis, dim: usize, values: &[f64]) -> Result<BandlimitedFunction> {
    let coeffs = (0..dim)
        .map(|n| basis.extension_row(n).iter().zip(values).map(|(e, v)| e * v).sum())
        .collect();
    BandlimitedFunction::new(basis.params(), coeffs)
}

/// Coefficients of a function already known to be bandlimited to the basis
/// band, from its values at the quadrature nodes alone:
/// `fₙ = λₙ⁻¹ Σⱼ wⱼ ψₙ(zⱼ) f(zⱼ)`.
pub fn project_bandlimited<F: Fn(f64) -> f64>(
    f: F,
    basis: &ProlateBasis,
    dim: usize,
) -> Result<BandlimitedFunction> {
    check_dim(basis, dim)?;
    let values: Vec<f64> = basis.nodes().iter().map(|&z| f(z)).collect();
    from_band_values(basis, dim, &values)
}

/// Sampling grid controls for [`band_energy_fraction`].
#[derive(Debug, Clone, Copy)]
pub struct BandEnergyPolicy {
    /// Convergence target on the fraction when the grid is refined or widened.
    pub tol: f64,
    pub initial_half_width: f64,
    pub max_samples: usize,
}

impl Default for BandEnergyPolicy {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            initial_half_width: 2.0,
            max_samples: 1 << 22,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BandEnergy {
    pub fraction: f64,
    pub total_energy: f64,
    pub half_width: f64,
    pub step: f64,
}

/// Fraction of the energy of `f` whose spectrum lies in `[−Ω, Ω]`.
///
/// `f` is sampled with step `h` on `[−L, L]` and a smooth cut-off beyond.
/// The in-band energy of the samples is `h² fᵀ K f` with the Toeplitz matrix `K_kl = sin(Ωu)/(πu)`,
/// `u = (k−l)h`, applied by FFT. The step is halved and the window doubled
/// until neither changes the fraction by more than `tol`.
pub fn band_energy_fraction<F: Fn(f64) -> f64>(
    f: F,
    omega: f64,
    policy: &BandEnergyPolicy,
) -> Result<BandEnergy> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(invalid("omega", format!("must be finite and positive, got {omega}")));
    }
    let mut h = std::f64::consts::PI / (4.0 * omega);
    let mut half_width = policy.initial_half_width.max(8.0 * std::f64::consts::PI / omega);
    let mut planner = FftPlanner::new();
    let mut last_change = f64::INFINITY;
    loop {
        let samples = |h: f64, l: f64| 2 * (TAPER_END * l / h).ceil() as usize + 1;
        if samples(h / 2.0, half_width).max(samples(h, 2.0 * half_width)) > policy.max_samples {
            return Err(Error::GridCapExceeded {
                max_samples: policy.max_samples,
                achieved: last_change,
            });
        }
        let base = sampled_fraction(&f, omega, h, half_width, &mut planner);
        let fine = sampled_fraction(&f, omega, h / 2.0, half_width, &mut planner);
        let d_step = (fine.0 - base.0).abs();
        if d_step > policy.tol {
            last_change = d_step;
            h /= 2.0;
            continue;
        }
        let wide = sampled_fraction(&f, omega, h, 2.0 * half_width, &mut planner);
        let d_width = (wide.0 - base.0).abs();
        if d_width > policy.tol {
            last_change = d_width;
            half_width *= 2.0;
            continue;
        }
        return Ok(BandEnergy {
            fraction: fine.0.clamp(0.0, 1.0),
            total_energy: fine.1,
            half_width,
            step: h / 2.0,
        });
    }
}

/// The window falls from 1 at `L` to 0 at `TAPER_END·L`.
const TAPER_END: f64 = 1.25;

/// Smooth step from 1 at `s ≤ 0` to 0 at `s ≥ 1`, flat to all orders at both ends.
fn taper(s: f64) -> f64 {
    if s <= 0.0 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        let a = (-1.0 / (1.0 - s)).exp();
        let b = (-1.0 / s).exp();
        a / (a + b)
    }
}

/// `(in-band fraction, total energy)` of samples of `f`, smoothly cut off
/// past `|t| = L` so that the truncation does not alias.
fn sampled_fraction<F: Fn(f64) -> f64>(
    f: &F,
    omega: f64,
    h: f64,
    half_width: f64,
    planner: &mut FftPlanner<f64>,
) -> (f64, f64) {
    let m = (TAPER_END * half_width / h).ceil() as i64;
    let values: Vec<f64> = (-m..=m)
        .map(|k| {
            let t = k as f64 * h;
            f(t) * taper((t.abs() / half_width - 1.0) / (TAPER_END - 1.0))
        })
        .collect();
    let n = values.len();
    let total: f64 = h * values.iter().map(|v| v * v).sum::<f64>();
    if total == 0.0 {
        return (0.0, 0.0);
    }
    let size = (2 * n).next_power_of_two();
    let mut kernel = vec![Complex64::new(0.0, 0.0); size];
    for k in 0..n {
        let v = sinc_kernel(k as f64 * h, 0.0, omega);
        kernel[k].re = v;
        if k > 0 {
            kernel[size - k].re = v;
        }
    }
    let mut signal = vec![Complex64::new(0.0, 0.0); size];
    for (s, &v) in signal.iter_mut().zip(&values) {
        s.re = v;
    }
    let fft = planner.plan_fft_forward(size);
    let ifft = planner.plan_fft_inverse(size);
    fft.process(&mut kernel);
    fft.process(&mut signal);
    for (s, k) in signal.iter_mut().zip(&kernel) {
        *s *= k;
    }
    ifft.process(&mut signal);
    let scale = 1.0 / size as f64;
    let quad: f64 = values.iter().zip(&signal).map(|(v, s)| v * s.re * scale).sum();
    (h * h * quad / total, total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(c: f64, n_max: usize) -> ProlateBasis {
        ProlateBasis::new(SlepianParams::with_unit_window(c).unwrap(), n_max).unwrap()
    }

    #[test]
    fn single_coefficient_synthesis_is_scaled_psi() {
        let b = basis(5.0, 6);
        let g = BandlimitedFunction::new(b.params(), vec![2.0]).unwrap();
        let s = Synthesizer::new(&g, &b).unwrap();
        for t in [-2.5, 0.0, 0.4, 3.0] {
            let want = 2.0 * b.eval_psi(0, t).unwrap();
            assert!((synthesize(&g, &b, t).unwrap() - want).abs() < 1e-14);
            assert!((s.eval(t) - want).abs() < 1e-13);
        }
    }

    #[test]
    fn mismatched_params_are_rejected() {
        let b = basis(5.0, 4);
        let other = SlepianParams::new(5.0, 2.0).unwrap();
        let g = BandlimitedFunction::new(other, vec![1.0]).unwrap();
        assert!(matches!(synthesize(&g, &b, 0.0), Err(Error::ParamsMismatch { .. })));
    }

    #[test]
    fn zero_projects_to_zero() {
        let b = basis(5.0, 6);
        let g = project(|_| 0.0, &b).unwrap();
        assert!(g.coeffs().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn psi3_projects_to_unit_vector() {
        let b = basis(20.0, 12);
        let g = project(|t| b.eval_psi(3, t).unwrap(), &b).unwrap();
        for (n, &x) in g.coeffs().iter().enumerate() {
            let want = if n == 3 { 1.0 } else { 0.0 };
            assert!((x - want).abs() < 1e-7, "n={n}: {x}");
        }
    }

    #[test]
    fn spectral_and_time_domain_projections_agree() {
        let b = basis(5.0, 10);
        let (sigma, shift) = (0.3f64, 0.2);
        let amp = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25);
        let f = |t: f64| amp * (-(t - shift).powi(2) / (4.0 * sigma * sigma)).exp();
        let spectrum = |w: f64| {
            let mag = amp * 2.0 * sigma * std::f64::consts::PI.sqrt() * (-sigma * sigma * w * w).exp();
            Complex64::from_polar(mag, -w * shift)
        };
        let dim = b.extendable_len();
        let a = project_spectrum(spectrum, &b, dim, shift).unwrap();
        let r = project_with(f, &b, dim, &WholeLine::for_window(1.0)).unwrap();
        for (x, y) in a.coeffs().iter().zip(r.function.coeffs()) {
            assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
        assert!(r.captured_energy <= r.input_energy + 1e-12);
    }

    #[test]
    fn heavy_tails_are_reported() {
        let b = basis(1.0, 3);
        let err = project(|t| 1.0 / (1.0 + t.abs()), &b).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn gaussian_is_not_bandlimited() {
        let c: f64 = 5.0;
        let sigma2 = 0.5 / c;
        let g = |t: f64| (-t * t / (4.0 * sigma2)).exp();
        let r = band_energy_fraction(g, c, &BandEnergyPolicy::default()).unwrap();
        // Spectrum ∝ exp(−σ²ω²), so the in-band fraction is erf(√2 σΩ).
        let want = erf_oracle((2.0 * sigma2).sqrt() * c);
        assert!(r.fraction < 1.0);
        assert!((r.fraction - want).abs() < 1e-9, "{} vs {want}", r.fraction);
    }

    fn erf_oracle(x: f64) -> f64 {
        // Maclaurin series, adequate for x < 3.
        let mut term = x;
        let mut sum = x;
        for k in 1..200 {
            term *= -x * x / k as f64;
            sum += term / (2 * k + 1) as f64;
        }
        sum * 2.0 / std::f64::consts::PI.sqrt()
    }

    #[test]
    fn narrower_band_captures_less() {
        let b = basis(5.0, 6);
        let g = BandlimitedFunction::new(b.params(), vec![1.0]).unwrap();
        let s = Synthesizer::new(&g, &b).unwrap();
        let f = |t: f64| s.eval(t);
        let policy = BandEnergyPolicy { tol: 1e-8, ..Default::default() };
        let full = band_energy_fraction(f, 5.0, &policy).unwrap().fraction;
        let half = band_energy_fraction(f, 2.5, &policy).unwrap().fraction;
        assert!(full > 1.0 - 1e-6, "{full}");
        assert!(half < full);
    }

    #[test]
    fn grid_cap_is_reported() {
        let policy = BandEnergyPolicy { max_samples: 64, ..Default::default() };
        let err = band_energy_fraction(|t| (-t * t).exp(), 1.0, &policy).unwrap_err();
        assert!(matches!(err, Error::GridCapExceeded { .. }));
    }
}
