//! Prolate spheroidal wave functions from the sinc-kernel integral equation.
//!
//! The operator `(Kψ)(t) = ∫_{-T}^{T} sin[Ω(t−z)] / [π(t−z)] ψ(z) dz` is
//! discretized with a Gauss–Legendre rule (Nyström method). Because the
//! kernel and the window are symmetric, the discretized operator splits into
//! an even and an odd block which are diagonalized separately; this keeps the
//! parity of every eigenfunction exact.
//!
//! For large `c` the leading eigenvalues agree with one to machine precision
//! and a dense eigensolver cannot tell the eigenvectors apart. Such clusters
//! are resolved with the prolate differential operator
//! `L = −d/dt (T² − t²) d/dt + Ω² t²`, which commutes with the integral
//! operator and has a well separated spectrum.
//!
//! Sign convention: `sign ψₙ(0) = (−1)^{n/2}` for even `n` and
//! `sign ψₙ'(0) = (−1)^{(n−1)/2}` for odd `n`, the same convention as the
//! Hermite–Gauss modes, so that `ψₙ ≈ ψₙᴴᴳ` for large `c` holds with signs.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Error, Result};
use crate::params::SlepianParams;
use crate::quadrature::{gauss_legendre_on, integrate_vec, QuadTolerance};

/// Eigenvalues below this are reported but their eigenfunctions cannot be
/// extended off the grid (the extension divides by `λₙ`).
pub const EXTENSION_FLOOR: f64 = 1e-13;

/// Eigenvalues below this multiple of machine epsilon are indistinguishable from 0.
const ZERO_FLOOR: f64 = 64.0 * f64::EPSILON;

/// Same-parity eigenvalues closer than this are resolved with the differential operator.
const CLUSTER_GAP: f64 = 1e-8;

/// Eigenvalues of opposite parity closer than this are ordered by the
/// differential operator instead of by value.
const TIE_GAP: f64 = 1e-12;

/// Near-degeneracy only arises where eigenvalues crowd towards one.
const CLUSTER_REGION: f64 = 0.5;

/// `sin[Ω(t − z)] / [π(t − z)]`, with the analytic limit `Ω/π` on the diagonal.
pub fn sinc_kernel(t: f64, z: f64, omega: f64) -> f64 {
    let u = t - z;
    let x = omega * u;
    if x.abs() < 1e-4 {
        omega / PI * (1.0 - x * x / 6.0)
    } else {
        x.sin() / (PI * u)
    }
}

/// `∂/∂t` of [`sinc_kernel`].
pub fn sinc_kernel_dt(t: f64, z: f64, omega: f64) -> f64 {
    let u = t - z;
    let x = omega * u;
    let scale = omega * omega / PI;
    if x.abs() < 1e-2 {
        let x2 = x * x;
        scale * x * (-1.0 / 3.0 + x2 * (1.0 / 30.0 + x2 * (-1.0 / 840.0 + x2 / 45_360.0)))
    } else {
        scale * (x * x.cos() - x.sin()) / (x * x)
    }
}

/// Smallest admissible quadrature order for a basis up to `n_max`.
pub fn default_quad_order(c: f64, n_max: usize) -> usize {
    (4 * n_max).max((4.0 * c).ceil() as usize).max(64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Parity {
    Even,
    Odd,
}

struct EigenPair {
    lambda: f64,
    /// Unit eigenvector of the symmetrized Nyström matrix on the full grid.
    vector: Vec<f64>,
    parity: Parity,
}

/// A computed family `ψ₀ … ψ_{n_max}` with eigenvalues and the quadrature
/// grid needed to evaluate the eigenfunctions anywhere on ℝ.
///
/// Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ProlateBasis {
    params: SlepianParams,
    n_max: usize,
    quad_order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    lambdas: Vec<f64>,
    /// `samples[n][j] = ψₙ(zⱼ)`.
    samples: Vec<Vec<f64>>,
    /// `extension[n][j] = wⱼ ψₙ(zⱼ) / λₙ`; rows past `extendable` are unused.
    extension: Vec<Vec<f64>>,
    extendable: usize,
}

impl ProlateBasis {
    /// Builds the basis with the default quadrature order.
    pub fn new(params: SlepianParams, n_max: usize) -> Result<Self> {
        build_basis(params, n_max, default_quad_order(params.c(), n_max))
    }

    /// Builds every index whose eigenvalue is above [`EXTENSION_FLOOR`],
    /// raising the quadrature order until it covers `4·n_max`.
    pub fn extendable_family(params: SlepianParams) -> Result<Self> {
        let mut n_guess = crate::params::plunge_index(params.c()) + 8;
        loop {
            let order = default_quad_order(params.c(), n_guess);
            let pairs = solve(params, order)?;
            let count = pairs.iter().take_while(|p| p.lambda >= EXTENSION_FLOOR).count();
            let n_max = count.max(1) - 1;
            if 4 * n_max <= order {
                return build_basis(params, n_max, order);
            }
            n_guess = n_max;
        }
    }

    pub fn params(&self) -> SlepianParams {
        self.params
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn len(&self) -> usize {
        self.n_max + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn lambda(&self, n: usize) -> f64 {
        self.lambdas[n]
    }

    /// `ψₙ` sampled at the quadrature nodes.
    pub fn samples(&self, n: usize) -> &[f64] {
        &self.samples[n]
    }

    /// Number of leading indices whose eigenfunctions can be evaluated off-grid.
    pub fn extendable_len(&self) -> usize {
        self.extendable
    }

    pub fn is_extendable(&self, n: usize) -> bool {
        n < self.extendable
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            return Err(Error::IndexOutOfRange { n, n_max: self.n_max });
        }
        if !self.is_extendable(n) {
            return Err(Error::BelowNumericalFloor {
                n,
                lambda: self.lambdas[n],
                floor: EXTENSION_FLOOR,
            });
        }
        Ok(())
    }

    /// `ψₙ(t)` for any real `t`, via `ψₙ(t) = λₙ⁻¹ Σⱼ wⱼ K(t, zⱼ) ψₙ(zⱼ)`.
    pub fn eval_psi(&self, n: usize, t: f64) -> Result<f64> {
        self.check_index(n)?;
        let omega = self.params.omega();
        Ok(self.extension[n]
            .iter()
            .zip(&self.nodes)
            .map(|(e, &z)| e * sinc_kernel(t, z, omega))
            .sum())
    }

    /// `dψₙ/dt` at any real `t`.
    pub fn eval_psi_derivative(&self, n: usize, t: f64) -> Result<f64> {
        self.check_index(n)?;
        let omega = self.params.omega();
        Ok(self.extension[n]
            .iter()
            .zip(&self.nodes)
            .map(|(e, &z)| e * sinc_kernel_dt(t, z, omega))
            .sum())
    }

    /// Writes `ψ₀(t) … ψ_{m−1}(t)` into `out`, `m = out.len() ≤ extendable_len()`.
    pub fn eval_all(&self, t: f64, out: &mut [f64]) {
        assert!(out.len() <= self.extendable, "requested non-extendable indices");
        let omega = self.params.omega();
        let kernel: Vec<f64> = self.nodes.iter().map(|&z| sinc_kernel(t, z, omega)).collect();
        for (o, row) in out.iter_mut().zip(&self.extension) {
            *o = row.iter().zip(&kernel).map(|(a, b)| a * b).sum();
        }
    }

    /// Weights `wⱼ ψₙ(zⱼ) / λₙ` turning kernel values at the nodes into `ψₙ(t)`.
    pub(crate) fn extension_row(&self, n: usize) -> &[f64] {
        &self.extension[n]
    }

    /// Gram matrix `∫ℝ ψₙψₘ` for `n, m < dim`, evaluated by Plancherel.
    ///
    /// The extended eigenfunctions are exact finite sums of sinc kernels, so
    /// their Fourier transforms are supported on `[−Ω, Ω]` and the whole-line
    /// integral becomes an integral over the band.
    pub fn whole_line_gram(&self, dim: usize) -> Result<Vec<Vec<f64>>> {
        if dim > self.extendable {
            return Err(Error::BelowNumericalFloor {
                n: dim - 1,
                lambda: self.lambdas[(dim - 1).min(self.n_max)],
                floor: EXTENSION_FLOOR,
            });
        }
        let rows: Vec<&[f64]> = (0..dim).map(|n| self.extension_row(n)).collect();
        Ok(band_gram(&rows, &self.nodes, self.params.omega()))
    }

    /// Gram matrix `∫_{−T}^{T} ψₙψₘ` for `n, m < dim`, by adaptive quadrature
    /// of the extended eigenfunctions (independent of the Nyström grid).
    pub fn window_gram(&self, dim: usize) -> Result<Vec<Vec<f64>>> {
        if dim > self.extendable {
            return Err(Error::BelowNumericalFloor {
                n: dim - 1,
                lambda: self.lambdas[(dim - 1).min(self.n_max)],
                floor: EXTENSION_FLOOR,
            });
        }
        let t = self.params.t();
        let mut psi = vec![0.0; dim];
        let r = integrate_vec(
            |x, out: &mut [f64]| {
                self.eval_all(x, &mut psi);
                for i in 0..dim {
                    for j in 0..dim {
                        out[i * dim + j] = psi[i] * psi[j];
                    }
                }
            },
            dim * dim,
            -t,
            t,
            QuadTolerance {
                abs: 1e-15,
                rel: 1e-14,
                max_intervals: 10_000,
            },
        );
        Ok((0..dim).map(|i| r.values[i * dim..(i + 1) * dim].to_vec()).collect())
    }

    pub(crate) fn from_parts(
        params: SlepianParams,
        n_max: usize,
        quad_order: usize,
        nodes: Vec<f64>,
        weights: Vec<f64>,
        lambdas: Vec<f64>,
        samples: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = nodes.len();
        if weights.len() != n || lambdas.len() != n_max + 1 || samples.len() != n_max + 1 {
            return Err(Error::DimensionMismatch(format!(
                "basis with {n} nodes, {} weights, {} eigenvalues, {} sample rows for n_max={n_max}",
                weights.len(),
                lambdas.len(),
                samples.len()
            )));
        }
        if samples.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch("sample row length differs from node count".into()));
        }
        let extendable = lambdas.iter().take_while(|&&l| l >= EXTENSION_FLOOR).count();
        let extension = samples
            .iter()
            .zip(&lambdas)
            .map(|(row, &lambda)| {
                row.iter()
                    .zip(&weights)
                    .map(|(s, w)| if lambda > 0.0 { w * s / lambda } else { 0.0 })
                    .collect()
            })
            .collect();
        Ok(Self {
            params,
            n_max,
            quad_order,
            nodes,
            weights,
            lambdas,
            samples,
            extension,
            extendable,
        })
    }
}

/// `(1/π) ∫₀^Ω Re[f̂ conj ĝ] dω` for functions given by extension rows
/// `f(t) = Σⱼ rowⱼ K(t, zⱼ)`, whose spectra are `Σⱼ rowⱼ e^{−iωzⱼ}` on the band.
pub(crate) fn band_gram(rows: &[&[f64]], nodes: &[f64], omega: f64) -> Vec<Vec<f64>> {
    let dim = rows.len();
    let mut cos_part = vec![0.0; dim];
    let mut sin_part = vec![0.0; dim];
    let mut sines = vec![0.0; nodes.len()];
    let mut cosines = vec![0.0; nodes.len()];
    let r = integrate_vec(
        |w, out: &mut [f64]| {
            for (j, &z) in nodes.iter().enumerate() {
                let (s, c) = (w * z).sin_cos();
                sines[j] = s;
                cosines[j] = c;
            }
            for (k, row) in rows.iter().enumerate() {
                let (mut cs, mut sn) = (0.0, 0.0);
                for ((&e, &c), &s) in row.iter().zip(&cosines).zip(&sines) {
                    cs += e * c;
                    sn += e * s;
                }
                cos_part[k] = cs;
                sin_part[k] = sn;
            }
            for i in 0..dim {
                for j in 0..dim {
                    out[i * dim + j] = cos_part[i] * cos_part[j] + sin_part[i] * sin_part[j];
                }
            }
        },
        dim * dim,
        0.0,
        omega,
        QuadTolerance {
            abs: 1e-15,
            rel: 1e-13,
            max_intervals: 10_000,
        },
    );
    (0..dim)
        .map(|i| r.values[i * dim..(i + 1) * dim].iter().map(|v| v / PI).collect())
        .collect()
}

/// Solves the discretized integral equation and returns the basis `ψ₀ … ψ_{n_max}`.
///
/// Fails when `quad_order` is below [`default_quad_order`], when the
/// requested `n_max` reaches eigenvalues that are numerically zero, or when
/// two eigenvalues cannot be separated.
pub fn build_basis(params: SlepianParams, n_max: usize, quad_order: usize) -> Result<ProlateBasis> {
    let min_order = default_quad_order(params.c(), n_max);
    if quad_order < min_order {
        return Err(invalid(
            "quad_order",
            format!("{quad_order} is below the minimum {min_order} for c={} and n_max={n_max}", params.c()),
        ));
    }
    let pairs = solve(params, quad_order)?;
    let available = pairs.iter().take_while(|p| p.lambda > ZERO_FLOOR).count();
    if n_max >= available {
        return Err(Error::InsufficientSpectrum {
            requested: n_max,
            available,
        });
    }
    let order = quad_order + quad_order % 2;
    let (nodes, weights) = gauss_legendre_on(order, -params.t(), params.t());
    let omega = params.omega();
    let mut lambdas = Vec::with_capacity(n_max + 1);
    let mut samples = Vec::with_capacity(n_max + 1);
    for (n, pair) in pairs.into_iter().take(n_max + 1).enumerate() {
        let expected = if n % 2 == 0 { Parity::Even } else { Parity::Odd };
        if pair.parity != expected {
            return Err(Error::Degenerate {
                first: n.saturating_sub(1),
                second: n,
                gap: 0.0,
            });
        }
        // Sign of ψ(0) or ψ'(0), computed from the Nyström extension.
        let probe: f64 = match pair.parity {
            Parity::Even => nodes
                .iter()
                .zip(&weights)
                .zip(&pair.vector)
                .map(|((&z, &w), &v)| w.sqrt() * v * sinc_kernel(0.0, z, omega))
                .sum(),
            Parity::Odd => nodes
                .iter()
                .zip(&weights)
                .zip(&pair.vector)
                .map(|((&z, &w), &v)| w.sqrt() * v * sinc_kernel_dt(0.0, z, omega))
                .sum(),
        };
        let wanted = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let flip = if probe * wanted < 0.0 { -1.0 } else { 1.0 };
        let scale = flip * pair.lambda.sqrt();
        samples.push(
            pair.vector
                .iter()
                .zip(&weights)
                .map(|(v, w)| scale * v / w.sqrt())
                .collect(),
        );
        lambdas.push(pair.lambda);
    }
    ProlateBasis::from_parts(params, n_max, quad_order, nodes, weights, lambdas, samples)
}

/// All eigenpairs of the discretized operator, ordered by decreasing
/// eigenvalue (ties ordered by the differential operator).
fn solve(params: SlepianParams, quad_order: usize) -> Result<Vec<EigenPair>> {
    let order = quad_order + quad_order % 2;
    let t = params.t();
    let omega = params.omega();
    let (nodes, weights) = gauss_legendre_on(order, -t, t);
    let half = order / 2;
    let pos = &nodes[half..];
    let pos_w = &weights[half..];
    let sqrt_w: Vec<f64> = pos_w.iter().map(|w| w.sqrt()).collect();

    let mut pairs = Vec::with_capacity(order);
    for parity in [Parity::Even, Parity::Odd] {
        let sign = if parity == Parity::Even { 1.0 } else { -1.0 };
        let block = DMatrix::from_fn(half, half, |i, j| {
            sqrt_w[i]
                * (sinc_kernel(pos[i], pos[j], omega) + sign * sinc_kernel(pos[i], -pos[j], omega))
                * sqrt_w[j]
        });
        let eig = SymmetricEigen::new(block);
        let mut block_pairs: Vec<EigenPair> = (0..half)
            .map(|k| {
                let col = eig.eigenvectors.column(k);
                let mut v = vec![0.0; order];
                for i in 0..half {
                    let u = col[i] * std::f64::consts::FRAC_1_SQRT_2;
                    v[half + i] = u;
                    v[half - 1 - i] = sign * u;
                }
                EigenPair {
                    lambda: eig.eigenvalues[k],
                    vector: v,
                    parity,
                }
            })
            .collect();
        block_pairs.sort_by(|a, b| b.lambda.total_cmp(&a.lambda));
        resolve_clusters(&mut block_pairs, &nodes, &weights, t, omega)?;
        pairs.extend(block_pairs);
    }
    pairs.sort_by(|a, b| b.lambda.total_cmp(&a.lambda));
    order_near_ties(&mut pairs, &nodes, &weights, t, omega)?;
    // The window energy of a unit-norm function cannot reach one.
    let below_one = 1.0 - f64::EPSILON / 2.0;
    for p in pairs.iter_mut() {
        p.lambda = p.lambda.min(below_one);
    }
    Ok(pairs)
}

/// Matrix of the prolate differential operator between window-normalized
/// eigenvectors, `∫ (T²−t²) φₐ' φ_b' + Ω² t² φₐ φ_b`, on the Nyström grid.
fn prolate_operator_matrix(
    vectors: &[&[f64]],
    lambdas: &[f64],
    nodes: &[f64],
    weights: &[f64],
    t: f64,
    omega: f64,
) -> DMatrix<f64> {
    let n = nodes.len();
    let k = vectors.len();
    let values: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| v.iter().zip(weights).map(|(x, w)| x / w.sqrt()).collect())
        .collect();
    let derivs: Vec<Vec<f64>> = values
        .iter()
        .zip(lambdas)
        .map(|(phi, &lambda)| {
            (0..n)
                .map(|i| {
                    let s: f64 = (0..n)
                        .map(|j| weights[j] * sinc_kernel_dt(nodes[i], nodes[j], omega) * phi[j])
                        .sum();
                    s / lambda
                })
                .collect()
        })
        .collect();
    let mut m = DMatrix::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let s: f64 = (0..n)
                .map(|i| {
                    let z = nodes[i];
                    weights[i]
                        * ((t * t - z * z) * derivs[a][i] * derivs[b][i]
                            + omega * omega * z * z * values[a][i] * values[b][i])
                })
                .sum();
            m[(a, b)] = s;
            m[(b, a)] = s;
        }
    }
    m
}

/// Within one parity block, rotates runs of numerically equal eigenvalues
/// onto eigenvectors of the prolate differential operator.
fn resolve_clusters(
    pairs: &mut [EigenPair],
    nodes: &[f64],
    weights: &[f64],
    t: f64,
    omega: f64,
) -> Result<()> {
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len()
            && pairs[end].lambda > CLUSTER_REGION
            && pairs[end - 1].lambda - pairs[end].lambda < CLUSTER_GAP
        {
            end += 1;
        }
        if end - start > 1 {
            rotate_cluster(&mut pairs[start..end], nodes, weights, t, omega)?;
        }
        start = end;
    }
    Ok(())
}

fn rotate_cluster(
    cluster: &mut [EigenPair],
    nodes: &[f64],
    weights: &[f64],
    t: f64,
    omega: f64,
) -> Result<()> {
    let k = cluster.len();
    let lambdas: Vec<f64> = cluster.iter().map(|p| p.lambda).collect();
    let vectors: Vec<&[f64]> = cluster.iter().map(|p| p.vector.as_slice()).collect();
    let m = prolate_operator_matrix(&vectors, &lambdas, nodes, weights, t, omega);
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    check_separated(&order, |i| eig.eigenvalues[i])?;
    let n = nodes.len();
    let rotated: Vec<Vec<f64>> = order
        .iter()
        .map(|&col| {
            let mut v = vec![0.0; n];
            for (a, p) in cluster.iter().enumerate() {
                let q = eig.eigenvectors[(a, col)];
                for (vi, pi) in v.iter_mut().zip(&p.vector) {
                    *vi += q * pi;
                }
            }
            v
        })
        .collect();
    let mut sorted = lambdas;
    sorted.sort_by(|a, b| b.total_cmp(a));
    for ((p, v), l) in cluster.iter_mut().zip(rotated).zip(sorted) {
        p.vector = v;
        p.lambda = l;
    }
    Ok(())
}

/// Across parities, orders runs of numerically equal eigenvalues by the
/// Rayleigh quotient of the differential operator.
fn order_near_ties(
    pairs: &mut [EigenPair],
    nodes: &[f64],
    weights: &[f64],
    t: f64,
    omega: f64,
) -> Result<()> {
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len()
            && pairs[end].lambda > CLUSTER_REGION
            && pairs[end - 1].lambda - pairs[end].lambda < TIE_GAP
        {
            end += 1;
        }
        if end - start > 1 {
            let run = &mut pairs[start..end];
            let chi: Vec<f64> = run
                .iter()
                .map(|p| {
                    prolate_operator_matrix(&[&p.vector], &[p.lambda], nodes, weights, t, omega)[(0, 0)]
                })
                .collect();
            let mut idx: Vec<usize> = (0..run.len()).collect();
            idx.sort_by(|&a, &b| chi[a].total_cmp(&chi[b]));
            check_separated(&idx, |i| chi[i]).map_err(|e| match e {
                Error::Degenerate { first, second, gap } => Error::Degenerate {
                    first: first + start,
                    second: second + start,
                    gap,
                },
                other => other,
            })?;
            let mut lambdas: Vec<f64> = run.iter().map(|p| p.lambda).collect();
            lambdas.sort_by(|a, b| b.total_cmp(a));
            let mut taken: Vec<Option<EigenPair>> = run
                .iter_mut()
                .map(|p| {
                    Some(EigenPair {
                        lambda: p.lambda,
                        vector: std::mem::take(&mut p.vector),
                        parity: p.parity,
                    })
                })
                .collect();
            for (slot, (&i, l)) in run.iter_mut().zip(idx.iter().zip(lambdas)) {
                let mut p = taken[i].take().expect("each index used once");
                p.lambda = l;
                *slot = p;
            }
        }
        start = end;
    }
    Ok(())
}

fn check_separated(order: &[usize], value: impl Fn(usize) -> f64) -> Result<()> {
    for w in order.windows(2) {
        let (a, b) = (value(w[0]), value(w[1]));
        let gap = b - a;
        if gap < 1e-6 * a.abs().max(b.abs()).max(1.0) {
            return Err(Error::Degenerate {
                first: w[0],
                second: w[1],
                gap,
            });
        }
    }
    Ok(())
}

/// Table of `(c, λ₀(c))` over the given grid (unit window).
pub fn lambda0_curve(c_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    c_grid
        .iter()
        .map(|&c| {
            let basis = ProlateBasis::new(SlepianParams::with_unit_window(c)?, 0)?;
            Ok((c, basis.lambda(0)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(c: f64) -> SlepianParams {
        SlepianParams::with_unit_window(c).unwrap()
    }

    #[test]
    fn kernel_diagonal_limit() {
        assert_eq!(sinc_kernel(0.3, 0.3, 5.0), 5.0 / PI);
    }

    #[test]
    fn kernel_vanishes_at_sine_zeros() {
        for k in [1.0, 2.0, -3.0] {
            let t = k * PI / 5.0;
            assert!(sinc_kernel(t, 0.0, 5.0).abs() < 1e-15);
        }
    }

    #[test]
    fn kernel_is_symmetric() {
        assert_eq!(sinc_kernel(0.1, 0.7, 5.0), sinc_kernel(0.7, 0.1, 5.0));
    }

    #[test]
    fn kernel_derivative_matches_finite_difference() {
        let omega = 7.0;
        for u in [1e-6, 1e-3, 5e-3, 2e-2, 0.3, 2.0] {
            let h = 1e-6;
            let fd = (sinc_kernel(u + h, 0.0, omega) - sinc_kernel(u - h, 0.0, omega)) / (2.0 * h);
            let an = sinc_kernel_dt(u, 0.0, omega);
            assert!((fd - an).abs() < 1e-6, "u={u}: {fd} vs {an}");
        }
    }

    #[test]
    fn lambda0_at_c5() {
        let b = ProlateBasis::new(unit(5.0), 8).unwrap();
        assert!(b.lambda(0) > 0.998 && b.lambda(0) < 1.0);
    }

    #[test]
    fn spectrum_strictly_decreasing_in_unit_interval() {
        for c in [0.5, 1.0, 3.0, 8.0] {
            let b = ProlateBasis::new(unit(c), 4).unwrap();
            for w in b.lambdas().windows(2) {
                assert!(w[0] > w[1]);
            }
            assert!(b.lambdas().iter().all(|&l| l > 0.0 && l < 1.0));
        }
    }

    #[test]
    fn odd_functions_vanish_at_origin_and_signs_follow_hermite_convention() {
        let b = ProlateBasis::new(unit(5.0), 7).unwrap();
        for n in 0..=7 {
            if n % 2 == 1 {
                assert!(b.eval_psi(n, 0.0).unwrap().abs() < 1e-12);
                let d = b.eval_psi_derivative(n, 0.0).unwrap();
                assert_eq!(d > 0.0, (n / 2) % 2 == 0, "n={n}");
            } else {
                let v = b.eval_psi(n, 0.0).unwrap();
                assert_eq!(v > 0.0, (n / 2) % 2 == 0, "n={n}");
            }
        }
    }

    #[test]
    fn rejects_low_quadrature_order_and_bad_index() {
        assert!(build_basis(unit(5.0), 8, 16).is_err());
        let err = build_basis(unit(1.0), 40, 200).unwrap_err();
        assert!(matches!(err, Error::InsufficientSpectrum { .. }));
        let b = ProlateBasis::new(unit(1.0), 3).unwrap();
        assert!(matches!(b.eval_psi(4, 0.0), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn floor_indices_are_flagged() {
        let b = ProlateBasis::new(unit(2.0), 8).unwrap();
        assert!(b.lambda(8) < EXTENSION_FLOOR);
        assert!(!b.is_extendable(8));
        assert!(b.is_extendable(7));
        assert!(matches!(b.eval_psi(8, 0.3), Err(Error::BelowNumericalFloor { .. })));
    }

    #[test]
    fn large_c_cluster_is_resolved() {
        // Leading eigenvalues equal one to machine precision here.
        let b = ProlateBasis::new(unit(50.0), 6).unwrap();
        for n in 0..=6 {
            let v0 = b.eval_psi(n, 0.0).unwrap();
            let d0 = b.eval_psi_derivative(n, 0.0).unwrap();
            if n % 2 == 0 {
                assert!(d0.abs() < 1e-8);
                assert_eq!(v0 > 0.0, (n / 2) % 2 == 0);
            } else {
                assert!(v0.abs() < 1e-10);
            }
        }
    }
}
