//! Gauss–Legendre rules, adaptive Gauss–Kronrod integration and a
//! whole-line integrator that grows its window until the tails are negligible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{invalid, Error, Result};

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes in ascending order. The rule is exactly symmetric: `x[i] == -x[n-1-i]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n / 2;
    for i in 0..half {
        // Tricomi initial guess for the i-th largest root.
        let mut root = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, root);
            let step = p / dp;
            root -= step;
            deriv = dp;
            if step.abs() <= 1e-16 * root.abs().max(1.0) {
                let (_, dp) = legendre_with_derivative(n, root);
                deriv = dp;
                break;
            }
        }
        let weight = 2.0 / ((1.0 - root * root) * deriv * deriv);
        x[n - 1 - i] = root;
        x[i] = -root;
        w[n - 1 - i] = weight;
        w[i] = weight;
    }
    if n % 2 == 1 {
        let (_, dp) = legendre_with_derivative(n, 0.0);
        x[half] = 0.0;
        w[half] = 2.0 / (dp * dp);
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (
        x.iter().map(|xi| mid + half * xi).collect(),
        w.iter().map(|wi| half * wi).collect(),
    )
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances for [`integrate_vec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for QuadTolerance {
    fn default() -> Self {
        Self {
            abs: 1e-14,
            rel: 1e-12,
            max_intervals: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadResult {
    pub values: Vec<f64>,
    /// Sum over intervals of the largest per-component |Kronrod − Gauss|.
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

struct Interval {
    a: f64,
    b: f64,
    values: Vec<f64>,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Error is measured on the first `tracked` components only.
fn kronrod15<F>(f: &mut F, dim: usize, tracked: usize, a: f64, b: f64, scratch: &mut [f64]) -> (Vec<f64>, f64)
where
    F: FnMut(f64, &mut [f64]),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];
    f(center, scratch);
    for d in 0..dim {
        kron[d] = WGK[7] * scratch[d];
        gauss[d] = WG[3] * scratch[d];
    }
    for (k, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        for t in [center - dx, center + dx] {
            f(t, scratch);
            for d in 0..dim {
                kron[d] += wk * scratch[d];
                if k % 2 == 1 {
                    gauss[d] += WG[k / 2] * scratch[d];
                }
            }
        }
    }
    let mut err = 0.0f64;
    for d in 0..dim {
        kron[d] *= half;
        gauss[d] *= half;
        if d < tracked {
            err = err.max((kron[d] - gauss[d]).abs());
        }
    }
    (kron, err)
}

/// Adaptive Gauss–Kronrod integration of a vector-valued integrand over `[a, b]`.
///
/// The integrand writes its `dim` components into the provided slice.
/// Never fails: when the interval budget is exhausted the best estimate is
/// returned with `converged == false`.
pub fn integrate_vec<F>(f: F, dim: usize, a: f64, b: f64, tol: QuadTolerance) -> QuadResult
where
    F: FnMut(f64, &mut [f64]),
{
    integrate_tracked(f, dim, dim, a, b, tol)
}

/// As [`integrate_vec`], but components from `tracked` on are integrated on
/// the same nodes without steering the refinement.
fn integrate_tracked<F>(mut f: F, dim: usize, tracked: usize, a: f64, b: f64, tol: QuadTolerance) -> QuadResult
where
    F: FnMut(f64, &mut [f64]),
{
    let mut scratch = vec![0.0; dim];
    if a == b {
        return QuadResult {
            values: vec![0.0; dim],
            error: 0.0,
            evaluations: 0,
            converged: true,
        };
    }
    let (values, error) = kronrod15(&mut f, dim, tracked, a, b, &mut scratch);
    let mut evaluations = 15;
    let mut total = values.clone();
    let mut total_err = error;
    let mut heap = BinaryHeap::new();
    heap.push(Interval { a, b, values, error });
    let target = |total: &[f64]| {
        let scale = total[..tracked].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        tol.abs.max(tol.rel * scale)
    };
    while total_err > target(&total) && heap.len() < tol.max_intervals {
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let (lv, le) = kronrod15(&mut f, dim, tracked, worst.a, mid, &mut scratch);
        let (rv, re) = kronrod15(&mut f, dim, tracked, mid, worst.b, &mut scratch);
        evaluations += 30;
        for d in 0..dim {
            total[d] += lv[d] + rv[d] - worst.values[d];
        }
        total_err += le + re - worst.error;
        heap.push(Interval { a: worst.a, b: mid, values: lv, error: le });
        heap.push(Interval { a: mid, b: worst.b, values: rv, error: re });
    }
    // Re-sum to shed the drift accumulated by incremental updates.
    let mut values = vec![0.0; dim];
    let mut error = 0.0;
    for iv in heap.iter() {
        for d in 0..dim {
            values[d] += iv.values[d];
        }
        error += iv.error;
    }
    let converged = error <= target(&values);
    QuadResult {
        values,
        error,
        evaluations,
        converged,
    }
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: QuadTolerance) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let r = integrate_vec(|t, out: &mut [f64]| out[0] = f(t), 1, a, b, tol);
    (r.values[0], r.error)
}

/// Truncation policy for integrals over the whole real line.
///
/// The window `[-A, A]` starts at `initial_half_width` and doubles until the
/// absolute contribution of the newly added shells drops below `shell_tol`,
/// never exceeding `max_half_width`. If the cap is reached while the last
/// shell still contributes more than `max_tail`, the integral is rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WholeLine {
    pub initial_half_width: f64,
    pub max_half_width: f64,
    pub shell_tol: f64,
    pub max_tail: f64,
    pub quad: QuadTolerance,
}

impl WholeLine {
    /// Default policy for a time window of half-length `t`: start at 2T,
    /// cap at 20T, stop once a shell adds less than 1e-12.
    pub fn for_window(t: f64) -> Self {
        Self {
            initial_half_width: 2.0 * t,
            max_half_width: 20.0 * t,
            shell_tol: 1e-12,
            max_tail: 1e-6,
            quad: QuadTolerance {
                abs: 1e-15,
                rel: 1e-13,
                max_intervals: 50_000,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WholeLineResult {
    pub values: Vec<f64>,
    /// Half-width of the final window.
    pub half_width: f64,
    /// Largest per-component L1 mass of the outermost shell; serves as the
    /// estimate of the neglected tail.
    pub tail: f64,
    pub quad_error: f64,
    /// True when the shell criterion was met before the cap.
    pub converged: bool,
}

/// Integrates a vector-valued function over ℝ under the given truncation policy.
pub fn integrate_whole_line<F>(mut f: F, dim: usize, policy: &WholeLine) -> Result<WholeLineResult>
where
    F: FnMut(f64, &mut [f64]),
{
    if !(policy.initial_half_width > 0.0) || policy.max_half_width < policy.initial_half_width {
        return Err(invalid(
            "policy",
            "need 0 < initial_half_width <= max_half_width",
        ));
    }
    // Integrate the components together with their absolute values so that
    // shells with cancelling oscillations are not mistaken for empty ones.
    let mut inner = vec![0.0; dim];
    let mut augmented = |t: f64, out: &mut [f64]| {
        f(t, &mut inner);
        for d in 0..dim {
            out[d] = inner[d];
            out[dim + d] = inner[d].abs();
        }
    };
    let mut a = policy.initial_half_width;
    let core = integrate_tracked(&mut augmented, 2 * dim, dim, -a, a, policy.quad);
    let mut values = core.values[..dim].to_vec();
    let mut quad_error = core.error;
    let mut tail = f64::INFINITY;
    let mut converged = false;
    while a < policy.max_half_width {
        let next = (2.0 * a).min(policy.max_half_width);
        let left = integrate_tracked(&mut augmented, 2 * dim, dim, -next, -a, policy.quad);
        let right = integrate_tracked(&mut augmented, 2 * dim, dim, a, next, policy.quad);
        quad_error += left.error + right.error;
        tail = 0.0;
        for d in 0..dim {
            values[d] += left.values[d] + right.values[d];
            tail = tail.max(left.values[dim + d] + right.values[dim + d]);
        }
        a = next;
        if tail < policy.shell_tol {
            converged = true;
            break;
        }
    }
    if !converged && tail > policy.max_tail {
        return Err(Error::QuadratureNonConvergence {
            achieved: tail,
            requested: policy.max_tail,
            half_width: a,
        });
    }
    Ok(WholeLineResult {
        values,
        half_width: a,
        tail,
        quad_error,
        converged,
    })
}
