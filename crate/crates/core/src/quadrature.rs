//! Expectations under the gamma kernel `I(z) = r^s z^(s-1) e^(-rz) / Γ(s)`.
//!
//! The main route is an `n`-point generalized Gauss–Laguerre rule built by
//! Golub–Welsch from the Jacobi matrix of `L_k^(s-1)`. An adaptive
//! Gauss–Kronrod integrator over the density serves as the independent oracle.

use alloc::collections::BinaryHeap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::check;
use crate::function::TestFunction;
use crate::math;
use crate::special::log_gamma;
use crate::sum::Compensated;
use crate::{Error, Result};

/// Largest rule order accepted by [`build_rule`].
pub const MAX_ORDER: usize = 512;

/// Gamma law with the given shape and rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaKernel {
    pub shape: f64,
    pub rate: f64,
}

impl GammaKernel {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        check(shape > 0.0 && shape.is_finite(), "shape", shape)?;
        check(rate > 0.0 && rate.is_finite(), "rate", rate)?;
        Ok(Self { shape, rate })
    }

    /// Kernel of the `κ`-th term: shape `κβ`, rate `ηβ`.
    pub fn for_term(kappa: usize, beta: f64, eta: f64) -> Result<Self> {
        Self::new(kappa as f64 * beta, eta * beta)
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    pub fn std_dev(&self) -> f64 {
        math::sqrt(self.shape) / self.rate
    }

    /// `ln` of the density at `z > 0`.
    pub fn ln_density(&self, z: f64) -> f64 {
        self.shape * math::ln(self.rate) + (self.shape - 1.0) * math::ln(z)
            - self.rate * z
            - log_gamma(self.shape).unwrap_or(f64::INFINITY)
    }
}

/// Gauss rule for the weight `z^(s-1) e^(-z)` on `(0, ∞)`.
///
/// Weights are normalised to sum to one (the raw weights sum to `Γ(s)`, which
/// overflows for large shapes), so `Σ wᵢ zᵢ^j = (s)_j` for `j < 2n`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    /// Generalized Laguerre exponent `s - 1`.
    pub shape_parameter: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl QuadratureRule {
    pub fn shape(&self) -> f64 {
        self.shape_parameter + 1.0
    }

    /// `ln Γ(s)`; multiply the weights by `Γ(s)` to get the classical rule.
    pub fn ln_weight_total(&self) -> f64 {
        log_gamma(self.shape()).unwrap_or(f64::INFINITY)
    }
}

/// Generalized Gauss–Laguerre rule of the given order for shape `s`.
pub fn build_rule(shape: f64, order: usize) -> Result<QuadratureRule> {
    check(shape > 0.0 && shape.is_finite(), "shape", shape)?;
    check((1..=MAX_ORDER).contains(&order), "order", order as f64)?;
    let n = order;
    // Jacobi matrix of the monic L_k^(s-1): a_k = 2k + s, b_k = sqrt(k (k + s - 1)).
    let mut diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + shape).collect();
    let mut off: Vec<f64> = (0..n)
        .map(|k| {
            let k = (k + 1) as f64;
            math::sqrt(k * (k + shape - 1.0))
        })
        .collect();
    off[n - 1] = 0.0;
    let first = tridiagonal_eigen(&mut diag, &mut off)?;
    let mut pairs: Vec<(f64, f64)> = diag.into_iter().zip(first.into_iter().map(|v| v * v)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let mut total = Compensated::default();
    for &(_, w) in &pairs {
        total.add(w);
    }
    let total = total.value();
    let (nodes, weights) = pairs.into_iter().map(|(z, w)| (z, w / total)).unzip();
    Ok(QuadratureRule { shape_parameter: shape - 1.0, nodes, weights, order: n })
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
///
/// `diag` is overwritten by the eigenvalues; `off[i]` couples `i` and `i + 1`.
/// Only the first component of each normalised eigenvector is tracked, which
/// is all Golub–Welsch needs.
fn tridiagonal_eigen(diag: &mut [f64], off: &mut [f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut first = vec![0.0; n];
    first[0] = 1.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = math::abs(diag[m]) + math::abs(diag[m + 1]);
                if math::abs(off[m]) <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::EigenSolver { order: n, index: l });
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = math::hypot(g, 1.0);
            g = diag[m] - diag[l] + off[l] / (g + math::copysign(r, g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = math::hypot(f, g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                let z = first[i + 1];
                first[i + 1] = s * first[i] + c * z;
                first[i] = c * first[i] - s * z;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(first)
}

/// Degree-aware default order: enough nodes to be exact for polynomials,
/// `fallback` otherwise.
pub fn default_order(f: &TestFunction, fallback: usize) -> usize {
    match f.poly_degree() {
        Some(d) => 32usize.max(2 + (d as usize).div_ceil(2)),
        None => fallback,
    }
}

#[cfg(feature = "std")]
mod cache {
    use super::*;
    use std::collections::HashMap;
    use std::sync::{OnceLock, RwLock};

    type Key = (u64, usize);

    static RULES: OnceLock<RwLock<HashMap<Key, Arc<QuadratureRule>>>> = OnceLock::new();

    pub(super) fn get(shape: f64, order: usize) -> Result<Arc<QuadratureRule>> {
        let key = (super::shape_key(shape), order);
        let map = RULES.get_or_init(Default::default);
        if let Some(rule) = map.read().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(Arc::clone(rule));
        }
        // Built outside the lock; a racing duplicate produces an identical rule.
        let rule = Arc::new(build_rule(shape, order)?);
        let mut guard = map.write().unwrap_or_else(|e| e.into_inner());
        Ok(Arc::clone(guard.entry(key).or_insert(rule)))
    }
}

#[cfg(feature = "std")]
fn shape_key(shape: f64) -> u64 {
    let scaled = shape * 1e14;
    if scaled < 9e15 {
        (math::round(scaled) / 1e14).to_bits()
    } else {
        shape.to_bits()
    }
}

/// Rule for `(shape, order)`, shared through a process-wide cache when `std`
/// is enabled.
pub fn cached_rule(shape: f64, order: usize) -> Result<Arc<QuadratureRule>> {
    #[cfg(feature = "std")]
    {
        cache::get(shape, order)
    }
    #[cfg(not(feature = "std"))]
    {
        build_rule(shape, order).map(Arc::new)
    }
}

/// `∫ I(z) Φ(z) dz` by the `order`-point Gauss rule with nodes scaled by the rate.
///
/// Exact up to rounding for polynomial `Φ` of degree below `2 · order`.
/// The integrand must grow slower than `e^(rate · z)`; that is a contract, not
/// a check.
pub fn kernel_expectation(kernel: &GammaKernel, f: &TestFunction, order: usize) -> Result<f64> {
    let rule = cached_rule(kernel.shape, order)?;
    expectation_with_rule(&rule, kernel.rate, f)
}

pub(crate) fn expectation_with_rule(rule: &QuadratureRule, rate: f64, f: &TestFunction) -> Result<f64> {
    let mut acc = Compensated::default();
    for (&z, &w) in rule.nodes.iter().zip(&rule.weights) {
        let at = z / rate;
        let v = f.eval(at);
        if v.is_nan() {
            return Err(Error::NotANumber { at });
        }
        acc.add(w * v);
    }
    Ok(acc.value())
}

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1].
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
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

fn kronrod(g: &impl Fn(f64) -> Result<f64>, a: f64, b: f64) -> Result<Panel> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = g(c)?;
    let mut k = WGK[7] * fc;
    let mut gs = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = g(c - dx)? + g(c + dx)?;
        k += WGK[j] * pair;
        if j % 2 == 1 {
            gs += WG[j / 2] * pair;
        }
    }
    Ok(Panel { a, b, value: k * h, error: math::abs((k - gs) * h) })
}

const MAX_PANELS: usize = 4000;

/// Globally adaptive Gauss–Kronrod integration of `∫ I(z) Φ(z) dz`.
///
/// The half-line is cut at a point past which a Chernoff bound puts the
/// kernel mass below `abs_tol / (1 + sup|Φ|)` (sup over a probe grid). The
/// kept range is pre-split on the kernel's standard deviation so a narrow
/// peak can't be missed. Shapes below one are integrated in `u = (rz)^s`,
/// which removes the `z^(s-1)` singularity.
pub fn kernel_expectation_adaptive(kernel: &GammaKernel, f: &TestFunction, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    check(abs_tol > 0.0, "abs_tol", abs_tol)?;
    check(rel_tol > 0.0, "rel_tol", rel_tol)?;
    let GammaKernel { shape, rate } = *kernel;
    let ln_norm = shape * math::ln(rate) - log_gamma(shape)?;
    let mean = kernel.mean();
    let sd = kernel.std_dev();

    // Chernoff: P(Z > z) <= exp(s - rz + s ln(rz/s)) for z > s/r, and the
    // mirrored bound for z < s/r.
    let chernoff = |z: f64| {
        let rz = rate * z;
        math::exp(shape - rz + shape * math::ln(rz / shape))
    };
    let mut upper = mean + 10.0 * sd + 10.0 / rate;
    let sup_f = |hi: f64| (0..=64).map(|i| math::abs(f.eval(hi * i as f64 / 64.0))).fold(0.0, f64::max);
    let target = |hi: f64| 1e-3 * abs_tol / (1.0 + sup_f(hi));
    while chernoff(upper) > target(upper) {
        upper *= 2.0;
        if upper > 1e12 * (mean + 1.0) {
            break;
        }
    }
    let mut lower = 0.0;
    if shape > 1.0 {
        let mut lo = mean - 10.0 * sd;
        while lo > 0.0 && chernoff(lo) > target(upper) {
            lo -= sd;
        }
        lower = lo.max(0.0);
    }

    let panels: Vec<(f64, f64)>;
    let integrand: alloc::boxed::Box<dyn Fn(f64) -> Result<f64>>;
    if shape < 1.0 {
        // z = u^(1/s) / r turns I(z) dz into e^(-u^(1/s)) du / Γ(s+1).
        let u_max = math::powf(rate * upper, shape);
        let inv_s = 1.0 / shape;
        let ln_g = log_gamma(shape + 1.0)?;
        panels = split(0.0, u_max, 16);
        integrand = alloc::boxed::Box::new(move |u: f64| {
            if u <= 0.0 {
                return Ok(f.eval(0.0) * math::exp(-ln_g));
            }
            let y = math::powf(u, inv_s);
            let v = f.eval(y / rate);
            if v.is_nan() {
                return Err(Error::NotANumber { at: y / rate });
            }
            Ok(v * math::exp(-y - ln_g))
        });
    } else {
        let mut cuts = Vec::new();
        let lo_peak = (mean - 12.0 * sd).max(lower);
        let hi_peak = (mean + 12.0 * sd).min(upper);
        if lo_peak > lower {
            cuts.push((lower, lo_peak));
        }
        cuts.extend(split(lo_peak, hi_peak, 24));
        if upper > hi_peak {
            cuts.extend(split(hi_peak, upper, 8));
        }
        panels = cuts;
        integrand = alloc::boxed::Box::new(move |z: f64| {
            if z <= 0.0 {
                return Ok(if shape == 1.0 { f.eval(0.0) * math::exp(ln_norm) } else { 0.0 });
            }
            let v = f.eval(z);
            if v.is_nan() {
                return Err(Error::NotANumber { at: z });
            }
            Ok(v * math::exp(ln_norm + (shape - 1.0) * math::ln(z) - rate * z))
        });
    }

    let mut heap = BinaryHeap::new();
    for (a, b) in panels {
        heap.push(kronrod(&integrand, a, b)?);
    }
    loop {
        let (mut value, mut error) = (Compensated::default(), 0.0);
        for p in heap.iter() {
            value.add(p.value);
            error += p.error;
        }
        let value = value.value();
        if error <= abs_tol.max(rel_tol * math::abs(value)) {
            return Ok(value);
        }
        if heap.len() >= MAX_PANELS {
            return Err(Error::ToleranceNotMet { estimate: value, error });
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::ToleranceNotMet { estimate: value, error });
        }
        heap.push(kronrod(&integrand, worst.a, mid)?);
        heap.push(kronrod(&integrand, mid, worst.b)?);
    }
}

fn split(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / n as f64;
    (0..n).map(|i| (a + h * i as f64, if i + 1 == n { b } else { a + h * (i + 1) as f64 })).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::pochhammer;
    use approx::assert_relative_eq;

    #[test]
    fn one_point_rule_is_the_mean() {
        let r = build_rule(1.0, 1).unwrap();
        assert_relative_eq!(r.nodes[0], 1.0, max_relative = 1e-15);
        assert_relative_eq!(r.weights[0], 1.0, max_relative = 1e-15);
    }

    /// Roots of L_2(z) = z^2/2 - 2z + 1 by bisection, independent of the eigen-solver.
    #[test]
    fn two_point_laguerre_nodes() {
        let l2 = |z: f64| 0.5 * z * z - 2.0 * z + 1.0;
        let bisect = |mut lo: f64, mut hi: f64| {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if (l2(lo) > 0.0) == (l2(mid) > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let roots = [bisect(0.0, 1.0), bisect(3.0, 4.0)];
        assert_relative_eq!(roots[0], 2.0 - 2f64.sqrt(), max_relative = 1e-14);
        let r = build_rule(1.0, 2).unwrap();
        assert_relative_eq!(r.nodes[0], roots[0], max_relative = 1e-13);
        assert_relative_eq!(r.nodes[1], roots[1], max_relative = 1e-13);
    }

    #[test]
    fn second_moment_shape_two() {
        for n in 2..6 {
            let r = build_rule(2.0, n).unwrap();
            let m2: f64 = r.nodes.iter().zip(&r.weights).map(|(z, w)| w * z * z).sum();
            assert_relative_eq!(m2, 6.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn rules_reproduce_rising_factorials() {
        for &shape in &[0.5, 0.98, 1.0, 2.5, 19.6, 250.0, 4900.0] {
            for &n in &[1usize, 3, 8, 16, 32, 64] {
                let r = build_rule(shape, n).unwrap();
                assert!(r.nodes.windows(2).all(|p| p[0] < p[1]));
                assert!(r.nodes[0] > 0.0);
                assert!(r.weights.iter().all(|&w| w > 0.0));
                for j in 0..(2 * n as u32).min(24) {
                    let q: f64 = r.nodes.iter().zip(&r.weights).map(|(z, w)| w * z.powi(j as i32)).sum();
                    let exact = pochhammer(shape, j);
                    assert_relative_eq!(q, exact, max_relative = 1e-10);
                }
            }
        }
    }

    #[test]
    fn build_rule_validates() {
        assert!(build_rule(0.0, 4).is_err());
        assert!(build_rule(1.0, 0).is_err());
        assert!(build_rule(1.0, MAX_ORDER + 1).is_err());
        assert!(build_rule(3.0, MAX_ORDER).is_ok());
    }

    #[test]
    fn expectation_matches_monomial_moments() {
        let one = TestFunction::monomial(0);
        let k = GammaKernel::for_term(2, 1.0, 4.0).unwrap();
        assert_relative_eq!(kernel_expectation(&k, &one, 32).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(
            kernel_expectation(&k, &TestFunction::monomial(2), 32).unwrap(),
            0.375,
            max_relative = 1e-13
        );
        let k = GammaKernel::for_term(1, 2.0, 1.0).unwrap();
        assert_relative_eq!(kernel_expectation(&k, &TestFunction::monomial(1), 32).unwrap(), 1.0, max_relative = 1e-13);
    }

    #[test]
    fn adaptive_matches_gauss_and_closed_form() {
        let f = TestFunction::xexp5();
        let k = GammaKernel::for_term(3, 0.98, 25.0).unwrap();
        let g = kernel_expectation(&k, &f, 64).unwrap();
        let a = kernel_expectation_adaptive(&k, &f, 1e-14, 1e-12).unwrap();
        // E[z e^{-5z}] = (s/r) (r/(r+5))^(s+1)
        let (s, r) = (k.shape, k.rate);
        let exact = s / r * (r / (r + 5.0)).powf(s + 1.0);
        assert!((g - a).abs() <= 1e-10, "{g} vs {a}");
        assert_relative_eq!(g, exact, max_relative = 1e-12);
    }

    #[test]
    fn adaptive_handles_small_and_large_shapes() {
        for &(shape, rate) in &[(0.5, 12.5), (0.98, 24.5), (1.0, 3.0), (500.0, 1000.0), (6000.0, 1000.0)] {
            let k = GammaKernel::new(shape, rate).unwrap();
            for j in 0..=4u32 {
                let a = kernel_expectation_adaptive(&k, &TestFunction::monomial(j), 1e-13, 1e-12).unwrap();
                let exact = pochhammer(shape, j) / rate.powi(j as i32);
                assert_relative_eq!(a, exact, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn nan_integrand_is_an_error() {
        let f = TestFunction::new("nan", |_| f64::NAN);
        let k = GammaKernel::new(2.0, 1.0).unwrap();
        assert!(matches!(kernel_expectation(&k, &f, 8), Err(Error::NotANumber { .. })));
        assert!(matches!(kernel_expectation_adaptive(&k, &f, 1e-8, 1e-8), Err(Error::NotANumber { .. })));
    }
}
