//! Generalized Laguerre polynomials at non-positive arguments, the mixture
//! weights built from them, and the gamma-function helpers.

use alloc::vec::Vec;

use crate::error::check;
use crate::math;
use crate::operators::OperatorParams;
use crate::sum::Compensated;
use crate::{Error, Result};

/// Hard cap on the number of weight terms before truncation gives up.
pub const DEFAULT_MAX_TERMS: usize = 1_000_000;

/// Default truncation mass for the weight series.
pub const DEFAULT_TRUNCATION_EPS: f64 = 1e-12;

const LN_2: f64 = core::f64::consts::LN_2;

/// Order and evaluation point of `L_κ^(α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreParams {
    pub alpha: f64,
    pub argument: f64,
}

impl LaguerreParams {
    pub fn new(alpha: f64, argument: f64) -> Result<Self> {
        check(alpha > -1.0 && alpha.is_finite(), "alpha", alpha)?;
        check(argument.is_finite(), "argument", argument)?;
        Ok(Self { alpha, argument })
    }
}

/// `L_κ^(α)(t)` by the forward three-term recurrence.
///
/// Forward recurrence is stable for `t <= 0`, where every term of the explicit
/// sum is positive. Returns [`Error::Overflow`] once the value leaves the `f64`
/// range; [`log_weight`] never overflows.
pub fn laguerre_eval(params: &LaguerreParams, degree: usize) -> Result<f64> {
    let LaguerreParams { alpha, argument: t } = *params;
    check(alpha > -1.0, "alpha", alpha)?;
    if degree == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - t;
    for k in 1..degree {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - t) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        if !cur.is_finite() {
            return Err(Error::Overflow { what: "laguerre polynomial", degree: k + 1 });
        }
    }
    if !cur.is_finite() {
        return Err(Error::Overflow { what: "laguerre polynomial", degree });
    }
    Ok(cur)
}

/// `L_κ^(α)(t)` from the explicit sum `Σ_ι (-1)^ι / ι! · C(κ+α, κ-ι) · t^ι`.
///
/// Independent of the recurrence; binomials with real upper argument go
/// through log-gamma differences.
pub fn laguerre_explicit(params: &LaguerreParams, degree: usize) -> Result<f64> {
    let LaguerreParams { alpha, argument: t } = *params;
    check(alpha > -1.0, "alpha", alpha)?;
    let n = degree as f64 + alpha;
    let mut acc = Compensated::default();
    for i in 0..=degree {
        let binom = binomial_real(n, degree - i)?;
        let term = binom * math::powi(t, i as u32) / math::exp(log_gamma(i as f64 + 1.0)?);
        acc.add(if i % 2 == 0 { term } else { -term });
    }
    Ok(acc.value())
}

/// `C(n, k) = Γ(n+1) / (Γ(k+1) Γ(n-k+1))` for real `n` with `n - k + 1 > 0`.
pub fn binomial_real(n: f64, k: usize) -> Result<f64> {
    let kf = k as f64;
    check(n - kf + 1.0 > 0.0, "binomial upper argument", n)?;
    Ok(math::exp(log_gamma(n + 1.0)? - log_gamma(kf + 1.0)? - log_gamma(n - kf + 1.0)?))
}

/// Iterator over the mixture weights `w_κ(x)` in scaled form.
///
/// The recurrence for `w_κ` is linear and homogeneous, so it runs on
/// `v_κ = w_κ · exp(-log_scale)` and renormalises whenever `v` grows large.
/// Nothing overflows or underflows regardless of `ηx`.
#[derive(Debug, Clone)]
pub(crate) struct ScaledWeights {
    alpha: f64,
    half_eta_x: f64,
    k: usize,
    prev: f64,
    cur: f64,
    log_scale: f64,
}

impl ScaledWeights {
    pub(crate) fn new(alpha: f64, eta: f64, x: f64) -> Self {
        let half_eta_x = 0.5 * eta * x;
        Self { alpha, half_eta_x, k: 0, prev: 0.0, cur: 1.0, log_scale: -half_eta_x - (alpha + 1.0) * LN_2 }
    }

    /// Natural log of the current weight.
    pub(crate) fn ln_weight(&self) -> f64 {
        math::ln(self.cur) + self.log_scale
    }

    /// The current weight as a plain `f64` (may underflow to zero).
    pub(crate) fn weight(&self) -> f64 {
        math::exp(self.ln_weight())
    }

    pub(crate) fn index(&self) -> usize {
        self.k
    }

    pub(crate) fn advance(&mut self) {
        let kf = self.k as f64;
        let next = if self.k == 0 {
            0.5 * (1.0 + self.alpha + self.half_eta_x) * self.cur
        } else {
            (0.5 * (2.0 * kf + 1.0 + self.alpha + self.half_eta_x) * self.cur - 0.25 * (kf + self.alpha) * self.prev)
                / (kf + 1.0)
        };
        self.prev = self.cur;
        self.cur = next;
        self.k += 1;
        if self.cur > 1e150 || (self.cur < 1e-150 && self.cur > 0.0) {
            let s = self.cur;
            self.prev /= s;
            self.cur = 1.0;
            self.log_scale += math::ln(s);
        }
    }
}

/// `ln w_κ(x)` with `w_κ(x) = exp(-ηx/2) 2^(-α-1) 2^(-κ) L_κ^(α)(-ηx/2)`.
pub fn log_weight(x: f64, params: &OperatorParams, kappa: usize) -> Result<f64> {
    params.validate()?;
    check(x >= 0.0 && x.is_finite(), "x", x)?;
    let mut it = ScaledWeights::new(params.alpha, params.eta, x);
    while it.index() < kappa {
        it.advance();
    }
    Ok(it.ln_weight())
}

/// The weights `w_0 ..= w_K` of the operator at one point, truncated by mass.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    pub x: f64,
    pub params: OperatorParams,
    pub weights: Vec<f64>,
    /// Index of the last retained weight.
    pub truncation_index: usize,
    /// `1 - Σ_{κ <= K} w_κ`, clamped at zero.
    pub tail_mass: f64,
}

impl WeightSequence {
    pub fn total(&self) -> f64 {
        let mut acc = Compensated::default();
        for &w in &self.weights {
            acc.add(w);
        }
        acc.value()
    }
}

/// Weights up to the first `K` with `Σ_{κ<=K} w_κ >= 1 - eps`.
pub fn weight_sequence(x: f64, params: &OperatorParams, eps: f64) -> Result<WeightSequence> {
    weight_sequence_capped(x, params, eps, DEFAULT_MAX_TERMS)
}

/// [`weight_sequence`] with an explicit term cap.
pub fn weight_sequence_capped(x: f64, params: &OperatorParams, eps: f64, max_terms: usize) -> Result<WeightSequence> {
    params.validate()?;
    check(x >= 0.0 && x.is_finite(), "x", x)?;
    check(eps > 0.0 && eps < 1.0, "eps", eps)?;
    let mut weights = Vec::new();
    let mut mass = Compensated::default();
    for_each_weight(x, params, eps, max_terms, |_, w| {
        weights.push(w);
        mass.add(w);
        Ok(true)
    })?;
    let truncation_index = weights.len() - 1;
    Ok(WeightSequence { x, params: *params, weights, truncation_index, tail_mass: (1.0 - mass.value()).max(0.0) })
}

const TAIL_NEGLIGIBLE: f64 = 1e-3;

/// Streams `(κ, w_κ)` until the accumulated mass reaches `1 - eps` and the
/// visitor reports its own tail as settled. Returns the accumulated mass.
pub(crate) fn for_each_weight(
    x: f64,
    params: &OperatorParams,
    eps: f64,
    max_terms: usize,
    mut visit: impl FnMut(usize, f64) -> Result<bool>,
) -> Result<f64> {
    let mut it = ScaledWeights::new(params.alpha, params.eta, x);
    let mut mass = Compensated::default();
    let mut prev = 0.0;
    loop {
        let w = it.weight();
        let settled = visit(it.index(), w)?;
        mass.add(w);
        // Past the mode the ratios keep falling, so the geometric bound caps the
        // tail. When it is negligible the missing mass is recurrence roundoff.
        let r = w / prev;
        let exhausted = prev > 0.0 && r < 1.0 && w * r / (1.0 - r) <= TAIL_NEGLIGIBLE * eps;
        if settled && (mass.value() >= 1.0 - eps || exhausted) {
            return Ok(mass.value());
        }
        if it.index() + 1 >= max_terms {
            return Err(Error::Truncation { cap: max_terms, mass: mass.value() });
        }
        prev = w;
        it.advance();
    }
}

/// Geometric tail bound for a sequence of nonnegative terms that decreases
/// past its mode, used to decide when an unbounded integrand is settled.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct TailBound {
    prev: f64,
    bound: f64,
}

impl TailBound {
    /// Feeds the next term; returns the bound on the sum of all later terms.
    pub(crate) fn push(&mut self, term: f64) -> f64 {
        let r = term / self.prev;
        self.bound = if term == 0.0 && self.prev == 0.0 {
            0.0
        } else if self.prev > 0.0 && r < 1.0 {
            term * r / (1.0 - r)
        } else {
            f64::INFINITY
        };
        self.prev = term;
        self.bound
    }

    pub(crate) fn bound(&self) -> f64 {
        self.bound
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(t)` for `t > 0`.
///
/// Stirling series for `t >= 10`, Lanczos (g = 7) on `[0.5, 10)`, and the
/// shift `ln Γ(t) = ln Γ(t+1) - ln t` below.
pub fn log_gamma(t: f64) -> Result<f64> {
    check(t > 0.0 && !t.is_nan(), "log_gamma argument", t)?;
    if t.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(log_gamma_positive(t))
}

fn log_gamma_positive(t: f64) -> f64 {
    if t < 0.5 {
        return log_gamma_positive(t + 1.0) - math::ln(t);
    }
    if t >= 10.0 {
        let inv = 1.0 / t;
        let inv2 = inv * inv;
        let series =
            inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
        return (t - 0.5) * math::ln(t) - t + 0.5 * math::ln(2.0 * core::f64::consts::PI) + series;
    }
    let z = t - 1.0;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let tg = z + LANCZOS_G + 0.5;
    0.5 * math::ln(2.0 * core::f64::consts::PI) + (z + 0.5) * math::ln(tg) - tg + math::ln(a)
}

/// Rising factorial `(t)_j = t (t+1) ... (t+j-1)`, with `(t)_0 = 1`.
pub fn pochhammer(t: f64, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, s| acc * (t + s as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(alpha: f64, beta: f64, eta: f64) -> OperatorParams {
        OperatorParams::new(alpha, beta, eta).unwrap()
    }

    #[test]
    fn laguerre_low_degrees() {
        let p = LaguerreParams::new(1.0, -1.0).unwrap();
        assert_eq!(laguerre_eval(&LaguerreParams::new(3.7, -2.0).unwrap(), 0).unwrap(), 1.0);
        assert_eq!(laguerre_eval(&p, 1).unwrap(), 3.0);
        // t^2/2 - (a+2) t + (a+1)(a+2)/2 at a = 1, t = -1: 0.5 + 3 + 3
        let direct = 0.5 + 3.0 + 2.0 * 3.0 / 2.0;
        assert_eq!(direct, 6.5);
        assert_relative_eq!(laguerre_eval(&p, 2).unwrap(), direct, max_relative = 1e-15);
        assert_relative_eq!(laguerre_explicit(&p, 2).unwrap(), direct, max_relative = 1e-13);
    }

    #[test]
    fn laguerre_rejects_bad_alpha_and_reports_overflow() {
        assert!(LaguerreParams::new(-1.0, 0.0).is_err());
        let p = LaguerreParams { alpha: -1.5, argument: 0.0 };
        assert!(matches!(laguerre_eval(&p, 3), Err(Error::InvalidParameter { .. })));
        let big = LaguerreParams::new(0.0, -1e6).unwrap();
        assert!(matches!(laguerre_eval(&big, 400), Err(Error::Overflow { .. })));
    }

    #[test]
    fn log_weight_at_origin() {
        let p = params(1.0, 0.3, 7.0);
        assert_relative_eq!(log_weight(0.0, &p, 0).unwrap(), 0.25f64.ln(), max_relative = 1e-14);
        // 2^-2 · 2^-2 · C(3, 2)
        assert_relative_eq!(log_weight(0.0, &p, 2).unwrap(), (3.0f64 / 16.0).ln(), max_relative = 1e-14);
    }

    #[test]
    fn log_weight_matches_unscaled_recurrence() {
        for &(alpha, eta, x) in &[(1.0, 25.0, 0.5), (0.5, 50.0, 2.0), (-0.5, 100.0, 1.0), (5.0, 10.0, 3.0)] {
            let p = params(alpha, 1.0, eta);
            let t = -0.5 * eta * x;
            let lp = LaguerreParams::new(alpha, t).unwrap();
            for k in 0..60 {
                let l = laguerre_eval(&lp, k).unwrap();
                let direct = (-0.5 * eta * x).exp() * 2f64.powf(-alpha - 1.0 - k as f64) * l;
                let scaled = log_weight(x, &p, k).unwrap().exp();
                assert_relative_eq!(scaled, direct, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn weight_sequence_half_mass_at_origin() {
        let ws = weight_sequence(0.0, &params(1.0, 1.0, 4.0), 0.5).unwrap();
        assert_eq!(ws.truncation_index, 1);
        assert_relative_eq!(ws.weights[0], 0.25, max_relative = 1e-15);
        assert_relative_eq!(ws.weights[1], 0.25, max_relative = 1e-15);
        assert_relative_eq!(ws.tail_mass, 0.5, max_relative = 1e-15);
    }

    #[test]
    fn weight_sequence_example_point() {
        let ws = weight_sequence(1.0, &params(1.0, 0.98, 25.0), 1e-12).unwrap();
        let total = ws.total();
        assert!((1.0 - 1e-12..=1.0 + 1e-15).contains(&total), "total {total}");
        assert!(ws.tail_mass <= 1e-12);
        assert!((total + ws.tail_mass - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn weight_sequence_cap_fails_loudly() {
        let err = weight_sequence_capped(10.0, &params(1.0, 1.0, 100.0), 1e-12, 50).unwrap_err();
        assert!(matches!(err, Error::Truncation { cap: 50, .. }));
    }

    #[test]
    fn weights_survive_huge_eta_x() {
        // exp(-ηx/2) alone underflows here.
        let ws = weight_sequence(20.0, &params(0.5, 1.0, 200.0), 1e-13).unwrap();
        assert!((ws.total() - 1.0).abs() <= 1e-11);
        assert!(ws.weights.iter().all(|&w| w >= 0.0));
    }

    #[test]
    fn log_gamma_and_pochhammer() {
        assert_eq!(pochhammer(123.4, 0), 1.0);
        assert_eq!(pochhammer(2.0, 2), 6.0);
        assert!(log_gamma(1.0).unwrap().abs() < 1e-15);
        assert!(log_gamma(2.0).unwrap().abs() < 1e-15);
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-2.0).is_err());
        for &t in &[1e-8, 0.01, 0.3, 0.5, 0.99, 1.5, 3.25, 7.9, 9.99, 10.0, 10.01, 55.5, 1e3, 1e6] {
            let ours = log_gamma(t).unwrap();
            let reference = libm::lgamma(t);
            if reference.abs() > 0.1 {
                assert_relative_eq!(ours, reference, max_relative = 1e-13);
            } else {
                assert!((ours - reference).abs() < 1e-14, "t = {t}");
            }
        }
    }

    #[test]
    fn binomial_real_matches_integers() {
        assert_relative_eq!(binomial_real(5.0, 2).unwrap(), 10.0, max_relative = 1e-13);
        assert_relative_eq!(binomial_real(3.5, 0).unwrap(), 1.0, max_relative = 1e-13);
        assert!(binomial_real(1.0, 3).is_err());
    }
}
