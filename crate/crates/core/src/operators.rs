//! The operator `R(Φ; x)`, the point-evaluation base operator `P(Φ; x)`, and
//! closed-form moments.
//!
//! The `κ = 0` kernel has shape zero and is taken as a point mass at the
//! origin, so the `κ = 0` term contributes `w_0(x) · Φ(0)`. This is what makes
//! `R(1; x) = 1` and `R(z; x) = x + (1+α)/η`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::check;
use crate::function::TestFunction;
use crate::math;
use crate::quadrature::{cached_rule, default_order, expectation_with_rule, QuadratureRule};
use crate::special::{for_each_weight, TailBound, DEFAULT_MAX_TERMS, DEFAULT_TRUNCATION_EPS};
use crate::sum::Compensated;
use crate::Result;

/// Default rule order for non-polynomial integrands.
pub const DEFAULT_QUAD_ORDER: usize = 64;

/// Rising weights below `truncation_eps * SKIP_FACTOR` are not integrated; their
/// mass goes into the error budget.
const SKIP_FACTOR: f64 = 1e-6;

/// `(α, β, η)` plus the numerical knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorParams {
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
    pub truncation_eps: f64,
    pub quad_order: usize,
}

impl OperatorParams {
    pub fn new(alpha: f64, beta: f64, eta: f64) -> Result<Self> {
        let p = Self { alpha, beta, eta, truncation_eps: DEFAULT_TRUNCATION_EPS, quad_order: DEFAULT_QUAD_ORDER };
        p.validate()?;
        Ok(p)
    }

    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        self.truncation_eps = eps;
        self.validate()?;
        Ok(self)
    }

    pub fn with_quad_order(mut self, order: usize) -> Result<Self> {
        self.quad_order = order;
        self.validate()?;
        Ok(self)
    }

    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        self.eta = eta;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check(self.alpha > -1.0 && self.alpha.is_finite(), "alpha", self.alpha)?;
        check(self.beta > 0.0 && self.beta.is_finite(), "beta", self.beta)?;
        check(self.eta > 0.0 && self.eta.is_finite(), "eta", self.eta)?;
        check(self.truncation_eps > 0.0 && self.truncation_eps < 1.0, "truncation_eps", self.truncation_eps)?;
        check((1..=crate::quadrature::MAX_ORDER).contains(&self.quad_order), "quad_order", self.quad_order as f64)
    }
}

/// Value of an operator at one point plus its numerical bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorValue {
    pub value: f64,
    /// Last retained series index `K`.
    pub truncation_index: usize,
    /// Weight mass beyond `K`.
    pub tail_mass: f64,
    /// Mass of retained weights too small to be worth integrating.
    pub skipped_mass: f64,
    /// `(tail + skipped) · sup|Φ|` over a probe grid plus a rounding term, plus
    /// the geometric bound on the neglected terms for unbounded `Φ`.
    pub error_estimate: f64,
}

/// `R(Φ; x)`.
pub fn apply_r(params: &OperatorParams, f: &TestFunction, x: f64) -> Result<OperatorValue> {
    Ok(apply_r_many(params, &[f], x)?[0])
}

/// `R(Φᵢ; x)` for several functions in one pass over the series; the weights
/// and the rule of each term are shared.
pub fn apply_r_many(params: &OperatorParams, fs: &[&TestFunction], x: f64) -> Result<Vec<OperatorValue>> {
    params.validate()?;
    check(x >= 0.0 && x.is_finite(), "x", x)?;
    let orders: Vec<usize> = fs.iter().map(|f| default_order(f, params.quad_order)).collect();
    let mut distinct: Vec<usize> = orders.clone();
    distinct.sort_unstable();
    distinct.dedup();

    let n = fs.len();
    let mut acc = vec![Compensated::default(); n];
    let mut abs_acc = vec![0.0; n];
    let mut skipped = Compensated::default();
    let mut last = 0;
    let floor = params.truncation_eps * SKIP_FACTOR;
    let rate = params.eta * params.beta;
    let mut rules: Vec<alloc::sync::Arc<QuadratureRule>> = Vec::with_capacity(distinct.len());
    // Unbounded integrands also need their weighted terms to have died out.
    let mut tails = vec![TailBound::default(); n];
    let mut prev_w = 0.0;
    let settled = |tails: &[TailBound], abs_acc: &[f64]| {
        fs.iter().zip(tails).zip(abs_acc).all(|((f, t), a)| !f.is_unbounded() || t.bound() <= params.truncation_eps * a)
    };

    let mass = for_each_weight(x, params, params.truncation_eps, DEFAULT_MAX_TERMS, |k, w| {
        last = k;
        let rising = w >= prev_w;
        prev_w = w;
        if k == 0 {
            for (i, f) in fs.iter().enumerate() {
                let v = f.eval(0.0);
                if v.is_nan() {
                    return Err(crate::Error::NotANumber { at: 0.0 });
                }
                acc[i].add(w * v);
                abs_acc[i] += math::abs(w * v);
                tails[i].push(math::abs(w * v));
            }
            return Ok(settled(&tails, &abs_acc));
        }
        if w < floor && rising {
            skipped.add(w);
            return Ok(settled(&tails, &abs_acc));
        }
        let shape = k as f64 * params.beta;
        rules.clear();
        for &order in &distinct {
            rules.push(cached_rule(shape, order)?);
        }
        for (i, f) in fs.iter().enumerate() {
            let slot = distinct.binary_search(&orders[i]).expect("order present");
            let e = expectation_with_rule(&rules[slot], rate, f)?;
            acc[i].add(w * e);
            abs_acc[i] += math::abs(w * e);
            tails[i].push(math::abs(w * e));
        }
        Ok(settled(&tails, &abs_acc))
    })?;

    let tail_mass = (1.0 - mass).max(0.0);
    let skipped_mass = skipped.value();
    let probe_end = 2.0 * (last as f64 + 1.0) / params.eta + 1.0;
    Ok(fs
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let sup = probe_sup(f, probe_end);
            let rounding = 4.0 * (last as f64 + 1.0) * f64::EPSILON * abs_acc[i];
            let growth_tail = if f.is_unbounded() { tails[i].bound() } else { 0.0 };
            OperatorValue {
                value: acc[i].value(),
                truncation_index: last,
                tail_mass,
                skipped_mass,
                error_estimate: (tail_mass + skipped_mass) * sup + rounding + growth_tail,
            }
        })
        .collect())
}

/// `sup |Φ|` on 65 equispaced points of `[0, end]`.
pub(crate) fn probe_sup(f: &TestFunction, end: f64) -> f64 {
    (0..=64).map(|i| math::abs(f.eval(end * i as f64 / 64.0))).fold(0.0, f64::max)
}

/// `P(Φ; x) = Σ w_κ(x) Φ(κ/η)`.
pub fn apply_p(params: &OperatorParams, f: &TestFunction, x: f64) -> Result<OperatorValue> {
    params.validate()?;
    check(x >= 0.0 && x.is_finite(), "x", x)?;
    let mut acc = Compensated::default();
    let mut abs_acc = 0.0;
    let mut last = 0;
    let mut tail = TailBound::default();
    let mass = for_each_weight(x, params, params.truncation_eps, DEFAULT_MAX_TERMS, |k, w| {
        last = k;
        let at = k as f64 / params.eta;
        let v = f.eval(at);
        if v.is_nan() {
            return Err(crate::Error::NotANumber { at });
        }
        acc.add(w * v);
        abs_acc += math::abs(w * v);
        tail.push(math::abs(w * v));
        Ok(!f.is_unbounded() || tail.bound() <= params.truncation_eps * abs_acc)
    })?;
    let tail_mass = (1.0 - mass).max(0.0);
    let sup = probe_sup(f, 2.0 * (last as f64 + 1.0) / params.eta + 1.0);
    let growth_tail = if f.is_unbounded() { tail.bound() } else { 0.0 };
    Ok(OperatorValue {
        value: acc.value(),
        truncation_index: last,
        tail_mass,
        skipped_mass: 0.0,
        error_estimate: tail_mass * sup + 4.0 * (last as f64 + 1.0) * f64::EPSILON * abs_acc + growth_tail,
    })
}

/// `R(ϱ_j; x)` for `j = 0..=4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawMoments {
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
}

/// `μ_j(x) = R((z - x)^j; x)` for `j = 1, 2, 4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralMoments {
    pub mu1: f64,
    pub mu2: f64,
    pub mu4: f64,
}

/// Raw and central moments at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub x: f64,
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub mu4: f64,
}

impl MomentSet {
    pub fn from_parts(x: f64, raw: RawMoments, central: CentralMoments) -> Self {
        Self {
            x,
            m0: raw.m0,
            m1: raw.m1,
            m2: raw.m2,
            m3: raw.m3,
            m4: raw.m4,
            mu1: central.mu1,
            mu2: central.mu2,
            mu4: central.mu4,
        }
    }

    pub fn raw(&self) -> [f64; 5] {
        [self.m0, self.m1, self.m2, self.m3, self.m4]
    }

    pub fn central(&self) -> [f64; 3] {
        [self.mu1, self.mu2, self.mu4]
    }

    /// Central moments recomputed from the raw ones by binomial expansion.
    pub fn central_from_raw(&self) -> CentralMoments {
        let x = self.x;
        CentralMoments {
            mu1: self.m1 - x * self.m0,
            mu2: self.m2 - 2.0 * x * self.m1 + x * x * self.m0,
            mu4: self.m4 - 4.0 * x * self.m3 + 6.0 * x * x * self.m2 - 4.0 * x * x * x * self.m1
                + x * x * x * x * self.m0,
        }
    }
}

/// Closed-form raw moments of `R`.
pub fn raw_moments_closed(params: &OperatorParams, x: f64) -> RawMoments {
    let OperatorParams { alpha: a, beta: b, eta: e, .. } = *params;
    let (a2, a3, a4) = (a * a, a * a * a, a * a * a * a);
    let (b2, b3) = (b * b, b * b * b);
    let (e2, e3, e4) = (e * e, e * e * e, e * e * e * e);
    let (x2, x3, x4) = (x * x, x * x * x, x * x * x * x);

    let m1 = x + (1.0 + a) / e;
    let m2 = x2 + (x * (2.0 * a * b * e + 5.0 * b * e + e) + b * (a2 + 4.0 * a + 3.0) + a + 1.0) / (e2 * b);
    let m3 = x3
        + (x2 * (3.0 * a * b2 * e2 + 12.0 * b2 * e2 + 3.0 * b * e2)
            + x * (3.0 * a2 * b2 * e + 21.0 * a * b2 * e + 31.0 * b2 * e + 6.0 * a * b * e + 15.0 * b * e + 2.0 * e))
            / (e3 * b2)
        + (a3 * b2 + 9.0 * a2 * b2 + 21.0 * a * b2 + 13.0 * b2 + 3.0 * a2 * b + 12.0 * a * b + 9.0 * b + 2.0 * a + 2.0)
            / (e3 * b2);
    let d4 = e4 * b3;
    let m4 = x4
        + x3 * (4.0 * a * b3 * e3 + 6.0 * b2 * e3 + 22.0 * b3 * e3) / d4
        + x2 * (11.0 * b * e2
            + 72.0 * b2 * e2
            + 18.0 * a * b2 * e2
            + 133.0 * b3 * e2
            + 60.0 * a * b3 * e2
            + 6.0 * a2 * b3 * e2)
            / d4
        + x * (4.0 * a3 * b3 * e
            + 54.0 * a2 * b3 * e
            + 208.0 * a * b3 * e
            + 233.0 * b3 * e
            + 18.0 * a2 * b2 * e
            + 126.0 * a * b2 * e)
            / d4
        + x * (186.0 * b2 * e + 22.0 * a * b * e + 55.0 * b * e + 6.0 * e) / d4
        + (a4 * b3 + 16.0 * a3 * b3 + 78.0 * a2 * b3 + 138.0 * a * b3) / d4
        + (75.0 * b3
            + 6.0 * a3 * b2
            + 54.0 * a2 * b2
            + 126.0 * a * b2
            + 78.0 * b2
            + 11.0 * a2 * b
            + 44.0 * a * b
            + 33.0 * b
            + 6.0 * a
            + 6.0)
            / d4;
    RawMoments { m0: 1.0, m1, m2, m3, m4 }
}

/// Closed-form central moments of `R`.
///
/// `μ_4` is the binomial expansion of the raw moments written out in
/// `(x, α, β, η)`; see [`mu4_as_printed`] for the variant with the
/// `18 α² β³ x / (β³ η³)` term missing.
pub fn central_moments_closed(params: &OperatorParams, x: f64) -> CentralMoments {
    let OperatorParams { alpha: a, beta: b, eta: e, .. } = *params;
    let (a2, a3, a4) = (a * a, a * a * a, a * a * a * a);
    let (b2, b3) = (b * b, b * b * b);
    let mu1 = (1.0 + a) / e;
    let mu2 = x * (3.0 * b + 1.0) / (b * e) + (a2 * b + 4.0 * a * b + 3.0 * b + a + 1.0) / (b * e * e);
    let mu4 = 3.0 * x * x * (9.0 * b2 + 6.0 * b + 1.0) / (b2 * e * e)
        + x * (18.0 * a2 * b3
            + 124.0 * a * b3
            + 181.0 * b3
            + 6.0 * a2 * b2
            + 78.0 * a * b2
            + 150.0 * b2
            + 14.0 * a * b
            + 47.0 * b
            + 6.0)
            / (b3 * e * e * e)
        + mu4_constant(a, a2, a3, a4, b, b2, b3) / (b3 * e * e * e * e);
    CentralMoments { mu1, mu2, mu4 }
}

fn mu4_constant(a: f64, a2: f64, a3: f64, a4: f64, b: f64, b2: f64, b3: f64) -> f64 {
    a4 * b3
        + 16.0 * a3 * b3
        + 78.0 * a2 * b3
        + 138.0 * a * b3
        + 75.0 * b3
        + 6.0 * a3 * b2
        + 54.0 * a2 * b2
        + 126.0 * a * b2
        + 78.0 * b2
        + 11.0 * a2 * b
        + 44.0 * a * b
        + 33.0 * b
        + 6.0 * a
        + 6.0
}

/// Fourth central moment with the published coefficients, reading the
/// malformed `β{3}` as `β³`. Kept for auditing; it differs from
/// [`central_moments_closed`] by `18 α² x / η³`.
pub fn mu4_as_printed(params: &OperatorParams, x: f64) -> f64 {
    let OperatorParams { alpha: a, beta: b, eta: e, .. } = *params;
    let (a2, a3, a4) = (a * a, a * a * a, a * a * a * a);
    let (b2, b3) = (b * b, b * b * b);
    3.0 * x * x * (9.0 * b2 + 6.0 * b + 1.0) / (b2 * e * e)
        + x * (124.0 * a * b3 + 181.0 * b3 + 6.0 * a2 * b2 + 78.0 * a * b2 + 150.0 * b2 + 14.0 * a * b + 47.0 * b + 6.0)
            / (b3 * e * e * e)
        + mu4_constant(a, a2, a3, a4, b, b2, b3) / (b3 * e * e * e * e)
}

/// Closed-form raw moments of the base operator `P` (`ϱ_0 ..= ϱ_4`).
pub fn p_moments_closed(params: &OperatorParams, x: f64) -> RawMoments {
    let OperatorParams { alpha: a, eta: e, .. } = *params;
    let (a2, a3, a4) = (a * a, a * a * a, a * a * a * a);
    let (e2, e3, e4) = (e * e, e * e * e, e * e * e * e);
    let (x2, x3, x4) = (x * x, x * x * x, x * x * x * x);
    RawMoments {
        m0: 1.0,
        m1: x + (1.0 + a) / e,
        m2: x2 + (x * (2.0 * a * e + 5.0 * e) + a2 + 4.0 * a + 3.0) / e2,
        m3: x3
            + (x2 * (3.0 * a * e2 + 12.0 * e2)
                + x * (3.0 * a2 * e + 21.0 * a * e + 31.0 * e)
                + a3
                + 9.0 * a2
                + 21.0 * a
                + 13.0)
                / e3,
        m4: x4
            + (x3 * (4.0 * a * e3 + 22.0 * e3) + x2 * (6.0 * a2 * e2 + 60.0 * a * e2 + 133.0 * e2)) / e4
            + (x * (4.0 * a3 * e + 54.0 * a2 * e + 208.0 * a * e + 233.0 * e)
                + a4
                + 16.0 * a3
                + 78.0 * a2
                + 138.0 * a
                + 75.0)
                / e4,
    }
}

/// Closed-form [`MomentSet`].
pub fn moments_closed(params: &OperatorParams, x: f64) -> MomentSet {
    MomentSet::from_parts(x, raw_moments_closed(params, x), central_moments_closed(params, x))
}

/// All seven moments by applying `R` to `ϱ_j` and `(z - x)^j`.
pub fn moments_numerical(params: &OperatorParams, x: f64) -> Result<MomentSet> {
    let raw: Vec<TestFunction> = (0..=4).map(TestFunction::monomial).collect();
    let central: Vec<TestFunction> = [1, 2, 4].iter().map(|&j| TestFunction::central_monomial(x, j)).collect();
    let fs: Vec<&TestFunction> = raw.iter().chain(central.iter()).collect();
    let v = apply_r_many(params, &fs, x)?;
    Ok(MomentSet {
        x,
        m0: v[0].value,
        m1: v[1].value,
        m2: v[2].value,
        m3: v[3].value,
        m4: v[4].value,
        mu1: v[5].value,
        mu2: v[6].value,
        mu4: v[7].value,
    })
}
