use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::error::check;
use crate::function::TestFunction;
use crate::math;
use crate::{Error, Result};

/// Grid estimates of `ω(Φ, δ)` and `ω₂(Φ, δ)` on `[0, domain_end]`.
///
/// Both are suprema over grid points, hence lower bounds of the true values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusEstimate {
    pub delta: f64,
    pub omega: f64,
    pub omega2: f64,
    /// Final grid step after refinement.
    pub grid_step: f64,
}

const REL_STABLE: f64 = 1e-4;
const MAX_POINTS: usize = 1 << 23;
/// Increments `ϵ ∈ (0, δ]` sampled per zoom level of the `ω₂` search.
const MAX_INCREMENTS: usize = 64;

/// `ω(Φ, δ) = sup_{|z-x|<=δ} |Φ(z) - Φ(x)|` and
/// `ω₂(Φ, δ) = sup_{0<ϵ<=δ} sup_x |Φ(x+2ϵ) - 2Φ(x+ϵ) + Φ(x)|`, all points in
/// `[0, domain_end]`.
///
/// The step is `δ/m` for an integer `m`, so windows of length exactly `δ` land
/// on the grid; it is halved until both estimates change by at most `1e-4`
/// relative.
pub fn empirical_modulus(f: &TestFunction, delta: f64, domain_end: f64, grid_step: f64) -> Result<ModulusEstimate> {
    check(delta > 0.0 && delta.is_finite(), "delta", delta)?;
    check(domain_end > 0.0 && domain_end.is_finite(), "domain_end", domain_end)?;
    check(grid_step > 0.0 && grid_step <= delta / 8.0 * (1.0 + 1e-12), "grid_step", grid_step)?;
    let mut m = (math::ceil(delta / grid_step) as usize).max(8);
    let mut previous: Option<(f64, f64)> = None;
    let mut before: Option<(f64, f64)> = None;
    loop {
        let h = delta / m as f64;
        if (domain_end / h) as usize + 1 > MAX_POINTS {
            let (last, prior) = match (previous, before) {
                (Some(p), Some(b)) if stable(p.0, b.0) => (p.1, b.1),
                (Some(p), Some(b)) => (p.0, b.0),
                _ => (f64::NAN, f64::NAN),
            };
            return Err(Error::NoConvergence { last, previous: prior });
        }
        let (omega, omega2) = grid_moduli(f, domain_end, m, delta);
        if let Some((po, po2)) = previous {
            if stable(omega, po) && stable(omega2, po2) {
                return Ok(ModulusEstimate { delta, omega, omega2, grid_step: h });
            }
        }
        before = previous;
        previous = Some((omega, omega2));
        m *= 2;
    }
}

fn stable(new: f64, old: f64) -> bool {
    let scale = math::abs(new).max(math::abs(old));
    scale == 0.0 || math::abs(new - old) <= REL_STABLE * scale
}

fn grid_moduli(f: &TestFunction, domain_end: f64, m: usize, delta: f64) -> (f64, f64) {
    let h = delta / m as f64;
    let n = ((domain_end / h) as usize).max(1);
    let values: Vec<f64> = (0..=n).map(|i| f.eval((i as f64 * h).min(domain_end))).collect();
    (sliding_range(&values, m), second_difference(&values, m))
}

/// Largest `max - min` over windows of `m + 1` consecutive values.
fn sliding_range(values: &[f64], m: usize) -> f64 {
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut best: f64 = 0.0;
    for (i, &v) in values.iter().enumerate() {
        while maxq.back().is_some_and(|&j| values[j] <= v) {
            maxq.pop_back();
        }
        maxq.push_back(i);
        while minq.back().is_some_and(|&j| values[j] >= v) {
            minq.pop_back();
        }
        minq.push_back(i);
        let start = i.saturating_sub(m);
        while maxq.front().is_some_and(|&j| j < start) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&j| j < start) {
            minq.pop_front();
        }
        best = best.max(values[maxq[0]] - values[minq[0]]);
    }
    best
}

fn second_difference(values: &[f64], m: usize) -> f64 {
    let m = m.min((values.len() - 1) / 2);
    if m == 0 {
        return 0.0;
    }
    let at = |s: usize| {
        (0..values.len() - 2 * s)
            .map(|i| math::abs(values[i + 2 * s] - 2.0 * values[i + s] + values[i]))
            .fold(0.0, f64::max)
    };
    // coarse scan over increments, then zoom into the bracket around the best one
    let (mut lo, mut hi) = (1, m);
    let mut best: f64 = 0.0;
    loop {
        let width = hi - lo;
        let steps: Vec<usize> = if width <= MAX_INCREMENTS {
            (lo..=hi).collect()
        } else {
            (0..=MAX_INCREMENTS).map(|k| lo + k * width / MAX_INCREMENTS).collect()
        };
        let (mut arg, mut level) = (0, -1.0);
        for (k, &s) in steps.iter().enumerate() {
            let v = at(s);
            if v > level {
                (arg, level) = (k, v);
            }
        }
        best = best.max(level);
        if width <= MAX_INCREMENTS {
            return best;
        }
        lo = steps[arg.saturating_sub(1)];
        hi = steps[(arg + 1).min(steps.len() - 1)];
    }
}
