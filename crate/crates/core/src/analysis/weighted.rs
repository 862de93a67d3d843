use alloc::vec::Vec;

use crate::error::check;
use crate::function::TestFunction;
use crate::math;
use crate::operators::{apply_r, OperatorParams};
use crate::Result;

/// `sup_x |R(Φ; x) - Φ(x)| / (1 + x²)` on a grid, for one `η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedNormPoint {
    pub eta: f64,
    pub norm: f64,
    pub argmax: f64,
}

/// Weighted sup-norm error for each `η` on `points` equispaced nodes of
/// `[0, domain_end]`.
pub fn weighted_norm_convergence(
    params: &OperatorParams,
    etas: &[f64],
    f: &TestFunction,
    domain_end: f64,
    points: usize,
) -> Result<Vec<WeightedNormPoint>> {
    check(domain_end > 0.0, "domain_end", domain_end)?;
    check(points >= 2, "points", points as f64)?;
    let mut out = Vec::with_capacity(etas.len());
    for &eta in etas {
        let p = params.with_eta(eta)?;
        let mut best = WeightedNormPoint { eta, norm: 0.0, argmax: 0.0 };
        for i in 0..points {
            let x = domain_end * i as f64 / (points - 1) as f64;
            let v = apply_r(&p, f, x)?.value;
            let r = math::abs(v - f.eval(x)) / (1.0 + x * x);
            if r > best.norm {
                best.norm = r;
                best.argmax = x;
            }
        }
        out.push(best);
    }
    Ok(out)
}
