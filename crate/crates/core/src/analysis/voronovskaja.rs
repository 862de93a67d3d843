use alloc::vec::Vec;

use crate::function::TestFunction;
use crate::math;
use crate::operators::{apply_r, OperatorParams};
use crate::{Error, Result};

use super::fit::log_log_slope;

/// `η (R(Φ; x) - Φ(x))` along an `η` ladder against its predicted limit.
#[derive(Debug, Clone, PartialEq)]
pub struct VoronovskajaRecord {
    pub x: f64,
    pub eta_ladder: Vec<f64>,
    pub scaled_errors: Vec<f64>,
    pub predicted_limit: f64,
    /// `|scaled_error - predicted_limit|`.
    pub deviations: Vec<f64>,
    /// `η ·` numerical budget of each evaluation.
    pub floors: Vec<f64>,
    /// Points whose deviation sits clearly above the precision floor.
    pub used: Vec<bool>,
    /// Log–log slope of the deviation over the used points.
    pub slope: Option<f64>,
}

/// `(1+α) Φ'(x) + x (3β+1) / (2β) Φ''(x)`.
pub fn voronovskaja_limit(params: &OperatorParams, f: &TestFunction, x: f64) -> Result<f64> {
    let d1 = f.d1(x).ok_or(Error::Missing("first derivative"))?;
    let d2 = f.d2(x).ok_or(Error::Missing("second derivative"))?;
    let b = params.beta;
    Ok((1.0 + params.alpha) * d1 + x * (3.0 * b + 1.0) / (2.0 * b) * d2)
}

/// A point enters the slope fit when its deviation exceeds ten times the
/// scaled numerical budget.
const FLOOR_MARGIN: f64 = 10.0;

pub fn voronovskaja_check(
    params: &OperatorParams,
    etas: &[f64],
    f: &TestFunction,
    x: f64,
) -> Result<VoronovskajaRecord> {
    let predicted_limit = voronovskaja_limit(params, f, x)?;
    let fx = f.eval(x);
    let mut scaled_errors = Vec::with_capacity(etas.len());
    let mut deviations = Vec::with_capacity(etas.len());
    let mut floors = Vec::with_capacity(etas.len());
    for &eta in etas {
        let p = params.with_eta(eta)?;
        let v = apply_r(&p, f, x)?;
        let scaled = eta * (v.value - fx);
        let budget = v.error_estimate + 4.0 * f64::EPSILON * (math::abs(v.value) + math::abs(fx));
        scaled_errors.push(scaled);
        deviations.push(math::abs(scaled - predicted_limit));
        floors.push(eta * budget);
    }
    let used: Vec<bool> = deviations.iter().zip(&floors).map(|(d, fl)| *d > FLOOR_MARGIN * fl).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        etas.iter().zip(&deviations).zip(&used).filter(|(_, u)| **u).map(|((e, d), _)| (*e, *d)).unzip();
    Ok(VoronovskajaRecord {
        x,
        eta_ladder: etas.to_vec(),
        scaled_errors,
        predicted_limit,
        deviations,
        floors,
        used,
        slope: log_log_slope(&xs, &ys),
    })
}
