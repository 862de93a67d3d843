use alloc::vec::Vec;

use crate::function::TestFunction;
use crate::math;
use crate::operators::{apply_r, central_moments_closed, OperatorParams};
use crate::Result;

use super::modulus::empirical_modulus;

/// Relative slack on modulus-based right-hand sides; grid moduli are lower
/// bounds of the true suprema.
pub const MODULUS_SLACK: f64 = 0.01;

/// `lhs = |R(Φ; x) - Φ(x)|` against a bound `rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// Numerical budget of `lhs`.
    pub budget: f64,
    pub holds: bool,
}

fn deviation(params: &OperatorParams, f: &TestFunction, x: f64) -> Result<(f64, f64)> {
    let v = apply_r(params, f, x)?;
    let fx = f.eval(x);
    let budget = v.error_estimate + 4.0 * f64::EPSILON * (math::abs(v.value) + math::abs(fx));
    Ok((math::abs(v.value - fx), budget))
}

/// `|R(Φ; x) - Φ(x)| <= 2 ω(Φ, √μ₂(x))`, with ω measured on `[0, domain_end]`.
pub fn check_theorem5(params: &OperatorParams, f: &TestFunction, x: f64, domain_end: f64) -> Result<BoundCheck> {
    let (lhs, budget) = deviation(params, f, x)?;
    let delta = math::sqrt(central_moments_closed(params, x).mu2);
    let omega = empirical_modulus(f, delta, domain_end, delta / 8.0)?.omega;
    let rhs = 2.0 * omega;
    Ok(BoundCheck { lhs, rhs, budget, holds: lhs <= rhs * (1.0 + MODULUS_SLACK) + budget })
}

/// Certified Hölder data: `|Φ(z) - Φ(x)| <= constant · |z - x|^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lipschitz {
    pub constant: f64,
    pub exponent: f64,
}

/// `|R(Φ; x) - Φ(x)| <= 𝔎 μ₂(x)^(τ/2)`.
pub fn check_theorem6(params: &OperatorParams, f: &TestFunction, x: f64, lip: Lipschitz) -> Result<BoundCheck> {
    crate::error::check(lip.exponent > 0.0 && lip.exponent <= 1.0, "lipschitz exponent", lip.exponent)?;
    let (lhs, budget) = deviation(params, f, x)?;
    let mu2 = central_moments_closed(params, x).mu2;
    let rhs = lip.constant * math::powf(mu2, 0.5 * lip.exponent);
    Ok(BoundCheck { lhs, rhs, budget, holds: lhs <= rhs + budget })
}

/// `|R(Φ; x) - Φ(x)| <= 𝔐 ω₂(Φ, √(δ/2)) + ω(Φ, (1+α)/η)` with
/// `δ = μ₂(x) + ((1+α)/η)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem2Check {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// Smallest `𝔐` for which the bound holds at this point.
    pub minimal_constant: f64,
}

pub fn check_theorem2(
    params: &OperatorParams,
    f: &TestFunction,
    x: f64,
    constant: f64,
    domain_end: f64,
) -> Result<Theorem2Check> {
    let (lhs, budget) = deviation(params, f, x)?;
    let shift = (1.0 + params.alpha) / params.eta;
    let delta = central_moments_closed(params, x).mu2 + shift * shift;
    let h2 = math::sqrt(0.5 * delta);
    let omega2 = empirical_modulus(f, h2, domain_end, h2 / 8.0)?.omega2 * (1.0 + MODULUS_SLACK);
    let omega = empirical_modulus(f, shift, domain_end, shift / 8.0)?.omega * (1.0 + MODULUS_SLACK);
    let excess = (lhs - budget - omega).max(0.0);
    let minimal_constant = if excess == 0.0 {
        0.0
    } else if omega2 > 0.0 {
        excess / omega2
    } else {
        f64::INFINITY
    };
    let rhs = constant * omega2 + omega;
    Ok(Theorem2Check { lhs, rhs, holds: lhs <= rhs + budget, minimal_constant })
}

/// Minimal `𝔐` of [`check_theorem2`] along an `η` ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantLadder {
    pub etas: Vec<f64>,
    pub constants: Vec<f64>,
    /// Finite everywhere and the last half never exceeds twice the first-half maximum.
    pub bounded: bool,
}

pub fn theorem2_constant_ladder(
    params: &OperatorParams,
    etas: &[f64],
    f: &TestFunction,
    x: f64,
    domain_end: f64,
) -> Result<ConstantLadder> {
    let mut constants = Vec::with_capacity(etas.len());
    for &eta in etas {
        let p = params.with_eta(eta)?;
        constants.push(check_theorem2(&p, f, x, 2.0, domain_end)?.minimal_constant);
    }
    let half = constants.len().div_ceil(2);
    let head = constants[..half].iter().copied().fold(0.0, f64::max);
    let bounded = constants.iter().all(|c| c.is_finite())
        && constants[half..].iter().all(|&c| c <= 2.0 * head.max(f64::MIN_POSITIVE));
    Ok(ConstantLadder { etas: etas.to_vec(), constants, bounded })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> OperatorParams {
        OperatorParams::new(1.0, 0.98, 25.0).unwrap()
    }

    #[test]
    fn constant_function_is_trivial() {
        let c = TestFunction::constant(1.0);
        let t5 = check_theorem5(&example(), &c, 0.5, 10.0).unwrap();
        assert!(t5.holds && t5.lhs <= 1e-10 && t5.rhs == 0.0);
        let t6 = check_theorem6(&example(), &c, 0.5, Lipschitz { constant: 1.0, exponent: 0.3 }).unwrap();
        assert!(t6.holds);
        let t2 = check_theorem2(&example(), &c, 0.5, 2.0, 10.0).unwrap();
        assert!(t2.holds && t2.minimal_constant == 0.0);
    }

    #[test]
    fn theorem5_example_point() {
        let p = example().with_eta(50.0).unwrap();
        let c = check_theorem5(&p, &TestFunction::xexp5(), 1.0, 10.0).unwrap();
        assert!((c.lhs - 0.002722240).abs() <= 1e-8, "{}", c.lhs);
        assert!(c.holds, "{c:?}");
    }

    #[test]
    fn theorem6_example_point() {
        let c = check_theorem6(&example(), &TestFunction::xexp5(), 1.0, Lipschitz { constant: 1.0, exponent: 1.0 })
            .unwrap();
        assert!((c.lhs - 0.004815770).abs() <= 1e-8);
        let mu2 = central_moments_closed(&example(), 1.0).mu2;
        assert!((c.rhs - mu2.sqrt()).abs() <= 1e-15);
        assert!(c.holds);
    }

    #[test]
    fn theorem2_constants_stay_bounded() {
        let ladder =
            theorem2_constant_ladder(&example(), &[25.0, 50.0, 100.0, 200.0, 400.0], &TestFunction::xexp5(), 1.0, 10.0)
                .unwrap();
        assert!(ladder.bounded, "{ladder:?}");
        let a = check_theorem2(&example(), &TestFunction::xexp5(), 0.5, 2.0, 10.0).unwrap();
        let b = check_theorem2(&example().with_eta(100.0).unwrap(), &TestFunction::xexp5(), 0.5, 2.0, 10.0).unwrap();
        assert!(b.lhs < a.lhs);
    }
}
