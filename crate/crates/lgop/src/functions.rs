use lgop_core::TestFunction;

use crate::error::{CliError, CliResult};

pub const BUILTINS: &str = "xexp5, cubic, sqrt, monomial:j, poly:c0,c1,...";

/// Resolves a `--function` value against the builtin registry.
pub fn parse_function(spec: &str) -> CliResult<TestFunction> {
    let spec = spec.trim();
    let bad = || CliError::Validation(format!("unknown function `{spec}` (expected one of {BUILTINS})"));
    match spec {
        "xexp5" => return Ok(TestFunction::xexp5()),
        "cubic" => return Ok(TestFunction::cubic()),
        "sqrt" => return Ok(TestFunction::sqrt()),
        _ => {}
    }
    if let Some(j) = spec.strip_prefix("monomial:") {
        let j: u32 = j.trim().parse().map_err(|_| bad())?;
        if j > 64 {
            return Err(CliError::Validation(format!("monomial degree {j} is above 64")));
        }
        return Ok(TestFunction::monomial(j));
    }
    if let Some(list) = spec.strip_prefix("poly:") {
        let coeffs = parse_reals(list, "poly coefficient")?;
        if coeffs.len() > 65 {
            return Err(CliError::Validation("polynomial degree is above 64".into()));
        }
        return Ok(TestFunction::polynomial(&coeffs));
    }
    Err(bad())
}

/// Comma-separated finite reals.
pub fn parse_reals(list: &str, what: &str) -> CliResult<Vec<f64>> {
    let values: Vec<f64> = list
        .split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Validation(format!("{what} `{s}` is not a finite number")))
        })
        .collect::<CliResult<_>>()?;
    if values.is_empty() {
        return Err(CliError::Validation(format!("empty {what} list")));
    }
    Ok(values)
}

/// Coefficients when the function is a polynomial the registry knows exactly.
pub fn polynomial_coefficients(spec: &str) -> Option<Vec<f64>> {
    match spec.trim() {
        "cubic" => Some(vec![3.0, 0.0, -2.0, 1.0]),
        s => {
            if let Some(j) = s.strip_prefix("monomial:") {
                let j: usize = j.trim().parse().ok()?;
                let mut c = vec![0.0; j + 1];
                c[j] = 1.0;
                Some(c)
            } else {
                parse_reals(s.strip_prefix("poly:")?, "poly coefficient").ok()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_resolve() {
        assert_eq!(parse_function("xexp5").unwrap().name(), "xexp5");
        assert_eq!(parse_function("monomial:3").unwrap().eval(2.0), 8.0);
        assert_eq!(parse_function("poly:1,0,2").unwrap().eval(3.0), 19.0);
        assert_eq!(parse_function(" cubic ").unwrap().eval(1.0), 2.0);
        assert!(parse_function("sin").is_err());
        assert!(parse_function("poly:1,x").is_err());
        assert!(parse_function("monomial:-1").is_err());
    }

    #[test]
    fn reals_reject_junk() {
        assert_eq!(parse_reals("25, 50,75", "eta").unwrap(), vec![25.0, 50.0, 75.0]);
        assert!(parse_reals("1,,2", "x").is_err());
        assert!(parse_reals("inf", "x").is_err());
    }

    #[test]
    fn known_polynomials_expose_coefficients() {
        assert_eq!(polynomial_coefficients("monomial:2"), Some(vec![0.0, 0.0, 1.0]));
        assert_eq!(polynomial_coefficients("poly:1,2"), Some(vec![1.0, 2.0]));
        assert_eq!(polynomial_coefficients("xexp5"), None);
    }
}
