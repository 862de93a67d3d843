use alloc::string::String;
use alloc::vec::Vec;

use crate::function::TestFunction;
use crate::math;
use crate::operators::{apply_r, raw_moments_closed, OperatorParams};
use crate::{Error, Result};

/// One cell `|R(Φ; x) - Φ(x)|` with its numerical budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellRecord {
    pub x: f64,
    pub params: OperatorParams,
    pub r_value: f64,
    pub f_value: f64,
    pub abs_error: f64,
    pub tail_mass: f64,
    pub truncation_index: usize,
    pub error_budget: f64,
}

/// Absolute errors on an `x × params` grid; rows follow `x_grid`, columns
/// follow `columns`. A failed cell keeps its error instead of aborting the table.
#[derive(Debug, Clone)]
pub struct ErrorTable {
    pub function: String,
    pub x_grid: Vec<f64>,
    pub columns: Vec<OperatorParams>,
    pub cells: Vec<Vec<core::result::Result<CellRecord, Error>>>,
}

impl ErrorTable {
    pub fn ok_cells(&self) -> impl Iterator<Item = &CellRecord> {
        self.cells.iter().flatten().filter_map(|c| c.as_ref().ok())
    }

    pub fn failed_cells(&self) -> usize {
        self.cells.iter().flatten().filter(|c| c.is_err()).count()
    }
}

pub fn error_cell(params: &OperatorParams, f: &TestFunction, x: f64) -> Result<CellRecord> {
    let v = apply_r(params, f, x)?;
    let f_value = f.eval(x);
    Ok(CellRecord {
        x,
        params: *params,
        r_value: v.value,
        f_value,
        abs_error: math::abs(v.value - f_value),
        tail_mass: v.tail_mass,
        truncation_index: v.truncation_index,
        error_budget: v.error_estimate + 4.0 * f64::EPSILON * (math::abs(v.value) + math::abs(f_value)),
    })
}

pub fn error_table(params_list: &[OperatorParams], f: &TestFunction, x_grid: &[f64]) -> ErrorTable {
    let cells = x_grid.iter().map(|&x| params_list.iter().map(|p| error_cell(p, f, x)).collect()).collect();
    ErrorTable { function: String::from(f.name()), x_grid: x_grid.to_vec(), columns: params_list.to_vec(), cells }
}

/// Cell passes when `|ours - reference| <= max(abs, rel · |reference|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn accepts(&self, ours: f64, reference: f64) -> bool {
        math::abs(ours - reference) <= self.abs.max(self.rel * math::abs(reference))
    }
}

pub const TABLE_TOLERANCE: Tolerance = Tolerance { abs: 1e-5, rel: 0.01 };

#[derive(Debug, Clone, PartialEq)]
pub struct CellComparison {
    pub x: f64,
    pub params: OperatorParams,
    /// `None` when the cell failed to evaluate.
    pub ours: Option<f64>,
    pub reference: f64,
    pub budget: Option<f64>,
    pub within: bool,
}

/// Matches a table against reference values laid out the same way
/// (`reference[row][column]`).
pub fn compare_with_reference(table: &ErrorTable, reference: &[Vec<f64>], tol: Tolerance) -> Vec<CellComparison> {
    let mut out = Vec::new();
    for (r, row) in table.cells.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            let Some(&expected) = reference.get(r).and_then(|row| row.get(c)) else {
                continue;
            };
            let (ours, budget) = match cell {
                Ok(rec) => (Some(rec.abs_error), Some(rec.error_budget)),
                Err(_) => (None, None),
            };
            out.push(CellComparison {
                x: table.x_grid[r],
                params: table.columns[c],
                ours,
                reference: expected,
                budget,
                within: ours.is_some_and(|o| tol.accepts(o, expected)),
            });
        }
    }
    out
}

/// `R(Σ cⱼ zʲ; x)` from the closed-form raw moments (degree at most four).
pub fn closed_form_polynomial(params: &OperatorParams, coeffs: &[f64], x: f64) -> Option<f64> {
    if coeffs.len() > 5 {
        return None;
    }
    let m = raw_moments_closed(params, x);
    let m = [m.m0, m.m1, m.m2, m.m3, m.m4];
    Some(coeffs.iter().zip(m).map(|(c, mj)| c * mj).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn constant_function_has_zero_error() {
        let p = OperatorParams::new(1.0, 0.98, 25.0).unwrap();
        let t = error_table(&[p, p.with_eta(50.0).unwrap()], &TestFunction::monomial(0), &[0.0, 1.0, 2.0]);
        assert_eq!(t.failed_cells(), 0);
        assert!(t.ok_cells().all(|c| c.abs_error <= 1e-10));
    }

    #[test]
    fn failed_cells_are_kept() {
        let p = OperatorParams::new(1.0, 1.0, 25.0).unwrap();
        let t = error_table(&[p], &TestFunction::new("nan", |_| f64::NAN), &[0.5, 1.0]);
        assert_eq!(t.failed_cells(), 2);
        let cmp = compare_with_reference(&t, &[vec![0.1], vec![0.2]], TABLE_TOLERANCE);
        assert!(cmp.iter().all(|c| !c.within && c.ours.is_none()));
    }

    #[test]
    fn example_cells() {
        let f = TestFunction::xexp5();
        let p = OperatorParams::new(1.0, 0.98, 100.0).unwrap();
        let c = error_cell(&p, &f, 2.0).unwrap();
        assert!(TABLE_TOLERANCE.accepts(c.abs_error, 0.000081252), "{}", c.abs_error);

        let p = OperatorParams::new(0.5, 2.0, 25.0).unwrap();
        let c = error_cell(&p, &TestFunction::cubic(), 1.0).unwrap();
        let closed = closed_form_polynomial(&p, &[3.0, 0.0, -2.0, 1.0], 1.0).unwrap();
        assert!((c.r_value - closed).abs() <= 1e-10);
    }

    #[test]
    fn tolerance_rule() {
        assert!(TABLE_TOLERANCE.accepts(0.0, 9e-6));
        assert!(!TABLE_TOLERANCE.accepts(0.0, 2e-5));
        assert!(TABLE_TOLERANCE.accepts(1.005, 1.0));
        assert!(!TABLE_TOLERANCE.accepts(1.02, 1.0));
    }
}
