use lgop_core::analysis::{error_cell, CellRecord, ErrorTable};
use lgop_core::{OperatorParams, TestFunction};
use rayon::prelude::*;

/// Parallel [`lgop_core::analysis::error_table`]; every cell is written to its
/// own slot, so the result does not depend on scheduling.
pub fn error_table_par(columns: &[OperatorParams], f: &TestFunction, xs: &[f64]) -> ErrorTable {
    let nc = columns.len();
    let flat: Vec<lgop_core::Result<CellRecord>> =
        (0..xs.len() * nc).into_par_iter().map(|idx| error_cell(&columns[idx % nc], f, xs[idx / nc])).collect();
    let mut it = flat.into_iter();
    let cells = (0..xs.len()).map(|_| it.by_ref().take(nc).collect()).collect();
    ErrorTable { function: f.name().to_string(), x_grid: xs.to_vec(), columns: columns.to_vec(), cells }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lgop_core::analysis::error_table;

    #[test]
    fn matches_sequential_table() {
        let cols: Vec<_> = [25.0, 60.0].iter().map(|&e| OperatorParams::new(1.0, 0.98, e).unwrap()).collect();
        let xs = [0.0, 0.7, 1.9];
        let f = TestFunction::xexp5();
        let a = error_table_par(&cols, &f, &xs);
        let b = error_table(&cols, &f, &xs);
        for (ra, rb) in a.cells.iter().zip(&b.cells) {
            for (ca, cb) in ra.iter().zip(rb) {
                assert_eq!(ca.as_ref().unwrap(), cb.as_ref().unwrap());
            }
        }
    }
}
