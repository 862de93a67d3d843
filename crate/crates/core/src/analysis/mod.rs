//! Empirical checks of the operator's convergence behaviour: error tables,
//! moduli of continuity, quantitative bounds, the Voronovskaja limit and
//! weighted-norm convergence.

mod bounds;
mod fit;
mod modulus;
mod table;
mod voronovskaja;
mod weighted;

pub use bounds::{
    check_theorem2, check_theorem5, check_theorem6, theorem2_constant_ladder, BoundCheck, ConstantLadder, Lipschitz,
    Theorem2Check, MODULUS_SLACK,
};
pub use fit::{least_squares_slope, log_log_slope};
pub use modulus::{empirical_modulus, ModulusEstimate};
pub use table::{
    closed_form_polynomial, compare_with_reference, error_cell, error_table, CellComparison, CellRecord, ErrorTable,
    Tolerance, TABLE_TOLERANCE,
};
pub use voronovskaja::{voronovskaja_check, voronovskaja_limit, VoronovskajaRecord};
pub use weighted::{weighted_norm_convergence, WeightedNormPoint};
