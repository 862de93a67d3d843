//! The ten acceptance criteria, each returning a structured verdict.

use lgop_core::analysis::{
    check_theorem5, check_theorem6, closed_form_polynomial, compare_with_reference, theorem2_constant_ladder,
    voronovskaja_check, weighted_norm_convergence, Lipschitz, TABLE_TOLERANCE,
};
use lgop_core::operators::mu4_as_printed;
use lgop_core::{
    central_moments_closed, kernel_expectation, kernel_expectation_adaptive, moments_numerical, raw_moments_closed,
    weight_sequence, GammaKernel, OperatorParams, TestFunction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliResult;
use crate::grid::error_table_par;
use crate::reference::{ReferenceTable, ETA_GRID, TABLE1, TABLE2, X_GRID};

pub const MOMENT_ALPHAS: [f64; 5] = [-0.5, 0.5, 1.0, 2.0, 5.0];
pub const MOMENT_BETAS: [f64; 4] = [0.5, 0.98, 2.0, 10.0];
pub const MOMENT_ETAS: [f64; 3] = [25.0, 50.0, 100.0];
pub const MOMENT_XS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 5.0];
/// Cells per block that must match the printed tables.
pub const TABLE_MIN_MATCHES: usize = 18;
pub const SEED: u64 = 0x5eed_1a60;

/// A printed table cell we do not reproduce within tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub table: &'static str,
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
    pub x: f64,
    pub ours: Option<f64>,
    pub reference: f64,
    pub budget: Option<f64>,
    /// `|R(Φ;x) - Φ(x)|` predicted by the closed-form moments, for polynomials.
    pub closed_form: Option<f64>,
    /// Our value agrees with the closed form to `1e-10`.
    pub arbitrated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub summary: String,
    pub discrepancies: Vec<Discrepancy>,
    pub notes: Vec<String>,
}

impl CriterionReport {
    fn new(id: u8, name: &'static str, passed: bool, summary: String) -> Self {
        Self { id, name, passed, summary, discrepancies: Vec::new(), notes: Vec::new() }
    }

    /// One line: `[PASS] 3 table1-reproduction: ...`.
    pub fn line(&self) -> String {
        format!("[{}] {:>2} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name, self.summary)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub criteria: Vec<CriterionReport>,
    /// Checks reported without a verdict.
    pub informational: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }
}

fn moment_grid() -> Vec<(OperatorParams, f64)> {
    let mut g = Vec::new();
    for &a in &MOMENT_ALPHAS {
        for &b in &MOMENT_BETAS {
            for &e in &MOMENT_ETAS {
                for &x in &MOMENT_XS {
                    g.push((OperatorParams::new(a, b, e).expect("grid parameters are valid"), x));
                }
            }
        }
    }
    g
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Raw moments from the series and quadrature against the closed forms.
pub fn criterion1_moments() -> CliResult<CriterionReport> {
    let mut worst = (0.0, String::new());
    for (p, x) in moment_grid() {
        let c = raw_moments_closed(&p, x);
        let n = moments_numerical(&p, x)?;
        for (j, (c, n)) in [c.m0, c.m1, c.m2, c.m3, c.m4].into_iter().zip([n.m0, n.m1, n.m2, n.m3, n.m4]).enumerate() {
            let d = rel_diff(c, n);
            if d > worst.0 {
                worst = (d, format!("m{j} at alpha={} beta={} eta={} x={x}", p.alpha, p.beta, p.eta));
            }
        }
    }
    Ok(CriterionReport::new(
        1,
        "moment-identities",
        worst.0 <= 1e-8,
        format!("300 points, worst relative difference {:.3e} ({}), limit 1e-8", worst.0, worst.1),
    ))
}

pub fn criterion2_normalization() -> CliResult<CriterionReport> {
    let mut worst: f64 = 0.0;
    for (p, x) in moment_grid() {
        let ws = weight_sequence(x, &p, p.truncation_eps)?;
        worst = worst.max((ws.total() - 1.0).abs());
    }
    Ok(CriterionReport::new(
        2,
        "weight-normalization",
        worst <= 1e-11,
        format!("300 points, max |sum w - 1| = {worst:.3e}, limit 1e-11"),
    ))
}

/// Our absolute errors next to one published table plus the mismatching cells.
#[derive(Debug, Clone)]
pub struct TableReproduction {
    pub matches_per_block: Vec<usize>,
    pub discrepancies: Vec<Discrepancy>,
}

pub fn reproduce_table(table: &ReferenceTable) -> CliResult<TableReproduction> {
    let f = crate::functions::parse_function(table.function)?;
    let coeffs = crate::functions::polynomial_coefficients(table.function);
    let mut matches_per_block = Vec::new();
    let mut discrepancies = Vec::new();
    for block in &table.blocks {
        let cols: Vec<OperatorParams> = ETA_GRID
            .iter()
            .map(|&e| OperatorParams::new(block.alpha, block.beta, e))
            .collect::<lgop_core::Result<_>>()?;
        let t = error_table_par(&cols, &f, &X_GRID);
        let cmp = compare_with_reference(&t, &block.rows(), TABLE_TOLERANCE);
        matches_per_block.push(cmp.iter().filter(|c| c.within).count());
        for c in cmp.into_iter().filter(|c| !c.within) {
            let closed_form = coeffs
                .as_ref()
                .and_then(|k| closed_form_polynomial(&c.params, k, c.x))
                .map(|r| (r - f.eval(c.x)).abs());
            let arbitrated = match (c.ours, closed_form) {
                (Some(o), Some(cf)) => (o - cf).abs() <= 1e-10 * cf.abs().max(1.0),
                _ => false,
            };
            discrepancies.push(Discrepancy {
                table: table.name,
                alpha: block.alpha,
                beta: block.beta,
                eta: c.params.eta,
                x: c.x,
                ours: c.ours,
                reference: c.reference,
                budget: c.budget,
                closed_form,
                arbitrated,
            });
        }
    }
    Ok(TableReproduction { matches_per_block, discrepancies })
}

fn table_summary(r: &TableReproduction) -> String {
    let counts: Vec<String> = r.matches_per_block.iter().map(|m| format!("{m}/20")).collect();
    format!("cells within max(1e-5, 1%) per block: {}; {} discrepancies", counts.join(", "), r.discrepancies.len())
}

pub fn criterion3_table1() -> CliResult<CriterionReport> {
    let r = reproduce_table(&TABLE1)?;
    let passed = r.matches_per_block.iter().all(|&m| m >= TABLE_MIN_MATCHES);
    let mut rep = CriterionReport::new(3, "table1-reproduction", passed, table_summary(&r));
    rep.discrepancies = r.discrepancies;
    Ok(rep)
}

/// Polynomial table: mismatches are acceptable when the closed form backs our value.
pub fn criterion4_table2() -> CliResult<CriterionReport> {
    let r = reproduce_table(&TABLE2)?;
    let enough = r.matches_per_block.iter().all(|&m| m >= TABLE_MIN_MATCHES);
    let arbitrated = r.discrepancies.iter().all(|d| d.arbitrated);
    let mut summary = table_summary(&r);
    if !r.discrepancies.is_empty() {
        let n = r.discrepancies.iter().filter(|d| d.arbitrated).count();
        summary.push_str(&format!("; {n} of them agree with the closed-form moments to 1e-10"));
    }
    let mut rep = CriterionReport::new(4, "table2-reproduction", enough || arbitrated, summary);
    rep.discrepancies = r.discrepancies;
    Ok(rep)
}

pub const VORONOVSKAJA_LADDER: [f64; 4] = [1e2, 1e3, 1e4, 1e5];

pub fn criterion5_voronovskaja() -> CliResult<CriterionReport> {
    let cases =
        [(1.0, 1.0, TestFunction::monomial(2)), (0.5, 2.0, TestFunction::cubic()), (1.0, 0.98, TestFunction::xexp5())];
    let records: Vec<_> = cases
        .par_iter()
        .map(|(a, b, f)| {
            let p = OperatorParams::new(*a, *b, VORONOVSKAJA_LADDER[0])?;
            voronovskaja_check(&p, &VORONOVSKAJA_LADDER, f, 1.0).map(|r| (f.name().to_string(), r))
        })
        .collect::<lgop_core::Result<_>>()?;
    let mut passed = true;
    let mut parts = Vec::new();
    let mut notes = Vec::new();
    for (name, r) in &records {
        let used = r.used.iter().filter(|u| **u).count();
        let ok = used >= 3 && r.slope.is_some_and(|s| (-1.3..=-0.7).contains(&s));
        passed &= ok;
        parts.push(format!(
            "{name} limit {:.6} slope {} over {used} etas",
            r.predicted_limit,
            r.slope.map_or("n/a".to_string(), |s| format!("{s:.4}"))
        ));
        for (i, &eta) in r.eta_ladder.iter().enumerate() {
            notes.push(format!(
                "{name} eta={eta:e}: eta*error={:.10e} deviation={:.3e} floor={:.3e} used={}",
                r.scaled_errors[i], r.deviations[i], r.floors[i], r.used[i]
            ));
        }
    }
    let mut rep = CriterionReport::new(5, "voronovskaja-rate", passed, parts.join("; "));
    rep.notes = notes;
    Ok(rep)
}

/// x-grid points of both tables with their parameter blocks and functions.
fn table_points() -> CliResult<Vec<(OperatorParams, TestFunction, f64)>> {
    let mut pts = Vec::new();
    for table in [&TABLE1, &TABLE2] {
        let f = crate::functions::parse_function(table.function)?;
        for b in &table.blocks {
            for &e in &ETA_GRID {
                for &x in &X_GRID {
                    pts.push((OperatorParams::new(b.alpha, b.beta, e)?, f.clone(), x));
                }
            }
        }
    }
    Ok(pts)
}

/// Moduli are measured on `[0, THEOREM_DOMAIN_END]`.
pub const THEOREM_DOMAIN_END: f64 = 10.0;

pub fn criterion6_theorem5() -> CliResult<CriterionReport> {
    let pts = table_points()?;
    let checks: Vec<_> = pts
        .par_iter()
        .map(|(p, f, x)| check_theorem5(p, f, *x, THEOREM_DOMAIN_END).map(|c| (p.alpha, p.beta, p.eta, *x, c)))
        .collect::<lgop_core::Result<_>>()?;
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.4.holds)
        .map(|(a, b, e, x, c)| format!("alpha={a} beta={b} eta={e} x={x}: {:.6e} > {:.6e}", c.lhs, c.rhs))
        .collect();
    let tightest = checks.iter().map(|c| c.4.lhs / c.4.rhs).filter(|r| r.is_finite()).fold(0.0, f64::max);
    let mut rep = CriterionReport::new(
        6,
        "modulus-bound",
        failed.is_empty(),
        format!("{} of {} points hold, largest lhs/rhs {tightest:.4}", checks.len() - failed.len(), checks.len()),
    );
    rep.notes = failed;
    Ok(rep)
}

pub const LIPSCHITZ_ETAS: [f64; 5] = [25.0, 50.0, 100.0, 200.0, 400.0];
pub const LIPSCHITZ_XS: [f64; 4] = [0.25, 0.5, 1.0, 2.0];

pub fn criterion7_lipschitz() -> CliResult<CriterionReport> {
    let cases = [
        (TestFunction::sqrt(), Lipschitz { constant: 1.0, exponent: 0.5 }),
        (TestFunction::xexp5(), Lipschitz { constant: 1.0, exponent: 1.0 }),
    ];
    let mut total = 0;
    let mut failed = Vec::new();
    let mut tightest: f64 = 0.0;
    for (f, lip) in &cases {
        for &e in &LIPSCHITZ_ETAS {
            let p = OperatorParams::new(1.0, 0.98, e)?;
            for &x in &LIPSCHITZ_XS {
                let c = check_theorem6(&p, f, x, *lip)?;
                total += 1;
                tightest = tightest.max(c.lhs / c.rhs);
                if !c.holds {
                    failed.push(format!("{} eta={e} x={x}: {:.6e} > {:.6e}", f.name(), c.lhs, c.rhs));
                }
            }
        }
    }
    let mut rep = CriterionReport::new(
        7,
        "lipschitz-bound",
        failed.is_empty(),
        format!("{} of {total} points hold (alpha=1, beta=0.98), largest lhs/rhs {tightest:.4}", total - failed.len()),
    );
    rep.notes = failed;
    Ok(rep)
}

pub const WEIGHTED_DOMAIN_END: f64 = 50.0;
pub const WEIGHTED_POINTS: usize = 201;

pub fn criterion8_weighted() -> CliResult<CriterionReport> {
    let p = OperatorParams::new(1.0, 0.98, 25.0)?;
    let mut passed = true;
    let mut parts = Vec::new();
    for j in [1, 2] {
        let pts = weighted_norm_convergence(
            &p,
            &[25.0, 400.0],
            &TestFunction::monomial(j),
            WEIGHTED_DOMAIN_END,
            WEIGHTED_POINTS,
        )?;
        let limit = 25.0 / 400.0 * pts[0].norm * 1.1;
        passed &= pts[1].norm <= limit;
        parts.push(format!("j={j}: {:.6e} -> {:.6e} (limit {:.6e})", pts[0].norm, pts[1].norm, limit));
    }
    Ok(CriterionReport::new(8, "weighted-convergence", passed, parts.join("; ")))
}

/// `μ₂` and `μ₄` from the raw moments by the binomial expansion.
fn expanded_central(p: &OperatorParams, x: f64) -> (f64, f64, f64) {
    let m = raw_moments_closed(p, x);
    let mu2 = m.m2 - 2.0 * x * m.m1 + x * x;
    let mu4 = m.m4 - 4.0 * x * m.m3 + 6.0 * x * x * m.m2 - 4.0 * x.powi(3) * m.m1 + x.powi(4);
    // magnitude of the summands, for the cancellation-aware tolerance
    let scale4 = m.m4 + 4.0 * x * m.m3 + 6.0 * x * x * m.m2 + 4.0 * x.powi(3) * m.m1 + x.powi(4);
    (mu2, mu4, scale4)
}

pub fn criterion9_central_audit() -> CliResult<CriterionReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst2: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    let mut worst_printed: f64 = 0.0;
    let mut notes = Vec::new();
    for _ in 0..20 {
        let p = OperatorParams::new(rng.gen_range(-0.9..6.0), rng.gen_range(0.2..12.0), rng.gen_range(5.0..200.0))?;
        let x = rng.gen_range(0.0..5.0);
        let (mu2, mu4, scale4) = expanded_central(&p, x);
        let c = central_moments_closed(&p, x);
        worst2 = worst2.max(rel_diff(c.mu2, mu2));
        let printed = mu4_as_printed(&p, x);
        let missing = -18.0 * p.alpha * p.alpha * x / p.eta.powi(3);
        worst_printed = worst_printed.max((printed - mu4).abs() / scale4);
        worst_gap = worst_gap.max(((printed - mu4) - missing).abs() / scale4);
        notes.push(format!(
            "alpha={:.4} beta={:.4} eta={:.3} x={x:.4}: mu4 expanded={mu4:.12e} printed={printed:.12e} corrected={:.12e}",
            p.alpha, p.beta, p.eta, c.mu4
        ));
    }
    let mu4_verdict = if worst_printed <= 1e-12 {
        "match".to_string()
    } else if worst_gap <= 1e-12 {
        format!(
            "MISMATCH (worst {worst_printed:.3e} of the summand scale); printed - expanded = -18 alpha^2 x / eta^3 \
             at every point (residual {worst_gap:.1e})"
        )
    } else {
        format!("MISMATCH (worst {worst_printed:.3e} of the summand scale, not explained by a single term)")
    };
    let mut rep = CriterionReport::new(
        9,
        "central-moment-audit",
        worst2 <= 1e-12,
        format!(
            "mu2 printed vs expansion on 20 random points: worst relative {worst2:.3e} (limit 1e-12); \
             mu4 printed under the beta^3 reading: {mu4_verdict} [informational]"
        ),
    );
    rep.notes = notes;
    Ok(rep)
}

pub const KERNEL_BETAS: [f64; 4] = [0.5, 0.98, 2.0, 10.0];
pub const KERNEL_ETAS: [f64; 4] = [25.0, 50.0, 75.0, 100.0];

pub fn criterion10_quadrature() -> CliResult<CriterionReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x0a);
    let fs = [TestFunction::xexp5(), TestFunction::cubic()];
    let mut worst = (0.0, String::new());
    let mut count = 0;
    for _ in 0..100 {
        let kappa = rng.gen_range(1..=50usize);
        let beta = KERNEL_BETAS[rng.gen_range(0..KERNEL_BETAS.len())];
        let eta = KERNEL_ETAS[rng.gen_range(0..KERNEL_ETAS.len())];
        let k = GammaKernel::for_term(kappa, beta, eta)?;
        for f in &fs {
            let gauss = kernel_expectation(&k, f, lgop_core::operators::DEFAULT_QUAD_ORDER)?;
            let adaptive = kernel_expectation_adaptive(&k, f, 1e-300, 1e-12)?;
            let d = rel_diff(gauss, adaptive);
            count += 1;
            if d > worst.0 {
                worst = (d, format!("{} kappa={kappa} beta={beta} eta={eta}", f.name()));
            }
        }
    }
    Ok(CriterionReport::new(
        10,
        "quadrature-oracle",
        worst.0 <= 1e-8,
        format!("{count} expectations on 100 kernels, worst relative {:.3e} ({}), limit 1e-8", worst.0, worst.1),
    ))
}

pub fn all_criteria() -> [fn() -> CliResult<CriterionReport>; 10] {
    [
        criterion1_moments,
        criterion2_normalization,
        criterion3_table1,
        criterion4_table2,
        criterion5_voronovskaja,
        criterion6_theorem5,
        criterion7_lipschitz,
        criterion8_weighted,
        criterion9_central_audit,
        criterion10_quadrature,
    ]
}

/// Minimal constants of the second-order bound along an `η` ladder.
pub fn theorem2_note() -> CliResult<String> {
    let p = OperatorParams::new(1.0, 0.98, 25.0)?;
    let l = theorem2_constant_ladder(&p, &LIPSCHITZ_ETAS, &TestFunction::xexp5(), 1.0, THEOREM_DOMAIN_END)?;
    let cs: Vec<String> = l.constants.iter().map(|c| format!("{c:.4}")).collect();
    Ok(format!(
        "second-order bound, xexp5 at x=1, eta {:?}: minimal constants [{}], bounded={}",
        l.etas,
        cs.join(", "),
        l.bounded
    ))
}

pub fn run_suite() -> CliResult<SuiteReport> {
    let criteria = all_criteria().iter().map(|c| c()).collect::<CliResult<Vec<_>>>()?;
    Ok(SuiteReport { criteria, informational: vec![theorem2_note()?] })
}
