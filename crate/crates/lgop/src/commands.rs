use lgop_core::analysis::{voronovskaja_check, ErrorTable, TABLE_TOLERANCE};
use lgop_core::operators::moments_closed;
use lgop_core::operators::mu4_as_printed;
use lgop_core::{moments_numerical, OperatorParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Command, RunConfig, DEFAULT_ETAS};
use crate::error::{CliError, CliResult};
use crate::functions::parse_function;
use crate::grid::error_table_par;
use crate::output::{fmt_real, CsvTable, Emitter};
use crate::reference::{ReferenceTable, ETA_GRID, TABLE1, TABLE2, X_GRID};
use crate::suite::{run_suite, VORONOVSKAJA_LADDER};

pub const EVAL_HEADER: [&str; 9] = ["x", "eta", "alpha", "beta", "R_value", "f_value", "abs_error", "tail_mass", "K"];

/// One CSV row of an evaluation command; failed cells carry `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRow {
    pub x: f64,
    pub eta: f64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "R_value")]
    pub r_value: Option<f64>,
    pub f_value: f64,
    pub abs_error: Option<f64>,
    pub tail_mass: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn opt_real(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".to_string(), fmt_real)
}

impl EvalRow {
    fn csv(&self) -> Vec<String> {
        vec![
            fmt_real(self.x),
            fmt_real(self.eta),
            fmt_real(self.alpha),
            fmt_real(self.beta),
            opt_real(self.r_value),
            fmt_real(self.f_value),
            opt_real(self.abs_error),
            opt_real(self.tail_mass),
            self.k.map_or_else(String::new, |k| k.to_string()),
        ]
    }
}

fn rows_of(table: &ErrorTable, f: &lgop_core::TestFunction) -> Vec<EvalRow> {
    let mut rows = Vec::new();
    for (i, &x) in table.x_grid.iter().enumerate() {
        for (j, p) in table.columns.iter().enumerate() {
            let row = match &table.cells[i][j] {
                Ok(c) => EvalRow {
                    x,
                    eta: p.eta,
                    alpha: p.alpha,
                    beta: p.beta,
                    r_value: Some(c.r_value),
                    f_value: c.f_value,
                    abs_error: Some(c.abs_error),
                    tail_mass: Some(c.tail_mass),
                    k: Some(c.truncation_index),
                    error: None,
                },
                Err(e) => EvalRow {
                    x,
                    eta: p.eta,
                    alpha: p.alpha,
                    beta: p.beta,
                    r_value: None,
                    f_value: f.eval(x),
                    abs_error: None,
                    tail_mass: None,
                    k: None,
                    error: Some(e.to_string()),
                },
            };
            rows.push(row);
        }
    }
    rows
}

fn eval_csv(rows: &[EvalRow]) -> CsvTable {
    let mut t = CsvTable::new(&EVAL_HEADER);
    for r in rows {
        t.push(r.csv());
    }
    t
}

/// Rows of x, one column per η, in fixed-width scientific notation.
fn layout(title: &str, table: &ErrorTable) -> String {
    let mut s = format!("{title}\n{:>6}", "x");
    for p in &table.columns {
        s.push_str(&format!(" {:>15}", format!("eta={}", p.eta)));
    }
    s.push('\n');
    for (i, x) in table.x_grid.iter().enumerate() {
        s.push_str(&format!("{x:>6}"));
        for cell in &table.cells[i] {
            match cell {
                Ok(c) => s.push_str(&format!(" {:>15.9}", c.abs_error)),
                Err(_) => s.push_str(&format!(" {:>15}", "failed")),
            }
        }
        s.push('\n');
    }
    s
}

fn failed_cells(rows: &[EvalRow]) -> CliResult<()> {
    match rows.iter().find_map(|r| r.error.as_ref().map(|e| (r, e))) {
        Some((r, e)) => {
            Err(CliError::CellFailed(format!("x={} eta={} alpha={} beta={}: {e}", r.x, r.eta, r.alpha, r.beta)))
        }
        None => Ok(()),
    }
}

#[derive(Debug, Serialize)]
struct TableMirror<'a> {
    command: &'static str,
    function: &'a str,
    rows: &'a [EvalRow],
    discrepancies: Vec<TableMismatch>,
}

/// A cell on the published grid outside `max(1e-5, 1%)` of the printed value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableMismatch {
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
    pub x: f64,
    pub ours: Option<f64>,
    pub reference: f64,
}

fn lookup(table: &ReferenceTable, alpha: f64, beta: f64, eta: f64, x: f64) -> Option<f64> {
    let b = table.blocks.iter().find(|b| b.alpha == alpha && b.beta == beta)?;
    let i = X_GRID.iter().position(|v| *v == x)?;
    let j = ETA_GRID.iter().position(|v| *v == eta)?;
    Some(b.values[i][j])
}

fn run_table(cfg: &RunConfig, table: &ReferenceTable) -> CliResult<()> {
    let f = parse_function(table.function)?;
    let etas = cfg.etas_or(&DEFAULT_ETAS);
    let mut rows = Vec::new();
    let mut summary = String::new();
    for b in &table.blocks {
        let cols: Vec<OperatorParams> =
            etas.iter().map(|&e| cfg.params_with(b.alpha, b.beta, e)).collect::<CliResult<_>>()?;
        let t = error_table_par(&cols, &f, &cfg.xs);
        summary.push_str(&layout(&format!("{} alpha={} beta={}", f.name(), b.alpha, b.beta), &t));
        rows.extend(rows_of(&t, &f));
    }
    let mismatches: Vec<TableMismatch> = rows
        .iter()
        .filter_map(|r| {
            let reference = lookup(table, r.alpha, r.beta, r.eta, r.x)?;
            let ok = r.abs_error.is_some_and(|v| TABLE_TOLERANCE.accepts(v, reference));
            (!ok).then_some(TableMismatch {
                alpha: r.alpha,
                beta: r.beta,
                eta: r.eta,
                x: r.x,
                ours: r.abs_error,
                reference,
            })
        })
        .collect();
    if !mismatches.is_empty() {
        summary.push_str(&format!("{} cells differ from the printed values beyond max(1e-5, 1%):\n", mismatches.len()));
        for m in &mismatches {
            summary.push_str(&format!(
                "  alpha={} beta={} eta={} x={}: ours {} printed {:.9}\n",
                m.alpha,
                m.beta,
                m.eta,
                m.x,
                m.ours.map_or("failed".to_string(), |v| format!("{v:.9}")),
                m.reference
            ));
        }
    }
    let mirror = TableMirror { command: table.name, function: f.name(), rows: &rows, discrepancies: mismatches };
    emitter(cfg).emit(&eval_csv(&rows), &mirror, &summary)?;
    failed_cells(&rows)
}

fn emitter(cfg: &RunConfig) -> Emitter {
    Emitter { out: cfg.out.clone(), json: cfg.json }
}

#[derive(Debug, Serialize)]
struct SweepMirror<'a> {
    command: &'static str,
    function: &'a str,
    rows: &'a [EvalRow],
}

fn run_sweep(cfg: &RunConfig) -> CliResult<()> {
    let f = parse_function(&cfg.function)?;
    let cols: Vec<OperatorParams> =
        cfg.etas_or(&DEFAULT_ETAS).iter().map(|&e| cfg.params(e)).collect::<CliResult<_>>()?;
    let t = error_table_par(&cols, &f, &cfg.xs);
    let rows = rows_of(&t, &f);
    let summary = layout(&format!("{} alpha={} beta={} (absolute error)", f.name(), cfg.alpha, cfg.beta), &t);
    emitter(cfg).emit(
        &eval_csv(&rows),
        &SweepMirror { command: "sweep", function: f.name(), rows: &rows },
        &summary,
    )?;
    failed_cells(&rows)
}

pub const MOMENT_HEADER: [&str; 8] = ["x", "eta", "alpha", "beta", "moment", "closed", "numerical", "rel_diff"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub x: f64,
    pub eta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub moment: &'static str,
    pub closed: f64,
    pub numerical: f64,
    pub rel_diff: f64,
}

fn run_moments(cfg: &RunConfig) -> CliResult<()> {
    let etas = cfg.etas_or(&DEFAULT_ETAS);
    let points: Vec<(f64, f64)> = cfg.xs.iter().flat_map(|&x| etas.iter().map(move |&e| (x, e))).collect();
    let blocks: Vec<Vec<MomentRow>> = points
        .par_iter()
        .map(|&(x, eta)| -> CliResult<Vec<MomentRow>> {
            let p = cfg.params(eta)?;
            let c = moments_closed(&p, x);
            let n = moments_numerical(&p, x)?;
            let pairs = [
                ("m0", c.m0, n.m0),
                ("m1", c.m1, n.m1),
                ("m2", c.m2, n.m2),
                ("m3", c.m3, n.m3),
                ("m4", c.m4, n.m4),
                ("mu1", c.mu1, n.mu1),
                ("mu2", c.mu2, n.mu2),
                ("mu4", c.mu4, n.mu4),
                ("mu4_printed", mu4_as_printed(&p, x), n.mu4),
            ];
            Ok(pairs
                .iter()
                .map(|&(moment, closed, numerical)| {
                    let scale = closed.abs().max(numerical.abs());
                    let rel_diff = if scale == 0.0 { 0.0 } else { (closed - numerical).abs() / scale };
                    MomentRow { x, eta, alpha: p.alpha, beta: p.beta, moment, closed, numerical, rel_diff }
                })
                .collect())
        })
        .collect::<CliResult<_>>()?;
    let rows: Vec<MomentRow> = blocks.into_iter().flatten().collect();
    let mut csv = CsvTable::new(&MOMENT_HEADER);
    for r in &rows {
        csv.push(vec![
            fmt_real(r.x),
            fmt_real(r.eta),
            fmt_real(r.alpha),
            fmt_real(r.beta),
            r.moment.to_string(),
            fmt_real(r.closed),
            fmt_real(r.numerical),
            fmt_real(r.rel_diff),
        ]);
    }
    let worst =
        |pred: &dyn Fn(&MomentRow) -> bool| rows.iter().filter(|r| pred(r)).map(|r| r.rel_diff).fold(0.0, f64::max);
    let summary = format!(
        "{} points; worst relative difference: raw {:.3e}, central {:.3e}, printed mu4 {:.3e}\n",
        points.len(),
        worst(&|r| r.moment.starts_with('m') && !r.moment.starts_with("mu")),
        worst(&|r| r.moment.starts_with("mu") && r.moment != "mu4_printed"),
        worst(&|r| r.moment == "mu4_printed"),
    );
    emitter(cfg).emit(&csv, &rows, &summary)
}

pub const VORONOVSKAJA_HEADER: [&str; 9] =
    ["x", "eta", "alpha", "beta", "scaled_error", "predicted_limit", "deviation", "floor", "used"];

#[derive(Debug, Clone, PartialEq, Serialize)]
struct VoronovskajaMirror {
    x: f64,
    alpha: f64,
    beta: f64,
    predicted_limit: f64,
    eta: Vec<f64>,
    scaled_error: Vec<f64>,
    deviation: Vec<f64>,
    floor: Vec<f64>,
    used: Vec<bool>,
    slope: Option<f64>,
}

fn run_voronovskaja(cfg: &RunConfig) -> CliResult<()> {
    let f = parse_function(&cfg.function)?;
    let etas = cfg.etas_or(&VORONOVSKAJA_LADDER);
    let p = cfg.params(etas[0])?;
    let records =
        cfg.xs.par_iter().map(|&x| voronovskaja_check(&p, &etas, &f, x)).collect::<lgop_core::Result<Vec<_>>>()?;
    let mut csv = CsvTable::new(&VORONOVSKAJA_HEADER);
    let mut summary = String::new();
    let mut mirror = Vec::new();
    for r in &records {
        for (i, &eta) in r.eta_ladder.iter().enumerate() {
            csv.push(vec![
                fmt_real(r.x),
                fmt_real(eta),
                fmt_real(p.alpha),
                fmt_real(p.beta),
                fmt_real(r.scaled_errors[i]),
                fmt_real(r.predicted_limit),
                fmt_real(r.deviations[i]),
                fmt_real(r.floors[i]),
                r.used[i].to_string(),
            ]);
        }
        summary.push_str(&format!(
            "{} x={}: limit {:.10} slope {}\n",
            f.name(),
            r.x,
            r.predicted_limit,
            r.slope.map_or("n/a (below precision floor)".to_string(), |s| format!("{s:.4}"))
        ));
        mirror.push(VoronovskajaMirror {
            x: r.x,
            alpha: p.alpha,
            beta: p.beta,
            predicted_limit: r.predicted_limit,
            eta: r.eta_ladder.clone(),
            scaled_error: r.scaled_errors.clone(),
            deviation: r.deviations.clone(),
            floor: r.floors.clone(),
            used: r.used.clone(),
            slope: r.slope,
        });
    }
    emitter(cfg).emit(&csv, &mirror, &summary)
}

pub const SUITE_HEADER: [&str; 4] = ["criterion", "name", "passed", "summary"];

fn run_theorem_check(cfg: &RunConfig) -> CliResult<()> {
    let report = run_suite()?;
    let mut csv = CsvTable::new(&SUITE_HEADER);
    let mut summary = String::new();
    for c in &report.criteria {
        csv.push(vec![c.id.to_string(), c.name.to_string(), c.passed.to_string(), c.summary.clone()]);
        summary.push_str(&c.line());
        summary.push('\n');
        for d in &c.discrepancies {
            summary.push_str(&format!(
                "      {} alpha={} beta={} eta={} x={}: ours {} printed {:.9} budget {} closed-form {}{}\n",
                d.table,
                d.alpha,
                d.beta,
                d.eta,
                d.x,
                d.ours.map_or("failed".to_string(), |v| format!("{v:.9}")),
                d.reference,
                d.budget.map_or("n/a".to_string(), |v| format!("{v:.1e}")),
                d.closed_form.map_or("n/a".to_string(), |v| format!("{v:.9}")),
                if d.arbitrated { " (agrees)" } else { "" },
            ));
        }
    }
    for note in &report.informational {
        summary.push_str(&format!("[INFO] {note}\n"));
    }
    emitter(cfg).emit(&csv, &report, &summary)?;
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<String> = report.criteria.iter().filter(|c| !c.passed).map(|c| c.id.to_string()).collect();
        Err(CliError::Criteria(format!("criteria failed: {}", failed.join(", "))))
    }
}

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    match cfg.command {
        Command::Table1 => run_table(cfg, &TABLE1),
        Command::Table2 => run_table(cfg, &TABLE2),
        Command::Moments => run_moments(cfg),
        Command::Voronovskaja => run_voronovskaja(cfg),
        Command::TheoremCheck => run_theorem_check(cfg),
        Command::Sweep => run_sweep(cfg),
    }
}
