use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use lgop_core::OperatorParams;

use crate::error::{CliError, CliResult};
use crate::functions::parse_reals;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Absolute errors for x e^(-5x) in the first published layout
    Table1,
    /// Absolute errors for x^3 - 2x^2 + 3 in the second published layout
    Table2,
    /// Closed-form against numerical moments
    Moments,
    /// eta * (R - f) along an eta ladder against its predicted limit
    Voronovskaja,
    /// Run every acceptance criterion and report pass/fail
    TheoremCheck,
    /// Evaluate R on a user grid
    Sweep,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    #[arg(long, global = true, default_value_t = 1.0, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, global = true, default_value_t = 0.98, allow_hyphen_values = true)]
    pub beta: f64,
    /// Comma-separated eta values [default: 25,50,75,100; voronovskaja: 1e2,1e3,1e4,1e5]
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub eta: Option<String>,
    /// Comma-separated evaluation points [default: 0,0.5,1,1.5,2]
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// xexp5, cubic, sqrt, monomial:j or poly:c0,c1,...
    #[arg(long, global = true, default_value = "xexp5")]
    pub function: String,
    /// Series truncation mass
    #[arg(long, global = true, default_value_t = lgop_core::special::DEFAULT_TRUNCATION_EPS)]
    pub eps: f64,
    /// Gauss rule order for non-polynomial functions
    #[arg(long = "quad-order", global = true, default_value_t = lgop_core::operators::DEFAULT_QUAD_ORDER)]
    pub quad_order: usize,
    /// CSV destination; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write a JSON mirror (FILE.json next to --out, or stdout instead of CSV)
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "lgop", version, about = "Evaluate and check the gamma-kernel Laguerre operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

pub const DEFAULT_ETAS: [f64; 4] = [25.0, 50.0, 75.0, 100.0];
pub const DEFAULT_XS: [f64; 5] = [0.0, 0.5, 1.0, 1.5, 2.0];

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub alpha: f64,
    pub beta: f64,
    /// `None` keeps the command's own default ladder.
    pub etas: Option<Vec<f64>>,
    pub xs: Vec<f64>,
    pub function: String,
    pub truncation_eps: f64,
    pub quad_order: usize,
    pub out: Option<PathBuf>,
    pub json: bool,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> CliResult<Self> {
        let o = cli.options;
        let etas = o.eta.as_deref().map(|s| parse_reals(s, "eta")).transpose()?;
        let xs = match o.x.as_deref() {
            Some(s) => parse_reals(s, "x")?,
            None => DEFAULT_XS.to_vec(),
        };
        let cfg = Self {
            command: cli.command,
            alpha: o.alpha,
            beta: o.beta,
            etas,
            xs,
            function: o.function,
            truncation_eps: o.eps,
            quad_order: o.quad_order,
            out: o.out,
            json: o.json,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        self.params(self.etas.as_ref().map_or(DEFAULT_ETAS[0], |e| e[0]))?;
        for &e in self.etas.iter().flatten() {
            if e <= 0.0 {
                return Err(CliError::Validation(format!("eta must be positive, got {e}")));
            }
        }
        if let Some(x) = self.xs.iter().find(|x| **x < 0.0) {
            return Err(CliError::Validation(format!("x must be nonnegative, got {x}")));
        }
        crate::functions::parse_function(&self.function)?;
        Ok(())
    }

    pub fn etas_or(&self, default: &[f64]) -> Vec<f64> {
        self.etas.clone().unwrap_or_else(|| default.to_vec())
    }

    /// Operator parameters at one `η` with this run's knobs.
    pub fn params(&self, eta: f64) -> CliResult<OperatorParams> {
        self.params_with(self.alpha, self.beta, eta)
    }

    pub fn params_with(&self, alpha: f64, beta: f64, eta: f64) -> CliResult<OperatorParams> {
        let p = OperatorParams::new(alpha, beta, eta)
            .and_then(|p| p.with_eps(self.truncation_eps))
            .and_then(|p| p.with_quad_order(self.quad_order));
        p.map_err(|e| CliError::Validation(e.to_string()))
    }
}
