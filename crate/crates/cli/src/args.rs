//! Argument definitions. Every numeric flag is range-checked here so that
//! malformed values fail as usage errors before any computation starts.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qlandscape::quadrature::Scheme;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "qlandscape", version, about = "Hessian spectrum of the phase-gate control landscape at f0 = 0")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Domain label of a (phi_W, T) point.
    Classify(ClassifyArgs),
    /// Eigenvalues of the discretized K or Hessian operator.
    Spectrum(SpectrumArgs),
    /// Roots of the characteristic equations and the eigenvalues they give.
    Roots(RootsArgs),
    /// Numeric versus analytic comparison at one point.
    Validate(ValidateArgs),
    /// Cross-validation over a uniform grid of the parameter rectangle.
    Sweep(SweepArgs),
    /// Gradient ascent of J from a seeded random control.
    Ascend(AscendArgs),
    /// Second-order probe of f0 along Hessian eigendirections.
    Probe(ProbeArgs),
}

fn finite(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err("must be finite".into())
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let x = finite(s)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err("must be positive".into())
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let x = finite(s)?;
    if x >= 0.0 {
        Ok(x)
    } else {
        Err("must be non-negative".into())
    }
}

/// Grid resolution written `PHIxT`, e.g. `40x20`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Resolution {
    pub phi_steps: usize,
    pub t_steps: usize,
}

fn resolution(s: &str) -> Result<Resolution, String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or("expected PHIxT, e.g. 40x20")?;
    let parse = |p: &str| -> Result<usize, String> {
        match p.trim().parse::<usize>() {
            Ok(n) if (1..=1000).contains(&n) => Ok(n),
            _ => Err(format!("'{p}' is not a step count in 1..=1000")),
        }
    };
    Ok(Resolution {
        phi_steps: parse(a)?,
        t_steps: parse(b)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeArg {
    Trapezoid,
    GaussLegendre,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Trapezoid => Scheme::Trapezoid,
            SchemeArg::GaussLegendre => Scheme::GaussLegendre,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorArg {
    /// The rescaled operator K = Hess / (v² sin 2φ).
    K,
    Hessian,
}

/// A point of the parameter rectangle.
#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct PointArgs {
    /// Gate angle phi_W in (0, pi].
    #[arg(long = "phi-w", value_parser = finite, allow_hyphen_values = true)]
    pub phi_w: f64,
    /// Final time T in (0, pi/2].
    #[arg(long, value_parser = finite, allow_hyphen_values = true)]
    pub t: f64,
    /// Read --phi-w and --t as multiples of pi.
    #[arg(long)]
    pub pi_units: bool,
}

impl PointArgs {
    /// `(φ_W, T)` in radians.
    pub fn radians(&self) -> (f64, f64) {
        if self.pi_units {
            (self.phi_w * PI, self.t * PI)
        } else {
            (self.phi_w, self.t)
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Write results to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Coupling strength |v|.
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub v: f64,
    /// Quadrature nodes.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u32).range(2..=5000))]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = SchemeArg::Trapezoid)]
    pub scheme: SchemeArg,
    /// Zero threshold as a fraction of the largest |eigenvalue|.
    #[arg(long, default_value_t = 1e-8, value_parser = non_negative)]
    pub rho: f64,
    #[arg(long, value_enum, default_value_t = OperatorArg::K)]
    pub operator: OperatorArg,
    /// Eigenvalues listed in the summary, by magnitude.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RootsArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub v: f64,
    /// Brackets searched per oscillatory equation.
    #[arg(long = "n-max", default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..=10000))]
    pub n_max: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub v: f64,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u32).range(2..=2500))]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = SchemeArg::Trapezoid)]
    pub scheme: SchemeArg,
    #[arg(long, default_value_t = 1e-8, value_parser = non_negative)]
    pub rho: f64,
    #[arg(long = "n-max", default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..=10000))]
    pub n_max: u32,
    /// Analytic eigenvalues paired with numeric ones.
    #[arg(long = "top-k", default_value_t = 10)]
    pub top_k: usize,
    /// Skip the repeat at 2N nodes.
    #[arg(long)]
    pub no_refine: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    /// Grid steps along phi_W and T.
    #[arg(long, default_value = "40x20", value_parser = resolution)]
    pub res: Resolution,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub v: f64,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(2..=2500))]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = SchemeArg::Trapezoid)]
    pub scheme: SchemeArg,
    #[arg(long, default_value_t = 1e-8, value_parser = non_negative)]
    pub rho: f64,
    #[arg(long = "n-max", default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..=10000))]
    pub n_max: u32,
    #[arg(long = "top-k", default_value_t = 5)]
    pub top_k: usize,
    #[arg(long)]
    pub no_refine: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AscendArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub v: f64,
    /// Control segments.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(8..=100000))]
    pub segments: u32,
    /// Seed of the random starting control.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Starting amplitudes are uniform in [-amp, amp].
    #[arg(long, default_value_t = 1.0, value_parser = non_negative)]
    pub amp: f64,
    #[arg(long = "max-iters", default_value_t = 500)]
    pub max_iters: usize,
    /// Largest change of any amplitude in one iteration.
    #[arg(long = "max-update", default_value_t = 1.0, value_parser = positive)]
    pub max_update: f64,
    /// Stop once J reaches this value.
    #[arg(long, value_parser = finite)]
    pub target: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProbeArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub v: f64,
    /// Galerkin cells, also the control segment count.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(2..=2000))]
    pub cells: u32,
    /// Gauss order per cell.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..=64))]
    pub order: u32,
    /// Step along each eigendirection, in (1e-4, 1e-1).
    #[arg(long, default_value_t = 1e-2, value_parser = positive)]
    pub eps: f64,
    /// Directions with the largest |eigenvalue|.
    #[arg(long = "top-k", default_value_t = 4)]
    pub top_k: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}
