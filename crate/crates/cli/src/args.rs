use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypercert_core::certify::{GridSpec, DEFAULT_MAX_DEPTH, DEFAULT_SLACK};

#[derive(Debug, Parser)]
#[command(name = "hypercert", version, about = "Certified hyperbolic-volume bounds and the constants built on them")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human, env = "HYPERCERT_FORMAT")]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true, env = "HYPERCERT_OUTPUT")]
    pub output: Option<PathBuf>,

    /// Absolute tolerance for the simplex-volume quadrature.
    #[arg(long = "quad-tol", global = true, env = "HYPERCERT_QUAD_TOL", value_parser = parse_positive)]
    pub quad_tol: Option<f64>,

    /// Roundoff allowance subtracted from every margin and Φ⁻ comparison.
    #[arg(long, global = true, default_value_t = DEFAULT_SLACK, env = "HYPERCERT_SLACK", value_parser = parse_nonnegative)]
    pub slack: f64,

    /// Seed for Monte-Carlo sampling.
    #[arg(long, global = true, default_value_t = 1, env = "HYPERCERT_SEED")]
    pub seed: u64,

    /// Monte-Carlo sample count.
    #[arg(long, global = true, default_value_t = 1_000_000, env = "HYPERCERT_SAMPLES", value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// B, b and d at log(3)/2, the λ coefficients and the valence bound.
    Constants,

    /// Check the published 47-cell partition at ε = log 3, R = 2 log 3 + 0.15.
    VerifyLemma,

    /// Certify Φ > c on [R/2 − ε/4, ε] by adaptive bisection.
    Certify {
        /// Margulis parameter ε (a decimal or `log3`).
        #[arg(long, value_parser = parse_epsilon, allow_hyphen_values = true)]
        epsilon: f64,
        /// Outer radius R (a decimal or `log3-paper`).
        #[arg(long = "R", value_parser = parse_r, allow_hyphen_values = true)]
        r_big: f64,
        /// Target lower bound c.
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: u32,
    },

    /// Search a grid of R values for the smallest valence bound.
    Optimize {
        #[arg(long, value_parser = parse_epsilon, allow_hyphen_values = true)]
        epsilon: f64,
        /// `RMIN:RMAX:POINTS`, or a single R.
        #[arg(long, value_parser = parse_grid)]
        grid: GridSpec,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: u32,
    },

    /// Homology and rank bounds for a manifold of the given volume.
    Bound {
        /// Hyperbolic volume of the manifold.
        #[arg(long, allow_hyphen_values = true)]
        volume: f64,
        /// Whether the manifold has cusps.
        #[arg(long, action = clap::ArgAction::Set, default_value_t = false)]
        cusped: bool,
        /// Coefficient field characteristic p.
        #[arg(long, default_value_t = 3)]
        prime: u64,
        /// Margulis parameter for the rank bound (defaults to log 3).
        #[arg(long, value_parser = parse_epsilon, requires_all = ["r_big", "c"], allow_hyphen_values = true)]
        epsilon: Option<f64>,
        /// Outer radius for the rank bound.
        #[arg(long = "R", value_parser = parse_r, requires_all = ["epsilon", "c"], allow_hyphen_values = true)]
        r_big: Option<f64>,
        /// Lower bound on Φ to certify and use.
        #[arg(long, requires_all = ["epsilon", "r_big"], allow_hyphen_values = true)]
        c: Option<f64>,
    },

    /// Compare a closed-form volume with a Monte-Carlo estimate.
    McCheck {
        #[arg(long, value_enum, default_value_t = Shape::Icecream)]
        shape: Shape,
        /// Comma-separated shape parameters; ball r; cap r,w; lens x,y,z; cone a,beta; icecream r,D; phi rho,r,D.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Option<Vec<f64>>,
    },
}

/// Shapes and their parameters: ball `r`; cap `r,w`; lens `x,y,z`;
/// cone `a,beta`; icecream `r,D`; phi `rho,r,D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Shape {
    Ball,
    Cap,
    Lens,
    Cone,
    Icecream,
    Phi,
}

pub fn log3() -> f64 {
    3f64.ln()
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let x = parse_f64(s)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("{x} must be positive"))
    }
}

fn parse_nonnegative(s: &str) -> Result<f64, String> {
    let x = parse_f64(s)?;
    if x >= 0.0 {
        Ok(x)
    } else {
        Err(format!("{x} must not be negative"))
    }
}

pub fn parse_epsilon(s: &str) -> Result<f64, String> {
    match s {
        "log3" => Ok(log3()),
        _ => parse_f64(s),
    }
}

pub fn parse_r(s: &str) -> Result<f64, String> {
    match s {
        "log3-paper" => Ok(2.0 * log3() + 0.15),
        _ => parse_f64(s),
    }
}

pub fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [r] => Ok(GridSpec::single(parse_r(r)?)),
        [lo, hi, n] => {
            let points: usize = n.parse().map_err(|_| format!("`{n}` is not a point count"))?;
            let (r_min, r_max) = (parse_r(lo)?, parse_r(hi)?);
            if points == 0 || r_min > r_max {
                return Err(format!("grid `{s}` is empty"));
            }
            Ok(GridSpec { r_min, r_max, points })
        }
        _ => Err(format!("grid `{s}` is not RMIN:RMAX:POINTS or a single R")),
    }
}
