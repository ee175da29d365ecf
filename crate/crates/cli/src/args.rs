use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "shellmodes", version, about = "Lowest vibration modes of thin clamped axisymmetric shells")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Shell class, concentration point and essential spectrum as JSON.
    Classify(ShapeArgs),
    /// Asymptotic constants and exponents as JSON.
    Asymptotics(AsymptoticsArgs),
    /// Scan of the reduced eigenvalue against the wavenumber prefactor.
    Sweep1d(Sweep1dArgs),
    /// Fourier-Lame eigenvalue sweeps over azimuthal frequencies.
    Sweep2d(Sweep2dArgs),
    /// Toroidal constants against the arc-center radius.
    TorusSweep(TorusArgs),
    /// Identity and oracle checks with their residuals.
    Verify(VerifyArgs),
}

#[derive(Clone, Debug, Args)]
pub struct ShapeArgs {
    /// Preset shell: A, B, D, H or L.
    #[arg(long, conflicts_with = "profile", required_unless_present = "profile")]
    pub model: Option<String>,
    /// JSON profile description.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct CommonArgs {
    /// Worker threads; 0 picks one per core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Number of 1D elements in the reduced problems.
    #[arg(long, default_value_t = shellmodes_core::fem1d::DEFAULT_ELEMENTS)]
    pub elements: usize,
}

#[derive(Clone, Debug, Args)]
pub struct AsymptoticsArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Half-thicknesses at which to evaluate the power laws.
    #[arg(long, value_delimiter = ',')]
    pub eps: Vec<f64>,
}

#[derive(Clone, Debug, Args)]
pub struct Sweep1dArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Scan range `lo,hi`.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub range: Option<(f64, f64)>,
    /// Number of scan points.
    #[arg(long, default_value_t = 64)]
    pub points: usize,
}

#[derive(Clone, Debug, Args)]
pub struct Sweep2dArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Half-thicknesses.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.05, 0.02, 0.01])]
    pub eps: Vec<f64>,
    /// Meridian by thickness element counts, e.g. `16x2`.
    #[arg(long, default_value = "16x2")]
    pub mesh: String,
    /// Polynomial degree of the 2D elements.
    #[arg(long, default_value_t = shellmodes_core::lame2d::DEFAULT_DEGREE)]
    pub degree: usize,
    /// Boundary grading ratio of the meridian mesh.
    #[arg(long)]
    pub grading: Option<f64>,
}

#[derive(Clone, Debug, Args)]
pub struct TorusArgs {
    #[arg(long, default_value_t = 2.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 0.0)]
    pub z_center: f64,
    /// Meridian interval `lo,hi`.
    #[arg(long, value_parser = parse_pair, default_value = "-1,1", allow_hyphen_values = true)]
    pub interval: (f64, f64),
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    pub r_min: f64,
    #[arg(long, default_value_t = -0.1, allow_hyphen_values = true)]
    pub r_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Clone, Debug, Args)]
pub struct VerifyArgs {
    /// Restrict the preset checks to one model.
    #[arg(long)]
    pub model: Option<String>,
    /// Seed for the sampled evaluation points.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sampled points per preset.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

/// Parses `NxM` into element counts.
pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("`{s}` is not of the form lo,hi"))?;
    let lo = a.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}"))?;
    let hi = b.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}"))?;
    if !(lo < hi) {
        return Err(format!("`{s}` needs lo < hi"));
    }
    Ok((lo, hi))
}

pub fn parse_mesh(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("mesh `{s}` is not of the form NxM"))?;
    let n = a.trim().parse::<usize>().map_err(|e| format!("mesh `{s}`: {e}"))?;
    let m = b.trim().parse::<usize>().map_err(|e| format!("mesh `{s}`: {e}"))?;
    if n == 0 || m == 0 {
        return Err(format!("mesh `{s}` needs positive element counts"));
    }
    Ok((n, m))
}
