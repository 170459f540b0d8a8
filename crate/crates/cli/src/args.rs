use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fbms::spectra::{DEFAULT_GUARD, DEFAULT_MAX_MODE};
use fbms::verify::DEFAULT_SEED;
use fbms::SurfaceKind;

#[derive(Debug, Parser)]
#[command(name = "fbms", version, about = "Spectra of free boundary minimal surfaces in the unit ball")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of one boundary problem over a range of Fourier modes.
    Spectrum(SpectrumArgs),
    /// Count of Robin eigenvalues below a threshold, with certification.
    Index(IndexArgs),
    /// Spectrum of the non-local operator on J-harmonic functions.
    Nonlocal(NonlocalArgs),
    /// Quadrature checks of the second-variation identities.
    Verify(VerifyArgs),
    /// Per-grid eigenvalues, Richardson limits and observed orders.
    Convergence(SpectrumArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Surface {
    Catenoid,
    Disk,
}

impl From<Surface> for SurfaceKind {
    fn from(s: Surface) -> Self {
        match s {
            Surface::Catenoid => SurfaceKind::Catenoid,
            Surface::Disk => SurfaceKind::Disk,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    Robin,
    Dirichlet,
    SteklovLaplacian,
    SteklovJacobi,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Robin => "robin",
            Problem::Dirichlet => "dirichlet",
            Problem::SteklovLaplacian => "steklov-laplacian",
            Problem::SteklovJacobi => "steklov-jacobi",
        }
    }
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long, value_enum, default_value = "catenoid")]
    pub surface: Surface,
    /// Grid sizes (radial intervals), strictly increasing.
    #[arg(long = "n", value_delimiter = ',', default_value = "512,1024,2048")]
    pub grids: Vec<usize>,
    /// Half-width of the band in which a comparison is not certified.
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    pub guard: f64,
    /// JSON output path; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Optional CSV output path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Seed of the random test functions.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "robin")]
    pub problem: Problem,
    /// Mode range `a..b` (inclusive) or a single mode.
    #[arg(long, default_value = "0..8", value_parser = parse_modes)]
    pub modes: RangeInclusive<u32>,
    /// Eigenvalues kept per mode.
    #[arg(long, default_value_t = 4)]
    pub keep: usize,
}

#[derive(Debug, Clone, Args)]
pub struct IndexArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = DEFAULT_MAX_MODE)]
    pub max_mode: u32,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub threshold: f64,
}

#[derive(Debug, Clone, Args)]
pub struct NonlocalArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = DEFAULT_MAX_MODE)]
    pub max_mode: u32,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Interior and boundary sample points for the pointwise identities.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
}

pub fn parse_modes(text: &str) -> Result<RangeInclusive<u32>, String> {
    let parse = |s: &str| s.trim().parse::<u32>().map_err(|e| format!("invalid mode `{s}`: {e}"));
    let range = match text.split_once("..") {
        Some((lo, hi)) => parse(lo)?..=parse(hi.trim_start_matches('='))?,
        None => {
            let m = parse(text)?;
            m..=m
        }
    };
    if range.is_empty() {
        return Err(format!("empty mode range `{text}`"));
    }
    Ok(range)
}

/// Checks that cannot be expressed as clap value parsers.
pub fn validate(common: &Common) -> Result<(), String> {
    if common.grids.is_empty() {
        return Err("at least one grid size is required".into());
    }
    if common.grids.windows(2).any(|w| w[1] <= w[0]) {
        return Err(format!("grid sizes must be strictly increasing: {:?}", common.grids));
    }
    if !(common.guard.is_finite() && common.guard >= 0.0) {
        return Err(format!("guard must be a nonnegative number, got {}", common.guard));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_ranges() {
        assert_eq!(parse_modes("0..8").unwrap(), 0..=8);
        assert_eq!(parse_modes("2..=3").unwrap(), 2..=3);
        assert_eq!(parse_modes("5").unwrap(), 5..=5);
        assert!(parse_modes("4..1").is_err());
        assert!(parse_modes("x").is_err());
    }
}
