use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "framedim",
    version,
    about = "Dimension estimates and frame checks for spectral measures"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 1 << 20)]
    pub max_atoms: usize,
    #[arg(long, global = true, default_value_t = 4096)]
    pub max_gram: usize,
    #[arg(long, global = true, default_value_t = 64)]
    pub max_depth: u32,
    /// Directory for plot-ready CSV curves.
    #[arg(long, global = true, value_name = "DIR")]
    pub emit_plot_data: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Bound {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    TailMax,
    TailMin,
    SlopeFit,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropy dimension of a measure from partition entropies.
    EntropyDim {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, default_value_t = 24)]
        depth: u32,
        #[arg(long, value_enum, default_value_t = Bound::Upper)]
        bound: Bound,
        #[arg(long)]
        base: Option<u32>,
    },
    /// Beurling dimension of a spectrum from ball counts.
    BeurlingDim {
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::TailMax)]
        method: MethodArg,
        /// Comma-separated radii.
        #[arg(long)]
        schedule: Option<String>,
    },
    /// Fourier dimension from the decay of |μ̂|.
    FourierDim {
        #[arg(long)]
        measure: PathBuf,
        /// Comma-separated frequency magnitudes.
        #[arg(long)]
        schedule: Option<String>,
    },
    /// Exponent of the growth of ∫_{-r}^{r} |μ̂|².
    LevExponent {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        quad_tol: f64,
        #[arg(long)]
        schedule: Option<String>,
    },
    /// Frame bounds: exact for atomic measures, bracketed otherwise.
    FrameBounds {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        spectrum: PathBuf,
        /// Random exponential trials for non-atomic measures.
        #[arg(long, default_value_t = 32)]
        trials: usize,
    },
    /// Gram matrix of the exponentials and its distance from the identity.
    Gram {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
        /// Include the matrix entries as [re, im] pairs.
        #[arg(long)]
        matrix: bool,
    },
    /// Change-of-measure identity on random cells and frequencies.
    #[command(name = "check-lemma41")]
    CheckLemma41 {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Lower bound for |μ̂_D^□| at small frequencies.
    #[command(name = "check-lemma42")]
    CheckLemma42 {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 6)]
        depth: u32,
    },
    /// Ball counts against the Bessel bound times the entropy product.
    CheckCountingBound {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        spectrum: PathBuf,
        /// Bessel bound; computed from the atomic frame bounds when absent.
        #[arg(long)]
        bessel: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 10.0)]
        max_log2_h: f64,
    },
    /// Frame bounds survive restriction to a cell with null boundary.
    CheckRestriction {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        spectrum: PathBuf,
        /// `BASE:DEPTH:i1,i2,...`
        #[arg(long)]
        cell: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Writes the digit measure ν_I.
    BuildNu {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        levels: String,
        /// Emit the depth-n atomic truncation instead.
        #[arg(long)]
        truncate: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes the spectrum Λ_{I_n}.
    EnumerateSpectrum {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        levels: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        shift: i32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entropy, Hausdorff and Beurling values for ν_I and Λ_I.
    CounterexampleReport {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        levels: String,
        #[arg(long)]
        nmax: u32,
    },
    /// Hypothesis checks for μ + ν + ρ not being frame spectral.
    NonSpectralCertificate {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
        #[arg(long)]
        rho: Option<PathBuf>,
        #[arg(long, default_value_t = 32)]
        entropy_depth: u32,
    },
    /// Writes ρ = μ×δ_0 + δ_0×ν.
    Mixed {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::EntropyDim { .. } => "entropy-dim",
            Command::BeurlingDim { .. } => "beurling-dim",
            Command::FourierDim { .. } => "fourier-dim",
            Command::LevExponent { .. } => "lev-exponent",
            Command::FrameBounds { .. } => "frame-bounds",
            Command::Gram { .. } => "gram",
            Command::CheckLemma41 { .. } => "check-lemma41",
            Command::CheckLemma42 { .. } => "check-lemma42",
            Command::CheckCountingBound { .. } => "check-counting-bound",
            Command::CheckRestriction { .. } => "check-restriction",
            Command::BuildNu { .. } => "build-nu",
            Command::EnumerateSpectrum { .. } => "enumerate-spectrum",
            Command::CounterexampleReport { .. } => "counterexample-report",
            Command::NonSpectralCertificate { .. } => "non-spectral-certificate",
            Command::Mixed { .. } => "mixed",
        }
    }
}
