use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hamel_core::exactnum::DEFAULT_MAX_BITS;
use hamel_core::qspace::bundled::DEFAULT_SYMBOLS;
use hamel_core::{Claim, Rational};

#[derive(Debug, Parser)]
#[command(name = "hamel", version, about = "Exact Hamel-basis constructions and certificates for the coefficient-sum operator J")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the greedy basis of the enumeration.
    Space(Common),
    /// Print kernel, complement, range and extended codomain bases of the defined map.
    Map(Common),
    /// Build J and print its rescaled chain.
    Jop(Common),
    /// Run one probe and write its certificate.
    Probe(ProbeArgs),
    /// Run every probe, or collect given certificates, into a markdown report.
    Report(ReportArgs),
    /// Re-check a certificate or run report from disk.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON definition file; the bundled prime-root space is used when absent.
    #[arg(long)]
    pub define: Option<PathBuf>,
    /// Size of the bundled space (one plus square roots of the first primes).
    #[arg(long, default_value_t = DEFAULT_SYMBOLS)]
    pub symbols: usize,
    /// Index of the first basis vector in the rescaled chain.
    #[arg(long, default_value_t = 0)]
    pub chain_start: usize,
    /// Length of the rescaled chain; defaults to the rest of the basis.
    #[arg(long)]
    pub chain_length: Option<usize>,
    /// Working precision cap for interval evaluation.
    #[arg(long, default_value_t = DEFAULT_MAX_BITS)]
    pub max_bits: u32,
    /// Output file (written atomically).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProbeKind {
    InnerInner,
    AbsAbs,
    InnerAbs,
    AbsInner,
    Rational,
}

impl ProbeKind {
    pub fn claim(self) -> Claim {
        match self {
            ProbeKind::InnerInner => Claim::InnerInnerBounded,
            ProbeKind::AbsAbs => Claim::AbsAbsDiscontinuous,
            ProbeKind::InnerAbs => Claim::InnerAbsUnbounded,
            ProbeKind::AbsInner => Claim::AbsInnerDiscontinuous,
            ProbeKind::Rational => Claim::RationalRestrictionContinuous,
        }
    }

    pub const ALL: [ProbeKind; 5] = [
        ProbeKind::InnerInner,
        ProbeKind::AbsAbs,
        ProbeKind::InnerAbs,
        ProbeKind::AbsInner,
        ProbeKind::Rational,
    ];
}

#[derive(Debug, Clone, Args)]
pub struct ProbeParams {
    /// Candidate bound `a` for inner-abs.
    #[arg(long, default_value = "10")]
    pub bound: Rational,
    /// Rational `q` for the rational probe.
    #[arg(long, default_value = "3/2")]
    pub rational: Rational,
    /// Number of seeded samples for inner-inner.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sequence length N for abs-abs and abs-inner (capped at the chain length).
    #[arg(long, default_value_t = 32)]
    pub terms: usize,
    /// Precision limit for each decay enclosure.
    #[arg(long, default_value_t = 256)]
    pub decay_bits: u32,
}

#[derive(Debug, Clone, Args)]
pub struct ProbeArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub kind: ProbeKind,
    #[command(flatten)]
    pub params: ProbeParams,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub params: ProbeParams,
    /// Certificate or run-report files to collect instead of running probes.
    #[arg(long = "certificate")]
    pub certificates: Vec<PathBuf>,
    /// Also write the run report JSON here.
    #[arg(long)]
    pub run_report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    pub file: PathBuf,
}
