//! Command-line arguments and their merge with a configuration file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use corrwork_core::{SystemSpec, DEFAULT_DIM_CAP};

use crate::config::Config;
use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "corrwork",
    version,
    about = "Work extraction from correlated, locally thermal quantum states"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// `key = value` file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Reference inverse temperature, in units of 1/E_1.
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Local energy ladder, comma separated, starting at 0.
    #[arg(
        long = "energy-ladder",
        global = true,
        value_delimiter = ',',
        allow_negative_numbers = true
    )]
    pub energy_ladder: Option<Vec<f64>>,
    /// Number of subsystems.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Local dimension (equally spaced ladder unless --energy-ladder is set).
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Seed of the randomized checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Largest global dimension d^n allowed.
    #[arg(long = "dim-cap", global = true)]
    pub dim_cap: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Family {
    /// Entangled superposition of repeated levels.
    Phi,
    /// Classically correlated mixture of repeated levels.
    Sep,
    /// Mixture of Dicke states (qubits).
    Deg,
    /// Three-weight classical state at a given entropy (qubits).
    Omega,
    /// Thermal product at --beta-prime.
    Product,
    /// Mixture t·sep + (1-t)·thermal product.
    Mixture,
    /// Population-inversion sequence from a thermal product (sweep only).
    Protocol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Passivity,
    Protocols,
    Entanglement,
    Bounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Uniform rotation U_α.
    Rotation,
    /// Greedy population inversions.
    Inversion,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Work ratios of the entangled, classical and entropy-constrained curves.
    Figure1 {
        /// Largest n (falls back to --n, then 20).
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Ergotropy and bounds of one state.
    Ergotropy(FamilyArgs),
    /// Run the verification suites.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Tabulate families over a range of n.
    Sweep {
        /// Families, comma separated.
        #[arg(long, value_enum, value_delimiter = ',')]
        family: Option<Vec<Family>>,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        /// Total entropy for the omega family.
        #[arg(long)]
        s_total: Option<f64>,
        /// Inverse temperature of the protocol's initial product.
        #[arg(long)]
        beta_prime: Option<f64>,
        /// Protocol targets as fractions of the initial bias, comma separated.
        #[arg(long, value_delimiter = ',')]
        targets: Option<Vec<f64>>,
        /// Add the half-split partial-transpose minimum eigenvalue (n <= 8).
        #[arg(long)]
        ppt: bool,
    },
    /// Prepare a locally thermal state from a thermal product.
    Protocol {
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Inverse temperature of the initial product (default 2·beta).
        #[arg(long)]
        beta_prime: Option<f64>,
        /// Target local bias (default tanh(beta·E_1/2)).
        #[arg(long, allow_negative_numbers = true)]
        target_bias: Option<f64>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Total entropy (omega).
    #[arg(long)]
    pub s_total: Option<f64>,
    /// Inverse temperature of the product (product).
    #[arg(long)]
    pub beta_prime: Option<f64>,
    /// Mixing weight of the classical state (mixture).
    #[arg(long)]
    pub t: Option<f64>,
}

/// Global settings after merging flags over the configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub beta: f64,
    pub energy_ladder: Option<Vec<f64>>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub dim_cap: Option<usize>,
}

pub const DEFAULT_SEED: u64 = 20_160_425;

fn parse_format(s: &str) -> Result<Format> {
    Format::from_str(s, true).map_err(|_| CliError::Usage(format!("unknown format `{s}`")))
}

impl Settings {
    pub fn resolve(flags: &GlobalArgs, cfg: &Config) -> Result<Self> {
        let format = match (flags.format, cfg.raw("format")) {
            (Some(f), _) => f,
            (None, Some(s)) => parse_format(s)?,
            (None, None) => Format::Csv,
        };
        let settings = Self {
            beta: flags.beta.or(cfg.get("beta")?).unwrap_or(1.0),
            energy_ladder: flags
                .energy_ladder
                .clone()
                .or(cfg.get_list("energy_ladder")?),
            n: flags.n.or(cfg.get("n")?),
            d: flags.d.or(cfg.get("d")?),
            seed: flags.seed.or(cfg.get("seed")?).unwrap_or(DEFAULT_SEED),
            out: flags
                .out
                .clone()
                .or(cfg.get::<String>("out")?.map(PathBuf::from)),
            format,
            dim_cap: flags.dim_cap.or(cfg.get("dim_cap")?),
        };
        if !settings.beta.is_finite() || settings.beta < 0.0 {
            return Err(CliError::Usage(format!(
                "--beta must be finite and nonnegative, got {}",
                settings.beta
            )));
        }
        Ok(settings)
    }

    /// Local ladder: explicit, or `0, 1, …, d-1` in units of E_1.
    pub fn ladder(&self) -> Result<Vec<f64>> {
        match (&self.energy_ladder, self.d) {
            (Some(l), Some(d)) if l.len() != d => Err(CliError::Usage(format!(
                "--d {d} disagrees with a ladder of {} levels",
                l.len()
            ))),
            (Some(l), _) => Ok(l.clone()),
            (None, d) => Ok((0..d.unwrap_or(2)).map(|a| a as f64).collect()),
        }
    }

    pub fn spec(&self, default_n: usize) -> Result<SystemSpec> {
        self.spec_with_n(self.n.unwrap_or(default_n))
    }

    pub fn spec_with_n(&self, n: usize) -> Result<SystemSpec> {
        let spec = SystemSpec::new(n, self.ladder()?, self.beta)?;
        Ok(spec.with_dim_cap(self.dim_cap.unwrap_or(DEFAULT_DIM_CAP)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("corrwork").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_config() {
        let cli = parse(&["ergotropy", "--beta", "2", "--family", "phi"]);
        let cfg = Config::parse("beta = 0.5\nn = 5\nformat = both", None).unwrap();
        let s = Settings::resolve(&cli.global, &cfg).unwrap();
        assert_eq!(s.beta, 2.0);
        assert_eq!(s.n, Some(5));
        assert_eq!(s.format, Format::Both);
        assert_eq!(s.seed, DEFAULT_SEED);
    }

    #[test]
    fn ladder_resolution() {
        let cli = parse(&["figure1", "--energy-ladder", "0,1,3"]);
        let s = Settings::resolve(&cli.global, &Config::default()).unwrap();
        assert_eq!(s.ladder().unwrap(), vec![0.0, 1.0, 3.0]);
        let cli = parse(&["figure1", "--d", "3"]);
        let s = Settings::resolve(&cli.global, &Config::default()).unwrap();
        assert_eq!(s.ladder().unwrap(), vec![0.0, 1.0, 2.0]);
        let cli = parse(&["figure1", "--d", "2", "--energy-ladder", "0,1,3"]);
        let s = Settings::resolve(&cli.global, &Config::default()).unwrap();
        assert!(matches!(s.ladder(), Err(CliError::Usage(_))));
    }

    #[test]
    fn negative_beta_is_a_usage_error() {
        let cli = parse(&["verify", "--beta=-1"]);
        assert!(matches!(
            Settings::resolve(&cli.global, &Config::default()),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn sweep_lists() {
        let cli = parse(&["sweep", "--family", "phi,omega", "--targets", "0.9,0.5"]);
        match cli.command {
            Command::Sweep {
                family, targets, ..
            } => {
                assert_eq!(family, Some(vec![Family::Phi, Family::Omega]));
                assert_eq!(targets, Some(vec![0.9, 0.5]));
            }
            _ => panic!("wrong subcommand"),
        }
    }
}
