//! Command-line grammar and its translation into a [`RunConfig`].

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use nlgeo_core::{DistanceKind, OptimizerConfig, SweepFamily, WERNER_THRESHOLD};

use crate::error::CliError;
use crate::table::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    WernerSweep,
    BdSweep,
    BdGrid,
    BdMeasure,
    Iso,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::WernerSweep => "werner-sweep",
            Command::BdSweep => "bd-sweep",
            Command::BdGrid => "bd-grid",
            Command::BdMeasure => "bd-measure",
            Command::Iso => "iso",
            Command::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Hs,
    He,
    Bu,
    Tr,
    Re,
}

impl From<KindArg> for DistanceKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Hs => DistanceKind::HilbertSchmidt,
            KindArg::He => DistanceKind::Hellinger,
            KindArg::Bu => DistanceKind::Bures,
            KindArg::Tr => DistanceKind::Trace,
            KindArg::Re => DistanceKind::RelativeEntropy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    TwoBellMix,
    WernerLine,
}

/// Geometric and entropic measures of Bell nonlocality.
#[derive(Debug, Parser)]
#[command(name = "nlgeo", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,

    /// Distance kind; repeat or comma-separate for several.
    #[arg(long = "kind", value_enum, value_delimiter = ',')]
    pub kinds: Vec<KindArg>,

    /// Local dimension for `iso`.
    #[arg(long, default_value_t = 2)]
    pub d: usize,

    /// Single isotropic mixing parameter; `iso` sweeps when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,

    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub omega_min: f64,

    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub omega_max: f64,

    /// Single Werner parameter; `werner-sweep` sweeps when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<f64>,

    #[arg(long, default_value_t = WERNER_THRESHOLD, allow_hyphen_values = true)]
    pub w_min: f64,

    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub w_max: f64,

    /// Number of sweep points.
    #[arg(long, default_value_t = 51)]
    pub n: usize,

    /// Grid subdivisions per edge for `bd-grid`.
    #[arg(long, default_value_t = 50)]
    pub grid_n: usize,

    /// Family swept by `bd-sweep`.
    #[arg(long, value_enum, default_value = "two-bell-mix")]
    pub family: FamilyArg,

    /// Correlators a1,a2,a3 for `bd-measure`.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        conflicts_with = "e"
    )]
    pub a: Option<Vec<f64>>,

    /// Bell-basis weights e1,e2,e3,e4 for `bd-measure`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub e: Option<Vec<f64>>,

    /// Seed of the random starting points.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,

    #[arg(long)]
    pub param_tol: Option<f64>,

    #[arg(long)]
    pub max_iters: Option<usize>,

    /// Add wall-clock timings to the `validate` report.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BdInput {
    Correlators([f64; 3]),
    Probabilities([f64; 4]),
}

/// Fully resolved parameters of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub kinds: Vec<DistanceKind>,
    pub d: usize,
    pub omega: Option<f64>,
    pub omega_range: (f64, f64),
    pub w: Option<f64>,
    pub w_range: (f64, f64),
    pub n: usize,
    pub grid_n: usize,
    pub family: SweepFamily,
    pub state: Option<BdInput>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub optimizer: OptimizerConfig,
    pub timings: bool,
}

impl RunConfig {
    /// Defaults of the library with the given command.
    pub fn new(command: Command) -> Self {
        Self {
            command,
            kinds: default_kinds(command),
            d: 2,
            omega: None,
            omega_range: (0.0, 1.0),
            w: None,
            w_range: (WERNER_THRESHOLD, 1.0),
            n: 51,
            grid_n: 50,
            family: SweepFamily::TwoBellMix,
            state: None,
            output_path: None,
            format: Format::Csv,
            seed: 0,
            optimizer: OptimizerConfig::default(),
            timings: false,
        }
    }
}

fn default_kinds(command: Command) -> Vec<DistanceKind> {
    match command {
        Command::BdGrid => vec![DistanceKind::HilbertSchmidt],
        _ => DistanceKind::ALL.to_vec(),
    }
}

fn fixed<const N: usize>(flag: &str, v: Vec<f64>) -> Result<[f64; N], CliError> {
    let len = v.len();
    v.try_into().map_err(|_| {
        CliError::Argument(format!(
            "--{flag} takes {N} comma-separated numbers, got {len}"
        ))
    })
}

impl TryFrom<Cli> for RunConfig {
    type Error = CliError;

    fn try_from(cli: Cli) -> Result<Self, CliError> {
        let mut kinds: Vec<DistanceKind> = Vec::new();
        for k in cli.kinds {
            let k = DistanceKind::from(k);
            if !kinds.contains(&k) {
                kinds.push(k);
            }
        }
        if kinds.is_empty() {
            kinds = default_kinds(cli.command);
        }
        let state = match (cli.a, cli.e) {
            (Some(a), _) => Some(BdInput::Correlators(fixed("a", a)?)),
            (None, Some(e)) => Some(BdInput::Probabilities(fixed("e", e)?)),
            (None, None) => None,
        };
        if cli.command == Command::BdMeasure && state.is_none() {
            return Err(CliError::Argument("bd-measure needs --a or --e".into()));
        }
        let mut optimizer = OptimizerConfig {
            rng_seed: cli.seed,
            ..OptimizerConfig::default()
        };
        if let Some(t) = cli.param_tol {
            optimizer.param_tol = t;
        }
        if let Some(m) = cli.max_iters {
            optimizer.max_iters = m;
        }
        optimizer
            .validate()
            .map_err(|e| CliError::Argument(e.to_string()))?;
        Ok(Self {
            command: cli.command,
            kinds,
            d: cli.d,
            omega: cli.omega,
            omega_range: (cli.omega_min, cli.omega_max),
            w: cli.w,
            w_range: (cli.w_min, cli.w_max),
            n: cli.n,
            grid_n: cli.grid_n,
            family: match cli.family {
                FamilyArg::TwoBellMix => SweepFamily::TwoBellMix,
                FamilyArg::WernerLine => SweepFamily::WernerLine,
            },
            state,
            output_path: cli.out,
            format: match cli.format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            },
            seed: cli.seed,
            optimizer,
            timings: cli.timings,
        })
    }
}
