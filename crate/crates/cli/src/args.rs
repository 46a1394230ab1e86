use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use monoscore::montecarlo::{AlphaGrid, EnsembleSpec, StateClass};
use monoscore::{Direction, MeasureKind};

#[derive(Debug, Parser)]
#[command(
    name = "monoscore",
    version,
    about = "Monogamy scores of quantum correlations in random multiqubit pure states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Nonmonogamous fraction f(alpha), alpha_p, alpha_c and M_Q of an ensemble.
    Sweep(SweepArgs),
    /// Mean, variance, skewness and histogram of the monogamy score at one power.
    Stats(StatsArgs),
    /// Reproduce a reference table with side-by-side deviations.
    Table(TableArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    Haar,
    W,
}

impl From<ClassArg> for StateClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Haar => StateClass::Haar,
            ClassArg::W => StateClass::WClass,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Left,
    Right,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Left => Direction::Left,
            DirectionArg::Right => Direction::Right,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "MONOSCORE_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct EnsembleArgs {
    #[arg(long, value_enum, default_value_t = ClassArg::Haar)]
    pub class: ClassArg,
    #[arg(long, default_value_t = 3)]
    pub qubits: usize,
    /// concurrence, eof, negativity, log-negativity, discord[-left|-right],
    /// work-deficit[-left|-right].
    #[arg(long)]
    pub measure: MeasureKind,
    /// Which party a discord or work-deficit measurement acts on.
    #[arg(long, value_enum)]
    pub direction: Option<DirectionArg>,
    /// Nodal qubit, counted from 1.
    #[arg(long, default_value_t = 1)]
    pub nodal: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// `default`, or comma-separated powers and `lo:hi:step` ranges.
    #[arg(long, default_value = "default", value_parser = parse_alpha_grid)]
    pub alpha_grid: AlphaGrid,
    /// Also write every sampled state as JSON lines to this file.
    #[arg(long)]
    pub dump_states: Option<PathBuf>,
}

impl EnsembleArgs {
    pub fn measure(&self) -> MeasureKind {
        match self.direction {
            Some(d) => self.measure.with_direction(d.into()),
            None => self.measure,
        }
    }

    pub fn spec(&self, workers: usize) -> Result<EnsembleSpec, String> {
        if self.nodal == 0 || self.nodal > self.qubits {
            return Err(format!("--nodal must be between 1 and {}", self.qubits));
        }
        if self.direction.is_some() && self.measure.direction().is_none() {
            return Err(format!("--direction does not apply to {}", self.measure));
        }
        let mut spec = EnsembleSpec::new(
            self.class.into(),
            self.qubits,
            self.measure(),
            self.samples,
            self.seed,
        );
        spec.nodal = self.nodal - 1;
        spec.alpha_grid = self.alpha_grid.clone();
        spec.workers = workers;
        spec.validate().map_err(|e| e.to_string())?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Power applied to the measure.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Histogram of the scores: number of bins and range.
    #[arg(long, num_args = 3, value_names = ["BINS", "LO", "HI"], allow_negative_numbers = true)]
    pub histogram: Option<Vec<f64>>,
    /// Write every score, one per row, to this CSV file.
    #[arg(long)]
    pub scores: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    /// Table number, 1 to 6.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
    pub table: u8,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses `default` or a comma list whose items are numbers or
/// `lo:hi:step` ranges (inclusive of `hi` up to rounding).
pub fn parse_alpha_grid(s: &str) -> Result<AlphaGrid, String> {
    if s.trim().eq_ignore_ascii_case("default") {
        return Ok(AlphaGrid::standard());
    }
    let number = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{t}` is not a number"))
    };
    let mut points = Vec::new();
    for item in s.split(',').filter(|t| !t.trim().is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [x] => points.push(number(x)?),
            [lo, hi, step] => {
                let (lo, hi, step) = (number(lo)?, number(hi)?, number(step)?);
                if !step.is_finite() || step <= 0.0 || hi < lo {
                    return Err(format!("range `{item}` needs lo <= hi and a positive step"));
                }
                let count = ((hi - lo) / step + 1e-9).floor() as usize;
                points.extend((0..=count).map(|k| lo + k as f64 * step));
            }
            _ => return Err(format!("`{item}` is neither a number nor lo:hi:step")),
        }
    }
    AlphaGrid::new(points).map_err(|e| e.to_string())
}
